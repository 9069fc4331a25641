"""Validated operator types and the trace pairing they feed.

States are density operators, events are orthogonal projectors, and dynamics
are unitaries; each is a frozen wrapper around a dense complex matrix whose
defining invariants are checked at construction time.  On top of these the
module provides the probability pairing ``born``, commutant computation by
null-space methods, and extraction of the Boolean event algebra generated by
a family of rank-one projectors.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

from .errors import (
    DimensionMismatch,
    NonAbelianAlgebra,
    NonRealTrace,
    NotOrthonormalFamily,
    SizeCapExceeded,
    ValidationFailure,
)

DEFAULT_TOL = 1e-9

# Dense matrices only; anything past this dimension is out of scope for the
# exhaustive checks this package performs.
MAX_DIM = 2 ** 10


def as_square_matrix(data, *, max_dim: int = MAX_DIM) -> np.ndarray:
    """Coerce to a read-only square complex ndarray, or raise."""
    m = np.array(data, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationFailure("square", 0.0, f"shape {m.shape}")
    if m.shape[0] < 1:
        raise ValidationFailure("nonempty", 0.0)
    if m.shape[0] > max_dim:
        raise SizeCapExceeded(f"dimension {m.shape[0]} exceeds cap {max_dim}")
    if not np.all(np.isfinite(m.view(float))):
        raise ValidationFailure("finite", float("inf"))
    m.setflags(write=False)
    return m


def trace(matrix) -> complex:
    """Trace of a square matrix as a plain complex number."""
    return complex(np.trace(as_square_matrix(matrix)))


def tensor(a, b) -> np.ndarray:
    """Kronecker product; the first factor occupies the leftmost wires."""
    out = np.kron(as_square_matrix(a), as_square_matrix(b))
    out.setflags(write=False)
    return out


def _hermit_gap(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


@dataclass(frozen=True)
class DensityOperator:
    """A self-adjoint, positive semidefinite, trace-one matrix."""

    matrix: np.ndarray
    tolerance: float = DEFAULT_TOL

    def __post_init__(self):
        object.__setattr__(self, "matrix", as_square_matrix(self.matrix))
        if self.tolerance < 0:
            raise ValidationFailure("tolerance", self.tolerance, "must be >= 0")
        gap = _hermit_gap(self.matrix)
        if gap > self.tolerance:
            raise ValidationFailure("hermitian", gap)
        tgap = abs(np.trace(self.matrix) - 1.0)
        if tgap > self.tolerance:
            raise ValidationFailure("trace-one", tgap)
        evs = np.linalg.eigvalsh((self.matrix + self.matrix.conj().T) / 2)
        if evs[0] < -self.tolerance:
            raise ValidationFailure("positive", -evs[0])

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class Projector:
    """A self-adjoint idempotent matrix (an event)."""

    matrix: np.ndarray
    tolerance: float = DEFAULT_TOL

    def __post_init__(self):
        object.__setattr__(self, "matrix", as_square_matrix(self.matrix))
        if self.tolerance < 0:
            raise ValidationFailure("tolerance", self.tolerance, "must be >= 0")
        gap = _hermit_gap(self.matrix)
        if gap > self.tolerance:
            raise ValidationFailure("hermitian", gap)
        igap = float(np.max(np.abs(self.matrix @ self.matrix - self.matrix)))
        if igap > self.tolerance:
            raise ValidationFailure("idempotent", igap)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def rank(self) -> int:
        # eigenvalues of a projector cluster at 0 and 1
        return int(round(np.trace(self.matrix).real))


@dataclass(frozen=True)
class UnitaryGate:
    """A unitary matrix, UU* = U*U = identity."""

    matrix: np.ndarray
    tolerance: float = DEFAULT_TOL

    def __post_init__(self):
        object.__setattr__(self, "matrix", as_square_matrix(self.matrix))
        if self.tolerance < 0:
            raise ValidationFailure("tolerance", self.tolerance, "must be >= 0")
        eye = np.eye(self.matrix.shape[0])
        gap = float(np.max(np.abs(self.matrix @ self.matrix.conj().T - eye)))
        gap = max(gap, float(np.max(np.abs(self.matrix.conj().T @ self.matrix - eye))))
        if gap > self.tolerance:
            raise ValidationFailure("unitary", gap)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def dagger(self) -> "UnitaryGate":
        return UnitaryGate(self.matrix.conj().T, self.tolerance)


_KINDS = {"density": DensityOperator, "projector": Projector, "unitary": UnitaryGate}


def validate(matrix, kind: str, tolerance: float = DEFAULT_TOL):
    """Check a raw matrix against the invariants of ``kind`` and wrap it.

    ``kind`` is one of "density", "projector", "unitary".  Raises
    :class:`ValidationFailure` naming the first violated invariant.
    """
    try:
        cls = _KINDS[kind]
    except KeyError:
        raise ValueError(f"unknown kind {kind!r}; expected one of {sorted(_KINDS)}")
    return cls(matrix, tolerance)


def conjugate(u: UnitaryGate, rho: DensityOperator) -> DensityOperator:
    """Evolve a state: rho -> U rho U*."""
    if u.dim != rho.dim:
        raise DimensionMismatch(f"gate dim {u.dim} vs state dim {rho.dim}")
    out = u.matrix @ rho.matrix @ u.matrix.conj().T
    return DensityOperator(out, max(u.tolerance, rho.tolerance))


def born(sigma: DensityOperator, p: Projector) -> float:
    """Probability Tr(sigma P), clamped into [0, 1].

    The pairing of a valid state with a valid event is real up to rounding;
    a larger imaginary part than the working tolerance raises
    :class:`NonRealTrace`.
    """
    if sigma.dim != p.dim:
        raise DimensionMismatch(f"state dim {sigma.dim} vs event dim {p.dim}")
    t = complex(np.trace(sigma.matrix @ p.matrix))
    tol = max(sigma.tolerance, p.tolerance)
    if abs(t.imag) > tol:
        raise NonRealTrace(f"imaginary part {t.imag:.3e} exceeds {tol:.1e}")
    return min(1.0, max(0.0, t.real))


def truth_value_of(u: UnitaryGate, rho: DensityOperator, p: Projector) -> float:
    """Tr(U rho U* P): probability that event P holds after running U on rho."""
    return born(conjugate(u, rho), p)


# ---------------------------------------------------------------------------
# commutants


@dataclass(frozen=True)
class OperatorAlgebraBasis:
    """An orthonormal (Hilbert-Schmidt) basis of a subspace of matrices.

    Produced by :func:`commutant`; the span is guaranteed closed under the
    adjoint and to contain the identity when it arises as a commutant.
    """

    dim: int
    basis: tuple[np.ndarray, ...]

    def __post_init__(self):
        mats = tuple(as_square_matrix(b) for b in self.basis)
        for b in mats:
            if b.shape[0] != self.dim:
                raise DimensionMismatch(
                    f"basis element dim {b.shape[0]} vs declared {self.dim}")
        object.__setattr__(self, "basis", mats)
        if mats:
            stacked = np.stack([b.reshape(-1) for b in mats])
            rank = np.linalg.matrix_rank(stacked)
            if rank != len(mats):
                raise ValidationFailure(
                    "independent", len(mats) - rank, "basis is linearly dependent")

    def __len__(self) -> int:
        return len(self.basis)

    def contains(self, matrix, tol: float = DEFAULT_TOL) -> bool:
        """Least-squares membership test for span(basis)."""
        m = as_square_matrix(matrix)
        if m.shape[0] != self.dim:
            raise DimensionMismatch(f"dim {m.shape[0]} vs {self.dim}")
        if not self.basis:
            return bool(np.max(np.abs(m)) <= tol)
        a = np.stack([b.reshape(-1) for b in self.basis]).T
        coeff, *_ = np.linalg.lstsq(a, m.reshape(-1), rcond=None)
        resid = float(np.max(np.abs(a @ coeff - m.reshape(-1))))
        return resid <= tol


def commutant(matrices: Iterable, dim: int, *, tol: float = DEFAULT_TOL) -> OperatorAlgebraBasis:
    """All X with XY = YX for every Y in ``matrices``, as a basis.

    Solved as one linear system: with row-major vectorization,
    vec(XY - YX) = (I (x) Y^T - Y (x) I) vec(X), so the commutant is the
    null space of the stacked coefficient blocks.  An empty family commutes
    with everything, giving the full matrix algebra.
    """
    mats = [as_square_matrix(m) for m in matrices]
    for m in mats:
        if m.shape[0] != dim:
            raise DimensionMismatch(f"element dim {m.shape[0]} vs declared {dim}")
    eye = np.eye(dim)
    if not mats:
        units = tuple(
            _unit_matrix(dim, i, j) for i in range(dim) for j in range(dim))
        return OperatorAlgebraBasis(dim, units)
    blocks = [np.kron(eye, y.T) - np.kron(y, eye) for y in mats]
    system = np.vstack(blocks)
    null = scipy.linalg.null_space(system)
    basis = tuple(null[:, k].reshape(dim, dim) for k in range(null.shape[1]))
    out = OperatorAlgebraBasis(dim, basis)
    if not out.contains(eye, tol):
        raise ValidationFailure("identity-in-span", 1.0,
                                "commutant basis lost the identity")
    return out


def _unit_matrix(dim: int, i: int, j: int) -> np.ndarray:
    m = np.zeros((dim, dim), dtype=complex)
    m[i, j] = 1.0
    return m


def double_commutant(matrices: Iterable, dim: int, *, tol: float = DEFAULT_TOL) -> OperatorAlgebraBasis:
    """The algebra generated by ``matrices`` (with identity), via (S')'."""
    first = commutant(matrices, dim, tol=tol)
    return commutant(first.basis, dim, tol=tol)


# ---------------------------------------------------------------------------
# Boolean event algebras


def entry_key(matrix, digits: int) -> tuple:
    """Canonical hashable key: entries rounded to ``digits`` decimals."""
    m = np.asarray(matrix, dtype=complex).reshape(-1)
    # -0.0 and 0.0 must collide
    re = np.round(m.real, digits) + 0.0
    im = np.round(m.imag, digits) + 0.0
    return tuple(zip(re.tolist(), im.tolist()))


def boolean_projections(
    family: Sequence[Projector],
    *,
    tol: float = DEFAULT_TOL,
    max_minimal: int = 16,
) -> list[Projector]:
    """Boolean algebra of events generated by a measurement family.

    ``family`` must be rank-one projectors onto an orthonormal basis (pairwise
    orthogonal, summing to the identity); otherwise
    :class:`NotOrthonormalFamily` is raised.  The double commutant of the
    family is formed, checked to be abelian, and decomposed into its minimal
    projections; the returned list holds all 2**k of their sums (including 0
    and the identity) in a deterministic entrywise order.
    """
    if not family:
        raise NotOrthonormalFamily("empty family")
    dim = family[0].dim
    for p in family:
        if not isinstance(p, Projector):
            raise NotOrthonormalFamily("family members must be projectors")
        if p.dim != dim:
            raise DimensionMismatch(f"member dim {p.dim} vs {dim}")
    total = np.zeros((dim, dim), dtype=complex)
    for i, p in enumerate(family):
        if abs(np.trace(p.matrix).real - 1.0) > tol:
            raise NotOrthonormalFamily(f"member {i} is not rank one")
        for q in family[i + 1:]:
            if np.max(np.abs(p.matrix @ q.matrix)) > tol:
                raise NotOrthonormalFamily("members are not pairwise orthogonal")
        total = total + p.matrix
    if np.max(np.abs(total - np.eye(dim))) > max(tol, dim * tol):
        raise NotOrthonormalFamily("family does not sum to the identity")

    algebra = double_commutant([p.matrix for p in family], dim, tol=tol)
    for i, a in enumerate(algebra.basis):
        for b in algebra.basis[i + 1:]:
            gap = float(np.max(np.abs(a @ b - b @ a)))
            if gap > tol:
                raise NonAbelianAlgebra(f"basis elements {i} fail to commute by {gap:.3e}")

    minimal = _minimal_projections(algebra, tol)
    k = len(minimal)
    if k > max_minimal:
        raise SizeCapExceeded(
            f"{k} minimal projections would give 2**{k} events (cap {max_minimal})")

    events: list[Projector] = []
    for picks in itertools.product((0, 1), repeat=k):
        m = np.zeros((dim, dim), dtype=complex)
        for bit, q in zip(picks, minimal):
            if bit:
                m = m + q
        events.append(Projector(m, tol))
    events.sort(key=lambda p: entry_key(p.matrix, 12))
    return events


def _minimal_projections(algebra: OperatorAlgebraBasis, tol: float) -> list[np.ndarray]:
    """Spectral decomposition of a generic self-adjoint algebra element.

    A finite-dimensional abelian *-algebra with identity is spanned by its
    minimal projections; a random self-adjoint combination of the basis has,
    generically, one distinct eigenvalue per minimal projection, so its
    spectral projectors are exactly what we want.  Seeds are fixed for
    determinism and retried in the unlikely degenerate case.
    """
    dim = algebra.dim
    k = len(algebra)
    for seed in range(5):
        rng = np.random.default_rng(20240517 + seed)
        h = np.zeros((dim, dim), dtype=complex)
        for b in algebra.basis:
            u, v = rng.uniform(1.0, 2.0, size=2)
            h = h + u * (b + b.conj().T) / 2 + v * (b - b.conj().T) / 2j
        evals, evecs = np.linalg.eigh(h)
        clusters: list[list[int]] = [[0]]
        for i in range(1, dim):
            if evals[i] - evals[clusters[-1][0]] > 1e-6 * max(1.0, abs(evals[-1])):
                clusters.append([i])
            else:
                clusters[-1].append(i)
        if len(clusters) != k:
            continue
        projs = []
        ok = True
        for idxs in clusters:
            v = evecs[:, idxs]
            q = v @ v.conj().T
            if not algebra.contains(q, max(tol, 1e-7)):
                ok = False
                break
            projs.append(q)
        if ok:
            return projs
    raise NonAbelianAlgebra(
        "could not split the algebra into minimal projections; "
        "generic elements stayed degenerate")


# ---------------------------------------------------------------------------
# matrix JSON interchange


def matrix_to_json(matrix) -> dict:
    """Serialize to ``{"dim": n, "re": [...], "im": [...]}`` (row-major)."""
    m = as_square_matrix(matrix)
    return {
        "dim": int(m.shape[0]),
        "re": [float(x) for x in m.real.reshape(-1)],
        "im": [float(x) for x in m.imag.reshape(-1)],
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    """Inverse of :func:`matrix_to_json`; validates lengths."""
    try:
        dim = int(obj["dim"])
        re = obj["re"]
        im = obj.get("im", [0.0] * (dim * dim))
    except (KeyError, TypeError) as exc:
        raise ValidationFailure("matrix-json", 0.0, f"missing field: {exc}")
    if len(re) != dim * dim or len(im) != dim * dim:
        raise ValidationFailure(
            "matrix-json", 0.0,
            f"need {dim * dim} entries, got re={len(re)} im={len(im)}")
    m = np.array(re, dtype=float).reshape(dim, dim) + 1j * np.array(
        im, dtype=float).reshape(dim, dim)
    return as_square_matrix(m)
