"""Exact runs of two oracle algorithms.

Everything here is computed by dense linear algebra, so the returned
distributions are exact up to floating point: the single-query constancy
test on one-bit functions, and period estimation for an r-periodic function
on Z_N (N a power of two times nothing special, any N with r | N works).
No shots are simulated unless a sampling step is explicitly requested.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    InvalidSpec,
    ParseError,
    UnknownOutcome,
    ValidationFailure,
    WidthMismatch,
)
from .gates import GateSpec, elementary, fourier_matrix
from .qcore import DensityOperator, Projector, UnitaryGate, born, conjugate, tensor


@dataclass(frozen=True)
class OracleFunction:
    """A total function {0,1}^n -> {0,1}^m given by its table."""

    domain_bits: int
    codomain_bits: int
    table: Mapping[str, str]

    def __post_init__(self):
        if self.domain_bits < 0 or self.codomain_bits < 1:
            raise ValidationFailure("register-size", 0.0,
                                    "need n >= 0 input and m >= 1 output bits")
        fixed = {}
        for x, y in dict(self.table).items():
            if len(x) != self.domain_bits or any(c not in "01" for c in x):
                raise ValidationFailure("oracle-key", 0.0,
                                        f"{x!r} is not a {self.domain_bits}-bit word")
            if len(y) != self.codomain_bits or any(c not in "01" for c in y):
                raise ValidationFailure("oracle-value", 0.0,
                                        f"{y!r} is not a {self.codomain_bits}-bit word")
            fixed[x] = y
        if len(fixed) != 2 ** self.domain_bits:
            raise ValidationFailure("oracle-total", 0.0,
                                    f"{len(fixed)} rows, need {2 ** self.domain_bits}")
        object.__setattr__(self, "table", fixed)

    def __call__(self, x: str) -> str:
        return self.table[x]


def one_bit_functions() -> dict[str, OracleFunction]:
    """The four functions {0,1} -> {0,1}: both balanced, both constant."""
    mk = lambda a, b: OracleFunction(1, 1, {"0": a, "1": b})
    return {
        "identity": mk("0", "1"),
        "not": mk("1", "0"),
        "const0": mk("0", "0"),
        "const1": mk("1", "1"),
    }


def oracle_from_json(obj: dict) -> OracleFunction:
    """Parse ``{"n": ..., "m": ..., "table": {...}}``."""
    try:
        return OracleFunction(int(obj["n"]), int(obj["m"]), dict(obj["table"]))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad oracle payload: {exc}")


def oracle_to_json(f: OracleFunction) -> dict:
    return {"n": f.domain_bits, "m": f.codomain_bits,
            "table": dict(sorted(f.table.items()))}


def build_oracle(f: OracleFunction) -> UnitaryGate:
    """The standard reversible lift |x>|y> -> |x>|y xor f(x)>.

    The input register comes first (leftmost wires), then the ancilla; the
    matrix is the permutation of basis states this rule describes.
    """
    n, m = f.domain_bits, f.codomain_bits
    size = 2 ** (n + m)
    matrix = np.zeros((size, size), dtype=complex)
    for x in range(2 ** n):
        fx = int(f(format(x, f"0{n}b") if n else ""), 2)
        for y in range(2 ** m):
            src = x * 2 ** m + y
            dst = x * 2 ** m + (y ^ fx)
            matrix[dst, src] = 1.0
    return UnitaryGate(matrix)


@dataclass(frozen=True)
class RunResult:
    """An algorithm run: exact outcome distribution, the probability that
    the algorithm's answer is correct, and the answer itself."""

    outcome_distribution: dict[str, float]
    success_probability: float
    verdict: str

    def __post_init__(self):
        dist = {str(k): float(v) for k, v in self.outcome_distribution.items()}
        if not dist:
            raise ValidationFailure("distribution", 0.0, "no outcomes")
        low = min(dist.values())
        if low < -1e-9:
            raise ValidationFailure("distribution", -low, "negative probability")
        gap = abs(sum(dist.values()) - 1.0)
        if gap > 1e-9:
            raise ValidationFailure("distribution", gap, "does not sum to one")
        if not 0.0 <= self.success_probability <= 1.0 + 1e-12:
            raise ValidationFailure("success", self.success_probability)
        object.__setattr__(self, "outcome_distribution", dist)

    def to_json_dict(self) -> dict:
        return {
            "distribution": dict(sorted(self.outcome_distribution.items())),
            "success_probability": self.success_probability,
            "verdict": self.verdict,
        }


def deutsch_jozsa(f: OracleFunction) -> RunResult:
    """One-query constancy test for a one-bit function, run exactly.

    Wire 0 holds the query register, wire 1 the ancilla prepared in |1>.
    After H on both wires, the oracle, and a final H on wire 0, the first
    wire reads 0 with probability 1 when f is constant and 0 when balanced.
    The verdict is "constant" iff that probability is at least 1/2.
    """
    if f.domain_bits != 1 or f.codomain_bits != 1:
        raise WidthMismatch(
            f"this test takes a 1-bit function, got {f.domain_bits}->{f.codomain_bits}")
    ket01 = np.zeros((4, 4), dtype=complex)
    ket01[1, 1] = 1.0
    rho = DensityOperator(ket01)
    h0 = elementary(GateSpec("H", (0,)), 2).matrix
    h1 = elementary(GateSpec("H", (1,)), 2).matrix
    total = UnitaryGate(h0 @ build_oracle(f).matrix @ (h0 @ h1))
    final = conjugate(total, rho)
    proj0 = Projector(tensor(np.diag([1.0, 0.0]), np.eye(2)))
    proj1 = Projector(tensor(np.diag([0.0, 1.0]), np.eye(2)))
    p0 = born(final, proj0)
    p1 = born(final, proj1)
    constant = p0 >= 0.5
    truly_constant = f("0") == f("1")
    success = p0 if truly_constant else p1
    return RunResult({"0": p0, "1": p1}, success,
                     "constant" if constant else "balanced")


def qft(n: int) -> UnitaryGate:
    """The Fourier transform on Z_n as a validated gate.

    Entries are e^{2 pi i a b / n} / sqrt(n); for n = 2 this is the
    Hadamard matrix.
    """
    return UnitaryGate(fourier_matrix(n))


@dataclass(frozen=True)
class PeriodicSpec:
    """An r-periodic, within-period injective function on Z_N.

    ``values[x]`` may be any integers; what matters is the coincidence
    pattern f(x) = f(x + r).  r must divide N, and the first r values must
    be pairwise distinct, otherwise the declared period is wrong and
    :class:`InvalidSpec` is raised.
    """

    modulus: int
    period: int
    values: tuple[int, ...]

    def __post_init__(self):
        n, r = self.modulus, self.period
        if n < 1 or r < 1:
            raise InvalidSpec(f"need N >= 1 and r >= 1, got N={n} r={r}")
        if n % r != 0:
            raise InvalidSpec(f"period {r} does not divide N={n}")
        vals = tuple(int(v) for v in self.values)
        if len(vals) != n:
            raise InvalidSpec(f"{len(vals)} values for modulus {n}")
        object.__setattr__(self, "values", vals)
        for x in range(n):
            if vals[x] != vals[(x + r) % n]:
                raise InvalidSpec(f"f({x}) != f({x + r}) despite period {r}")
        if len(set(vals[:r])) != r:
            raise InvalidSpec("values repeat within one period")


def periodic_from_json(obj: dict) -> PeriodicSpec:
    """Parse ``{"N": ..., "r": ..., "f": [...]}``."""
    try:
        return PeriodicSpec(int(obj["N"]), int(obj["r"]), tuple(obj["f"]))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad periodic spec payload: {exc}")


def _conditional_vectors(spec: PeriodicSpec) -> dict[int, np.ndarray]:
    """First-register states conditioned on each second-register value.

    Keyed by the function value; each vector is the normalized uniform
    superposition of the K = N / r inputs sharing that value.
    """
    n, r = spec.modulus, spec.period
    k = n // r
    out: dict[int, np.ndarray] = {}
    for x0 in range(r):
        v = np.zeros(n, dtype=complex)
        v[x0::r] = 1.0 / math.sqrt(k)
        out[spec.values[x0]] = v
    return out


def period_find(spec: PeriodicSpec, *, condition_on: int | None = None,
                samples: int = 8, seed: int = 0) -> RunResult:
    """Exact outcome distribution of Fourier-sampling the period.

    The first register's post-measurement mixture (or, with
    ``condition_on``, the branch for one observed function value) is pushed
    through the Fourier transform; the resulting distribution is supported
    on the multiples of N/r with weight 1/r each, independent of which
    value was observed.  A seeded sampler then draws ``samples`` outcomes
    and estimates r as N / gcd(outcomes, N); the success probability
    phi(r)/r is that of a single draw landing on a coprime multiple.
    """
    n, r = spec.modulus, spec.period
    branches = _conditional_vectors(spec)
    fmat = fourier_matrix(n)
    if condition_on is not None:
        if condition_on not in branches:
            raise UnknownOutcome(
                f"{condition_on} is not a value of the function")
        probs = np.abs(fmat @ branches[condition_on]) ** 2
    else:
        probs = np.zeros(n)
        for v in branches.values():
            probs += np.abs(fmat @ v) ** 2 / r
    probs = np.maximum(probs, 0.0)
    probs /= probs.sum()

    rng = np.random.default_rng(seed)
    draws = rng.choice(n, size=max(1, samples), p=probs)
    g = n
    for c in draws:
        g = math.gcd(g, int(c))
    estimate = n // g

    coprime = sum(1 for k in range(r) if math.gcd(k, r) == 1)
    return RunResult({str(c): float(probs[c]) for c in range(n)},
                     coprime / r, f"period={estimate}")


def period_branches(spec: PeriodicSpec) -> dict[int, dict[str, float]]:
    """Per-observed-value outcome distributions, for inspecting invariance."""
    fmat = fourier_matrix(spec.modulus)
    return {
        value: {str(c): float(p) for c, p in
                enumerate(np.abs(fmat @ vec) ** 2)}
        for value, vec in _conditional_vectors(spec).items()
    }


def success_probability(result: RunResult, success_outcomes: Sequence[str]) -> float:
    """Total probability of the listed outcomes in a run's distribution."""
    total = 0.0
    for label in success_outcomes:
        if label not in result.outcome_distribution:
            raise UnknownOutcome(f"outcome {label!r} not in distribution")
        total += result.outcome_distribution[label]
    return min(1.0, total)
