"""Shared samplers and small independent oracles for the test suite.

The oracles here deliberately avoid the package's own code paths: matrix
products are spelled out with plain numpy (or plain Python for the smallest
cases) so expected values come from a second route.
"""

from __future__ import annotations

import numpy as np


def rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_density(gen: np.random.Generator, dim: int) -> np.ndarray:
    a = gen.standard_normal((dim, dim)) + 1j * gen.standard_normal((dim, dim))
    m = a @ a.conj().T
    return m / np.trace(m).real


def random_unitary(gen: np.random.Generator, dim: int) -> np.ndarray:
    a = gen.standard_normal((dim, dim)) + 1j * gen.standard_normal((dim, dim))
    q, r = np.linalg.qr(a)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_projector(gen: np.random.Generator, dim: int,
                     rank: int | None = None) -> np.ndarray:
    if rank is None:
        rank = int(gen.integers(0, dim + 1))
    u = random_unitary(gen, dim)
    cols = u[:, :rank]
    return cols @ cols.conj().T


def random_pure(gen: np.random.Generator, dim: int) -> np.ndarray:
    v = gen.standard_normal(dim) + 1j * gen.standard_normal(dim)
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


def basis_state(dim: int, k: int) -> np.ndarray:
    m = np.zeros((dim, dim), dtype=complex)
    m[k, k] = 1.0
    return m


KET_PLUS = np.full((2, 2), 0.5, dtype=complex)
KET_MINUS = np.array([[0.5, -0.5], [-0.5, 0.5]], dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def truth_value_oracle(u: np.ndarray, rho: np.ndarray, p: np.ndarray) -> float:
    """Tr(U rho U* P) by direct numpy, no package code."""
    return float(np.trace(u @ rho @ u.conj().T @ p).real)


def mat2_mult(a, b):
    """2x2 complex product on plain nested lists, for package-free checks."""
    return [[sum(a[i][k] * b[k][j] for k in range(2)) for j in range(2)]
            for i in range(2)]


def mat2_trace(a) -> complex:
    return a[0][0] + a[1][1]


# reversible classical gates on basis indices; wire 0 is the high bit
def bit_of(index: int, wire: int, width: int) -> int:
    return (index >> (width - 1 - wire)) & 1


def flip_bit(index: int, wire: int, width: int) -> int:
    return index ^ (1 << (width - 1 - wire))


def classical_step(name: str, wires: tuple[int, ...], index: int, width: int) -> int:
    if name == "X":
        return flip_bit(index, wires[0], width)
    if name == "CNOT":
        return (flip_bit(index, wires[1], width)
                if bit_of(index, wires[0], width) else index)
    if name == "TOFFOLI":
        c1, c2, t = wires
        return (flip_bit(index, t, width)
                if bit_of(index, c1, width) and bit_of(index, c2, width) else index)
    raise ValueError(name)
