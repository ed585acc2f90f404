"""Root-of-unity constants, clock/shift matrices and dense operator arithmetic."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import reduce
from typing import Callable

import numpy as np

from .errors import DimensionCapError, DimensionMismatchError, NotMonomialError

MAX_DIM = 4096


@dataclass(frozen=True)
class RootContext:
    """Canonical roots of unity for N spin states.

    ``q0`` is the primitive N-th root of -1 with ``-q0 = exp(i pi / N)``;
    ``omega = 1/q0**2`` and ``omega_half = -1/q0``.
    """

    N: int
    q0: complex
    omega: complex
    omega_half: complex

    def omega_pow(self, n) -> complex:
        """omega**n with the exponent reduced mod N (exact table lookup)."""
        return self._omega_table[int(n) % self.N]

    @property
    def _omega_table(self) -> np.ndarray:
        return np.exp(-2j * np.pi * np.arange(self.N) / self.N)

    def omega_powers(self, exponents) -> np.ndarray:
        e = np.mod(np.asarray(exponents, dtype=np.int64), self.N)
        return self._omega_table[e]


def make_root_context(N: int) -> RootContext:
    if not isinstance(N, (int, np.integer)) or isinstance(N, bool):
        raise TypeError(f"N must be an integer, got {N!r}")
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    N = int(N)
    q0 = -cmath.exp(1j * math.pi / N)
    omega = cmath.exp(-2j * math.pi / N)
    omega_half = cmath.exp(-1j * math.pi / N)
    return RootContext(N, q0, omega, omega_half)


class DenseOperator:
    """Square complex matrix with dimension checks on every binary operation."""

    __slots__ = ("mat",)

    def __init__(self, mat):
        m = np.array(mat, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatchError(f"operator must be square, got shape {m.shape}")
        if m.shape[0] > MAX_DIM:
            raise DimensionCapError(f"dimension {m.shape[0]} exceeds cap {MAX_DIM}")
        m.setflags(write=False)
        self.mat = m

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def __repr__(self):
        return f"DenseOperator(dim={self.dim})"

    @classmethod
    def identity(cls, dim: int) -> DenseOperator:
        return cls(np.eye(dim, dtype=complex))

    @classmethod
    def diag(cls, values) -> DenseOperator:
        return cls(np.diag(np.asarray(values, dtype=complex)))

    def _check(self, other: DenseOperator):
        if not isinstance(other, DenseOperator):
            return NotImplemented
        if other.dim != self.dim:
            raise DimensionMismatchError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __matmul__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return DenseOperator(self.mat @ other.mat)

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return DenseOperator(self.mat + other.mat)

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return DenseOperator(self.mat - other.mat)

    def __mul__(self, scalar):
        if isinstance(scalar, DenseOperator):
            return NotImplemented
        return DenseOperator(complex(scalar) * self.mat)

    __rmul__ = __mul__

    def __neg__(self):
        return DenseOperator(-self.mat)

    def kron(self, other: DenseOperator) -> DenseOperator:
        if self.dim * other.dim > MAX_DIM:
            raise DimensionCapError(f"kron dimension {self.dim * other.dim} exceeds cap {MAX_DIM}")
        return DenseOperator(np.kron(self.mat, other.mat))

    def power(self, k: int) -> DenseOperator:
        if k < 0:
            return DenseOperator(np.linalg.matrix_power(np.linalg.inv(self.mat), -k))
        return DenseOperator(np.linalg.matrix_power(self.mat, k))

    def inv(self) -> DenseOperator:
        return DenseOperator(np.linalg.inv(self.mat))

    def trace(self) -> complex:
        return complex(np.trace(self.mat))

    def norm(self, ord=2) -> float:
        return float(np.linalg.norm(self.mat, ord))

    def commutator(self, other: DenseOperator) -> DenseOperator:
        return self @ other - other @ self


def kron_all(ops) -> DenseOperator:
    ops = list(ops)
    dim = math.prod(op.dim for op in ops)
    if dim > MAX_DIM:
        raise DimensionCapError(f"kron dimension {dim} exceeds cap {MAX_DIM}")
    return DenseOperator(reduce(np.kron, (op.mat for op in ops)))


def embed(op: DenseOperator, site: int, n_sites: int) -> DenseOperator:
    """Place a single-site operator at ``site`` of an ``n_sites`` chain."""
    d = op.dim
    eye = DenseOperator.identity(d)
    return kron_all(op if i == site else eye for i in range(n_sites))


def relative_residual(a: DenseOperator, b: DenseOperator) -> float:
    """Operator-norm distance relative to the larger of the two norms."""
    diff = (a - b).norm()
    scale = max(a.norm(), b.norm())
    return diff / scale if scale > 0 else diff


def clock_shift(ctx: RootContext) -> tuple[DenseOperator, DenseOperator]:
    """Return (Z, X) with (X)_{a,b} = delta_{a,b+1}, (Z)_{a,b} = omega^a delta_{a,b}."""
    N = ctx.N
    Z = np.diag(ctx.omega_powers(np.arange(N)))
    X = np.roll(np.eye(N, dtype=complex), 1, axis=0)
    return DenseOperator(Z), DenseOperator(X)


@dataclass(frozen=True)
class Monomial:
    """The operator coef * X**shift * Z**clock on one N-state site."""

    ctx: RootContext
    coef: complex = 1.0
    shift: int = 0
    clock: int = 0

    def operator(self) -> DenseOperator:
        Z, X = clock_shift(self.ctx)
        return self.coef * (X.power(self.shift % self.ctx.N) @ Z.power(self.clock % self.ctx.N))

    def eigenvalues(self) -> np.ndarray:
        """Spectrum in the diagonalizing basis (computational for Z-types, Fourier for X-types)."""
        N = self.ctx.N
        s, c = self.shift % N, self.clock % N
        k = np.arange(N)
        if s == 0:
            return self.coef * self.ctx.omega_powers(c * k)
        if c == 0:
            # X v_k = omega^{-k} v_k for v_k[j] = omega^{kj} / sqrt(N)
            return self.coef * self.ctx.omega_powers(-s * k)
        raise NotMonomialError("mixed X^a Z^b monomials have no closed-form eigenbasis here")


def fourier_matrix(ctx: RootContext) -> np.ndarray:
    """Columns are the shift eigenvectors v_k[j] = omega^{kj} / sqrt(N)."""
    N = ctx.N
    j, k = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
    return ctx.omega_powers(j * k) / math.sqrt(N)


def operator_function(op: Monomial, f: Callable[[complex], complex]) -> DenseOperator:
    """Apply the scalar function ``f`` to a clock or shift monomial through its spectrum."""
    if not isinstance(op, Monomial):
        raise NotMonomialError(
            f"operator_function needs a Monomial, got {type(op).__name__}; "
            "general eigendecomposition is not supported"
        )
    vals = np.array([f(v) for v in op.eigenvalues()], dtype=complex)
    if op.shift % op.ctx.N == 0:
        return DenseOperator.diag(vals)
    F = fourier_matrix(op.ctx)
    return DenseOperator((F * vals) @ F.conj().T)


def circulant(first_column) -> DenseOperator:
    """Matrix C with C[a, b] = c[(a - b) mod N], i.e. sum_k c[k] X^k."""
    c = np.asarray(first_column, dtype=complex)
    N = len(c)
    idx = (np.arange(N)[:, None] - np.arange(N)[None, :]) % N
    return DenseOperator(c[idx])
