"""Classical discrete sine-Gordon evolution on the periodic saw lattice."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core_algebra import RootContext
from .errors import NonGenericError, SingularEvolutionError

CONSTRAINT_TOL = 1e-10


def f(lam, x):
    """f(lambda, x) = (1 + lambda x) / (lambda + x)."""
    return (1 + lam * x) / (lam + x)


@dataclass(frozen=True)
class LatticeState:
    L: int
    w: tuple
    constrained: bool = False

    def __post_init__(self):
        if self.L < 2:
            raise ValueError("L must be >= 2")
        if len(self.w) != 2 * self.L:
            raise ValueError(f"expected {2 * self.L} values, got {len(self.w)}")
        if any(v == 0 for v in self.w):
            raise ValueError("lattice values must be nonzero")
        if self.constrained:
            c1, c2 = casimirs(self)
            if abs(c1 - 1) > CONSTRAINT_TOL or abs(c2 - 1) > CONSTRAINT_TOL:
                raise ValueError(f"constraint C1 = C2 = 1 violated: C1={c1}, C2={c2}")

    @classmethod
    def from_array(cls, w, constrained: bool = False) -> LatticeState:
        w = tuple(complex(v) for v in w)
        return cls(len(w) // 2, w, constrained)

    def array(self) -> np.ndarray:
        return np.array(self.w, dtype=complex)


def casimirs(state: LatticeState) -> tuple[complex, complex]:
    """(C1, C2) = (prod of odd-site values, prod of even-site values)."""
    w = np.array(state.w, dtype=complex)
    return complex(np.prod(w[1::2])), complex(np.prod(w[0::2]))


def _f_checked(lam, x, site):
    if lam + x == 0:
        raise SingularEvolutionError(site, f"pole of f at site {site}: w = -lambda")
    val = f(lam, x)
    if val == 0:
        raise SingularEvolutionError(site, f"zero of f at site {site}")
    return val


def _quotient(a: complex, b: complex) -> complex:
    # complex z / z can round away from 1; keep backgrounds exactly stationary
    return 1.0 if a == b else a / b


def evolve(state: LatticeState, lambda_param: complex) -> LatticeState:
    """One time step: even sites from the old odd ones, then odd sites from the new even ones."""
    lam = complex(lambda_param)
    w = list(state.w)
    n2 = len(w)
    new = list(w)
    for i in range(0, n2, 2):
        new[i] = w[i] * _quotient(_f_checked(lam, w[i - 1], i - 1), _f_checked(lam, w[(i + 1) % n2], (i + 1) % n2))
    for i in range(1, n2, 2):
        new[i] = w[i] * _quotient(_f_checked(lam, new[i - 1], i - 1), _f_checked(lam, new[(i + 1) % n2], (i + 1) % n2))
    return LatticeState(state.L, tuple(new), state.constrained)


def f_factor_identity_residual(kappa: complex, x: complex, ctx: RootContext) -> float:
    """Relative residual of f(kappa^{2N}, x^N) = prod_j f(kappa^2, q0^{2j+1} x)."""
    N = ctx.N
    k2 = complex(kappa) ** 2
    x = complex(x)
    rhs = 1 + 0j
    for j in range(N):
        z = ctx.q0 ** (2 * j + 1) * x
        if k2 + z == 0:
            raise NonGenericError(f"pole in factor j={j}")
        rhs *= f(k2, z)
    lam_N, xN = k2**N, x**N
    if lam_N + xN == 0:
        raise NonGenericError("pole of f(kappa^{2N}, x^N)")
    lhs = f(lam_N, xN)
    return abs(lhs - rhs) / max(abs(lhs), 1e-300)


def constant_background(L: int, alpha: complex, beta: complex) -> LatticeState:
    if alpha == 0 or beta == 0:
        raise ValueError("alpha and beta must be nonzero")
    return LatticeState(L, tuple(complex(alpha) if n % 2 == 0 else complex(beta) for n in range(2 * L)))


def random_state(L: int, rng: np.random.Generator, constrained: bool = False) -> LatticeState:
    """Random state with |w| log-uniform in [e^-1, e] and uniform phase."""
    w = np.exp(rng.uniform(-1, 1, 2 * L) + 1j * rng.uniform(-np.pi, np.pi, 2 * L))
    if constrained:
        w[1::2] /= np.prod(w[1::2]) ** (1 / L)
        w[0::2] /= np.prod(w[0::2]) ** (1 / L)
    return LatticeState.from_array(w, constrained)
