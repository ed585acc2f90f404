"""Rapidity points on the chiral Potts curve C_k in the (x, y, s) chart."""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .core_algebra import RootContext
from .errors import BranchPointError, DegenerateModulusError, SamplingError

CURVE_TOL = 1e-10
# a sampled s is rejected when a radicand is smaller than this
BRANCH_MARGIN = 1e-3


@dataclass(frozen=True)
class CurveModulus:
    k: complex
    k_prime: complex

    def __post_init__(self):
        if abs(self.k**2 + self.k_prime**2 - 1) > 1e-12 * max(1.0, abs(self.k) ** 2):
            raise ValueError(f"k^2 + k'^2 = {self.k**2 + self.k_prime**2} != 1")

    @classmethod
    def from_k(cls, k: complex, k_prime: complex | None = None) -> CurveModulus:
        k = complex(k)
        if k_prime is None:
            k_prime = cmath.sqrt(1 - k * k)
        return cls(k, complex(k_prime))

    @classmethod
    def from_k_prime(cls, k_prime: complex) -> CurveModulus:
        k_prime = complex(k_prime)
        return cls(cmath.sqrt(1 - k_prime * k_prime), k_prime)


@dataclass(frozen=True)
class CurvePoint:
    x: complex
    y: complex
    s: complex
    modulus: CurveModulus
    # provenance of the branch choice; not part of the point's identity
    root_x: int = 0
    root_y: int = 0

    @property
    def t(self) -> complex:
        return self.x * self.y

    def as_tuple(self):
        return (self.x, self.y, self.s)


def point_from_s(
    modulus: CurveModulus, s: complex, root_x: int, root_y: int, ctx: RootContext
) -> CurvePoint:
    """Solve k x^N = 1 - k' s^-N, k y^N = 1 - k' s^N on the chosen branches.

    The principal N-th root is multiplied by omega**root_x (resp. root_y).
    """
    N = ctx.N
    k, kp = modulus.k, modulus.k_prime
    if k == 0:
        raise DegenerateModulusError("k = 0 gives a degenerate curve")
    s = complex(s)
    if s == 0:
        raise BranchPointError("s = 0 is not an affine point")
    sN = s**N
    rad_x = (1 - kp / sN) / k
    rad_y = (1 - kp * sN) / k
    if rad_x == 0 or rad_y == 0:
        raise BranchPointError(f"s = {s} is a branch point (x or y vanishes)")
    x = ctx.omega_pow(root_x) * rad_x ** (1 / N)
    y = ctx.omega_pow(root_y) * rad_y ** (1 / N)
    return CurvePoint(x, y, s, modulus, root_x % N, root_y % N)


def validate_point(p: CurvePoint, N: int) -> float:
    """Largest relative residual of the three curve equations at ``p``."""
    k, kp = p.modulus.k, p.modulus.k_prime
    xN, yN, sN = p.x**N, p.y**N, p.s**N

    def rel(lhs, rhs):
        scale = max(abs(lhs), abs(rhs), 1.0)
        return abs(lhs - rhs) / scale

    return max(
        rel(xN + yN, k * (1 + xN * yN)),
        rel(k * xN, 1 - kp / sN),
        rel(k * yN, 1 - kp * sN),
    )


def sample_points(
    modulus: CurveModulus,
    count: int,
    seed: int,
    ctx: RootContext,
    max_retries: int = 100,
) -> list[CurvePoint]:
    """Deterministic random points with uniform phase and log|s^N| uniform in (-2, 2).

    Scaling the modulus range by 1/N keeps x^N and y^N spread out for large N.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    N = ctx.N
    out = []
    for _ in range(count):
        for _attempt in range(max_retries):
            s = np.exp(rng.uniform(-2.0, 2.0) / N + 1j * rng.uniform(-np.pi, np.pi))
            rx, ry = (int(v) for v in rng.integers(0, N, size=2))
            sN = s**N
            if min(abs(1 - modulus.k_prime / sN), abs(1 - modulus.k_prime * sN)) < BRANCH_MARGIN:
                continue
            p = point_from_s(modulus, s, rx, ry, ctx)
            if validate_point(p, N) < CURVE_TOL:
                out.append(p)
                break
        else:
            raise SamplingError(f"no valid curve point after {max_retries} attempts")
    return out


def random_modulus(rng: np.random.Generator) -> CurveModulus:
    """A generic complex modulus kept away from k = 0 and k' = 0."""
    while True:
        k = complex(rng.normal(), rng.normal()) * 0.8
        if 0.2 < abs(k) and abs(1 - k * k) > 0.05:
            return CurveModulus.from_k(k)
