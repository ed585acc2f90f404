"""Dilogarithm machinery, the quantum factor r-bar and the twisted Yang-Baxter equation."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .core_algebra import DenseOperator, Monomial, RootContext, operator_function, relative_residual
from .errors import BranchDomainError, NonGenericError

PI2_6 = math.pi**2 / 6
_BERNOULLI_TERMS = 40


@lru_cache(maxsize=1)
def _bernoulli_coeffs() -> tuple[float, ...]:
    """B_n / (n+1)! for n = 0.. with the B_1 = -1/2 convention."""
    B = [Fraction(1)]
    for m in range(1, _BERNOULLI_TERMS):
        acc = Fraction(0)
        for k in range(m):
            acc += Fraction(math.comb(m + 1, k)) * B[k]
        B.append(-acc / (m + 1))
    return tuple(float(b / math.factorial(n + 1)) for n, b in enumerate(B))


def _li2_core(z: complex) -> complex:
    # |z| <= 1 and Re z <= 1/2, so |log(1-z)| < 1.8 and the series converges fast
    u = -cmath.log(1 - z)
    total = 0j
    upow = u
    for c in _bernoulli_coeffs():
        if c != 0.0:
            total += c * upow
        upow *= u
    return total


def dilog(z: complex, side: str | None = None) -> complex:
    """Principal branch of Li_2(z) = -int_0^z log(1-t)/t dt.

    On the cut (1, inf) the value is ambiguous; pass ``side="above"`` or
    ``side="below"`` to select the limit z +- i0.
    """
    z = complex(z)
    if z == 0:
        return 0j
    if z == 1:
        return complex(PI2_6)
    if z.imag == 0 and z.real > 1:
        if side not in ("above", "below"):
            raise BranchDomainError(f"Li2({z.real}) lies on the cut [1, inf); specify side")
        x = z.real
        re = 2 * PI2_6 - 0.5 * math.log(x) ** 2 - dilog(1 / x).real
        sign = 1.0 if side == "above" else -1.0
        return complex(re, sign * math.pi * math.log(x))
    if abs(z) > 1:
        return -dilog(1 / z) - PI2_6 - 0.5 * cmath.log(-z) ** 2
    if z.real > 0.5:
        return -_li2_core(1 - z) + PI2_6 - cmath.log(z) * cmath.log(1 - z)
    return _li2_core(z)


def _check_H_domain(a: complex, b: complex):
    if a == 0 or b == 0:
        raise BranchDomainError("H needs nonzero arguments")
    for arg in (-a * b, -a / b):
        arg = complex(arg)
        if arg.imag == 0 and arg.real >= 1:
            raise BranchDomainError(f"Li2 argument {arg.real} on the cut; outside the positive-real domain")


def H(a: complex, b: complex) -> complex:
    """H(a,b) = -1/2 {Li2(-ab) + Li2(-a/b) + 1/2 log^2 b + pi^2/6}, so that H(1,x) = 0."""
    _check_H_domain(a, b)
    lb = cmath.log(b)
    return -0.5 * (dilog(-a * b) + dilog(-a / b) + 0.5 * lb * lb + PI2_6)


def H_full_log_square(a: complex, b: complex) -> complex:
    """The variant with a full log^2 b term; kept only to document that it breaks H(1,x) = 0."""
    _check_H_domain(a, b)
    lb = cmath.log(b)
    return -0.5 * (dilog(-a * b) + dilog(-a / b) + lb * lb + PI2_6)


def Htilde(a: complex, b: complex, ctx: RootContext) -> complex:
    N = ctx.N
    return H(complex(a) ** N, complex(b) ** N) / N**2


def rbar(ctx: RootContext, lam: complex, x: complex) -> complex:
    """Finite quantum factor r-bar(lambda, x) with principal fractional powers."""
    N = ctx.N
    lam, x = complex(lam), complex(x)
    lN, xN = lam**N, x**N
    num, den = lN + xN, 1 + lN * xN
    if num == 0 or den == 0:
        raise NonGenericError(f"r-bar prefactor vanishes or diverges at lambda={lam}, x={x}")
    val = (num / den) ** ((N - 1) / (2 * N))
    for j in range(1, N):
        z = x * ctx.q0 ** (2 * j + 1)
        num, den = 1 + lam * z, lam + z
        if num == 0 or den == 0:
            raise NonGenericError(f"r-bar factor j={j} vanishes or diverges")
        val *= (num / den) ** (j / N)
    return val


def prop_b_residual(ctx: RootContext, lam: complex, x: complex) -> float:
    """|prod_j rbar(lambda, omega^j x) - 1|."""
    prod = 1 + 0j
    for j in range(ctx.N):
        prod *= rbar(ctx, lam, ctx.omega_pow(j) * x)
    return abs(prod - 1)


def prop_a_rhs(ctx: RootContext, lam: complex, x: complex, n: int) -> complex:
    """Closed form of rbar(lambda, omega^n x) / rbar(lambda, x)."""
    N = ctx.N
    lN, xN = lam**N, x**N
    val = ((1 + lN * xN) / (1 + xN / lN)) ** (n / N)
    for j in range(1, n + 1):
        z = x * ctx.omega_pow(j) / ctx.omega_half
        val *= (1 - z / lam) / (1 - lam * z)
    return val


def prop_a_residual(ctx: RootContext, lam: complex, x: complex) -> float:
    """Largest relative mismatch of the ratio formula over n = 1..N-1."""
    base = rbar(ctx, lam, x)
    worst = 0.0
    for n in range(1, ctx.N):
        lhs = rbar(ctx, lam, ctx.omega_pow(n) * x) / base
        rhs = prop_a_rhs(ctx, lam, x, n)
        worst = max(worst, abs(lhs - rhs) / abs(rhs))
    return worst


@dataclass(frozen=True)
class SemiclassicalParams:
    lam: complex
    mu: complex
    P: complex
    Q: complex
    P_prime: complex
    Q_prime: complex
    P_dprime: complex
    Q_dprime: complex
    # N-th powers of the exponentials, exact from the closed forms
    eNP_prime: complex
    eNQ_prime: complex
    eNP_dprime: complex
    eNQ_dprime: complex

    def exp(self, name: str) -> complex:
        return cmath.exp(getattr(self, name))


def _safe_div(num: complex, den: complex, what: str) -> complex:
    if den == 0:
        raise NonGenericError(f"vanishing denominator in {what}")
    return num / den


def twisted_params(ctx: RootContext, lam: complex, mu: complex, P: complex, Q: complex) -> SemiclassicalParams:
    """Twisted parameters from the closed-form maps; P, Q and the outputs are logarithms."""
    N = ctx.N
    lam, mu, P, Q = (complex(v) for v in (lam, mu, P, Q))
    l, m = lam**N, mu**N
    eNP, eNQ = cmath.exp(N * P), cmath.exp(N * Q)
    eNP1 = eNP * _safe_div(1 + l * eNQ, l + eNQ, "P'")
    eNQ1 = eNQ * _safe_div(m + eNP, 1 + m * eNP, "Q'")
    eNP2 = eNP * _safe_div(1 + l * m * eNQ1, l * m + eNQ1, "P''")
    eNQ2 = eNQ * _safe_div(l * m + eNP1, 1 + l * m * eNP1, "Q''")
    logs = []
    for v in (eNP1, eNQ1, eNP2, eNQ2):
        if v == 0:
            raise NonGenericError("twisted parameter has zero exponential")
        logs.append(cmath.log(v) / N)
    return SemiclassicalParams(lam, mu, P, Q, *logs, eNP1, eNQ1, eNP2, eNQ2)


def rbar_operator(ctx: RootContext, lam: complex, coef: complex, kind: str) -> DenseOperator:
    """rbar(lambda, coef * Z^-1) for kind "Zinv", rbar(lambda, coef * X) for kind "X"."""
    if kind == "Zinv":
        mono = Monomial(ctx, coef=coef, clock=-1)
    elif kind == "X":
        mono = Monomial(ctx, coef=coef, shift=1)
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return operator_function(mono, lambda v: rbar(ctx, lam, v))


def twisted_ybe_sides(ctx: RootContext, sp: SemiclassicalParams) -> tuple[DenseOperator, DenseOperator]:
    lam, mu = sp.lam, sp.mu
    ex = cmath.exp
    lhs = (
        rbar_operator(ctx, lam, ex(sp.Q), "Zinv")
        @ rbar_operator(ctx, lam * mu, ex(sp.P_prime), "X")
        @ rbar_operator(ctx, mu, ex(sp.Q_dprime), "Zinv")
    )
    rhs = (
        rbar_operator(ctx, mu, ex(sp.P), "X")
        @ rbar_operator(ctx, lam * mu, ex(sp.Q_prime), "Zinv")
        @ rbar_operator(ctx, lam, ex(sp.P_dprime), "X")
    )
    return lhs, rhs


def twisted_ybe_residual(ctx: RootContext, lam, mu, P, Q) -> float:
    lhs, rhs = twisted_ybe_sides(ctx, twisted_params(ctx, lam, mu, P, Q))
    return relative_residual(lhs, rhs)


def saddle_maps(lam, mu, x_p, y_p):
    """Return (x, y, x'', y'') from (x', y')."""
    l, m, xp, yp = lam, mu, x_p, y_p
    x = xp * _safe_div(1 + l * m * yp, l * m + yp, "x")
    y = yp * _safe_div(1 + m * xp, m + xp, "y")
    ypp = xp * _safe_div(l * m * xp * yp + xp + l * yp + m, m * xp * yp + l * xp + yp + l * m, "y''")
    xpp = yp * _safe_div(l * m * xp * yp + xp + l * yp + l * l * m, l * l * m * xp * yp + l * xp + yp + l * m, "x''")
    return x, y, xpp, ypp


def variab_c(lam, mu, x_dp, y_dp):
    """(x, y) recovered from (x'', y'')."""
    x = y_dp * _safe_div(1 + mu * x_dp, mu + x_dp, "x from x''")
    y = x_dp * _safe_div(1 + lam * mu * y_dp, lam * mu + y_dp, "y from y''")
    return x, y


def variab_c_residual(lam, mu, x_p, y_p) -> float:
    x, y, xpp, ypp = saddle_maps(lam, mu, x_p, y_p)
    xc, yc = variab_c(lam, mu, xpp, ypp)
    return max(abs(xc - x) / abs(x), abs(yc - y) / abs(y))


def involution_residual(lam, mu, x_p, y_p) -> float:
    _, _, xpp, ypp = saddle_maps(lam, mu, x_p, y_p)
    _, _, x3, y3 = saddle_maps(lam, mu, xpp, ypp)
    return max(abs(x3 - x_p) / abs(x_p), abs(y3 - y_p) / abs(y_p))


def _require_positive(*vals):
    for v in vals:
        if isinstance(v, (complex, np.complexfloating)) or not (float(v) > 0):
            raise BranchDomainError(f"twelve-term identity needs positive real inputs, got {v!r}")


CROSS_COEFF = 0.5


def twelve_term_sides(lam, mu, x_p, y_p, full_log_square: bool = False) -> tuple[complex, complex]:
    """Both sides of the twelve-term identity; ``full_log_square`` swaps in that H variant with cross factor 2."""
    _require_positive(lam, mu, x_p, y_p)
    h, c = (H_full_log_square, 2.0) if full_log_square else (H, CROSS_COEFF)
    x, y, xpp, ypp = saddle_maps(lam, mu, x_p, y_p)
    log = math.log
    lhs = h(lam, x) + h(lam * mu, y_p) + h(mu, x_p) + c * log(x / x_p) * log(y / y_p)
    rhs = h(mu, xpp) + h(lam * mu, ypp) + h(lam, y) + c * log(x / ypp) * log(y / xpp)
    return lhs, rhs


def twelve_term_residual(lam, mu, x_p, y_p) -> float:
    lhs, rhs = twelve_term_sides(lam, mu, x_p, y_p)
    return abs(lhs - rhs)


def F0(lam, mu, u, v) -> complex:
    """Right-hand side of the twelve-term identity as a function of its free pair (u, v)."""
    x, y = variab_c(lam, mu, u, v)
    return H(mu, u) + H(lam * mu, v) + H(lam, y) + CROSS_COEFF * cmath.log(x / v) * cmath.log(y / u)


def F1(lam, mu, u, v) -> complex:
    return (1 + mu * u) * (1 + lam * mu * v)


def substitution_invariants(lam, mu, x_p, y_p) -> tuple[float, complex, float]:
    """(F0 residual, F1(x', y'), F1 residual) under (x', y') -> (x'', y'').

    The F1 residual is relative to |F1(x', y')|.
    """
    _, _, xpp, ypp = saddle_maps(lam, mu, x_p, y_p)
    f0_res = abs(F0(lam, mu, xpp, ypp) - F0(lam, mu, x_p, y_p))
    f1 = F1(lam, mu, x_p, y_p)
    f1_res = abs(F1(lam, mu, xpp, ypp) - f1) / abs(f1)
    return f0_res, f1, f1_res
