"""Chiral Potts Boltzmann weights, their Fourier transforms and the star-triangle relation."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core_algebra import DenseOperator, RootContext, circulant, relative_residual
from .curve import CurvePoint
from .errors import NonGenericError

# relative size below which a product denominator counts as vanishing
ZERO_TOL = 1e-13

NORM_MODES = ("unit", "str_normalized")


@dataclass(frozen=True)
class WeightTable:
    p: CurvePoint
    q: CurvePoint
    W: np.ndarray
    Wbar: np.ndarray
    Wbar_f: np.ndarray
    W_f: np.ndarray
    norm_mode: str = "unit"

    @property
    def N(self) -> int:
        return len(self.W)

    def w(self, n):
        """W_pq(n) for any integer (array) n, reduced mod N."""
        return self.W[np.mod(n, self.N)]

    def wbar(self, n):
        return self.Wbar[np.mod(n, self.N)]


def _ratio(num: complex, den: complex, what: str) -> complex:
    if abs(den) <= ZERO_TOL * max(abs(num), 1.0):
        raise NonGenericError(f"non-generic rapidity pair: vanishing denominator in {what}")
    return num / den


def w_ratios(p: CurvePoint, q: CurvePoint, ctx: RootContext, upto: int) -> np.ndarray:
    """W_pq(n)/W_pq(0) for n = 0..upto from the product formula."""
    out = np.empty(upto + 1, dtype=complex)
    out[0] = 1.0
    r = p.s / q.s
    for n in range(1, upto + 1):
        om = ctx.omega_pow(n)
        out[n] = out[n - 1] * r * _ratio(q.y - om * p.x, p.y - om * q.x, "W")
    return out


def wbar_ratios(p: CurvePoint, q: CurvePoint, ctx: RootContext, upto: int) -> np.ndarray:
    """Wbar_pq(n)/Wbar_pq(0) for n = 0..upto from the product formula."""
    out = np.empty(upto + 1, dtype=complex)
    out[0] = 1.0
    r = p.s * q.s
    for n in range(1, upto + 1):
        om = ctx.omega_pow(n)
        out[n] = out[n - 1] * r * _ratio(ctx.omega * p.x - om * q.x, q.y - om * p.y, "Wbar")
    return out


def wbar_fourier_ratios(p: CurvePoint, q: CurvePoint, ctx: RootContext) -> np.ndarray:
    """Closed form of Wbar^(f)(n)/Wbar^(f)(0), n = 0..N-1."""
    N = ctx.N
    out = np.empty(N, dtype=complex)
    out[0] = 1.0
    ss = p.s * q.s
    for n in range(1, N):
        om = ctx.omega_pow(n)
        out[n] = out[n - 1] * _ratio(q.y - om * p.x * ss, p.y - om * q.x * ss, "Wbar^(f)")
    return out


def dft(values, ctx: RootContext, sign: int = 1) -> np.ndarray:
    """sum_a values[a] omega^{sign * n a} for n = 0..N-1."""
    N = ctx.N
    n, a = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
    return ctx.omega_powers(sign * n * a) @ np.asarray(values, dtype=complex)


def weight_tables(
    p: CurvePoint,
    q: CurvePoint,
    ctx: RootContext,
    norm_mode: str = "unit",
    w0: complex = 1.0,
    wbar0: complex = 1.0,
) -> WeightTable:
    """Tabulate W_pq, Wbar_pq and their Fourier transforms.

    In ``unit`` mode W(0) = Wbar(0) = 1.  In ``str_normalized`` mode the caller
    supplies the normalisations ``w0`` and ``wbar0`` (the correspondence module
    derives them from r-bar values).
    """
    if norm_mode not in NORM_MODES:
        raise ValueError(f"unknown norm_mode {norm_mode!r}")
    if norm_mode == "unit":
        w0 = wbar0 = 1.0
    N = ctx.N
    W = complex(w0) * w_ratios(p, q, ctx, N - 1)
    Wbar = complex(wbar0) * wbar_ratios(p, q, ctx, N - 1)
    Wbar_f = complex(Wbar.sum()) * wbar_fourier_ratios(p, q, ctx)
    W_f = dft(W, ctx)
    return WeightTable(p, q, W, Wbar, Wbar_f, W_f, norm_mode)


def periodicity_residual(p: CurvePoint, q: CurvePoint, ctx: RootContext) -> float:
    """max(|W(N)/W(0) - 1|, |Wbar(N)/Wbar(0) - 1|) from the extended products."""
    N = ctx.N
    return max(
        abs(w_ratios(p, q, ctx, N)[N] - 1),
        abs(wbar_ratios(p, q, ctx, N)[N] - 1),
    )


def fourier_residual(table: WeightTable, ctx: RootContext) -> float:
    """Closed-form Wbar^(f) against the direct DFT of Wbar, relative to max |Wbar^(f)|."""
    direct = dft(table.Wbar, ctx)
    return float(np.abs(direct - table.Wbar_f).max() / np.abs(direct).max())


def F_scalar(table: WeightTable, Y: complex, ctx: RootContext) -> complex:
    """F(p,q;Y) = N^-1 sum_{a,b} omega^{-ab} W(a) Y^b."""
    N = ctx.N
    coeffs = dft(table.W, ctx, sign=-1) / N
    return complex(np.sum(coeffs * Y ** np.arange(N)))


def Fbar_scalar(table: WeightTable, Y: complex) -> complex:
    """Fbar(p,q;Y) = sum_a Wbar(a) Y^a."""
    return complex(np.sum(table.Wbar * Y ** np.arange(table.N)))


def recurrence_residual(table: WeightTable, ctx: RootContext) -> float:
    """Largest relative violation of the F and Fbar recurrences at Y = omega^n.

    F is evaluated from its Fourier sum and Fbar from its defining polynomial,
    so the check is independent of the product formulas used for the tables.
    """
    p, q = table.p, table.q
    N = ctx.N
    worst = 0.0
    F = [F_scalar(table, ctx.omega_pow(n), ctx) for n in range(N)]
    Fb = [Fbar_scalar(table, ctx.omega_pow(n)) for n in range(N)]
    ss = p.s * q.s
    for n in range(N):
        Y = ctx.omega_pow(n)
        lhs = F[n] / F[(n - 1) % N]
        rhs = p.s * (q.y - p.x * Y) / (q.s * (p.y - q.x * Y))
        worst = max(worst, abs(lhs - rhs) / max(abs(rhs), 1e-300))
        lhs = Fb[n] / Fb[(n - 1) % N]
        rhs = (q.y - p.x * ss * Y) / (p.y - q.x * ss * Y)
        worst = max(worst, abs(lhs - rhs) / max(abs(rhs), 1e-300))
    return worst


def weight_matrices(
    p: CurvePoint,
    q: CurvePoint,
    ctx: RootContext,
    table: WeightTable | None = None,
    check: bool = True,
) -> tuple[DenseOperator, DenseOperator]:
    """Return (F(p,q;Z^-1), Fbar(p,q;X)).

    F(p,q;Z^-1) is diagonal with entries F(omega^-a) = W(-a); Fbar(p,q;X) has
    entries sum_k Wbar(k) delta_{a,b+k}.
    """
    if table is None:
        table = weight_tables(p, q, ctx)
    if check and ctx.N > 1:
        res = recurrence_residual(table, ctx)
        if res > 1e-8:
            raise ValueError(f"F/Fbar recurrences fail (residual {res:.3g}); points off the curve?")
    N = ctx.N
    F_diag = DenseOperator.diag(table.w(-np.arange(N)))
    Fbar = circulant(table.Wbar)
    return F_diag, Fbar


def _fN(table: WeightTable) -> complex:
    """f_pq^N = prod_j Wbar^(f)(j) / W(j)."""
    if np.any(table.W == 0):
        raise NonGenericError("vanishing W weight in f_pq")
    return complex(np.prod(table.Wbar_f / table.W))


class RpqrValue(NamedTuple):
    value: complex
    root_index: int
    value_pow_N: complex


def r_pqr(tables: dict, ctx: RootContext, target: complex | None = None) -> RpqrValue:
    """R_pqr = f_pq f_qr / f_pr, known through its N-th power.

    The N-th root is the one closest to ``target`` (a directly measured
    LHS/RHS ratio); without a target the principal root is returned.
    """
    N = ctx.N
    fpq, fqr, fpr = (_fN(tables[key]) for key in ("pq", "qr", "pr"))
    if fpr == 0:
        raise NonGenericError("f_pr vanishes")
    RN = fpq * fqr / fpr
    principal = RN ** (1 / N) if RN != 0 else 0j
    if target is None:
        return RpqrValue(principal, 0, RN)
    cands = [principal * ctx.omega_pow(j) for j in range(N)]
    j = int(np.argmin([abs(c - target) for c in cands]))
    return RpqrValue(cands[j], j, RN)


def _triple_tables(p, q, r, ctx):
    return {
        "pq": weight_tables(p, q, ctx),
        "qr": weight_tables(q, r, ctx),
        "pr": weight_tables(p, r, ctx),
    }


def star_sides(tables: dict, ctx: RootContext) -> tuple[np.ndarray, np.ndarray]:
    """LHS[a,b,c] (sum over d) and RHS[a,b,c] without the R_pqr factor."""
    N = ctx.N
    pq, qr, pr = tables["pq"], tables["qr"], tables["pr"]
    a, b, c, d = np.meshgrid(*(np.arange(N),) * 4, indexing="ij")
    lhs = (qr.wbar(b - d) * pr.w(a - d) * pq.wbar(d - c)).sum(axis=3)
    a, b, c = a[..., 0], b[..., 0], c[..., 0]
    rhs = pq.w(a - b) * pr.wbar(b - c) * qr.w(a - c)
    return lhs, rhs


class STRResult(NamedTuple):
    residual: float
    R_pqr: complex


def star_triangle_details(p, q, r, ctx: RootContext, tables: dict | None = None) -> dict:
    """Full star-triangle diagnostics: residual, R_pqr, root index and ratio spread."""
    if tables is None:
        tables = _triple_tables(p, q, r, ctx)
    lhs, rhs = star_sides(tables, ctx)
    flat = np.abs(rhs).ravel()
    order = np.argsort(flat)[::-1]
    i0 = np.unravel_index(order[0], rhs.shape)
    R = r_pqr(tables, ctx, target=lhs[i0] / rhs[i0])
    scale = np.abs(lhs).max()
    residual = float(np.abs(lhs - R.value * rhs).max() / scale)
    # an independent spin triple re-measures the ratio
    i1 = np.unravel_index(order[1 if len(order) > 1 else 0], rhs.shape)
    spread = float(abs(lhs[i1] / rhs[i1] - R.value) / abs(R.value)) if R.value != 0 else math.inf
    return {
        "residual": residual,
        "R_pqr": R.value,
        "R_root_index": R.root_index,
        "R_pow_N": R.value_pow_N,
        "ratio_check": spread,
    }


def star_triangle_residual(p, q, r, ctx: RootContext) -> STRResult:
    d = star_triangle_details(p, q, r, ctx)
    return STRResult(d["residual"], d["R_pqr"])


def str_matrix_sides(tables: dict, ctx: RootContext) -> tuple[DenseOperator, DenseOperator]:
    """(F(p,q;Z^-1) Fbar(p,r;X) F(q,r;Z^-1), Fbar(q,r;X) F(p,r;Z^-1) Fbar(p,q;X))."""
    F_pq, Fb_pq = weight_matrices(None, None, ctx, tables["pq"], check=False)
    F_qr, Fb_qr = weight_matrices(None, None, ctx, tables["qr"], check=False)
    F_pr, Fb_pr = weight_matrices(None, None, ctx, tables["pr"], check=False)
    return F_pq @ Fb_pr @ F_qr, Fb_qr @ F_pr @ Fb_pq


def str_matrix_residual(p, q, r, ctx: RootContext, tables: dict | None = None) -> float:
    if tables is None:
        tables = _triple_tables(p, q, r, ctx)
    left, right = str_matrix_sides(tables, ctx)
    lhs, rhs = star_sides(tables, ctx)
    i0 = np.unravel_index(np.argmax(np.abs(rhs)), rhs.shape)
    R = r_pqr(tables, ctx, target=lhs[i0] / rhs[i0]).value
    return relative_residual(left, (1 / R) * right)


def product_identity_residual(p: CurvePoint, q: CurvePoint, ctx: RootContext) -> float:
    """Relative residual of the product formula for prod_j Wbar^(f)(j).

    The constant phase exp(+-i pi (N-1)(N-2)/12) follows the orientation of
    omega: with omega = exp(-2 pi i / N) the sign is negative.
    """
    N = ctx.N
    table = weight_tables(p, q, ctx)
    lhs = complex(np.prod(table.Wbar_f))
    sign = 1.0 if ctx.omega.imag > 0 else -1.0
    rhs = table.Wbar[0] ** N * N ** (N / 2) * cmath.exp(sign * 1j * math.pi * (N - 1) * (N - 2) / 12)
    for j in range(1, N):
        om = ctx.omega_pow(j)
        den = (p.x - om * q.x) * (p.y - om * q.y)
        rhs *= _ratio(p.t - om * q.t, den, "product identity") ** j
    return abs(lhs - rhs) / max(abs(rhs), 1e-300)
