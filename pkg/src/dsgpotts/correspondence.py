"""Dictionary between the sine-Gordon parameters (lambda, mu, P, Q) and chiral Potts rapidities."""

from __future__ import annotations

import cmath
import itertools
from dataclasses import dataclass, field

import numpy as np

from .core_algebra import DenseOperator, RootContext
from .curve import CurveModulus, CurvePoint, point_from_s, validate_point
from .errors import NonGenericError, SearchFailure
from .semiclassical import SemiclassicalParams, rbar, rbar_operator, twisted_params
from .weights import star_triangle_details, wbar_ratios, weight_matrices, weight_tables, w_ratios

TWISTED_NAMES = ("P_prime", "Q_prime", "P_dprime", "Q_dprime")


def _rel(a: complex, b: complex) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def params_from_rapidities(
    k: CurveModulus,
    p: CurvePoint,
    q: CurvePoint,
    r: CurvePoint,
    sign_lambda: int,
    sign_mu: int,
    ctx: RootContext,
) -> SemiclassicalParams:
    """lambda, mu from the t-ratios, e^Q and e^P from the first-column relations."""
    if sign_lambda not in (1, -1) or sign_mu not in (1, -1):
        raise ValueError("signs must be +1 or -1")
    if 0 in (p.t, q.t, r.t):
        raise NonGenericError("zero t-value")
    lam = sign_lambda * cmath.sqrt(q.t / p.t)
    mu = sign_mu * cmath.sqrt(r.t / q.t)
    eQ = ctx.omega_half * lam * p.x / q.y
    eP = ctx.omega_half * mu * q.x * q.s * r.s / r.y
    return twisted_params(ctx, lam, mu, cmath.log(eP), cmath.log(eQ))


def first_four_residual(sp: SemiclassicalParams, p, q, r, ctx: RootContext) -> float:
    oh = ctx.omega_half
    eP, eQ = cmath.exp(sp.P), cmath.exp(sp.Q)
    lam, mu = sp.lam, sp.mu
    return max(
        _rel(eQ / (oh * lam), p.x / q.y),
        _rel(lam * eQ / oh, q.x / p.y),
        _rel(eP / (oh * mu), q.x * q.s * r.s / r.y),
        _rel(mu * eP / oh, r.x * r.s * q.s / q.y),
    )


def abcd(sp: SemiclassicalParams, ctx: RootContext) -> tuple[complex, complex, complex, complex]:
    N = ctx.N
    eP, eQ = cmath.exp(sp.P), cmath.exp(sp.Q)
    return (
        1 + (eQ / sp.lam) ** N,
        1 + (eQ * sp.lam) ** N,
        1 + (eP / sp.mu) ** N,
        1 + (eP * sp.mu) ** N,
    )


def modulus_from_abcd(A, B, C, D, ab_term: bool = False) -> complex:
    """k^2 from A..D; ``ab_term`` uses a -AB term in place of -AD."""
    last = A * B if ab_term else A * D
    num = (A * C * (1 - B) - B * D * (1 - C)) * (B * C * (1 - A) * (1 - D) - last)
    den = C * D * (A - B * (1 - D)) * (B - A - B * C * (1 - A))
    if den == 0:
        raise NonGenericError("modulus formula denominator vanishes")
    return num / den


def kprime_sq_from_small(a, b, c, d) -> complex:
    """k'^2 in terms of a = 1 - A, ..., d = 1 - D."""
    A, B, C, D = 1 - a, 1 - b, 1 - c, 1 - d
    den = C * D * (A + B * D - B) * (A * B * C - A - B * C + B)
    if den == 0:
        raise NonGenericError("k'^2 denominator vanishes")
    return A * B * (A * C - C + D) * (B * C * D - B * C + C - D) / den


def curve_side_twisted(sp: SemiclassicalParams, p, q, r, ctx: RootContext) -> dict[str, complex]:
    """e^{P'}, e^{Q'}, e^{P''}, e^{Q''} from the first column of the eight relations."""
    oh = ctx.omega_half
    lam, mu = sp.lam, sp.mu
    return {
        "P_prime": oh * lam * mu * p.x * p.s * r.s / r.y,
        "Q_prime": oh * lam * mu * p.x / r.y,
        "P_dprime": oh * lam * p.x * p.s * q.s / q.y,
        "Q_dprime": oh * mu * q.x / r.y,
    }


def _second_column(sp, p, q, r, ctx, third_line: str = "P_dprime") -> dict[str, complex]:
    oh = ctx.omega_half
    lam, mu = sp.lam, sp.mu
    out = {
        "P_prime": oh * r.x * r.s * p.s / (lam * mu * p.y),
        "Q_prime": oh * r.x / (lam * mu * p.y),
        "Q_dprime": oh * r.x / (mu * q.y),
    }
    if third_line == "P_dprime":
        out["P_dprime"] = oh * q.x * q.s * p.s / (lam * p.y)
    else:
        # alternative reading: omega^{-1/2} lambda e^{P'} = x_r s_r s_p / y_p
        out["P_prime_alt"] = oh * r.x * r.s * p.s / (lam * p.y)
    return out


def last_eight_power_residual(sp: SemiclassicalParams, p, q, r, ctx: RootContext) -> float:
    """The eight relations raised to the N-th power against the closed-form twisted maps."""
    N = ctx.N
    first = curve_side_twisted(sp, p, q, r, ctx)
    second = _second_column(sp, p, q, r, ctx)
    worst = 0.0
    for name in TWISTED_NAMES:
        exact = getattr(sp, "eN" + name)
        worst = max(worst, _rel(first[name] ** N, exact), _rel(second[name] ** N, exact))
    return worst


def twisted_branch_indices(sp: SemiclassicalParams, p, q, r, ctx: RootContext) -> dict[str, int]:
    """j with curve-side value = principal root * omega^j for each twisted parameter."""
    first = curve_side_twisted(sp, p, q, r, ctx)
    out = {}
    for name in TWISTED_NAMES:
        principal = cmath.exp(getattr(sp, name))
        out[name] = int(np.argmin([abs(principal * ctx.omega_pow(j) - first[name]) for j in range(ctx.N)]))
    return out


def str_normalized_tables(sp: SemiclassicalParams, p, q, r, ctx: RootContext, values: dict | None = None) -> dict:
    """Weight tables whose normalisations are fixed by r-bar at the identity spin."""
    if values is None:
        values = curve_side_twisted(sp, p, q, r, ctx)
    eP, eQ = cmath.exp(sp.P), cmath.exp(sp.Q)
    lam, mu, lm = sp.lam, sp.mu, sp.lam * sp.mu
    N = ctx.N

    def table(a, b, lam_w, xw, lam_b, xb):
        w0 = rbar(ctx, lam_w, xw)
        wbar0 = rbar(ctx, lam_b, xb) / complex(wbar_ratios(a, b, ctx, N - 1).sum())
        return weight_tables(a, b, ctx, "str_normalized", w0, wbar0)

    return {
        "pq": table(p, q, lam, eQ, lam, values["P_dprime"]),
        "qr": table(q, r, mu, values["Q_dprime"], mu, eP),
        "pr": table(p, r, lm, values["Q_prime"], lm, values["P_prime"]),
    }


def factor_residuals(sp: SemiclassicalParams, tables: dict, values: dict, ctx: RootContext) -> list[float]:
    """Six identifications of F, Fbar matrices with r-bar operators (max-entry relative)."""
    eP, eQ = cmath.exp(sp.P), cmath.exp(sp.Q)
    lam, mu, lm = sp.lam, sp.mu, sp.lam * sp.mu
    mats = {key: weight_matrices(None, None, ctx, t, check=False) for key, t in tables.items()}

    def dev(M: DenseOperator, R: DenseOperator) -> float:
        return float(np.abs(M.mat - R.mat).max() / np.abs(R.mat).max())

    return [
        dev(mats["pq"][0], rbar_operator(ctx, lam, eQ, "Zinv")),
        dev(mats["qr"][1], rbar_operator(ctx, mu, eP, "X")),
        dev(mats["pr"][1], rbar_operator(ctx, lm, values["P_prime"], "X")),
        dev(mats["pr"][0], rbar_operator(ctx, lm, values["Q_prime"], "Zinv")),
        dev(mats["qr"][0], rbar_operator(ctx, mu, values["Q_dprime"], "Zinv")),
        dev(mats["pq"][1], rbar_operator(ctx, lam, values["P_dprime"], "X")),
    ]


@dataclass
class CorrespondenceReport:
    modulus_residual: float
    first_four_residual: float
    last_eight_residual: float
    factor_residuals: list
    R_pqr_value: complex
    modulus_residual_ab_term: float = 0.0
    last_eight_power_residual: float = 0.0
    third_line_readings: dict = field(default_factory=dict)
    twisted_branch: dict = field(default_factory=dict)
    R_root_index: int = 0
    extras: dict = field(default_factory=dict)

    def max_factor_residual(self) -> float:
        return max(self.factor_residuals)


def correspondence_residuals(
    params: SemiclassicalParams,
    k: CurveModulus,
    p: CurvePoint,
    q: CurvePoint,
    r: CurvePoint,
    ctx: RootContext,
) -> CorrespondenceReport:
    N = ctx.N
    A, B, C, D = abcd(params, ctx)
    k2 = complex(k.k) ** 2
    mod_res = abs(k2 - modulus_from_abcd(A, B, C, D)) / abs(k2)
    mod_ab = abs(k2 - modulus_from_abcd(A, B, C, D, ab_term=True)) / abs(k2)

    first = curve_side_twisted(params, p, q, r, ctx)
    second = _second_column(params, p, q, r, ctx)
    branch = twisted_branch_indices(params, p, q, r, ctx)
    # branch-level: the principal twisted value rotated to the curve branch, against both columns
    worst = 0.0
    for name in TWISTED_NAMES:
        value = cmath.exp(getattr(params, name)) * ctx.omega_pow(branch[name])
        worst = max(worst, _rel(value, first[name]), _rel(value, second[name]))
    alt = _second_column(params, p, q, r, ctx, third_line="alt")["P_prime_alt"]
    readings = {
        "P_dprime": _rel(first["P_dprime"], second["P_dprime"]),
        "P_prime_alt": _rel(first["P_prime"], alt),
    }

    tables = str_normalized_tables(params, p, q, r, ctx, first)
    fres = factor_residuals(params, tables, first, ctx)
    details = star_triangle_details(p, q, r, ctx, tables)
    return CorrespondenceReport(
        modulus_residual=mod_res,
        first_four_residual=first_four_residual(params, p, q, r, ctx),
        last_eight_residual=worst,
        factor_residuals=fres,
        R_pqr_value=details["R_pqr"],
        modulus_residual_ab_term=mod_ab,
        last_eight_power_residual=last_eight_power_residual(params, p, q, r, ctx),
        third_line_readings=readings,
        twisted_branch=branch,
        R_root_index=details["R_root_index"],
        extras={"str_residual": details["residual"], "N": N},
    )


def _nth_root(z: complex, N: int) -> complex:
    return complex(z) ** (1 / N)


def _nearest_index(target: complex, base: complex, ctx: RootContext) -> int:
    return int(np.argmin([abs(base * ctx.omega_pow(j) - target) for j in range(ctx.N)]))


def _point_near(modulus, S: complex, s_idx: int, x_target, y_target, ctx) -> CurvePoint:
    """Curve point with s = principal(S^{1/N}) omega^s_idx and x, y on the branches nearest the targets."""
    s = _nth_root(S, ctx.N) * ctx.omega_pow(s_idx)
    base = point_from_s(modulus, s, 0, 0, ctx)
    return point_from_s(
        modulus, s, _nearest_index(x_target, base.x, ctx), _nearest_index(y_target, base.y, ctx), ctx
    )


@dataclass
class InverseResult:
    modulus: CurveModulus
    points: tuple
    params: SemiclassicalParams
    report: CorrespondenceReport
    branch: dict
    input_residual: float


def rapidities_from_params(
    ctx: RootContext, lam: float, mu: float, P: float, Q: float, tol: float = 1e-9
) -> InverseResult:
    """Best-effort inverse: a curve and a triple (p, q, r) realising the given parameters.

    Works in the positive-real regime.  k' solves the modulus formula, s^N values
    come from the common root of two quadratics, and the discrete branches are
    enumerated; the triple is then rebuilt exactly on the curve and the
    parameters re-derived in the generative direction.
    """
    N = ctx.N
    oh = ctx.omega_half
    eP, eQ = cmath.exp(P), cmath.exp(Q)
    a = (eQ / (oh * lam)) ** N
    b = (lam * eQ / oh) ** N
    c = (eP / (oh * mu)) ** N
    d = (mu * eP / oh) ** N
    kp2 = kprime_sq_from_small(a, b, c, d)
    best = None
    for K in (cmath.sqrt(kp2), -cmath.sqrt(kp2)):
        e1 = [K - K * d, -K * K * c * d + K * K * c + K * K * d - K * K - c + d, K * c * d - K * d]
        e2 = [K * a * b - K * a, K * K * a - K * K * b - a * b + a + b - 1, -K * a + K]
        r1, r2 = np.roots(e1), np.roots(e2)
        if len(r1) == 0 or len(r2) == 0:
            continue
        u, v = min(((u, v) for u in r1 for v in r2), key=lambda t: abs(t[0] - t[1]))
        Sq = (u + v) / 2
        Sp = K / (1 - a * (1 - K * Sq))
        Sr = c / (Sq - K + c * K)
        try:
            modulus = CurveModulus.from_k_prime(K)
        except ValueError:
            continue
        if modulus.k == 0:
            continue
        for ip, jp, ap, aq, ar in itertools.product(range(N), repeat=5):
            try:
                p = point_from_s(modulus, _nth_root(Sp, N) * ctx.omega_pow(ap), ip, jp, ctx)
                yq = p.x * oh * lam / eQ
                xq = lam * eQ * p.y / oh
                q = _point_near(modulus, Sq, aq, xq, yq, ctx)
                sr = _nth_root(Sr, N) * ctx.omega_pow(ar)
                yr = q.x * q.s * sr * oh * mu / eP
                xr = mu * eP * q.y / (oh * sr * q.s)
                r = _point_near(modulus, Sr, ar, xr, yr, ctx)
                if max(validate_point(z, N) for z in (p, q, r)) > 1e-10:
                    continue
                sl = 1 if (cmath.sqrt(q.t / p.t) / lam).real > 0 else -1
                sm = 1 if (cmath.sqrt(r.t / q.t) / mu).real > 0 else -1
                sp = params_from_rapidities(modulus, p, q, r, sl, sm, ctx)
                in_res = max(_rel(sp.lam, lam), _rel(sp.mu, mu), _rel(cmath.exp(sp.P), eP), _rel(cmath.exp(sp.Q), eQ))
                if in_res > 1e-6:
                    continue
                rep = correspondence_residuals(sp, modulus, p, q, r, ctx)
            except (NonGenericError, ValueError, ZeroDivisionError):
                continue
            score = max(rep.max_factor_residual(), rep.last_eight_residual)
            if best is None or score < best[0]:
                branch = {"k_prime_sign": 1 if K == cmath.sqrt(kp2) else -1, "x_p": ip, "y_p": jp, "s_p": ap,
                          "s_q": aq, "s_r": ar, "sign_lambda": sl, "sign_mu": sm}
                best = (score, InverseResult(modulus, (p, q, r), sp, rep, branch, in_res))
            if score < tol and all(j == 0 for j in rep.twisted_branch.values()):
                return best[1]
    if best is None or best[0] > tol:
        raise SearchFailure(f"no branch realises the parameters (best score {None if best is None else best[0]})")
    return best[1]


def background_modulus_sq(alpha, beta, kappa, N: int) -> complex:
    """k^2 for the stationary background (alpha, beta) at coupling kappa."""
    A, B, c = complex(alpha) ** N, complex(beta) ** N, complex(kappa) ** (2 * N)
    den = (1 + A * c) * (1 + A / c)
    if den == 0:
        raise NonGenericError("background modulus denominator vanishes")
    return (1 - A * B) * (1 - A / B) / den


def background_modulus_sq_minus_signs(alpha, beta, kappa, N: int) -> complex:
    """Variant with minus signs in the denominator; it does not reproduce the rapidity relations."""
    A, B, c = complex(alpha) ** N, complex(beta) ** N, complex(kappa) ** (2 * N)
    return (1 - A * B) * (1 - A / B) / ((1 - A * c) * (1 - A / c))


def twor_residual(alpha, beta, kappa, p: CurvePoint, q: CurvePoint, ctx: RootContext) -> float:
    oh = ctx.omega_half
    k2 = complex(kappa) ** 2
    return max(
        _rel(beta / (oh * k2), p.x / q.y),
        _rel(beta * k2 / oh, q.x / p.y),
        _rel(alpha / (oh * k2), p.x * p.s * q.s / q.y),
        _rel(alpha * k2 / oh, q.x * p.s * q.s / p.y),
    )


def background_correspondence(alpha, beta, kappa, ctx: RootContext, tol: float = 1e-8):
    """Curve and rapidities (p, q) realising a stationary background.

    Returns (modulus, p, q, residual, branch).  s_p^N has a closed form; the
    sign of k' and the discrete branches of x_p, y_p, s_p are enumerated and
    s_q = (alpha/beta)/s_p.
    """
    N = ctx.N
    oh = ctx.omega_half
    alpha, beta, kappa = complex(alpha), complex(beta), complex(kappa)
    if 0 in (alpha, beta, kappa):
        raise ValueError("alpha, beta, kappa must be nonzero")
    k2 = background_modulus_sq(alpha, beta, kappa, N)
    kp2 = 1 - k2
    a = -((beta / kappa**2) ** N)
    sigma = (alpha / beta) ** N
    if a == 1:
        raise NonGenericError("degenerate background: (beta/kappa^2)^N = -1")
    best = None
    kk = cmath.sqrt(k2)
    for K in (cmath.sqrt(kp2), -cmath.sqrt(kp2)):
        modulus = CurveModulus(kk, K)
        Sp = K * (1 - a * sigma) / (1 - a)
        for ip, jp, ap in itertools.product(range(N), repeat=3):
            try:
                sp_ = _nth_root(Sp, N) * ctx.omega_pow(ap)
                p = point_from_s(modulus, sp_, ip, jp, ctx)
                sq = (alpha / beta) / sp_
                yq = p.x * oh * kappa**2 / beta
                xq = beta * kappa**2 * p.y / oh
                base = point_from_s(modulus, sq, 0, 0, ctx)
                q = point_from_s(
                    modulus, sq, _nearest_index(xq, base.x, ctx), _nearest_index(yq, base.y, ctx), ctx
                )
            except (ValueError, NonGenericError):
                continue
            res = twor_residual(alpha, beta, kappa, p, q, ctx)
            if best is None or res < best[3]:
                branch = {"k_prime_sign": 1 if K == cmath.sqrt(kp2) else -1, "x_p": ip, "y_p": jp, "s_p": ap,
                          "x_q": q.root_x, "y_q": q.root_y}
                best = (modulus, p, q, res, branch)
            if res < tol:
                return best
    if best is None:
        raise SearchFailure("no admissible branch for the background rapidities")
    if best[3] > tol:
        raise SearchFailure(f"background search failed: best residual {best[3]:.3g}")
    return best
