"""Command-line front end: verification suites, lattice evolution, partition functions."""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import classical, correspondence, semiclassical, transfer, weights
from .core_algebra import make_root_context
from .curve import CurveModulus, random_modulus, sample_points, validate_point
from .errors import DimensionCapError, PottsError, SearchFailure

SCHEMA = "dsgpotts.report/1"
CONFIG_ENV = "DSGPOTTS_CONFIG"

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_CAP = 4
EXIT_NUMERIC = 5
EXIT_SEARCH = 6

DEFAULTS = {
    "N": 3,
    "seed": 0,
    "trials": 10,
    "L": 2,
    "M": 2,
    "steps": 10,
    "count": 5,
    "format": "json",
    "k": None,
    "kappa": None,
    "alpha": None,
    "beta": None,
    "lam": None,
    "tol": 1e-9,
}

# per-command overrides of DEFAULTS, applied before the config file and flags
COMMAND_DEFAULTS = {
    "verify str": {"tol": 1e-10},
    "verify str-matrix": {"tol": 1e-10},
    "verify twisted-ybe": {"tol": 1e-9},
    "verify correspondence": {"tol": 1e-9},
    "verify dilog12": {"tol": 1e-9},
    "verify six-vertex": {"tol": 1e-10, "N": 2},
    "verify f-identity": {"tol": 1e-12},
    "evolve": {"tol": 1e-11},
    "partition": {"tol": 1e-10, "N": 2},
    "curve sample": {"tol": 1e-10},
}


class ConfigError(Exception):
    pass


def fmt_real(x: float) -> str:
    return format(float(x), ".17g")


def fmt_complex(z) -> dict:
    z = complex(z)
    return {"re": fmt_real(z.real), "im": fmt_real(z.imag)}


def _jsonable(obj):
    if isinstance(obj, (complex, np.complexfloating)):
        return fmt_complex(obj)
    if isinstance(obj, (float, np.floating)):
        return fmt_real(obj)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    return obj


@dataclass
class RunConfig:
    N: int
    seed: int
    trials: int
    tolerance: float
    fmt: str = "json"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not isinstance(self.N, int) or self.N < 1:
            raise ConfigError(f"N must be a positive integer, got {self.N!r}")
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials!r}")
        if not (self.tolerance > 0):
            raise ConfigError(f"tolerance must be > 0, got {self.tolerance!r}")
        if self.fmt not in ("json", "csv"):
            raise ConfigError(f"format must be json or csv, got {self.fmt!r}")


def trial_rngs(seed: int, trials: int) -> list[np.random.Generator]:
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(trials)]


def _int_seed(rng) -> int:
    return int(rng.integers(0, 2**63 - 1))


def _point_info(p) -> dict:
    return {"s": p.s, "root_x": p.root_x, "root_y": p.root_y}


def _modulus(cfg: RunConfig, rng) -> CurveModulus:
    k = cfg.params.get("k")
    return CurveModulus.from_k(k) if k is not None else random_modulus(rng)


# each trial function returns (residual, details)


def trial_str(cfg, rng, ctx):
    m = _modulus(cfg, rng)
    p, q, r = sample_points(m, 3, _int_seed(rng), ctx)
    d = weights.star_triangle_details(p, q, r, ctx)
    info = {"k": m.k, "points": [_point_info(z) for z in (p, q, r)], "R_pqr": d["R_pqr"],
            "R_root_index": d["R_root_index"], "ratio_check": d["ratio_check"]}
    return max(d["residual"], d["ratio_check"]), info


def trial_str_matrix(cfg, rng, ctx):
    m = _modulus(cfg, rng)
    p, q, r = sample_points(m, 3, _int_seed(rng), ctx)
    mat = weights.str_matrix_residual(p, q, r, ctx)
    scalar = weights.star_triangle_residual(p, q, r, ctx).residual
    return mat, {"k": m.k, "points": [_point_info(z) for z in (p, q, r)], "scalar_residual": scalar}


def trial_twisted(cfg, rng, ctx):
    lam, mu = np.exp(rng.uniform(-1, 1, 2))
    P, Q = rng.uniform(-1, 1, 2)
    res = semiclassical.twisted_ybe_residual(ctx, lam, mu, P, Q)
    return res, {"lambda": lam, "mu": mu, "P": P, "Q": Q}


def trial_correspondence(cfg, rng, ctx):
    lam, mu = np.exp(rng.uniform(-1, 1, 2))
    P, Q = rng.uniform(-1, 1, 2)
    inv = correspondence.rapidities_from_params(ctx, lam, mu, P, Q, tol=cfg.tolerance)
    rep = inv.report
    parts = {
        "first_four": rep.first_four_residual,
        "modulus": rep.modulus_residual,
        "last_eight": rep.last_eight_residual,
        "last_eight_power": rep.last_eight_power_residual,
        "factors": max(rep.factor_residuals),
        "R_minus_1": abs(rep.R_pqr_value - 1),
    }
    info = {"input": {"lambda": lam, "mu": mu, "P": P, "Q": Q}, "k": inv.modulus.k, "branch": inv.branch,
            "twisted_branch": rep.twisted_branch, "R_pqr": rep.R_pqr_value, "residuals": parts,
            "third_line_readings": rep.third_line_readings}
    return max(parts.values()), info


def trial_dilog12(cfg, rng, ctx):
    lam, mu, x, y = rng.uniform(0.1, 10, 4)
    parts = {
        "twelve_term": semiclassical.twelve_term_residual(lam, mu, x, y),
        "involution": semiclassical.involution_residual(lam, mu, x, y),
        "variab_c": semiclassical.variab_c_residual(lam, mu, x, y),
    }
    f0, _, f1 = semiclassical.substitution_invariants(lam, mu, x, y)
    parts["F0"] = f0
    parts["F1"] = f1
    return max(parts.values()), {"lambda": lam, "mu": mu, "x": x, "y": y, "residuals": parts}


def trial_six_vertex(cfg, rng, ctx):
    def rc():
        return complex(*rng.normal(size=2))

    L = cfg.params["L"]
    U, V = transfer.weyl_pair(ctx, rc(), rc())
    chain = transfer.random_chain(ctx, L, rc(), rng)
    c, d = transfer.w_preserving_scalings(2 * L, rng)
    t1, t2 = transfer.chain_transfer(chain, rc()), transfer.chain_transfer(chain, rc())
    parts = {
        "ybe_a": transfer.ybe_a_residual(rc(), rc(), rc()),
        "ybe_b": transfer.ybe_b_residual(rc(), rc(), ctx.q0, U, V),
        "commutator": (t1 @ t2 - t2 @ t1).norm() / (t1 @ t2).norm(),
        "gauge": transfer.gauge_invariance_residual(chain, transfer.gauge_transform(chain, c, d), rc()),
    }
    return max(parts.values()), {"L": L, "residuals": parts}


def trial_f_identity(cfg, rng, ctx):
    kappa = complex(*rng.normal(size=2))
    x = complex(*rng.normal(size=2))
    return classical.f_factor_identity_residual(kappa, x, ctx), {"kappa": kappa, "x": x}


def trial_evolve(cfg, rng, ctx):
    L, steps = cfg.params["L"], cfg.params["steps"]
    alpha, beta = cfg.params.get("alpha"), cfg.params.get("beta")
    if alpha is not None and beta is not None:
        state = classical.constant_background(L, alpha, beta)
    else:
        state = classical.random_state(L, rng)
    lam = cfg.params.get("lam")
    if lam is None:
        lam = complex(np.exp(rng.uniform(-1, 1) + 1j * rng.uniform(-np.pi, np.pi)))
    c0 = classical.casimirs(state)
    drift = 0.0
    for _ in range(steps):
        state = classical.evolve(state, lam)
        c = classical.casimirs(state)
        drift = max(drift, abs(c[0] - c0[0]) / abs(c0[0]), abs(c[1] - c0[1]) / abs(c0[1]))
    return drift, {"lambda": lam, "casimirs": c0, "final_state": list(state.w)}


def trial_partition(cfg, rng, ctx):
    L, M, N = cfg.params["L"], cfg.params["M"], cfg.N
    lattice = transfer.SpinLattice(L, M, N)
    a, b, kap = (cfg.params.get(key) for key in ("alpha", "beta", "kappa"))
    info = {"L": L, "M": M}
    if None not in (a, b, kap):
        m, p, q, res, branch = correspondence.background_correspondence(a, b, kap, ctx)
        info.update(background_residual=res, branch=branch)
    else:
        m = _modulus(cfg, rng)
        p, q = sample_points(m, 2, _int_seed(rng), ctx)
    U = transfer.u_quant(p, q, L, ctx)
    tr = transfer.partition_trace(U, M)
    brute = transfer.brute_force_partition(lattice, p, q, ctx)
    info.update(k=m.k, points=[_point_info(p), _point_info(q)], trace=tr, brute_force=brute)
    return abs(tr - brute) / abs(brute), info


def trial_curve_sample(cfg, rng, ctx):
    m = _modulus(cfg, rng)
    pts = sample_points(m, cfg.params["count"], _int_seed(rng), ctx)
    res = max(validate_point(p, ctx.N) for p in pts)
    return res, {"k": m.k, "points": [{"x": p.x, "y": p.y, **_point_info(p)} for p in pts]}


TRIALS = {
    "verify str": trial_str,
    "verify str-matrix": trial_str_matrix,
    "verify twisted-ybe": trial_twisted,
    "verify correspondence": trial_correspondence,
    "verify dilog12": trial_dilog12,
    "verify six-vertex": trial_six_vertex,
    "verify f-identity": trial_f_identity,
    "evolve": trial_evolve,
    "partition": trial_partition,
    "curve sample": trial_curve_sample,
}


def run(command: str, cfg: RunConfig) -> tuple[int, dict]:
    """Execute one subcommand; returns (exit code, report)."""
    if command not in TRIALS:
        raise ConfigError(f"unknown subcommand {command!r}")
    ctx = make_root_context(cfg.N)
    fn = TRIALS[command]
    rows = []
    for i, rng in enumerate(trial_rngs(cfg.seed, cfg.trials)):
        res, info = fn(cfg, rng, ctx)
        rows.append({"trial": i, "spawn_key": [cfg.seed, i], "residual": res, "pass": bool(res < cfg.tolerance),
                     "details": info})
    worst = max(r["residual"] for r in rows)
    passed = all(r["pass"] for r in rows)
    report = {
        "schema": SCHEMA,
        "command": command,
        "config": {"N": cfg.N, "seed": cfg.seed, "trials": cfg.trials, "tolerance": cfg.tolerance,
                   "params": {k: v for k, v in sorted(cfg.params.items()) if v is not None}},
        "trials": rows,
        "max_residual": worst,
        "passed": passed,
    }
    return (EXIT_OK if passed else EXIT_FAIL), report


def render(report: dict, fmt: str, timestamp: bool) -> str:
    if timestamp:
        report = dict(report, timestamp=_dt.datetime.now(_dt.timezone.utc).isoformat())
    if fmt == "json":
        return json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["command", "trial", "spawn_key", "residual", "pass", "details"])
    for row in report["trials"]:
        writer.writerow([
            report["command"], row["trial"], "/".join(map(str, row["spawn_key"])), fmt_real(row["residual"]),
            int(row["pass"]), json.dumps(_jsonable(row["details"]), sort_keys=True, separators=(",", ":")),
        ])
    return buf.getvalue()


def _complex_arg(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--N", type=int, default=None, help="number of spin states")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--trials", type=int, default=None)
    common.add_argument("--tol", type=float, default=None, help="pass/fail tolerance")
    common.add_argument("--L", type=int, default=None, help="chain length")
    common.add_argument("--M", type=int, default=None, help="number of rows")
    common.add_argument("--steps", type=int, default=None, help="evolution steps")
    common.add_argument("--count", type=int, default=None, help="points per curve sample")
    common.add_argument("--k", type=_complex_arg, default=None, help="curve modulus (random if omitted)")
    common.add_argument("--kappa", type=_complex_arg, default=None)
    common.add_argument("--alpha", type=_complex_arg, default=None)
    common.add_argument("--beta", type=_complex_arg, default=None)
    common.add_argument("--lambda", dest="lam", type=_complex_arg, default=None)
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("--config", default=None, help=f"JSON config file (default: ${CONFIG_ENV})")
    common.add_argument("--output", default=None, help="write the report here instead of stdout")
    common.add_argument("--no-timestamp", action="store_true", help="omit the timestamp field")

    parser = argparse.ArgumentParser(prog="dsgpotts", description=__doc__)
    sub = parser.add_subparsers(dest="group", required=True)
    verify = sub.add_parser("verify", help="run a verification suite")
    vsub = verify.add_subparsers(dest="what", required=True)
    for name in ("str", "str-matrix", "twisted-ybe", "correspondence", "dilog12", "six-vertex", "f-identity"):
        vsub.add_parser(name, parents=[common])
    sub.add_parser("evolve", parents=[common], help="classical lattice evolution with Casimir tracking")
    sub.add_parser("partition", parents=[common], help="Tr(U^M) against the brute-force spin sum")
    curve = sub.add_parser("curve", help="curve utilities")
    csub = curve.add_subparsers(dest="what", required=True)
    csub.add_parser("sample", parents=[common])
    return parser


_FILE_KEYS = set(DEFAULTS) | {"tolerance"}


def load_config_file(path: str | None) -> dict:
    if path is None:
        path = os.environ.get(CONFIG_ENV)
    if not path:
        return {}
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    unknown = set(data) - _FILE_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if "tolerance" in data:
        data["tol"] = data.pop("tolerance")
    for key in ("k", "kappa", "alpha", "beta", "lam"):
        if key in data and data[key] is not None:
            v = data[key]
            data[key] = complex(v["re"], v["im"]) if isinstance(v, dict) else complex(v)
    return data


def make_config(command: str, args: argparse.Namespace) -> RunConfig:
    """Built-in defaults, then the config file, then explicit flags."""
    merged = dict(DEFAULTS)
    merged.update(COMMAND_DEFAULTS[command])
    merged.update(load_config_file(args.config))
    for key in merged:
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val
    params = {k: merged[k] for k in ("L", "M", "steps", "count", "k", "kappa", "alpha", "beta", "lam")}
    return RunConfig(merged["N"], merged["seed"], merged["trials"], merged["tol"], merged["format"], params)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    command = args.group if args.group in ("evolve", "partition") else f"{args.group} {args.what}"
    try:
        cfg = make_config(command, args)
        code, report = run(command, cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DimensionCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except SearchFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SEARCH
    except (PottsError, ArithmeticError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    text = render(report, cfg.fmt, timestamp=not args.no_timestamp)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
