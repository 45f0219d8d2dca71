"""Command-line front end.

Subcommands: speeds, geometry, kdv, reciprocal, table, solve, verify.
A job is a curve specification (nu and u, or beta for the KdV side) plus
an output format; `verify` runs the named cross-check registry instead.
Exit codes: 0 success, 2 invalid curve or domain error, 3 failed
consistency check.  All floats are emitted with 17 significant digits,
so identical inputs give identical bytes.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from .ch_modulation import (
    _speeds_elliptic,
    _speeds_residue,
    densities,
    density_fit_residual,
    frequency,
    sign_facts,
    speeds,
    speeds_fd,
    traveling_wave,
    wavenumber,
)
from .curve import ChCurve, variational_residuals
from .errors import (
    ConsistencyError,
    DomainError,
    InvalidCurveError,
    NumericalError,
)
from .hodograph_solver import (
    InitialData,
    boundary_residual,
    epd_q,
    epd_residual,
    solve as hodograph_solve,
    solve_field,
    thread_cap,
    tsarev1_residual,
    zone_chart,
)
from .kdv_modulation import (
    KdvCurve,
    _casimir_gradient_fd,
    casimir_gradient,
    gradient_identity_residual,
    hamiltonian_fit_report,
    kdv_curvature,
    kdv_hamiltonians,
    neg_speeds,
    neg_speeds_fd,
    pos_speeds,
    varj0_residual,
)
from .metric_geometry import (
    _rotation_fd,
    affinor_match,
    curvature,
    egorov_defect,
    metric_signed,
    pencil_check,
    rotation_coefficients,
    tsarev_check,
)
from .reciprocal import (
    ReciprocalPair,
    alpha_identity_residuals,
    casimir_dual_residual,
    casimir_identity_residuals,
    ferapontov_check,
    metricbeta_residuals,
    nu_dual_residual,
    table1,
    tilde_speeds,
    velocity_identity_residual,
)
from .special_functions import elliptic_E, elliptic_K, elliptic_Pi_complete

SCHEMA_VERSION = 1
DEFAULT_SEED = 20260814

_COMMANDS = ("speeds", "geometry", "kdv", "reciprocal", "table",
             "solve", "verify")
_FORMATS = ("json", "csv", "text")


# -- argument parsing --------------------------------------------------------

def _parse_triple(text: str) -> tuple:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(
            f"expected three comma-separated values, got {text!r}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"non-numeric entry in {text!r}")


def _parse_grid(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(
            f"grid must be start:stop:count, got {text!r}")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid specification {text!r}")
    if n < 1:
        raise argparse.ArgumentTypeError(f"grid count must be >= 1, got {n}")
    return np.linspace(a, b, n)


def _parse_tol(text: str) -> tuple:
    name, sep, val = text.partition("=")
    if not sep or not name:
        raise argparse.ArgumentTypeError(
            f"tolerance override must be NAME=VALUE, got {text!r}")
    try:
        v = float(val)
    except ValueError:
        raise argparse.ArgumentTypeError(f"non-numeric tolerance in {text!r}")
    if not v > 0.0:
        raise argparse.ArgumentTypeError(
            f"tolerances must be positive, got {text!r}")
    return name, v


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="whitham-ch",
        description="One-phase Whitham modulation toolkit for the "
                    "Camassa-Holm spectral curve.",
        epilog="The WHITHAM_CH_THREADS environment variable caps worker "
               "threads (execution is serial, so any cap >= 1 is honored).")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, curve_flags=True):
        if curve_flags:
            p.add_argument("--nu", type=float, default=None,
                           help="curve parameter nu")
            p.add_argument("--u", type=_parse_triple, default=None,
                           metavar="U1,U2,U3",
                           help="Riemann invariants, ascending")
            p.add_argument("--beta", type=_parse_triple, default=None,
                           metavar="B1,B2,B3",
                           help="KdV edges, ascending positive")
        p.add_argument("--format", dest="fmt", choices=_FORMATS,
                       default=None, help="output format (default text)")
        p.add_argument("--out", default=None, help="output file path")
        p.add_argument("--tol", type=_parse_tol, action="append", default=[],
                       metavar="NAME=VALUE",
                       help="override a named check tolerance (repeatable)")
        p.add_argument("--config", default=None,
                       help="JSON file with defaults for the flags above")

    for name, blurb in (
            ("speeds", "characteristic speeds, wavenumber and frequency"),
            ("geometry", "metric family, curvature, Tsarev and pencil data"),
            ("kdv", "negative-KdV modulation data for a beta curve"),
            ("reciprocal", "averaged reciprocal transformation report"),
            ("table", "the side-by-side Hamiltonian ladder table")):
        p = sub.add_parser(name, help=blurb)
        common(p)

    p = sub.add_parser("solve", help="hodograph field solve (nu = 0)")
    common(p)
    p.add_argument("--data", default=None,
                   help="JSON file: array of increasing (u, x) pairs")
    p.add_argument("--xgrid", type=_parse_grid, default=None,
                   metavar="A:B:N", help="x grid, N points inclusive")
    p.add_argument("--tgrid", type=_parse_grid, default=None,
                   metavar="A:B:N", help="t grid, N points inclusive")

    p = sub.add_parser("verify", help="run every named consistency check")
    common(p, curve_flags=False)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED,
                   help="RNG seed for sampled curves")
    return parser


@dataclass
class JobConfig:
    """Validated job description assembled from flags and config file."""

    command: str
    nu: float | None = None
    u: tuple | None = None
    beta: tuple | None = None
    tolerances: dict = field(default_factory=dict)
    output: str | None = None
    fmt: str = "text"
    data: str | None = None
    xgrid: np.ndarray | None = None
    tgrid: np.ndarray | None = None
    seed: int = DEFAULT_SEED

    def validate(self) -> None:
        if self.command not in _COMMANDS:
            raise DomainError(f"unknown command {self.command!r}")
        if self.fmt not in _FORMATS:
            raise DomainError(f"unknown format {self.fmt!r}")
        for name, v in self.tolerances.items():
            if not (isinstance(v, (int, float)) and v > 0.0):
                raise DomainError(
                    f"tolerances must be positive, got {name}={v!r}")
        needs_u = self.command in ("speeds", "geometry", "reciprocal",
                                   "table")
        if needs_u:
            if self.u is None or self.nu is None:
                raise DomainError(
                    f"{self.command} needs --nu and --u")
            if self.beta is not None:
                raise DomainError(
                    f"{self.command} takes --u, not --beta")
        elif self.command == "kdv":
            if self.beta is None:
                raise DomainError("kdv needs --beta")
            if self.u is not None:
                raise DomainError("kdv takes --beta, not --u")
        elif self.command == "solve":
            if self.nu is None or self.nu != 0.0:
                raise DomainError(
                    f"the hodograph solver requires nu = 0, got {self.nu}")
            if self.u is not None or self.beta is not None:
                raise DomainError("solve takes --data, not --u or --beta")
            if self.data is None:
                raise DomainError("solve needs --data")
            if self.xgrid is None or self.tgrid is None:
                raise DomainError("solve needs --xgrid and --tgrid")
        elif self.command == "verify":
            if self.u is not None or self.beta is not None:
                raise DomainError("verify samples its own curves; "
                                  "drop --u/--beta")


def _job_config(args: argparse.Namespace) -> JobConfig:
    file_cfg = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            raw = json.load(fh)
        if not isinstance(raw, dict):
            raise DomainError("config file must hold a JSON object")
        file_cfg = raw

    def pick(flag, key, convert=None):
        v = getattr(args, flag, None)
        if v is None or (isinstance(v, list) and not v):
            v = file_cfg.get(key)
            if v is not None and convert is not None:
                v = convert(v)
        return v

    tol = dict(file_cfg.get("tolerances", {}))
    tol.update(dict(getattr(args, "tol", []) or []))
    cfg = JobConfig(
        command=args.command,
        nu=pick("nu", "nu", float),
        u=pick("u", "u", lambda v: tuple(float(x) for x in v)),
        beta=pick("beta", "beta", lambda v: tuple(float(x) for x in v)),
        tolerances=tol,
        output=pick("out", "out", str),
        fmt=pick("fmt", "format", str) or "text",
        data=pick("data", "data", str),
        xgrid=pick("xgrid", "xgrid", _parse_grid),
        tgrid=pick("tgrid", "tgrid", _parse_grid),
        seed=getattr(args, "seed", DEFAULT_SEED),
    )
    cfg.validate()
    return cfg


# -- emission ----------------------------------------------------------------

def _f17(x) -> str:
    return format(float(x), ".17g")


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    return x


def _render_json(x, indent: int = 0) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(x, dict):
        if not x:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {_render_json(v, indent + 1)}"
                 for k, v in x.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(x, (list, tuple)):
        if not x:
            return "[]"
        vals = [_render_json(v, indent + 1) for v in x]
        if all(not isinstance(v, (dict, list, tuple)) for v in x):
            return "[" + ", ".join(vals) + "]"
        return "[\n" + ",\n".join(inner + v for v in vals) + "\n" + pad + "]"
    if isinstance(x, bool):
        return "true" if x else "false"
    if x is None:
        return "null"
    if isinstance(x, float):
        return _f17(x) if math.isfinite(x) else "null"
    if isinstance(x, int):
        return str(x)
    return json.dumps(x)


def _flat_items(x, prefix=""):
    if isinstance(x, dict):
        for k, v in x.items():
            yield from _flat_items(v, f"{prefix}{k}." if prefix or True else k)
    elif isinstance(x, (list, tuple)):
        for i, v in enumerate(x):
            yield from _flat_items(v, f"{prefix}{i}.")
    else:
        yield prefix[:-1], x


def _scalar_text(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return "null"
    if isinstance(v, float):
        return _f17(v) if math.isfinite(v) else "nan"
    return str(v)


def _render_csv(payload: dict) -> str:
    rows = payload.get("rows")
    if isinstance(rows, list) and rows and isinstance(rows[0], dict):
        header = list(rows[0].keys())
        lines = [",".join(header)]
        for r in rows:
            cells = []
            for k in header:
                v = r.get(k)
                if isinstance(v, (list, tuple)):
                    cells.append(";".join(_scalar_text(w) for w in v))
                else:
                    cells.append(_scalar_text(v))
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"
    lines = ["key,value"]
    for k, v in _flat_items(payload):
        lines.append(f"{k},{_scalar_text(v)}")
    return "\n".join(lines) + "\n"


def _render_text(payload: dict) -> str:
    lines = []

    def walk(x, indent):
        pad = "  " * indent
        if isinstance(x, dict):
            width = max((len(str(k)) for k in x), default=0)
            for k, v in x.items():
                if isinstance(v, (dict, list, tuple)) and not _inline(v):
                    lines.append(f"{pad}{k}:")
                    walk(v, indent + 1)
                else:
                    lines.append(f"{pad}{str(k):<{width}}  {_inline_text(v)}")
        elif isinstance(x, (list, tuple)):
            for i, v in enumerate(x):
                if isinstance(v, (dict, list, tuple)) and not _inline(v):
                    lines.append(f"{pad}[{i}]")
                    walk(v, indent + 1)
                else:
                    lines.append(f"{pad}[{i}]  {_inline_text(v)}")

    def _inline(v):
        return (isinstance(v, (list, tuple))
                and all(not isinstance(w, (dict, list, tuple)) for w in v))

    def _inline_text(v):
        if isinstance(v, (list, tuple)):
            return "[" + ", ".join(_scalar_text(w) for w in v) + "]"
        return _scalar_text(v)

    walk(payload, 0)
    return "\n".join(lines) + "\n"


def _render_verify_text(payload: dict) -> str:
    lines = []
    for c in payload["checks"]:
        mark = "ok  " if c["ok"] else "FAIL"
        lines.append(f"[{mark}] {c['name']:<42} residual={c['residual']:.6e} "
                     f"tol={c['tol']:.1e}")
    lines.append(f"verify: {len(payload['checks'])} checks, "
                 f"{payload['failures']} failed (seed={payload['seed']})")
    return "\n".join(lines) + "\n"


def _emit(cfg: JobConfig, payload: dict) -> None:
    payload = _jsonable(payload)
    if cfg.fmt == "json":
        text = _render_json(payload) + "\n"
    elif cfg.fmt == "csv":
        text = _render_csv(payload)
    elif cfg.command == "verify":
        text = _render_verify_text(payload)
    else:
        text = _render_text(payload)
    if cfg.output and cfg.command != "solve":
        with open(cfg.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- payload builders --------------------------------------------------------

def _vec(a) -> list:
    return [float(x) for x in np.asarray(a).ravel()]


def _mat(a) -> list:
    return [[float(x) for x in row] for row in np.asarray(a)]


def _payload_speeds(cfg: JobConfig) -> dict:
    c = ChCurve(cfg.nu, cfg.u)
    sp = speeds(c)
    Ce = _speeds_elliptic(c)
    Cr = _speeds_residue(c)
    Cf = speeds_fd(c)
    tw = traveling_wave(c)
    return {
        "schema": SCHEMA_VERSION,
        "command": "speeds",
        "nu": c.nu,
        "u": _vec(c.u),
        "k": wavenumber(c),
        "omega": frequency(c),
        "C": _vec(sp.C),
        "deltas": {
            "elliptic_vs_residue": float(np.max(np.abs(Ce - Cr))),
            "elliptic_vs_fd": float(np.max(np.abs(Ce - Cf))),
        },
        "traveling_wave": {
            "c": tw.c, "A": tw.A, "B": tw.B, "e": _vec(tw.e),
        },
    }


def _payload_geometry(cfg: JobConfig) -> dict:
    c = ChCurve(cfg.nu, cfg.u)
    exponents = []
    for e in range(4):
        rep = curvature(c, e)
        exponents.append({
            "exponent": e,
            "metric": _vec(metric_signed(c, e)),
            "rotation": _mat(rep.rotation),
            "sectional": _mat(rep.sectional),
            "expected": _mat(rep.expected),
            "max_error": float(rep.max_error),
            "offdiagonal_residual": float(rep.offdiagonal_residual),
            "egorov_defect": float(rep.egorov_defect),
        })
    pencil = [{
        "lambda": rep.lam,
        "flat_residual": rep.flat_residual,
        "covariant_literal_residual": rep.covariant_literal_residual,
        "skipped": rep.skipped,
        "notice": rep.notice,
    } for rep in pencil_check(c)]
    af = affinor_match(c)
    return {
        "schema": SCHEMA_VERSION,
        "command": "geometry",
        "nu": c.nu,
        "u": _vec(c.u),
        "exponents": exponents,
        "tsarev_residual": max(float(tsarev_check(c, e)) for e in range(4)),
        "pencil": pencil,
        "affinor": {
            "minus_residual": af.minus_residual,
            "plus_residual": af.plus_residual,
            "empirical_sign": af.empirical_sign,
        },
    }


def _payload_kdv(cfg: JobConfig) -> dict:
    kc = KdvCurve(cfg.beta)
    kc.check()
    nu = cfg.nu if cfg.nu is not None else 0.0
    ham = kdv_hamiltonians(kc, nu=nu)
    v = neg_speeds(kc)
    vf = neg_speeds_fd(kc)
    fit = hamiltonian_fit_report(kc)
    return {
        "schema": SCHEMA_VERSION,
        "command": "kdv",
        "beta": _vec(kc.beta),
        "nu": nu,
        "constants": {
            "B": kc.B, "J0": kc.J0_closed, "alpha0": kc.alpha0,
            "alpha1": kc.alpha1, "kappa": kc.kappa, "omega": kc.omega,
        },
        "normalization_residuals": dict(kc.normalization_residuals()),
        "neg_speeds": _vec(v),
        "neg_speeds_fd_delta": float(np.max(np.abs(v - vf))),
        "pos_speeds": _vec(pos_speeds(kc)),
        "varj0_residual": varj0_residual(kc),
        "hamiltonians": {
            "H0": ham.H0, "Hm1": ham.Hm1, "Hm2": ham.Hm2, "Hm3": ham.Hm3,
            "N": ham.N,
        },
        "gradient_identity_residual": gradient_identity_residual(kc),
        "curvature": [{
            "exponent": e,
            "max_error": float(kdv_curvature(kc, e).max_error),
            "egorov_defect": float(kdv_curvature(kc, e).egorov_defect),
        } for e in range(4)],
        "fit": {
            "nodes": _vec(fit.nodes),
            "decoded": _vec(fit.decoded),
            "closed": _vec(fit.closed),
            "errors": _vec(fit.errors),
            "interpolation_residual": fit.interpolation_residual,
            "weight_one_consistent": fit.weight_one_consistent,
        },
    }


def _payload_reciprocal(cfg: JobConfig) -> dict:
    ch = ChCurve(cfg.nu, cfg.u)
    pair = ReciprocalPair.from_ch(ch)
    fer = []
    for e in (0, 1):
        rep = ferapontov_check(pair.kdv, exponent=e)
        fer.append({
            "exponent": e,
            "w_tilde": _vec(rep.w_tilde),
            "sectional": _mat(rep.sectional),
            "residual": rep.residual,
        })
    return {
        "schema": SCHEMA_VERSION,
        "command": "reciprocal",
        "nu": ch.nu,
        "u": _vec(ch.u),
        "beta": _vec(pair.kdv.beta),
        "beta_aligned": _vec(pair.beta_aligned),
        "H0": pair.H0,
        "N": pair.N,
        "alpha_residuals": dict(alpha_identity_residuals(pair)),
        "tilde_speeds": _vec(tilde_speeds(pair)),
        "velocity_identity_residual": velocity_identity_residual(pair),
        "casimir_dual_residual": casimir_dual_residual(pair),
        "nu_dual_residual": nu_dual_residual(pair),
        "metricbeta_residuals": {str(k): v for k, v in
                                 metricbeta_residuals(pair).items()},
        "ferapontov": fer,
    }


def _payload_table(cfg: JobConfig) -> dict:
    ch = ChCurve(cfg.nu, cfg.u)
    rows = []
    for r in table1(ch):
        rows.append({
            "side": r.side,
            "slot": r.slot,
            "exponent": r.exponent,
            "divisor": r.divisor,
            "metric": _vec(r.metric),
            "curvature": None if r.curvature is None else _vec(r.curvature),
            "curvature_error": r.curvature_error,
            "hamiltonian": r.hamiltonian,
            "casimir_shift": r.casimir_shift,
            "density_residual": r.density_residual,
            "metric_residual": r.metric_residual,
        })
    return {
        "schema": SCHEMA_VERSION,
        "command": "table",
        "nu": ch.nu,
        "u": _vec(ch.u),
        "rows": rows,
    }


def _payload_solve(cfg: JobConfig) -> dict:
    thread_cap()
    with open(cfg.data) as fh:
        samples = json.load(fh)
    data = InitialData.from_samples(samples)
    chart = zone_chart(data)
    sol = solve_field(data, cfg.tgrid, cfg.xgrid, chart=chart)
    csv_text = sol.to_csv(cfg.output)
    solved = np.isin(sol.status, ("ok", "degenerate"))
    hmax = float(np.max(sol.residual[solved])) if solved.any() else math.nan
    payload = {
        "schema": SCHEMA_VERSION,
        "command": "solve",
        "points": int(sol.status.size),
        "solved_fraction": sol.solved_fraction,
        "hodograph_residual_max": hmax,
        "pde_residual_max": sol.pde_residual_max(),
        "chart_points": len(chart),
        "out": cfg.output,
    }
    if cfg.output is None and cfg.fmt == "csv":
        payload["_raw"] = csv_text
    return payload


# -- verify registry ---------------------------------------------------------

def _rand_curve(rng, nu_max: float = 2.0, margin: float = 0.15) -> ChCurve:
    for _ in range(1000):
        nu = float(rng.uniform(0.0, nu_max))
        pts = np.sort(rng.uniform(-nu, 5.0, size=3))
        if pts[0] + nu > margin and float(np.min(np.diff(pts))) > margin:
            return ChCurve(nu, tuple(float(x) for x in pts))
    raise NumericalError("failed to sample a valid curve")


def _rand_kdv(rng, margin: float = 0.1) -> KdvCurve:
    for _ in range(1000):
        b = np.sort(rng.uniform(0.05, 3.0, size=3))
        if b[0] > margin and float(np.min(np.diff(b))) > margin:
            return KdvCurve(tuple(float(x) for x in b))
    raise NumericalError("failed to sample a valid KdV curve")


def _relmax(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(b))))


def _chk_legendre(rng):
    worst = 0.0
    for s2 in rng.uniform(0.01, 0.99, size=100):
        s2 = float(s2)
        c2 = 1.0 - s2
        lhs = (elliptic_E(s2) * elliptic_K(c2)
               + elliptic_E(c2) * elliptic_K(s2)
               - elliptic_K(s2) * elliptic_K(c2))
        worst = max(worst, abs(lhs - math.pi / 2.0))
    return worst


def _chk_pi_reduction(rng):
    return max(abs(elliptic_Pi_complete(0.0, float(m)) - elliptic_K(float(m)))
               for m in rng.uniform(0.05, 0.95, size=20))


def _chk_monotone(rng):
    ms = np.linspace(0.05, 0.95, 19)
    K = [elliptic_K(float(m)) for m in ms]
    E = [elliptic_E(float(m)) for m in ms]
    P = [elliptic_Pi_complete(0.3, float(m)) for m in ms]
    ok = (all(b > a for a, b in zip(K, K[1:]))
          and all(b < a for a, b in zip(E, E[1:]))
          and all(b > a for a, b in zip(P, P[1:])))
    return 0.0 if ok else 1.0


def _chk_normalization(key):
    def run(rng):
        return max(_rand_curve(rng).normalization_residuals()[key]
                   for _ in range(3))
    return run


def _chk_gamma_dual(rng):
    worst = 0.0
    for _ in range(3):
        c = _rand_curve(rng)
        I0, I1, I2 = c.moment(0), c.moment(1), c.moment(2)
        g1_m = -I1 / I0
        g2_m = -I2 / I0 + 0.5 * (c.S1 - c.nu) * I1 / I0
        scale = max(1.0, abs(c.gamma1), abs(c.gamma2))
        worst = max(worst, max(abs(c.gamma1 - g1_m),
                               abs(c.gamma2 - g2_m)) / scale)
    return worst


def _chk_pole_normalization(rng):
    worst = 0.0
    for _ in range(2):
        c = _rand_curve(rng)
        for i in range(3):
            got, want = c.pole_normalization(i)
            worst = max(worst, abs(got - want) / max(1.0, abs(want)))
    return worst


def _chk_variational(keys):
    def run(rng):
        worst = 0.0
        for _ in range(2):
            vr = variational_residuals(_rand_curve(rng))
            worst = max(worst, max(vr[k] for k in keys))
        return worst
    return run


def _chk_moment_scaling(rng):
    u = np.sort(rng.uniform(0.3, 4.0, size=3))
    while np.min(np.diff(u)) < 0.2:
        u = np.sort(rng.uniform(0.3, 4.0, size=3))
    a = ChCurve(0.0, tuple(float(x) for x in u))
    b = ChCurve(0.0, tuple(2.0 * float(x) for x in u))
    return max(_relmax(b.moment(k), 2.0 ** (k - 1) * a.moment(k))
               for k in range(3))


def _chk_speeds_dual(rng):
    return max(_relmax(_speeds_elliptic(c), _speeds_residue(c))
               for c in (_rand_curve(rng) for _ in range(5)))


def _chk_speeds_fd(rng):
    return max(float(np.max(np.abs(_speeds_elliptic(c) - speeds_fd(c))))
               for c in (_rand_curve(rng) for _ in range(3)))


def _coalescence_gaps(build):
    gaps = []
    for eps in (1e-2, 1e-3, 1e-4, 1e-5, 1e-6):
        C = _speeds_elliptic(build(eps))
        gaps.append(abs(C[build.pair[0]] - C[build.pair[1]]))
    decreasing = all(b < a for a, b in zip(gaps, gaps[1:]))
    return 0.0 if decreasing else 1.0


def _chk_coalescence_upper(rng):
    def build(eps):
        return ChCurve(0.5, (0.4, 2.0 - eps, 2.0 + eps))
    build.pair = (1, 2)
    return _coalescence_gaps(build)


def _chk_coalescence_lower(rng):
    def build(eps):
        return ChCurve(0.5, (0.4, 0.4 + eps, 3.0))
    build.pair = (0, 1)
    return _coalescence_gaps(build)


def _chk_hyperbolicity(rng):
    bad = 0
    for _ in range(2000):
        C = _speeds_elliptic(_rand_curve(rng, margin=0.05))
        if not (C[0] < C[2] and C[1] < C[2]):
            bad += 1
    return float(bad)


def _chk_sign_facts(rng):
    for _ in range(20):
        if not all(sign_facts(_rand_curve(rng)).values()):
            return 1.0
    return 0.0


def _chk_wavenumber(rng):
    worst = 0.0
    for _ in range(3):
        c = _rand_curve(rng)
        k_quad = 2.0 * math.pi / c.cycle(lambda l: l + c.nu)
        worst = max(worst, _relmax(wavenumber(c, check=False), k_quad))
    return worst


def _chk_h0_dual(rng):
    worst = 0.0
    for _ in range(3):
        c = _rand_curve(rng)
        d = densities(c, check=False)
        direct = -2.0 * c.P2(-c.nu) / c.P1(-c.nu) - c.nu
        worst = max(worst, abs(d.h0 - direct) / max(1.0, abs(direct)))
    return worst


def _chk_density_fit(rng):
    return max(density_fit_residual(_rand_curve(rng)) for _ in range(3))


def _chk_traveling_wave(rng):
    worst = 0.0
    for _ in range(3):
        c = _rand_curve(rng)
        tw = traveling_wave(c, check=False)
        worst = max(worst, abs(tw.c - (sum(tw.e) + 2.0 * c.nu)))
    return worst


def _chk_curvature(exponent):
    def run(rng):
        return max(float(curvature(_rand_curve(rng), exponent).max_error)
                   for _ in range(2))
    return run


def _chk_egorov(rng):
    lowest = math.inf
    for _ in range(2):
        c = _rand_curve(rng)
        lowest = min(lowest, min(egorov_defect(c, e) for e in range(4)))
    return 0.0 if lowest > 1e-3 else 1.0


def _chk_rotation_fd(rng):
    worst = 0.0
    c = _rand_curve(rng)
    for e in (0, 2):
        closed = rotation_coefficients(c, e, check=False)
        fd = _rotation_fd(c, e, h=1e-6)
        for i in range(3):
            for j in range(3):
                if i != j:
                    worst = max(worst, abs(closed[i][j] - fd[i][j]))
    return worst


def _chk_tsarev(rng):
    return max(float(tsarev_check(_rand_curve(rng), e))
               for e in range(4) for _ in (0,))


def _chk_pencil_flat(rng):
    c = _rand_curve(rng)
    vals = [r.flat_residual for r in pencil_check(c) if not r.skipped]
    return max(vals) if vals else 1.0


def _chk_pencil_literal(rng):
    c = _rand_curve(rng)
    vals = [r.covariant_literal_residual for r in pencil_check(c)
            if not r.skipped]
    return 0.0 if vals and min(vals) > 1e-3 else 1.0


def _chk_affinor(rng):
    rep = affinor_match(_rand_curve(rng))
    return rep.minus_residual if rep.empirical_sign == -1 else 1.0


def _chk_kdv_norm(key):
    def run(rng):
        return max(_rand_kdv(rng).normalization_residuals()[key]
                   for _ in range(2))
    return run


def _chk_neg_speeds_fd(rng):
    return max(float(np.max(np.abs(neg_speeds(c) - neg_speeds_fd(c))))
               for c in (_rand_kdv(rng) for _ in range(2)))


def _chk_speed_scaling(rng):
    kc = _rand_kdv(rng)
    scaled = KdvCurve(tuple(2.0 * b for b in kc.beta))
    return _relmax(neg_speeds(scaled, check=False),
                   2.0 ** -1.5 * neg_speeds(kc, check=False))


def _chk_kdv_coalescence(rng):
    b1, b3 = 0.7, 2.9
    kc = KdvCurve((b1, b3 - 1e-6, b3))
    v = neg_speeds(kc, check=False)
    w = pos_speeds(kc)
    return max(abs(v[0] - 2.0 * b1 ** -1.5), abs(w[0] - 3.0 * b1),
               abs(v[1] - v[2]))


def _chk_kdv_curvature(rng):
    c = _rand_kdv(rng)
    return max(float(kdv_curvature(c, e).max_error) for e in range(4))


def _chk_varj0(rng):
    return max(varj0_residual(_rand_kdv(rng)) for _ in range(2))


def _chk_casimir_positive(rng):
    for _ in range(5):
        if not kdv_hamiltonians(_rand_kdv(rng), check=False).H0 > 0.0:
            return 1.0
    return 0.0


def _chk_casimir_gradient(rng):
    c = _rand_kdv(rng)
    closed = casimir_gradient(c, check=False)
    fd = _casimir_gradient_fd(c, h=1e-6)
    return _relmax(closed, fd)


def _chk_nu_dual(rng):
    return max(gradient_identity_residual(_rand_kdv(rng), use_fd=True)
               for _ in range(2))


def _chk_fit(rng):
    return max(hamiltonian_fit_report(_rand_kdv(rng)).interpolation_residual
               for _ in range(2))


def _chk_alpha(rng):
    return max(max(alpha_identity_residuals(
        ReciprocalPair.from_ch(_rand_curve(rng))).values())
        for _ in range(2))


def _chk_tilde(rng):
    worst = 0.0
    for _ in range(2):
        pair = ReciprocalPair.from_ch(_rand_curve(rng))
        worst = max(worst, _relmax(tilde_speeds(pair, check=False),
                                   _speeds_elliptic(pair.ch)))
    return worst


def _chk_velocity(rng):
    return max(velocity_identity_residual(ReciprocalPair.from_ch(
        _rand_curve(rng))) for _ in range(10))


def _chk_casimir_dual(rng):
    return max(casimir_dual_residual(ReciprocalPair.from_ch(
        _rand_curve(rng))) for _ in range(2))


def _chk_nu_dual_pair(rng):
    return max(nu_dual_residual(ReciprocalPair.from_ch(_rand_curve(rng)))
               for _ in range(2))


def _chk_metricbeta(rng):
    return max(max(metricbeta_residuals(ReciprocalPair.from_ch(
        _rand_curve(rng))).values()) for _ in range(2))


def _chk_ferapontov0(rng):
    return ferapontov_check(_rand_kdv(rng), exponent=0).residual


def _chk_ferapontov1(rng):
    rep = ferapontov_check(_rand_kdv(rng), exponent=1)
    sect = np.asarray(rep.sectional)
    off = [abs(sect[i][j] + 1.0) for i in range(3) for j in range(3)
           if i != j]
    return max(rep.residual, max(off))


def _chk_table_densities(rng):
    rows = table1(_rand_curve(rng), curvature_check=False)
    vals = [r.density_residual for r in rows if r.density_residual is not None]
    return max(vals)


def _chk_table_curvature(rng):
    rows = table1(_rand_curve(rng), curvature_check=True)
    vals = [r.curvature_error for r in rows if r.curvature_error is not None]
    return max(vals)


def _chk_shift_closure(rng):
    return max(max(casimir_identity_residuals(_rand_curve(rng)).values())
               for _ in range(2))


def _hodo_profiles():
    one = InitialData.from_callable(
        lambda u: np.ones_like(np.asarray(u, dtype=float)),
        lambda u: np.zeros_like(np.asarray(u, dtype=float)),
        lambda u: np.zeros_like(np.asarray(u, dtype=float)), label="const")
    lin = InitialData.from_callable(
        lambda u: np.asarray(u, dtype=float),
        lambda u: np.ones_like(np.asarray(u, dtype=float)),
        lambda u: np.zeros_like(np.asarray(u, dtype=float)), label="linear")
    cub = InitialData.from_callable(
        lambda u: np.asarray(u, dtype=float) ** 3,
        lambda u: 3.0 * np.asarray(u, dtype=float) ** 2,
        lambda u: 6.0 * np.asarray(u, dtype=float), label="cubic")
    return one, lin, cub


_BREAK_CENTER = 1.7


def _breaking_profile() -> InitialData:
    c = _BREAK_CENTER
    return InitialData.from_callable(
        lambda u: np.asarray(u, dtype=float)
        + (np.asarray(u, dtype=float) - c) ** 3 / 3.0,
        lambda u: 1.0 + (np.asarray(u, dtype=float) - c) ** 2,
        lambda u: 2.0 * (np.asarray(u, dtype=float) - c),
        u_range=(0.2, 3.2), label="inflection")


def _chk_q_constant(rng):
    one, _, _ = _hodo_profiles()
    pts = [(0.3, 1.1, 2.2), (1.0, 2.0, 4.0), (0.5, 0.9, 1.4)]
    return max(abs(epd_q(one, p) - 1.0) for p in pts)


def _chk_q_linear(rng):
    _, lin, _ = _hodo_profiles()
    pts = [(0.3, 1.1, 2.2), (1.0, 2.0, 4.0)]
    return max(abs(epd_q(lin, p) - sum(p) / 3.0) for p in pts)


def _chk_epd(rng):
    _, _, cub = _hodo_profiles()
    return epd_residual(cub, (1.0, 1.7, 2.6))


def _chk_boundary(rng):
    _, _, cub = _hodo_profiles()
    return max(boundary_residual(cub, a) for a in (0.7, 1.9))


def _chk_tsarev1(rng):
    sq = InitialData.from_callable(
        lambda u: np.asarray(u, dtype=float) ** 2,
        lambda u: 2.0 * np.asarray(u, dtype=float),
        lambda u: 2.0 * np.ones_like(np.asarray(u, dtype=float)))
    return tsarev1_residual(sq, (1.0, 2.0, 3.0))


def _chk_newton_point(rng):
    f = _breaking_profile()
    res = hodograph_solve(f, -0.45, 0.45, (0.85, 2.0, 2.8))
    return res.residual if res.status == "ok" else 1.0


def _chk_field(rng):
    f = _breaking_profile()
    sol = solve_field(f, np.linspace(0.447, 0.457, 8),
                      np.linspace(-0.462, -0.442, 24))
    if sol.solved_fraction < 0.95:
        return 1.0
    return sol.pde_residual_max()


def _chk_rarefaction(rng):
    f = _breaking_profile()
    sol = solve_field(f, np.linspace(0.447, 0.457, 4),
                      np.linspace(-0.462, -0.442, 12))
    bad = total = 0
    for it in range(sol.t.size):
        row = sol.u[it, :, 2]
        ok = np.isin(sol.status[it], ("ok", "degenerate"))
        vals = row[ok]
        bad += int(np.sum(np.diff(vals) < -1e-10))
        total += max(len(vals) - 1, 1)
    return bad / total


def _chk_cli_deterministic(rng):
    cfg = JobConfig(command="speeds", nu=1.0, u=(0.5, 1.2, 3.0), fmt="json")
    a = _render_json(_jsonable(_payload_speeds(cfg)))
    b = _render_json(_jsonable(_payload_speeds(cfg)))
    return 0.0 if a == b else 1.0


def _registry() -> list:
    return [
        ("special_functions.legendre_relation", 1e-12, _chk_legendre),
        ("special_functions.pi_reduction", 1e-15, _chk_pi_reduction),
        ("special_functions.monotonicity", 0.5, _chk_monotone),
        ("curve.normalization_sigma1", 1e-10, _chk_normalization("sigma1")),
        ("curve.normalization_sigma2", 1e-10, _chk_normalization("sigma2")),
        ("curve.normalization_omega_nu", 1e-10,
         _chk_normalization("omega_nu")),
        ("curve.normalization_phi", 1e-10, _chk_normalization("phi")),
        ("curve.gamma_dual_path", 1e-6, _chk_gamma_dual),
        ("curve.pole_normalization", 1e-10, _chk_pole_normalization),
        ("curve.variational_gamma", 1e-5,
         _chk_variational(("gamma1", "gamma2"))),
        ("curve.variational_phi", 1e-5, _chk_variational(("phi",))),
        ("curve.variational_sigma1", 1e-5, _chk_variational(("sigma1",))),
        ("curve.variational_omega", 1e-4, _chk_variational(("omega",))),
        ("curve.moment_scaling", 1e-9, _chk_moment_scaling),
        ("ch_modulation.speeds_dual_route", 1e-9, _chk_speeds_dual),
        ("ch_modulation.speeds_kinematic", 1e-5, _chk_speeds_fd),
        ("ch_modulation.coalescence_upper", 0.5, _chk_coalescence_upper),
        ("ch_modulation.coalescence_lower", 0.5, _chk_coalescence_lower),
        ("ch_modulation.hyperbolicity", 0.5, _chk_hyperbolicity),
        ("ch_modulation.sign_facts", 0.5, _chk_sign_facts),
        ("ch_modulation.wavenumber_dual_path", 1e-7, _chk_wavenumber),
        ("ch_modulation.h0_dual_path", 1e-9, _chk_h0_dual),
        ("ch_modulation.density_fit", 1e-6, _chk_density_fit),
        ("ch_modulation.traveling_wave_constant", 1e-10,
         _chk_traveling_wave),
        ("metric_geometry.curvature_exp0", 1e-4, _chk_curvature(0)),
        ("metric_geometry.curvature_exp1", 1e-4, _chk_curvature(1)),
        ("metric_geometry.curvature_exp2", 1e-4, _chk_curvature(2)),
        ("metric_geometry.curvature_exp3", 1e-4, _chk_curvature(3)),
        ("metric_geometry.egorov_defect", 0.5, _chk_egorov),
        ("metric_geometry.rotation_closed_vs_fd", 1e-5, _chk_rotation_fd),
        ("metric_geometry.tsarev", 1e-4, _chk_tsarev),
        ("metric_geometry.pencil_flat", 1e-4, _chk_pencil_flat),
        ("metric_geometry.pencil_literal_not_flat", 0.5,
         _chk_pencil_literal),
        ("metric_geometry.affinor", 1e-4, _chk_affinor),
        ("kdv_modulation.normalization_j0", 1e-10, _chk_kdv_norm("j0")),
        ("kdv_modulation.normalization_dp", 1e-10, _chk_kdv_norm("dp")),
        ("kdv_modulation.normalization_lambda0", 1e-10,
         _chk_kdv_norm("lambda0")),
        ("kdv_modulation.neg_speeds_kinematic", 1e-5, _chk_neg_speeds_fd),
        ("kdv_modulation.speed_scaling", 1e-9, _chk_speed_scaling),
        ("kdv_modulation.coalescence", 1e-3, _chk_kdv_coalescence),
        ("kdv_modulation.curvature_table", 1e-4, _chk_kdv_curvature),
        ("kdv_modulation.varj0", 1e-6, _chk_varj0),
        ("kdv_modulation.casimir_positive", 0.5, _chk_casimir_positive),
        ("kdv_modulation.casimir_gradient_fd", 1e-7, _chk_casimir_gradient),
        ("kdv_modulation.nu_dual_route", 1e-7, _chk_nu_dual),
        ("kdv_modulation.fit_interpolation", 1e-7, _chk_fit),
        ("reciprocal.alpha_identities", 1e-10, _chk_alpha),
        ("reciprocal.tilde_speeds", 1e-9, _chk_tilde),
        ("reciprocal.velocity_identity", 1e-8, _chk_velocity),
        ("reciprocal.casimir_dual_path", 1e-8, _chk_casimir_dual),
        ("reciprocal.nu_dual_path", 1e-7, _chk_nu_dual_pair),
        ("reciprocal.metricbeta", 1e-8, _chk_metricbeta),
        ("reciprocal.ferapontov_exp0", 1e-3, _chk_ferapontov0),
        ("reciprocal.ferapontov_exp1", 1e-3, _chk_ferapontov1),
        ("reciprocal.table_densities", 1e-7, _chk_table_densities),
        ("reciprocal.table_curvature", 1e-4, _chk_table_curvature),
        ("reciprocal.casimir_shift_closure", 1e-7, _chk_shift_closure),
        ("hodograph_solver.q_constant", 1e-10, _chk_q_constant),
        ("hodograph_solver.q_linear", 1e-8, _chk_q_linear),
        ("hodograph_solver.epd_residual", 1e-4, _chk_epd),
        ("hodograph_solver.boundary_condition", 1e-8, _chk_boundary),
        ("hodograph_solver.tsarev1", 1e-3, _chk_tsarev1),
        ("hodograph_solver.newton_point", 1e-9, _chk_newton_point),
        ("hodograph_solver.field_residual", 5e-2, _chk_field),
        ("hodograph_solver.rarefaction_monotonicity", 0.05,
         _chk_rarefaction),
        ("cli.deterministic_output", 0.5, _chk_cli_deterministic),
    ]


def _payload_verify(cfg: JobConfig) -> dict:
    checks = []
    failures = 0
    for idx, (name, tol, fn) in enumerate(_registry()):
        tol = cfg.tolerances.get(name, tol)
        rng = np.random.default_rng([cfg.seed, idx])
        try:
            residual = float(fn(rng))
        except (ConsistencyError, NumericalError, InvalidCurveError,
                DomainError) as exc:
            residual = getattr(exc, "residual", math.inf)
        ok = math.isfinite(residual) and residual <= tol
        failures += 0 if ok else 1
        checks.append({"name": name, "residual": residual, "tol": tol,
                       "ok": ok})
    return {
        "schema": SCHEMA_VERSION,
        "command": "verify",
        "seed": cfg.seed,
        "checks": checks,
        "failures": failures,
    }


# -- entry point ---------------------------------------------------------------

_DISPATCH = {
    "speeds": _payload_speeds,
    "geometry": _payload_geometry,
    "kdv": _payload_kdv,
    "reciprocal": _payload_reciprocal,
    "table": _payload_table,
    "solve": _payload_solve,
    "verify": _payload_verify,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _job_config(args)
        payload = _DISPATCH[cfg.command](cfg)
        raw = payload.pop("_raw", None)
        if raw is not None:
            sys.stdout.write(raw)
        else:
            _emit(cfg, payload)
        if cfg.command == "verify" and payload["failures"]:
            first = next(c for c in payload["checks"] if not c["ok"])
            print(f"error: consistency check '{first['name']}' failed: "
                  f"residual {first['residual']:.6e} exceeds tolerance "
                  f"{first['tol']:.1e}", file=sys.stderr)
            return 3
    except (InvalidCurveError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConsistencyError, NumericalError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
