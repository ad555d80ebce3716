"""Command-line front end.

Six subcommands share one flag vocabulary.  Values may also come from a JSON
file given with ``--config``; flags given on the command line win over it.

Exit status: 0 when every verdict holds, 1 when some verdict fails, 2 for an
invalid configuration and 3 when a solver does not converge.
"""

from __future__ import annotations

import argparse
import ast
import csv
import io
import json
import logging
import math
import operator
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import bounds, geometry, oracle
from .model_strip import StripConfig, StripConvergenceError
from .profiles import Profile, from_json, scale_profile, sphere_profile

log = logging.getLogger("isoprod")

EXIT_OK, EXIT_VERDICT, EXIT_USAGE, EXIT_SOLVER = 0, 1, 2, 3
COMMANDS = ("profile", "sandwich", "threshold", "stability", "sweep", "oracle")
THREADS_ENV = "ISOPROD_THREADS"


class ConfigError(ValueError):
    pass


# --------------------------------------------------------------------------
# value parsing


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_UNARY = {ast.UAdd: operator.pos, ast.USub: operator.neg}
_NAMES = {"pi": math.pi, "tau": math.tau, "e": math.e}
_FUNCS = {"sqrt": math.sqrt}


def parse_expr(text) -> float:
    """Evaluate a small arithmetic expression such as ``2*pi*4*pi``.

    Only numbers, ``pi``, ``tau``, ``e``, ``sqrt`` and ``+ - * / **`` are
    accepted.
    """
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        return float(text)

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id in _NAMES:
            return _NAMES[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
            return _UNARY[type(node.op)](ev(node.operand))
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
                and node.func.id in _FUNCS and len(node.args) == 1 and not node.keywords):
            return _FUNCS[node.func.id](ev(node.args[0]))
        raise ConfigError(f"unsupported expression {text!r}")

    try:
        value = ev(ast.parse(str(text).strip(), mode="eval"))
    except (SyntaxError, ZeroDivisionError, OverflowError) as exc:
        raise ConfigError(f"cannot evaluate {text!r}: {exc}") from None
    if not math.isfinite(value):
        raise ConfigError(f"{text!r} is not finite")
    return value


def parse_list(value) -> Tuple[float, ...]:
    """A number, an expression, or a comma-separated list of them."""
    if isinstance(value, (list, tuple)):
        return tuple(parse_expr(v) for v in value)
    if isinstance(value, (int, float)):
        return (float(value),)
    return tuple(parse_expr(part) for part in str(value).split(",") if part.strip())


def parse_range(text) -> Tuple[float, ...]:
    """``lo:hi:steps`` as ``steps`` evenly spaced values, ends included."""
    if isinstance(text, (list, tuple)):
        parts = list(text)
    else:
        parts = str(text).split(":")
    if len(parts) != 3:
        raise ConfigError(f"range {text!r} must look like lo:hi:steps")
    lo, hi = parse_expr(parts[0]), parse_expr(parts[1])
    try:
        steps = int(parts[2])
    except ValueError:
        raise ConfigError(f"step count {parts[2]!r} is not an integer") from None
    if steps < 1:
        raise ConfigError("range needs at least one step")
    if steps == 1:
        return (lo,)
    return tuple(float(x) for x in np.linspace(lo, hi, steps))


def parse_grid(value) -> Tuple[int, int]:
    if isinstance(value, (list, tuple)):
        parts = list(value)
    else:
        parts = str(value).lower().split("x")
    try:
        nx, ny = (int(p) for p in parts)
    except ValueError:
        raise ConfigError(f"grid {value!r} must look like NxM") from None
    if nx < 1 or ny < 1:
        raise ConfigError("grid sizes must be positive")
    return nx, ny


# --------------------------------------------------------------------------
# configuration


@dataclass
class RunConfig:
    """Fully parsed and validated parameters of one invocation."""

    command: str
    m: int = 2
    n: int = 2
    M: str = "sphere"
    N: str = "sphere"
    v0: Tuple[float, ...] = ()
    alpha: Tuple[float, ...] = ()
    lambdas: Tuple[float, ...] = ()
    grid: Tuple[int, int] = (400, 400)
    out: Optional[str] = None
    seed: int = 0
    format: str = "csv"
    samples: int = 2049
    method: str = "auto"
    refine: bool = True
    mu1: Optional[float] = None
    r0: Tuple[float, ...] = ()
    resolution: int = 32
    trials: int = 1000
    cases: int = 50
    table: str = "sandwich"


_REQUIRED = {
    "profile": (),
    "sandwich": ("v0", "alpha", "lambdas"),
    "threshold": ("v0", "alpha"),
    "stability": ("r0", "lambdas"),
    "sweep": ("v0", "lambdas"),
    "oracle": (),
}

_FLAG_NAMES = {"lambdas": "--lambda or --lambda-range", "v0": "--v0", "alpha": "--alpha",
               "r0": "--r0"}


def build_config(command: str, values: Dict[str, object]) -> RunConfig:
    """Turn raw flag/JSON values into a :class:`RunConfig`; raise :class:`ConfigError`."""
    cfg = RunConfig(command=command)
    try:
        for key in ("m", "n", "seed", "samples", "resolution", "trials", "cases"):
            if key in values:
                setattr(cfg, key, int(values[key]))
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    for key in ("M", "N", "out", "method", "table"):
        if key in values and values[key] is not None:
            setattr(cfg, key, str(values[key]))
    if "format" in values:
        cfg.format = str(values["format"])
    if "refine" in values:
        cfg.refine = bool(values["refine"])
    if "v0" in values:
        cfg.v0 = parse_list(values["v0"])
    if "alpha" in values:
        cfg.alpha = parse_list(values["alpha"])
    if "r0" in values:
        cfg.r0 = parse_list(values["r0"])
    if "mu1" in values and values["mu1"] is not None:
        cfg.mu1 = parse_expr(values["mu1"])
    if "grid" in values:
        cfg.grid = parse_grid(values["grid"])
    if "lambda_range" in values and values["lambda_range"] is not None:
        cfg.lambdas = parse_range(values["lambda_range"])
    elif "lambda" in values and values["lambda"] is not None:
        cfg.lambdas = parse_list(values["lambda"])
    validate(cfg)
    return cfg


def validate(cfg: RunConfig) -> None:
    if cfg.command not in COMMANDS:
        raise ConfigError(f"unknown command {cfg.command!r}")
    required = _REQUIRED[cfg.command]
    if cfg.command == "sweep" and cfg.table == "sandwich":
        required = required + ("alpha",)
    for key in required:
        if not getattr(cfg, key):
            raise ConfigError(f"missing required flag {_FLAG_NAMES.get(key, key)}")
    if cfg.m < 2 or cfg.n < 2:
        raise ConfigError("dimensions m, n must be >= 2")
    if cfg.format not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {cfg.format!r}")
    if cfg.table not in ("sandwich", "model"):
        raise ConfigError(f"table must be sandwich or model, got {cfg.table!r}")
    if cfg.method not in ("auto", "exact", "staircase", "lagrangian"):
        raise ConfigError(f"unknown method {cfg.method!r}")
    if cfg.samples < 3:
        raise ConfigError("samples must be >= 3")
    if cfg.trials < 1 or cfg.cases < 1:
        raise ConfigError("trials and cases must be >= 1")
    if cfg.resolution < 8:
        raise ConfigError("resolution must be >= 8")
    for a in cfg.alpha:
        if not 0.75 < a < 1.0:
            raise ConfigError(f"alpha={a!r} outside (3/4, 1)")
    for lam in cfg.lambdas:
        if not lam > 0.0:
            raise ConfigError(f"lambda={lam!r} must be positive")
    for r0 in cfg.r0:
        if not 0.0 < r0 < math.pi:
            raise ConfigError(f"r0={r0!r} outside (0, pi)")
    if cfg.mu1 is not None and not cfg.mu1 > 0.0:
        raise ConfigError("mu1 must be positive")
    if cfg.command in ("sandwich", "sweep", "threshold", "oracle"):
        if cfg.command != "oracle" and min(cfg.grid) < 2:
            raise ConfigError("grid must be at least 2x2")
        total = _profile(cfg.M, cfg.m, cfg.samples).total_volume * \
            _profile(cfg.N, cfg.n, cfg.samples).total_volume
        for v in cfg.v0:
            if not 0.0 < v < total:
                raise ConfigError(f"v0={v!r} outside (0, {total!r})")


@lru_cache(maxsize=16)
def _profile(spec: str, dim: int, samples: int) -> Profile:
    """``sphere`` for the unit round sphere, otherwise a JSON profile file."""
    if spec == "sphere":
        return sphere_profile(dim, samples)
    try:
        p = from_json(Path(spec))
    except (OSError, KeyError, json.JSONDecodeError, ValueError) as exc:
        raise ConfigError(f"cannot load profile {spec!r}: {exc}") from None
    if p.dim != dim:
        raise ConfigError(f"profile {spec!r} has dimension {p.dim}, expected {dim}")
    return p


def strip_config(cfg: RunConfig, lam: float) -> StripConfig:
    return StripConfig(cfg.m, cfg.n, _profile(cfg.M, cfg.m, cfg.samples),
                       _profile(cfg.N, cfg.n, cfg.samples), lam)


# --------------------------------------------------------------------------
# argument parser


def _common(p: argparse.ArgumentParser) -> None:
    S = argparse.SUPPRESS
    p.add_argument("--config", default=S, help="JSON file of parameter values")
    p.add_argument("--m", type=int, default=S, help="dimension of M (default 2)")
    p.add_argument("--n", type=int, default=S, help="dimension of N (default 2)")
    p.add_argument("--M", default=S, help="'sphere' or a JSON profile file for M")
    p.add_argument("--N", default=S, help="'sphere' or a JSON profile file for N")
    p.add_argument("--samples", type=int, default=S, help="profile sample count (default 2049)")
    p.add_argument("--out", default=S, help="output file (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default=S)
    p.add_argument("--seed", type=int, default=S)
    p.add_argument("-v", "--verbose", action="store_true", default=False)


def _volume_flags(p, alpha=True):
    S = argparse.SUPPRESS
    p.add_argument("--v0", default=S, help="enclosed volume(s); expressions like 8*pi**2")
    if alpha:
        p.add_argument("--alpha", default=S, help="alpha in (3/4, 1); comma list allowed")


def _lambda_flags(p):
    S = argparse.SUPPRESS
    g = p.add_mutually_exclusive_group()
    g.add_argument("--lambda", dest="lambda", default=S, help="lambda value(s), comma list")
    g.add_argument("--lambda-range", dest="lambda_range", default=S, help="lo:hi:steps")


def _solver_flags(p):
    S = argparse.SUPPRESS
    p.add_argument("--grid", default=S, help="lattice NxM (default 400x400)")
    p.add_argument("--method", default=S,
                   choices=("auto", "exact", "staircase", "lagrangian"))
    p.add_argument("--no-refine", dest="refine", action="store_false", default=S,
                   help="skip the grid-doubling slack estimate")


def make_parser() -> Tuple[argparse.ArgumentParser, Dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(prog="isoprod", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    subs = {}

    p = sub.add_parser("profile", help="emit profile samples")
    _common(p)
    p.add_argument("--lambda", dest="lambda", default=argparse.SUPPRESS,
                   help="rescale the metric by lambda^2 before emitting")
    subs["profile"] = p

    p = sub.add_parser("sandwich", help="two-sided bound check over lambda values")
    _common(p)
    _volume_flags(p)
    _lambda_flags(p)
    _solver_flags(p)
    subs["sandwich"] = p

    p = sub.add_parser("threshold", help="print the sufficient lambda_0")
    _common(p)
    _volume_flags(p)
    subs["threshold"] = p

    p = sub.add_parser("stability", help="cylinder stability report")
    _common(p)
    _lambda_flags(p)
    p.add_argument("--r0", default=argparse.SUPPRESS, help="cap radius(es) in (0, pi)")
    p.add_argument("--mu1", default=argparse.SUPPRESS,
                   help="first positive eigenvalue of N; computed numerically if omitted")
    p.add_argument("--resolution", type=int, default=argparse.SUPPRESS,
                   help="eigen-solver resolution (default 32)")
    subs["stability"] = p

    p = sub.add_parser("sweep", help="cross v0, alpha and lambda grids")
    _common(p)
    _volume_flags(p)
    _lambda_flags(p)
    _solver_flags(p)
    p.add_argument("--table", choices=("sandwich", "model"), default=argparse.SUPPRESS,
                   help="sandwich verdict rows or raw model rows")
    subs["sweep"] = p

    p = sub.add_parser("oracle", help="run the verification harnesses")
    _common(p)
    p.add_argument("--lambda", dest="lambda", default=argparse.SUPPRESS)
    p.add_argument("--trials", type=int, default=argparse.SUPPRESS,
                   help="symmetrization fuzz trials (default 1000)")
    p.add_argument("--cases", type=int, default=argparse.SUPPRESS,
                   help="brute-force comparison cases (default 50)")
    subs["oracle"] = p
    return parser, subs


# --------------------------------------------------------------------------
# commands


def _csv(header: Sequence[str], rows: Sequence[Sequence[object]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([bounds.fmt(x) for x in row])
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def cmd_profile(cfg: RunConfig) -> Tuple[str, int]:
    p = _profile(cfg.M, cfg.m, cfg.samples)
    if cfg.lambdas:
        p = scale_profile(p, cfg.lambdas[0])
    if cfg.format == "json":
        return _json(p.to_json()), EXIT_OK
    return _csv(("volume", "area"), p.samples.tolist()), EXIT_OK


def _sandwich_task(args) -> bounds.SandwichResult:
    cfg, v0, alpha, lam = args
    return bounds.sandwich_check(strip_config(cfg, lam), v0, alpha, cfg.grid,
                                 refine=cfg.refine, method=cfg.method)


def _model_task(args) -> Dict[str, float]:
    cfg, v0, _, lam = args
    return bounds.model_row(strip_config(cfg, lam), bounds.reduce_volume(
        strip_config(cfg, lam), v0), cfg.grid, method=cfg.method)


def worker_count(tasks: int) -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return 1
    try:
        k = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV}={raw!r} is not an integer") from None
    if k < 1:
        raise ConfigError(f"{THREADS_ENV} must be >= 1")
    return max(1, min(k, tasks))


def run_tasks(func, tasks: List[tuple]) -> list:
    """Evaluate ``func`` over ``tasks``; results come back in input order."""
    workers = worker_count(len(tasks))
    if workers == 1:
        return [func(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, tasks))


def _sandwich_output(cfg: RunConfig, results: List[bounds.SandwichResult]) -> Tuple[str, int]:
    status = EXIT_OK if all(r.verdict is bounds.Verdict.HOLDS for r in results) else EXIT_VERDICT
    if cfg.format == "json":
        rows = [dict(r.as_row(), m=cfg.m, n=cfg.n, ratio=r.ratio) for r in results]
        return _json(rows), status
    return bounds.sandwich_csv(results, cfg.m, cfg.n), status


def cmd_sandwich(cfg: RunConfig) -> Tuple[str, int]:
    if len(cfg.v0) != 1 or len(cfg.alpha) != 1:
        raise ConfigError("sandwich takes a single --v0 and --alpha; use sweep for grids")
    tasks = [(cfg, cfg.v0[0], cfg.alpha[0], lam) for lam in cfg.lambdas]
    return _sandwich_output(cfg, run_tasks(_sandwich_task, tasks))


MODEL_COLUMNS = ("lambda", "v", "model_value", "certified_lower", "f_upper", "ratio")


def cmd_sweep(cfg: RunConfig) -> Tuple[str, int]:
    if cfg.table == "model":
        tasks = [(cfg, v, None, lam) for v in cfg.v0 for lam in cfg.lambdas]
        rows = run_tasks(_model_task, tasks)
        if cfg.format == "json":
            return _json(rows), EXIT_OK
        return _csv(MODEL_COLUMNS, [[r[c] for c in MODEL_COLUMNS] for r in rows]), EXIT_OK
    tasks = [(cfg, v, a, lam) for v in cfg.v0 for a in cfg.alpha for lam in cfg.lambdas]
    return _sandwich_output(cfg, run_tasks(_sandwich_task, tasks))


THRESHOLD_COLUMNS = ("m", "n", "v0", "alpha", "case1", "case2b", "lambda0")


def cmd_threshold(cfg: RunConfig) -> Tuple[str, int]:
    sc = strip_config(cfg, 1.0)
    rows = []
    for v in cfg.v0:
        for a in cfg.alpha:
            cases = bounds.case_thresholds(sc, v, a)
            rows.append({"m": cfg.m, "n": cfg.n, "v0": v, "alpha": a, **cases,
                         "lambda0": max(cases.values())})
    if cfg.format == "json":
        return _json(rows), EXIT_OK
    return _csv(THRESHOLD_COLUMNS, [[r[c] for c in THRESHOLD_COLUMNS] for r in rows]), EXIT_OK


STABILITY_COLUMNS = ("m", "n", "r0", "lambda", "mu1", "margin", "threshold_lambda",
                     "strictly_stable")


def cmd_stability(cfg: RunConfig) -> Tuple[str, int]:
    psi = _profile(cfg.N, cfg.n, cfg.samples)
    mu1, err = cfg.mu1, None
    if mu1 is None:
        if cfg.N != "sphere":
            raise ConfigError("--mu1 is required unless N is the unit sphere")
        est = geometry.mu1_oracle(geometry.RoundSphere(cfg.n), cfg.resolution)
        mu1, err = est.value, est.error_estimate
    rows = []
    for r0 in cfg.r0:
        for lam in cfg.lambdas:
            spec = geometry.CylinderSpec(cfg.m, cfg.n, r0, psi.total_volume, lam)
            rep = geometry.stability_report(spec, mu1)
            rows.append({"m": cfg.m, "n": cfg.n, "r0": r0, "lambda": lam, **json.loads(rep.to_json())})
    status = EXIT_OK if all(r["strictly_stable"] for r in rows) else EXIT_VERDICT
    if cfg.format == "json":
        out = {"mu1_error_estimate": err, "reports": rows}
        return _json(out), status
    return _csv(STABILITY_COLUMNS, [[r[c] for c in STABILITY_COLUMNS] for r in rows]), status


QUADRATURE_TOL = 1e-10


def cmd_oracle(cfg: RunConfig) -> Tuple[str, int]:
    lam = cfg.lambdas[0] if cfg.lambdas else 1.0
    sc = strip_config(cfg, lam)
    agree = oracle.solver_agreement(sc, cfg.cases, cfg.seed)
    fuzz = oracle.fuzz_symmetrization(sc, cfg.trials, cfg.seed)
    quad = {d: oracle.quadrature_crosscheck(d, 65) for d in sorted({cfg.m, cfg.n})}
    passed = {
        "solver_agreement": agree.violations == 0,
        "symmetrization": fuzz.violations == 0,
        **{f"quadrature_m{d}": q.max_abs_deviation < QUADRATURE_TOL for d, q in quad.items()},
    }
    report = {
        "solver_agreement": json.loads(agree.to_json()),
        "symmetrization": json.loads(fuzz.to_json()),
        **{f"quadrature_m{d}": json.loads(q.to_json()) for d, q in quad.items()},
        "passed": passed,
    }
    status = EXIT_OK if all(passed.values()) else EXIT_VERDICT
    if cfg.format == "json":
        return _json(report), status
    rows = [(name, ok, report[name]["case_count"], report[name]["max_abs_deviation"])
            for name, ok in passed.items()]
    return _csv(("harness", "passed", "cases", "max_abs_deviation"), rows), status


_DISPATCH = {"profile": cmd_profile, "sandwich": cmd_sandwich, "threshold": cmd_threshold,
             "stability": cmd_stability, "sweep": cmd_sweep, "oracle": cmd_oracle}


def run(cfg: RunConfig) -> Tuple[str, int]:
    """Execute a validated configuration; returns the output text and exit status."""
    return _DISPATCH[cfg.command](cfg)


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser, subs = make_parser()
    ns = vars(parser.parse_args(argv))
    command = ns.pop("command")
    verbose = ns.pop("verbose", False)
    logging.basicConfig(level=logging.DEBUG if verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    sub = subs[command]
    values: Dict[str, object] = {}
    if "config" in ns:
        path = ns.pop("config")
        try:
            loaded = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            sub.error(f"cannot read config {path!r}: {exc}")
        if not isinstance(loaded, dict):
            sub.error("config file must hold a JSON object")
        values.update({k.replace("-", "_"): v for k, v in loaded.items()})
        # a range on the command line replaces a single value from the file and vice versa
        if "lambda" in ns or "lambda_range" in ns:
            values.pop("lambda", None)
            values.pop("lambda_range", None)
    values.update(ns)
    try:
        cfg = build_config(command, values)
        text, status = run(cfg)
    except ValueError as exc:
        # ConfigError and library-side range checks alike
        sub.error(str(exc))
    except (StripConvergenceError, geometry.EigenSolverError) as exc:
        print(f"isoprod: solver did not converge: {exc}", file=sys.stderr)
        bracket = getattr(exc, "bracket", None)
        if bracket is not None:
            print(f"isoprod: bracketing (area, perimeter) pairs: {bracket}", file=sys.stderr)
        return EXIT_SOLVER
    _emit(text, cfg.out)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
