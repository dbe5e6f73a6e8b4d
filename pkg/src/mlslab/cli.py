"""Command-line front end.

Every command writes ``<command>.csv`` (first line ``# digest=...``, then a
header row), ``<command>.json`` and ``manifest.json`` into ``--out``.
Exit codes: 0 all assertions pass, 1 an assertion failed, 2 usage or config
error, 3 numerical failure.  Failures print one ``key=value`` line on stderr.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .experiments import (ExperimentConfig, GaugeError, Report, gauge_check, isometry_difference,
                          linearization_check, mls_probe, parry_average, positivity_check,
                          stability_probe, volume_identity)
from .geodesic_solver import SolverError, SolverOptions, spectrum_batch
from .homotopy import enumerate_classes
from .models import (EnumerationError, FuchsianModel, ReductionError, TorusModel, bolza,
                     geometric_classes, model_from_config)
from .parallel import resolve_threads
from .tensors import (Bump, HyperbolicField, TorusField, centered_bump, conformal, random_field,
                      random_nonnegative, random_potential, random_solenoidal)
from .xray import QuadratureError, xray_batch


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ------------------------------------------------------------------ fields

def _kv(parts):
    out = {}
    for p in parts:
        if "=" not in p:
            raise UsageError(f"field option {p!r} is not key=value")
        k, v = p.split("=", 1)
        out[k] = v
    return out


def _take(opts: dict, allowed: dict) -> dict:
    bad = set(opts) - set(allowed)
    if bad:
        raise UsageError(f"unknown field options {sorted(bad)}")
    return {k: allowed[k](opts[k]) for k in opts}


def parse_field(spec: str, model, degree: int = 2):
    """Build a field from a source string (see ``--help``)."""
    if spec is None:
        raise UsageError("--field is required")
    kind, *rest = spec.split(":")
    opts = _kv(rest)
    if isinstance(model, FuchsianModel):
        if kind == "zero":
            _take(opts, {})
            return HyperbolicField(degree)
        if kind == "constant":
            o = _take(opts, {"c": float})
            return HyperbolicField(degree, (), o.get("c", 1.0))
        if kind == "bump":
            o = _take(opts, {"radius": float, "x": float, "y": float, "amp": float, "degree": int})
            m = o.get("degree", degree)
            f = centered_bump(o.get("radius", 1.0), m, center=complex(o.get("x", 0.0), o.get("y", 0.0)))
            amp = o.get("amp", 1.0)
            (b,) = f.bumps
            return HyperbolicField(m, (Bump(b.center, b.radius, tuple(amp * c for c in b.coeff)),))
        raise UsageError(f"unknown field source {kind!r} for the bolza model")
    if kind == "zero":
        o = _take(opts, {"K": int})
        return TorusField.zeros(degree, o.get("K", 0))
    if kind == "random":
        o = _take(opts, {"seed": int, "K": int, "alpha": float, "amp": float, "degree": int})
        seed, K, m = o.get("seed", 0), o.get("K", 8), o.get("degree", degree)
        if "alpha" in o:
            return random_solenoidal(seed, K, m, o["alpha"], model=model)
        return random_field(seed, K, m, o.get("amp", 0.05))
    if kind == "conformal":
        o = _take(opts, {"seed": int, "K": int, "amp": float, "u": float})
        if "u" in o:
            return conformal(model, TorusField.constant([o["u"]]))
        return conformal(model, random_nonnegative(o.get("seed", 0), o.get("K", 4), o.get("amp", 0.05)))
    if kind == "potential":
        o = _take(opts, {"seed": int, "K": int, "amp": float, "degree": int})
        f, _ = random_potential(o.get("seed", 0), o.get("K", 4), o.get("degree", degree), o.get("amp", 0.05), model)
        return f
    if kind == "isometry":
        o = _take(opts, {"seed": int, "K": int, "size": float})
        f, _ = isometry_difference(model, o.get("seed", 0), o.get("K", 2), o.get("size", 0.02))
        return f
    path = Path(spec)
    if path.is_file():
        return TorusField.from_json(path.read_text())
    raise UsageError(f"unknown field source {spec!r}")


# ------------------------------------------------------------------ output

def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        return format(v, ".17g")
    return str(v)


def write_csv(path: Path, digest: str, columns, rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(f"# digest={digest}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        w.writerows([_fmt(v) for v in row] for row in rows)


def config_digest(resolved: dict) -> str:
    return hashlib.sha256(json.dumps(resolved, sort_keys=True, default=str).encode()).hexdigest()


# ----------------------------------------------------------------- helpers

def _model(args):
    cfg = {}
    if getattr(args, "config", None):
        cfg = _load_config(args.config)
    kind = args.model or cfg.get("model", "torus")
    mc = dict(cfg)
    mc["model"] = kind
    if kind == "torus" and args.gram:
        mc["gram"] = [float(x) for x in args.gram.split(",")]
    return model_from_config(mc), cfg


def _load_config(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc


def _floats(text: str):
    return [float(x) for x in text.split(",") if x]


def _solver_options(args) -> SolverOptions:
    d = {"rtol": args.rtol, "max_iters": args.max_iters,
         "init_nodes_per_unit_length": args.nodes_per_length, "cg": not args.no_cg}
    if args.grad_tol is not None:
        d["grad_tol"] = args.grad_tol
    return SolverOptions(**d)


def _classes(model, bound):
    kind = "torus" if isinstance(model, TorusModel) else "bolza"
    return enumerate_classes(kind, int(bound), model)


def _model_desc(model):
    if isinstance(model, TorusModel):
        return {"model": "torus", "gram": [float(model.gram[0, 0]), float(model.gram[0, 1]), float(model.gram[1, 1])]}
    return {"model": "bolza"}


# ---------------------------------------------------------------- commands

def cmd_enumerate(args):
    model, _ = _model(args)
    if args.geometric is not None:
        enum = geometric_classes(model, args.geometric, args.max_word_length)
        rep = Report("enumerate", {**_model_desc(model), "T": args.geometric},
                     ["class_id", "word_length", "L_g0"])
        for c, L in zip(enum.classes, enum.lengths):
            rep.rows.append((c.class_id, len(c.letters), float(L)))
        rep.meta.update({"dropped_by_word_cap": enum.dropped_by_word_cap, "n_axis_groups": enum.n_axis_groups})
        return rep
    classes = _classes(model, args.bound)
    if isinstance(model, TorusModel):
        rep = Report("enumerate", {**_model_desc(model), "bound": args.bound}, ["class_id", "p", "q", "L_g0"])
        for c in classes:
            rep.rows.append((c.class_id, c.p, c.q, model.background_length(c)))
    else:
        rep = Report("enumerate", {**_model_desc(model), "bound": args.bound}, ["class_id", "word_length", "L_g0"])
        for c in classes:
            rep.rows.append((c.class_id, len(c.letters), model.background_length(c)))
    return rep


def cmd_spectrum(args):
    model, _ = _model(args)
    f = parse_field(args.field, model, 2)
    opts = _solver_options(args)
    recs = spectrum_batch(model, f, _classes(model, args.bound), opts, args.threads)
    rep = Report("spectrum", {**_model_desc(model), "field": args.field, "bound": args.bound,
                              "solver": vars(opts)},
                 ["class_id", "L_g0", "L_g", "ratio", "iterations", "grad_norm", "refinement_levels",
                  "converged", "error"])
    for r in recs:
        rep.rows.append((r.class_id, r.L_g0, r.L_g, r.ratio, r.iterations, r.grad_norm, r.refinement_levels,
                         r.converged, r.error))
    failed = [r for r in recs if r.error]
    if failed:
        rep.meta["numerical_failure"] = f"class {failed[0].class_id}: {failed[0].error}"
    rep.check("refinement converged", all(r.converged for r in recs if not r.error),
              sum(not r.converged for r in recs), 0)
    return rep


def cmd_xray(args):
    model, _ = _model(args)
    f = parse_field(args.field, model, args.degree)
    records, sup = xray_batch(model, f, _classes(model, args.bound), family=args.family)
    rep = Report("xray", {**_model_desc(model), "field": args.field, "degree": args.degree,
                          "bound": args.bound, "family": args.family},
                 ["class_id", "L_g0", "I_value", "quad_err"])
    for r in records:
        rep.rows.append((r.class_id, r.L_g0, r.value, r.quad_error_estimate))
    rep.meta["sup"] = sup
    failed = [r for r in records if r.error]
    if failed:
        rep.meta["numerical_failure"] = f"class {failed[0].class_id}: {failed[0].error}"
    return rep


def cmd_check(args):
    model, _ = _model(args)
    name = args.experiment
    if name == "volume":
        if not isinstance(model, TorusModel):
            raise UsageError("volume check needs the torus model")
        return volume_identity(model, parse_field(args.field, model, 2), t=args.t)
    if name == "parry":
        if not isinstance(model, FuchsianModel):
            raise UsageError("parry check needs the bolza model")
        f = parse_field(args.field or "bump:radius=1", model, 0)
        return parry_average(model, f, _floats(args.T_values), args.max_word_length)
    if name == "gauge":
        if not isinstance(model, TorusModel):
            raise UsageError("gauge check needs the torus model")
        f = parse_field(args.field, model, 2)
        return gauge_check(model, [f], args.tol, args.max_iter, isometry_seeds=())
    f = parse_field(args.field, model, 2)
    opts = _solver_options(args)
    if name == "linearization":
        return linearization_check(model, f, _floats(args.t_values), _classes(model, args.bound), opts,
                                   args.threads)
    return positivity_check(model, f, _classes(model, args.bound), opts, args.tol, args.threads)


def cmd_probe(args):
    model, cfg = _model(args)
    if not isinstance(model, TorusModel):
        raise UsageError("probes need the torus model")
    exp = ExperimentConfig.from_dict(cfg.get("experiment", {}))
    if args.probe == "stability":
        return stability_probe(model, exp, args.threads)
    opts = SolverOptions.from_dict(cfg.get("solver", {}))
    return mls_probe(model, exp, opts, args.threads, bound=cfg.get("bound"))


# ------------------------------------------------------------------ parser

FIELD_HELP = ("field source: a field JSON file, 'zero', 'random:seed=S:K=K[:amp=A][:alpha=N]' "
              "(alpha=N gives a solenoidal field with C^alpha surrogate norm N), "
              "'conformal:seed=S:K=K:amp=A' or 'conformal:u=C', 'potential:seed=S:K=K:amp=A', "
              "'isometry:seed=S:K=K:size=E'; bolza: 'zero', 'constant:c=C', "
              "'bump:radius=R:x=X:y=Y:amp=A:degree=M'")

CSV_HELP = """CSV columns:
  enumerate: class_id, p, q, L_g0 (torus) or class_id, word_length, L_g0
  spectrum: class_id, L_g0, L_g, ratio, iterations, grad_norm, refinement_levels, converged, error
  xray: class_id, L_g0, I_value, quad_err
  check linearization: t, class_id, L_g0, L_g, ratio, I2, remainder
  check positivity: class_id, L_g0, L_g, ratio, hypothesis, integral
  check volume: quantity, lhs, rhs, abs_diff
  check parry: T, n_classes, weighted_average, plain_average, liouville, abs_error
  check gauge: case, iterations, residual, normalized_l2, input_sup
  probe stability: member, seed, amplitude, lhs, linf, holder, linf_factor, rhs, ratio
  probe mls: member, kind, t, lhs, spectrum_dev, c0, ratio
"""


def _common(p):
    p.add_argument("--model", choices=["torus", "bolza"], default=None)
    p.add_argument("--gram", help="torus gram matrix as g11,g12,g22")
    p.add_argument("--config", help="JSON config: model, gram, experiment, solver, bound")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--threads", type=int, default=None, help="worker processes (default MLSLAB_THREADS or cores)")
    p.add_argument("--seed", type=int, default=0)


def _solver_flags(p):
    p.add_argument("--grad-tol", type=float, default=None)
    p.add_argument("--rtol", type=float, default=1e-7)
    p.add_argument("--max-iters", type=int, default=10_000)
    p.add_argument("--nodes-per-length", type=int, default=64)
    p.add_argument("--no-cg", action="store_true", help="plain preconditioned gradient descent")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mlslab", description="Marked length spectrum laboratory.", epilog=CSV_HELP,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("enumerate", help="list free homotopy classes")
    _common(p)
    p.add_argument("--bound", type=int, default=1)
    p.add_argument("--geometric", type=float, default=None, help="bolza: all classes with length <= T")
    p.add_argument("--max-word-length", type=int, default=12)

    p = sub.add_parser("spectrum", help="solve closed geodesics of g0 + f")
    _common(p)
    _solver_flags(p)
    p.add_argument("--field", required=True, help=FIELD_HELP)
    p.add_argument("--bound", type=int, required=True)

    p = sub.add_parser("xray", help="X-ray transform of a field")
    _common(p)
    p.add_argument("--field", required=True, help=FIELD_HELP)
    p.add_argument("--degree", type=int, default=2)
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("--family", choices=["base", "min", "sup"], default="base",
                   help="torus: which line of the parallel family to report")

    p = sub.add_parser("check", help="run one experiment")
    p.add_argument("experiment", choices=["linearization", "positivity", "volume", "parry", "gauge"])
    _common(p)
    _solver_flags(p)
    p.add_argument("--field", help=FIELD_HELP)
    p.add_argument("--bound", type=int, default=5)
    p.add_argument("--t-values", default="0.01,0.005,0.0025")
    p.add_argument("--t", type=float, default=1e-3, help="volume: finite-difference step")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-iter", type=int, default=50)
    p.add_argument("--T-values", dest="T_values", default="6,8,10,12")
    p.add_argument("--max-word-length", type=int, default=12)

    p = sub.add_parser("probe", help="ensemble probes")
    p.add_argument("probe", choices=["stability", "mls"])
    _common(p)
    return parser


COMMANDS = {"enumerate": cmd_enumerate, "spectrum": cmd_spectrum, "xray": cmd_xray,
            "check": cmd_check, "probe": cmd_probe}

NUMERICAL = (SolverError, QuadratureError, GaugeError, ReductionError, EnumerationError,
             np.linalg.LinAlgError, FloatingPointError, RuntimeError)


def _fail(code: int, exc: BaseException | str) -> int:
    kind = type(exc).__name__ if isinstance(exc, BaseException) else "AssertionFailure"
    reason = str(exc).replace("\n", " ")
    print(f"mlslab: exit={code} kind={kind} reason={json.dumps(reason)}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    start = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
        args.threads = resolve_threads(args.threads)
        np.random.seed(args.seed)
        rep = COMMANDS[args.command](args)
    except NUMERICAL as exc:
        return _fail(3, exc)
    except (UsageError, ValueError, TypeError, KeyError, OSError) as exc:
        return _fail(2, exc)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    name = args.command if args.command in ("enumerate", "spectrum", "xray") else \
        f"{args.command}_{getattr(args, 'experiment', None) or args.probe}"
    resolved = {"command": name, "config": rep.config, "seed": args.seed}
    digest = config_digest(resolved)
    csv_path, json_path = out / f"{name}.csv", out / f"{name}.json"
    write_csv(csv_path, digest, rep.columns, rep.rows)
    report = rep.to_dict()
    report["passed"] = rep.passed
    json_path.write_text(json.dumps(report, indent=2, sort_keys=True, default=str) + "\n")
    manifest = {"command_line": ["mlslab"] + argv, "config_digest": digest, "seed": args.seed,
                "version": __version__, "wall_time": time.perf_counter() - start,
                "outputs": [str(csv_path), str(json_path)]}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    if "numerical_failure" in rep.meta:
        return _fail(3, SolverError(rep.meta["numerical_failure"]))
    if not rep.passed:
        bad = [a.name for a in rep.assertions if not a.passed]
        return _fail(1, "failed assertions: " + "; ".join(bad))
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
