"""Command line entry point.

Exit codes: 0 success or consistent verdict, 1 inconsistent verdict,
2 configuration or hypothesis error, 3 numerical failure or inconclusive verdict.
"""

from __future__ import annotations

import argparse
import copy
import json
import os
import sys
import tempfile

import numpy as np

from . import harness
from .config import grid_from_config, ic_from_config, load_config, model_from_config, monitors_from_config
from .equilibria import INTERIOR, certify_small_c, dispersion, find_constant_equilibria
from .kinetics import AssumptionViolation, check_assumptions
from .monotone import BoundsConstructionError, MonotonicityError, construct_bounds, estimate_lipschitz, monotone_iterate
from .pde import ConfigurationError, SimulationError, simulate
from .steady import Continuation, NewtonFailure, search_steady_states

EXIT_OK, EXIT_INCONSISTENT, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


def _out_dir(args) -> str:
    out = args.out or tempfile.mkdtemp(prefix="predprey-")
    os.makedirs(out, exist_ok=True)
    return out


def _apply_seed(cfg: dict, seed: int | None) -> dict:
    cfg = copy.deepcopy(cfg)
    if seed is not None:
        for sec in ("ic", "experiment", "steady"):
            cfg.setdefault(sec, {})["seed"] = seed
    return cfg


def _emit(summary: dict):
    print(json.dumps(harness.jsonable(summary), indent=2))


def cmd_check(cfg, args, out):
    model = model_from_config(cfg)
    opts = cfg.get("check", {})
    rep = check_assumptions(model, v_max=opts.get("v_max"), n_samples=int(opts.get("samples", 10_000)))
    path = harness.write_json(os.path.join(out, "assumptions.json"), rep.to_dict())
    _emit({"verdicts": rep.verdicts, "a": rep.a, "v0": rep.v0, "report": path})
    return EXIT_OK


def cmd_equilibria(cfg, args, out):
    model = model_from_config(cfg)
    eqs = find_constant_equilibria(model)
    disp = cfg.get("dispersion", {})
    k_max, n_k = float(disp.get("k_max", 20.0)), int(disp.get("n_k", 200))
    rows = []
    for i, e in enumerate(eqs):
        row = e.to_dict()
        if e.kind == INTERIOR:
            dr = dispersion(model, e, k_max, n_k)
            row["turing_unstable"] = dr.turing_unstable
            row["band"] = dr.band
            row["dispersion_csv"] = harness.write_columns(
                os.path.join(out, f"dispersion_{i}.csv"),
                {"k": dr.k, "re_1": dr.eigenvalues[:, 0].real, "im_1": dr.eigenvalues[:, 0].imag,
                 "re_2": dr.eigenvalues[:, 1].real, "im_2": dr.eigenvalues[:, 1].imag},
            )
        rows.append(row)
    result = {"c": model.c, "equilibria": rows}
    try:
        result["small_c_certificate"] = certify_small_c(model).to_dict()
    except AssumptionViolation as exc:
        result["small_c_certificate"] = {"unavailable": str(exc)}
    path = harness.write_json(os.path.join(out, "equilibria.json"), result)
    _emit({"equilibria": [(r["u"], r["v"], r["kind"]) for r in rows], "report": path})
    return EXIT_OK


def cmd_iterate(cfg, args, out):
    model = model_from_config(cfg)
    it = cfg.get("iterate", {})
    box = construct_bounds(model, epsilon=it.get("epsilon"))
    K = estimate_lipschitz(model, box)
    tr = monotone_iterate(model, box, K, tol=it.get("tol", 1e-12), max_steps=int(it.get("max_steps", 1_000_000)))
    trace = os.path.join(out, "iterate_trace.csv")
    tr.to_csv(trace)
    path = harness.write_json(os.path.join(out, "iterate.json"), {"box": box.to_dict(), **tr.to_dict()})
    _emit({**tr.to_dict(), "report": path, "trace": trace})
    return EXIT_OK if tr.converged else EXIT_NUMERIC


def cmd_simulate(cfg, args, out):
    model = model_from_config(cfg)
    grid = grid_from_config(cfg)
    t = cfg.get("time", {})
    if "t_end" not in t:
        raise ConfigurationError("[time] t_end is required for simulate")
    box = None
    try:
        box = construct_bounds(model)
    except (AssumptionViolation, BoundsConstructionError):
        pass
    res = simulate(model, grid, ic_from_config(cfg), t["t_end"], dt=t.get("dt"),
                   monitors=monitors_from_config(cfg, box=box), scheme=t.get("scheme", "strang"),
                   dt_max=t.get("dt_max", 1.0))
    fmt = cfg.get("output", {}).get("snapshot_format", "csv")
    hist = os.path.join(out, "history.csv")
    res.history_to_csv(hist)
    fields = os.path.join(out, f"fields.{fmt}")
    res.save_fields(fields, fmt)
    summary = {**res.summary(), "grid": grid.to_dict(), "box": box.to_dict() if box else None}
    path = harness.write_json(os.path.join(out, "simulate.json"), summary)
    _emit({"classification": res.classification, "t": res.t, "report": path, "history": hist, "fields": fields})
    return EXIT_NUMERIC if res.classification == "budget-exhausted" else EXIT_OK


def cmd_steady(cfg, args, out):
    model = model_from_config(cfg)
    grid = grid_from_config(cfg)
    s = cfg.get("steady", {})
    strategies = list(harness.steady_strategies(cfg))
    if s.get("continuation"):
        strategies.append(Continuation(tuple(s["continuation"])))
    sols = search_steady_states(model, grid, strategies, tol=s.get("tol", 1e-10),
                                max_iters=int(s.get("max_iters", 50)), workers=args.threads)
    rows = []
    coords = {f"x{i}": x.ravel() for i, x in enumerate(grid.coords())}
    for i, sol in enumerate(sols):
        row = sol.to_dict()
        row["snapshot"] = harness.write_columns(os.path.join(out, f"solution_{i}.csv"),
                                                {**coords, "u": sol.U.ravel(), "v": sol.V.ravel()})
        rows.append(row)
    path = harness.write_json(os.path.join(out, "steady.json"), {"c": model.c, "solutions": rows})
    _emit({
        "n_solutions": len(sols),
        "n_positive": sum(x.positive for x in sols),
        "n_nonconstant_positive": sum(x.positive and not x.constant for x in sols),
        "report": path,
    })
    return EXIT_OK


def cmd_verify(cfg, args, out):
    spec = harness.ExperimentSpec.from_config(cfg, args.proposition, threads=args.threads, out_dir=out)
    rep = harness.verify_proposition(spec)
    _emit({"proposition": rep.proposition, "verdict": rep.verdict,
           "trials": [t["status"] for t in rep.trials], "report": os.path.join(out, "verdict.json")})
    return {harness.CONSISTENT: EXIT_OK, harness.INCONSISTENT: EXIT_INCONSISTENT}.get(rep.verdict, EXIT_NUMERIC)


def cmd_sweep(cfg, args, out):
    sec = cfg.get("sweep", {})
    parameter = args.parameter or sec.get("parameter")
    experiment = args.experiment or sec.get("experiment", "equilibria")
    values = [float(x) for x in args.values.split(",") if x.strip()] if args.values is not None \
        else sec.get("values", [])
    if parameter is None:
        raise ConfigurationError("sweep needs a parameter (--parameter or [sweep] parameter)")
    model = model_from_config(cfg)
    grid = grid_from_config(cfg)
    seed = cfg.get("ic", {}).get("seed", 0)
    t_end = cfg.get("time", {}).get("t_end", 200.0)
    strategies = harness.steady_strategies(cfg)
    rows = harness.parameter_sweep(model, parameter, values, experiment, grid=grid, seed=seed,
                                   t_end=t_end, strategies=strategies)
    table = harness.write_sweep_csv(os.path.join(out, "sweep.csv"), rows)
    path = harness.write_json(os.path.join(out, "sweep.json"),
                              {"parameter": parameter, "experiment": experiment, "rows": rows})
    _emit({"rows": len(rows), "report": path, "table": table})
    return EXIT_OK


COMMANDS = {
    "check": cmd_check,
    "equilibria": cmd_equilibria,
    "iterate": cmd_iterate,
    "simulate": cmd_simulate,
    "steady": cmd_steady,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="path to an INI-style configuration file")
    common.add_argument("--out", help="output directory (default: a fresh temporary directory)")
    common.add_argument("--seed", type=int, help="override every seed in the configuration")
    common.add_argument("--threads", type=int, default=1, help="concurrent trials / Newton starts")
    p = argparse.ArgumentParser(prog="predprey-lab", description="Diffusive predator-prey analysis toolkit")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("check", parents=[common], help="structural assumption report")
    sub.add_parser("equilibria", parents=[common], help="constant equilibria and dispersion curves")
    sub.add_parser("iterate", parents=[common], help="monotone iteration between constant bounds")
    sub.add_parser("simulate", parents=[common], help="time integration")
    sub.add_parser("steady", parents=[common], help="steady-state search")
    v = sub.add_parser("verify", parents=[common], help="run a proposition check")
    v.add_argument("proposition", nargs="?", choices=harness.PROPOSITIONS,
                   help="defaults to [experiment] proposition")
    s = sub.add_parser("sweep", parents=[common], help="one-parameter sweep")
    s.add_argument("--parameter")
    s.add_argument("--values", help="comma separated values")
    s.add_argument("--experiment", choices=harness.SWEEP_EXPERIMENTS)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = _apply_seed(load_config(args.config), args.seed)
        out = _out_dir(args)
        return COMMANDS[args.command](cfg, args, out)
    except (SimulationError, NewtonFailure, MonotonicityError, BoundsConstructionError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:  # ConfigurationError, HypothesisError, AssumptionViolation, DomainError
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
