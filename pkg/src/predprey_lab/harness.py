"""Operational checks of the nonexistence / attractivity statements, sweeps and report files."""

from __future__ import annotations

import copy
import csv
import json
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import pde
from .config import dump_config, grid_from_config, model_from_config
from .equilibria import (
    certify_small_c,
    find_constant_equilibria,
    holling2_large_a_constants,
    interior_equilibria,
)
from .kinetics import AssumptionViolation, ModelSpec, check_assumptions, compute_prey_capacity
from .monotone import (
    BoundsConstructionError,
    MonotonicityError,
    construct_bounds,
    estimate_lipschitz,
    monotone_iterate,
)
from .pde import ConfigurationError, InitialCondition, Monitors, simulate
from .steady import Eigenmodes, Multistart, search_steady_states

CONSISTENT = "consistent"
INCONSISTENT = "inconsistent"
INCONCLUSIVE = "inconclusive"
_EXHAUSTED = "exhausted"

PROPOSITIONS = (
    "cor-2.3-1",
    "cor-2.3-2",
    "prop-4.1-a1",
    "prop-4.1-a2",
    "prop-4.2-b1",
    "prop-4.2-b2",
    "prop-4.2-b3",
    "prop-4.3",
    "prop-4.4",
    "prop-4.5-weakallee",
    "prop-4.6-strongallee",
    "thm-3.5-1",
    "thm-3.5-2",
)
WEAK_ALLEE_PARTS = ("a1", "a2", "b2", "b3")

DEFAULT_E_LADDER = (10.0, 50.0, 100.0, 500.0)
DEFAULT_M_LADDER = (1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0)


class HypothesisError(ConfigurationError):
    """Parameters do not satisfy the statement being checked."""

    def __init__(self, failed: list["Gate"]):
        self.failed = failed
        names = ", ".join(f"{g.inequality} ({g.detail})" for g in failed)
        super().__init__(f"hypothesis not satisfied: {names}")


@dataclass
class Gate:
    inequality: str
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return {"inequality": self.inequality, "passed": bool(self.passed), "detail": self.detail}


def _require(gates: list[Gate]) -> list[Gate]:
    failed = [g for g in gates if not g.passed]
    if failed:
        raise HypothesisError(failed)
    return gates


@dataclass
class ExperimentSpec:
    """A proposition id plus the full parsed configuration it runs on.

    ``config`` holds the same nested dict ``parse_config`` returns; the
    [experiment] section carries ladders, seeds and trial counts.
    """

    proposition: str
    config: dict
    threads: int = 1
    out_dir: str | None = None

    def __post_init__(self):
        if self.proposition not in PROPOSITIONS:
            raise ConfigurationError(f"unknown proposition {self.proposition!r}; choose from {list(PROPOSITIONS)}")
        self.config = copy.deepcopy(self.config)

    @classmethod
    def from_config(cls, cfg: dict, proposition: str | None = None, **kw) -> "ExperimentSpec":
        prop = proposition or cfg.get("experiment", {}).get("proposition")
        if prop is None:
            raise ConfigurationError("no proposition given ([experiment] proposition or argument)")
        cfg = copy.deepcopy(cfg)
        cfg.setdefault("experiment", {})["proposition"] = prop
        return cls(prop, cfg, **kw)

    def setting(self, key, default=None):
        return self.config.get("experiment", {}).get(key, default)

    @property
    def seed(self) -> int:
        return int(self.setting("seed", 0))


@dataclass
class VerdictReport:
    proposition: str
    hypothesis: list[Gate]
    trials: list[dict]
    verdict: str
    artifacts: list[str] = field(default_factory=list)
    config: str = ""
    notes: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.verdict == INCONSISTENT and not any(t.get("artifact") for t in self.trials
                                                    if t.get("status") == INCONSISTENT):
            raise ValueError("an inconsistent verdict needs a counter-trial artifact")

    def to_dict(self) -> dict:
        return {
            "proposition": self.proposition,
            "hypothesis": [g.to_dict() for g in self.hypothesis],
            "trials": self.trials,
            "verdict": self.verdict,
            "artifacts": self.artifacts,
            "config": self.config,
            "notes": self.notes,
        }

    def write(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(jsonable(self.to_dict()), fh, indent=2)


def jsonable(x):
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if np.isfinite(x) else str(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def write_json(path, obj) -> str:
    with open(path, "w") as fh:
        json.dump(jsonable(obj), fh, indent=2)
    return str(path)


def write_columns(path, columns: dict) -> str:
    """Plot data: one CSV column per key, rows padded with blanks."""
    keys = list(columns)
    cols = [list(np.ravel(columns[k])) if not isinstance(columns[k], list) else columns[k] for k in keys]
    n = max((len(c) for c in cols), default=0)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(keys)
        for i in range(n):
            w.writerow([_cell(c[i]) if i < len(c) else "" for c in cols])
    return str(path)


def _cell(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return x


# ---------------------------------------------------------------------------
# model plumbing


def _model_params(cfg: dict) -> dict:
    return dict(cfg.get("model", {}))


def _with_model(cfg: dict, **overrides) -> tuple[dict, ModelSpec]:
    cfg = copy.deepcopy(cfg)
    cfg.setdefault("model", {}).update({k: float(v) for k, v in overrides.items()})
    return cfg, model_from_config(cfg)


def _need_preset(cfg: dict, *allowed: str) -> dict:
    p = _model_params(cfg)
    if p.get("preset") not in allowed:
        raise ConfigurationError(f"this proposition needs [model] preset = {' or '.join(allowed)}")
    return p


# ---------------------------------------------------------------------------
# trials


class _Context:
    def __init__(self, spec: ExperimentSpec):
        self.spec = spec
        self.out = spec.out_dir or tempfile.mkdtemp(prefix="predprey-verify-")
        os.makedirs(self.out, exist_ok=True)
        self.artifacts: list[str] = []

    def path(self, name: str) -> str:
        return os.path.join(self.out, name)

    def map(self, fn, items):
        items = list(items)
        if self.spec.threads > 1 and len(items) > 1:
            with ThreadPoolExecutor(self.spec.threads) as ex:
                return list(ex.map(fn, items))
        return [fn(x) for x in items]


def _sim_settings(cfg: dict) -> dict:
    t = cfg.get("time", {})
    return {
        "t_end": float(cfg.get("experiment", {}).get("t_end", t.get("t_end", 500.0))),
        "dt": t.get("dt"),
        "dt_max": t.get("dt_max", 1.0),
        "scheme": t.get("scheme", "strang"),
    }


def _simulation_trials(ctx: _Context, model: ModelSpec, target: tuple[float, float], expected: str,
                       tol: float = 1e-6) -> list[dict]:
    cfg = ctx.spec.config
    grid = grid_from_config(cfg, default=(1, (1.0,), (201,)))
    sim = _sim_settings(cfg)
    n = int(ctx.spec.setting("n_ic", 10))
    ic_base = dict(cfg.get("ic", {}))
    ic_base.setdefault("kind", "random")

    def one(i):
        seed = ctx.spec.seed + i
        ic = InitialCondition(**{**ic_base, "seed": seed})
        mon = Monitors(target=target, record_every=int(cfg.get("time", {}).get("record_every", 50)))
        try:
            out = simulate(model, grid, ic, sim["t_end"], dt=sim["dt"], monitors=mon,
                           scheme=sim["scheme"], dt_max=sim["dt_max"])
        except pde.SimulationError as exc:
            return {"trial": i, "kind": "simulate", "seed": seed, "status": _EXHAUSTED, "error": str(exc)}, None
        dist = float(max(np.max(np.abs(out.u - target[0])), np.max(np.abs(out.v - target[1]))))
        if out.classification == pde.EXHAUSTED:
            status = _EXHAUSTED
        elif out.classification == expected and dist < tol:
            status = CONSISTENT
        else:
            status = INCONSISTENT
        row = {"trial": i, "kind": "simulate", "seed": seed, "status": status, "expected": expected,
               "target": list(target), "distance": dist, **out.summary()}
        return row, out

    results = ctx.map(one, range(n))
    rows = []
    for row, out in results:
        stem = f"trial_{row['trial']:03d}"
        if out is not None:
            hist = ctx.path(stem + "_history.csv")
            out.history_to_csv(hist)
            ctx.artifacts.append(hist)
            if row["status"] == INCONSISTENT:
                snap = ctx.path(stem + "_fields.csv")
                out.save_fields(snap, cfg.get("output", {}).get("snapshot_format", "csv"))
                ctx.artifacts.append(snap)
        row["artifact"] = write_json(ctx.path(stem + ".json"), row)
        ctx.artifacts.append(row["artifact"])
        rows.append(row)
    return rows


def _iterate_trial(ctx: _Context, model: ModelSpec, label: str, index: int) -> dict:
    it = ctx.spec.config.get("iterate", {})
    row = {"trial": index, "kind": "iterate", "label": label}
    try:
        box = construct_bounds(model, epsilon=it.get("epsilon"))
        K = estimate_lipschitz(model, box)
        tr = monotone_iterate(model, box, K, tol=it.get("tol", 1e-12), max_steps=int(it.get("max_steps", 1_000_000)))
    except (AssumptionViolation, BoundsConstructionError) as exc:
        row.update(status=INCONSISTENT, error=str(exc))
    except MonotonicityError as exc:
        row.update(status=INCONSISTENT, error=str(exc), step=exc.step)
    else:
        res = max(tr.residuals.values())
        row.update(tr.to_dict(), box=box.to_dict())
        if not tr.converged:
            row["status"] = _EXHAUSTED
        else:
            row["status"] = CONSISTENT if tr.unique and res < 1e-9 else INCONSISTENT
        csv_path = ctx.path(f"trial_{index:03d}_trace.csv")
        tr.to_csv(csv_path)
        ctx.artifacts.append(csv_path)
    row["artifact"] = write_json(ctx.path(f"trial_{index:03d}.json"), row)
    ctx.artifacts.append(row["artifact"])
    return row


def steady_strategies(cfg: dict):
    s = cfg.get("steady", {})
    return (
        Eigenmodes(int(s.get("modes", 5)), tuple(s.get("amplitudes", (0.01, 0.1, 0.3)))),
        Multistart(int(s.get("multistart", 20)), int(s.get("seed", 0))),
    )


def _steady_trial(ctx: _Context, model: ModelSpec, label: str, index: int, expect_positive: bool) -> dict:
    cfg = ctx.spec.config
    grid = grid_from_config(cfg)
    s = cfg.get("steady", {})
    sols = search_steady_states(model, grid, steady_strategies(cfg), tol=s.get("tol", 1e-10),
                                max_iters=int(s.get("max_iters", 50)), workers=ctx.spec.threads)
    pos = [x for x in sols if x.positive]
    nonconst = [x for x in pos if not x.constant]
    n_int = len(interior_equilibria(model))
    if expect_positive:
        ok = not nonconst and len(pos) == 1 and n_int == 1
    else:
        ok = not pos
    row = {
        "trial": index, "kind": "steady-search", "label": label, "status": CONSISTENT if ok else INCONSISTENT,
        "n_solutions": len(sols), "n_positive": len(pos), "n_nonconstant_positive": len(nonconst),
        "n_interior_equilibria": n_int, "solutions": [x.to_dict() for x in sols],
    }
    stem = f"trial_{index:03d}"
    if not ok:
        for j, x in enumerate(nonconst or pos):
            p = write_columns(ctx.path(f"{stem}_solution_{j}.csv"), {"u": x.U.ravel(), "v": x.V.ravel()})
            ctx.artifacts.append(p)
    row["artifact"] = write_json(ctx.path(stem + ".json"), row)
    ctx.artifacts.append(row["artifact"])
    return row


def _aggregate(trials: list[dict]) -> str:
    st = [t["status"] for t in trials]
    if any(s == _EXHAUSTED for s in st):
        return INCONCLUSIVE
    if any(s == INCONSISTENT for s in st):
        return INCONSISTENT
    return CONSISTENT if st else INCONCLUSIVE


def _ladder(ctx: _Context, values, run) -> tuple[list[dict], str]:
    """Walk the ladder until ``consecutive`` rungs in a row are consistent."""
    need = int(ctx.spec.setting("consecutive", 3))
    trials, streak = [], 0
    for i, val in enumerate(values):
        row = run(i, float(val))
        trials.append(row)
        streak = streak + 1 if row["status"] == CONSISTENT else 0
        if streak >= need:
            return trials, CONSISTENT
    if any(t["status"] == _EXHAUSTED for t in trials):
        return trials, INCONCLUSIVE
    if trials and trials[-1]["status"] == INCONSISTENT:
        return trials, INCONSISTENT
    return trials, INCONCLUSIVE


# ---------------------------------------------------------------------------
# individual statements


def _small_c_gates(model: ModelSpec, label: str = "c<c0", scale: float = 1.0) -> tuple[list[Gate], float]:
    try:
        cert = certify_small_c(model)
    except AssumptionViolation as exc:
        raise HypothesisError([Gate("small-conversion certificate", False, str(exc))]) from exc
    c0 = cert.c0
    value = model.c * scale
    return [Gate(label, value < c0 * scale, f"{value:.6g} vs {c0 * scale:.6g}")], c0


def _regime_small_c(ctx, model) -> tuple[list[dict], str]:
    eqs = interior_equilibria(model)
    if len(eqs) != 1:
        row = {"trial": 0, "kind": "equilibria", "status": INCONSISTENT, "n_interior": len(eqs)}
        row["artifact"] = write_json(ctx.path("trial_000.json"), row)
        return [row], INCONSISTENT
    target = (eqs[0].u, eqs[0].v)
    trials = [_iterate_trial(ctx, model, "monotone", 0)]
    sims = _simulation_trials(ctx, model, target, pde.CONSTANT)
    for r in sims:
        r["trial"] += 1
    trials += sims
    return trials, _aggregate(trials)


def _general_assumptions(model: ModelSpec, names) -> list[Gate]:
    rep = check_assumptions(model)
    return [Gate(n, rep.verdicts[n] == "pass", rep.verdicts[n]) for n in names], rep


def _cor_1(ctx):
    model = model_from_config(ctx.spec.config)
    gates, rep = _general_assumptions(model, ("A1", "A2", "A3"))
    _require(gates)
    gates.append(Gate("f(0)>d", model.f0 > rep.d, f"f(0)={model.f0:.6g}, d={rep.d:.6g}"))
    _require(gates)
    g2, c0 = _small_c_gates(model)
    gates += _require(g2)
    return gates, *_regime_small_c(ctx, model)


def _cor_2(ctx):
    model = model_from_config(ctx.spec.config)
    gates, rep = _general_assumptions(model, ("A1", "A2", "A3"))
    _require(gates)
    a = rep.a
    us = np.linspace(0, a, 100_001)
    fmax = float(np.max(model.fv(us)))
    gates.append(Gate("max f<d", fmax < rep.d, f"max f={fmax:.6g}, d={rep.d:.6g}"))
    _require(gates)
    trials = _simulation_trials(ctx, model, (0.0, rep.d), pde.PREDATOR_ONLY)
    return gates, trials, _aggregate(trials)


def _dl_params(ctx, *presets):
    p = _need_preset(ctx.spec.config, *presets)
    missing = [k for k in ("a", "b", "d", "m") if k not in p]
    if missing:
        raise ConfigurationError(f"[model] needs {missing}")
    return p


def _large_e(ctx, gates, expect_positive: bool):
    ladder = ctx.spec.setting("ladder", DEFAULT_E_LADDER)

    def run(i, e):
        _, model = _with_model(ctx.spec.config, e=e)
        return _steady_trial(ctx, model, f"e={e:g}", i, expect_positive)

    return gates, *_ladder(ctx, ladder, run)


def _p41(ctx, part, preset="dl"):
    p = _dl_params(ctx, preset)
    a, b, d = p["a"], p["b"], p["d"]
    if part == "a1":
        gates = _require([Gate("a>bd", a > b * d, f"a={a:g}, bd={b * d:g}")])
    else:
        gates = _require([Gate("a<bd", a < b * d, f"a={a:g}, bd={b * d:g}")])
    return _large_e(ctx, gates, part == "a1")


def _p42_b1(ctx):
    p = _dl_params(ctx, "dl")
    a, b, d, m = p["a"], p["b"], p["d"], p["m"]
    e = p.get("e")
    gates = _require([Gate("d<0", d < 0, f"d={d:g}")])
    e0 = -d * (1 + m * a) / a
    gates.append(Gate("e<-d(1+ma)/a", e is not None and 0 < e < e0, f"e={e}, bound={e0:.6g}"))
    _require(gates)
    model = model_from_config(ctx.spec.config)
    trials = _simulation_trials(ctx, model, (a, 0.0), pde.PREY_ONLY)
    return gates, trials, _aggregate(trials)


def _p42_b2(ctx, preset="dl"):
    p = _dl_params(ctx, preset)
    a, b, d = p["a"], p["b"], p["d"]
    gates = _require([Gate("0<d<a/b", 0 < d < a / b, f"d={d:g}, a/b={a / b:g}")])
    if "e" not in p:
        raise ConfigurationError("[model] needs e")
    model = model_from_config(ctx.spec.config)
    g2, c0 = _small_c_gates(model, "e<e0", scale=b)
    gates += _require(g2)
    return gates, *_regime_small_c(ctx, model)


def _p42_b3(ctx, preset="dl"):
    p = _dl_params(ctx, preset)
    a, b, d, m = p["a"], p["b"], p["d"], p["m"]
    thr = (a * m + 1) ** 2 / (4 * m * b)
    gates = _require([Gate("d>(am+1)²/(4mb)", d > thr, f"d={d:g}, (am+1)²/(4mb)={thr:.6g}")])
    ctx.spec.config["model"].setdefault("e", 1.0)
    model = model_from_config(ctx.spec.config)
    trials = _simulation_trials(ctx, model, (0.0, d), pde.PREDATOR_ONLY)
    return gates, trials, _aggregate(trials)


def _p43(ctx):
    p = _need_preset(ctx.spec.config, "dl")
    missing = [k for k in ("b", "d", "e", "m") if k not in p]
    if missing:
        raise ConfigurationError(f"[model] needs {missing}")
    b, d, e, m = p["b"], p["d"], p["e"], p["m"]
    gates = _require([Gate("d>0", d > 0, f"d={d:g}")])
    a1, a2, a3 = holling2_large_a_constants(b, d, e, m)
    a0 = max(a1, a2, a3)
    factor = float(ctx.spec.setting("a_factor", 1.1))
    if not factor > 1:
        raise ConfigurationError("a_factor must exceed 1 so that a>a0")
    a = factor * a0
    gates.append(Gate("a>a0", True, f"a0=max({a1:.6g}, {a2:.6g}, {a3:.6g})={a0:.6g}, a={a:.6g}"))
    ctx.spec.config["model"]["a"] = a
    model = model_from_config(ctx.spec.config)
    row = _iterate_trial(ctx, model, f"a={a:.6g}", 0)
    row["a0"] = a0
    return gates, [row], _aggregate([row])


def _p44(ctx):
    p = _dl_params(ctx, "dl")
    a, b, d = p["a"], p["b"], p["d"]
    if "e" not in p:
        raise ConfigurationError("[model] needs e")
    gates = _require([Gate("0<d<a/b", 0 < d < a / b, f"d={d:g}, a/b={a / b:g}")])
    ladder = ctx.spec.setting("ladder", DEFAULT_M_LADDER)

    def run(i, m):
        _, model = _with_model(ctx.spec.config, m=m)
        row = _iterate_trial(ctx, model, f"m={m:g}", i)
        row["m"] = m
        return row

    return gates, *_ladder(ctx, ladder, run)


def _p45(ctx):
    part = ctx.spec.setting("part")
    if part not in WEAK_ALLEE_PARTS:
        raise ConfigurationError(f"[experiment] part must be one of {list(WEAK_ALLEE_PARTS)}")
    if part in ("a1", "a2"):
        return _p41(ctx, part, preset="weak-allee")
    if part == "b2":
        return _p42_b2(ctx, preset="weak-allee")
    return _p42_b3(ctx, preset="weak-allee")


def _p46(ctx):
    p = _dl_params(ctx, "strong-allee")
    a, b, d, pp = p["a"], p["b"], p["d"], p.get("p", 0.0)
    gates = _require([Gate("a>b(d+p)", a > b * (d + pp), f"a={a:g}, b(d+p)={b * (d + pp):g}")])
    return _large_e(ctx, gates, True)


def _thm35(ctx, part):
    base = model_from_config(ctx.spec.config)
    gates, rep = _general_assumptions(base, ("A1'", "A2'", "A5"))
    _require(gates)
    v0, f0 = rep.v0, base.f0
    if part == 1:
        gates.append(Gate("f(0)>v0", f0 > v0, f"f(0)={f0:.6g}, v0={v0:.6g}"))
        gates.append(Gate("A4", rep.verdicts["A4"] == "pass", rep.verdicts["A4"]))
    else:
        gates.append(Gate("f(0)<v0", f0 < v0, f"f(0)={f0:.6g}, v0={v0:.6g}"))
        vs = np.linspace(0, v0, 10_001)[:-1]
        hmin = float(np.min(base.hv(vs))) if vs.size else np.inf
        gates.append(Gate("h(v)>0 for v<v0", hmin > 0, f"min h on [0,v0)={hmin:.6g}"))
    _require(gates)
    ladder = ctx.spec.setting("ladder", DEFAULT_E_LADDER)

    def run(i, c):
        return _steady_trial(ctx, base.replace(c=c), f"c={c:g}", i, part == 1)

    return gates, *_ladder(ctx, ladder, run)


_DISPATCH = {
    "cor-2.3-1": _cor_1,
    "cor-2.3-2": _cor_2,
    "prop-4.1-a1": lambda ctx: _p41(ctx, "a1"),
    "prop-4.1-a2": lambda ctx: _p41(ctx, "a2"),
    "prop-4.2-b1": _p42_b1,
    "prop-4.2-b2": _p42_b2,
    "prop-4.2-b3": _p42_b3,
    "prop-4.3": _p43,
    "prop-4.4": _p44,
    "prop-4.5-weakallee": _p45,
    "prop-4.6-strongallee": _p46,
    "thm-3.5-1": lambda ctx: _thm35(ctx, 1),
    "thm-3.5-2": lambda ctx: _thm35(ctx, 2),
}


def check_hypothesis(spec: ExperimentSpec) -> list[Gate]:
    """Evaluate the gates only (a run with zero trials and an empty ladder)."""
    dry = copy.deepcopy(spec.config)
    exp = dry.setdefault("experiment", {})
    exp["n_ic"] = 0
    exp["ladder"] = []
    ctx = _Context(ExperimentSpec(spec.proposition, dry, out_dir=tempfile.mkdtemp(prefix="predprey-dry-")))
    return _DISPATCH[spec.proposition](ctx)[0]


def verify_proposition(spec: ExperimentSpec) -> VerdictReport:
    ctx = _Context(spec)
    original = dump_config(spec.config)
    spec_copy = ExperimentSpec(spec.proposition, spec.config, spec.threads, ctx.out)
    ctx.spec = spec_copy
    gates, trials, verdict = _DISPATCH[spec.proposition](ctx)
    report = VerdictReport(spec.proposition, gates, trials, verdict, list(ctx.artifacts), original)
    path = ctx.path("verdict.json")
    report.artifacts.append(path)
    report.write(path)
    return report


# ---------------------------------------------------------------------------
# sweeps

SWEEP_EXPERIMENTS = ("equilibria", "simulate-classify", "steady-search")


def _parameter_targets(base: ModelSpec, name: str) -> list[str]:
    if name in ("c", "d1", "d2"):
        return []
    if name == "e":
        if "b" not in base.g.params:
            raise ConfigurationError("parameter 'e' needs a response family with parameter b")
        return []
    fams = {"f": base.f, "g": base.g, "h": base.h}
    if "." in name:
        role, key = name.split(".", 1)
        if role not in fams or key not in fams[role].params:
            raise ConfigurationError(f"invalid parameter name {name!r}")
        return [role]
    targets = [r for r, fam in fams.items() if name in fam.params]
    if not targets:
        raise ConfigurationError(f"invalid parameter name {name!r}")
    return targets


def apply_parameter(base: ModelSpec, name: str, value: float) -> ModelSpec:
    """Return ``base`` with one parameter changed.

    ``c``, ``d1``, ``d2`` act on the system; ``e`` sets c = e / b with b taken
    from the response family; ``f.x``/``g.x``/``h.x`` target one family; a
    bare family parameter is set in every family that has it, which keeps
    shared prey/response parameters in step.
    """
    targets = _parameter_targets(base, name)
    value = float(value)
    try:
        if name in ("c", "d1", "d2"):
            return base.replace(**{name: value})
        if name == "e":
            return base.replace(c=value / base.g.params["b"])
        key = name.split(".", 1)[-1]
        fams = {"f": base.f, "g": base.g, "h": base.h}
        return base.replace(**{r: fams[r].with_params(**{key: value}) for r in targets})
    except ValueError as exc:
        raise ConfigurationError(str(exc)) from exc


def _uniqueness_flag(model: ModelSpec) -> bool | None:
    try:
        box = construct_bounds(model)
        tr = monotone_iterate(model, box, estimate_lipschitz(model, box))
    except (AssumptionViolation, BoundsConstructionError):
        return None
    except MonotonicityError:
        return False
    return tr.unique


def parameter_sweep(
    base: ModelSpec,
    parameter: str,
    values,
    experiment: str,
    grid: pde.Grid | None = None,
    seed: int = 0,
    t_end: float = 200.0,
    strategies=None,
) -> list[dict]:
    if experiment not in SWEEP_EXPERIMENTS:
        raise ConfigurationError(f"unknown sweep experiment {experiment!r}; choose from {list(SWEEP_EXPERIMENTS)}")
    _parameter_targets(base, parameter)
    rows = []
    for val in values:
        model = apply_parameter(base, parameter, val)
        row: dict = {parameter: float(val), "c": model.c}
        if experiment == "equilibria":
            eqs = find_constant_equilibria(model)
            inter = [e for e in eqs if e.kind == "positive-interior"]
            row["n_interior"] = len(inter)
            row["interior_u"] = [e.u for e in inter]
            row["interior_v"] = [e.v for e in inter]
            row["unique_flag"] = _uniqueness_flag(model)
        elif experiment == "simulate-classify":
            g = grid or pde.build_grid(1, [1.0], [101])
            a = compute_prey_capacity(model)
            ic = InitialCondition("random", low=0.05 * a, high=a, seed=seed)
            out = simulate(model, g, ic, t_end)
            s = out.summary()
            row.update(classification=out.classification, t=s["t"], u_mean=s["u_mean"], v_mean=s["v_mean"],
                       u_std=float(np.std(out.u)), v_std=float(np.std(out.v)))
        else:
            g = grid or pde.build_grid(1, [1.0], [101])
            strat = strategies if strategies is not None else (Eigenmodes(), Multistart(20, seed))
            sols = search_steady_states(model, g, strat)
            pos = [x for x in sols if x.positive]
            row.update(
                n_solutions=len(sols),
                n_positive=len(pos),
                n_nonconstant_positive=sum(not x.constant for x in pos),
                harnack_u=max((x.harnack_u for x in pos), default=None),
                harnack_v=max((x.harnack_v for x in pos), default=None),
            )
        rows.append(row)
    return rows


def write_sweep_csv(path, rows: list[dict]) -> str:
    if not rows:
        with open(path, "w") as fh:
            fh.write("")
        return str(path)
    keys = list(rows[0])
    cols = {}
    for k in keys:
        cols[k] = [(";".join(repr(float(x)) for x in r[k]) if isinstance(r[k], list) else r[k]) for r in rows]
    return write_columns(path, cols)
