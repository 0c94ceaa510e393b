"""Flat ``key = value`` configuration with ``[section]`` headers.

Every recognised key is listed in SCHEMA; anything else is rejected.  The
model is given either explicitly::

    [model]
    f = prey-holling2-logistic
    g = holling2
    h = logistic
    c = 0.1
    [f]
    a = 2
    b = 1
    m = 1
    [g]
    b = 1
    m = 1
    [h]
    d = 1

or through a preset of one of the concrete two-species models::

    [model]
    preset = dl
    a = 2
    b = 1
    d = 1
    e = 0.1
    m = 1
"""

from __future__ import annotations

import configparser
import io

from .kinetics import FAMILIES, KineticsFamily, ModelSpec, dl_model, strong_allee_model, weak_allee_model
from .pde import ConfigurationError, Grid, InitialCondition, Monitors, build_grid


def _floats(s: str) -> list[float]:
    return [float(x) for x in s.replace(";", ",").split(",") if x.strip()]


def _ints(s: str) -> list[int]:
    return [int(x) for x in s.replace(";", ",").split(",") if x.strip()]


def _bool(s: str) -> bool:
    if s.lower() in ("1", "true", "yes", "on"):
        return True
    if s.lower() in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


PRESETS = {
    "dl": ("a", "b", "d", "e", "m"),
    "weak-allee": ("a", "b", "d", "p", "e", "m", "beta"),
    "strong-allee": ("a", "b", "d", "p", "e", "m", "n", "beta"),
}

_MODEL_KEYS = {
    "preset": str, "f": str, "g": str, "h": str, "c": float, "d1": float, "d2": float,
    "a": float, "b": float, "d": float, "e": float, "m": float, "n": float, "p": float, "beta": float,
}
_PARAM_KEYS = {k: float for k in ("a", "b", "m", "n", "p", "gamma", "alpha", "beta", "d", "r")}

SCHEMA: dict[str, dict[str, type | object]] = {
    "model": _MODEL_KEYS,
    "f": _PARAM_KEYS,
    "g": _PARAM_KEYS,
    "h": _PARAM_KEYS,
    "grid": {"dimension": int, "lengths": _floats, "points": _ints},
    "time": {"t_end": float, "dt": float, "dt_max": float, "scheme": str, "record_every": int,
             "stop_on_steady": _bool},
    "ic": {"kind": str, "u": float, "v": float, "amplitude": float, "low": float, "high": float, "seed": int},
    "iterate": {"tol": float, "max_steps": int, "epsilon": float},
    "steady": {"modes": int, "amplitudes": _floats, "multistart": int, "seed": int, "tol": float,
               "max_iters": int, "continuation": _floats},
    "experiment": {"proposition": str, "part": str, "n_ic": int, "seed": int, "ladder": _floats,
                   "consecutive": int, "a_factor": float, "t_end": float},
    "sweep": {"parameter": str, "values": _floats, "experiment": str},
    "output": {"snapshot_format": str},
    "check": {"v_max": float, "samples": int},
    "dispersion": {"k_max": float, "n_k": int},
}


def parse_config(text: str) -> dict[str, dict]:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigurationError(str(exc)) from exc
    out: dict[str, dict] = {}
    for sec in cp.sections():
        if sec not in SCHEMA:
            raise ConfigurationError(f"unknown section [{sec}]")
        out[sec] = {}
        for key, raw in cp.items(sec):
            if key not in SCHEMA[sec]:
                raise ConfigurationError(f"unknown key {key!r} in [{sec}]")
            try:
                out[sec][key] = SCHEMA[sec][key](raw.strip())
            except ValueError as exc:
                raise ConfigurationError(f"[{sec}] {key}: {exc}") from exc
    return out


def load_config(path) -> dict[str, dict]:
    with open(path) as fh:
        return parse_config(fh.read())


def dump_config(cfg: dict[str, dict]) -> str:
    """Inverse of parse_config (values re-rendered with repr for floats)."""
    buf = io.StringIO()
    for sec, items in cfg.items():
        buf.write(f"[{sec}]\n")
        for k, v in items.items():
            if isinstance(v, (list, tuple)):
                v = ", ".join(repr(x) for x in v)
            elif isinstance(v, float):
                v = repr(v)
            elif isinstance(v, bool):
                v = "true" if v else "false"
            buf.write(f"{k} = {v}\n")
        buf.write("\n")
    return buf.getvalue()


def model_from_config(cfg: dict[str, dict]) -> ModelSpec:
    sec = dict(cfg.get("model", {}))
    if not sec:
        raise ConfigurationError("missing [model] section")
    diff = {k: sec.pop(k) for k in ("d1", "d2") if k in sec}
    preset = sec.pop("preset", None)
    try:
        if preset is not None:
            if preset not in PRESETS:
                raise ConfigurationError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
            allowed = set(PRESETS[preset])
            extra = set(sec) - allowed
            if extra:
                raise ConfigurationError(f"preset {preset!r} does not take {sorted(extra)}")
            for sub in ("f", "g", "h"):
                if sub in cfg:
                    raise ConfigurationError(f"[{sub}] cannot be combined with a preset")
            required = [k for k in PRESETS[preset] if k != "beta"]
            missing = [k for k in required if k not in sec]
            if missing:
                raise ConfigurationError(f"preset {preset!r} needs {missing}")
            build = {"dl": dl_model, "weak-allee": weak_allee_model, "strong-allee": strong_allee_model}[preset]
            return build(**sec, **diff)
        for k in ("f", "g", "h"):
            if k not in sec:
                raise ConfigurationError(f"[model] needs {k} (or a preset)")
            if sec[k] not in FAMILIES:
                raise ConfigurationError(f"unknown family {sec[k]!r}")
        extra = set(sec) - {"f", "g", "h", "c"}
        if extra:
            raise ConfigurationError(f"keys {sorted(extra)} need a preset")
        fams = {k: KineticsFamily(sec[k], cfg.get(k, {})) for k in ("f", "g", "h")}
        return ModelSpec(fams["f"], fams["g"], fams["h"], c=sec.get("c", 0.0), **diff)
    except ConfigurationError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(str(exc)) from exc


def preset_params(cfg: dict[str, dict]) -> tuple[str | None, dict]:
    sec = dict(cfg.get("model", {}))
    preset = sec.pop("preset", None)
    return preset, sec


def grid_from_config(cfg: dict[str, dict], default=(1, (1.0,), (101,))) -> Grid:
    sec = cfg.get("grid", {})
    dim = sec.get("dimension", default[0])
    lengths = sec.get("lengths", list(default[1]) if dim == default[0] else [1.0] * dim)
    points = sec.get("points", list(default[2]) if dim == default[0] else [51] * dim)
    return build_grid(dim, lengths, points)


def ic_from_config(cfg: dict[str, dict], seed: int | None = None) -> InitialCondition:
    sec = dict(cfg.get("ic", {}))
    if seed is not None:
        sec["seed"] = seed
    return InitialCondition(**sec)


def monitors_from_config(cfg: dict[str, dict], **kw) -> Monitors:
    sec = cfg.get("time", {})
    opts = {}
    if "record_every" in sec:
        opts["record_every"] = sec["record_every"]
    if "stop_on_steady" in sec:
        opts["stop_on_steady"] = sec["stop_on_steady"]
    opts.update(kw)
    return Monitors(**opts)
