"""Closed-form kinetics for the general diffusive predator-prey system

    u_t = d1 Lap u + g(u) (f(u) - v)
    v_t = d2 Lap v + v (h(v) + c g(u))

with Neumann boundary conditions.  ``f`` is the prey growth factor (so that
``f g`` is the prey growth rate without predators), ``g`` the functional
response, ``h`` the per-capita predator growth rate and ``c`` the conversion
rate.  Every family here is one of a fixed list; there is no expression
parsing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Mapping

import numpy as np
from scipy import optimize


class DomainError(ValueError):
    """Raised for negative or non-finite arguments."""


class AssumptionViolation(ValueError):
    """Raised when a model does not satisfy a structural precondition."""


# ---------------------------------------------------------------------------
# helper functions with removable singularities at 0


def _phi(x):
    """x / (1 - exp(-x)), equal to 1 at x = 0."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-2
    xs = np.where(small, 1.0, x)
    out = np.where(small, 1.0 + x / 2 + x**2 / 12 - x**4 / 720, xs / -np.expm1(-xs))
    return out


def _dphi(x):
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-2
    xs = np.where(small, 1.0, x)
    den = -np.expm1(-xs)
    big = (den - xs * np.exp(-xs)) / den**2
    return np.where(small, 0.5 + x / 6 - x**3 / 180, big)


def _psi(x):
    """(1 - exp(-x)) / x, equal to 1 at x = 0."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-2
    xs = np.where(small, 1.0, x)
    return np.where(small, 1 - x / 2 + x**2 / 6 - x**3 / 24 + x**4 / 120, -np.expm1(-xs) / xs)


def _dpsi(x):
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-2
    xs = np.where(small, 1.0, x)
    big = (np.exp(-xs) * (xs + 1) - 1) / xs**2
    return np.where(small, -0.5 + x / 3 - x**2 / 8 + x**3 / 30, big)


# ---------------------------------------------------------------------------
# family table


@dataclass(frozen=True)
class _Family:
    role: str  # "f", "g" or "h"
    params: tuple[str, ...]
    defaults: Mapping[str, float]
    value: Callable
    deriv: Callable
    validate: Callable[[Mapping[str, float]], None]


def _positive(p, *names):
    for n in names:
        if not p[n] > 0:
            raise ValueError(f"parameter {n} must be > 0, got {p[n]}")


def _nonneg(p, *names):
    for n in names:
        if not p[n] >= 0:
            raise ValueError(f"parameter {n} must be >= 0, got {p[n]}")


# prey growth factors f(u)

def _f_h2(p, u):
    return p["gamma"] * (1 + p["m"] * u) * (p["a"] - u) / p["b"]


def _df_h2(p, u):
    return p["gamma"] * (p["m"] * (p["a"] - u) - (1 + p["m"] * u)) / p["b"]


def _f_rich(p, u):
    return p["gamma"] * (1 + p["m"] * u) * (p["a"] - u ** p["p"]) / p["b"]


def _df_rich(p, u):
    a, m, e = p["a"], p["m"], p["p"]
    return p["gamma"] * (m * (a - u**e) - (1 + m * u) * e * u ** (e - 1)) / p["b"]


def _f_wallee(p, u):
    return p["gamma"] * (1 + p["m"] * u) * (p["a"] - u) * (u + p["p"]) / p["b"]


def _df_wallee(p, u):
    a, m, q = p["a"], p["m"], p["p"]
    return p["gamma"] * (m * (a - u) * (u + q) + (1 + m * u) * (a - q - 2 * u)) / p["b"]


def _f_ivlev(p, u):
    # gamma u (a-u) / (alpha (1 - e^{-beta u})); the u = 0 value a gamma/(alpha beta) falls out of _phi
    s = _phi(p["beta"] * u) / p["beta"]
    return p["gamma"] / p["alpha"] * (p["a"] - u) * s


def _df_ivlev(p, u):
    s = _phi(p["beta"] * u) / p["beta"]
    return p["gamma"] / p["alpha"] * (-s + (p["a"] - u) * _dphi(p["beta"] * u))


def _f_h4(p, u):
    return p["gamma"] * (1 + p["n"] * u + p["m"] * u**2) * (p["a"] - u) / p["b"]


def _df_h4(p, u):
    n, m, a = p["n"], p["m"], p["a"]
    return p["gamma"] * ((n + 2 * m * u) * (a - u) - (1 + n * u + m * u**2)) / p["b"]


# functional responses g(u) and q(u) = g(u)/u

def _g_h2(p, u):
    return p["b"] * u / (1 + p["m"] * u)


def _dg_h2(p, u):
    return p["b"] / (1 + p["m"] * u) ** 2


def _q_h2(p, u):
    return p["b"] / (1 + p["m"] * u)


def _dq_h2(p, u):
    return -p["b"] * p["m"] / (1 + p["m"] * u) ** 2


def _g_h4(p, u):
    return p["b"] * u / (1 + p["n"] * u + p["m"] * u**2)


def _dg_h4(p, u):
    den = 1 + p["n"] * u + p["m"] * u**2
    return p["b"] * (1 - p["m"] * u**2) / den**2


def _q_h4(p, u):
    return p["b"] / (1 + p["n"] * u + p["m"] * u**2)


def _dq_h4(p, u):
    den = 1 + p["n"] * u + p["m"] * u**2
    return -p["b"] * (p["n"] + 2 * p["m"] * u) / den**2


def _g_iv(p, u):
    return -p["alpha"] * np.expm1(-p["beta"] * u)


def _dg_iv(p, u):
    return p["alpha"] * p["beta"] * np.exp(-p["beta"] * u)


def _q_iv(p, u):
    return p["alpha"] * p["beta"] * _psi(p["beta"] * u)


def _dq_iv(p, u):
    return p["alpha"] * p["beta"] ** 2 * _dpsi(p["beta"] * u)


# predator per-capita growth h(v)

def _h_log(p, v):
    return p["beta"] * (p["d"] - v)


def _dh_log(p, v):
    return -p["beta"] * np.ones_like(np.asarray(v, dtype=float))


def _h_wa(p, v):
    return p["beta"] * (p["d"] - v) * (v + p["p"])


def _dh_wa(p, v):
    return p["beta"] * (p["d"] - p["p"] - 2 * v)


def _h_sa(p, v):
    return p["beta"] * (p["d"] - v) * (v - p["p"])


def _dh_sa(p, v):
    return p["beta"] * (p["d"] + p["p"] - 2 * v)


def _h_rsa(p, v):
    return p["beta"] * (p["d"] - v) * (v - p["p"]) / (v + p["r"])


def _dh_rsa(p, v):
    d, q, r = p["d"], p["p"], p["r"]
    num = (d + q - 2 * v) * (v + r) - (d - v) * (v - q)
    return p["beta"] * num / (v + r) ** 2


def _val_h2(p):
    _positive(p, "a", "b", "gamma")
    _nonneg(p, "m")


def _val_rich(p):
    _val_h2(p)
    if not p["p"] >= 1:
        raise ValueError("Richards exponent p must be >= 1")


def _val_wallee_f(p):
    _positive(p, "a", "b", "p", "gamma")
    _nonneg(p, "m")
    if not p["a"] > p["p"]:
        raise ValueError("weak-Allee prey requires a > p")


def _val_ivlev_f(p):
    _positive(p, "a", "gamma", "alpha", "beta")


def _val_h4(p):
    _positive(p, "a", "b", "n", "m", "gamma")


def _val_g_h2(p):
    _positive(p, "b")
    _nonneg(p, "m")


def _val_g_h4(p):
    _positive(p, "b", "n", "m")


def _val_g_iv(p):
    _positive(p, "alpha", "beta")


def _val_h_log(p):
    # d may be zero or negative: the predator then cannot persist on other food
    _positive(p, "beta")
    if not math.isfinite(p["d"]):
        raise ValueError("d must be finite")


def _val_h_wa(p):
    _positive(p, "beta", "d", "p")
    if not p["d"] > p["p"]:
        raise ValueError("weak-Allee h requires d > p > 0")


def _val_h_sa(p):
    _positive(p, "beta", "d", "p")


def _val_h_rsa(p):
    _positive(p, "beta", "d", "p", "r")


FAMILIES: dict[str, _Family] = {
    "prey-holling2-logistic": _Family("f", ("a", "b", "m", "gamma"), {"gamma": 1.0}, _f_h2, _df_h2, _val_h2),
    "prey-richards": _Family("f", ("a", "b", "m", "gamma", "p"), {"gamma": 1.0, "p": 1.0}, _f_rich, _df_rich, _val_rich),
    "prey-weak-allee": _Family("f", ("a", "b", "m", "p", "gamma"), {"gamma": 1.0}, _f_wallee, _df_wallee, _val_wallee_f),
    "prey-logistic-ivlev": _Family("f", ("a", "alpha", "beta", "gamma"), {"gamma": 1.0}, _f_ivlev, _df_ivlev, _val_ivlev_f),
    "prey-holling4-logistic": _Family("f", ("a", "b", "n", "m", "gamma"), {"gamma": 1.0}, _f_h4, _df_h4, _val_h4),
    "holling2": _Family("g", ("b", "m"), {}, _g_h2, _dg_h2, _val_g_h2),
    "holling4": _Family("g", ("b", "n", "m"), {}, _g_h4, _dg_h4, _val_g_h4),
    "ivlev": _Family("g", ("alpha", "beta"), {}, _g_iv, _dg_iv, _val_g_iv),
    "logistic": _Family("h", ("beta", "d"), {"beta": 1.0}, _h_log, _dh_log, _val_h_log),
    "weak-allee": _Family("h", ("beta", "d", "p"), {"beta": 1.0}, _h_wa, _dh_wa, _val_h_wa),
    "strong-allee": _Family("h", ("beta", "d", "p"), {"beta": 1.0}, _h_sa, _dh_sa, _val_h_sa),
    "rational-strong-allee": _Family("h", ("beta", "d", "p", "r"), {"beta": 1.0}, _h_rsa, _dh_rsa, _val_h_rsa),
}

_Q = {"holling2": (_q_h2, _dq_h2), "holling4": (_q_h4, _dq_h4), "ivlev": (_q_iv, _dq_iv)}

# f family -> (paired g family, shared parameter names)
PAIRINGS = {
    "prey-holling2-logistic": ("holling2", ("b", "m")),
    "prey-richards": ("holling2", ("b", "m")),
    "prey-weak-allee": ("holling2", ("b", "m")),
    "prey-logistic-ivlev": ("ivlev", ("alpha", "beta")),
    "prey-holling4-logistic": ("holling4", ("b", "n", "m")),
}


def _wrap(x):
    x = np.asarray(x, dtype=float)
    return x


def _out(y):
    y = np.asarray(y, dtype=float)
    return float(y) if y.ndim == 0 else y


@dataclass(frozen=True)
class KineticsFamily:
    """One closed-form family with its parameters.

    ``check=False`` skips the parameter constraints; it exists for building
    deliberately broken instances in tests.
    """

    tag: str
    params: Mapping[str, float]
    check: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        if self.tag not in FAMILIES:
            raise ValueError(f"unknown kinetics family {self.tag!r}")
        fam = FAMILIES[self.tag]
        p = dict(fam.defaults)
        for k, val in self.params.items():
            if k not in fam.params:
                raise ValueError(f"family {self.tag!r} has no parameter {k!r}")
            p[k] = float(val)
        missing = [k for k in fam.params if k not in p]
        if missing:
            raise ValueError(f"family {self.tag!r} is missing parameters {missing}")
        object.__setattr__(self, "params", p)
        if self.check:
            fam.validate(p)

    @property
    def role(self) -> str:
        return FAMILIES[self.tag].role

    def __call__(self, x):
        return _out(FAMILIES[self.tag].value(self.params, _wrap(x)))

    def derivative(self, x):
        return _out(FAMILIES[self.tag].deriv(self.params, _wrap(x)))

    def with_params(self, **updates) -> "KineticsFamily":
        p = dict(self.params)
        p.update(updates)
        return KineticsFamily(self.tag, p, check=self.check)


@dataclass(frozen=True)
class ModelSpec:
    """A full instance of the reaction-diffusion system."""

    f: KineticsFamily
    g: KineticsFamily
    h: KineticsFamily
    c: float
    d1: float = 1.0
    d2: float = 1.0

    def __post_init__(self):
        for fam, role in ((self.f, "f"), (self.g, "g"), (self.h, "h")):
            if fam.role != role:
                raise ValueError(f"{fam.tag!r} is not an {role}-family")
        if not self.c >= 0 or not math.isfinite(self.c):
            raise ValueError(f"conversion rate must be >= 0, got {self.c}")
        if not (self.d1 > 0 and self.d2 > 0):
            raise ValueError("diffusion coefficients must be positive")
        if self.f.check and self.g.check:
            gtag, shared = PAIRINGS[self.f.tag]
            if self.g.tag != gtag:
                raise ValueError(f"prey family {self.f.tag!r} pairs with {gtag!r}, not {self.g.tag!r}")
            for k in shared:
                if self.f.params[k] != self.g.params[k]:
                    raise ValueError(f"f and g disagree on shared parameter {k}")

    def replace(self, **kw) -> "ModelSpec":
        from dataclasses import replace

        return replace(self, **kw)

    # kinetics evaluation (vectorised, no domain checks)
    def fv(self, u):
        return self.f(u)

    def gv(self, u):
        return self.g(u)

    def hv(self, v):
        return self.h(v)

    def qv(self, u):
        return _out(_Q[self.g.tag][0](self.g.params, _wrap(u)))

    def dq(self, u):
        return _out(_Q[self.g.tag][1](self.g.params, _wrap(u)))

    def H(self, u):
        return self.h(self.f(u)) + self.c * self.g(u)

    def dH(self, u):
        return self.h.derivative(self.f(u)) * self.f.derivative(u) + self.c * self.g.derivative(u)

    def reaction(self, u, v):
        gu = self.g(u)
        return gu * (self.f(u) - v), v * (self.h(v) + self.c * gu)

    def jacobian(self, u, v):
        """Entries (F_u, F_v, G_u, G_v) of the reaction Jacobian."""
        gu, dgu = self.g(u), self.g.derivative(u)
        fu = self.f(u)
        hv = self.h(v)
        Fu = dgu * (fu - v) + gu * self.f.derivative(u)
        Fv = -gu
        Gu = self.c * v * dgu
        Gv = hv + self.c * gu + v * self.h.derivative(v)
        return Fu, Fv, Gu, Gv

    @property
    def f0(self) -> float:
        return self.f(0.0)

    @cached_property
    def capacity(self) -> float:
        return compute_prey_capacity(self)

    @cached_property
    def v0(self) -> float:
        return compute_v0(self)


# ---------------------------------------------------------------------------
# public evaluation API


def _check_domain(x):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("argument must be finite")
    if np.any(arr < 0):
        raise DomainError("argument must be >= 0")
    return arr


def eval_kinetics(model: ModelSpec, which: str, x):
    """Value of f, g, h or q at ``x >= 0``."""
    _check_domain(x)
    if which == "f":
        return model.fv(x)
    if which == "g":
        return model.gv(x)
    if which == "h":
        return model.hv(x)
    if which == "q":
        return model.qv(x)
    raise ValueError(f"which must be one of f, g, h, q; got {which!r}")


def eval_derivative(model: ModelSpec, which: str, x):
    _check_domain(x)
    if which == "f":
        return model.f.derivative(x)
    if which == "g":
        return model.g.derivative(x)
    if which == "h":
        return model.h.derivative(x)
    if which == "q":
        return model.dq(x)
    raise ValueError(f"which must be one of f, g, h, q; got {which!r}")


def eval_H(model: ModelSpec, u):
    """H(u) = h(f(u)) + c g(u); its zeros in (0, a) are the interior equilibria."""
    _check_domain(u)
    return model.H(u)


def compute_prey_capacity(model: ModelSpec) -> float:
    """The unique positive zero ``a`` of f."""
    f = model.f
    if not f(0.0) > 0:
        raise AssumptionViolation("f(0) <= 0: no positive prey capacity")
    hi = 1.0
    while f(hi) > 0:
        hi *= 2
        if hi > 1e8:
            raise AssumptionViolation("f has no sign change on [0, 1e8]")
    # first + to - crossing on a fine scan
    xs = np.linspace(0.0, hi, 2049)
    fx = np.asarray(f(xs))
    idx = int(np.argmax(fx <= 0))
    lo_, hi_ = xs[idx - 1], xs[idx]
    if fx[idx] == 0:
        return float(hi_)
    root = optimize.brentq(f, lo_, hi_, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    if abs(f(root)) >= 1e-12:
        raise AssumptionViolation(f"capacity root residual {abs(f(root)):.3e} too large")
    return float(root)


def h_roots(model_or_h) -> list[float]:
    """Nonnegative roots of h in increasing order."""
    h = model_or_h.h if isinstance(model_or_h, ModelSpec) else model_or_h
    p = h.params
    if h.tag == "logistic":
        roots = [p["d"]]
    elif h.tag == "weak-allee":
        roots = [-p["p"], p["d"]]
    else:
        roots = [p["p"], p["d"]]
    return sorted({r for r in roots if r >= 0})


def compute_v0(model: ModelSpec) -> float:
    """Largest nonnegative root of h, or 0 when h has none."""
    roots = h_roots(model)
    return max(roots) if roots else 0.0


def h_inverse(model: ModelSpec, y: float) -> float:
    """Inverse of h on its decreasing tail [v0, inf); requires y <= 0."""
    h = model.h
    lo = compute_v0(model)
    if y > 0:
        raise ValueError("h inverse on the tail is only defined for y <= 0")
    if h(lo) == y:
        return lo
    hi = max(1.0, 2 * lo)
    while h(hi) > y:
        hi *= 2
    return float(optimize.brentq(lambda v: h(v) - y, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps))


# ---------------------------------------------------------------------------
# assumption validators

PASS, FAIL, NA = "pass", "fail", "not-applicable"


@dataclass
class AssumptionReport:
    verdicts: dict[str, str]
    witnesses: dict[str, list[float]]
    a: float | None = None
    lam: float | None = None
    d: float | None = None
    v0: float | None = None
    envelope: dict | None = None
    f_case: str | None = None  # "I" or "II" when A1 passes

    def passes(self, *names: str) -> bool:
        return all(self.verdicts.get(n) == PASS for n in names)

    def to_dict(self) -> dict:
        return {
            "verdicts": dict(self.verdicts),
            "witnesses": {k: list(map(float, v)) for k, v in self.witnesses.items()},
            "a": self.a,
            "lambda": self.lam,
            "d": self.d,
            "v0": self.v0,
            "f_case": self.f_case,
            "envelope": self.envelope,
        }


def h_envelope(h: KineticsFamily) -> dict:
    """Exponents and lower/upper coefficients with sum k v^q <= -h(v) <= sum kbar v^q."""
    p = h.params
    b = p["beta"]
    if h.tag == "logistic":
        return {"q": [0.0, 1.0], "k": [-b * p["d"], b], "kbar": [-b * p["d"], b]}
    if h.tag == "weak-allee":
        k = [-b * p["d"] * p["p"], b * (p["p"] - p["d"]), b]
        return {"q": [0.0, 1.0, 2.0], "k": k, "kbar": list(k)}
    if h.tag == "strong-allee":
        k = [b * p["d"] * p["p"], -b * (p["d"] + p["p"]), b]
        return {"q": [0.0, 1.0, 2.0], "k": k, "kbar": list(k)}
    # -h = beta [v - (d+p+r) + (d+r)(p+r)/(v+r)] and the last term lies in (0, (d+r)(p+r)/r]
    d, q, r = p["d"], p["p"], p["r"]
    return {"q": [0.0, 1.0], "k": [-b * (d + q + r), b], "kbar": [b * d * q / r, b]}


def a4_closed_form(h: KineticsFamily, f0: float) -> bool:
    """Exact condition for [h(v) - h(f0)](v - f0) < 0 on v > 0, v != f0."""
    p = h.params
    if h.tag == "logistic":
        return True
    if h.tag == "weak-allee":
        return f0 > p["d"] - p["p"]
    if h.tag == "strong-allee":
        return f0 > p["d"] + p["p"]
    d, q, r = p["d"], p["p"], p["r"]
    return f0 > (d * q + d * r + q * r) / r


def a4_sampled(h: KineticsFamily, f0: float, v_max: float, n: int = 10_000) -> list[float]:
    """Sample points in (0, v_max] violating the A4 sign condition."""
    v = np.linspace(0, v_max, n + 1)[1:]
    v = v[np.abs(v - f0) > 1e-9 * max(1.0, f0)]
    s = (h(v) - h(f0)) * (v - f0)
    return list(v[s >= 0])


def check_assumptions(model: ModelSpec, v_max: float | None = None, n_samples: int = 10_000) -> AssumptionReport:
    """Evaluate every structural assumption on ``model``; failures are verdicts."""
    f, g, h = model.f, model.g, model.h
    verdicts: dict[str, str] = {}
    wit: dict[str, list[float]] = {}
    v0 = compute_v0(model)
    rep = AssumptionReport(verdicts, wit, v0=v0)

    # A1' / A1
    try:
        a = compute_prey_capacity(model)
    except AssumptionViolation:
        a = None
    f0 = f(0.0)
    if v_max is None:
        v_max = 2 * max(v0, f0, 1.0)
    top = max(2 * (a or 1.0), 2 * v0, v_max)
    u = np.linspace(0.0, top, n_samples + 1)
    if a is None:
        verdicts["A1'"] = verdicts["A1"] = FAIL
        wit["A1'"] = [0.0]
    else:
        rep.a = a
        fu = np.asarray(f(u))
        bad = u[((u < a) & (fu <= 0)) | ((u > a * (1 + 1e-12)) & (fu >= 0))]
        verdicts["A1'"] = PASS if bad.size == 0 else FAIL
        wit["A1'"] = list(bad[:10])
        verdicts["A1"] = verdicts["A1'"]
        if verdicts["A1'"] == PASS:
            ui = u[(u > 0) & (u <= a)]
            if ui[-1] < a:
                ui = np.append(ui, a)
            dfi = np.asarray(f.derivative(ui))
            if np.all(dfi < 0):
                rep.f_case = "I"
            else:
                # one + to - crossing of f'; a single sample may sit exactly on the maximizer
                pos, neg = dfi > 0, dfi < 0
                k = int(np.argmin(pos))
                ok = pos[0] and np.all(pos[:k]) and (neg[k] or dfi[k] == 0) and np.all(neg[k + 1:])
                if not ok:
                    verdicts["A1"] = FAIL
                    wit["A1"] = list(ui[k:][~neg[k:]][:10])
                else:
                    left = ui[k - 1]
                    rep.lam = float(optimize.brentq(f.derivative, left, ui[k], xtol=1e-14)) if dfi[k] != 0 else float(ui[k])
                    rep.f_case = "II"

    # A2 / A2'
    g0 = g(0.0)
    dg = np.asarray(g.derivative(u))
    gu = np.asarray(g(u))
    zero_ok = abs(g0) < 1e-14
    verdicts["A2"] = PASS if zero_ok and np.all(dg > 0) else FAIL
    if verdicts["A2"] == FAIL:
        wit["A2"] = list(u[dg <= 0][:10])
    ok2 = zero_ok and g.derivative(0.0) > 0 and np.all(gu[1:] > 0)
    verdicts["A2'"] = PASS if ok2 else FAIL

    # A3: unique positive zero d, h' < 0 beyond it
    hp = h.params
    if h.tag == "logistic":
        a3 = hp["d"] > 0
    elif h.tag == "weak-allee":
        a3 = True
    else:
        a3 = False
        wit["A3"] = [0.0]  # h(0) < 0
    verdicts["A3"] = PASS if a3 else FAIL
    if a3:
        rep.d = hp["d"]

    # A4
    if f0 > 0:
        verdicts["A4"] = PASS if a4_closed_form(h, f0) else FAIL
        if verdicts["A4"] == FAIL:
            wit["A4"] = a4_sampled(h, f0, top, n_samples)[:10]
    else:
        verdicts["A4"] = NA

    # A5
    env = h_envelope(h)
    rep.envelope = env
    v = np.linspace(0.0, top, n_samples + 1)
    mh = -np.asarray(h(v))
    lo = sum(k * v**q for k, q in zip(env["k"], env["q"]))
    hi = sum(k * v**q for k, q in zip(env["kbar"], env["q"]))
    slack = 1e-10 * (1 + np.abs(mh))
    bad = v[(lo > mh + slack) | (mh > hi + slack)]
    shape_ok = env["q"][0] == 0 and env["q"][-1] > 0.5 and env["k"][-1] > 0 and env["kbar"][-1] > 0
    verdicts["A5"] = PASS if shape_ok and bad.size == 0 else FAIL
    if bad.size:
        wit["A5"] = list(bad[:10])
    return rep


# ---------------------------------------------------------------------------
# convenience builders for the concrete models


def dl_model(a, b, d, e, m, d1=1.0, d2=1.0) -> ModelSpec:
    """Holling-II prey-predator with logistic predator; conversion c = e/b."""
    return ModelSpec(
        f=KineticsFamily("prey-holling2-logistic", {"a": a, "b": b, "m": m}),
        g=KineticsFamily("holling2", {"b": b, "m": m}),
        h=KineticsFamily("logistic", {"beta": 1.0, "d": d}),
        c=e / b,
        d1=d1,
        d2=d2,
    )


def weak_allee_model(a, b, d, p, e, m, beta=1.0, d1=1.0, d2=1.0) -> ModelSpec:
    """Holling-II response with weak-Allee predator growth beta (d-v)(v+p)."""
    return ModelSpec(
        f=KineticsFamily("prey-holling2-logistic", {"a": a, "b": b, "m": m}),
        g=KineticsFamily("holling2", {"b": b, "m": m}),
        h=KineticsFamily("weak-allee", {"beta": beta, "d": d, "p": p}),
        c=e / b,
        d1=d1,
        d2=d2,
    )


def strong_allee_model(a, b, d, p, e, m, n, beta=1.0, d1=1.0, d2=1.0) -> ModelSpec:
    """Holling-IV response with strong-Allee predator growth beta (d-v)(v-p)."""
    return ModelSpec(
        f=KineticsFamily("prey-holling4-logistic", {"a": a, "b": b, "n": n, "m": m}),
        g=KineticsFamily("holling4", {"b": b, "n": n, "m": m}),
        h=KineticsFamily("strong-allee", {"beta": beta, "d": d, "p": p}),
        c=e / b,
        d1=d1,
        d2=d2,
    )
