"""Coupled constant upper/lower solutions and the monotone iteration between them."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import optimize

from .kinetics import AssumptionViolation, ModelSpec, check_assumptions, h_inverse


class BoundsConstructionError(RuntimeError):
    pass


class MonotonicityError(RuntimeError):
    """The iteration lost its ordering; K or the box is invalid."""

    def __init__(self, step: int, detail: str):
        super().__init__(f"monotonicity violated at step {step}: {detail}")
        self.step = step


@dataclass(frozen=True)
class BoundsBox:
    u_low: float
    v_low: float
    u_high: float
    v_high: float
    epsilon: float
    abar: float

    def contains(self, u, v, tol: float = 0.0) -> bool:
        u = np.asarray(u)
        v = np.asarray(v)
        return bool(
            np.all(u >= self.u_low - tol) and np.all(u <= self.u_high + tol)
            and np.all(v >= self.v_low - tol) and np.all(v <= self.v_high + tol)
        )

    def inequalities(self, model: ModelSpec) -> dict[str, float]:
        """The four sign conditions; the first two must be <= 0, the last two >= 0."""
        f, g, h, c = model.fv, model.gv, model.hv, model.c
        return {
            "f(u_high)-v_low": f(self.u_high) - self.v_low,
            "h(v_high)+c g(u_high)": h(self.v_high) + c * g(self.u_high),
            "f(u_low)-v_high": f(self.u_low) - self.v_high,
            "h(v_low)+c g(u_low)": h(self.v_low) + c * g(self.u_low),
        }

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _require_box_hypotheses(model: ModelSpec):
    rep = check_assumptions(model)
    missing = [n for n in ("A1", "A2", "A3") if rep.verdicts[n] != "pass"]
    if missing:
        raise AssumptionViolation(f"assumptions {missing} fail")
    a, d = rep.a, rep.d
    lhs, rhs = model.hv(model.f0), -model.c * model.gv(a)
    if not lhs < rhs:
        raise AssumptionViolation(f"h(f(0)) < -c g(a) fails: {lhs:.6g} >= {rhs:.6g}")
    return a, d


def _box_for(model: ModelSpec, a: float, d: float, eps: float) -> BoundsBox | None:
    if not 0 < eps < d:
        return None
    f = model.fv
    v_high = h_inverse(model, -model.c * model.gv(a + eps)) + eps
    if not model.f0 - v_high > 0:
        return None
    # f - v_high is positive on [0, abar] and negative on (abar, a]: take the last crossing
    xs = np.linspace(0.0, a, 4097)
    fx = np.asarray(f(xs)) - v_high
    i = int(np.nonzero(fx > 0)[0][-1])
    abar = float(optimize.brentq(lambda u: f(u) - v_high, xs[i], xs[i + 1], xtol=1e-15))
    return BoundsBox(abar / 2, d - eps, a + eps, v_high, eps, abar)


def construct_bounds(model: ModelSpec, epsilon: float | None = None, max_halvings: int = 60) -> BoundsBox:
    """Constant coupled upper/lower solutions.

    Without ``epsilon`` the largest value of d/2, d/4, ... satisfying
    eps < d and f(0) > h^{-1}(-c g(a+eps)) + eps is used.
    """
    a, d = _require_box_hypotheses(model)
    if epsilon is not None:
        box = _box_for(model, a, d, epsilon)
        if box is None:
            raise BoundsConstructionError(f"epsilon={epsilon} violates eps < d or f(0) > v_high")
    else:
        box = None
        eps = d / 2
        for _ in range(max_halvings):
            box = _box_for(model, a, d, eps)
            if box is not None:
                break
            eps /= 2
        if box is None:
            raise BoundsConstructionError("no epsilon on the geometric grid gives a valid box")
    ineq = box.inequalities(model)
    vals = list(ineq.values())
    if not (vals[0] <= 0 and vals[1] <= 1e-13 and vals[2] >= 0 and vals[3] >= 0):
        raise BoundsConstructionError(f"box inequalities fail: {ineq}")
    return box


def estimate_lipschitz(
    model: ModelSpec,
    box: BoundsBox,
    n: int = 200,
    jacobian: Callable | None = None,
    safety: float = 1.05,
    floor: float = 1e-8,
) -> float:
    """Safety factor times the sampled max row sum of |reaction Jacobian| over the box."""
    us = np.linspace(box.u_low, box.u_high, n)
    vs = np.linspace(box.v_low, box.v_high, n)
    U, V = np.meshgrid(us, vs, indexing="ij")
    Fu, Fv, Gu, Gv = (jacobian or model.jacobian)(U, V)
    row1 = np.abs(Fu) + np.abs(Fv)
    row2 = np.abs(Gu) + np.abs(Gv)
    K = safety * float(max(np.max(row1), np.max(row2)))
    return max(K, floor)


@dataclass
class IterationTrace:
    steps: np.ndarray  # rows (u_up, u_lo, v_up, v_lo)
    K: float
    converged: bool
    unique: bool
    residuals: dict[str, float] = field(default_factory=dict)
    tol: float = 0.0

    @property
    def n_steps(self) -> int:
        return len(self.steps) - 1

    @property
    def limits(self) -> dict[str, float]:
        uu, ul, vu, vl = self.steps[-1]
        return {"u_tilde": float(uu), "v_tilde": float(vu), "u_check": float(ul), "v_check": float(vl)}

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["step", "u_upper", "u_lower", "v_upper", "v_lower"])
            for i, row in enumerate(self.steps):
                w.writerow([i, *(repr(float(x)) for x in row)])

    def to_dict(self) -> dict:
        return {
            "K": self.K,
            "steps": self.n_steps,
            "converged": self.converged,
            "unique": self.unique,
            "limits": self.limits,
            "residuals": self.residuals,
            "tol": self.tol,
        }


def limit_residuals(model: ModelSpec, uu: float, ul: float, vu: float, vl: float) -> dict[str, float]:
    f, g, h, c = model.fv, model.gv, model.hv, model.c
    return {
        "f(u_tilde)-v_check": abs(f(uu) - vl),
        "h(v_tilde)+c g(u_tilde)": abs(h(vu) + c * g(uu)),
        "f(u_check)-v_tilde": abs(f(ul) - vu),
        "h(v_check)+c g(u_check)": abs(h(vl) + c * g(ul)),
    }


def monotone_iterate(
    model: ModelSpec,
    box: BoundsBox,
    K: float,
    tol: float = 1e-12,
    max_steps: int = 1_000_000,
    slack: float = 1e-13,
) -> IterationTrace:
    """Run the four coupled constant-state sequences from the box corners.

    Stops once successive changes and the geometric tail estimate both fall
    below ``tol``.
    """
    f, g, h, c = model.fv, model.gv, model.hv, model.c
    uu, ul, vu, vl = box.u_high, box.u_low, box.v_high, box.v_low
    rows = [(uu, ul, vu, vl)]
    converged = False
    prev_change = None
    for step in range(1, max_steps + 1):
        nuu = uu + g(uu) / K * (f(uu) - vl)
        nul = ul + g(ul) / K * (f(ul) - vu)
        nvu = vu + vu / K * (h(vu) + c * g(uu))
        nvl = vl + vl / K * (h(vl) + c * g(ul))
        if nuu > uu + slack or nvu > vu + slack or nul < ul - slack or nvl < vl - slack:
            raise MonotonicityError(step, f"sequence moved the wrong way: {(nuu, nul, nvu, nvl)}")
        if nul > nuu + slack or nvl > nvu + slack:
            raise MonotonicityError(step, f"lower passed upper: {(nuu, nul, nvu, nvl)}")
        change = max(abs(nuu - uu), abs(nul - ul), abs(nvu - vu), abs(nvl - vl))
        uu, ul, vu, vl = nuu, nul, nvu, nvl
        rows.append((uu, ul, vu, vl))
        if change < tol:
            rate = change / prev_change if prev_change else 0.0
            tail = change * rate / (1 - rate) if rate < 1 else np.inf
            if tail < tol:
                converged = True
                break
        prev_change = change
    res = limit_residuals(model, uu, ul, vu, vl)
    unique = converged and abs(uu - ul) < 10 * tol and abs(vu - vl) < 10 * tol
    return IterationTrace(np.array(rows), K, converged, bool(unique), res, tol)
