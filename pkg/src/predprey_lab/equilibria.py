"""Constant equilibria, linearisation and the explicit conversion-rate thresholds."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .kinetics import AssumptionViolation, ModelSpec, check_assumptions, compute_prey_capacity, h_inverse, h_roots

INTERIOR = "positive-interior"
PREY_ONLY = "prey-only"
PREDATOR_ONLY = "predator-only"
EXTINCTION = "extinction"


@dataclass
class Equilibrium:
    u: float
    v: float
    kind: str
    jacobian: np.ndarray
    degenerate: bool = False

    def to_dict(self) -> dict:
        return {
            "u": self.u,
            "v": self.v,
            "kind": self.kind,
            "jacobian": self.jacobian.tolist(),
            "degenerate": self.degenerate,
        }


def reaction_jacobian(model: ModelSpec, u: float, v: float) -> np.ndarray:
    Fu, Fv, Gu, Gv = model.jacobian(u, v)
    return np.array([[Fu, Fv], [Gu, Gv]], dtype=float)


def _refine_root(model: ModelSpec, lo: float, hi: float) -> float:
    x = optimize.bisect(model.H, lo, hi, xtol=1e-12, rtol=4 * np.finfo(float).eps, maxiter=200)
    # Newton polish, kept only while it improves and stays in the bracket
    for _ in range(3):
        dh = model.dH(x)
        if dh == 0:
            break
        y = x - model.H(x) / dh
        if not lo <= y <= hi or abs(model.H(y)) > abs(model.H(x)):
            break
        x = y
    return float(x)


def find_constant_equilibria(model: ModelSpec, n_scan: int = 10_000) -> list[Equilibrium]:
    """All constant equilibria: interior roots of H on (0, a) followed by the boundary states."""
    a = compute_prey_capacity(model)
    xs = np.linspace(0.0, a, n_scan + 1)
    Hx = np.asarray(model.H(xs))
    roots: list[tuple[float, bool]] = []
    for i in range(1, n_scan):
        if Hx[i] == 0.0:
            roots.append((float(xs[i]), False))
    for i in range(n_scan):
        if Hx[i] == 0.0 or Hx[i + 1] == 0.0:
            continue
        if np.sign(Hx[i]) != np.sign(Hx[i + 1]):
            roots.append((_refine_root(model, xs[i], xs[i + 1]), False))
    # tangential touches: local minima of |H| with no sign change
    absH = np.abs(Hx)
    for i in range(1, n_scan):
        if absH[i] <= absH[i - 1] and absH[i] <= absH[i + 1] and absH[i] < 1e-6:
            if np.sign(Hx[i - 1]) == np.sign(Hx[i + 1]) == np.sign(Hx[i]) != 0:
                res = optimize.minimize_scalar(lambda x: abs(model.H(x)), bounds=(xs[i - 1], xs[i + 1]),
                                               method="bounded", options={"xatol": 1e-14})
                if abs(model.H(res.x)) < 1e-10:
                    roots.append((float(res.x), True))
    roots.sort()
    out = []
    for u, degen in roots:
        if not 0 < u < a:
            continue
        v = float(model.fv(u))
        out.append(Equilibrium(u, v, INTERIOR, reaction_jacobian(model, u, v), degenerate=degen))
    out.append(Equilibrium(a, 0.0, PREY_ONLY, reaction_jacobian(model, a, 0.0)))
    for r in h_roots(model):
        if r > 0:
            out.append(Equilibrium(0.0, float(r), PREDATOR_ONLY, reaction_jacobian(model, 0.0, r)))
    out.append(Equilibrium(0.0, 0.0, EXTINCTION, reaction_jacobian(model, 0.0, 0.0)))
    return out


def interior_equilibria(model: ModelSpec, n_scan: int = 10_000) -> list[Equilibrium]:
    return [e for e in find_constant_equilibria(model, n_scan) if e.kind == INTERIOR]


# ---------------------------------------------------------------------------
# dispersion relation


@dataclass
class DispersionReport:
    k: np.ndarray
    eigenvalues: np.ndarray  # shape (n_k, 2), sorted by descending real part
    turing_unstable: bool
    band: tuple[float, float] | None

    @property
    def growth_rate(self) -> np.ndarray:
        return self.eigenvalues.real.max(axis=1)


def _eig_sorted(mats: np.ndarray) -> np.ndarray:
    ev = np.linalg.eigvals(mats)
    order = np.argsort(-ev.real, axis=-1, kind="stable")
    return np.take_along_axis(ev, order, axis=-1)


def dispersion(model: ModelSpec, eq: Equilibrium, k_max: float, n_k: int = 200) -> DispersionReport:
    """Eigenvalues of J - diag(d1, d2) k^2 on a uniform wavenumber grid starting at 0."""
    F, G = model.reaction(eq.u, eq.v)
    if max(abs(F), abs(G)) > 1e-8:
        raise ValueError(f"({eq.u}, {eq.v}) is not an equilibrium (residual {max(abs(F), abs(G)):.2e})")
    J = reaction_jacobian(model, eq.u, eq.v)
    k = np.linspace(0.0, k_max, n_k)
    D = np.diag([model.d1, model.d2])
    mats = J[None, :, :] - k[:, None, None] ** 2 * D[None, :, :]
    ev = _eig_sorted(mats)
    growth = ev.real.max(axis=1)
    stable0 = growth[0] < 0
    unstable = k[1:][growth[1:] > 0]
    turing = bool(stable0 and unstable.size > 0)
    band = (float(unstable.min()), float(unstable.max())) if unstable.size else None
    return DispersionReport(k, ev, turing, band)


# ---------------------------------------------------------------------------
# small conversion rate certificate


@dataclass
class SmallCCertificate:
    c1: float
    left: float  # lambda-bar (case I) or lambda-tilde (case II)
    right: float  # right end of the sampling interval, normally a
    ratio: float
    c0: float
    case: str
    delta: float = 1e-3
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def certify_small_c(model: ModelSpec, delta: float = 1e-3, n_samples: int = 10_000) -> SmallCCertificate:
    """Computable conversion-rate bound below which the constant box iteration has a unique limit.

    c1 is the supremum of c with h(f(0)) < -c g(a).  The ratio is
    min [h(f(u))]' / max g'(u) over [left, a], where left solves
    f(left) = h^{-1}(-c1 g(a)) (monotone f) or f(left) = f(0) beyond the
    maximiser (hump-shaped f).
    """
    rep = check_assumptions(model, n_samples=n_samples)
    missing = [n for n in ("A1", "A2", "A3") if rep.verdicts[n] != "pass"]
    if missing:
        raise AssumptionViolation(f"assumptions {missing} fail")
    f, g, h = model.f, model.g, model.h
    a, d, f0 = rep.a, rep.d, model.f0
    if not h(f0) < 0:
        raise AssumptionViolation(f"h(f(0)) < 0 fails: f(0) = {f0} <= d = {d}")
    ga = g(a)
    c1 = -h(f0) / ga
    notes = []
    if rep.f_case == "I":
        target = h_inverse(model, -c1 * ga)
        left = 0.0 if f0 <= target else float(optimize.brentq(lambda u: f(u) - target, 0.0, a, xtol=1e-14))
    else:
        lam = rep.lam
        left = float(optimize.brentq(lambda u: f(u) - f0, lam + 1e-15 * a, a, xtol=1e-14))

    def sampled_ratio(lo, hi):
        us = np.linspace(lo, hi, n_samples + 1)
        hf = np.asarray(h.derivative(f(us)) * f.derivative(us))
        return hf.min(), np.asarray(g.derivative(us)).max()

    right = a
    mn, mx = sampled_ratio(left, right)
    if mn <= 0:
        # limits satisfy f(u) > d, so the interval can stop where f falls to d
        right = float(optimize.brentq(lambda u: f(u) - d, left, a, xtol=1e-14))
        notes.append("interval truncated at f(u) = d because [h(f)]' <= 0 on [left, a]")
        mn, mx = sampled_ratio(left, right)
    ratio = mn / mx
    if ratio <= 0:
        raise AssumptionViolation("min [h(f)]' is not positive on the certification interval")
    c0 = (1 - delta) * min(c1, ratio)
    return SmallCCertificate(float(c1), left, right, float(ratio), float(c0), rep.f_case, delta, notes)


# ---------------------------------------------------------------------------
# Holling-II large prey-capacity threshold


def holling2_large_a_constants(b, d, e, m):
    """(a1, a2, a3) for the logistic-predator Holling-II model; exact for Fraction inputs."""
    for name, x in (("b", b), ("d", d), ("e", e), ("m", m)):
        if not x > 0:
            raise ValueError(f"{name} must be positive, got {x}")
    a1 = b * (d + e / m)
    a2 = max(b * (d + e / m), 1 / m)
    a3 = (b * e + 1) / m
    return a1, a2, a3


def holling2_large_a_threshold(b, d, e, m):
    return max(holling2_large_a_constants(b, d, e, m))
