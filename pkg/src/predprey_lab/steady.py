"""Steady states of the discretised elliptic system.

Damped Newton, search strategies for nonconstant positive solutions, the
large-conversion rescaling w = c u, rho = 1/c, and diagnostics (Harnack
ratio, the rho = 0 Lyapunov functional).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from .equilibria import INTERIOR, find_constant_equilibria
from .kinetics import ModelSpec, a4_closed_form, compute_prey_capacity, compute_v0
from .pde import Grid, apply_laplacian, laplacian_matrix


class NewtonFailure(RuntimeError):
    def __init__(self, reason: str, trace: list[float]):
        super().__init__(f"Newton failed ({reason}) after {len(trace) - 1} iterations")
        self.reason = reason
        self.trace = trace


def _split(grid: Grid, x: np.ndarray):
    n = grid.size
    return x[:n].reshape(grid.shape), x[n:].reshape(grid.shape)


def steady_residual(model: ModelSpec, grid: Grid, U, V):
    """(d1 Lap U + g(U)(f(U) - V), d2 Lap V + V(h(V) + c g(U)))."""
    U = np.asarray(U, dtype=float)
    V = np.asarray(V, dtype=float)
    F, G = model.reaction(U, V)
    return model.d1 * apply_laplacian(grid, U) + F, model.d2 * apply_laplacian(grid, V) + G


def harnack_ratio(values) -> float:
    values = np.asarray(values, dtype=float)
    lo = float(values.min())
    if not lo > 0:
        raise ValueError("Harnack ratio needs a strictly positive field")
    return float(values.max()) / lo


def is_flat(values, tol: float = 1e-6) -> bool:
    values = np.asarray(values)
    return bool(np.std(values) < tol * (1 + abs(float(np.mean(values)))))


@dataclass
class SteadySolution:
    U: np.ndarray
    V: np.ndarray
    residual: float
    iterations: int
    constant: bool
    positivity: str  # "positive" or "semi-trivial"
    harnack_u: float | None
    harnack_v: float | None
    apriori_ok: bool
    c: float
    seed: str = ""
    trace: list[float] = field(default_factory=list)

    @property
    def positive(self) -> bool:
        return self.positivity == "positive"

    def to_dict(self) -> dict:
        return {
            "residual": self.residual,
            "iterations": self.iterations,
            "constant": self.constant,
            "positivity": self.positivity,
            "harnack_u": self.harnack_u,
            "harnack_v": self.harnack_v,
            "apriori_ok": self.apriori_ok,
            "c": self.c,
            "seed": self.seed,
            "u_mean": float(np.mean(self.U)),
            "v_mean": float(np.mean(self.V)),
            "u_std": float(np.std(self.U)),
            "v_std": float(np.std(self.V)),
        }


def _make_solution(model, U, V, res, its, seed="", trace=(), pos_tol=1e-8) -> SteadySolution:
    positive = U.min() > pos_tol and V.min() > pos_tol
    a = compute_prey_capacity(model)
    return SteadySolution(
        U, V, float(res), its,
        constant=is_flat(U) and is_flat(V),
        positivity="positive" if positive else "semi-trivial",
        harnack_u=harnack_ratio(U) if positive else None,
        harnack_v=harnack_ratio(V) if positive else None,
        apriori_ok=bool(U.max() <= a + 1e-6),
        c=model.c,
        seed=seed,
        trace=list(trace),
    )


def _jacobian(model: ModelSpec, L, U, V):
    Fu, Fv, Gu, Gv = (np.ravel(x) for x in model.jacobian(U.ravel(), V.ravel()))
    return sp.bmat(
        [[model.d1 * L + sp.diags(Fu), sp.diags(Fv)], [sp.diags(Gu), model.d2 * L + sp.diags(Gv)]],
        format="csc",
    )


def newton_solve(
    model: ModelSpec,
    grid: Grid,
    guess,
    tol: float = 1e-10,
    max_iters: int = 50,
    max_halvings: int = 30,
    seed: str = "",
) -> SteadySolution:
    """Damped Newton on the stacked residual; raises NewtonFailure."""
    U0, V0 = (np.array(x, dtype=float) for x in guess)
    for X in (U0, V0):
        if X.shape != grid.shape:
            raise ValueError("guess does not match the grid")
    if not (U0.min() > 0 and V0.min() > 0):
        raise ValueError("Newton guess must be strictly positive")
    L = laplacian_matrix(grid)

    def resid(x):
        U, V = _split(grid, x)
        ru, rv = steady_residual(model, grid, U, V)
        return np.concatenate([ru.ravel(), rv.ravel()])

    x = np.concatenate([U0.ravel(), V0.ravel()])
    r = resid(x)
    rn = float(np.max(np.abs(r)))
    trace = [rn]
    for it in range(max_iters + 1):
        if rn < tol:
            U, V = _split(grid, x)
            return _make_solution(model, U.copy(), V.copy(), rn, it, seed, trace)
        if it == max_iters:
            break
        U, V = _split(grid, x)
        with np.errstate(all="ignore"):
            dx = spsolve(_jacobian(model, L, U, V), -r)
        if not np.all(np.isfinite(dx)):
            raise NewtonFailure("singular-jacobian", trace)
        lam, went_negative = 1.0, False
        for _ in range(max_halvings + 1):
            xt = x + lam * dx
            with np.errstate(all="ignore"):
                rt = resid(xt)
            rtn = float(np.max(np.abs(rt)))
            if np.isfinite(rtn) and rtn < rn:
                if xt.min() >= 0:
                    break
                went_negative = True
            lam /= 2
        else:
            raise NewtonFailure("positivity-loss" if went_negative else "stagnation", trace)
        x, r, rn = xt, rt, rtn
        trace.append(rn)
    raise NewtonFailure("max-iterations", trace)


# ---------------------------------------------------------------------------
# search strategies


@dataclass
class Eigenmodes:
    modes: int = 5
    amplitudes: tuple[float, ...] = (0.01, 0.1, 0.3)


@dataclass
class Multistart:
    n: int = 20
    seed: int = 0


@dataclass
class Continuation:
    c_values: tuple[float, ...] = ()


@dataclass
class Branch:
    points: list[SteadySolution] = field(default_factory=list)
    failures: list[tuple[float, str]] = field(default_factory=list)


def _mode_shapes(grid: Grid, modes: int) -> list[np.ndarray]:
    X = grid.coords()
    out = []
    for j in range(1, modes + 1):
        for ax in range(grid.dimension):
            out.append(np.cos(j * np.pi * X[ax] / grid.lengths[ax]))
    return out


def _smooth_random(grid: Grid, rng, lo: float, hi: float, modes: int = 5) -> np.ndarray:
    base = rng.uniform(lo, hi)
    X = grid.coords()
    field_ = np.full(grid.shape, base)
    for j in range(1, modes + 1):
        for ax in range(grid.dimension):
            field_ += rng.uniform(-0.5, 0.5) * base / j * np.cos(j * np.pi * X[ax] / grid.lengths[ax])
    return np.maximum(field_, 0.05 * lo + 1e-3 * base)


def _candidates(model: ModelSpec, grid: Grid, strategies, equilibria) -> list[tuple[str, tuple]]:
    a = compute_prey_capacity(model)
    vscale = max(model.f0, compute_v0(model), 1e-3)
    interior = [e for e in equilibria if e.kind == INTERIOR]
    centres = [(e.u, e.v) for e in interior] or [
        (max(e.u, 0.05 * a), max(e.v, 0.05 * vscale)) for e in equilibria
    ]
    out = []
    for strat in strategies:
        if isinstance(strat, Eigenmodes):
            shapes = _mode_shapes(grid, strat.modes)
            for (u0, v0) in centres:
                for k, phi in enumerate(shapes):
                    for amp in strat.amplitudes:
                        for sgn in (1, -1):
                            U = u0 * (1 + sgn * amp * phi)
                            V = v0 * (1 + sgn * amp * phi)
                            out.append((f"mode{k}:amp{amp}:sign{sgn}", (U, V)))
        elif isinstance(strat, Multistart):
            rng = np.random.default_rng(strat.seed)
            for i in range(strat.n):
                U = _smooth_random(grid, rng, 0.01 * a, a)
                V = _smooth_random(grid, rng, 0.01 * vscale, 1.5 * vscale)
                out.append((f"multistart:{strat.seed}:{i}", (U, V)))
        elif isinstance(strat, Continuation):
            pass
        else:
            raise TypeError(f"unknown strategy {strat!r}")
    return out


def _dedup(sols: list[SteadySolution], tol: float) -> list[SteadySolution]:
    kept: list[SteadySolution] = []
    for s in sols:
        if not any(
            k.c == s.c and np.max(np.abs(k.U - s.U)) < tol and np.max(np.abs(k.V - s.V)) < tol for k in kept
        ):
            kept.append(s)
    return kept


def continue_in_c(model: ModelSpec, grid: Grid, start: SteadySolution, c_values, tol: float = 1e-10) -> Branch:
    """Natural-parameter continuation; stops at the first Newton failure."""
    br = Branch()
    U, V = start.U, start.V
    for c in c_values:
        try:
            sol = newton_solve(model.replace(c=float(c)), grid, (U, V), tol=tol, seed=f"continuation:c={c}")
        except (NewtonFailure, ValueError) as exc:
            br.failures.append((float(c), getattr(exc, "reason", str(exc))))
            break
        br.points.append(sol)
        U, V = sol.U, sol.V
    return br


def search_steady_states(
    model: ModelSpec,
    grid: Grid,
    strategies=(),
    tol: float = 1e-10,
    max_iters: int = 50,
    dedup_tol: float = 1e-6,
    workers: int = 1,
) -> list[SteadySolution]:
    """Constant-seeded solutions plus whatever the strategies find, deduplicated."""
    eqs = find_constant_equilibria(model)
    found: list[SteadySolution] = []
    for e in eqs:
        U = np.full(grid.shape, e.u)
        V = np.full(grid.shape, e.v)
        if e.kind == INTERIOR:
            try:
                found.append(newton_solve(model, grid, (U, V), tol=tol, max_iters=max_iters, seed=f"constant:{e.kind}"))
            except NewtonFailure:
                pass
        else:
            ru, rv = steady_residual(model, grid, U, V)
            res = max(np.max(np.abs(ru)), np.max(np.abs(rv)))
            if res < tol:
                found.append(_make_solution(model, U, V, res, 0, f"constant:{e.kind}"))

    cands = _candidates(model, grid, strategies, eqs)

    def run(item):
        label, guess = item
        try:
            return newton_solve(model, grid, guess, tol=tol, max_iters=max_iters, seed=label)
        except NewtonFailure:
            return None

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            results = list(ex.map(run, cands))
    else:
        results = [run(c) for c in cands]
    found.extend(r for r in results if r is not None)

    for strat in strategies:
        if isinstance(strat, Continuation) and strat.c_values:
            starts = [s for s in found if s.positive] or found
            if starts:
                br = continue_in_c(model, grid, starts[0], strat.c_values, tol)
                found.extend(br.points)
    return _dedup(found, dedup_tol)


# ---------------------------------------------------------------------------
# large conversion rescaling


@dataclass(frozen=True)
class TransformedModel:
    """Steady system in (w, v) = (c u, v) with rho = 1/c; rho = 0 is the c -> infinity limit."""

    model: ModelSpec
    rho: float

    def reaction(self, W, V):
        m = self.model
        s = self.rho * np.asarray(W, dtype=float)
        q = m.qv(s)
        return W * q * (m.fv(s) - V), V * (m.hv(V) + q * W)

    def residual(self, grid: Grid, W, V):
        Fw, Gv = self.reaction(W, V)
        m = self.model
        return m.d1 * apply_laplacian(grid, W) + Fw, m.d2 * apply_laplacian(grid, V) + Gv

    def to_w(self, U):
        return np.asarray(U, dtype=float) / self.rho

    def to_u(self, W):
        return self.rho * np.asarray(W, dtype=float)

    @property
    def w_star(self) -> float:
        m = self.model
        return -m.hv(m.f0) / m.g.derivative(0.0)

    @property
    def v_star(self) -> float:
        return self.model.f0


def transform_to_rho(model: ModelSpec, rho: float | None = None) -> TransformedModel:
    """Rescaled system at rho = 1/c (or at an explicit rho, e.g. 0)."""
    if rho is None:
        if not model.c > 0:
            raise ValueError("transform needs c > 0")
        rho = 1.0 / model.c
    if rho < 0:
        raise ValueError("rho must be >= 0")
    return TransformedModel(model, float(rho))


def _grad_log_energy(grid: Grid, X: np.ndarray) -> float:
    """Edge-based quadrature of |grad X|^2 / X^2, matched to the trapezoid-weighted Laplacian."""
    total = 0.0
    for ax, h in enumerate(grid.spacing):
        n = X.shape[ax]
        a = np.take(X, range(n - 1), axis=ax)
        b = np.take(X, range(1, n), axis=ax)
        e = (b - a) ** 2 / (a * b) / h
        if grid.dimension == 2:
            other = 1 - ax
            h2, n2 = grid.spacing[other], grid.points[other]
            w = np.full(n2, h2)
            w[0] = w[-1] = h2 / 2
            shape = [1, 1]
            shape[other] = n2
            e = e * w.reshape(shape)
        total += float(np.sum(e))
    return total


def lyapunov_G(tmodel: TransformedModel, grid: Grid, W, V) -> float:
    """Closed form of the rho = 0 functional

        -int [d1 w* |grad w|^2/w^2 + d2 v* |grad v|^2/v^2] + int (v - v*)(h(v) - h(v*))

    with (w*, v*) = (-h(f(0))/g'(0), f(0)).
    """
    m = tmodel.model
    W = np.asarray(W, dtype=float)
    V = np.asarray(V, dtype=float)
    if not (W.min() > 0 and V.min() > 0):
        raise ValueError("fields must be strictly positive")
    if not m.hv(m.f0) < 0:
        raise ValueError("requires h(f(0)) < 0")
    if not a4_closed_form(m.h, m.f0):
        raise ValueError("h does not satisfy the A4 sign condition at f(0)")
    ws, vs = tmodel.w_star, tmodel.v_star
    grad = m.d1 * ws * _grad_log_energy(grid, W) + m.d2 * vs * _grad_log_energy(grid, V)
    react = grid.integrate((V - vs) * (m.hv(V) - m.hv(vs)))
    return float(-grad + react)


def rho_zero_solution(model: ModelSpec) -> tuple[float, float]:
    t = transform_to_rho(model, 0.0)
    return t.w_star, t.v_star


__all__ = [
    "Branch", "Continuation", "Eigenmodes", "Multistart", "NewtonFailure", "SteadySolution",
    "TransformedModel", "continue_in_c", "harnack_ratio", "lyapunov_G", "newton_solve",
    "rho_zero_solution", "search_steady_states", "steady_residual", "transform_to_rho",
]
