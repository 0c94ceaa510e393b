"""Finite differences on 1D/2D boxes with Neumann closure and IMEX time stepping."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.linalg import solve_banded

from .kinetics import ModelSpec
from .monotone import BoundsBox


class ConfigurationError(ValueError):
    pass


class SimulationError(RuntimeError):
    pass


@dataclass(frozen=True)
class Grid:
    dimension: int
    lengths: tuple[float, ...]
    points: tuple[int, ...]

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(L / (n - 1) for L, n in zip(self.lengths, self.points))

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self.points)

    @property
    def size(self) -> int:
        return int(np.prod(self.points))

    def axes(self) -> list[np.ndarray]:
        return [np.linspace(0.0, L, n) for L, n in zip(self.lengths, self.points)]

    def coords(self) -> list[np.ndarray]:
        return np.meshgrid(*self.axes(), indexing="ij")

    def weights(self) -> np.ndarray:
        """Trapezoid quadrature weights."""
        ws = []
        for h, n in zip(self.spacing, self.points):
            w = np.full(n, h)
            w[0] = w[-1] = h / 2
            ws.append(w)
        out = ws[0]
        for w in ws[1:]:
            out = np.multiply.outer(out, w)
        return out

    def integrate(self, values) -> float:
        return float(np.sum(self.weights() * values))

    def volume(self) -> float:
        return float(np.prod(self.lengths))

    def to_dict(self) -> dict:
        return {"dimension": self.dimension, "lengths": list(self.lengths), "points": list(self.points)}


def build_grid(dimension: int, lengths: Sequence[float], points: Sequence[int]) -> Grid:
    if dimension not in (1, 2):
        raise ConfigurationError("only 1D and 2D boxes are supported")
    lengths = tuple(float(x) for x in lengths)
    points = tuple(int(n) for n in points)
    if len(lengths) != dimension or len(points) != dimension:
        raise ConfigurationError("need one length and one point count per axis")
    if any(not L > 0 or not math.isfinite(L) for L in lengths):
        raise ConfigurationError("lengths must be positive")
    if any(n < 3 for n in points):
        raise ConfigurationError("need at least 3 points per axis")
    return Grid(dimension, lengths, points)


def _check_shape(grid: Grid, field_: np.ndarray):
    if np.shape(field_) != grid.shape:
        raise ValueError(f"field shape {np.shape(field_)} does not match grid {grid.shape}")


def apply_laplacian(grid: Grid, values) -> np.ndarray:
    """Second-order Laplacian with mirrored ghost values (u[-1] = u[1])."""
    values = np.asarray(values, dtype=float)
    _check_shape(grid, values)
    padded = np.pad(values, 1, mode="reflect")
    out = np.zeros_like(values)
    for ax, h in enumerate(grid.spacing):
        lo = [slice(1, -1)] * grid.dimension
        hi = [slice(1, -1)] * grid.dimension
        lo[ax] = slice(0, -2)
        hi[ax] = slice(2, None)
        out += (padded[tuple(lo)] - 2 * values + padded[tuple(hi)]) / h**2
    return out


def _lap1d(n: int, h: float) -> sp.csr_matrix:
    main = np.full(n, -2.0)
    up = np.ones(n - 1)
    lo = np.ones(n - 1)
    up[0] = 2.0
    lo[-1] = 2.0
    return sp.diags([lo, main, up], [-1, 0, 1], format="csr") / h**2


def laplacian_matrix(grid: Grid) -> sp.csr_matrix:
    """Sparse matrix of apply_laplacian acting on C-ordered flattened fields."""
    mats = [_lap1d(n, h) for n, h in zip(grid.points, grid.spacing)]
    if grid.dimension == 1:
        return mats[0]
    nx, ny = grid.points
    return (sp.kron(mats[0], sp.identity(ny)) + sp.kron(sp.identity(nx), mats[1])).tocsr()


def _implicit_banded(n: int, h: float, coef: float) -> np.ndarray:
    """Banded form of I - coef * L1 for solve_banded((1, 1), ...)."""
    r = coef / h**2
    ab = np.zeros((3, n))
    ab[1, :] = 1 + 2 * r
    ab[0, 1:] = -r
    ab[0, 1] = -2 * r
    ab[2, :-1] = -r
    ab[2, -2] = -2 * r
    return ab


def implicit_diffusion(grid: Grid, values: np.ndarray, coef: float) -> np.ndarray:
    """Backward-Euler diffusion step solving (I - coef L) x = values.

    1D is a single tridiagonal solve; in 2D the operator is split into
    alternating x- and y-direction tridiagonal sweeps.
    """
    if grid.dimension == 1:
        return solve_banded((1, 1), _implicit_banded(grid.points[0], grid.spacing[0], coef), values)
    (nx, ny), (hx, hy) = grid.points, grid.spacing
    x = solve_banded((1, 1), _implicit_banded(nx, hx, coef), values)
    return solve_banded((1, 1), _implicit_banded(ny, hy, coef), x.T).T


# ---------------------------------------------------------------------------
# initial conditions


@dataclass
class InitialCondition:
    """Recipe for initial fields.

    kind: "noise" (constant state times 1 + uniform noise of relative size
    ``amplitude``), "bump" (constant state plus a smooth cosine bump) or
    "random" (independent uniform values in [low, high] per point).
    """

    kind: str = "random"
    u: float = 1.0
    v: float = 1.0
    amplitude: float = 0.1
    low: float = 0.05
    high: float = 3.0
    seed: int = 0

    def build(self, grid: Grid) -> tuple[np.ndarray, np.ndarray]:
        rng = np.random.default_rng(self.seed)
        if self.kind == "noise":
            u = self.u * (1 + self.amplitude * rng.uniform(-1, 1, grid.shape))
            v = self.v * (1 + self.amplitude * rng.uniform(-1, 1, grid.shape))
        elif self.kind == "bump":
            bump = np.ones(grid.shape)
            for x, L in zip(grid.coords(), grid.lengths):
                bump = bump * np.cos(np.pi * x / L)
            u = self.u * (1 + self.amplitude * bump)
            v = self.v * (1 - self.amplitude * bump)
        elif self.kind == "random":
            u = rng.uniform(self.low, self.high, grid.shape)
            v = rng.uniform(self.low, self.high, grid.shape)
        else:
            raise ConfigurationError(f"unknown initial condition kind {self.kind!r}")
        return u, v


# ---------------------------------------------------------------------------
# simulation

CONSTANT = "converged-to-constant"
PREDATOR_ONLY = "converged-to-(0,v0)-type"
PREY_ONLY = "converged-to-(a,0)-type"
NONCONSTANT = "nonconstant-attractor-suspected"
EXHAUSTED = "budget-exhausted"


@dataclass
class Monitors:
    box: BoundsBox | None = None
    box_tol: float = 1e-8
    target: tuple[float, float] | None = None
    record_every: int = 10
    stop_on_steady: bool = True
    steady_tol: float = 1e-9
    flat_tol: float = 1e-6
    zero_tol: float = 1e-6


@dataclass
class SimOutcome:
    u: np.ndarray
    v: np.ndarray
    t: float
    classification: str
    steps: int
    rejections: int
    derivative_proxy: float
    t_box_entry: float | None = None
    t_box_exit: float | None = None
    u_range: tuple[float, float] = (math.inf, -math.inf)
    v_range: tuple[float, float] = (math.inf, -math.inf)
    history: list[dict] = field(default_factory=list)

    def summary(self) -> dict:
        return {
            "t": self.t,
            "classification": self.classification,
            "steps": self.steps,
            "rejections": self.rejections,
            "derivative_proxy": self.derivative_proxy,
            "t_box_entry": self.t_box_entry,
            "t_box_exit": self.t_box_exit,
            "u_range": list(self.u_range),
            "v_range": list(self.v_range),
            "u_mean": float(np.mean(self.u)),
            "v_mean": float(np.mean(self.v)),
            "u_sup": float(np.max(np.abs(self.u))),
        }

    def history_to_csv(self, path) -> None:
        if not self.history:
            return
        with open(path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(self.history[0]))
            w.writeheader()
            w.writerows(self.history)

    def save_fields(self, path, fmt: str = "csv") -> None:
        if fmt == "csv":
            np.savetxt(path, np.column_stack([self.u.ravel(), self.v.ravel()]), delimiter=",",
                       header="u,v", comments="")
        elif fmt == "bin":
            np.stack([self.u, self.v]).astype("<f8").tofile(path)
        else:
            raise ConfigurationError(f"unknown snapshot format {fmt!r}")


def classify(u, v, proxy: float, mon: Monitors) -> str:
    mu, mv = float(np.mean(u)), float(np.mean(v))
    flat = np.std(u) < mon.flat_tol * (1 + mu) and np.std(v) < mon.flat_tol * (1 + mv)
    if proxy < mon.steady_tol and flat:
        if mu < mon.zero_tol:
            return PREDATOR_ONLY
        if mv < mon.zero_tol:
            return PREY_ONLY
        return CONSTANT
    if proxy < 1e3 * mon.steady_tol and not flat:
        return NONCONSTANT
    return EXHAUSTED


def reaction_lipschitz(model: ModelSpec, u, v, n: int = 10) -> float:
    us = np.linspace(float(np.min(u)), float(np.max(u)), n)
    vs = np.linspace(float(np.min(v)), float(np.max(v)), n)
    U, V = np.meshgrid(us, vs, indexing="ij")
    Fu, Fv, Gu, Gv = model.jacobian(U, V)
    return float(max(np.max(np.abs(Fu) + np.abs(Fv)), np.max(np.abs(Gu) + np.abs(Gv))))


def _rk4(react, u, v, dt):
    k1u, k1v = react(u, v)
    k2u, k2v = react(u + dt / 2 * k1u, v + dt / 2 * k1v)
    k3u, k3v = react(u + dt / 2 * k2u, v + dt / 2 * k2v)
    k4u, k4v = react(u + dt * k3u, v + dt * k3v)
    return u + dt / 6 * (k1u + 2 * k2u + 2 * k3u + k4u), v + dt / 6 * (k1v + 2 * k2v + 2 * k3v + k4v)


def simulate(
    model: ModelSpec,
    grid: Grid,
    ic,
    t_end: float,
    dt: float | None = None,
    monitors: Monitors | None = None,
    scheme: str = "strang",
    reaction: Callable | None = None,
    dt_max: float = 1.0,
    max_halvings: int = 20,
) -> SimOutcome:
    """Integrate the reaction-diffusion system from ``ic``.

    Diffusion is always backward Euler.  ``scheme="strang"`` wraps it between
    two explicit RK4 half steps of the reaction; ``scheme="imex-euler"`` uses
    a single forward-Euler reaction step.  ``dt`` caps the step; the step is
    also held at 0.5 / (sampled reaction Lipschitz bound), refreshed every 100
    steps.  A step producing negative values is retried with half the step.
    """
    mon = monitors or Monitors()
    if isinstance(ic, InitialCondition):
        u, v = ic.build(grid)
    else:
        u, v = (np.array(x, dtype=float) for x in ic)
    _check_shape(grid, u)
    _check_shape(grid, v)
    if np.any(u < 0) or np.any(v < 0):
        raise ConfigurationError("initial data must be nonnegative")
    if not (np.any(u > 0) and np.any(v > 0)):
        raise ConfigurationError("initial data must not vanish identically")
    if scheme not in ("strang", "imex-euler"):
        raise ConfigurationError(f"unknown scheme {scheme!r}")
    react = reaction or model.reaction
    if reaction is not None and dt is None:
        raise ConfigurationError("a custom reaction needs an explicit dt")
    d1, d2 = model.d1, model.d2

    def step(u, v, h):
        if scheme == "strang":
            u, v = _rk4(react, u, v, h / 2)
            u, v = implicit_diffusion(grid, u, d1 * h), implicit_diffusion(grid, v, d2 * h)
            return _rk4(react, u, v, h / 2)
        ru, rv = react(u, v)
        return implicit_diffusion(grid, u + h * ru, d1 * h), implicit_diffusion(grid, v + h * rv, d2 * h)

    t, n, rejections = 0.0, 0, 0
    h = dt_max if dt is None else min(dt, dt_max)
    proxy = math.inf
    entered_at = exited_at = None
    u_rng = [float(u.min()), float(u.max())]
    v_rng = [float(v.min()), float(v.max())]
    history: list[dict] = []

    def record():
        row = {
            "time": t,
            "u_min": float(u.min()), "u_max": float(u.max()), "u_mean": float(u.mean()),
            "v_min": float(v.min()), "v_max": float(v.max()), "v_mean": float(v.mean()),
            "u_std": float(u.std()), "v_std": float(v.std()),
        }
        if mon.target is not None:
            row["distance"] = float(max(np.max(np.abs(u - mon.target[0])), np.max(np.abs(v - mon.target[1]))))
        history.append(row)

    record()
    if mon.box is not None and mon.box.contains(u, v, mon.box_tol):
        entered_at = 0.0
    while t < t_end * (1 - 1e-14):
        if n % 100 == 0:
            base = dt_max if dt is None else min(dt, dt_max)
            if reaction is None:
                L = reaction_lipschitz(model, u, v)
                base = min(base, 0.5 / L) if L > 0 else base
            h = base
        hh = min(h, t_end - t)
        for _ in range(max_halvings + 1):
            un, vn = step(u, v, hh)
            if not (np.all(np.isfinite(un)) and np.all(np.isfinite(vn))):
                raise SimulationError(f"non-finite values at t={t:.6g}")
            if un.min() >= 0 and vn.min() >= 0:
                break
            rejections += 1
            hh /= 2
        else:
            raise SimulationError(f"positivity lost at t={t:.6g} after {max_halvings} halvings")
        proxy = max(float(np.max(np.abs(un - u))), float(np.max(np.abs(vn - v)))) / hh
        u, v = un, vn
        t += hh
        n += 1
        u_rng = [min(u_rng[0], float(u.min())), max(u_rng[1], float(u.max()))]
        v_rng = [min(v_rng[0], float(v.min())), max(v_rng[1], float(v.max()))]
        if mon.box is not None:
            inside = mon.box.contains(u, v, mon.box_tol)
            if entered_at is None and inside:
                entered_at = t
            elif entered_at is not None and not inside and exited_at is None:
                exited_at = t
        if n % mon.record_every == 0:
            record()
        if mon.stop_on_steady and proxy < mon.steady_tol:
            if classify(u, v, proxy, mon) != EXHAUSTED and classify(u, v, proxy, mon) != NONCONSTANT:
                break
    if not history or history[-1]["time"] != t:
        record()
    return SimOutcome(
        u, v, t, classify(u, v, proxy, mon), n, rejections, proxy, entered_at, exited_at,
        tuple(u_rng), tuple(v_rng), history,
    )
