"""Acceptance criteria 1-10.  Each test prints one ``criterion N: PASS|FAIL`` line.

Run alone with ``pytest tests/test_acceptance.py -v -s`` or ``python tests/test_acceptance.py``.
"""

import math
import sys
import time
from contextlib import contextmanager
from fractions import Fraction

import numpy as np
import pytest
from scipy import optimize
from scipy.integrate import solve_ivp

from predprey_lab.equilibria import certify_small_c, holling2_large_a_constants, interior_equilibria
from predprey_lab.kinetics import FAMILIES, KineticsFamily, ModelSpec, dl_model, weak_allee_model
from predprey_lab.monotone import construct_bounds, estimate_lipschitz, monotone_iterate
from predprey_lab.pde import CONSTANT, PREDATOR_ONLY, InitialCondition, Monitors, apply_laplacian, build_grid, simulate
from predprey_lab.steady import Eigenmodes, Multistart, lyapunov_G, search_steady_states, steady_residual, transform_to_rho


@contextmanager
def criterion(n, capsys, budget=None):
    """Print PASS/FAIL for criterion ``n``; a runtime budget in seconds is part of the check."""
    t0 = time.perf_counter()
    info: dict = {}
    ok = False
    try:
        yield info
        ok = True
    finally:
        dt = time.perf_counter() - t0
        if ok and budget is not None and dt >= budget:
            ok = False
            info["budget"] = f"exceeded {budget}s"
        detail = ", ".join(f"{k}={v}" for k, v in info.items())
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'} ({dt:.2f}s) {detail}")
    if not ok:
        pytest.fail(f"criterion {n}: {info.get('budget', 'failed')}")


def holling(c=0.1, d=1.0, **kw):
    return dl_model(2.0, 1.0, d, c, 1.0, **kw)  # b = 1 so e = c


def scan_roots(model, a, n=100_000):
    xs = np.linspace(0.0, a, n + 1)
    H = model.H(xs)
    idx = np.nonzero(np.sign(H[:-1]) * np.sign(H[1:]) < 0)[0]
    return [optimize.bisect(model.H, xs[i], xs[i + 1], xtol=1e-15) for i in idx]


def test_criterion_1_equilibrium_oracle(capsys):
    with criterion(1, capsys, budget=1.0) as info:
        (e0,) = interior_equilibria(holling(0.0))
        err0 = abs(e0.u - (1 + math.sqrt(5)) / 2)
        assert err0 < 1e-10
        got = [e.u for e in interior_equilibria(holling(0.1))]
        ref = scan_roots(holling(0.1), 2.0)
        assert len(got) == len(ref) == 1
        err = abs(got[0] - ref[0])
        assert err < 1e-10
        info.update(golden_err=f"{err0:.1e}", scan_err=f"{err:.1e}")


def test_criterion_2_monotone_iteration(capsys):
    with criterion(2, capsys, budget=1.0) as info:
        base = holling(0.1)
        c0 = certify_small_c(base).c0
        for c in (0.1, 0.5 * c0, 0.9 * c0):
            model = base.replace(c=c)
            box = construct_bounds(model)
            tr = monotone_iterate(model, box, estimate_lipschitz(model, box))
            d = np.diff(tr.steps, axis=0)
            assert np.all(d[:, 0] <= 1e-13) and np.all(d[:, 2] <= 1e-13)
            assert np.all(d[:, 1] >= -1e-13) and np.all(d[:, 3] >= -1e-13)
            assert max(tr.residuals.values()) < 1e-9
            assert tr.unique
            (eq,) = interior_equilibria(model)
            assert abs(tr.limits["u_tilde"] - eq.u) < 1e-8 and abs(tr.limits["v_tilde"] - eq.v) < 1e-8
        info.update(c0=f"{c0:.4f}", steps=tr.n_steps)


def test_criterion_3_global_attractivity(capsys):
    with criterion(3, capsys, budget=60.0) as info:
        model = holling(0.1, d1=0.01, d2=0.01)
        grid = build_grid(1, [1.0], [201])
        (eq,) = interior_equilibria(model)
        worst = 0.0
        for seed in range(10):
            out = simulate(model, grid, InitialCondition("random", seed=seed), 500.0,
                           monitors=Monitors(target=(eq.u, eq.v)))
            dist = max(np.max(np.abs(out.u - eq.u)), np.max(np.abs(out.v - eq.v)))
            assert out.classification == CONSTANT and out.t <= 500 and dist < 1e-6
            worst = max(worst, dist)
        info.update(max_distance=f"{worst:.1e}")


def test_criterion_4_predator_takeover(capsys):
    with criterion(4, capsys, budget=60.0) as info:
        model = holling(1.0, d=3.0, d1=0.01, d2=0.01)
        assert (2 * 1 + 1) ** 2 / (4 * 1 * 1) == 2.25 < 3.0
        grid = build_grid(1, [1.0], [201])
        worst = 0.0
        for seed in range(10):
            out = simulate(model, grid, InitialCondition("random", seed=seed), 500.0)
            assert out.classification == PREDATOR_ONLY
            assert np.max(np.abs(out.u)) < 1e-6 and np.max(np.abs(out.v - 3.0)) < 1e-6
            worst = max(worst, float(np.max(np.abs(out.u))))
        info.update(max_u=f"{worst:.1e}")


def test_criterion_5_large_conversion(capsys):
    with criterion(5, capsys, budget=300.0) as info:
        grid = build_grid(1, [1.0], [101])
        strategies = (Eigenmodes(), Multistart(20, 0))
        counts = []
        for a in (2.0, 0.5):
            for e in (10.0, 50.0, 100.0):
                model = dl_model(a, 1.0, 1.0, e, 1.0, d1=0.1, d2=0.1)
                pos = [s for s in search_steady_states(model, grid, strategies) if s.positive]
                for s in pos:
                    assert np.std(s.U) < 1e-6 * np.mean(s.U) and np.std(s.V) < 1e-6 * np.mean(s.V)
                if a > 1.0:
                    assert len(pos) >= 1
                else:
                    assert not pos
                counts.append(len(pos))
        info.update(positive_counts=counts)


def test_criterion_6_bounds_box(capsys):
    with criterion(6, capsys) as info:
        model = holling(0.1, d1=0.01, d2=0.01)
        box = construct_bounds(model)
        grid = build_grid(1, [1.0], [201])
        entries = []
        for seed in range(5):
            out = simulate(model, grid, InitialCondition("random", seed=seed), 100.0,
                           monitors=Monitors(box=box, box_tol=1e-8, stop_on_steady=False, record_every=1000))
            assert out.t_box_entry is not None and out.t_box_exit is None
            assert box.contains(out.u, out.v, 1e-8)
            entries.append(round(out.t_box_entry, 3))
        info.update(entry_times=entries)


def test_criterion_7_kernels(capsys):
    with criterion(7, capsys) as info:
        # O(h^2) eigenfunction error
        errs = []
        for n in (51, 101, 201):
            g = build_grid(1, [1.0], [n])
            x = g.coords()[0]
            errs.append(np.max(np.abs(apply_laplacian(g, np.cos(np.pi * x)) + np.pi**2 * np.cos(np.pi * x))))
        ratios = [errs[i] / errs[i + 1] for i in range(2)]
        assert min(ratios) >= 3.5
        # zero-reaction mass conservation per step
        model = holling(0.1)
        g = build_grid(1, [1.0], [101])
        u, v = InitialCondition(seed=0).build(g)
        zero = lambda a, b: (np.zeros_like(a), np.zeros_like(b))  # noqa: E731
        drift = 0.0
        for _ in range(10):
            out = simulate(model, g, (u, v), 0.05, dt=0.05, reaction=zero, monitors=Monitors(stop_on_steady=False))
            drift = max(drift, abs(g.integrate(out.u) - g.integrate(u)) / g.integrate(u))
            u, v = out.u, out.v
        assert drift < 1e-12
        # analytic vs finite-difference kinetics derivatives
        worst = 0.0
        params = {
            "prey-holling2-logistic": {"a": 2.0, "b": 1.0, "m": 1.0}, "prey-richards": {"a": 2.0, "b": 1.0, "m": 1.0, "p": 2.0},
            "prey-weak-allee": {"a": 2.0, "b": 1.0, "m": 1.0, "p": 0.5}, "prey-logistic-ivlev": {"a": 2.0, "alpha": 1.0, "beta": 1.0},
            "prey-holling4-logistic": {"a": 2.0, "b": 1.0, "n": 1.0, "m": 1.0}, "holling2": {"b": 1.0, "m": 1.0},
            "holling4": {"b": 1.0, "n": 1.0, "m": 1.0}, "ivlev": {"alpha": 1.0, "beta": 1.0}, "logistic": {"d": 1.0},
            "weak-allee": {"d": 1.0, "p": 0.5}, "strong-allee": {"d": 1.0, "p": 0.5}, "rational-strong-allee": {"d": 1.0, "p": 0.5, "r": 1.0},
        }
        assert set(params) == set(FAMILIES)
        xs = np.linspace(0.05, 3.0, 40)
        for tag, p in params.items():
            fam = KineticsFamily(tag, p)
            fd = (fam(xs + 1e-6) - fam(xs - 1e-6)) / 2e-6
            worst = max(worst, float(np.max(np.abs(fd - fam.derivative(xs)) / np.maximum(1.0, np.abs(fam.derivative(xs))))))
        assert worst < 1e-6
        # constant data reproduce the reaction ODE
        gc = build_grid(1, [1.0], [11])
        out = simulate(model, gc, (np.full(11, 0.7), np.full(11, 1.3)), 10.0, dt=0.01,
                       monitors=Monitors(stop_on_steady=False, record_every=100_000))
        ref = solve_ivp(lambda _, y: model.reaction(y[0], y[1]), (0, 10), [0.7, 1.3], method="DOP853",
                        rtol=1e-12, atol=1e-14).y[:, -1]
        ode_err = max(abs(out.u[0] - ref[0]), abs(out.v[0] - ref[1]))
        assert ode_err < 1e-6
        info.update(ratios=[round(float(r), 2) for r in ratios], mass=f"{drift:.1e}", deriv=f"{worst:.1e}", ode=f"{ode_err:.1e}")


def test_criterion_8_lyapunov(capsys):
    with criterion(8, capsys, budget=1.0) as info:
        rng = np.random.default_rng(8)
        grid = build_grid(1, [1.0], [41])
        models = [
            holling(1.0, d1=0.3, d2=0.6),
            weak_allee_model(2.0, 1.0, 1.5, 0.6, 1.0, 1.0),
            ModelSpec(KineticsFamily("prey-logistic-ivlev", {"a": 3.0, "alpha": 1.0, "beta": 1.0}),
                      KineticsFamily("ivlev", {"alpha": 1.0, "beta": 1.0}),
                      KineticsFamily("rational-strong-allee", {"d": 1.0, "p": 0.2, "r": 1.0}), c=1.0),
        ]
        worst = -np.inf
        for model in models:
            t = transform_to_rho(model, 0.0)
            assert (t.w_star, t.v_star) == (-model.hv(model.f0) / model.g.derivative(0.0), model.f0)
            assert lyapunov_G(t, grid, np.full(41, t.w_star), np.full(41, t.v_star)) == 0.0
            for _ in range(100):
                W, V = rng.uniform(0.05, 4.0, 41), rng.uniform(0.05, 4.0, 41)
                G = lyapunov_G(t, grid, W, V)
                assert G < 0
                worst = max(worst, G)
        info.update(max_G=f"{worst:.3g}")


def test_criterion_9_transform_identity(capsys):
    with criterion(9, capsys) as info:
        rng = np.random.default_rng(9)
        grid = build_grid(1, [1.0], [51])
        model = holling(7.0, d1=0.2, d2=0.4)
        t = transform_to_rho(model)
        worst = 0.0
        for _ in range(100):
            U, V = rng.uniform(0.01, 3.0, 51), rng.uniform(0.01, 3.0, 51)
            ru, rv = steady_residual(model, grid, U, V)
            rw, rv2 = t.residual(grid, t.to_w(U), V)
            scale = 1.0 + np.max(np.abs(model.c * ru)) + np.max(np.abs(rv))
            err = max(np.max(np.abs(rw - model.c * ru)), np.max(np.abs(rv2 - rv))) / scale
            assert err < 1e-12
            worst = max(worst, err)
        info.update(max_rel_err=f"{worst:.1e}")


def test_criterion_10_thresholds(capsys):
    with criterion(10, capsys) as info:
        b, d, e, m = Fraction(2), Fraction(1, 3), Fraction(1), Fraction(1, 4)
        a1, a2, a3 = holling2_large_a_constants(b, d, e, m)
        assert a1 == b * (d + e / m) == Fraction(26, 3)
        assert a2 == max(b * (d + e / m), 1 / m) == Fraction(26, 3)
        assert a3 == (b * e + 1) / m == 12
        flags = []
        for (b, d, e, m) in ((1.0, 1.0, 1.0, 1.0), (2.0, 1 / 3, 1.0, 0.25), (1.0, 0.5, 3.0, 2.0)):
            a0 = max(holling2_large_a_constants(b, d, e, m))
            model = dl_model(1.1 * a0, b, d, e, m)
            box = construct_bounds(model)
            tr = monotone_iterate(model, box, estimate_lipschitz(model, box))
            assert tr.unique
            flags.append(tr.unique)
        info.update(a0=str(max(a1, a2, a3)), unique=flags)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-s"]))
