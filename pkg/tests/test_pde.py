import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from predprey_lab.equilibria import interior_equilibria
from predprey_lab.kinetics import dl_model
from predprey_lab.monotone import construct_bounds
from predprey_lab.pde import (
    CONSTANT,
    EXHAUSTED,
    PREDATOR_ONLY,
    PREY_ONLY,
    ConfigurationError,
    InitialCondition,
    Monitors,
    SimulationError,
    apply_laplacian,
    build_grid,
    implicit_diffusion,
    laplacian_matrix,
    simulate,
)


def eigen_error(n, dim=1, k=2):
    grid = build_grid(dim, [1.0] * dim, [n] * dim)
    X = grid.coords()
    phi = np.ones(grid.shape)
    for x in X:
        phi = phi * np.cos(k * np.pi * x)
    exact = -dim * (k * np.pi) ** 2 * phi
    return np.max(np.abs(apply_laplacian(grid, phi) - exact))


@pytest.mark.parametrize("dim", [1, 2])
def test_laplacian_second_order(dim):
    n = [21, 41, 81] if dim == 2 else [51, 101, 201, 401]
    errs = [eigen_error(x, dim) for x in n]
    for e1, e2 in zip(errs, errs[1:]):
        assert e1 / e2 >= 3.5


def test_matrix_matches_stencil(rng):
    for grid in (build_grid(1, [2.0], [17]), build_grid(2, [1.0, 3.0], [9, 13])):
        X = rng.uniform(size=grid.shape)
        np.testing.assert_allclose((laplacian_matrix(grid) @ X.ravel()).reshape(grid.shape),
                                   apply_laplacian(grid, X), atol=1e-9)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(3, 60), L=st.floats(0.1, 10), seed=st.integers(0, 10_000))
def test_weighted_sum_of_laplacian_vanishes(n, L, seed):
    grid = build_grid(1, [L], [n])
    X = np.random.default_rng(seed).uniform(size=grid.shape)
    lap = apply_laplacian(grid, X)
    assert abs(grid.integrate(lap)) <= 1e-12 * np.sum(np.abs(grid.weights() * lap)) + 1e-14


@pytest.mark.parametrize("dim", [1, 2])
def test_implicit_step_conserves_mass(dim, rng):
    grid = build_grid(dim, [1.0] * dim, [33] * dim)
    X = rng.uniform(0.1, 2.0, grid.shape)
    Y = implicit_diffusion(grid, X, 0.37)
    assert abs(grid.integrate(Y) - grid.integrate(X)) < 1e-12 * grid.integrate(X)


def test_zero_reaction_mass_per_step(holling):
    grid = build_grid(1, [1.0], [101])
    zero = lambda u, v: (np.zeros_like(u), np.zeros_like(v))  # noqa: E731
    u, v = InitialCondition("random", seed=3).build(grid)
    m0 = grid.integrate(u)
    for _ in range(5):
        out = simulate(holling, grid, (u, v), 0.1, dt=0.1, reaction=zero, monitors=Monitors(stop_on_steady=False))
        u, v = out.u, out.v
        assert abs(grid.integrate(u) - m0) < 1e-12 * m0


def _ode_reference(model, u0, v0, t):
    sol = solve_ivp(lambda _, y: model.reaction(y[0], y[1]), (0, t), [u0, v0], method="DOP853", rtol=1e-12, atol=1e-14)
    return sol.y[:, -1]


def _constant_run(model, u0, v0, dt, scheme):
    grid = build_grid(1, [1.0], [21])
    return simulate(model, grid, (np.full(21, u0), np.full(21, v0)), 10.0, dt=dt, scheme=scheme,
                    monitors=Monitors(stop_on_steady=False, record_every=100_000))


def test_constant_data_follow_the_ode(holling):
    out = _constant_run(holling, 0.7, 1.3, 0.01, "strang")
    ref = _ode_reference(holling, 0.7, 1.3, 10.0)
    assert np.std(out.u) < 1e-13 and np.std(out.v) < 1e-13
    assert abs(out.u[0] - ref[0]) < 1e-6 and abs(out.v[0] - ref[1]) < 1e-6


def test_imex_euler_is_first_order(holling):
    ref = _ode_reference(holling, 0.7, 1.3, 10.0)
    errs = []
    for dt in (4e-3, 2e-3):
        out = _constant_run(holling, 0.7, 1.3, dt, "imex-euler")
        errs.append(max(abs(out.u[0] - ref[0]), abs(out.v[0] - ref[1])))
    assert 1.6 < errs[0] / errs[1] < 2.4 and errs[1] < 1e-2


def test_random_data_converge_to_the_interior_state(holling):
    grid = build_grid(1, [1.0], [101])
    (eq,) = interior_equilibria(holling)
    out = simulate(holling, grid, InitialCondition(seed=1), 500, monitors=Monitors(target=(eq.u, eq.v)))
    assert out.classification == CONSTANT
    assert out.history[-1]["distance"] < 1e-6
    assert out.u_range[0] >= 0 and out.v_range[0] >= 0


def test_two_dimensional_run(holling):
    grid = build_grid(2, [1.0, 1.0], [21, 21])
    out = simulate(holling, grid, InitialCondition(seed=2), 500)
    (eq,) = interior_equilibria(holling)
    assert out.classification == CONSTANT
    assert np.max(np.abs(out.u - eq.u)) < 1e-6


def test_boundary_classifications():
    grid = build_grid(1, [1.0], [51])
    takeover = dl_model(2, 1, 3, 1, 1, d1=0.01, d2=0.01)
    assert simulate(takeover, grid, InitialCondition(seed=0), 500).classification == PREDATOR_ONLY
    starve = dl_model(2, 1, -1, 0.2, 1, d1=0.01, d2=0.01)
    out = simulate(starve, grid, InitialCondition(seed=0), 500)
    assert out.classification == PREY_ONLY and np.max(np.abs(out.u - 2)) < 1e-6


def test_short_budget_is_exhausted(holling):
    out = simulate(holling, build_grid(1, [1.0], [51]), InitialCondition(seed=0), 0.5)
    assert out.classification == EXHAUSTED


def test_box_entry_is_monitored(holling):
    grid = build_grid(1, [1.0], [101])
    box = construct_bounds(holling)
    out = simulate(holling, grid, InitialCondition(seed=4), 50, monitors=Monitors(box=box, stop_on_steady=False))
    assert out.t_box_entry is not None and out.t_box_exit is None


def test_input_validation(holling):
    grid = build_grid(1, [1.0], [11])
    with pytest.raises(ConfigurationError):
        simulate(holling, grid, (-np.ones(11), np.ones(11)), 1.0)
    with pytest.raises(ConfigurationError):
        simulate(holling, grid, (np.zeros(11), np.ones(11)), 1.0)
    with pytest.raises(ConfigurationError):
        simulate(holling, grid, InitialCondition(), 1.0, scheme="euler")
    with pytest.raises(ConfigurationError):
        simulate(holling, grid, InitialCondition(), 1.0, reaction=holling.reaction)
    with pytest.raises(ValueError):
        simulate(holling, grid, (np.ones(5), np.ones(5)), 1.0)
    with pytest.raises(ConfigurationError):
        InitialCondition(kind="spiral").build(grid)
    for args in ((3, [1.0], [5]), (1, [1.0], [2]), (1, [-1.0], [5]), (2, [1.0], [5, 5])):
        with pytest.raises(ConfigurationError):
            build_grid(*args)


def test_positivity_failure_is_reported(holling):
    grid = build_grid(1, [1.0], [11])
    sink = lambda u, v: (-10.0 * np.ones_like(u), np.zeros_like(v))  # noqa: E731
    with pytest.raises(SimulationError):
        simulate(holling, grid, (np.ones(11), np.ones(11)), 1.0, dt=1.0, reaction=sink, max_halvings=3)


@pytest.mark.parametrize("kind", ["noise", "bump", "random"])
def test_initial_conditions_are_seeded(kind):
    grid = build_grid(2, [1.0, 2.0], [5, 7])
    a = InitialCondition(kind, u=1.0, v=2.0, seed=9).build(grid)
    b = InitialCondition(kind, u=1.0, v=2.0, seed=9).build(grid)
    np.testing.assert_array_equal(a[0], b[0])
    assert a[0].shape == grid.shape and a[0].min() > 0


def test_outputs(tmp_path, holling):
    grid = build_grid(1, [1.0], [31])
    out = simulate(holling, grid, InitialCondition(seed=0), 5.0)
    out.save_fields(tmp_path / "f.csv")
    np.testing.assert_allclose(np.loadtxt(tmp_path / "f.csv", delimiter=",", skiprows=1)[:, 0], out.u)
    out.save_fields(tmp_path / "f.bin", "bin")
    np.testing.assert_array_equal(np.fromfile(tmp_path / "f.bin", "<f8").reshape(2, 31)[1], out.v)
    out.history_to_csv(tmp_path / "h.csv")
    assert (tmp_path / "h.csv").read_text().startswith("time,")
    with pytest.raises(ConfigurationError):
        out.save_fields(tmp_path / "x", "hdf")
