import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from predprey_lab.kinetics import (
    FAMILIES,
    AssumptionViolation,
    DomainError,
    KineticsFamily,
    ModelSpec,
    a4_closed_form,
    a4_sampled,
    check_assumptions,
    compute_prey_capacity,
    compute_v0,
    dl_model,
    eval_derivative,
    eval_H,
    eval_kinetics,
    h_inverse,
    strong_allee_model,
    weak_allee_model,
)

SAMPLE_PARAMS = {
    "prey-holling2-logistic": {"a": 2.0, "b": 1.5, "m": 0.7, "gamma": 1.2},
    "prey-richards": {"a": 2.0, "b": 1.0, "m": 1.0, "p": 2.5},
    "prey-weak-allee": {"a": 3.0, "b": 1.0, "m": 0.5, "p": 0.4},
    "prey-logistic-ivlev": {"a": 2.0, "alpha": 1.3, "beta": 0.8},
    "prey-holling4-logistic": {"a": 2.0, "b": 1.0, "n": 0.5, "m": 2.0},
    "holling2": {"b": 1.5, "m": 0.7},
    "holling4": {"b": 1.0, "n": 0.5, "m": 2.0},
    "ivlev": {"alpha": 1.3, "beta": 0.8},
    "logistic": {"beta": 1.5, "d": 1.0},
    "weak-allee": {"beta": 1.0, "d": 1.0, "p": 0.3},
    "strong-allee": {"beta": 2.0, "d": 1.5, "p": 0.3},
    "rational-strong-allee": {"beta": 1.0, "d": 1.0, "p": 0.2, "r": 0.5},
}


def test_sample_table_covers_every_family():
    assert set(SAMPLE_PARAMS) == set(FAMILIES)


def test_holling2_closed_forms():
    m = dl_model(2.0, 1.0, 1.0, 0.0, 1.0)
    assert m.fv(0.5) == pytest.approx(2.25, abs=1e-15)
    assert m.f.derivative(0.5) == pytest.approx(0.0, abs=1e-15)
    assert m.gv(1.0) == pytest.approx(0.5)
    assert m.hv(3.0) == pytest.approx(-2.0)
    assert m.H(0.0) == pytest.approx(-1.0)
    phi = (1 + math.sqrt(5)) / 2
    assert abs(m.H(phi)) < 1e-14


@pytest.mark.parametrize("tag", sorted(FAMILIES))
@pytest.mark.parametrize("x", [0.0, 1e-4, 0.009, 0.011, 0.3, 1.0, 2.7])
def test_derivative_matches_central_difference(tag, x):
    fam = KineticsFamily(tag, SAMPLE_PARAMS[tag])
    step = 1e-6
    lo = max(x - step, 0.0)
    fd = (fam(x + step) - fam(lo)) / (x + step - lo)
    exact = fam.derivative(x)
    # one-sided difference at 0 is first order
    tol = 1e-5 if x == 0 else 1e-6
    assert abs(fd - exact) <= tol * max(1.0, abs(exact))


@pytest.mark.parametrize("gtag", ["holling2", "holling4", "ivlev"])
@given(u=st.floats(0.0, 50.0))
def test_q_times_u_is_g(gtag, u):
    fam = KineticsFamily(gtag, SAMPLE_PARAMS[gtag])
    f = {"holling2": "prey-holling2-logistic", "holling4": "prey-holling4-logistic",
         "ivlev": "prey-logistic-ivlev"}[gtag]
    model = ModelSpec(KineticsFamily(f, SAMPLE_PARAMS[f] | SAMPLE_PARAMS[gtag]), fam,
                      KineticsFamily("logistic", {"d": 1.0}), c=1.0)
    assert model.qv(u) * u == pytest.approx(model.gv(u), rel=1e-12, abs=1e-300)


@given(x=st.floats(0.0, 0.05))
def test_ivlev_series_branch_is_continuous(x):
    g = KineticsFamily("ivlev", {"alpha": 1.0, "beta": 1.0})
    # g(u) = (1 - exp(-beta u)) / alpha by direct evaluation
    assert g(x) == pytest.approx(-math.expm1(-x), rel=1e-12, abs=1e-300)


def test_ivlev_prey_has_finite_value_at_zero():
    m = ModelSpec(KineticsFamily("prey-logistic-ivlev", {"a": 2.0, "alpha": 1.0, "beta": 1.0}),
                  KineticsFamily("ivlev", {"alpha": 1.0, "beta": 1.0}),
                  KineticsFamily("logistic", {"d": 1.0}), c=0.5)
    assert m.f0 == pytest.approx(2.0)
    assert m.qv(0.0) == pytest.approx(1.0)


@pytest.mark.parametrize("which", ["f", "g", "h", "q"])
def test_public_evaluators_reject_bad_arguments(holling, which):
    with pytest.raises(DomainError):
        eval_kinetics(holling, which, -0.1)
    with pytest.raises(DomainError):
        eval_derivative(holling, which, np.array([0.1, np.nan]))
    assert np.all(np.isfinite(eval_kinetics(holling, which, np.linspace(0, 3, 7))))


def test_eval_H_and_unknown_selector(holling):
    assert eval_H(holling, 0.0) == pytest.approx(-1.0)
    with pytest.raises(ValueError):
        eval_kinetics(holling, "z", 1.0)
    with pytest.raises(DomainError):
        eval_H(holling, -1.0)


def test_parameter_validation():
    with pytest.raises(ValueError):
        KineticsFamily("holling2", {"b": -1.0, "m": 1.0})
    with pytest.raises(ValueError):
        KineticsFamily("weak-allee", {"d": 0.2, "p": 0.5})
    with pytest.raises(ValueError):
        KineticsFamily("holling2", {"b": 1.0, "m": 1.0, "zzz": 2.0})
    with pytest.raises(ValueError):
        KineticsFamily("no-such-family", {})
    # logistic predator may have d <= 0
    KineticsFamily("logistic", {"d": -1.0})


def test_pairing_is_enforced():
    f = KineticsFamily("prey-holling2-logistic", {"a": 2.0, "b": 1.0, "m": 1.0})
    with pytest.raises(ValueError):
        ModelSpec(f, KineticsFamily("holling2", {"b": 1.0, "m": 2.0}), KineticsFamily("logistic", {"d": 1.0}), 0.1)
    with pytest.raises(ValueError):
        ModelSpec(f, KineticsFamily("ivlev", {"alpha": 1.0, "beta": 1.0}), KineticsFamily("logistic", {"d": 1.0}), 0.1)
    with pytest.raises(ValueError):
        ModelSpec(f, KineticsFamily("holling2", {"b": 1.0, "m": 1.0}), KineticsFamily("logistic", {"d": 1.0}), -1.0)


@pytest.mark.parametrize("tag", ["prey-holling2-logistic", "prey-richards", "prey-weak-allee",
                                 "prey-logistic-ivlev", "prey-holling4-logistic"])
def test_prey_capacity_is_a_root(tag):
    f = KineticsFamily(tag, SAMPLE_PARAMS[tag])
    gtag = {"prey-logistic-ivlev": "ivlev", "prey-holling4-logistic": "holling4"}.get(tag, "holling2")
    gp = {k: SAMPLE_PARAMS[tag][k] for k in FAMILIES[gtag].params}
    m = ModelSpec(f, KineticsFamily(gtag, gp), KineticsFamily("logistic", {"d": 1.0}), 0.0)
    a = compute_prey_capacity(m)
    assert abs(m.fv(a)) < 1e-12
    expected = SAMPLE_PARAMS[tag]["a"] ** (1 / SAMPLE_PARAMS[tag].get("p", 1.0)) if tag == "prey-richards" \
        else SAMPLE_PARAMS[tag]["a"]
    assert a == pytest.approx(expected, rel=1e-12)


def test_capacity_needs_positive_f0():
    bad = KineticsFamily("prey-holling2-logistic", {"a": -1.0, "b": 1.0, "m": 1.0}, check=False)
    m = ModelSpec(bad, KineticsFamily("holling2", {"b": 1.0, "m": 1.0}, check=False),
                  KineticsFamily("logistic", {"d": 1.0}), 0.0)
    with pytest.raises(AssumptionViolation):
        compute_prey_capacity(m)
    rep = check_assumptions(m)
    assert rep.verdicts["A1'"] == "fail"


def test_v0_and_h_inverse():
    assert compute_v0(dl_model(2, 1, 1.5, 1, 1)) == 1.5
    assert compute_v0(dl_model(2, 1, -1.0, 1, 1)) == 0.0
    assert compute_v0(strong_allee_model(3, 1, 1, 2, 1, 1, 1)) == 2.0
    m = weak_allee_model(2, 1, 1, 0.5, 1, 1)
    for y in (0.0, -0.3, -5.0):
        v = h_inverse(m, y)
        assert v >= 1.0 and m.hv(v) == pytest.approx(y, abs=1e-12)
    with pytest.raises(ValueError):
        h_inverse(m, 0.1)


def test_assumption_report_holling2():
    rep = check_assumptions(dl_model(2, 1, 1, 0.1, 1))
    assert rep.passes("A1'", "A1", "A2", "A2'", "A3", "A4", "A5")
    assert rep.f_case == "II"
    assert rep.lam == pytest.approx(0.5, abs=1e-12)
    assert rep.a == pytest.approx(2.0)
    # am <= 1: monotone decreasing f
    assert check_assumptions(dl_model(0.5, 1, 0.2, 0.1, 1)).f_case == "I"


def test_assumption_report_other_families():
    rep = check_assumptions(strong_allee_model(3, 1, 1, 0.5, 1, 1, 1))
    assert rep.verdicts["A2"] == "fail" and rep.verdicts["A2'"] == "pass"
    assert rep.verdicts["A3"] == "fail"
    assert rep.verdicts["A4"] == "pass"  # f(0)=3 > d+p
    assert check_assumptions(strong_allee_model(1, 1, 1, 0.5, 1, 1, 1)).verdicts["A4"] == "fail"
    rep = check_assumptions(weak_allee_model(2, 1, 1, 0.5, 1, 1))
    assert rep.passes("A1", "A2", "A3", "A4", "A5")
    assert check_assumptions(dl_model(2, 1, -1, 1, 1)).verdicts["A3"] == "fail"


@settings(max_examples=60, deadline=None)
@given(
    tag=st.sampled_from(["logistic", "weak-allee", "strong-allee", "rational-strong-allee"]),
    d=st.floats(0.2, 3.0),
    p=st.floats(0.05, 0.9),
    r=st.floats(0.1, 2.0),
    f0=st.floats(0.05, 6.0),
)
def test_a4_closed_form_agrees_with_sampling(tag, d, p, r, f0):
    params = {"logistic": {"d": d}, "weak-allee": {"d": d, "p": p * d},
              "strong-allee": {"d": d, "p": p}, "rational-strong-allee": {"d": d, "p": p, "r": r}}[tag]
    h = KineticsFamily(tag, params)
    thr = {"logistic": -np.inf, "weak-allee": d - p * d, "strong-allee": d + p,
           "rational-strong-allee": (d * p + d * r + p * r) / r}[tag]
    if abs(f0 - thr) < 1e-3:
        return  # sampling cannot resolve the boundary
    assert a4_closed_form(h, f0) == (not a4_sampled(h, f0, v_max=4 * max(f0, d, 1.0), n=20_000))


def test_tampered_family_fails_checks():
    # strong-Allee h posing as a logistic-type predator: A3 must fail
    m = strong_allee_model(3, 1, 1, 0.5, 1, 1, 1)
    assert not check_assumptions(m).passes("A3")
    bad_g = KineticsFamily("holling2", {"b": -1.0, "m": 1.0}, check=False)
    m2 = ModelSpec(KineticsFamily("prey-holling2-logistic", {"a": 2.0, "b": 1.0, "m": 1.0}), bad_g,
                   KineticsFamily("logistic", {"d": 1.0}), 0.1)
    rep = check_assumptions(m2)
    assert rep.verdicts["A2"] == "fail" and rep.verdicts["A2'"] == "fail"


def test_model_reaction_and_jacobian_consistent(holling, rng):
    u, v = rng.uniform(0.1, 2.0, 5), rng.uniform(0.1, 2.0, 5)
    F, G = holling.reaction(u, v)
    Fu, Fv, Gu, Gv = holling.jacobian(u, v)
    eps = 1e-7
    F1, G1 = holling.reaction(u + eps, v)
    F2, G2 = holling.reaction(u, v + eps)
    np.testing.assert_allclose((F1 - F) / eps, Fu, rtol=1e-5, atol=1e-6)
    np.testing.assert_allclose((G1 - G) / eps, Gu, rtol=1e-5, atol=1e-6)
    np.testing.assert_allclose((F2 - F) / eps, Fv, rtol=1e-5, atol=1e-6)
    np.testing.assert_allclose((G2 - G) / eps, Gv, rtol=1e-5, atol=1e-6)
