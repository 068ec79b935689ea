import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from orthotrig.exceptions import DomainError, NumericRangeError, PreconditionError
from orthotrig.psi import (CATALOG, PsiSpec, classify, eta, eta_closed_form, mu, psi_eval,
                           psi_index, tail_bound_check, tail_integral)

E1 = PsiSpec.exp_power(1.0, 1.0)
ROOT = PsiSpec.exp_power(2.0, 0.5)


@pytest.mark.parametrize("spec,t,expected", [
    (E1, 1, math.exp(-1)), (E1, 2, math.exp(-2)), (ROOT, 4, math.exp(-4)),
])
def test_psi_eval_values(spec, t, expected):
    assert psi_eval(spec, t) == pytest.approx(expected, rel=1e-14)


def test_psi_eval_rejects_small_t():
    with pytest.raises(DomainError):
        psi_eval(E1, 0.5)


def test_psi_index_extends_to_zero():
    assert psi_index(E1, 0) == psi_index(E1, 1)
    assert psi_index(E1, -3) == pytest.approx(math.exp(-3))


@pytest.mark.parametrize("kwargs", [
    dict(family="exp_power", alpha=0.0), dict(family="exp_power", r=1.5),
    dict(family="exp_power_log", K=1.0), dict(family="power_law", r=-1.0), dict(family="gauss"),
])
def test_invalid_specs(kwargs):
    with pytest.raises(DomainError):
        PsiSpec(**kwargs)


def test_config_round_trip():
    for spec in CATALOG:
        assert PsiSpec.from_config(spec.to_config()) == spec
    with pytest.raises(DomainError):
        PsiSpec.from_config({"family": "power_law", "alpha": 1})


@pytest.mark.parametrize("spec", CATALOG, ids=lambda s: s.label())
def test_catalog_positive_decreasing_vanishing(spec):
    t = np.linspace(1, 200, 400)
    v = spec(t)
    assert np.all(v > 0) and np.all(np.diff(v) < 0)
    T = 1.0
    while spec(T) >= spec(1.0) * 1e-6:
        T *= 2
    assert math.isfinite(T)


@pytest.mark.parametrize("spec", CATALOG, ids=lambda s: s.label())
def test_derivative_matches_finite_difference(spec):
    for t in (1.5, 3.0, 10.0, 40.0):
        h = 1e-5 * t
        fd = (spec(t + h) - spec(t - h)) / (2 * h)
        assert spec.derivative(t) == pytest.approx(fd, rel=1e-6)


@pytest.mark.parametrize("spec,t,expected_eta,expected_mu", [
    (E1, 2, 2 + math.log(2), 2 / math.log(2)),
    (ROOT, 4, (2 + math.log(2) / 2) ** 2, 4 / ((2 + math.log(2) / 2) ** 2 - 4)),
    (PsiSpec.power_law(1.0), 3, 6.0, 1.0),
])
def test_eta_and_mu_examples(spec, t, expected_eta, expected_mu):
    assert eta(spec, t) == pytest.approx(expected_eta, rel=1e-10)
    c = mu(spec, t)
    assert c.mu == pytest.approx(expected_mu, rel=1e-9)
    assert c.mu == c.t / c.eta_gap


@pytest.mark.parametrize("spec", CATALOG, ids=lambda s: s.label())
def test_half_decay_on_log_grid(spec):
    for t in np.geomspace(1, 256, 25):
        x = eta(spec, t)
        assert x > t
        assert abs(spec(x) - spec(t) / 2) <= 1e-10 * spec(t)
        closed = eta_closed_form(spec, t)
        if closed is not None:
            assert x == pytest.approx(closed, rel=1e-8)


def test_eta_underflow_is_reported():
    with pytest.raises(NumericRangeError):
        eta(PsiSpec.power_law(1e-4), 2.0)


@settings(max_examples=40, deadline=None)
@given(alpha=st.floats(0.2, 3.0), r=st.floats(0.2, 0.95), t=st.floats(1.0, 100.0))
def test_mu_increasing_for_subexponential(alpha, r, t):
    spec = PsiSpec.exp_power(alpha, r)
    assert mu(spec, 2 * t).mu > mu(spec, t).mu


def test_classify_examples():
    grid = list(range(1, 65))
    c = classify(PsiSpec.exp_power(1.0, 0.5), grid, 0.5)
    assert (c.in_M_plus_inf, c.in_M_dprime_inf, c.psi_over_dpsi_increasing) == (True, True, True)
    c = classify(E1, grid, 0.5)
    assert (c.in_M_plus_inf, c.in_M_dprime_inf, c.psi_over_dpsi_increasing) == (True, True, False)
    assert not classify(PsiSpec.power_law(1.0), grid, 0.5).in_M_plus_inf
    with pytest.raises(DomainError):
        classify(E1, [1, 2], 0.1)


def test_tail_bound_examples():
    tb = tail_bound_check(E1, 3)
    assert tb.lhs == pytest.approx(math.exp(-3), abs=1e-6)
    assert tb.rhs == pytest.approx(0.128320, abs=1e-5)
    assert tb.holds
    tb = tail_bound_check(E1, 2)
    assert tb.lhs == pytest.approx(math.exp(-2), abs=1e-6)
    # mu(2) = 2/ln 2, so the factor is 2/(1 - ln 2)
    assert tb.rhs == pytest.approx(2 / (1 - math.log(2)) * math.exp(-2) * math.log(2), rel=1e-12)
    assert tb.rhs == pytest.approx(0.611400, rel=1e-4)
    assert tb.holds
    with pytest.raises(PreconditionError):
        tail_bound_check(E1, 1)


def test_tail_integral_closed_form():
    spec = PsiSpec.exp_power(0.5, 1.0)
    assert tail_integral(spec, 4.0) == pytest.approx(2 * math.exp(-2), rel=1e-10)
