"""Front extraction, power-law fits, sandwiches and tail regressions."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.base import clone

from plap.exceptions import DegenerateFit, DomainError
from plap.interface import (
    PowerLawRegressor,
    check_sandwich,
    extract_interface,
    fit_power_law,
    tail_asymptote,
)
from plap.solver import Grid1D, SolutionField

GRID = Grid1D(-4.0, 4.0, 800)


def _snap(u, t=1.0, grid=GRID):
    return SolutionField(grid, t, np.asarray(u, float))


@given(st.floats(-3.0, 3.0), st.floats(0.5, 3.0))
def test_zero_extrapolation_exact_for_linear_w(front, power_inv):
    # u^{1/power_inv} is linear in the distance to the front
    x = GRID.centers
    u = np.maximum(front - x, 0.0) ** power_inv
    tr = extract_interface([_snap(u)], threshold_abs=1e-300, power=1.0 / power_inv)
    assert tr.status == ["ok"]
    assert tr.eta[0] == pytest.approx(front, abs=1e-9)


def test_zero_extrapolation_independent_of_threshold():
    x = GRID.centers
    u = np.maximum(1.234 - x, 0.0) ** 6
    etas = [extract_interface([_snap(u)], threshold_abs=thr, power=1 / 6).eta[0] for thr in (1e-20, 1e-10, 1e-4)]
    assert np.ptp(etas) < 1e-9


def test_threshold_interpolation_and_statuses():
    x = GRID.centers
    u = 0.5 - x  # linear through the crossing, so interpolation is exact
    tr = extract_interface([_snap(u)], threshold_abs=1e-3)
    assert tr.eta[0] == pytest.approx(0.5 - 1e-3, abs=1e-9)
    tr = extract_interface([_snap(np.zeros_like(x)), _snap(np.ones_like(x))], threshold_abs=1e-3)
    assert tr.status == ["empty", "no_interface"]
    assert tr.eta[0] == -math.inf and tr.eta[1] == math.inf
    with pytest.raises(DomainError):
        extract_interface([_snap(u)], threshold_abs=0.0)


@settings(max_examples=50)
@given(st.floats(-2.0, 2.0), st.floats(0.01, 100.0), st.sampled_from([-1.0, 1.0]))
def test_power_law_regressor_recovers_exact_laws(exponent, coefficient, sign):
    t = np.geomspace(1e-3, 1e-1, 12)
    y = sign * coefficient * t ** exponent
    reg = PowerLawRegressor().fit(t, y)
    assert reg.exponent_ == pytest.approx(exponent, abs=1e-9)
    assert math.exp(reg.log_coefficient_) == pytest.approx(coefficient, rel=1e-9)
    assert np.allclose(reg.predict(t), y, rtol=1e-9)
    if abs(exponent) > 1e-3:  # R^2 is undefined for constant targets
        assert reg.score(t, y) == pytest.approx(1.0)


def test_power_law_regressor_is_an_estimator():
    reg = clone(PowerLawRegressor())
    assert reg.get_params() == {}
    with pytest.raises(DegenerateFit):
        reg.fit(np.array([1.0, 2.0, 3.0]), np.array([1.0, -1.0, 2.0]))


def test_fit_power_law_window_and_local_slopes():
    t = np.geomspace(1e-4, 1.0, 30)
    eta = 4.0 * t ** (2 / 9)
    fit = fit_power_law((t, eta), window=(1e-3, 1e-1))
    assert fit.exponent == pytest.approx(2 / 9, abs=1e-12)
    assert fit.coefficient == pytest.approx(4.0, rel=1e-12)
    assert all(s == pytest.approx(2 / 9) for _, s in fit.local_slopes)
    with pytest.raises(DegenerateFit):
        fit_power_law((t, eta), window=(1e-3, 2e-3))


def _bounds():
    lower = lambda x, t: 0.9 * np.maximum(-x, 0.0)
    upper = lambda x, t: 1.1 * np.maximum(-x, 0.0)
    return lower, upper


def test_sandwich_accepts_true_bounds():
    x = GRID.centers
    lower, upper = _bounds()
    rep = check_sandwich([_snap(np.maximum(-x, 0.0))], lower, upper, tol_rel=0.0)
    assert rep.ok and rep.lower_checked == rep.upper_checked == x.size


def test_sandwich_rejects_swapped_bounds():
    # negative control: with the bounds exchanged every positive cell is a violation
    x = GRID.centers
    lower, upper = _bounds()
    rep = check_sandwich([_snap(np.maximum(-x, 0.0))], upper, lower, tol_rel=0.02)
    n_pos = int(np.sum(x < 0))
    assert rep.lower_violations == n_pos and rep.upper_violations == n_pos
    assert not rep.ok


def test_sandwich_validity_masks():
    x = GRID.centers
    lower, upper = _bounds()
    rep = check_sandwich([_snap(np.maximum(-x, 0.0))], upper, None,
                         lower_valid=lambda x, t: x > 0, tol_rel=0.0)
    assert rep.ok and rep.lower_checked == int(np.sum(x > 0))


def test_power_tail_fit_exact():
    g = Grid1D(-1.0, 60.0, 610)
    x = g.centers
    u = np.where(x > 0, 7.0 * np.abs(x) ** -3.0, 1.0)
    fit = tail_asymptote(_snap(u, grid=g), (10.0, 50.0), shifted_exponent=-3.0)
    assert fit.slope == pytest.approx(-3.0, abs=1e-10)
    assert fit.coefficient == pytest.approx(7.0, rel=1e-9)
    assert fit.limit_coefficient == pytest.approx(7.0, rel=1e-9)
    assert fit.shift == pytest.approx(0.0, abs=1e-8)


def test_shifted_tail_recovers_limit_coefficient():
    g = Grid1D(-1.0, 60.0, 610)
    x = g.centers
    u = np.where(x > 0, 7.0 * (np.abs(x) + 2.0) ** -3.0, 1.0)
    fit = tail_asymptote(_snap(u, grid=g), (10.0, 50.0), shifted_exponent=-3.0)
    assert fit.slope > -3.0  # the plain log-log slope is biased by the shift
    assert fit.limit_coefficient == pytest.approx(7.0, rel=1e-9)
    assert fit.shift == pytest.approx(2.0, rel=1e-8)


def test_exponential_tail_fit():
    g = Grid1D(-1.0, 20.0, 420)
    x = g.centers
    u = 3.0 * np.exp(-1.5874 * x)
    fit = tail_asymptote(_snap(u, grid=g), (5.0, 10.0), kind="exponential")
    assert fit.slope == pytest.approx(-1.5874, rel=1e-12)
    with pytest.raises(DomainError):
        tail_asymptote(_snap(u, grid=g), (5.0, 10.0), kind="gaussian")
