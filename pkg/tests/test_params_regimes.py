import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from plap.constants import _cstar
from plap.exceptions import AdmissibilityError, PositivityError, RangeError
from plap.params import Params, close, validate
from plap.regimes import Direction, Region, Subcase, classify, predicted_interface_law

p_s = st.floats(1.01, 1.99)


def test_validate_rejects_bad_ranges():
    with pytest.raises(RangeError):
        validate(Params(2.0, 1, 0.5, 1))
    with pytest.raises(RangeError):
        validate(Params(float("nan"), 1, 0.5, 1))
    with pytest.raises(PositivityError):
        validate(Params(1.5, 1, 0.0, 1))
    with pytest.raises(PositivityError):
        validate(Params(1.5, 1, 0.5, 1, C=-1))
    with pytest.raises(AdmissibilityError):
        validate(Params(1.5, -1, 0.5, 1))


def test_parameter_errors_are_value_errors():
    with pytest.raises(ValueError):
        validate(Params(2.5, 1, 0.5, 1))


def test_classify_examples():
    assert classify(Params(1.5, 1, 0.25, 2)).region is Region.I
    assert classify(Params(1.5, 1, 0.25, 6)).region is Region.II
    assert classify(Params(1.8, 1, 0.5, 8)).region is Region.III
    assert classify(Params(1.5, 1, 0.5, 2)).region is Region.IV
    assert classify(Params(1.5, 1, 0.7, 2)).region is Region.V
    lab = classify(Params(1.5, -1, 1.2, 1))
    assert (lab.region, lab.subcase) == (Region.V, Subcase.INFINITE_SPEED_B_NEG)
    assert classify(Params(1.5, 0, 0.3, 1)).subcase is Subcase.INFINITE_SPEED_B_ZERO


def test_region2_subcases_and_stationary_flag():
    cs = _cstar(1.5, 1, 0.25)
    base = Params(1.5, 1, 0.25, 6)
    assert classify(base.replace(C=cs / 2)).subcase is Subcase.SHRINKING
    assert classify(base.replace(C=2 * cs)).subcase is Subcase.EXPANDING
    assert classify(base.replace(C=cs)).subcase is Subcase.STATIONARY
    assert classify(base.replace(C=cs), pure_power_data=False).subcase is Subcase.UNDETERMINED


def test_predicted_laws():
    law = predicted_interface_law(Params(1.5, 1, 0.25, 2))
    assert law.direction is Direction.RIGHT and law.exponent == pytest.approx(2 / 9)
    assert law.bracket[0] < law.bracket[1]
    law = predicted_interface_law(Params(1.8, 1, 0.5, 8))
    assert law.direction is Direction.LEFT
    assert law.exponent == pytest.approx(0.25)
    assert law.coefficient == pytest.approx(-(0.5 ** 0.25), rel=1e-12)
    assert predicted_interface_law(Params(1.5, 0, 1, 1)).direction is Direction.NO_INTERFACE


@given(p_s, st.floats(0.01, 0.99), st.floats(-0.5, 0.5))
def test_region2_exactly_on_threshold(p, frac, log_off):
    beta = frac * (p - 1)
    thr = p / (p - 1 - beta)
    on = classify(Params(p, 1, beta, thr * (1 + 0.4e-12))).region
    assert on is Region.II
    alpha = thr * math.exp(log_off)
    if abs(log_off) > 1e-9:
        want = Region.I if alpha < thr else Region.III
        assert classify(Params(p, 1, beta, alpha)).region is want


@given(p_s, st.floats(-3, 3), st.floats(0.01, 3), st.floats(0.05, 20), st.floats(0.01, 10))
def test_classification_is_a_partition(p, b, beta, alpha, C):
    prm = Params(p, b, beta, alpha, C)
    if not prm.is_valid:
        return
    region = classify(prm).region
    # independent restatement of the region conditions
    gap = p - 1 - beta
    conds = {
        Region.IV: b > 0 and close(beta, p - 1),
        Region.V: b <= 0 or (gap < 0 and not close(beta, p - 1)),
    }
    sub = b > 0 and gap > 0 and not close(beta, p - 1)
    thr = p / gap if gap > 0 else math.inf
    conds[Region.II] = sub and close(alpha, thr)
    conds[Region.I] = sub and alpha < thr and not close(alpha, thr)
    conds[Region.III] = sub and alpha > thr and not close(alpha, thr)
    assert sum(conds.values()) == 1
    assert conds[region]
