"""Explicit constants against frozen values and an independent mpmath evaluation."""

import json
import warnings

import mpmath as mp
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import minimize_scalar

from plap.constants import (
    ProfileConstants,
    build_ledger,
    critical_amplitude,
    delta_star,
    fast_diffusion_constant,
    golden_section_maximize,
    log_fast_diffusion_constant,
    region1_bracket,
    region2_constants,
    region4_constants,
    region5_constants,
    shrink_coefficient,
    similarity_exponent,
)
from plap.exceptions import DomainError, MaximizerAtBoundary, MissingProfileInput
from plap.params import Params

mp.mp.dps = 40
R1 = Params(1.5, 1, 0.25, 2)
R2 = Params(1.5, 1, 0.25, 6)


# ---- independent oracle: the formulas typed directly in mpmath


def o_cstar(p, b, beta):
    p, b, beta = map(mp.mpf, (p, b, beta))
    return ((b * abs(p - 1 - beta) ** p) / ((1 + beta) * (p - 1) * p ** (p - 1))) ** (1 / (p - 1 - beta))


def o_region1(p, b, beta):
    p, b, beta = map(mp.mpf, (p, b, beta))
    w = p * (1 - beta)
    g = p - 1 - beta
    C1 = ((1 - beta) / (2 - p)) ** (1 / g) * o_cstar(p, b, beta)
    z1 = (b ** ((p - 2) / w) * (p ** (p - 1) * (p - 1)) ** (1 / p) * (1 + beta) ** (1 / p)
          * g ** ((beta * (p - 1) - 1) / w) * ((2 - p) / (1 - beta)) ** ((2 - p) / w))
    z2 = (b ** ((p - 2) / w) * (p - 1) ** (1 / p) * p ** ((p - 1) / p) * (1 + beta) ** ((2 - p) / w)
          * 2 ** (g / w) * (2 - p) ** ((beta * (p - 1) - 1) / w) * (1 - beta) / g)
    return C1, z1, z2, g / (1 - beta) * z2


def o_D(p):
    p = mp.mpf(p)
    return (2 * (p - 1) * p ** (p - 1) / (2 - p) ** (p - 1)) ** (1 / (2 - p))


def o_region2_expanding(p, b, beta, A1):
    p, b, beta, A1 = map(mp.mpf, (p, b, beta, A1))
    g = p - 1 - beta
    z3 = (A1 ** ((p - 2) / p) * ((1 - beta) * (1 + beta) * p ** (p - 1) * (p - 1)) ** (1 / p)
          * (1 + b * (1 - beta) * A1 ** (beta - 1)) ** (-1 / p) / g)
    z4 = (A1 / o_cstar(p, b, beta)) ** (g / p)
    return z3, z4, A1 * z3 ** (-p / g)


# ---- frozen values


def test_frozen_region1():
    assert critical_amplitude(R1) == pytest.approx(7.1111111e-4, rel=1e-7)
    c = region1_bracket(R1)
    assert c["C1"] == pytest.approx(0.0036, rel=1e-4)
    assert c["zeta1"] == pytest.approx(2.05411, rel=1e-5)
    assert c["zeta2"] == pytest.approx(4.77785, rel=1e-5)
    assert c["ell0"] == pytest.approx(1.5926, rel=1e-4)
    assert similarity_exponent(R1) == pytest.approx(2 / 9)


def test_frozen_region2_shrinking():
    c = region2_constants(R2.replace(C=critical_amplitude(R2) / 2))
    assert c["Gamma"] == pytest.approx(0.10910, rel=1e-4)
    assert c["delta_star"] == pytest.approx(0.44136, rel=1e-4)
    assert c["ell2"] == pytest.approx(4.0493, rel=1e-4)
    assert c["zeta6"] == pytest.approx(0.19499, rel=1e-4)
    assert c["C3"] == pytest.approx(4.7809e-4, rel=1e-4)


def test_frozen_region3_and_D():
    assert shrink_coefficient(Params(1.8, 1, 0.5, 8)) == pytest.approx(0.840896, rel=1e-6)
    assert fast_diffusion_constant(1.5) == pytest.approx(3.0, rel=1e-14)


def test_frozen_region5_b0():
    c = region5_constants(Params(1.5, 0, 1, 1), A0=0.5, epsilon=0.05)
    assert c["C6"] == pytest.approx(48.0, rel=1e-12)
    assert c["C7"] == pytest.approx(48.0, rel=1e-12)
    assert c["xi4"] / c["xi3"] == pytest.approx(2.5198, rel=1e-4)
    assert c["C5"] == pytest.approx(c["D"], rel=1e-12)


# ---- implementation versus oracle


@given(st.floats(1.05, 1.95), st.floats(0.1, 5), st.floats(0.02, 0.98))
def test_region1_matches_oracle(p, b, frac):
    beta = frac * (p - 1)
    prm = Params(p, b, beta, 0.5 * p / (p - 1 - beta))
    c = region1_bracket(prm)
    C1, z1, z2, l0 = o_region1(p, b, beta)
    for got, want in ((c["C1"], C1), (c["zeta1"], z1), (c["zeta2"], z2), (c["ell0"], l0)):
        assert got == pytest.approx(float(want), rel=1e-10)
    assert critical_amplitude(prm) == pytest.approx(float(o_cstar(p, b, beta)), rel=1e-10)


@given(st.floats(1.01, 1.99))
def test_D_matches_oracle(p):
    assert log_fast_diffusion_constant(p) == pytest.approx(float(mp.log(o_D(p))), rel=1e-10)


def test_D_beyond_double_range_is_arbitrary_precision():
    d = fast_diffusion_constant(1.999)
    assert isinstance(d, mp.mpf)
    assert mp.log(d) == pytest.approx(float(mp.log(o_D(1.999))), rel=1e-10)


@given(st.floats(1e-8, 1e-3))
def test_region2_expanding_matches_oracle(A1):
    prm = R2.replace(C=2 * critical_amplitude(R2))
    c = region2_constants(prm, ProfileConstants(A1=A1))
    z3, z4, C2 = o_region2_expanding(1.5, 1, 0.25, A1)
    assert c["zeta3"] == pytest.approx(float(z3), rel=1e-10)
    assert c["zeta4"] == pytest.approx(float(z4), rel=1e-10)
    assert c["C2"] == pytest.approx(float(C2), rel=1e-10)


def test_region2_needs_profile_when_expanding():
    with pytest.raises(MissingProfileInput):
        region2_constants(R2.replace(C=2 * critical_amplitude(R2)))


def test_region2_at_critical_amplitude_only_cstar():
    c = region2_constants(R2.replace(C=critical_amplitude(R2)))
    assert set(c) == {"Cstar"}


def test_zeta5_from_profile():
    prm = R2.replace(C=critical_amplitude(R2) / 2)
    cs = critical_amplitude(R2)
    c = region2_constants(prm, ProfileConstants(lam=1e-7, ell1=0.66))
    assert c["zeta5"] == pytest.approx(0.66 - (1e-7 / cs) ** (0.25 / 1.5), rel=1e-12)


@given(st.floats(0.05, 0.95))
def test_delta_star_matches_scipy(ratio):
    prm = R2.replace(C=ratio * critical_amplitude(R2))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", MaximizerAtBoundary)
        ds = delta_star(prm)
    from plap.constants import delta_objective

    g = delta_objective(prm)
    ref = minimize_scalar(lambda d: -g(d), bounds=(0, 1), method="bounded", options={"xatol": 1e-12})
    assert g(ds) >= -ref.fun - 1e-12


def test_golden_section_finds_interior_and_endpoint_maxima():
    x, fx = golden_section_maximize(lambda x: -(x - 0.3) ** 2, 0, 1)
    assert x == pytest.approx(0.3, abs=1e-8)
    x, fx = golden_section_maximize(lambda x: x, 0, 1)
    assert x == pytest.approx(1.0, abs=1e-8)


def test_region4_delta_eps():
    prm = Params(1.5, 1, 0.5, 2)
    c = region4_constants(prm, A0=0.57, epsilon=0.05)
    assert c["decay_rate"] == pytest.approx(2 ** (2 / 3), rel=1e-12)
    P = 1.5 + 2 * 0.5
    assert c["delta_eps"] == pytest.approx(((0.62) ** -1 * 0.05 ** 2) ** (P / 2), rel=1e-12)
    with pytest.raises(DomainError):
        region4_constants(R1)


def test_ledger_records_provenance_and_missing_inputs():
    led = build_ledger(R2.replace(C=2 * critical_amplitude(R2)))
    assert set(led.requires_profile) == {"zeta3", "zeta4", "C2"}
    led = build_ledger(R2.replace(C=2 * critical_amplitude(R2)), ProfileConstants(A1=2.7e-6, source="n=4096"))
    assert "zeta4" in led and not led.requires_profile
    doc = json.loads(led.to_json())
    z4 = [e for e in doc["entries"] if e["name"] == "zeta4"][0]
    assert "A1" in z4["inputs_used"] and any("n=4096" in s for s in z4["inputs_used"])
    led = build_ledger(Params(1.5, 0, 1, 1))
    assert "xi3" in led.requires_profile
    led = build_ledger(Params(1.8, 1, 0.5, 8))
    assert led["ell_star"] == pytest.approx(0.840896, rel=1e-6)
