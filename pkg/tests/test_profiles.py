"""Self-similar profile extraction."""

import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from plap.constants import critical_amplitude
from plap.exceptions import DomainError
from plap.params import Params
from plap.profiles import ProfileTable, a0_for, extract_f0, extract_f1, lambda_bound_holds, rescale_f0
from plap.solver import Grid1D, SolverOptions

R2 = Params(1.5, 1, 0.25, 6, 1.0)


@pytest.fixture(scope="module")
def f0_run():
    return extract_f0(1.5, 2.0, Grid1D(-4, 4, 512))


def test_f0_unit_amplitude(f0_run):
    table, a0 = f0_run
    assert table.variable == "xi"
    assert a0 == pytest.approx(0.5747, abs=5e-3)
    assert table.meta["estimated_error"] < 1e-2 * table.values.max()


@given(st.floats(0.01, 100.0))
def test_rescaled_profile_matches_amplitude_scaling(C):
    xi = np.linspace(-3, 3, 61)
    base = ProfileTable("xi", xi, np.exp(-xi ** 2), {"estimated_error": 1e-3})
    P = 1.5 + 2.0 * 0.5
    out = rescale_f0(base, C, 1.5, 2.0)
    k = C ** (0.5 / P)
    probe = np.linspace(-2, 2, 9) / k
    assert np.allclose(out(probe), C ** (1.5 / P) * base(probe * k), rtol=1e-12)
    assert a0_for(Params(1.5, 1, 0.5, 2, C), 1.0) == pytest.approx(C ** (1.5 / P))


def test_table_outside_support(tmp_path):
    tab = ProfileTable("zeta", np.array([-1.0, 0.0, 1.0]), np.array([2.0, 1.0, 0.0]), {"k": 1})
    assert tab(2.0) == 0.0 and np.isnan(tab(-2.0))
    tab.to_csv(tmp_path / "f.csv")
    assert json.loads((tmp_path / "f.json").read_text()) == {"k": 1}
    assert (tmp_path / "f.csv").read_text().splitlines()[0] == "coordinate,value"


def test_f1_needs_balanced_exponent():
    with pytest.raises(DomainError):
        extract_f1(Params(1.5, 1, 0.25, 2, 1), Grid1D(-4, 4, 128))


def test_f1_expanding_and_shrinking_cases():
    cs = critical_amplitude(R2)
    grid, opts = Grid1D(-8, 2, 512), SolverOptions(eps_reg=1e-40)
    up = extract_f1(R2.replace(C=2 * cs), grid, opts, threshold_abs=1e-18)
    assert up.zeta_star > 0 and up.A1 > 0 and up.lam is None
    down = extract_f1(R2.replace(C=cs / 2), grid, opts, threshold_abs=1e-18)
    assert down.zeta_star < 0 and down.A1 is None
    assert down.certified == lambda_bound_holds(R2.replace(C=cs / 2), down.ell1, down.lam)
    assert down.constants().ell1 == down.ell1
