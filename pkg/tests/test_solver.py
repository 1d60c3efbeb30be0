"""Finite-volume solver: structure, invariants and exact-solution checks."""

import numpy as np
import pytest

from plap.closed_forms import reaction_exact_solution, source_type_solution
from plap.exceptions import DomainError
from plap.params import Params
from plap.solver import Grid1D, SolverOptions, initial_data, run_manifest, scaling_identity_check, solve, write_snapshots_csv

R1 = Params(1.5, 1, 0.25, 2, 1)
GRID = Grid1D(-2.0, 2.0, 256)


def test_grid_validation():
    with pytest.raises(DomainError):
        Grid1D(0.0, 1.0, 128)
    with pytest.raises(DomainError):
        Grid1D(-1.0, 1.0, 10)
    g = Grid1D(-1.0, 3.0, 100)
    assert g.dx == pytest.approx(0.04)
    assert len(g.centers) == 100 and len(g.faces) == 101


def test_options_validation():
    with pytest.raises(DomainError):
        SolverOptions(eps_reg=0.0)
    with pytest.raises(DomainError):
        SolverOptions(splitting="lie")
    with pytest.raises(DomainError):
        SolverOptions(theta=0.3)


def test_snapshots_land_on_requested_times():
    times = [0.01, 0.037, 0.1]
    res = solve(R1, GRID, snapshot_times=times)
    assert [s.t for s in res] == times
    assert not any(s.interpolated for s in res)
    assert res.diagnostics.steps > 0


def test_interpolated_snapshots_are_flagged():
    res = solve(R1, GRID, SolverOptions(snapshot_mode="interpolate"), snapshot_times=[0.01, 0.037, 0.1])
    assert res[1].interpolated and res[1].t == 0.037


def test_solution_is_nonnegative_and_bounded_by_data():
    res = solve(R1, GRID, snapshot_times=[0.05, 0.2])
    u0 = initial_data(GRID, R1).u
    for s in res:
        assert np.all(s.u >= 0)
        assert np.all(s.u <= u0.max() * (1 + 1e-12))


def test_comparison_in_amplitude():
    lo = solve(R1.replace(C=0.5), GRID, snapshot_times=[0.1])[-1].u
    hi = solve(R1, GRID, snapshot_times=[0.1])[-1].u
    assert np.all(lo <= hi + 1e-14)


def test_mass_conserved_without_absorption():
    prm = Params(1.5, 0.0, 1.0, 1.0, 1.0)
    init = initial_data(GRID, prm, kind="custom", func=lambda x: np.maximum(0.0, 1 - 4 * x ** 2))
    res = solve(prm, GRID, SolverOptions(bc="no_flux"), snapshot_times=[0.05], initial=init)
    assert res[-1].mass() == pytest.approx(init.mass(), rel=1e-9)


def test_reaction_only_matches_exact_flow():
    prm = Params(1.5, 1.0, 0.5, 2.0, 1.0)
    grid = Grid1D(-2.0, 2.0, 64)
    res = solve(prm, grid, SolverOptions(diffusion=False, dt_rel=1e-3), snapshot_times=[0.3])
    exact = reaction_exact_solution(initial_data(grid, prm).u, 0.3, prm)
    assert np.max(np.abs(res[-1].u - exact)) < 2e-3 * exact.max()


def test_source_type_solution_reproduced():
    p = 1.5
    prm = Params(p, 0.0, 1.0, 1.0, 1.0)
    grid = Grid1D(-6.0, 6.0, 512)
    init = initial_data(grid, prm, kind="custom", func=lambda x: source_type_solution(x, 0.1, p))
    res = solve(prm, grid, SolverOptions(bc="no_flux", theta=0.5), snapshot_times=[0.1], initial=init)
    # the initial state sits at t=0.1 on the exact trajectory
    exact = source_type_solution(grid.centers, 0.2, p)
    interior = np.abs(grid.centers) < 3
    assert np.max(np.abs(res[-1].u - exact)[interior]) < 1e-3 * exact.max()


def test_strang_splitting_agrees_with_unsplit():
    a = solve(R1, GRID, snapshot_times=[0.1])[-1].u
    b = solve(R1, GRID, SolverOptions(splitting="strang_exact_reaction"), snapshot_times=[0.1])[-1].u
    assert np.max(np.abs(a - b)) < 2e-2 * a.max()


def test_scaling_identity_small_grid():
    prm = Params(1.5, 1, 0.25, 6, 3e-4)
    dev = scaling_identity_check(prm, 2.0, Grid1D(-8, 2, 512), SolverOptions(eps_reg=1e-40))
    assert dev < 1e-2


def test_outputs(tmp_path):
    res = solve(R1, GRID, snapshot_times=[0.01, 0.1])
    write_snapshots_csv(tmp_path / "s.csv", res.snapshots)
    data = np.loadtxt(tmp_path / "s.csv", delimiter=",", skiprows=1)
    assert data.shape == (2 * GRID.n_cells, 3)
    man = run_manifest(res)
    assert man["snapshot_times"] == [0.01, 0.1]
    assert man["opts"]["dt_max"] is None


def test_bad_snapshot_times():
    with pytest.raises(DomainError):
        solve(R1, GRID)
    with pytest.raises(DomainError):
        solve(R1, GRID, t_end=0.1, snapshot_times=[0.2])
