"""Self-similar profiles read off solver runs at t = 1.

* f0 / f: profile of the pure-diffusion problem (b = 0) in xi = x t^{-1/P},
  P = p + alpha(2-p); A0 = f(0).
* f1: profile of the balanced case alpha = p/(p-1-beta) in
  zeta = x t^{-(p-1-beta)/(p(1-beta))}; A1 = f1(0) when it expands, the pair
  (ell1, lambda) with lambda = f1(-ell1) when it shrinks.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .closed_forms import write_csv
from .constants import ProfileConstants, _cstar
from .exceptions import DomainError, SupportEdgeOutOfDomain
from .interface import extract_interface
from .params import Params, close, validate
from .regimes import Region, classify
from .solver import Grid1D, SolverOptions, solve

EXTRACTION_TIME = 1.0


@dataclass
class ProfileTable:
    variable: str  # "xi" or "zeta"
    points: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __call__(self, s):
        """Linear interpolation; zero beyond a compact support, NaN outside the table otherwise."""
        s = np.asarray(s, float)
        v = np.interp(s, self.points, self.values, left=np.nan, right=np.nan)
        if self.variable == "zeta":
            v = np.where(s > self.points[-1], 0.0, v)
        return v

    def to_csv(self, path) -> None:
        path = Path(path)
        write_csv(path, ["coordinate", "value"], [self.points, self.values])
        path.with_suffix(".json").write_text(json.dumps(self.meta, indent=2, sort_keys=True))


def _half_run_error(params, grid, opts, u_full) -> float:
    """max |u_n - u_{n/2}|, the paired half-resolution estimate used for tolerances."""
    coarse = Grid1D(grid.x_lo, grid.x_hi, max(64, grid.n_cells // 2))
    uc = solve(params, coarse, opts, snapshot_times=[EXTRACTION_TIME])[-1].u
    return float(np.max(np.abs(u_full - np.interp(grid.centers, coarse.centers, uc))))


def _meta(params, grid, opts, err):
    return {
        "params": params.to_dict(),
        "grid": {"x_lo": grid.x_lo, "x_hi": grid.x_hi, "n_cells": grid.n_cells},
        "eps_reg": opts.eps_reg,
        "splitting": opts.splitting,
        "extraction_time": EXTRACTION_TIME,
        "estimated_error": err,
    }


# ------------------------------------------------------------ b = 0 profile


def extract_f0(p: float, alpha: float, grid: Grid1D, opts: SolverOptions = SolverOptions(),
               estimate_error: bool = True):
    """Profile of the b = 0 problem with data (-x)_+^alpha at t = 1, and f0(0).

    Returns (ProfileTable over xi, A0 of the C = 1 problem).
    """
    prm = Params(p, 0.0, 1.0, alpha, 1.0)
    validate(prm)
    u = solve(prm, grid, opts, snapshot_times=[EXTRACTION_TIME])[-1].u
    x = grid.centers
    err = _half_run_error(prm, grid, opts, u) if estimate_error else None
    table = ProfileTable("xi", x.copy(), u, _meta(prm, grid, opts, err))
    return table, float(np.interp(0.0, x, u))


def rescale_f0(table: ProfileTable, C: float, p: float, alpha: float) -> ProfileTable:
    """f(rho) = C^{p/P} f0(C^{(2-p)/P} rho), the profile for amplitude C."""
    P = p + alpha * (2.0 - p)
    k = C ** ((2.0 - p) / P)
    meta = dict(table.meta)
    meta["rescaled_to_C"] = C
    if meta.get("estimated_error") is not None:
        meta["estimated_error"] = meta["estimated_error"] * C ** (p / P)
    return ProfileTable("xi", table.points / k, C ** (p / P) * table.values, meta)


def a0_for(params: Params, a0_unit: float) -> float:
    """A0 = f(0) for amplitude C from the C = 1 value."""
    return params.C ** (params.p / params.diffusive_scale) * a0_unit


# ------------------------------------------------------------ balanced-case profile


@dataclass
class F1Result:
    table: ProfileTable
    zeta_star: float
    A1: Optional[float] = None
    lam: Optional[float] = None
    ell1: Optional[float] = None
    certified: Optional[bool] = None
    estimated_error: Optional[float] = None

    def constants(self) -> ProfileConstants:
        g = self.table.meta.get("grid", {})
        src = f"n={g.get('n_cells')},x=[{g.get('x_lo')},{g.get('x_hi')}],t={EXTRACTION_TIME}"
        return ProfileConstants(A1=self.A1, lam=self.lam, ell1=self.ell1, zeta_star=self.zeta_star, source=src)


def lambda_bound_holds(params: Params, ell: float, lam: float) -> bool:
    """0 < lambda < C* ell^{p/(p-1-beta)}."""
    cst = _cstar(params.p, params.b, params.beta)
    return 0.0 < lam < cst * ell ** (params.p / params.gap)


def extract_f1(params: Params, grid: Grid1D, opts: SolverOptions = SolverOptions(),
               ell_probe: Optional[float] = None, threshold_abs: float = 1e-10,
               estimate_error: bool = False, edge_cells: int = 5) -> F1Result:
    """Run the balanced case to t = 1 and read off f1, zeta*, A1 or (ell1, lambda)."""
    validate(params)
    if classify(params).region is not Region.II:
        raise DomainError("f1 extraction needs alpha = p/(p-1-beta)")
    snap = solve(params, grid, opts, snapshot_times=[EXTRACTION_TIME])[-1]
    x, u = snap.x, snap.u
    trace = extract_interface([snap], threshold_abs, power=params.gap / params.p)
    zs = float(trace.eta[0])
    if not math.isfinite(zs) or zs > grid.x_hi - edge_cells * grid.dx or zs < grid.x_lo + edge_cells * grid.dx:
        raise SupportEdgeOutOfDomain(f"support edge {zs} within {edge_cells} cells of the boundary")
    err = _half_run_error(params, grid, opts, u) if estimate_error else None
    table = ProfileTable("zeta", x.copy(), u, _meta(params, grid, opts, err))
    res = F1Result(table, zs, estimated_error=err)
    cst = _cstar(params.p, params.b, params.beta)
    if close(params.C, cst):
        return res
    if params.C > cst:
        res.A1 = float(np.interp(0.0, x, u))
        return res
    ell = ell_probe if ell_probe is not None else 1.5 * abs(zs)
    # widen the probe until the lambda bound certifies it (or the domain runs out)
    while True:
        lam = float(np.interp(-ell, x, u))
        ok = lambda_bound_holds(params, ell, lam)
        if ok or ell_probe is not None or -1.5 * ell < grid.x_lo + edge_cells * grid.dx:
            break
        ell *= 1.5
    res.ell1, res.lam, res.certified = ell, lam, ok
    return res


def self_similar_consistency(params: Params, table: ProfileTable, t_probe: float, grid: Grid1D,
                             opts: SolverOptions = SolverOptions(), level: float = 1e-6) -> float:
    """Max deviation of a fresh snapshot at t_probe from the rescaled t = 1 profile.

    Compared where the rescaled profile exceeds ``level`` times its maximum;
    the deviation is relative to the snapshot maximum on that set.
    """
    if not 0.25 <= t_probe <= 4.0:
        raise DomainError("t_probe must lie in [0.25, 4]")
    snap = solve(params, grid, opts, snapshot_times=[t_probe])[-1]
    x, u = snap.x, snap.u
    if table.variable == "zeta":
        c = params.gap / (params.p * (1.0 - params.beta))
        pred = t_probe ** (1.0 / (1.0 - params.beta)) * table(x * t_probe ** (-c))
    else:
        P = params.diffusive_scale
        pred = t_probe ** (params.alpha / P) * table(x * t_probe ** (-1.0 / P))
    ok = np.isfinite(pred)
    ok &= pred > level * np.nanmax(pred)
    if not ok.any():
        return math.nan
    return float(np.max(np.abs(u[ok] - pred[ok])) / np.max(np.abs(u[ok])))
