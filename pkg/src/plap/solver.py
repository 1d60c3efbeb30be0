"""Finite-volume solver for u_t = (|u_x|^{p-2} u_x)_x - b u^beta on a truncated line.

Cell-centred unknowns, Dirichlet values imposed on the end faces, and a
regularised face flux (g^2 + eps^2)^{(p-2)/2} g.  Two time integrators:

* ``unsplit_implicit`` (default): theta-scheme on diffusion and absorption
  together, solved by damped Newton with a tridiagonal Jacobian.  The
  absorption u^beta (beta < 1) is replaced by a linear ramp below
  ``delta_abs`` so its Jacobian stays finite at u = 0.
* ``strang_exact_reaction``: half step of the exact reaction flow, implicit
  diffusion by Picard iteration on the lagged coefficient, half step of
  reaction.
"""

from __future__ import annotations

import dataclasses
import json
import math
import time
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.linalg import solve_banded

from .closed_forms import phi_value, reaction_exact_solution, write_csv
from .constants import fast_diffusion_constant
from .exceptions import ClipWarning, DomainError, PicardDivergence
from .params import Params, validate
from .regimes import Region, classify


@dataclass(frozen=True)
class Grid1D:
    x_lo: float
    x_hi: float
    n_cells: int

    def __post_init__(self):
        if not self.x_lo < 0 < self.x_hi:
            raise DomainError("grid must contain the origin strictly inside")
        if int(self.n_cells) < 64:
            raise DomainError("need at least 64 cells")
        object.__setattr__(self, "n_cells", int(self.n_cells))

    @property
    def dx(self) -> float:
        return (self.x_hi - self.x_lo) / self.n_cells

    @property
    def centers(self) -> np.ndarray:
        return self.x_lo + (np.arange(self.n_cells) + 0.5) * self.dx

    @property
    def faces(self) -> np.ndarray:
        return self.x_lo + np.arange(self.n_cells + 1) * self.dx

    def refined(self, factor: float) -> "Grid1D":
        return Grid1D(self.x_lo, self.x_hi, int(round(self.n_cells * factor)))


@dataclass(frozen=True)
class SolverOptions:
    """Numerical knobs.  ``picard_tol``/``picard_max`` bound the nonlinear
    iteration of whichever integrator is selected (Newton or Picard)."""

    eps_reg: float = 1e-12
    dt_init: Optional[float] = None  # default: 1e-8 * t_end
    dt_max: float = math.inf
    dt_rel: Optional[float] = 0.005  # dt <= dt_rel * t
    dt_growth: float = 1.2
    dt_min: Optional[float] = None  # default: 1e-14 * t_end
    picard_tol: float = 1e-10
    picard_max: int = 50
    splitting: str = "unsplit_implicit"
    theta: float = 1.0
    bc: str = "dirichlet_from_data"
    delta_abs: float = 1e-30
    diffusion: bool = True
    snapshot_mode: str = "exact"
    clip_warn: float = 1e-10

    def __post_init__(self):
        if not self.eps_reg > 0 or not self.picard_tol > 0 or not self.delta_abs > 0:
            raise DomainError("regularisation and tolerances must be positive")
        if self.splitting not in ("unsplit_implicit", "strang_exact_reaction"):
            raise DomainError(f"unknown splitting {self.splitting}")
        if self.bc not in ("dirichlet_from_data", "zero", "no_flux"):
            raise DomainError(f"unknown bc {self.bc}")
        if self.snapshot_mode not in ("exact", "interpolate"):
            raise DomainError(f"unknown snapshot mode {self.snapshot_mode}")
        if not 0.5 <= self.theta <= 1.0:
            raise DomainError("theta must lie in [0.5, 1]")

    def replace(self, **kw) -> "SolverOptions":
        return dataclasses.replace(self, **kw)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        return {k: (None if isinstance(v, float) and math.isinf(v) else v) for k, v in d.items()}


@dataclass(frozen=True)
class SolutionField:
    grid: Grid1D
    t: float
    u: np.ndarray
    interpolated: bool = False

    @property
    def x(self) -> np.ndarray:
        return self.grid.centers

    def mass(self) -> float:
        return float(np.sum(self.u) * self.grid.dx)


@dataclass
class Boundary:
    """Face values at the two ends as functions of t; ``None`` means zero flux."""

    left: Optional[Callable[[float], float]]
    right: Optional[Callable[[float], float]]


@dataclass
class Diagnostics:
    steps: int = 0
    rejected: int = 0
    iterations: int = 0
    clipped_mass: float = 0.0
    max_step_clip: float = 0.0
    wall_time: float = 0.0

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass
class SolveResult:
    snapshots: list
    diagnostics: Diagnostics
    params: Params
    grid: Grid1D
    opts: SolverOptions

    def __iter__(self):
        return iter(self.snapshots)

    def __len__(self):
        return len(self.snapshots)

    def __getitem__(self, i):
        return self.snapshots[i]


class _StepFailure(Exception):
    pass


# ------------------------------------------------------------ data and boundaries


def initial_data(grid: Grid1D, params: Params, kind: str = "power_law",
                 func: Optional[Callable] = None) -> SolutionField:
    """C (-x)_+^alpha at cell centres (``kind='power_law'``) or ``func(x)`` (``'custom'``)."""
    x = grid.centers
    if kind == "power_law":
        u = params.C * np.where(x < 0, -x, 0.0) ** params.alpha
    elif kind == "custom":
        if func is None:
            raise DomainError("custom initial data needs func")
        u = np.asarray(func(x), float)
    else:
        raise DomainError(f"unknown initial data kind {kind}")
    return SolutionField(grid, 0.0, u)


def default_boundary(params: Params, grid: Grid1D, opts: SolverOptions) -> Boundary:
    """Left end held at the initial value; right end by regime.

    zero for the finite-front regions, t^{1/(2-p)} phi(x_hi) for the
    exponential-tail region, D t^{1/(2-p)} x_hi^{p/(p-2)} for the power-tail region.
    """
    if opts.bc == "no_flux":
        return Boundary(None, None)
    uL = params.C * (-grid.x_lo) ** params.alpha
    left = lambda t, v=uL: v
    if opts.bc == "zero":
        return Boundary(left, lambda t: 0.0)
    region = classify(params).region
    p = params.p
    if region in (Region.I, Region.II, Region.III):
        right = lambda t: 0.0
    elif region is Region.IV:
        ph = phi_value(grid.x_hi, params)
        right = lambda t, ph=ph: t ** (1.0 / (2.0 - p)) * ph
    else:
        amp = float(fast_diffusion_constant(p)) * grid.x_hi ** (p / (p - 2.0))
        right = lambda t, amp=amp: amp * t ** (1.0 / (2.0 - p))
    return Boundary(left, right)


# ------------------------------------------------------------ discrete operators


def _absorption(u, b, beta, delta):
    if b == 0:
        z = np.zeros_like(u)
        return z, z
    if beta == 1.0:
        return b * u, np.full_like(u, b)
    if beta > 1.0:
        up = np.maximum(u, 0.0)
        return b * up ** beta, b * beta * up ** (beta - 1.0)
    big = u >= delta
    ub = np.where(big, u, delta)
    r = np.where(big, ub ** beta, delta ** (beta - 1.0) * u)
    dr = np.where(big, beta * ub ** (beta - 1.0), delta ** (beta - 1.0))
    return b * r, b * dr


class _Operator:
    """Residual pieces of the spatial operator A(u) = -div F(u) + b r(u)."""

    def __init__(self, grid: Grid1D, params: Params, opts: SolverOptions):
        n = grid.n_cells
        self.dx = grid.dx
        self.h = np.full(n + 1, grid.dx)
        self.h[0] = self.h[-1] = grid.dx / 2.0
        self.p = params.p
        self.b = params.b
        self.beta = params.beta
        self.eps2 = opts.eps_reg ** 2
        self.delta = opts.delta_abs
        self.diffusion = opts.diffusion

    def fluxes(self, u, uL, uR):
        """Face fluxes and dF/dg / h (the conductance) for Dirichlet or zero-flux ends."""
        a = u[0] if uL is None else uL
        c = u[-1] if uR is None else uR
        ext = np.concatenate(([a], u, [c]))
        g = np.diff(ext) / self.h
        s = g * g + self.eps2
        F = s ** ((self.p - 2.0) / 2.0) * g
        kap = s ** ((self.p - 4.0) / 2.0) * ((self.p - 1.0) * g * g + self.eps2) / self.h / self.dx
        if not self.diffusion:
            F = np.zeros_like(F)
            kap = np.zeros_like(kap)
        if uL is None:
            F[0] = 0.0
            kap[0] = 0.0
        if uR is None:
            F[-1] = 0.0
            kap[-1] = 0.0
        return F, kap

    def apply(self, u, uL, uR):
        F, kap = self.fluxes(u, uL, uR)
        r, dr = _absorption(u, self.b, self.beta, self.delta)
        return -np.diff(F) / self.dx + r, kap, dr


def _tridiag(kap, diag):
    n = diag.size
    ab = np.zeros((3, n))
    ab[0, 1:] = -kap[1:-1]
    ab[1] = diag + kap[:-1] + kap[1:]
    ab[2, :-1] = -kap[1:-1]
    return ab


def _newton_step(op: _Operator, u_old, dt, bnd_new, bnd_old, theta, tol, maxit):
    uL, uR = bnd_new
    expl = 0.0
    if theta < 1.0:
        expl = (1.0 - theta) * op.apply(u_old, *bnd_old)[0]

    def resid(u):
        A, kap, dr = op.apply(u, uL, uR)
        return (u - u_old) / dt + theta * A + expl, theta * kap, theta * dr

    u = u_old.copy()
    R, kap, dr = resid(u)
    clip = 0.0
    for it in range(1, maxit + 1):
        du = solve_banded((1, 1), _tridiag(kap, 1.0 / dt + dr), -R, check_finite=False)
        if not np.all(np.isfinite(du)):
            raise _StepFailure("non-finite Newton update")
        lam, nr0 = 1.0, np.max(np.abs(R))
        while True:
            trial = u + lam * du
            un = np.maximum(trial, 0.0)
            Rn, kapn, drn = resid(un)
            if np.max(np.abs(Rn)) < nr0 or lam < 1e-4:
                break
            lam *= 0.5
        clip = float(np.sum(np.maximum(-trial, 0.0)) * op.dx)
        change = np.max(np.abs(un - u))
        u, R, kap, dr = un, Rn, kapn, drn
        if change <= tol * np.max(u):
            return u, it, clip
    raise _StepFailure("Newton did not converge")


def _picard_diffusion(op: _Operator, u_old, dt, bnd, tol, maxit):
    uL, uR = bnd
    u = u_old.copy()
    for it in range(1, maxit + 1):
        a = u[0] if uL is None else uL
        c = u[-1] if uR is None else uR
        ext = np.concatenate(([a], u, [c]))
        g = np.diff(ext) / op.h
        coef = (g * g + op.eps2) ** ((op.p - 2.0) / 2.0) / op.h / op.dx
        if uL is None:
            coef[0] = 0.0
        if uR is None:
            coef[-1] = 0.0
        rhs = u_old / dt
        rhs[0] += coef[0] * (0.0 if uL is None else uL)
        rhs[-1] += coef[-1] * (0.0 if uR is None else uR)
        un = solve_banded((1, 1), _tridiag(coef, np.full(u.size, 1.0 / dt)), rhs, check_finite=False)
        trial = un
        un = np.maximum(un, 0.0)
        change = np.max(np.abs(un - u))
        u = un
        if change <= tol * max(np.max(u), 1e-300):
            return u, it, float(np.sum(np.maximum(-trial, 0.0)) * op.dx)
    raise PicardDivergence(f"Picard iteration did not converge in {maxit} sweeps")


def _advance(op, params, opts, u, t, dt, boundary: Boundary):
    """One step from t to t+dt; returns (u_new, iterations, clipped mass)."""
    ev = lambda f, s: None if f is None else f(s)
    bnd_new = (ev(boundary.left, t + dt), ev(boundary.right, t + dt))
    if opts.splitting == "unsplit_implicit":
        bnd_old = (ev(boundary.left, t), ev(boundary.right, t))
        return _newton_step(op, u, dt, bnd_new, bnd_old, opts.theta, opts.picard_tol, opts.picard_max)
    half = reaction_exact_solution(u, 0.5 * dt, params)
    if opts.diffusion:
        try:
            mid, its, clip = _picard_diffusion(op, half, dt, bnd_new, opts.picard_tol, opts.picard_max)
        except PicardDivergence as exc:
            raise _StepFailure(str(exc)) from exc
    else:
        mid, its, clip = half, 0, 0.0
    return reaction_exact_solution(mid, 0.5 * dt, params), its, clip


def step(state: SolutionField, dt: float, params: Params, opts: SolverOptions = SolverOptions(),
         boundary: Optional[Boundary] = None) -> SolutionField:
    """Advance a field by one step of size dt."""
    if not dt > 0:
        raise DomainError("dt must be positive")
    if not np.all(np.isfinite(state.u)):
        raise DomainError("state is not finite")
    boundary = boundary or default_boundary(params, state.grid, opts)
    op = _Operator(state.grid, params, opts)
    try:
        u, _, clip = _advance(op, params, opts, state.u, state.t, dt, boundary)
    except _StepFailure as exc:
        raise PicardDivergence(str(exc)) from exc
    _warn_clip(clip, u, state.grid.dx, opts)
    return SolutionField(state.grid, state.t + dt, u)


def _warn_clip(clip, u, dx, opts):
    mass = float(np.sum(u) * dx)
    if clip > opts.clip_warn * max(mass, 1e-300) and clip > 0:
        warnings.warn(f"clipped mass {clip:.3e} exceeds {opts.clip_warn:g} of total {mass:.3e}", ClipWarning)


def solve(params: Params, grid: Grid1D, opts: SolverOptions = SolverOptions(), t_end: Optional[float] = None,
          snapshot_times: Sequence[float] = (), initial: Optional[SolutionField] = None,
          boundary: Optional[Boundary] = None) -> SolveResult:
    """Evolve from the initial data, returning snapshots at the requested times.

    With ``snapshot_mode='exact'`` steps are shortened to land on every
    requested time; with ``'interpolate'`` snapshots are linear in time
    between the bracketing steps and flagged as interpolated.
    """
    validate(params)
    times = sorted(float(s) for s in snapshot_times)
    if t_end is None:
        if not times:
            raise DomainError("need t_end or snapshot times")
        t_end = times[-1]
    if not t_end > 0:
        raise DomainError("t_end must be positive")
    if any(s < 0 or s > t_end * (1 + 1e-12) for s in times):
        raise DomainError("snapshot times must lie in [0, t_end]")
    if not times or times[-1] < t_end:
        times.append(t_end)
    state = initial or initial_data(grid, params)
    boundary = boundary or default_boundary(params, grid, opts)
    op = _Operator(grid, params, opts)
    dt = opts.dt_init if opts.dt_init is not None else 1e-8 * t_end
    dt_min = opts.dt_min if opts.dt_min is not None else 1e-14 * t_end
    diag = Diagnostics()
    t0 = time.perf_counter()
    u, t = state.u.copy(), state.t
    snaps = []
    k = 0
    while k < len(times) and times[k] <= t:
        snaps.append(SolutionField(grid, times[k], u.copy()))
        k += 1
    while k < len(times):
        target = times[k]
        h = min(dt, opts.dt_max)
        exact = opts.snapshot_mode == "exact"
        if exact and t + h >= target * (1 - 1e-13):
            h = target - t
        try:
            un, its, clip = _advance(op, params, opts, u, t, h, boundary)
        except _StepFailure as exc:
            diag.rejected += 1
            dt = 0.5 * h
            if dt < dt_min:
                raise PicardDivergence(f"time step underflow at t={t:.3e}: {exc}") from exc
            continue
        diag.steps += 1
        diag.iterations += its
        diag.clipped_mass += clip
        diag.max_step_clip = max(diag.max_step_clip, clip)
        _warn_clip(clip, un, grid.dx, opts)
        t_new = target if exact and h == target - t else t + h
        while k < len(times) and times[k] <= t_new * (1 + 1e-13):
            if t_new == times[k] or abs(t_new - times[k]) <= 1e-13 * times[k]:
                snaps.append(SolutionField(grid, times[k], un.copy()))
            else:
                w = (times[k] - t) / (t_new - t)
                snaps.append(SolutionField(grid, times[k], (1 - w) * u + w * un, interpolated=True))
            k += 1
        u, t = un, t_new
        if h >= 0.999 * dt or not exact:
            dt = dt * opts.dt_growth
        if opts.dt_rel is not None:
            dt = min(dt, opts.dt_rel * t)
        dt = min(max(dt, dt_min), opts.dt_max)
    diag.wall_time = time.perf_counter() - t0
    return SolveResult(snaps, diag, params, grid, opts)


# ------------------------------------------------------------ scaling symmetry


def scaling_identity_check(params: Params, k: float, grid: Grid1D, opts: SolverOptions = SolverOptions(),
                           t_probe: float = 1.0, level: float = 1e-6) -> float:
    """Max deviation between u(x,t) and k u(k^{-(p-1-beta)/p} x, k^{beta-1} t).

    Both sides come from runs on the same grid; the right side is linearly
    interpolated to the rescaled points.  Probe points are the cells where
    u(x, t_probe) exceeds ``level`` times its maximum and whose rescaled image
    lies inside the grid.  The deviation is relative to that maximum.
    """
    a = params.gap / params.p
    t_b = k ** (params.beta - 1.0) * t_probe
    ua = solve(params, grid, opts, snapshot_times=[t_probe])[-1].u
    if k == 1.0:
        return 0.0
    ub = solve(params, grid, opts, snapshot_times=[t_b])[-1].u
    x = grid.centers
    xs = k ** (-a) * x
    scale = np.max(ua)
    inside = (xs > x[0]) & (xs < x[-1]) & (ua > level * scale)
    # keep clear of the left end, where the truncated problems differ
    inside &= (x > 0.5 * grid.x_lo) & (xs > 0.5 * grid.x_lo)
    rhs = k * np.interp(xs[inside], x, ub)
    return float(np.max(np.abs(ua[inside] - rhs)) / np.max(np.abs(ua[inside])))


# ------------------------------------------------------------ output


def write_snapshots_csv(path, snapshots: Sequence[SolutionField]) -> None:
    ts, xs, us = [], [], []
    for s in snapshots:
        ts.append(np.full(s.grid.n_cells, s.t))
        xs.append(s.x)
        us.append(s.u)
    write_csv(path, ["t", "x", "u"], [np.concatenate(ts), np.concatenate(xs), np.concatenate(us)])


def run_manifest(result: SolveResult) -> dict:
    return {
        "params": result.params.to_dict(),
        "grid": dataclasses.asdict(result.grid),
        "opts": result.opts.to_dict(),
        "wall_time": result.diagnostics.wall_time,
        "diagnostics": result.diagnostics.to_dict(),
        "snapshot_times": [s.t for s in result.snapshots],
        "interpolated": [s.interpolated for s in result.snapshots],
    }
