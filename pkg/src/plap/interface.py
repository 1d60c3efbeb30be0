"""Front extraction, power-law fits, sandwich checks and tail regressions."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .closed_forms import write_csv
from .exceptions import DegenerateFit, DomainError, WindowTooNoisy
from .params import Params
from .regimes import Region, classify

OK = "ok"
NO_INTERFACE = "no_interface"  # positive up to the right end
EMPTY = "empty"  # nothing above threshold: eta = -inf


@dataclass
class InterfaceTrace:
    t: np.ndarray
    eta: np.ndarray
    status: list
    threshold_abs: float
    method: str

    def valid(self) -> np.ndarray:
        return np.array([s == OK for s in self.status], dtype=bool)

    def to_csv(self, path) -> None:
        write_csv(path, ["t", "eta", "status"], [self.t, self.eta, np.array(self.status)])


def front_power(params: Params) -> Optional[float]:
    """(p-1-beta)/p for the finite-front regions; u^power vanishes linearly at the edge."""
    region = classify(params).region
    if region in (Region.I, Region.II, Region.III):
        return params.gap / params.p
    return None


def _front_of(x, u, thr, power, method, dx):
    above = np.nonzero(u > thr)[0]
    if above.size == 0:
        return -math.inf, EMPTY
    i = above[-1]
    if i == u.size - 1:
        return math.inf, NO_INTERFACE
    if method == "zero_extrapolation" and power is not None and i >= 1:
        w0, w1 = u[i - 1] ** power, u[i] ** power
        if w0 > w1:
            # the zero may lie several cells past the threshold crossing
            return min(x[i] + w1 * dx / (w0 - w1), x[-1]), OK
        return x[i], OK
    # interpolate to the threshold between cells i and i+1
    tr = (lambda v: v ** power) if power is not None else (lambda v: v)
    a, b, c = tr(u[i]), tr(u[i + 1]), tr(thr)
    frac = 0.0 if a == b else (a - c) / (a - b)
    return x[i] + min(max(frac, 0.0), 1.0) * dx, OK


def extract_interface(snapshots, threshold_abs: float = 1e-10, power: Optional[float] = None,
                      method: Optional[str] = None, threshold_rel: float = 0.0) -> InterfaceTrace:
    """Rightmost point of the positivity set for each snapshot.

    ``power`` linearises the edge (u^power ~ distance to the front).  With
    ``method='zero_extrapolation'`` (the default when ``power`` is given) the
    front is where the straight line through the last two cells above the
    threshold reaches zero, which does not depend on the threshold value;
    ``'threshold_interp'`` interpolates to the threshold itself.
    """
    if not threshold_abs > 0:
        raise DomainError("threshold must be positive")
    method = method or ("zero_extrapolation" if power is not None else "threshold_interp")
    ts, etas, status = [], [], []
    for s in snapshots:
        thr = max(threshold_abs, threshold_rel * float(np.max(s.u)))
        eta, st = _front_of(s.x, s.u, thr, power, method, s.grid.dx)
        ts.append(s.t)
        etas.append(eta)
        status.append(st)
    return InterfaceTrace(np.array(ts), np.array(etas), status, threshold_abs, method)


# ------------------------------------------------------------ power laws


class PowerLawRegressor(RegressorMixin, BaseEstimator):
    """|y| = coefficient * t^exponent by least squares in log-log coordinates."""

    def fit(self, X, y):
        X, y = check_X_y(np.asarray(X, float).reshape(-1, 1), y, y_numeric=True)
        t = X[:, 0]
        if np.any(t <= 0):
            raise DegenerateFit("t must be positive")
        signs = np.sign(y)
        if np.any(signs == 0) or np.unique(signs).size > 1:
            raise DegenerateFit("samples change sign (or vanish) inside the window")
        lt, ly = np.log(t), np.log(np.abs(y))
        A = np.column_stack([lt, np.ones_like(lt)])
        coef, res, *_ = np.linalg.lstsq(A, ly, rcond=None)
        self.exponent_, self.log_coefficient_ = float(coef[0]), float(coef[1])
        self.sign_ = float(signs[0])
        fit = A @ coef
        ss_res = float(np.sum((ly - fit) ** 2))
        ss_tot = float(np.sum((ly - ly.mean()) ** 2))
        self.r_squared_ = 1.0 if ss_tot == 0 else max(0.0, 1.0 - ss_res / ss_tot)
        n = lt.size
        sxx = float(np.sum((lt - lt.mean()) ** 2))
        self.stderr_ = math.sqrt(ss_res / (n - 2) / sxx) if n > 2 and sxx > 0 else 0.0
        return self

    def predict(self, X):
        check_is_fitted(self, "exponent_")
        t = check_array(np.asarray(X, float).reshape(-1, 1))[:, 0]
        return self.sign_ * np.exp(self.log_coefficient_) * t ** self.exponent_


@dataclass
class PowerLawFit:
    exponent: float
    coefficient: float
    r_squared: float
    window: tuple
    local_slopes: list
    stderr: float
    n_samples: int

    def to_dict(self) -> dict:
        d = asdict(self)
        d["local_slopes"] = [list(v) for v in self.local_slopes]
        return d


def fit_power_law(trace, window: Optional[tuple] = None, min_samples: int = 8) -> PowerLawFit:
    """Least-squares power law on |eta| over a time window.

    ``trace`` is an InterfaceTrace or a pair (t, eta).
    """
    if isinstance(trace, InterfaceTrace):
        t, eta, ok = trace.t, trace.eta, trace.valid()
    else:
        t, eta = (np.asarray(v, float) for v in trace)
        ok = np.isfinite(eta)
    lo, hi = window if window is not None else (t[ok].min(), t[ok].max())
    sel = ok & (t >= lo * (1 - 1e-12)) & (t <= hi * (1 + 1e-12))
    if sel.sum() < min_samples:
        raise DegenerateFit(f"{int(sel.sum())} samples in window, need {min_samples}")
    ts, es = t[sel], eta[sel]
    reg = PowerLawRegressor().fit(ts, es)
    order = np.argsort(ts)
    ts, es = ts[order], es[order]
    lt, le = np.log(ts), np.log(np.abs(es))
    slopes = [(float(math.sqrt(ts[i] * ts[i + 1])), float((le[i + 1] - le[i]) / (lt[i + 1] - lt[i])))
              for i in range(ts.size - 1)]
    return PowerLawFit(reg.exponent_, reg.sign_ * math.exp(reg.log_coefficient_), reg.r_squared_,
                       (float(lo), float(hi)), slopes, reg.stderr_, int(ts.size))


# ------------------------------------------------------------ sandwiches


@dataclass
class SandwichReport:
    lower_violations: int
    upper_violations: int
    worst_lower_margin: float
    worst_upper_margin: float
    lower_checked: int
    upper_checked: int
    tolerance: float
    constants: dict = field(default_factory=dict)
    times: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.lower_violations == 0 and self.upper_violations == 0

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)


def check_sandwich(snapshots, lower: Optional[Callable] = None, upper: Optional[Callable] = None,
                   lower_valid: Optional[Callable] = None, upper_valid: Optional[Callable] = None,
                   tol_rel: float = 0.02, disc_rel: float = 0.0, disc_abs: Optional[Sequence] = None,
                   abs_floor: float = 0.0, constants: Optional[dict] = None) -> SandwichReport:
    """Count points where u leaves [lower, upper] by more than the tolerance.

    Margins are relative to max(|u|, |bound|).  The allowed slack per point is
    (tol_rel + 2 disc_rel) times that scale plus 2 disc_abs (per snapshot
    arrays of absolute error estimates) plus ``abs_floor``.  The *_valid
    callables restrict each side to its region of validity.
    """
    tol = tol_rel + 2.0 * disc_rel
    nl = nu = cl = cu = 0
    wl = wu = math.inf
    for j, s in enumerate(snapshots):
        x, u = s.x, s.u
        slack = abs_floor + (2.0 * np.asarray(disc_abs[j]) if disc_abs is not None else 0.0)
        for side in ("lower", "upper"):
            bound = lower if side == "lower" else upper
            if bound is None:
                continue
            valid = lower_valid if side == "lower" else upper_valid
            mask = np.ones_like(x, dtype=bool) if valid is None else np.asarray(valid(x, s.t), bool)
            v = np.asarray(bound(x, s.t), float)
            scale = np.maximum(np.abs(u), np.abs(v))
            diff = (u - v) if side == "lower" else (v - u)
            allowed = tol * scale + slack
            bad = mask & (diff < -allowed)
            with np.errstate(divide="ignore", invalid="ignore"):
                margin = np.where(scale > 0, diff / scale, 0.0)
            worst = float(np.min(margin[mask])) if mask.any() else math.inf
            if side == "lower":
                nl += int(bad.sum())
                cl += int(mask.sum())
                wl = min(wl, worst)
            else:
                nu += int(bad.sum())
                cu += int(mask.sum())
                wu = min(wu, worst)
    return SandwichReport(nl, nu, wl, wu, cl, cu, tol, dict(constants or {}),
                          [float(s.t) for s in snapshots])


# ------------------------------------------------------------ tails


@dataclass
class TailFit:
    slope: float
    coefficient: float
    r_squared: float
    window: tuple
    kind: str
    limit_coefficient: Optional[float] = None
    shift: Optional[float] = None

    def to_dict(self) -> dict:
        return asdict(self)


def _linfit(x, y):
    A = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    fit = A @ coef
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - float(np.sum((y - fit) ** 2)) / ss_tot
    return float(coef[0]), float(coef[1]), r2


def tail_asymptote(snapshot, x_window: tuple, kind: str = "power", shifted_exponent: Optional[float] = None,
                   exclude_outer: float = 0.1, min_r2: float = 0.99) -> TailFit:
    """Regression of the far field over ``x_window``.

    ``kind='power'``: log u against log x (slope is the decay power,
    coefficient the prefactor).  ``kind='exponential'``: log u against x.
    With ``shifted_exponent`` q the law u = K (x + x0)^q is also fitted
    through u^{1/q}, which is linear in x; K is reported as
    ``limit_coefficient``, the large-x limit of u x^{-q}.
    """
    x, u = snapshot.x, snapshot.u
    g = snapshot.grid
    x_cap = g.x_hi - exclude_outer * (g.x_hi - g.x_lo)
    lo, hi = x_window
    sel = (x >= lo) & (x <= min(hi, x_cap))
    if sel.sum() < 3:
        raise DomainError("tail window holds fewer than three cells")
    xs, us = x[sel], u[sel]
    if np.any(us <= 0):
        raise DomainError("solution not positive on the tail window")
    if kind == "power":
        if lo <= 0:
            raise DomainError("power tails need x > 0")
        slope, icpt, r2 = _linfit(np.log(xs), np.log(us))
    elif kind == "exponential":
        slope, icpt, r2 = _linfit(xs, np.log(us))
    else:
        raise DomainError(f"unknown tail kind {kind}")
    if r2 < min_r2:
        raise WindowTooNoisy(f"r^2 = {r2:.4f} < {min_r2}")
    out = TailFit(slope, math.exp(icpt), r2, (float(xs[0]), float(xs[-1])), kind)
    if shifted_exponent is not None:
        q = shifted_exponent
        s, c, _ = _linfit(xs, us ** (1.0 / q))
        out.limit_coefficient = s ** q
        out.shift = c / s
    return out
