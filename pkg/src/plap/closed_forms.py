"""Closed-form solutions, barrier functions and residual operators.

Each barrier is evaluated together with its exact first/second space
derivatives and time derivative, so PDE residuals are analytic rather than
finite-difference approximations.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate, optimize

from .constants import (
    _cstar,
    fast_diffusion_constant,
    region1_bracket,
)
from .exceptions import DomainError, OnFreeBoundary, TailUnderflow
from .params import Params

COLLAR = 1e-12


class TargetSign(str, enum.Enum):
    SUBSOLUTION = "subsolution"  # residual <= 0
    SUPERSOLUTION = "supersolution"  # residual >= 0
    EXACT = "exact"  # residual == 0


BARRIER_IDS = (
    "ThmI_lower",
    "ThmI_upper",
    "ThmII_lower",
    "ThmV_tail",
    "ThmV_bneg_tail",
    "B0_upper_gmu",
    "Lemma33_g",
    "ReactionOnly_ubar",
    "Stationary_Cstar",
)


@dataclass(frozen=True)
class Box:
    """Space-time rectangle on which a barrier is meant to be used."""

    x_lo: float
    x_hi: float
    t_lo: float
    t_hi: float


@dataclass(frozen=True)
class Derivs:
    u: np.ndarray
    u_t: np.ndarray
    u_x: np.ndarray
    u_xx: np.ndarray


def _zeros_like(x):
    z = np.zeros_like(x, dtype=float)
    return z


# ------------------------------------------------------------ evaluators


def _zeta_family(x, t, prm: Params, C0, zeta0):
    """t^{1/(1-beta)} C0 (zeta0 - zeta)_+^m with zeta = x t^{-c}."""
    q = 1.0 / (1.0 - prm.beta)
    c = prm.gap / (prm.p * (1.0 - prm.beta))
    m = prm.p / prm.gap
    zeta = x * t ** (-c)
    s = zeta0 - zeta
    pos = s > 0
    sp = np.where(pos, s, 1.0)
    f = np.where(pos, C0 * sp ** m, 0.0)
    df = np.where(pos, -m * C0 * sp ** (m - 1.0), 0.0)
    d2f = np.where(pos, m * (m - 1.0) * C0 * sp ** (m - 2.0), 0.0)
    return Derivs(
        u=t ** q * f,
        u_t=t ** (q - 1.0) * (q * f - c * zeta * df),
        u_x=t ** (q - c) * df,
        u_xx=t ** (q - 2.0 * c) * d2f,
    )


def _stationary(x, t, prm: Params, C0, side):
    m = prm.p / prm.gap
    y = side * x
    pos = y > 0
    yp = np.where(pos, y, 1.0)
    u = np.where(pos, C0 * yp ** m, 0.0)
    ux = np.where(pos, side * m * C0 * yp ** (m - 1.0), 0.0)
    uxx = np.where(pos, m * (m - 1.0) * C0 * yp ** (m - 2.0), 0.0)
    return Derivs(u, _zeros_like(u), ux, uxx)


def _travelling(x, t, prm: Params, C0):
    m = prm.p / prm.gap
    s = t - x
    pos = s > 0
    sp = np.where(pos, s, 1.0)
    u = np.where(pos, C0 * sp ** m, 0.0)
    d1 = np.where(pos, m * C0 * sp ** (m - 1.0), 0.0)
    d2 = np.where(pos, m * (m - 1.0) * C0 * sp ** (m - 2.0), 0.0)
    return Derivs(u, d1, -d1, d2)


def _reaction_only(x, t, prm: Params):
    beta, b, C, a = prm.beta, prm.b, prm.C, prm.alpha
    y = -x
    ypos = y > 0
    yp = np.where(ypos, y, 1.0)
    if beta == 1.0:
        decay = np.exp(-b * t)
        u = np.where(ypos, C * yp ** a * decay, 0.0)
        duy = np.where(ypos, C * a * yp ** (a - 1.0) * decay, 0.0)
        d2 = np.where(ypos, C * a * (a - 1.0) * yp ** (a - 2.0) * decay, 0.0)
        return Derivs(u, -b * u, -duy, d2)
    q = 1.0 / (1.0 - beta)
    r = a * (1.0 - beta)
    K = C ** (1.0 - beta)
    B = K * yp ** r - b * (1.0 - beta) * t
    pos = ypos & (B > 0)
    Bp = np.where(pos, B, 1.0)
    u = np.where(pos, Bp ** q, 0.0)
    dB = K * r * yp ** (r - 1.0)
    d2B = K * r * (r - 1.0) * yp ** (r - 2.0)
    duy = np.where(pos, q * Bp ** (q - 1.0) * dB, 0.0)
    d2 = np.where(pos, q * (q - 1.0) * Bp ** (q - 2.0) * dB ** 2 + q * Bp ** (q - 1.0) * d2B, 0.0)
    ut = np.where(pos, -q * b * (1.0 - beta) * Bp ** (q - 1.0), 0.0)
    return Derivs(u, ut, -duy, d2)


def _xi_tail(x, t, prm: Params, C0, xi0):
    """t^{alpha/P} C0 (xi0 + xi)^{p/(p-2)} with xi = x t^{-1/P}."""
    P = prm.diffusive_scale
    a, k = prm.alpha / P, 1.0 / P
    g = prm.p / (2.0 - prm.p)
    xi = x * t ** (-k)
    w = xi0 + xi
    f = C0 * w ** (-g)
    df = -g * C0 * w ** (-g - 1.0)
    d2f = g * (g + 1.0) * C0 * w ** (-g - 2.0)
    return Derivs(
        u=t ** a * f,
        u_t=t ** (a - 1.0) * (a * f - k * xi * df),
        u_x=t ** (a - k) * df,
        u_xx=t ** (a - 2.0 * k) * d2f,
    )


def _separable_tail(x, t, prm: Params, amp, t_shift, x_shift):
    """amp (t + t_shift)^{1/(2-p)} (x + x_shift)^{p/(p-2)}."""
    p = prm.p
    e = p / (p - 2.0)
    X = x + x_shift
    T = t + t_shift
    u = amp * T ** (1.0 / (2.0 - p)) * X ** e
    return Derivs(u, u / ((2.0 - p) * T), e * u / X, e * (e - 1.0) * u / X ** 2)


# ------------------------------------------------------------ barrier spec


@dataclass(frozen=True)
class BarrierSpec:
    """A closed-form sub/supersolution and where it is meant to be used."""

    id: str
    params: Params
    constants: dict
    region: Box
    target_sign: TargetSign
    operator: str = "full"  # "full" PDE residual, or "reaction" (u_t + b u^beta)

    def evaluate(self, x, t) -> Derivs:
        x = np.asarray(x, dtype=float)
        t = np.asarray(t, dtype=float)
        x, t = np.broadcast_arrays(x, t)
        c, prm = self.constants, self.params
        i = self.id
        if i in ("ThmI_lower", "ThmI_upper", "ThmII_lower"):
            return _zeta_family(x, t, prm, c["C0"], c["zeta0"])
        if i == "Stationary_Cstar":
            return _stationary(x, t, prm, c["C0"], c.get("side", 1.0))
        if i == "Lemma33_g":
            return _travelling(x, t, prm, c["C0"])
        if i == "ReactionOnly_ubar":
            return _reaction_only(x, t, prm)
        if i == "ThmV_tail":
            return _xi_tail(x, t, prm, c["C0"], c["xi0"])
        if i == "ThmV_bneg_tail":
            return _separable_tail(x, t, prm, c["amp"], 0.0, 0.0)
        if i == "B0_upper_gmu":
            return _separable_tail(x, t, prm, c["amp"], c["mu"], c["mu"])
        raise KeyError(i)

    def __call__(self, x, t):
        return self.evaluate(x, t).u

    def support_edge(self, t) -> Optional[np.ndarray]:
        """Location of the barrier's own free boundary at time t, if it has one."""
        t = np.asarray(t, dtype=float)
        c, prm = self.constants, self.params
        if self.id in ("ThmI_lower", "ThmI_upper", "ThmII_lower"):
            return c["zeta0"] * t ** (prm.gap / (prm.p * (1.0 - prm.beta)))
        if self.id == "Stationary_Cstar":
            return np.zeros_like(t)
        if self.id == "Lemma33_g":
            return t
        if self.id == "ReactionOnly_ubar":
            if prm.beta >= 1.0 or prm.b <= 0:
                return np.zeros_like(t)
            r = prm.alpha * (1.0 - prm.beta)
            return -((prm.b * (1.0 - prm.beta) * t / prm.C ** (1.0 - prm.beta)) ** (1.0 / r))
        return None


def make_barrier(barrier_id: str, params: Params, region: Optional[Box] = None, **consts) -> BarrierSpec:
    """Build a catalog barrier, filling in default constants where they are determined by params.

    Required extra inputs: ``zeta5`` for ThmII_lower; ``C0`` and ``xi0`` for
    ThmV_tail; ``epsilon`` for ThmV_bneg_tail; ``mu`` for B0_upper_gmu;
    ``C0`` in (C*, C) for Lemma33_g.
    """
    p = params.p
    box = region or Box(0.0, 1.0, 0.0, 1.0)
    if barrier_id == "ThmI_lower":
        r1 = region1_bracket(params)
        c = {"C0": r1["C1"], "zeta0": r1["zeta1"]}
        sign = TargetSign.SUBSOLUTION
    elif barrier_id == "ThmI_upper":
        r1 = region1_bracket(params)
        c = {"C0": _cstar(p, params.b, params.beta), "zeta0": r1["zeta2"], "ell0": r1["ell0"]}
        sign = TargetSign.SUPERSOLUTION
    elif barrier_id == "ThmII_lower":
        c = {"C0": _cstar(p, params.b, params.beta), "zeta0": -consts.pop("zeta5")}
        sign = TargetSign.SUBSOLUTION
    elif barrier_id == "Stationary_Cstar":
        c = {"C0": _cstar(p, params.b, params.beta), "side": consts.pop("side", 1.0)}
        sign = TargetSign.EXACT
    elif barrier_id == "Lemma33_g":
        c = {"C0": consts.pop("C0")}
        sign = TargetSign.SUBSOLUTION
    elif barrier_id == "ReactionOnly_ubar":
        c = {}
        sign = TargetSign.EXACT
    elif barrier_id == "ThmV_tail":
        c = {"C0": consts.pop("C0"), "xi0": consts.pop("xi0")}
        sign = TargetSign(consts.pop("target", TargetSign.SUPERSOLUTION))
    elif barrier_id == "ThmV_bneg_tail":
        eps = consts.pop("epsilon")
        c = {"epsilon": eps, "amp": fast_diffusion_constant(p) * (1.0 - eps) ** (1.0 / (p - 2.0))}
        sign = TargetSign.SUPERSOLUTION
    elif barrier_id == "B0_upper_gmu":
        c = {"mu": consts.pop("mu"), "amp": fast_diffusion_constant(p)}
        sign = TargetSign.EXACT
    else:
        raise KeyError(f"unknown barrier {barrier_id}")
    c.update(consts)
    op = "reaction" if barrier_id == "ReactionOnly_ubar" else "full"
    return BarrierSpec(barrier_id, params, c, box, sign, op)


def catalog(params: Params) -> dict:
    """Barriers that are fully determined by params alone (no profile data)."""
    out = {}
    for bid in ("ThmI_lower", "ThmI_upper", "Stationary_Cstar", "ReactionOnly_ubar"):
        try:
            out[bid] = make_barrier(bid, params)
        except (DomainError, KeyError):
            continue
    return out


# ------------------------------------------------------------ residuals


def _flux_divergence(ux, uxx, p):
    nz = ux != 0
    a = np.where(nz, np.abs(np.where(nz, ux, 1.0)) ** (p - 2.0), 0.0)
    return (p - 1.0) * a * uxx


def _check_collar(barrier: BarrierSpec, x, t, collar: float):
    edge = barrier.support_edge(t)
    if edge is None:
        return
    x, edge = np.broadcast_arrays(np.asarray(x, float), edge)
    if np.any(np.abs(x - edge) <= collar * np.maximum(1.0, np.abs(edge))):
        raise OnFreeBoundary("evaluation point on the barrier's support edge")


def residual_L(barrier, x, t, params: Optional[Params] = None, collar: float = COLLAR):
    """u_t - (|u_x|^{p-2} u_x)_x + b u^beta from exact derivatives.

    ``barrier`` is a BarrierSpec or any callable (x, t) -> Derivs.
    """
    if isinstance(barrier, BarrierSpec):
        prm = params or barrier.params
        _check_collar(barrier, x, t, collar)
        d = barrier.evaluate(x, t)
    else:
        prm = params
        d = barrier(np.asarray(x, float), np.asarray(t, float))
    u = np.asarray(d.u, float)
    react = prm.b * np.where(u > 0, np.abs(u) ** prm.beta, 0.0)
    return d.u_t - _flux_divergence(d.u_x, d.u_xx, prm.p) + react


def residual_reaction(barrier: BarrierSpec, x, t):
    """u_t + b u^beta, the residual of the diffusion-free flow."""
    d = barrier.evaluate(x, t)
    prm = barrier.params
    return d.u_t + prm.b * np.where(d.u > 0, np.abs(d.u) ** prm.beta, 0.0)


@dataclass(frozen=True)
class ProfileFunction:
    """A one-variable profile with exact derivatives and an optional support edge."""

    f: Callable
    df: Callable
    d2f: Callable
    edge: Optional[float] = None


def zeta_power_profile(C0: float, zeta0: float, params: Params) -> ProfileFunction:
    """f(zeta) = C0 (zeta0 - zeta)_+^{p/(p-1-beta)}."""
    m = params.p / params.gap

    def _s(z):
        s = zeta0 - np.asarray(z, float)
        return s > 0, np.where(s > 0, s, 1.0)

    def f(z):
        pos, s = _s(z)
        return np.where(pos, C0 * s ** m, 0.0)

    def df(z):
        pos, s = _s(z)
        return np.where(pos, -m * C0 * s ** (m - 1.0), 0.0)

    def d2f(z):
        pos, s = _s(z)
        return np.where(pos, m * (m - 1.0) * C0 * s ** (m - 2.0), 0.0)

    return ProfileFunction(f, df, d2f, zeta0)


def xi_tail_profile(C0: float, xi0: float, params: Params) -> ProfileFunction:
    """f(xi) = C0 (xi0 + xi)^{p/(p-2)}."""
    g = params.p / (2.0 - params.p)
    return ProfileFunction(
        lambda z: C0 * (xi0 + np.asarray(z, float)) ** (-g),
        lambda z: -g * C0 * (xi0 + np.asarray(z, float)) ** (-g - 1.0),
        lambda z: g * (g + 1.0) * C0 * (xi0 + np.asarray(z, float)) ** (-g - 2.0),
    )


def residual_similarity_zeta(f1: ProfileFunction, zeta, params: Params, collar: float = COLLAR):
    """Similarity operator for profiles of t^{1/(1-beta)} f1(x t^{-c}).

    f1/(1-beta) - c zeta f1' - (|f1'|^{p-2} f1')' + b f1^beta.
    """
    zeta = np.asarray(zeta, float)
    if f1.edge is not None and np.any(np.abs(zeta - f1.edge) <= collar * max(1.0, abs(f1.edge))):
        raise OnFreeBoundary("similarity residual requested at the support edge")
    p, beta, b = params.p, params.beta, params.b
    c = params.gap / (p * (1.0 - beta))
    f, df, d2f = f1.f(zeta), f1.df(zeta), f1.d2f(zeta)
    react = b * np.where(f > 0, np.abs(f) ** beta, 0.0)
    return f / (1.0 - beta) - c * zeta * df - _flux_divergence(df, d2f, p) + react


def zeta_power_factored(C0: float, zeta0: float, zeta, params: Params):
    """Factored form of the similarity residual of C0 (zeta0 - zeta)_+^m."""
    p, beta, b = params.p, params.beta, params.b
    gap = params.gap
    cst = _cstar(p, b, beta)
    s = zeta0 - np.asarray(zeta, float)
    pos = s > 0
    sp = np.where(pos, s, 1.0)
    brace = 1.0 - (C0 / cst) ** gap + C0 ** (1.0 - beta) / (b * (1.0 - beta)) * zeta0 * sp ** (
        (beta * (1.0 - p) + 1.0) / gap)
    return np.where(pos, b * C0 ** beta * sp ** (p * beta / gap) * brace, 0.0)


def residual_similarity_xi(f: ProfileFunction, xi, t, params: Params):
    """Similarity operator for t^{alpha/P} f(x t^{-1/P}), P = p + alpha(2-p).

    alpha f/P - xi f'/P - (|f'|^{p-2} f')' + b t^{(p - alpha(p-1-beta))/(p - alpha(p-2))} f^beta.
    """
    xi = np.asarray(xi, float)
    p, beta, b, a = params.p, params.beta, params.b, params.alpha
    P = params.diffusive_scale
    fv, df, d2f = f.f(xi), f.df(xi), f.d2f(xi)
    react = 0.0
    if b != 0:
        react = b * t ** ((p - a * (p - 1.0 - beta)) / (p - a * (p - 2.0))) * np.where(
            fv > 0, np.abs(fv) ** beta, 0.0)
    return a * fv / P - xi * df / P - _flux_divergence(df, d2f, p) + react


def tail_bracket_R(C0: float, xi0: float, xi, params: Params):
    """R(xi) = alpha - 2(p-1)p^{p-1} P (2-p)^{-p} C0^{p-2} + p xi / ((2-p)(xi0 + xi)).

    For b = 0 the xi-similarity residual of C0 (xi0+xi)^{p/(p-2)} equals
    P^{-1} C0 (xi0+xi)^{p/(p-2)} R(xi).
    """
    p, a = params.p, params.alpha
    P = params.diffusive_scale
    xi = np.asarray(xi, float)
    return a - 2.0 * (p - 1.0) * p ** (p - 1.0) * P * (2.0 - p) ** (-p) * C0 ** (p - 2.0) + p * xi / (
        (2.0 - p) * (xi0 + xi))


# ------------------------------------------------------------ explicit solutions


def reaction_exact_solution(u0_value, t, params: Params):
    """Pointwise solution of u_t + b u^beta = 0 started from u0_value."""
    u0 = np.asarray(u0_value, float)
    b, beta = params.b, params.beta
    if beta == 1.0:
        return u0 * np.exp(-b * t)
    with np.errstate(divide="ignore"):
        base = np.where(u0 > 0, np.where(u0 > 0, u0, 1.0) ** (1.0 - beta), 0.0)
    B = base - b * (1.0 - beta) * t
    if beta < 1.0:
        pos = (u0 > 0) & (B > 0)
        return np.where(pos, np.where(pos, B, 1.0) ** (1.0 / (1.0 - beta)), 0.0)
    # beta > 1: base is u0^{-(beta-1)}; B <= 0 means blow-up (b < 0)
    pos = (u0 > 0) & (B > 0)
    out = np.where(pos, np.where(pos, B, 1.0) ** (1.0 / (1.0 - beta)), 0.0)
    return np.where((u0 > 0) & ~pos, np.inf, out)


def fast_diffusion_upper(x, t, params: Params, mu: float = 0.0):
    """D (t+mu)^{1/(2-p)} (x+mu)^{p/(p-2)}: exact b = 0 solution; mu = 0 is the global upper bound."""
    p = params.p
    D = float(fast_diffusion_constant(p))
    x = np.asarray(x, float)
    return D * (np.asarray(t, float) + mu) ** (1.0 / (2.0 - p)) * (x + mu) ** (p / (p - 2.0))


def source_type_solution(x, t, p: float, c: float = 1.0, t0: float = 0.0):
    """Mass-preserving self-similar solution of u_t = (|u_x|^{p-2}u_x)_x for 1 < p < 2.

    u = tau^{-k} (c + gamma |x tau^{-k}|^{p/(p-1)})^{-(p-1)/(2-p)}, tau = t + t0,
    k = 1/(2(p-1)), gamma = ((2-p)/p) k^{1/(p-1)}.  Its tail coefficient is D.
    """
    tau = np.asarray(t, float) + t0
    k = 1.0 / (2.0 * (p - 1.0))
    gamma = (2.0 - p) / p * k ** (1.0 / (p - 1.0))
    xi = np.abs(np.asarray(x, float)) * tau ** (-k)
    return tau ** (-k) * (c + gamma * xi ** (p / (p - 1.0))) ** (-(p - 1.0) / (2.0 - p))


# ------------------------------------------------------------ the exponential profile phi

_MIN_LOG = math.log(1e-300)


def _phi_coeffs(params: Params):
    p, b = params.p, params.b
    if b <= 0:
        raise DomainError("phi needs b > 0")
    if not 1.0 < p < 2.0:
        raise DomainError("phi needs 1 < p < 2")
    return b / (p - 1.0), p / (2.0 * (p - 1.0) * (2.0 - p))


def _phi_integrand(params: Params):
    kappa, c = _phi_coeffs(params)
    p = params.p
    # y = exp(-s): dy/(y [kappa + c y^{2-p}]^{1/p}) = ds / [kappa + c e^{-(2-p)s}]^{1/p}
    return lambda s: (kappa + c * math.exp(-(2.0 - p) * s)) ** (-1.0 / p)


def _integrate_s(h, s0, s1):
    if s1 == s0:
        return 0.0
    val, _ = integrate.quad(h, s0, s1, epsabs=1e-14, epsrel=1e-13, limit=200)
    return val


def phi_integral_F(z, params: Params) -> float:
    """F(z) = integral from z to 1 of dy / (y [b/(p-1) + p y^{2-p}/(2(p-1)(2-p))]^{1/p})."""
    z = float(z)
    if not 0.0 < z <= 1.0:
        raise DomainError(f"z={z} must lie in (0, 1]")
    return _integrate_s(_phi_integrand(params), 0.0, -math.log(z))


@dataclass(frozen=True)
class PhiProfile:
    """phi on a uniform grid; ``log_phi`` is authoritative where phi underflows."""

    x: np.ndarray
    log_phi: np.ndarray
    p: float
    b: float

    @property
    def phi(self) -> np.ndarray:
        return np.exp(self.log_phi)

    @property
    def decay_rate(self) -> float:
        return (self.b / (self.p - 1.0)) ** (1.0 / self.p)

    def __call__(self, x):
        """phi at arbitrary points by linear interpolation of log phi (x within the grid)."""
        return np.exp(np.interp(x, self.x, self.log_phi))

    def to_csv(self, path) -> None:
        resid = np.full(self.x.shape, np.nan)
        resid[4:-4] = phi_ode_residual(self)
        write_csv(path, ["x", "value", "residual"], [self.x, self.phi, resid])


def _solve_s(h, x_target, x_prev, s_prev, lo_rate, hi_rate, xtol):
    dx = x_target - x_prev
    a, b = s_prev + dx * lo_rate, s_prev + dx * hi_rate
    if dx == 0:
        return s_prev
    g = lambda s: x_prev + _integrate_s(h, s_prev, s) - x_target
    ga, gb = g(a), g(b)
    if ga > 0:
        a = s_prev
    if gb < 0:
        b = s_prev + 2.0 * dx * hi_rate
    return optimize.bisect(g, a, b, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=200)


def phi_profile(params: Params, x_max: float, n_points: int, xtol: float = 1e-13) -> PhiProfile:
    """Invert x = F(phi) on a uniform grid of [0, x_max] by bisection.

    The unknown is s = -log(phi), bracketed between the slopes implied by
    the bounds of the integrand, so phi never has to be represented below
    the double range.
    """
    kappa, c = _phi_coeffs(params)
    p = params.p
    if n_points < 2 or x_max <= 0:
        raise DomainError("need x_max > 0 and at least two points")
    if x_max * kappa ** (1.0 / p) > -_MIN_LOG:
        raise TailUnderflow(f"phi({x_max}) is below 1e-300")
    h = _phi_integrand(params)
    lo_rate, hi_rate = kappa ** (1.0 / p), (kappa + c) ** (1.0 / p)
    x = np.linspace(0.0, x_max, n_points)
    s = np.zeros(n_points)
    for j in range(1, n_points):
        s[j] = _solve_s(h, x[j], x[j - 1], s[j - 1], lo_rate, hi_rate, xtol)
        if s[j] > -_MIN_LOG:
            raise TailUnderflow(f"phi({x[j]}) is below 1e-300")
    return PhiProfile(x=x, log_phi=-s, p=p, b=params.b)


def phi_value(x: float, params: Params, xtol: float = 1e-13) -> float:
    """phi at a single point, solved directly (no grid)."""
    kappa, c = _phi_coeffs(params)
    p = params.p
    if x <= 0:
        return 1.0
    s = _solve_s(_phi_integrand(params), x, 0.0, 0.0, kappa ** (1.0 / p), (kappa + c) ** (1.0 / p), xtol)
    return math.exp(-s)


def _d1_centered(y, h, order):
    d = np.full(y.shape, np.nan)
    if order == 2:
        d[1:-1] = (y[2:] - y[:-2]) / (2.0 * h)
    else:
        d[2:-2] = (y[:-4] - 8.0 * y[1:-3] + 8.0 * y[3:-1] - y[4:]) / (12.0 * h)
    return d


def phi_ode_residual(profile: PhiProfile, order: int = 4) -> np.ndarray:
    """Centered-difference residual of (|phi'|^{p-2}phi')' - phi/(2-p) - b phi^{p-1}.

    The flux |phi'|^{p-2}phi' is differenced from differenced phi; the result
    covers the interior nodes that have full stencils (NaN elsewhere is
    trimmed), i.e. nodes ``order`` .. n-1-``order``.  Assumes a uniform grid.
    """
    if order not in (2, 4):
        raise ValueError("order must be 2 or 4")
    p, b = profile.p, profile.b
    x, ph = profile.x, profile.phi
    h = x[1] - x[0]
    g = _d1_centered(ph, h, order)
    flux = np.abs(g) ** (p - 2.0) * g
    lhs = _d1_centered(flux, h, order)
    k = order
    sl = slice(k, len(x) - k)
    return lhs[sl] - (ph[sl] / (2.0 - p) + b * ph[sl] ** (p - 1.0))


# ------------------------------------------------------------ output


def write_csv(path, header, columns) -> None:
    """Deterministic CSV: header row, '.' decimals, '\\n' line endings, repr-exact floats."""
    cols = [np.asarray(c) for c in columns]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in zip(*cols):
            w.writerow([_fmt(v) for v in row])


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def barrier_samples_csv(path, barrier: BarrierSpec, x, t) -> None:
    """Sample a barrier (and its residual) along x at a fixed time."""
    x = np.asarray(x, float)
    d = barrier.evaluate(x, t)
    if barrier.operator == "reaction":
        r = residual_reaction(barrier, x, t)
    else:
        r = residual_L(barrier, x, t, collar=0.0)
    write_csv(path, ["x", "value", "residual"], [x, d.u, r])
