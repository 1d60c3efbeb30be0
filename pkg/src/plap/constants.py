"""Explicit constants of the short-time theory.

Every formula is a product of powers; each is evaluated in log space as
``exp(sum(e * log(base)))`` so that large exponents near p -> 2 or
beta -> p - 1 do not overflow intermediate products.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

from .exceptions import DomainError, MaximizerAtBoundary, MissingProfileInput, RangeError
from .params import Params, close, validate


def _powprod(*pairs) -> float:
    """exp(sum(e * log(base))) for (base, exponent) pairs with positive bases."""
    s = 0.0
    for base, e in pairs:
        if e == 0:
            continue
        if base <= 0:
            raise DomainError(f"nonpositive base {base} raised to {e}")
        s += e * math.log(base)
    return math.exp(s)


# ---------------------------------------------------------------- scalars


def _cstar(p: float, b: float, beta: float) -> float:
    gap = p - 1.0 - beta
    if b <= 0 or gap == 0:
        raise DomainError("critical amplitude needs b > 0 and beta != p - 1")
    num = (b, 1.0), (abs(gap), p)
    den = (1.0 + beta, -1.0), (p - 1.0, -1.0), (p, -(p - 1.0))
    return _powprod(*[(base, e / gap) for base, e in num + den])


def critical_amplitude(params: Params, allow_supercritical: bool = False) -> float:
    """Amplitude C* for which C*(-x)_+^{p/(p-1-beta)} is a stationary solution.

    Defined for b > 0 and 0 < beta < p - 1.  With ``allow_supercritical`` the
    same expression (with |p - 1 - beta|) is returned for beta > p - 1,
    where it gives the decaying tail coefficient.
    """
    p, b, beta = params.p, params.b, params.beta
    if b <= 0:
        raise DomainError("critical amplitude requires b > 0")
    if beta >= p - 1 and not (allow_supercritical and beta > p - 1 and not close(beta, p - 1)):
        raise DomainError(f"critical amplitude requires beta < p - 1 (beta={beta}, p={p})")
    return _cstar(p, b, beta)


def log_fast_diffusion_constant(p: float) -> float:
    """Natural log of D; finite for every 1 < p < 2."""
    if not 1.0 < p < 2.0:
        raise RangeError(f"p={p} must satisfy 1 < p < 2")
    k = 1.0 / (2.0 - p)
    return k * (math.log(2.0) + math.log(p - 1.0) + (p - 1.0) * math.log(p)
                + (1.0 - p) * math.log(2.0 - p))


def fast_diffusion_constant(p: float):
    """D = (2(p-1) p^{p-1} (2-p)^{1-p})^{1/(2-p)}, the tail coefficient of the b = 0 flow.

    D grows like (2-p)^{-(p-1)/(2-p)} and leaves the double range near
    p = 1.998; beyond that an arbitrary-precision ``mpmath.mpf`` is returned
    instead of overflowing to infinity.
    """
    logd = log_fast_diffusion_constant(p)
    if logd < 709.0:
        return math.exp(logd)
    import mpmath

    return mpmath.exp(mpmath.mpf(logd))


def shrink_coefficient(params: Params) -> float:
    """ell* = C^{-1/alpha} (b(1-beta))^{1/(alpha(1-beta))}: the shrinking front speed factor."""
    from .regimes import Region, classify

    if classify(params).region is not Region.III:
        raise DomainError("shrink coefficient is defined in the strong-absorption region only")
    p, b, beta, a, C = params.p, params.b, params.beta, params.alpha, params.C
    return _powprod((C, -1.0 / a), (b * (1.0 - beta), 1.0 / (a * (1.0 - beta))))


def similarity_exponent(params: Params) -> float:
    """(p-1-beta)/(p(1-beta)), the power of t in the reaction-diffusion front law."""
    return params.gap / (params.p * (1.0 - params.beta))


# ---------------------------------------------------------------- region I


def _require_sublinear(params: Params) -> None:
    if params.b <= 0 or not (0 < params.beta < params.p - 1) or close(params.beta, params.p - 1):
        raise DomainError("needs b > 0 and 0 < beta < p - 1")


def region1_bracket(params: Params) -> dict:
    """C1, zeta1, zeta2 and ell0 bounding the expanding front eta(t) / t^{(p-1-beta)/(p(1-beta))}."""
    from .regimes import Region, classify

    validate(params)
    if classify(params).region is not Region.I:
        raise DomainError("region-I constants requested outside region I")
    p, b, beta = params.p, params.b, params.beta
    gap, w = params.gap, p * (1.0 - beta)
    cstar = _cstar(p, b, beta)
    C1 = _powprod(((1.0 - beta) / (2.0 - p), 1.0 / gap)) * cstar
    zeta1 = _powprod(
        (b, (p - 2.0) / w),
        (p ** (p - 1.0) * (p - 1.0), 1.0 / p),
        (1.0 + beta, 1.0 / p),
        (gap, (beta * (p - 1.0) - 1.0) / w),
        ((2.0 - p) / (1.0 - beta), (2.0 - p) / w),
    )
    zeta2 = _powprod(
        (b, (p - 2.0) / w),
        (p - 1.0, 1.0 / p),
        (p, (p - 1.0) / p),
        (1.0 + beta, (2.0 - p) / w),
        (2.0, gap / w),
        (2.0 - p, (beta * (p - 1.0) - 1.0) / w),
        (1.0 - beta, 1.0),
        (gap, -1.0),
    )
    ell0 = gap / (1.0 - beta) * zeta2
    return {"C1": C1, "zeta1": zeta1, "zeta2": zeta2, "ell0": ell0}


# ---------------------------------------------------------------- region II


@dataclass(frozen=True)
class ProfileConstants:
    """Quantities read off a computed self-similar profile.

    ``source`` records where they came from (grid, extraction time), and is
    copied into the ledger entries that depend on them.
    """

    A0: Optional[float] = None
    A1: Optional[float] = None
    lam: Optional[float] = None
    ell1: Optional[float] = None
    zeta_star: Optional[float] = None
    source: str = ""


def golden_section_maximize(func: Callable[[float], float], lo: float, hi: float,
                            tol: float = 1e-10, max_iter: int = 500) -> tuple[float, float]:
    """Maximize a unimodal ``func`` on [lo, hi] until the bracket is narrower than ``tol``.

    Returns (argmax, max).  Derivative free.
    """
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = float(lo), float(hi)
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = func(c), func(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = func(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = func(d)
    x = 0.5 * (a + b)
    fx = func(x)
    # the ends can beat interior samples for monotone functions
    for cand in (lo, hi):
        fcand = func(cand)
        if fcand > fx:
            x, fx = cand, fcand
    return x, fx


def gamma_shrink(params: Params) -> float:
    """Gamma = 1 - (C/C*)^{(p-1-beta)/p}."""
    cstar = _cstar(params.p, params.b, params.beta)
    return 1.0 - (params.C / cstar) ** (params.gap / params.p)


def delta_objective(params: Params) -> Callable[[float], float]:
    """g(delta) whose maximizer on [0, 1] fixes the shrinking-case upper barrier."""
    p, beta = params.p, params.beta
    ratio = params.C / _cstar(p, params.b, beta)
    G = gamma_shrink(params)
    k = (1.0 + beta * (1.0 - p)) / (p * (1.0 - beta))
    r = ratio ** params.gap

    def g(delta: float) -> float:
        if delta <= 0:
            return 0.0
        s = 1.0 - delta * G
        return delta ** k * (s - r * s ** (1.0 - p))

    return g


def delta_star(params: Params, objective: Optional[Callable[[float], float]] = None,
               tol: float = 1e-10, edge: float = 1e-6) -> float:
    """Golden-section argmax of g on [0, 1]; warns if it sits at an end."""
    g = objective if objective is not None else delta_objective(params)
    x, _ = golden_section_maximize(g, 0.0, 1.0, tol=tol)
    if x < edge or x > 1.0 - edge:
        warnings.warn(f"maximizer {x} within {edge} of the interval end", MaximizerAtBoundary)
    return x


def region2_constants(params: Params, profile: Optional[ProfileConstants] = None) -> dict:
    """Bracket constants of the balanced case alpha = p/(p-1-beta).

    Expanding (C > C*): zeta3, zeta4, C2 from A1.  Shrinking (C < C*):
    Gamma, delta_star, ell2, zeta6, C3 (need only C) and zeta5 (needs lambda
    and ell1).  zeta5 is stored positive; the lower front bound is -zeta5.
    """
    from .regimes import Region, classify

    validate(params)
    if classify(params).region is not Region.II:
        raise DomainError("region-II constants requested outside region II")
    p, b, beta, C = params.p, params.b, params.beta, params.C
    gap = params.gap
    cstar = _cstar(p, b, beta)
    out: dict = {"Cstar": cstar}
    if close(C, cstar):
        return out
    if C > cstar:
        if profile is None or profile.A1 is None:
            raise MissingProfileInput("expanding case needs A1 = f1(0)")
        A1 = profile.A1
        zeta3 = _powprod(
            (A1, (p - 2.0) / p),
            ((1.0 - beta) * (1.0 + beta) * p ** (p - 1.0) * (p - 1.0), 1.0 / p),
            (1.0 + b * (1.0 - beta) * A1 ** (beta - 1.0), -1.0 / p),
            (gap, -1.0),
        )
        out["zeta3"] = zeta3
        out["zeta4"] = (A1 / cstar) ** (gap / p)
        out["C2"] = A1 * zeta3 ** (-p / gap)
        return out
    G = gamma_shrink(params)
    ds = delta_star(params)
    dg = ds * G
    bracket = (1.0 - dg) - (1.0 - dg) ** (1.0 - p) * (C / cstar) ** gap
    ell2 = _powprod((C, (1.0 + beta - p) / p),
                    (b * (1.0 - beta) / dg * bracket, gap / (p * (1.0 - beta))))
    out.update(Gamma=G, delta_star=ds, ell2=ell2, zeta6=dg * ell2,
               C3=C * (1.0 - dg) ** (p / (1.0 + beta - p)))
    if profile is not None and profile.lam is not None and profile.ell1 is not None:
        out["zeta5"] = profile.ell1 - (profile.lam / cstar) ** (gap / p)
    return out


# ---------------------------------------------------------------- region IV


def region4_constants(params: Params, A0: Optional[float] = None, epsilon: float = 0.05) -> dict:
    """Tail decay rate of the phi profile and, given A0, the sandwich time window.

    The phi sandwich holds for 0 <= t <= delta_eps where
    delta_eps = [(A0 + eps)^{-1} eps^{1/(2-p)}]^{P/alpha}, P = p + alpha(2-p),
    and ``A0`` is f(0) of the b = 0 profile for the same (p, alpha, C).
    """
    from .regimes import Region, classify

    validate(params)
    if classify(params).region is not Region.IV:
        raise DomainError("phi constants requested outside region IV")
    p, b = params.p, params.b
    out = {"decay_rate": (b / (p - 1.0)) ** (1.0 / p)}
    if A0 is not None:
        if not A0 > 0:
            raise DomainError("A0 must be positive")
        if not epsilon > 0:
            raise DomainError("epsilon must be positive")
        out["delta_eps"] = _powprod((A0 + epsilon, -params.diffusive_scale / params.alpha),
                                    (epsilon, params.diffusive_scale / (params.alpha * (2.0 - p))))
    return out


# ---------------------------------------------------------------- region V / b = 0


def region5_constants(params: Params, A0: float, epsilon: float) -> dict:
    """Tail-barrier constants for the power-decay regimes (including b = 0).

    ``A0`` is f(0) of the b = 0 self-similar profile for the same (p, alpha, C).
    """
    from .regimes import Region, classify

    validate(params)
    if classify(params).region is not Region.V:
        raise DomainError("tail constants requested outside region V")
    if not A0 > 0:
        raise DomainError("A0 must be positive")
    if not 0 < epsilon < 1:
        raise DomainError("epsilon must lie in (0, 1)")
    p, b, beta, a = params.p, params.b, params.beta, params.alpha
    D = fast_diffusion_constant(p)
    P = params.diffusive_scale
    out: dict = {"D": D}
    mu_b = 1.0 + epsilon if b < 0 else 1.0
    K = 2.0 * (p - 1.0) * p ** (p - 1.0) * P * mu_b / (a * (2.0 - p) ** p)
    out["mu_b"] = mu_b
    out["xi2"] = _powprod((A0 + epsilon, (p - 2.0) / p), (K, 1.0 / p))
    out["C6"] = K ** (1.0 / (2.0 - p))
    if b > 0 and p - 1.0 < beta < 1.0:
        cst = _cstar(p, b, beta)
        gap = params.gap
        base = b * (1.0 - beta) * cst ** (beta - 1.0) * (1.0 - epsilon) ** (beta - 1.0) * (
            (1.0 - epsilon) ** gap - 1.0)
        out["Cstar"] = cst
        out["zeta8"] = base ** (gap / (p * (1.0 - beta)))
    elif A0 - epsilon > 0:
        if b > 0 and beta < 2.0 / p:
            xi1 = _powprod((A0 - epsilon, (p - 2.0) / p), (1.0 - epsilon, 1.0 / p), (D, (2.0 - p) / p))
        else:
            xi1 = _powprod((A0 - epsilon, (p - 2.0) / p), (D, (2.0 - p) / p))
        out["xi1"] = xi1
        out["C5"] = (A0 - epsilon) * xi1 ** (p / (2.0 - p))
    ratio = 1.0 + p / (a * (2.0 - p))
    out["xi3"] = (A0 / D) ** ((p - 2.0) / p)
    out["xi4"] = out["xi3"] * ratio ** (1.0 / p)
    out["C7"] = D * ratio ** (1.0 / (2.0 - p))
    return out


# ---------------------------------------------------------------- ledger


@dataclass(frozen=True)
class LedgerEntry:
    value: float
    formula_id: str
    inputs_used: tuple = ()


_FORMULAS = {
    "Cstar": ("critical-amplitude", ("p", "b", "beta")),
    "D": ("fast-diffusion-tail", ("p",)),
    "ell_star": ("shrink-coefficient", ("p", "b", "beta", "alpha", "C")),
    "C1": ("region1.C1", ("p", "b", "beta")),
    "zeta1": ("region1.zeta1", ("p", "b", "beta")),
    "zeta2": ("region1.zeta2", ("p", "b", "beta")),
    "ell0": ("region1.ell0", ("p", "b", "beta")),
    "zeta3": ("region2.zeta3", ("p", "b", "beta", "A1")),
    "zeta4": ("region2.zeta4", ("p", "b", "beta", "A1")),
    "C2": ("region2.C2", ("p", "b", "beta", "A1")),
    "zeta5": ("region2.zeta5", ("p", "b", "beta", "lambda", "ell1")),
    "Gamma": ("region2.Gamma", ("p", "b", "beta", "C")),
    "delta_star": ("region2.delta_star.golden_section", ("p", "b", "beta", "C")),
    "ell2": ("region2.ell2", ("p", "b", "beta", "C", "delta_star")),
    "zeta6": ("region2.zeta6", ("delta_star", "Gamma", "ell2")),
    "C3": ("region2.C3", ("C", "delta_star", "Gamma")),
    "decay_rate": ("region4.decay_rate", ("p", "b")),
    "delta_eps": ("region4.delta_eps", ("p", "alpha", "A0", "epsilon")),
    "mu_b": ("region5.mu_b", ("b", "epsilon")),
    "xi1": ("region5.xi1", ("p", "b", "beta", "A0", "epsilon")),
    "C5": ("region5.C5", ("A0", "epsilon", "xi1")),
    "xi2": ("region5.xi2", ("p", "alpha", "A0", "epsilon", "mu_b")),
    "C6": ("region5.C6", ("p", "alpha", "mu_b")),
    "zeta8": ("region5.zeta8", ("p", "b", "beta", "epsilon")),
    "xi3": ("region5.xi3", ("p", "A0")),
    "xi4": ("region5.xi4", ("p", "alpha", "A0")),
    "C7": ("region5.C7", ("p", "alpha")),
}

#: constants that cannot be evaluated without profile data, per region
PROFILE_DEPENDENT = {
    "II": {"zeta3": "A1", "zeta4": "A1", "C2": "A1", "zeta5": "lambda,ell1"},
    "IV": {"delta_eps": "A0"},
    "V": {k: "A0" for k in ("xi1", "C5", "xi2", "xi3", "xi4")},
}


@dataclass
class ConstantsLedger:
    """Named constants with provenance; build once with :func:`build_ledger`."""

    params: Params
    entries: dict = field(default_factory=dict)
    profile_inputs: Optional[ProfileConstants] = None
    requires_profile: dict = field(default_factory=dict)

    def add(self, name: str, value: float, extra_inputs: tuple = ()) -> None:
        fid, inputs = _FORMULAS[name]
        self.entries[name] = LedgerEntry(float(value), fid, tuple(inputs) + tuple(extra_inputs))

    def __getitem__(self, name: str) -> float:
        return self.entries[name].value

    def __contains__(self, name: str) -> bool:
        return name in self.entries

    def to_json(self) -> str:
        doc = {
            "params": self.params.to_dict(),
            "profile_inputs": None if self.profile_inputs is None else {
                k: getattr(self.profile_inputs, k)
                for k in ("A0", "A1", "lam", "ell1", "zeta_star", "source")},
            "entries": [
                {"name": k, "value": e.value, "formula_id": e.formula_id,
                 "inputs_used": list(e.inputs_used)}
                for k, e in self.entries.items()
            ],
            "requires_profile": self.requires_profile,
        }
        return json.dumps(doc, indent=2, sort_keys=False)


def build_ledger(params: Params, profile: Optional[ProfileConstants] = None,
                 epsilon: float = 0.05) -> ConstantsLedger:
    """Collect every constant relevant to the region of ``params``."""
    from .regimes import Region, classify

    validate(params)
    region = classify(params).region
    led = ConstantsLedger(params=params, profile_inputs=profile)
    src = () if profile is None or not profile.source else (f"profile:{profile.source}",)
    led.add("D", fast_diffusion_constant(params.p))
    if params.b > 0 and params.beta < params.p - 1 and region is not Region.IV:
        led.add("Cstar", critical_amplitude(params))
    if region is Region.I:
        for k, v in region1_bracket(params).items():
            led.add(k, v)
    elif region is Region.II:
        try:
            vals = region2_constants(params, profile)
        except MissingProfileInput:
            vals = {}
        for k, v in vals.items():
            if k != "Cstar":
                led.add(k, v, src if k in PROFILE_DEPENDENT["II"] else ())
        missing = {k: need for k, need in PROFILE_DEPENDENT["II"].items() if k not in vals}
        cst = led["Cstar"]
        if params.C < cst and not close(params.C, cst):
            missing = {k: v for k, v in missing.items() if k == "zeta5"}
        elif params.C > cst and not close(params.C, cst):
            missing.pop("zeta5", None)
        else:
            missing = {}
        led.requires_profile = missing
    elif region is Region.III:
        led.add("ell_star", shrink_coefficient(params))
    elif region is Region.IV:
        A0 = None if profile is None else profile.A0
        for k, v in region4_constants(params, A0, epsilon).items():
            led.add(k, v, src + (f"epsilon={epsilon}",) if k == "delta_eps" else ())
        if A0 is None:
            led.requires_profile = dict(PROFILE_DEPENDENT["IV"])
    elif region is Region.V:
        if profile is not None and profile.A0 is not None:
            for k, v in region5_constants(params, profile.A0, epsilon).items():
                if k in ("D", "Cstar"):
                    continue
                led.add(k, v, src + (f"epsilon={epsilon}",))
            if params.b > 0 and params.p - 1 < params.beta < 1:
                led.add("Cstar", _cstar(params.p, params.b, params.beta))
        else:
            led.requires_profile = dict(PROFILE_DEPENDENT["V"])
    return led
