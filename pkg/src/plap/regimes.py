"""Five-region classification in the (alpha, beta) plane and the interface law of each region."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

from .constants import ProfileConstants, _cstar, region1_bracket, region2_constants
from .exceptions import MissingProfileInput
from .params import BOUNDARY_RTOL, Params, close, validate


class Region(str, enum.Enum):
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"
    V = "V"


class Subcase(str, enum.Enum):
    EXPANDING = "expanding"
    SHRINKING = "shrinking"
    STATIONARY = "stationary"
    INFINITE_SPEED_B_POS = "infinite_speed_b_pos"
    INFINITE_SPEED_B_NEG = "infinite_speed_b_neg"
    INFINITE_SPEED_B_ZERO = "infinite_speed_b_zero"
    UNDETERMINED = "undetermined"


class Direction(str, enum.Enum):
    RIGHT = "right"
    LEFT = "left"
    NONE = "none"
    NO_INTERFACE = "no_interface"


@dataclass(frozen=True)
class RegimeLabel:
    region: Region
    subcase: Subcase

    def __str__(self) -> str:
        return f"{self.region.value}/{self.subcase.value}"


@dataclass(frozen=True)
class InterfaceLaw:
    """eta(t) ~ coefficient * t^exponent.

    ``coefficient`` is set when the leading coefficient is known exactly,
    ``bracket`` when only bounds are known, ``sign`` always.
    """

    exponent: Optional[float]
    direction: Direction
    coefficient: Optional[float] = None
    bracket: Optional[tuple] = None
    sign: int = 0

    def to_dict(self) -> dict:
        return {
            "exponent": self.exponent,
            "direction": self.direction.value,
            "coefficient": self.coefficient,
            "bracket": None if self.bracket is None else list(self.bracket),
            "sign": self.sign,
        }


def _region(params: Params, rtol: float) -> Region:
    p, b, beta, alpha = params.p, params.b, params.beta, params.alpha
    if b == 0 or b < 0:
        return Region.V
    if close(beta, p - 1.0, rtol):
        return Region.IV
    if beta > p - 1.0:
        return Region.V
    thr = p / (p - 1.0 - beta)
    if close(alpha, thr, rtol):
        return Region.II
    return Region.I if alpha < thr else Region.III


def classify(params: Params, rtol: float = BOUNDARY_RTOL, pure_power_data: bool = True) -> RegimeLabel:
    """Region and sub-case of a valid parameter set.

    ``pure_power_data=False`` signals that the data only behaves like
    C(-x)^alpha near the origin; at the critical amplitude the front is then
    governed by lower-order terms and the sub-case is reported undetermined.
    """
    validate(params)
    region = _region(params, rtol)
    if region is Region.II:
        cstar = _cstar(params.p, params.b, params.beta)
        if close(params.C, cstar, rtol):
            sub = Subcase.STATIONARY if pure_power_data else Subcase.UNDETERMINED
        elif params.C > cstar:
            sub = Subcase.EXPANDING
        else:
            sub = Subcase.SHRINKING
    elif region is Region.I:
        sub = Subcase.EXPANDING
    elif region is Region.III:
        sub = Subcase.SHRINKING
    elif params.b > 0:
        sub = Subcase.INFINITE_SPEED_B_POS
    elif params.b < 0:
        sub = Subcase.INFINITE_SPEED_B_NEG
    else:
        sub = Subcase.INFINITE_SPEED_B_ZERO
    return RegimeLabel(region, sub)


def predicted_interface_law(params: Params, profile_inputs: Optional[ProfileConstants] = None,
                            require_bracket: bool = False, rtol: float = BOUNDARY_RTOL) -> InterfaceLaw:
    """Exponent, direction and coefficient information for the small-time front."""
    from .constants import shrink_coefficient

    label = classify(params, rtol)
    p, beta = params.p, params.beta
    if label.region in (Region.IV, Region.V):
        return InterfaceLaw(None, Direction.NO_INTERFACE)
    balance = (p - 1.0 - beta) / (p * (1.0 - beta))
    if label.region is Region.I:
        c = region1_bracket(params)
        return InterfaceLaw(balance, Direction.RIGHT, bracket=(c["zeta1"], c["zeta2"]), sign=1)
    if label.region is Region.III:
        ell = shrink_coefficient(params)
        return InterfaceLaw(1.0 / (params.alpha * (1.0 - beta)), Direction.LEFT, coefficient=-ell, sign=-1)
    # region II
    if label.subcase is Subcase.STATIONARY:
        return InterfaceLaw(balance, Direction.NONE, coefficient=0.0, sign=0)
    if label.subcase is Subcase.UNDETERMINED:
        return InterfaceLaw(balance, Direction.NONE, sign=0)
    expanding = label.subcase is Subcase.EXPANDING
    direction = Direction.RIGHT if expanding else Direction.LEFT
    sign = 1 if expanding else -1
    bracket = None
    if profile_inputs is not None:
        try:
            c = region2_constants(params, profile_inputs)
            if expanding:
                bracket = (c["zeta3"], c["zeta4"])
            elif "zeta5" in c:
                bracket = (-c["zeta5"], -c["zeta6"])
        except MissingProfileInput:
            if require_bracket:
                raise
    if bracket is None and require_bracket:
        raise MissingProfileInput("region-II bracket needs A1 (expanding) or lambda and ell1 (shrinking)")
    return InterfaceLaw(balance, direction, bracket=bracket, sign=sign)
