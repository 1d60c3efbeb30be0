"""Problem parameters for u_t = (|u_x|^{p-2} u_x)_x - b u^beta with data C (-x)_+^alpha."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .exceptions import AdmissibilityError, PositivityError, RangeError

#: default relative tolerance for equality tests on region boundaries
BOUNDARY_RTOL = 1e-12


@dataclass(frozen=True)
class Params:
    """The quintuple (p, b, beta, alpha, C).

    ``p`` is the diffusion exponent, ``b`` the absorption coefficient
    (negative means a source), ``beta`` the absorption exponent, and
    ``alpha``/``C`` describe the initial data near the origin.
    """

    p: float
    b: float
    beta: float
    alpha: float
    C: float = 1.0

    def __post_init__(self):
        for name in ("p", "b", "beta", "alpha", "C"):
            object.__setattr__(self, name, float(getattr(self, name)))

    # convenience exponents used all over the place
    @property
    def gap(self) -> float:
        """p - 1 - beta; positive when absorption is sublinear relative to diffusion."""
        return self.p - 1.0 - self.beta

    @property
    def threshold_alpha(self) -> float:
        """p / (p - 1 - beta), the data exponent that balances diffusion and absorption."""
        return self.p / self.gap if self.gap > 0 else math.inf

    @property
    def diffusive_scale(self) -> float:
        """p + alpha (2 - p), the denominator of the pure-diffusion similarity exponents."""
        return self.p + self.alpha * (2.0 - self.p)

    @property
    def is_range_ok(self) -> bool:
        return 1.0 < self.p < 2.0

    @property
    def is_positive(self) -> bool:
        return self.beta > 0 and self.alpha > 0 and self.C > 0

    @property
    def is_admissible(self) -> bool:
        return self.b >= 0 or self.beta >= 1.0

    @property
    def is_valid(self) -> bool:
        return self.is_range_ok and self.is_positive and self.is_admissible

    def replace(self, **changes) -> "Params":
        d = asdict(self)
        d.update(changes)
        return Params(**d)

    def to_dict(self) -> dict:
        return asdict(self)


def validate(params: Params) -> Params:
    """Return ``params`` unchanged if it is a valid problem, raise otherwise."""
    vals = (params.p, params.b, params.beta, params.alpha, params.C)
    if not all(math.isfinite(v) for v in vals):
        raise RangeError(f"non-finite parameter in {params}")
    if not params.is_range_ok:
        raise RangeError(f"p={params.p} must satisfy 1 < p < 2")
    for name in ("beta", "alpha", "C"):
        if getattr(params, name) <= 0:
            raise PositivityError(f"{name}={getattr(params, name)} must be positive")
    if not params.is_admissible:
        raise AdmissibilityError(
            f"b={params.b} < 0 requires beta >= 1 (got beta={params.beta}); "
            "uniqueness and comparison fail otherwise"
        )
    return params


def close(a: float, b: float, rtol: float = BOUNDARY_RTOL) -> bool:
    """Relative equality used on region boundaries."""
    return abs(a - b) <= rtol * max(abs(a), abs(b))
