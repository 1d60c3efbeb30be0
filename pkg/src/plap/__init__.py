"""Interfaces and tails for u_t = (|u_x|^{p-2} u_x)_x - b u^beta, 1 < p < 2, u(x,0) = C(-x)_+^alpha."""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

from .params import Params, validate  # noqa: E402
from .regimes import Region, Subcase, classify, predicted_interface_law  # noqa: E402
from .solver import Grid1D, SolverOptions, solve  # noqa: E402

__all__ = [
    "Params",
    "validate",
    "Region",
    "Subcase",
    "classify",
    "predicted_interface_law",
    "Grid1D",
    "SolverOptions",
    "solve",
    "__version__",
]
