"""Real interpolation with slowly varying functions: norms, reiteration rules and checks."""

from .errors import (DivergentTail, HypothesisFailed, InvalidDescriptor, MaxIterations,
                     NoRuleMatches, NonConvergent, NonConvexIndices, RangeError,
                     SvInterpError, TrivialSpace)
from .grid import DEFAULT_GRID, LogGrid

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_GRID", "LogGrid", "DivergentTail", "HypothesisFailed", "InvalidDescriptor",
    "MaxIterations", "NoRuleMatches", "NonConvergent", "NonConvexIndices", "RangeError",
    "SvInterpError", "TrivialSpace", "__version__",
]
