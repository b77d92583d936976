"""Public name for the slowly varying function algebra; re-exports :mod:`svinterp.sv`."""

from .sv import *  # noqa: F401,F403
from .sv import (ONE, Asymptote, BrokenLogPow, ComposeRegular, Const, FiniteCheck, LogLogPow, LogPow, NumericSv,
                 Pow, Prod, RecipArg, SvExpr, Tabulated, check_finite, monotone_equivalence_constant,
                 sv_product, tail_qnorm, transform)
