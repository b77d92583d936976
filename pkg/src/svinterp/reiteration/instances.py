"""Default rule instances used by the verification suite and the CLI."""

from __future__ import annotations

import math

from ..spaces import Endpoint, Grand, Karamata, LLim, RLim, Small, Standard
from ..sv import ONE, LogLogPow, LogPow
from .rules import MIRROR, Outer, RuleId, RuleInput

INF = math.inf

_DEC = LogPow(-1.0)          # (1+|ln t|)^-1: integrable with r = 2 and bounded with r = inf
_L0 = LLim(0.25, INF, _DEC, 2, ONE)
_L1 = LLim(0.75, 2, _DEC, 2, LogLogPow(1.0))
_MID = Outer(0.5, 2, ONE)
_LOW = Outer(0.0, 2, _DEC)
_HIGH = Outer(1.0, 2, _DEC)

_DIRECT = {
    RuleId.T7: RuleInput(Standard(0.25, 2, ONE), Standard(0.75, 2, ONE), _MID),
    RuleId.T8i: RuleInput(Standard(0, 2, _DEC), Endpoint(1), _MID),
    RuleId.T8ii: RuleInput(Endpoint(0), Standard(1, 2, _DEC), _MID),
    RuleId.T9i: RuleInput(Standard(1 / 3, 2, LogPow(1.0)), Endpoint(1), _MID),
    RuleId.T9ii: RuleInput(Standard(1 / 3, 2, ONE), Standard(1, 2, _DEC), _MID),
    RuleId.T10i: RuleInput(Standard(1 / 3, 2, ONE), Endpoint(1), _LOW),
    RuleId.T10ii: RuleInput(Standard(1 / 3, 2, ONE), Standard(1, 2, _DEC), _LOW),
    RuleId.T10iii: RuleInput(Standard(0.25, 2, ONE), Standard(0.75, 2, ONE), _LOW),
    RuleId.T11i: RuleInput(_L0, Standard(0.75, 2, ONE), _MID),
    RuleId.T11ii: RuleInput(_L0, Standard(0.75, 2, ONE), _HIGH),
    RuleId.T12: RuleInput(_L0, Standard(1, 2, _DEC), _MID),
    RuleId.T13: RuleInput(_L0, Endpoint(1), _MID),
    RuleId.T15: RuleInput(Endpoint(0), _L1, _MID),
    RuleId.T16: RuleInput(Standard(0, 2, _DEC), _L1, _MID),
    RuleId.T18i: RuleInput(Standard(0.25, 2, ONE), _L1, _MID),
    RuleId.T18ii: RuleInput(Standard(0.25, 2, ONE), _L1, _LOW),
    RuleId.T25: RuleInput(_L0, _L1, _MID),
    RuleId.T26: RuleInput(_L0, RLim(0.75, 2, _DEC, 2, ONE), _MID),
    RuleId.T28: RuleInput(RLim(0.25, INF, _DEC, 2, ONE), _L1, _MID),
    RuleId.T31: RuleInput(RLim(0.25, INF, _DEC, 2, ONE, "unit"), LLim(0.75, 2, ONE, 2, ONE, "unit"), _MID,
                          "unit"),
}


def default_instance(rule: RuleId | str) -> RuleInput:
    """A representative input satisfying every hypothesis of ``rule``.

    Mirrored R-space rules use the swap image of their L-space partner.
    """
    rule = RuleId(rule)
    if rule in _DIRECT:
        return _DIRECT[rule]
    if rule in MIRROR:
        return _DIRECT[MIRROR[rule]].swap()
    raise KeyError(f"{rule} has no reiteration instance")


# -- Lorentz instances ---------------------------------------------------------------

_SB = LogPow(-2.0)           # r0 = 1 keeps the small/grand spaces nontrivial
_SMALL0, _SMALL1 = Small(2, 2, 1, _SB), Small(4, 2, 1, _SB)
_GRAND0, _GRAND1 = Grand(2, 2, 1, _SB), Grand(4, 2, 1, _SB)
_K0, _K1 = Karamata(2, 2), Karamata(4, 2)
L1, LINF = Endpoint(0), Endpoint(1)

_LORENTZ = {
    RuleId.C37: (_SMALL0, _K1, _MID),
    RuleId.C38: (_SMALL0, _K1, _HIGH),
    RuleId.C39: (_SMALL0, LINF, _MID),
    RuleId.C40: (_K0, _SMALL1, _MID),
    RuleId.C41: (_K0, _SMALL1, _LOW),
    RuleId.C42: (L1, _SMALL1, _MID),
    RuleId.C43: (_K0, _GRAND1, _MID),
    RuleId.C44: (_K0, _GRAND1, _LOW),
    RuleId.C45: (L1, _GRAND1, _MID),
    RuleId.C46: (_GRAND0, _K1, _MID),
    RuleId.C47: (_GRAND0, _K1, _HIGH),
    RuleId.C48: (_GRAND0, LINF, _MID),
    RuleId.C49: (_SMALL0, _SMALL1, _MID),
    RuleId.C50: (_SMALL0, _GRAND1, _MID),
    RuleId.C51: (_GRAND0, _GRAND1, _MID),
    RuleId.C52: (_GRAND0, _SMALL1, _MID),
}


def default_lorentz_instance(rule: RuleId | str) -> tuple:
    """``(left, right, outer)`` for a Lorentz-space corollary."""
    return _LORENTZ[RuleId(rule)]


__all__ = ["default_instance", "default_lorentz_instance", "L1", "LINF"]
