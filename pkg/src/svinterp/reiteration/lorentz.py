"""Reiteration for Lorentz-Karamata, small and grand spaces via ``(L1, L_inf)``."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import InvalidDescriptor, NoRuleMatches
from ..grid import DEFAULT_GRID, LogGrid
from ..spaces import Endpoint, LorentzDescriptor, SpaceDescriptor, from_couple, to_couple
from .rules import Outer, RuleId, RuleInput, RuleOutput, derive

COROLLARY_OF = {
    RuleId.T11i: RuleId.C37, RuleId.T11ii: RuleId.C38, RuleId.T13: RuleId.C39,
    RuleId.T18i: RuleId.C40, RuleId.T18ii: RuleId.C41, RuleId.T15: RuleId.C42,
    RuleId.T19i: RuleId.C43, RuleId.T19ii: RuleId.C44, RuleId.T21: RuleId.C45,
    RuleId.T24i: RuleId.C46, RuleId.T24ii: RuleId.C47, RuleId.T22: RuleId.C48,
    RuleId.T25: RuleId.C49, RuleId.T26: RuleId.C50, RuleId.T27: RuleId.C51, RuleId.T28: RuleId.C52,
}


def _inv_p(d) -> float:
    """``1/p`` of an operand; ``L1`` has ``p = 1`` and ``L_inf`` has ``1/p = 0``."""
    if isinstance(d, Endpoint):
        return 1.0 if d.side == 0 else 0.0
    return 1.0 / d.p


def _lift(d):
    if isinstance(d, Endpoint):
        if d.mode != "full":
            raise InvalidDescriptor("Lorentz corollaries live on the full half-line")
        return d
    if not isinstance(d, LorentzDescriptor):
        raise InvalidDescriptor(f"{type(d).__name__} is not a Lorentz-type operand")
    return to_couple(d)


@dataclass(frozen=True, eq=False)
class CorollaryOutput:
    """A rule output rewritten in Lorentz notation.

    Attributes
    ----------
    rule : RuleId
        Corollary identifier (``C37`` to ``C52``).
    base : RuleOutput
        The underlying derivation on ``(L1, L_inf)``.
    left, right : LorentzDescriptor or Endpoint
        Operands as given.
    result : LorentzDescriptor
    p : float
        ``1/p = (1-theta)/p0 + theta/p1``.
    """

    rule: RuleId
    base: RuleOutput
    left: object
    right: object
    outer: Outer
    result: LorentzDescriptor
    p: float

    @property
    def grid(self) -> LogGrid:
        return self.base.grid

    @property
    def mode(self) -> str:
        return "full"

    @property
    def eta(self) -> float:
        return self.base.eta

    @property
    def label(self) -> str:
        return str(self.rule.value)

    def at(self, grid: LogGrid) -> "CorollaryOutput":
        return specialize_lorentz(self.left, self.right, self.outer, grid)

    def to_json(self) -> dict:
        return {"rule": str(self.rule), "base_rule": str(self.base.rule), "p": _enc(self.p),
                "left": self.left.to_json(), "right": self.right.to_json(), "outer": self.outer.to_json(),
                "result": self.result.to_json(), "base": self.base.to_json()}


def _enc(x: float):
    return "inf" if math.isinf(x) else x


def specialize_lorentz(left, right, outer: Outer, grid: LogGrid = DEFAULT_GRID) -> CorollaryOutput:
    """Derive ``(left, right)_{outer}`` for Lorentz-type operands.

    Operands are translated to ``(L1, L_inf)`` descriptors with
    ``theta = 1 - 1/p``, the couple-level rule is applied and the result is
    translated back.

    Raises
    ------
    InvalidDescriptor
        If an operand has ``p <= 1`` or is not of Lorentz type.
    NoRuleMatches
        If the couple-level rule has no Lorentz corollary.
    """
    base = derive(RuleInput(_lift(left), _lift(right), outer), grid)
    if base.rule not in COROLLARY_OF:
        raise NoRuleMatches(f"{base.rule.value} has no Lorentz-space form")
    ip = (1 - outer.theta) * _inv_p(left) + outer.theta * _inv_p(right)
    p = math.inf if ip == 0 else 1.0 / ip
    return CorollaryOutput(COROLLARY_OF[base.rule], base, left, right, outer, from_couple(base.result), p)


__all__ = ["COROLLARY_OF", "CorollaryOutput", "specialize_lorentz"]
