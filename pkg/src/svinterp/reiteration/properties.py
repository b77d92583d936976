"""Identifications for ordered couples ``A1 ⊂ A0`` (properties P1 to P8).

The ordered couple is modelled by ``(L1, L_inf)`` restricted to functions
supported in ``(0, 1]``, for which ``K(u, f) = ||f||_1`` when ``u >= 1``.
Unit-mode descriptors integrate over ``(0, 1)`` only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import NonConvergent
from ..grid import DEFAULT_GRID, LogGrid
from ..kfunc import k_l1_linf
from ..reports import RatioRecord, RatioReport
from ..spaces import (Endpoint, LLim, RLim, SpaceDescriptor, Standard, as_unit, extend_unit, interp_norm,
                      validate)
from ..sv import ONE, LogPow
from .rules import PROPERTY_RULES, RuleId
from .verify import operand_norms, unit_family

_DEC = LogPow(-1.0)

# kind: "equiv" (two-sided), "subset" (first contained in second) or "trivial"
_KIND = {RuleId.P1: "equiv", RuleId.P2: "equiv", RuleId.P3: "subset", RuleId.P4: "equiv",
         RuleId.P5: "trivial", RuleId.P6: "subset", RuleId.P7: "equiv", RuleId.P8: "equiv"}

_DEFAULT = {
    RuleId.P1: Standard(0.5, 2, LogPow(1.0), "unit"),
    RuleId.P2: Standard(0.0, 2, _DEC, "unit"),
    RuleId.P3: LLim(0.5, 2, ONE, 2, ONE, "unit"),
    RuleId.P4: LLim(0.5, 2, _DEC, 2, ONE, "unit"),
    RuleId.P5: RLim(0.5, 2, ONE, 2, ONE, "unit"),
    RuleId.P6: RLim(0.5, 2, _DEC, 2, ONE, "unit"),
    RuleId.P7: LLim(0.5, 2, _DEC, 2, ONE),
    RuleId.P8: RLim(0.5, 2, _DEC, 2, ONE),
}


def default_property_instance(rule: RuleId | str) -> SpaceDescriptor:
    return _DEFAULT[RuleId(rule)]


def identify(rule: RuleId | str, d: SpaceDescriptor, grid: LogGrid = DEFAULT_GRID):
    """Return ``(first, second)`` descriptors related by the property.

    For ``equiv`` the two are equivalent, for ``subset`` the first is
    contained in the second, and for ``trivial`` the second is ``None``.
    """
    rule = RuleId(rule)
    if rule == RuleId.P1:
        return extend_unit(d, grid), d
    if rule == RuleId.P2:
        return d, Endpoint(0, "unit")
    if rule in (RuleId.P3, RuleId.P4):
        return d, Standard(d.sigma, d.q, d.a, "unit")
    if rule == RuleId.P5:
        return d, None
    if rule == RuleId.P6:
        # containment holds with the inner weight a; see the ledger for the b reading
        return Standard(d.sigma, d.q, d.a, "unit"), d
    if rule in (RuleId.P7, RuleId.P8):
        return d, as_unit(d)
    raise KeyError(f"{rule} is not a property rule")


@dataclass(frozen=True, eq=False)
class PropertyReport:
    rule: RuleId
    kind: str
    report: RatioReport | None
    verdict: str
    passed: bool

    def to_json(self) -> dict:
        return {"rule": str(self.rule.value), "kind": self.kind, "verdict": self.verdict, "passed": self.passed,
                "ratios": None if self.report is None else self.report.summary()}


def check_property(rule: RuleId | str, d: SpaceDescriptor | None = None, family: list | None = None,
                   grid: LogGrid = DEFAULT_GRID, bound: float = 100.0) -> PropertyReport:
    """Numerically check one property on the unit staircase family.

    ``equiv`` passes when the ratio spread is at most ``bound``; ``subset``
    passes when ``||f||_second / ||f||_first`` never exceeds ``bound``;
    ``trivial`` passes when :func:`validate` reports ``trivial`` and the
    norm integral diverges.
    """
    rule = RuleId(rule)
    d = d if d is not None else _DEFAULT[rule]
    kind = _KIND[rule]
    family = family if family is not None else unit_family(grid=grid)
    first, second = identify(rule, d, grid)
    if kind == "trivial":
        verdict = validate(first).verdict
        _, f = family[0]
        try:
            v = float(interp_norm(first, k_l1_linf(f, grid), check=False))
            diverges = not np.isfinite(v)
        except NonConvergent:
            diverges = True
        return PropertyReport(rule, kind, None, f"{verdict}; norm {'diverges' if diverges else 'finite'}",
                              verdict == "trivial" and diverges)
    profiles = [f for _, f in family]
    n1 = operand_norms(first, profiles, grid)
    n2 = operand_norms(second, profiles, grid)
    recs = [RatioRecord(fid, float(b), float(a)) for (fid, _), a, b in zip(family, n1, n2)
            if a > 0 and b > 0 and np.isfinite(a) and np.isfinite(b)]
    rep = RatioReport(recs, [], None, {"title": f"{rule.value} {kind}"})
    if kind == "equiv":
        ok = rep.passed(bound, None)
        verdict = f"spread {rep.spread:.4g}"
    else:
        ok = bool(recs) and rep.max <= bound
        verdict = f"max ratio {rep.max:.4g}"
    return PropertyReport(rule, kind, rep, verdict, ok)


__all__ = ["PROPERTY_RULES", "PropertyReport", "check_property", "default_property_instance", "identify"]
