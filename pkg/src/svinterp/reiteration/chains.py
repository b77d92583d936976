"""Multi-step derivations reproducing two-step reiteration arguments.

An ``L``-operand ``LLim(theta0, r0, b0, q0, a0)`` is first identified with the
space ``(Y0, X1)_{0, r0, c}`` where ``Y0 = Standard(theta0, q0, a0)`` and
``c = (b0/a0) o sigma^{-1}``. The outer interpolation then becomes an
interpolation of the couple ``(Y0, X1)`` between a ``theta = 0`` space and
its right endpoint (rule T8i), after which one more rule on ``(Y0, X1)``
lands on the base couple. The chain result is compared with the one-step
rule.

* chain ``"T11i"``: T10iii, T8i, T7 against T11i;
* chain ``"T25"``: T18ii, T8i, T18i against T25.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidDescriptor
from ..grid import DEFAULT_GRID, LogGrid
from ..reports import RatioRecord, RatioReport
from ..spaces import Endpoint, LLim, Standard
from .rules import Outer, RuleId, RuleInput, RuleOutput, compose_inverse, construct, derive
from .verify import default_family, operand_norms

CHAINS = {"T11i": (RuleId.T10iii, RuleId.T8i, RuleId.T7), "T25": (RuleId.T18ii, RuleId.T8i, RuleId.T18i)}


@dataclass(frozen=True, eq=False)
class ChainReport:
    """Outcome of a chain check.

    Attributes
    ----------
    name : str
        Target rule of the chain.
    steps : tuple of RuleOutput
        Identification step, T8i step and final step.
    direct : RuleOutput
        One-step derivation of the same input.
    eta_equal : bool
        Exact equality of the final and direct ``eta``.
    identification : RatioReport
        Norm ratios of the ``L`` operand against its identification.
    agreement : RatioReport
        Norm ratios of the chain result against the direct result.
    """

    name: str
    steps: tuple
    direct: RuleOutput
    eta_equal: bool
    identification: RatioReport
    agreement: RatioReport

    def passed(self, spread_bound: float = 100.0) -> bool:
        return (self.eta_equal and self.identification.passed(spread_bound, None)
                and self.agreement.passed(spread_bound, None))

    def to_json(self) -> dict:
        return {"chain": self.name, "rules": [str(s.rule.value) for s in self.steps],
                "direct_rule": str(self.direct.rule.value), "eta_chain": self.steps[-1].eta,
                "eta_direct": self.direct.eta, "eta_equal": self.eta_equal,
                "identification": self.identification.summary(), "agreement": self.agreement.summary()}


def _compare(d0, d1, family, grid, title) -> RatioReport:
    profiles = [f for _, f in family]
    n0 = operand_norms(d0, profiles, grid)
    n1 = operand_norms(d1, profiles, grid)
    recs = [RatioRecord(fid, float(x), float(y)) for (fid, _), x, y in zip(family, n0, n1)
            if np.isfinite(x) and np.isfinite(y) and x > 0 and y > 0]
    skipped = [(fid, "zero or infinite norm") for (fid, _), x, y in zip(family, n0, n1)
               if not (np.isfinite(x) and np.isfinite(y) and x > 0 and y > 0)]
    return RatioReport(recs, skipped, None, {"title": title})


def run_chain(inp: RuleInput, grid: LogGrid = DEFAULT_GRID, family: list | None = None) -> ChainReport:
    """Run the chain matching ``inp`` (a T11i or T25 input, full mode)."""
    direct = derive(inp, grid)
    if direct.rule not in (RuleId.T11i, RuleId.T25):
        raise InvalidDescriptor(f"no chain for {direct.rule.value}; expected a T11i or T25 input")
    X0, X1, o = inp.left, inp.right, inp.outer
    if not isinstance(X0, LLim):
        raise InvalidDescriptor("chain input needs an L-space left operand")
    family = family if family is not None else default_family(grid=grid)
    Y0 = Standard(X0.sigma, X0.q, X0.a)
    probe = construct(RuleId.T7 if isinstance(X1, Standard) else RuleId.T18i,
                      RuleInput(Y0, X1, Outer(0.5, 2)), grid)
    c = compose_inverse(X0.ratio, probe.sigma, grid, {"op": "chain c = (b0/a0) o sigma^-1"})
    ident = derive(RuleInput(Y0, X1, Outer(0.0, X0.r, c)), grid)
    # (Y0, X1)_{0, r0, c} seen as a space of the couple (Y0, X1)
    mid = derive(RuleInput(Standard(0.0, X0.r, c), Endpoint(1), o), grid)
    d = mid.result
    final = derive(RuleInput(Y0, X1, Outer(d.theta, d.q, d.b)), grid)
    name = str(direct.rule.value)
    return ChainReport(name, (ident, mid, final), direct, final.eta == direct.eta,
                       _compare(X0, ident.result, family, grid, f"{name} chain identification"),
                       _compare(final.result, direct.result, family, grid, f"{name} chain agreement"))


__all__ = ["CHAINS", "ChainReport", "run_chain"]
