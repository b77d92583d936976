"""Compact invariant suite behind ``svinterp selftest``.

Every check returns ``(key, passed, detail)``; keys are rule identifiers or
short property names so every :class:`RuleId` appears at least once.
"""

from __future__ import annotations

import math

import numpy as np

from .grid import DEFAULT_GRID, LogGrid
from .kfunc import DecreasingProfile, DiscreteCouple, WeightedLpNorm, k_l1_linf, k_oracle_values, k_weighted_l1
from .quad import GridFunction, PowerTail, partial_qnorm, weighted_qnorm
from .spaces import Grand, RLim, Standard, interp_norm, lorentz_norm
from .sv import LogPow


def _sqrt2(grid: LogGrid):
    K = GridFunction(grid, np.minimum(grid.t, 1.0), PowerTail(1.0), PowerTail(0.0))
    v = weighted_qnorm(K, 0.5, 2, Standard(0.5, 2).b)
    return abs(v / math.sqrt(2) - 1) <= 1e-3, f"value {v:.6f}"


def tail_band(b, alpha: float, q: float, grid: LogGrid) -> np.ndarray:
    """``||s^(alpha-1/q) b||_{q,(0,t)} / (t^alpha b(t))`` for ``alpha > 0``, over ``(t, inf)`` for ``alpha < 0``."""
    ones = GridFunction.constant(grid, 1.0)
    side = "lower" if alpha > 0 else "upper"
    P = partial_qnorm(ones, -alpha, q, b, side)
    return P.samples / np.exp(alpha * grid.x + b.logval(grid.x))


def _tail_band(grid: LogGrid):
    sel = (grid.t >= 1e-6) & (grid.t <= 1e6)
    lo, hi = math.inf, 0.0
    for b in (LogPow(1.0), LogPow(-2.0)):
        for alpha in (0.5, -0.5):
            r = tail_band(b, alpha, 2.0, grid)[sel]
            lo, hi = min(lo, r.min()), max(hi, r.max())
    return bool(lo > 0.1 and hi < 10), f"ratio range [{lo:.3g}, {hi:.3g}]"


def _oracle(seed: int):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(3):
        c = DiscreteCouple.random(8, rng)
        f = rng.normal(size=8)
        ts = np.array([1e-2, 1.0, 1e2])
        vals, _ = k_oracle_values(WeightedLpNorm(c.w0), WeightedLpNorm(c.w1), f, ts)
        ref = np.array([k_weighted_l1(c, f, t) for t in ts])
        worst = max(worst, float(np.max(np.abs(vals / ref - 1))))
    return worst <= 1e-4, f"max relative error {worst:.2e}"


def _swap_identity(seed: int):
    rng = np.random.default_rng(seed)
    c = DiscreteCouple.random(8, rng)
    f = rng.normal(size=8)
    worst = max(abs(k_weighted_l1(c, f, t) - t * k_weighted_l1(c.swap(), f, 1 / t)) / k_weighted_l1(c, f, t)
                for t in (1e-3, 0.5, 7.0, 1e3))
    return worst <= 1e-12, f"max relative defect {worst:.1e}"


def _grand_identity(grid: LogGrid):
    f = DecreasingProfile.indicator()
    v = lorentz_norm(Grand(2, 2, math.inf, LogPow(0.0)), f, grid)
    w = interp_norm(RLim(0.5, math.inf, LogPow(0.0), 2), k_l1_linf(f, grid))
    return abs(v / math.sqrt(2) - 1) <= 1e-3 and abs(w / v - 1) <= 1e-3, f"grand {v:.6f}, R-limit {w:.6f}"


def run_selftest(grid: LogGrid = DEFAULT_GRID, seed: int = 0, spread_bound: float = 100.0,
                 refine: bool = False, holmstedt: bool = True):
    """Run the suite and yield ``(key, passed, detail)`` lines."""
    from . import holmstedt as hm
    from .reiteration import (COROLLARY_RULES, PROPERTY_RULES, REITERATION_RULES, check_property,
                              default_instance, default_lorentz_instance, derive, run_chain,
                              specialize_lorentz, verify_equivalence)
    from .reiteration.verify import default_family

    yield ("quad: sqrt2 norm", *_sqrt2(grid))
    yield ("sv: tail band", *_tail_band(grid))
    yield ("kfunc: oracle vs weighted-l1", *_oracle(seed))
    yield ("kfunc: swap identity", *_swap_identity(seed))
    yield ("spaces: grand = R-limit", *_grand_identity(grid))
    family = default_family(seed=seed, grid=grid)
    for rule in REITERATION_RULES:
        out = derive(default_instance(rule), grid)
        rep = verify_equivalence(out, family=None if out.mode == "unit" else family, refine=refine)
        yield (rule.value, rep.passed(spread_bound), f"spread {rep.spread:.3g} via {out.route}")
    for rule in COROLLARY_RULES:
        out = specialize_lorentz(*default_lorentz_instance(rule), grid)
        rep = verify_equivalence(out, family=family, refine=refine)
        yield (rule.value, rep.passed(spread_bound) and out.rule == rule, f"spread {rep.spread:.3g}")
    for rule in PROPERTY_RULES:
        p = check_property(rule, grid=grid, bound=spread_bound)
        yield (rule.value, p.passed, p.verdict)
    for name in ("T11i", "T25"):
        ch = run_chain(default_instance(name), grid, family)
        yield (f"chain {name}", ch.passed(spread_bound), f"agreement spread {ch.agreement.spread:.3g}")
    if holmstedt:
        for th in ("T14", "T17"):
            inst = hm.default_instance(th, seed)
            rep = hm.verify(inst, hm.default_family(inst.couple.n, seed, per_shape=1))
            yield (f"holmstedt {th}", rep.passed(spread_bound, None), f"spread {rep.spread:.3g}")
