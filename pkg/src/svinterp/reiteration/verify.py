"""Numerical equivalence checks for derived rules.

Both sides are computed on the couple ``(L1, L_inf)`` for staircase
rearrangements ``f*``:

* the left side is the outer norm ``||u^(-theta-1/r) a(u) K(u, f; X0, X1)||_r``
  with ``K`` replaced by its truncation envelope
  ``min_s [ ||(f*-s)_+||_X0 + u ||min(f*, s)||_X1 ]`` over a ladder of levels
  ``s``; on ``(L1, L_inf)`` this envelope is the exact ``K`` and for
  rearrangement-invariant operands it is the standard near-optimal split;
* the right side is the norm of ``f`` in the derived space.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import NonConvergent, RangeError, TrivialSpace
from ..grid import DEFAULT_GRID, LogGrid
from ..kfunc import DecreasingProfile, k_l1_linf
from ..quad import GridFunction, PowerTail, weighted_qnorm
from ..reports import RatioRecord, RatioReport
from ..spaces import LorentzDescriptor, SpaceDescriptor, interp_norm, lorentz_norm

DEFAULT_SPREAD_BOUND = 100.0
DEFAULT_DRIFT_BOUND = 0.10


# -- families -------------------------------------------------------------------------

def default_family(n: int = 20, seed: int = 0, grid: LogGrid = DEFAULT_GRID,
                   support: tuple = (1e-4, 1e4), max_steps: int = 6) -> list:
    """Seeded staircases with breakpoints on grid nodes inside ``support``.

    Returns
    -------
    list of (str, DecreasingProfile)
    """
    rng = np.random.default_rng(seed)
    t = grid.t
    nodes = t[(t >= support[0] * (1 - 1e-12)) & (t <= support[1] * (1 + 1e-12))]
    out = []
    for i in range(n):
        k = int(rng.integers(1, max_steps + 1))
        bps = np.sort(rng.choice(nodes, size=k, replace=False))
        heights = np.sort(10.0 ** rng.uniform(-2, 2, size=k))[::-1]
        heights = heights * (1 + 1e-9 * np.arange(k)[::-1])  # keep values distinct
        out.append((f"stair{i:02d}", DecreasingProfile(bps, heights)))
    return out


def unit_family(n: int = 20, seed: int = 0, grid: LogGrid = DEFAULT_GRID) -> list:
    """Staircases supported in ``(0, 1]``, standing in for an ordered couple."""
    return default_family(n, seed, grid, support=(1e-4, 1.0))


# -- operand norms ------------------------------------------------------------------------

def operand_norms(d, profiles: list, grid: LogGrid) -> np.ndarray:
    """Norms of each profile in the space ``d``; zero profiles give 0."""
    vals = np.zeros(len(profiles))
    live = [i for i, p in enumerate(profiles) if not p.is_zero()]
    if not live:
        return vals
    if isinstance(d, LorentzDescriptor):
        for i in live:
            vals[i] = lorentz_norm(d, profiles[i], grid)
        return vals
    Ks = [k_l1_linf(profiles[i], grid) for i in live]
    batch = GridFunction(grid, np.stack([K.samples for K in Ks]), Ks[0].tail_zero, Ks[0].tail_inf)
    vals[live] = np.atleast_1d(interp_norm(d, batch, check=False))
    return vals


def _levels(f: DecreasingProfile, per_gap: int = 3) -> np.ndarray:
    v = np.unique(f.values[f.values > 0])
    if f.tail_value > 0:
        v = np.unique(np.append(v, f.tail_value))
    if v.size == 0:
        return v
    lv = np.log(v)
    pts = [lv]
    frac = np.arange(1, per_gap + 1) / (per_gap + 1)
    for lo, hi in zip(lv[:-1], lv[1:]):
        pts.append(lo + frac * (hi - lo))
    pts.append(lv[0] - np.log([2.0, 4.0, 10.0]))
    return np.unique(np.exp(np.concatenate(pts)))


def truncation_k(left, right, f: DecreasingProfile, grid: LogGrid) -> GridFunction:
    """Truncation envelope of ``K(u, f; left, right)`` on the grid."""
    levels = _levels(f)
    tops, bottoms = [], []
    for s in levels:
        top, bot = f.truncate(s)
        tops.append(top)
        bottoms.append(bot)
    n0 = operand_norms(left, [f] + tops, grid)
    n1 = operand_norms(right, bottoms + [f], grid)
    a0 = np.concatenate([n0, [0.0]])
    a1 = np.concatenate([[0.0], n1])
    K = np.min(a0[:, None] + grid.t[None, :] * a1[:, None], axis=0)
    return GridFunction(grid, K, PowerTail(1.0), PowerTail(0.0))


def outer_norm(outer, K: GridFunction) -> float:
    return float(weighted_qnorm(K, outer.theta, outer.r, outer.a))


def result_norms(result, profiles: list, grid: LogGrid) -> np.ndarray:
    return operand_norms(result, profiles, grid)


# -- equivalence ------------------------------------------------------------------------------

def _ratios(output, family: list, grid: LogGrid):
    records, skipped = [], []
    live = []
    for fid, f in family:
        if f.is_zero():
            skipped.append((fid, "zero function: both sides vanish"))
        else:
            live.append((fid, f))
    try:
        rhs = result_norms(output.result, [f for _, f in live], grid)
    except (NonConvergent, TrivialSpace, RangeError) as exc:
        return [], skipped + [(fid, f"right side: {exc}") for fid, _ in live]
    for (fid, f), r in zip(live, rhs):
        try:
            lhs = outer_norm(output.outer, truncation_k(output.left, output.right, f, grid))
        except (NonConvergent, TrivialSpace, RangeError) as exc:
            skipped.append((fid, f"left side: {exc}"))
            continue
        if not (math.isfinite(lhs) and math.isfinite(r) and lhs > 0 and r > 0):
            skipped.append((fid, f"non-finite or zero norm (lhs={lhs}, rhs={r})"))
            continue
        records.append(RatioRecord(fid, lhs, float(r)))
    return records, skipped


def verify_equivalence(output, input=None, family: list | None = None, refine: bool = True,
                       scale: float = 1.0) -> RatioReport:
    """Measure ``lhs / rhs`` over a family of rearrangements.

    Parameters
    ----------
    output : RuleOutput or CorollaryOutput
        Anything exposing ``left``, ``right``, ``outer``, ``result``,
        ``grid`` and ``at(grid)``.
    input : RuleInput, optional
        Accepted for symmetry with :func:`derive`; the output's own input is
        used.
    family : list of (str, DecreasingProfile), optional
        Defaults to :func:`default_family` (or :func:`unit_family` in unit
        mode).
    refine : bool
        Also compute the spread on a twice finer grid.
    scale : float
        Multiply every member by this factor (homogeneity checks).
    """
    grid = output.grid
    if family is None:
        family = unit_family(grid=grid) if output.mode == "unit" else default_family(grid=grid)
    if scale != 1.0:
        family = [(fid, f.scaled(scale)) for fid, f in family]
    records, skipped = _ratios(output, family, grid)
    rep = RatioReport(records, skipped, None, {"title": f"{output.label} equivalence", "rule": output.label,
                                                "grid": grid.to_json(), "members": len(family)})
    if refine and records:
        fine = grid.refine(2)
        rec2, _ = _ratios(output.at(fine), family, fine)
        if rec2:
            rep.refined_spread = RatioReport(rec2).spread
    return rep
