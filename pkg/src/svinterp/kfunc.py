"""K-functionals: exact formulas for concrete couples and a convex oracle.

Two models are supported.

* The couple ``(L1, L_inf)`` acting on non-increasing rearrangements, where
  ``K(t, f) = int_0^t f*(u) du`` is evaluated exactly on staircases.
* Finite weighted-l1 couples ``(l1(w0), l1(w1))`` of dimension ``n``, where
  ``K(t, f) = sum_i min(w0_i, t w1_i) |f_i|``.  Norms of interpolation
  spaces built on such a couple are convex in ``f`` whenever all indices
  are at least 1, so the K-functional of a derived couple can be computed
  by conic optimization (:func:`k_oracle`).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .errors import MaxIterations, NonConvexIndices
from .grid import DEFAULT_GRID, LogGrid
from .quad import GridFunction, PowerTail, Staircase, fit_tails, tail_integral, tail_sup
from .sv import ONE, SvExpr

INF = math.inf

# Gauss-Legendre nodes for cell averages of parametric profiles
_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)


# -- rearrangements -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DecreasingProfile:
    """A non-increasing staircase ``f*`` on ``(0, inf)``.

    ``values[k]`` is the value on ``(breakpoints[k-1], breakpoints[k])``
    (with ``breakpoints[-1]`` read as 0 for ``k = 0``) and ``tail_value`` is
    the value beyond the last breakpoint.

    Parameters
    ----------
    breakpoints : array_like
        Strictly increasing positive reals.
    values : array_like
        Non-increasing non-negative reals, one per breakpoint.
    tail_value : float
        Value on ``(breakpoints[-1], inf)``; 0 means bounded support.
    head_model, tail_model : PowerTail, optional
        Power-log shape of ``f*`` below the first or beyond the last
        breakpoint, for parametric profiles that are not constant there.
        ``values[0]`` is then the average over ``(0, breakpoints[0])`` and
        ``tail_value`` the value just after the last breakpoint.
    """

    breakpoints: np.ndarray
    values: np.ndarray
    tail_value: float = 0.0
    head_model: PowerTail | None = None
    tail_model: PowerTail | None = None

    def __post_init__(self):
        bp = np.array(self.breakpoints, dtype=float).reshape(-1)
        v = np.array(self.values, dtype=float).reshape(-1)
        tv = float(self.tail_value)
        if bp.shape != v.shape:
            raise ValueError("breakpoints and values must have the same length")
        if bp.size and (bp[0] <= 0 or np.any(np.diff(bp) <= 0) or not np.all(np.isfinite(bp))):
            raise ValueError("breakpoints must be finite, positive and strictly increasing")
        if np.any(v < 0) or tv < 0 or not np.all(np.isfinite(v)) or not math.isfinite(tv):
            raise ValueError("profile values must be finite and non-negative")
        seq = np.append(v, tv)
        slack = 1e-12 * max(1.0, float(np.max(seq)))
        if np.any(np.diff(seq) > slack):
            raise ValueError("profile values must be non-increasing")
        for a in (bp, v):
            a.setflags(write=False)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "tail_value", tv)

    # -- constructors -------------------------------------------------------
    @classmethod
    def indicator(cls, a: float = 1.0, height: float = 1.0) -> "DecreasingProfile":
        """``height * chi_(0,a)``."""
        return cls([a], [height])

    @classmethod
    def constant(cls, c: float) -> "DecreasingProfile":
        return cls([], [], tail_value=c)

    @classmethod
    def zero(cls) -> "DecreasingProfile":
        return cls([], [], 0.0)

    @classmethod
    def power_log(cls, beta: float, delta: float = 0.0, support: float | None = None,
                  grid: LogGrid = DEFAULT_GRID) -> "DecreasingProfile":
        """Sample ``u**(-beta) (1+|ln u|)**delta`` (cut at ``support``) onto grid cells.

        Cell values are exact cell averages, so ``K`` is exact at the nodes.
        If the shape is not monotone, the running minimum of the averages is
        used (the largest non-increasing minorant on the grid).
        """
        if not (0 <= beta < 1):
            raise ValueError("power_log profiles need 0 <= beta < 1 for local integrability")
        x = grid.x
        top = x[-1] if support is None else min(x[-1], math.log(support))
        nodes = x[x < top - 1e-12]
        nodes = np.append(nodes, top)
        if nodes.size < 2:
            raise ValueError("support must extend beyond the first grid node")
        a, b = nodes[:-1], nodes[1:]
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        xs = mid[:, None] + half[:, None] * _GL_X[None, :]
        f = np.exp((1 - beta) * xs) * (1 + np.abs(xs)) ** delta
        integral = (f * _GL_W[None, :]).sum(axis=1) * half
        avg = integral / (np.exp(b) - np.exp(a))
        # head: average over (0, t_0)
        x0 = nodes[0]
        h = math.exp((1 - beta) * x0) * (1 + abs(x0)) ** delta
        head_int = h * tail_integral(-(1 - beta), delta, 0.0, 1 + abs(x0))
        head_avg = head_int / math.exp(x0)
        vals = np.minimum.accumulate(np.concatenate([[head_avg], avg]))
        bps = np.exp(nodes)
        cut = support is not None and math.log(support) <= x[-1] + 1e-12
        if cut:
            return cls(bps, vals, 0.0, head_model=PowerTail(-beta, delta))
        tail_v = min(vals[-1], math.exp(-beta * top) * (1 + abs(top)) ** delta)
        return cls(bps, vals, tail_v, head_model=PowerTail(-beta, delta),
                   tail_model=PowerTail(-beta, delta))

    # -- evaluation ----------------------------------------------------------
    @property
    def cumulative(self) -> np.ndarray:
        """``K`` at every breakpoint."""
        bp, v = self.breakpoints, self.values
        widths = np.diff(np.concatenate([[0.0], bp]))
        return np.cumsum(v * widths)

    def fstar(self, t):
        """Pointwise value of the staircase (right-continuous convention)."""
        t = np.asarray(t, dtype=float)
        k = np.searchsorted(self.breakpoints, t, side="right")
        ext = np.append(self.values, self.tail_value)
        out = ext[k]
        return float(out) if out.ndim == 0 else out

    def k(self, t):
        """Exact ``K(t, f; L1, L_inf) = int_0^t f*``."""
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        bp, v = self.breakpoints, self.values
        if bp.size == 0:
            out = self.tail_value * t
            return float(out[0]) if scalar else out
        cum = self.cumulative
        k = np.searchsorted(bp, t, side="left")
        left = np.concatenate([[0.0], bp])[np.minimum(k, bp.size)]
        base = np.concatenate([[0.0], cum])[np.minimum(k, bp.size)]
        ext = np.append(v, self.tail_value)
        out = base + ext[k] * (t - left)
        if self.head_model is not None:
            hm = self.head_model
            m = t < bp[0]
            if np.any(m):
                y, y0 = 1 + np.abs(np.log(t[m])), 1 + abs(math.log(bp[0]))
                out[m] = cum[0] * (t[m] / bp[0]) ** (1 + hm.p) * (y / y0) ** hm.gamma
        if self.tail_model is not None and self.tail_value > 0:
            tm = self.tail_model
            m = t > bp[-1]
            xm = math.log(bp[-1])
            y0 = 1 + abs(xm)
            for i in np.nonzero(m)[0]:
                D = math.log(t[i]) - xm
                out[i] = cum[-1] + self.tail_value * bp[-1] * tail_integral(1 + tm.p, tm.gamma, 0.0, y0, D)
        return float(out[0]) if scalar else out

    def staircase(self, grid: LogGrid = DEFAULT_GRID) -> Staircase:
        """Grid-cell averages of ``f*`` (exact ``K`` at nodes)."""
        t = grid.t
        K = self.k(t)
        cells = np.diff(K) / np.diff(t)
        cells = np.minimum.accumulate(np.maximum(cells, 0.0))
        head = K[0] / t[0]
        hm = self.head_model or PowerTail()
        if self.head_model is not None:
            head = head * (1 + hm.p)
        head = max(head, cells[0]) if cells.size else head
        if self.breakpoints.size and self.breakpoints[-1] <= t[-1] * (1 + 1e-12):
            tail, tm = self.tail_value, PowerTail()
        else:
            # the profile continues past the grid; freeze its value at t_max
            tail = float(self.fstar(t[-1] * (1 + 1e-9)))
            tm = self.tail_model or PowerTail()
        tail = min(tail, cells[-1]) if cells.size else tail
        return Staircase(grid, head, cells, tail, hm, tm)

    def scaled(self, c: float) -> "DecreasingProfile":
        return DecreasingProfile(self.breakpoints, self.values * c, self.tail_value * c,
                                 self.head_model, self.tail_model)

    def pieces(self) -> list:
        """``(value, measure)`` pairs."""
        widths = np.diff(np.concatenate([[0.0], self.breakpoints]))
        out = [(float(v), float(w)) for v, w in zip(self.values, widths)]
        if self.tail_value > 0:
            out.append((self.tail_value, INF))
        return out

    def truncate(self, level: float) -> tuple:
        """Split ``f*`` at height ``level`` into ``((f*-level)_+, min(f*, level))``."""
        top = DecreasingProfile(self.breakpoints, np.maximum(self.values - level, 0.0),
                                max(self.tail_value - level, 0.0))
        bottom = DecreasingProfile(self.breakpoints, np.minimum(self.values, level),
                                   min(self.tail_value, level))
        return top, bottom

    def is_zero(self) -> bool:
        return not np.any(self.values > 0) and self.tail_value == 0

    def to_json(self) -> dict:
        d = {"breakpoints": self.breakpoints.tolist(), "values": self.values.tolist(),
             "tail_value": self.tail_value}
        if self.head_model is not None:
            d["head_model"] = self.head_model.to_json()
        if self.tail_model is not None:
            d["tail_model"] = self.tail_model.to_json()
        return d

    @classmethod
    def from_json(cls, d: dict) -> "DecreasingProfile":
        hm = PowerTail.from_json(d["head_model"]) if "head_model" in d else None
        tm = PowerTail.from_json(d["tail_model"]) if "tail_model" in d else None
        return cls(d["breakpoints"], d["values"], d.get("tail_value", 0.0), hm, tm)

    def __eq__(self, other):
        return (isinstance(other, DecreasingProfile) and np.array_equal(self.breakpoints, other.breakpoints)
                and np.array_equal(self.values, other.values) and self.tail_value == other.tail_value
                and self.head_model == other.head_model and self.tail_model == other.tail_model)

    __hash__ = None


def rearrange(pieces) -> DecreasingProfile:
    """Non-increasing rearrangement of ``(value, measure)`` pieces.

    Pieces are sorted by value, equal values merged and zero values dropped.
    At most one piece may have infinite measure, and it must carry the
    smallest positive value.
    """
    items = []
    for v, m in pieces:
        v, m = float(v), float(m)
        if v < 0:
            raise ValueError("rearrange needs non-negative values")
        if m < 0 or math.isnan(m):
            raise ValueError("measures must be non-negative")
        if v > 0 and m > 0:
            items.append((v, m))
    items.sort(key=lambda p: -p[0])
    merged: list = []
    for v, m in items:
        if merged and merged[-1][0] == v:
            merged[-1][1] += m
        else:
            merged.append([v, m])
    tail = 0.0
    if merged and math.isinf(merged[-1][1]):
        tail = merged.pop()[0]
    if any(math.isinf(m) for _, m in merged):
        raise ValueError("a piece of infinite measure must have the smallest value")
    bps = np.cumsum([m for _, m in merged]) if merged else np.array([])
    return DecreasingProfile(bps, [v for v, _ in merged], tail)


# -- K-profiles -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class KProfile(GridFunction):
    """``t -> K(t, f)`` on a grid, tagged with the couple it belongs to."""

    couple: str = "(L1,Linf)"
    diagnostics: dict = field(default_factory=dict)


def k_l1_linf(fstar: DecreasingProfile, grid: LogGrid = DEFAULT_GRID) -> KProfile:
    """Exact ``K(t, f; L1, L_inf) = int_0^t f*`` at the grid nodes."""
    K = fstar.k(grid.t)
    if fstar.head_model is not None:
        tz = PowerTail(1 + fstar.head_model.p, fstar.head_model.gamma, fstar.head_model.delta)
    else:
        tz = PowerTail(1.0)
    last = fstar.breakpoints[-1] if fstar.breakpoints.size else 0.0
    if fstar.tail_value == 0 and last <= grid.t[-1]:
        ti = PowerTail(0.0)
    elif fstar.tail_model is not None and fstar.tail_value > 0:
        tm = fstar.tail_model
        if 1 + tm.p > 1e-12:
            ti = PowerTail(1 + tm.p, tm.gamma, tm.delta)
        elif abs(1 + tm.p) <= 1e-12 and tm.gamma > -1:
            ti = PowerTail(0.0, tm.gamma + 1, tm.delta)
        else:
            ti = PowerTail(0.0)
    elif fstar.tail_value > 0:
        ti = PowerTail(1.0)
    else:
        ti = PowerTail(0.0)
    return KProfile(grid, K, tz, ti, couple="(L1,Linf)")


def maximal(fstar: DecreasingProfile, grid: LogGrid = DEFAULT_GRID) -> GridFunction:
    """``f**(t) = K(t)/t`` at the grid nodes."""
    K = k_l1_linf(fstar, grid)
    tz, ti = K.tail_zero, K.tail_inf
    return GridFunction(grid, K.samples / grid.t, PowerTail(tz.p - 1, tz.gamma, tz.delta),
                        PowerTail(ti.p - 1, ti.gamma, ti.delta))


# -- discrete couples -----------------------------------------------------------

MAX_DIMENSION = 64


@dataclass(frozen=True, eq=False)
class DiscreteCouple:
    """Weighted sequence spaces ``(l^{p0}(w0), l^{p1}(w1))`` on ``R^n``."""

    w0: np.ndarray
    w1: np.ndarray
    p0: float = 1.0
    p1: float = 1.0
    max_dimension: int = MAX_DIMENSION

    def __post_init__(self):
        w0 = np.array(self.w0, dtype=float).reshape(-1)
        w1 = np.array(self.w1, dtype=float).reshape(-1)
        if w0.shape != w1.shape or w0.size == 0:
            raise ValueError("weight sequences must be non-empty and of equal length")
        if np.any(w0 <= 0) or np.any(w1 <= 0) or not np.all(np.isfinite(w0 + w1)):
            raise ValueError("weights must be positive and finite")
        if w0.size > self.max_dimension:
            raise ValueError(f"dimension {w0.size} exceeds the configured bound {self.max_dimension}")
        for a in (w0, w1):
            a.setflags(write=False)
        object.__setattr__(self, "w0", w0)
        object.__setattr__(self, "w1", w1)

    @property
    def n(self) -> int:
        return self.w0.size

    @property
    def ratios(self) -> np.ndarray:
        """Kink locations ``w0_i / w1_i`` of ``K``."""
        return self.w0 / self.w1

    def swap(self) -> "DiscreteCouple":
        return DiscreteCouple(self.w1, self.w0, self.p1, self.p0, self.max_dimension)

    def endpoint(self, side: int) -> "WeightedLpNorm":
        return WeightedLpNorm(self.w0, self.p0) if side == 0 else WeightedLpNorm(self.w1, self.p1)

    @classmethod
    def random(cls, n: int, rng: np.random.Generator, spread: float = 2.0) -> "DiscreteCouple":
        """Log-uniform weights with ``log10`` spread ``spread`` per side."""
        w0 = 10 ** rng.uniform(-spread, spread, n)
        w1 = 10 ** rng.uniform(-spread, spread, n)
        return cls(w0, w1)

    def to_json(self) -> dict:
        return {"w0": self.w0.tolist(), "w1": self.w1.tolist(), "p0": self.p0, "p1": self.p1}


def k_weighted_l1(couple: DiscreteCouple, f, t: float, decomposition: bool = False):
    """Exact ``K(t, f)`` for a weighted-l1 couple.

    Each coordinate goes to the side with the smaller weight
    (``w0_i`` against ``t w1_i``), which is optimal coordinatewise.
    """
    if couple.p0 != 1 or couple.p1 != 1:
        raise ValueError("k_weighted_l1 needs a weighted-l1 couple")
    f = np.asarray(f, dtype=float)
    if f.shape != (couple.n,):
        raise ValueError(f"dimension mismatch: f has shape {f.shape}, couple has n={couple.n}")
    if t <= 0:
        raise ValueError("t must be positive")
    c0, c1 = couple.w0, t * couple.w1
    val = float(np.sum(np.minimum(c0, c1) * np.abs(f)))
    if not decomposition:
        return val
    to0 = c0 <= c1
    f0 = np.where(to0, f, 0.0)
    return val, f0, f - f0


# -- norm evaluators --------------------------------------------------------------

class NormEvaluator:
    """A norm on ``R^n`` with a numpy value and a cvxpy realization."""

    n: int
    min_index: float = 1.0

    def value(self, g) -> float:
        raise NotImplementedError

    def cvx(self, g):
        """Return ``(expression, constraints)`` for the norm of the cvxpy vector ``g``."""
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class WeightedLpNorm(NormEvaluator):
    """``(sum_i (w_i |g_i|)**p)**(1/p)``."""

    w: np.ndarray
    p: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "w", np.asarray(self.w, dtype=float))

    @property
    def n(self):
        return self.w.size

    @property
    def min_index(self):
        return self.p

    def value(self, g):
        return float(np.linalg.norm(self.w * np.asarray(g, dtype=float), self.p))

    def cvx(self, g):
        import cvxpy as cp
        return cp.norm(cp.multiply(self.w, g), self.p), []


def _lower_tail_weight(kappa_rate: float, q: float, sv: SvExpr, x0: float) -> float:
    """``||e^{rate x} sv(e^x)||_{q,(-inf, x0)}`` relative to its value at ``x0``."""
    a = sv.asymptote("zero")
    if q == INF:
        return tail_sup(-kappa_rate, a.gamma, a.delta, 1 + abs(x0))
    return tail_integral(-q * kappa_rate, q * a.gamma, q * a.delta, 1 + abs(x0)) ** (1 / q)


def _upper_tail_weight(rate: float, q: float, sv: SvExpr, x0: float) -> float:
    a = sv.asymptote("inf")
    if q == INF:
        return tail_sup(rate, a.gamma, a.delta, 1 + abs(x0))
    return tail_integral(q * rate, q * a.gamma, q * a.delta, 1 + abs(x0)) ** (1 / q)


def _trap_weights(x: np.ndarray) -> np.ndarray:
    w = np.zeros_like(x)
    d = np.diff(x)
    w[:-1] += d / 2
    w[1:] += d / 2
    return w


@dataclass(frozen=True, eq=False)
class DiscreteSpaceNorm(NormEvaluator):
    """Norm of an interpolation space built on a weighted-l1 :class:`DiscreteCouple`.

    ``kind`` is one of ``"endpoint0"``, ``"endpoint1"``, ``"standard"``,
    ``"llim"`` or ``"rlim"``.  The inner K-functional is exact; the outer
    integrals use the trapezoid rule in ``ln u`` on nodes that contain every
    kink ``w0_i/w1_i``, with analytic tails (``K = u S1`` below the nodes and
    ``K = S0`` above them).  R-limiting norms are evaluated as L-limiting
    norms of the swapped couple, which is an exact identity.

    Parameters
    ----------
    couple : DiscreteCouple
    kind : str
    theta : float
        ``theta`` (standard) or ``sigma`` (limiting).
    q : float
        Standard index, or inner index of a limiting space.
    b : SvExpr
    r : float
        Outer index of a limiting space.
    a : SvExpr
        Inner weight of a limiting space.
    margin_decades, points_per_decade : float, int
        Node range beyond the kinks and node density.
    """

    couple: DiscreteCouple
    kind: str
    theta: float = 0.5
    q: float = 1.0
    b: SvExpr = ONE
    r: float = 1.0
    a: SvExpr = ONE
    margin_decades: float = 3.0
    points_per_decade: int = 8

    def __post_init__(self):
        if self.couple.p0 != 1 or self.couple.p1 != 1:
            raise ValueError("space norms are implemented for weighted-l1 couples")
        if self.kind not in ("endpoint0", "endpoint1", "standard", "llim", "rlim"):
            raise ValueError(f"unknown space kind {self.kind!r}")
        if self.kind == "rlim":
            inner = DiscreteSpaceNorm(self.couple.swap(), "llim", 1 - self.theta, self.q,
                                      self.b.recip_arg(), self.r, self.a.recip_arg(),
                                      self.margin_decades, self.points_per_decade)
            object.__setattr__(self, "_mirror", inner)
            return
        object.__setattr__(self, "_mirror", None)
        if self.kind.startswith("endpoint"):
            return
        ratios = np.log(self.couple.ratios)
        lo = ratios.min() - self.margin_decades * math.log(10)
        hi = ratios.max() + self.margin_decades * math.log(10)
        m = max(2, int(math.ceil((hi - lo) / math.log(10) * self.points_per_decade)) + 1)
        x = np.unique(np.concatenate([np.linspace(lo, hi, m), ratios]))
        # merge nodes closer than a tiny gap
        keep = np.concatenate([[True], np.diff(x) > 1e-9])
        x = x[keep]
        u = np.exp(x)
        M = np.minimum(self.couple.w0[None, :], u[:, None] * self.couple.w1[None, :])
        object.__setattr__(self, "_x", x)
        object.__setattr__(self, "_M", M)
        if self.kind == "standard":
            self._setup_standard()
        else:
            self._setup_llim()

    @property
    def n(self):
        return self.couple.n

    @property
    def min_index(self):
        if self.kind.startswith("endpoint"):
            return 1.0
        if self.kind == "standard":
            return self.q
        return min(self.q, self.r)

    # -- setup ------------------------------------------------------------
    def _setup_standard(self):
        x, th, q, b = self._x, self.theta, self.q, self.b
        phi = np.exp(-th * x + b.logval(x))
        if q == INF:
            wnode = phi
        else:
            wnode = phi * _trap_weights(x) ** (1 / q)
        # below the nodes K = u S1: integrand u^{1-theta} b S1
        lo = phi[0] * math.exp(x[0]) * _lower_tail_weight(1 - th, q, b, x[0])
        hi = phi[-1] * _upper_tail_weight(-th, q, b, x[-1])
        object.__setattr__(self, "_wnode", wnode)
        object.__setattr__(self, "_wlo", lo)
        object.__setattr__(self, "_whi", hi)

    def _setup_llim(self):
        x, s, q, r, a, b = self._x, self.theta, self.q, self.r, self.a, self.b
        psi = np.exp(-s * x + a.logval(x))
        beta = np.exp(b.logval(x) - a.logval(x))
        dx = np.diff(x)
        # inner chain: P_k^q = P_{k-1}^q + dx/2 (psi_{k-1}^q K_{k-1}^q + psi_k^q K_k^q)
        if q == INF:
            cl, cr = psi[:-1], psi[1:]
        else:
            cl, cr = psi[:-1] * (dx / 2) ** (1 / q), psi[1:] * (dx / 2) ** (1 / q)
        # inner head below x0: K = u S1
        h0 = psi[0] * math.exp(x[0]) * _lower_tail_weight(1 - s, q, a, x[0])
        ob = beta if r == INF else beta * _trap_weights(x) ** (1 / r)
        ba = b / a
        # outer tail below x0: P(s) = S1 C(s), C(s) = ||u^{1-sigma-1/q} a||_{q,(0,s)}
        lam_lo = self._outer_lower(ba)
        # outer tail above xN: P(s) <= P_N + S0 Psi(s)^{1/q}
        B, D = self._outer_upper(ba)
        object.__setattr__(self, "_cl", cl)
        object.__setattr__(self, "_cr", cr)
        object.__setattr__(self, "_h0", h0)
        object.__setattr__(self, "_ob", ob)
        object.__setattr__(self, "_lam_lo", lam_lo)
        object.__setattr__(self, "_B", B)
        object.__setattr__(self, "_D", D)

    def _C(self, xs):
        s, q, a = self.theta, self.q, self.a
        return np.exp((1 - s) * xs + a.logval(xs)) * np.array(
            [_lower_tail_weight(1 - s, q, a, float(v)) for v in np.atleast_1d(xs)])

    def _outer_lower(self, ba: SvExpr) -> float:
        x0, r = self._x[0], self.r
        xs = x0 - np.linspace(0.0, 60.0, 601)[::-1]
        vals = np.exp(ba.logval(xs)) * self._C(xs)
        if r == INF:
            return float(np.max(vals))
        return float(integrate.trapezoid(vals ** r, xs)) ** (1 / r)

    def _outer_upper(self, ba: SvExpr) -> tuple:
        xN, s, q, r, a = self._x[-1], self.theta, self.q, self.r, self.a
        B = math.exp(ba.logval(xN)) * _upper_tail_weight(0.0, r, ba, xN)
        # Psi(s)^{1/q} = ||u^{-sigma} a||_{q,(xN, ln s)} grows to a finite limit
        xs = xN + np.linspace(0.0, 60.0, 1201)
        psi = np.exp(-s * xs + a.logval(xs))
        if q == INF:
            Psi = np.maximum.accumulate(psi)
        else:
            Psi = np.concatenate([[0.0], np.cumsum(0.5 * (psi[1:] ** q + psi[:-1] ** q) * np.diff(xs))]) ** (1 / q)
        g = np.exp(ba.logval(xs)) * Psi
        if r == INF:
            D = float(np.max(g))
            return B, D
        main = float(integrate.trapezoid(g ** r, xs))
        # beyond the window Psi is at its limit and the b/a tail is analytic
        rest = (math.exp(ba.logval(xs[-1])) * Psi[-1]) ** r * _upper_tail_weight(0.0, r, ba, xs[-1]) ** r
        return B, (main + rest) ** (1 / r)

    # -- evaluation -------------------------------------------------------
    def value(self, g) -> float:
        g = np.abs(np.asarray(g, dtype=float))
        if self._mirror is not None:
            return self._mirror.value(g)
        if self.kind == "endpoint0":
            return float(self.couple.w0 @ g)
        if self.kind == "endpoint1":
            return float(self.couple.w1 @ g)
        K = self._M @ g
        S0, S1 = float(self.couple.w0 @ g), float(self.couple.w1 @ g)
        if self.kind == "standard":
            v = np.concatenate([self._wnode * K, [self._wlo * S1, self._whi * S0]])
            return float(np.linalg.norm(v, self.q))
        P = self._chain_numpy(K, S1)
        v = np.concatenate([self._ob * P, [self._lam_lo * S1, self._B * P[-1] + self._D * S0]])
        return float(np.linalg.norm(v, self.r))

    def _chain_numpy(self, K, S1):
        q = self.q
        P = np.empty_like(K)
        P[0] = self._h0 * S1
        for k in range(1, K.size):
            P[k] = np.linalg.norm([P[k - 1], self._cl[k - 1] * K[k - 1], self._cr[k - 1] * K[k]], q)
        return P

    def cvx(self, g):
        import cvxpy as cp

        if self._mirror is not None:
            return self._mirror.cvx(g)
        ag = cp.abs(g)
        if self.kind == "endpoint0":
            return self.couple.w0 @ ag, []
        if self.kind == "endpoint1":
            return self.couple.w1 @ ag, []
        K = self._M @ ag
        S0, S1 = self.couple.w0 @ ag, self.couple.w1 @ ag
        if self.kind == "standard":
            v = cp.hstack([cp.multiply(self._wnode, K), cp.reshape(self._wlo * S1, (1,), order="F"),
                           cp.reshape(self._whi * S0, (1,), order="F")])
            return cp.norm(v, self.q), []
        N = self._x.size
        P = cp.Variable(N, nonneg=True)
        cons = [P[0] >= self._h0 * S1]
        q = self.q
        # vectorized chain: P_k >= ||(P_{k-1}, cl K_{k-1}, cr K_k)||_q
        stack = cp.vstack([P[:-1], cp.multiply(self._cl, K[:-1]), cp.multiply(self._cr, K[1:])])
        if q == 1:
            cons.append(P[1:] >= cp.sum(stack, axis=0))
        elif q == INF:
            cons.append(P[1:] >= cp.max(stack, axis=0))
        else:
            cons.append(P[1:] >= cp.norm(stack, q, axis=0))
        tail = self._B * P[N - 1] + self._D * S0
        v = cp.hstack([cp.multiply(self._ob, P), cp.reshape(self._lam_lo * S1, (1,), order="F"), cp.reshape(tail, (1,), order="F")])
        return cp.norm(v, self.r), cons


# -- convex oracle -------------------------------------------------------------------

@dataclass
class _OracleProblem:
    problem: object
    t: object
    f: object
    g: object


_PROBLEM_CACHE: dict = {}


def _build(norm0: NormEvaluator, norm1: NormEvaluator) -> _OracleProblem:
    import cvxpy as cp

    key = (id(norm0), id(norm1))
    hit = _PROBLEM_CACHE.get(key)
    if hit is not None and hit[0] is norm0 and hit[1] is norm1:
        return hit[2]
    n = norm0.n
    g = cp.Variable(n)
    f = cp.Parameter(n)
    t = cp.Parameter(nonneg=True)
    h = cp.Variable(n)
    e0, c0 = norm0.cvx(g)
    e1, c1 = norm1.cvx(h)
    # h = f - g keeps the parameter t away from the parameter f (DPP form)
    prob = cp.Problem(cp.Minimize(e0 + t * e1), c0 + c1 + [h == f - g])
    built = _OracleProblem(prob, t, f, g)
    if len(_PROBLEM_CACHE) > 32:
        _PROBLEM_CACHE.clear()
    _PROBLEM_CACHE[key] = (norm0, norm1, built)
    return built


def k_oracle_values(norm0: NormEvaluator, norm1: NormEvaluator, f, ts, rel_tol: float = 1e-4):
    """Minimize ``N0(g) + t N1(f - g)`` for every ``t`` in ``ts``.

    Returns
    -------
    values, gaps : ndarray
        Certified primal values (numpy evaluation at the solver's ``g``) and
        the relative gap to the solver's optimal objective.

    Raises
    ------
    NonConvexIndices
        If either evaluator uses an index below 1.
    MaxIterations
        If the solver does not reach an optimal status or the gap exceeds
        ``rel_tol``.
    """
    import cvxpy as cp

    if norm0.min_index < 1 or norm1.min_index < 1:
        raise NonConvexIndices("the convex oracle needs all norm indices >= 1; "
                               "quasi-norm regimes are reported untested")
    f = np.asarray(f, dtype=float)
    if f.shape != (norm0.n,) or norm1.n != norm0.n:
        raise ValueError("dimension mismatch between f and the norm evaluators")
    ts = np.asarray(ts, dtype=float)
    vals = np.zeros(ts.shape)
    gaps = np.zeros(ts.shape)
    scale = float(np.max(np.abs(f))) if f.size else 0.0
    if scale == 0.0:
        return vals, gaps
    built = _build(norm0, norm1)
    built.f.value = f / scale
    for i, t in enumerate(ts):
        built.t.value = float(t)
        try:
            with warnings.catch_warnings():
                # inaccurate solutions are accepted only after the gap check below
                warnings.simplefilter("ignore", UserWarning)
                built.problem.solve(solver=cp.CLARABEL)
        except cp.SolverError as exc:
            raise MaxIterations(f"solver failed at t={t:g}: {exc}") from exc
        if built.problem.status not in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE) or built.g.value is None:
            raise MaxIterations(f"solver status {built.problem.status} at t={t:g}")
        g = built.g.value
        primal = norm0.value(g) + t * norm1.value(f / scale - g)
        dual = float(built.problem.value)
        gap = abs(primal - dual) / max(abs(primal), 1e-300)
        if gap > rel_tol:
            raise MaxIterations(f"relative gap {gap:.2e} above tolerance at t={t:g}",
                                best=primal * scale, gap=gap)
        vals[i] = min(primal, dual) * scale if dual > 0 else primal * scale
        gaps[i] = gap
    return vals, gaps


def k_oracle(norm0: NormEvaluator, norm1: NormEvaluator, f, t_grid: LogGrid) -> KProfile:
    """K-functional of the couple ``(norm0, norm1)`` at every node of ``t_grid``.

    The problem is parametrized in ``t`` and ``f`` so the conic form is
    compiled once per evaluator pair.
    """
    vals, gaps = k_oracle_values(norm0, norm1, f, t_grid.t)
    tz, ti = fit_tails(t_grid, vals) if np.all(vals > 0) else (PowerTail(1.0), PowerTail(0.0))
    return KProfile(t_grid, vals, tz, ti, couple="oracle",
                    diagnostics={"max_gap": float(np.max(gaps)) if gaps.size else 0.0})
