"""Holmstedt-type formulae for ``K(rho(t), f; X0, L-space)`` on discrete couples.

Both formulae express the K-functional of a couple whose right space is an
``L``-limiting space through the K-functional of the base couple:

* T14, ``X0 = A0``:
  ``K(rho(t), f) ~ K(t, f) + rho(t) J(t, f)`` with ``rho(t) = t^theta1 / c1(t)``;
* T17, ``X0 = Standard(theta0, r0, b0)``:
  ``K(rho(t), f) ~ ||u^(-theta0-1/r0) b0 K||_{r0,(0,t)} + rho(t) J(t, f)``
  with ``rho(t) = t^(theta1-theta0) b0(t) / c1(t)``,

where ``c1(t) = a1(t) ||s^(-1/r1) b1/a1||_{r1,(t,inf)}`` and
``J(t, f) = || s^(-1/r1) (b1/a1)(s) ||u^(-theta1-1/q1) a1 K||_{q1,(t,s)} ||_{r1,(t,inf)}``.

The left side is computed by the convex oracle on a weighted-l1
:class:`~svinterp.kfunc.DiscreteCouple`, the right side from the exact base
K-functional. Certification is therefore limited to discrete models with
all indices at least 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .errors import InvalidDescriptor, NonConvergent
from .grid import LogGrid
from .kfunc import DiscreteCouple, DiscreteSpaceNorm, KProfile, k_oracle_values
from .quad import GridFunction, PowerTail, fit_tails, partial_qnorm
from .reports import RatioRecord, RatioReport
from .sv import ONE, LogPow, SvExpr, check_finite, sv_product, tail_qnorm

INF = math.inf


@dataclass(frozen=True, eq=False)
class HolmstedtInstance:
    """Parameters of a T14 or T17 check.

    Attributes
    ----------
    theorem : {"T14", "T17"}
    theta1, q1, r1, a1, b1
        The ``L``-space ``LLim(theta1, r1, b1, q1, a1)``.
    theta0, r0, b0
        The left space ``Standard(theta0, r0, b0)`` (T17 only).
    couple : DiscreteCouple
        Weighted-l1 base couple.
    points_per_decade : int
        Density of the verification ``t`` values.
    """

    theorem: str
    theta1: float
    q1: float
    r1: float
    a1: SvExpr
    b1: SvExpr
    couple: DiscreteCouple
    theta0: float = 0.0
    r0: float = 2.0
    b0: SvExpr = ONE
    points_per_decade: int = 8
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.theorem not in ("T14", "T17"):
            raise InvalidDescriptor("theorem must be 'T14' or 'T17'")
        if not 0 < self.theta1 < 1:
            raise InvalidDescriptor("needs 0 < theta1 < 1")
        if self.theorem == "T17" and not 0 < self.theta0 < self.theta1:
            raise InvalidDescriptor("T17 needs 0 < theta0 < theta1 < 1")
        ratio = sv_product((self.b1, 1.0), (self.a1, -1.0))
        chk = check_finite(ratio, self.r1, "(1,inf)")
        if not chk.finite:
            raise InvalidDescriptor(f"||s^(-1/r1) b1/a1||_(r1,(1,inf)) < inf violated ({chk.diagnostic})")
        indices = [self.q1, self.r1] + ([self.r0] if self.theorem == "T17" else [])
        if min(indices) < 1:
            raise InvalidDescriptor("the oracle needs all norm indices >= 1")

    @property
    def ratio(self) -> SvExpr:
        return sv_product((self.b1, 1.0), (self.a1, -1.0))

    @property
    def grid(self) -> LogGrid:
        """Working grid reaching eight decades beyond every kink of ``K``."""
        lr = np.log10(self.couple.ratios)
        lo, hi = math.floor(lr.min()) - 8, math.ceil(lr.max()) + 8
        return LogGrid(10.0 ** min(lo, -1), 10.0 ** max(hi, 1), 32)

    def t_values(self) -> np.ndarray:
        """Four decades of working-grid nodes centred at the median kink."""
        g = self.grid
        mid = float(np.median(np.log10(self.couple.ratios)))
        step = max(1, g.points_per_decade // self.points_per_decade)
        i0, i1 = g.index(10 ** (mid - 2)), g.index(10 ** (mid + 2))
        return g.t[i0:i1 + 1:step]

    def x0_norm(self) -> DiscreteSpaceNorm:
        if self.theorem == "T14":
            return DiscreteSpaceNorm(self.couple, "endpoint0")
        return DiscreteSpaceNorm(self.couple, "standard", self.theta0, self.r0, self.b0)

    def x1_norm(self) -> DiscreteSpaceNorm:
        return DiscreteSpaceNorm(self.couple, "llim", self.theta1, self.q1, self.b1, self.r1, self.a1)

    def c1(self, grid: LogGrid | None = None) -> np.ndarray:
        grid = grid or self.grid
        tq = tail_qnorm(self.ratio, self.r1, "upper", grid)
        return np.exp(self.a1.logval(grid.x) + tq.logval(grid.x))

    def rho(self, grid: LogGrid | None = None) -> np.ndarray:
        grid = grid or self.grid
        c1 = self.c1(grid)
        if self.theorem == "T14":
            return grid.t ** self.theta1 / c1
        return grid.t ** (self.theta1 - self.theta0) * np.exp(self.b0.logval(grid.x)) / c1

    def to_json(self) -> dict:
        return {"theorem": self.theorem, "theta0": self.theta0, "r0": _enc(self.r0), "b0": self.b0.to_json(),
                "theta1": self.theta1, "q1": _enc(self.q1), "r1": _enc(self.r1), "a1": self.a1.to_json(),
                "b1": self.b1.to_json(), "couple": self.couple.to_json(),
                "points_per_decade": self.points_per_decade}


def _enc(x):
    return "inf" if x == INF else x


def default_instance(theorem: str, seed: int = 0, n: int = 16) -> HolmstedtInstance:
    """Seeded random ``n``-dimensional couple with fixed SV parameters."""
    couple = DiscreteCouple.random(n, np.random.default_rng(seed))
    if theorem == "T14":
        return HolmstedtInstance("T14", 0.5, 2.0, 2.0, ONE, LogPow(-1.0), couple)
    return HolmstedtInstance("T17", 0.75, 2.0, 2.0, ONE, LogPow(-1.0), couple, theta0=0.25, r0=2.0, b0=ONE)


# -- right side --------------------------------------------------------------------------------

def base_k(couple: DiscreteCouple, f, grid: LogGrid) -> KProfile:
    """Exact ``K(u, f)`` of the weighted-l1 couple at the grid nodes."""
    f = np.abs(np.asarray(f, dtype=float))
    M = np.minimum(couple.w0[None, :], grid.t[:, None] * couple.w1[None, :])
    return KProfile(grid, M @ f, PowerTail(1.0), PowerTail(0.0), couple="weighted-l1")


def double_norm(K: GridFunction, theta1: float, q1: float, r1: float, a1: SvExpr, ratio: SvExpr) -> np.ndarray:
    """``J(t) = ||s^(-1/r1) ratio(s) ||u^(-theta1-1/q1) a1 K||_{q1,(t,s)}||_{r1,(t,inf)}`` at each node.

    Above the last node ``K`` is taken constant, which is exact for
    profiles that saturate inside the grid.
    """
    grid = K.grid
    x = grid.x
    G = np.exp(-theta1 * x + a1.logval(x)) * K.samples
    W = np.exp(ratio.logval(x))
    n = x.size
    upper = np.triu(np.ones((n, n), dtype=bool))
    # tail of the inner norm beyond the grid: G decays like u^(-theta1) there
    if q1 == INF:
        Gm = np.where(upper, G[None, :], 0.0)
        F = np.maximum.accumulate(Gm, axis=1)
        F_inf = np.maximum(F[:, -1], G[-1])
    else:
        C = integrate.cumulative_trapezoid(G ** q1, x, initial=0.0)
        Fq = np.where(upper, C[None, :] - C[:, None], 0.0)
        F = np.maximum(Fq, 0.0) ** (1 / q1)
        F_inf = (C[-1] - C + G[-1] ** q1 / (theta1 * q1)) ** (1 / q1)
    # outer tail beyond the grid uses the tabulated tail norm of the ratio
    T = float(np.exp(tail_qnorm(ratio, r1, "upper", grid).logval(x[-1])))
    H = W[None, :] * F
    if r1 == INF:
        return np.maximum(np.max(H, axis=1), T * F_inf)
    main = integrate.trapezoid(H ** r1, x, axis=1)
    return (main + (T * F_inf) ** r1) ** (1 / r1)


def _as_profile(K: GridFunction, samples) -> GridFunction:
    samples = np.asarray(samples, dtype=float)
    if np.all(samples > 0):
        tz, ti = fit_tails(K.grid, samples)
    else:
        tz, ti = PowerTail(1.0), PowerTail(0.0)
    return GridFunction(K.grid, samples, tz, ti)


def rhs_t14(K: GridFunction, inst: HolmstedtInstance) -> GridFunction:
    """``K(t) + rho(t) J(t)`` with ``rho(t) = t^theta1 / c1(t)``."""
    if not np.any(K.samples):
        return GridFunction(K.grid, np.zeros_like(K.samples), PowerTail(1.0), PowerTail(0.0))
    grid = K.grid
    rho = grid.t ** inst.theta1 / inst.c1(grid)
    J = double_norm(K, inst.theta1, inst.q1, inst.r1, inst.a1, inst.ratio)
    return _as_profile(K, K.samples + rho * J)


def rhs_t17(K: GridFunction, inst: HolmstedtInstance) -> GridFunction:
    """``||u^(-theta0-1/r0) b0 K||_{r0,(0,t)} + rho(t) J(t)``."""
    if not np.any(K.samples):
        return GridFunction(K.grid, np.zeros_like(K.samples), PowerTail(1.0), PowerTail(0.0))
    grid = K.grid
    first = partial_qnorm(K, inst.theta0, inst.r0, inst.b0, "lower").samples
    rho = inst.rho(grid)
    J = double_norm(K, inst.theta1, inst.q1, inst.r1, inst.a1, inst.ratio)
    return _as_profile(K, first + rho * J)


def rhs(K: GridFunction, inst: HolmstedtInstance) -> GridFunction:
    return rhs_t14(K, inst) if inst.theorem == "T14" else rhs_t17(K, inst)


# -- proof-internal auxiliaries -----------------------------------------------------------------

def aux_t14(inst: HolmstedtInstance, grid: LogGrid | None = None) -> dict:
    """``g1``, ``h1`` and the reference ``t^(1-theta1) c1`` on the grid.

    ``g1(t) = t J(t)`` for ``K = 1``; ``h1(t)`` is the norm of
    ``u chi_(0,t)(u)`` in the function space of the L-space.
    """
    grid = grid or inst.grid
    ones = GridFunction.constant(grid, 1.0)
    g1 = grid.t * double_norm(ones, inst.theta1, inst.q1, inst.r1, inst.a1, inst.ratio)
    ident = GridFunction(grid, grid.t.copy(), PowerTail(1.0), PowerTail(1.0))
    P = partial_qnorm(ident, inst.theta1, inst.q1, inst.a1, "lower").samples
    W = np.exp(inst.ratio.logval(grid.x))
    x = grid.x
    h1 = np.empty(grid.n)
    # beyond the grid the inner norm is frozen, so the outer tail is T * P(t)
    T = float(np.exp(tail_qnorm(inst.ratio, inst.r1, "upper", grid).logval(x[-1])))
    lower_tail = _lower_tail(inst, grid, P)
    for i in range(grid.n):
        Q = np.where(np.arange(grid.n) <= i, P, P[i])
        if inst.r1 == INF:
            h1[i] = max(float(np.max(W * Q)), T * P[i], lower_tail)
        else:
            h1[i] = (integrate.trapezoid((W * Q) ** inst.r1, x) + (T * P[i]) ** inst.r1
                     + lower_tail ** inst.r1) ** (1 / inst.r1)
    return {"t": grid.t, "g1": g1, "h1": h1, "ref": grid.t ** (1 - inst.theta1) * inst.c1(grid)}


def _lower_tail(inst: HolmstedtInstance, grid: LogGrid, P: np.ndarray) -> float:
    # below the grid P(s) ~ P(tmin) (s/tmin)^(1-theta1): a convergent power tail
    x0 = grid.x[0]
    w0 = float(np.exp(inst.ratio.logval(x0))) * P[0]
    k = 1 - inst.theta1
    return w0 if inst.r1 == INF else w0 * (1 / (k * inst.r1)) ** (1 / inst.r1)


def aux_t17(inst: HolmstedtInstance, grid: LogGrid | None = None) -> dict:
    """``g0``, ``h0`` and the reference ``t^(1-theta0) b0`` on the grid."""
    grid = grid or inst.grid
    ones = GridFunction.constant(grid, 1.0)
    ident = GridFunction(grid, grid.t.copy(), PowerTail(1.0), PowerTail(1.0))
    g0 = grid.t * partial_qnorm(ones, inst.theta0, inst.r0, inst.b0, "upper").samples
    h0 = partial_qnorm(ident, inst.theta0, inst.r0, inst.b0, "lower").samples
    return {"t": grid.t, "g0": g0, "h0": h0, "ref": grid.t ** (1 - inst.theta0) * np.exp(inst.b0.logval(grid.x))}


def embedding_bound(K: GridFunction, inst: HolmstedtInstance) -> tuple:
    """``(J, bound)`` with ``bound = ||s^(-1/r1) b1/a1||_{r1,(t,inf)} ||u^(-theta1-1/q1) a1 K||_{q1,(t,inf)}``."""
    J = double_norm(K, inst.theta1, inst.q1, inst.r1, inst.a1, inst.ratio)
    tq = np.exp(tail_qnorm(inst.ratio, inst.r1, "upper", K.grid).logval(K.grid.x))
    inner = partial_qnorm(K, inst.theta1, inst.q1, inst.a1, "upper").samples
    return J, tq * inner


def index_inequality(K: GridFunction, theta1: float, q1: float, r: float, a1: SvExpr) -> np.ndarray:
    """Ratio ``||u^(-theta1-1/q1) a1 K||_{q1,(t,inf)} / ||u^(-theta1-1/r) a1 K||_{r,(t,inf)}`` for ``r < q1``."""
    if not r < q1:
        raise ValueError("the inequality compares r < q1")
    num = partial_qnorm(K, theta1, q1, a1, "upper").samples
    den = partial_qnorm(K, theta1, r, a1, "upper").samples
    return num / den


# -- families and verification -----------------------------------------------------------------

def default_family(n: int, seed: int = 0, per_shape: int = 10) -> list:
    """Staircase, sparse and geometric-decay sequences, ``per_shape`` each.

    Returns
    -------
    list of (str, ndarray)
    """
    rng = np.random.default_rng(seed)
    out = []
    for i in range(per_shape):
        cuts = np.sort(rng.choice(np.arange(1, n), size=int(rng.integers(1, 4)), replace=False))
        levels = 10 ** rng.uniform(-1, 1, size=cuts.size + 1)
        f = np.repeat(levels, np.diff(np.concatenate([[0], cuts, [n]])))
        out.append((f"stair{i:02d}", rng.permutation(f) * rng.choice([-1.0, 1.0], n)))
    for i in range(per_shape):
        f = np.zeros(n)
        idx = rng.choice(n, size=int(rng.integers(1, 4)), replace=False)
        f[idx] = 10 ** rng.uniform(-1, 1, size=idx.size)
        out.append((f"sparse{i:02d}", f))
    for i in range(per_shape):
        gamma = rng.uniform(0.3, 0.9)
        out.append((f"geom{i:02d}", rng.permutation(gamma ** np.arange(n))))
    return out


def verify(inst: HolmstedtInstance, family: list | None = None, scale: float = 1.0) -> RatioReport:
    """Compare ``K(rho(t), f; X0, X1)`` from the oracle with the formula.

    Parameters
    ----------
    inst : HolmstedtInstance
    family : list of (str, array_like), optional
        Defaults to :func:`default_family` with seed 0.
    scale : float
        Multiply every member by this factor.
    """
    family = family if family is not None else default_family(inst.couple.n)
    grid = inst.grid
    ts = inst.t_values()
    idx = np.array([grid.index(t) for t in ts])
    rho = inst.rho(grid)[idx]
    n0, n1 = inst.x0_norm(), inst.x1_norm()
    records, skipped = [], []
    for fid, f in family:
        f = scale * np.asarray(f, dtype=float)
        if not np.any(f):
            skipped.append((fid, "zero sequence: both sides vanish"))
            continue
        try:
            R = rhs(base_k(inst.couple, f, grid), inst).samples[idx]
        except NonConvergent as exc:
            skipped.append((fid, f"right side: {exc}"))
            continue
        L, _ = k_oracle_values(n0, n1, f, rho)
        for t, lv, rv in zip(ts, L, R):
            records.append(RatioRecord(fid, float(lv), float(rv), float(t)))
    return RatioReport(records, skipped, None,
                       {"title": f"{inst.theorem} Holmstedt formula", "theorem": inst.theorem,
                        "t_range": [float(ts[0]), float(ts[-1])], "members": len(family),
                        "scope": "certified on weighted-l1 discrete couples only"})


__all__ = ["HolmstedtInstance", "aux_t14", "aux_t17", "base_k", "default_family", "default_instance",
           "double_norm", "embedding_bound", "index_inequality", "rhs", "rhs_t14", "rhs_t17", "verify"]
