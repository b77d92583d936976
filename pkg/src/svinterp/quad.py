"""Weighted quasi-norm quadrature on logarithmic grids.

All norms in the package have the form

    || u**(-theta - 1/q) b(u) g(u) ||_{q, (lo, hi)}

and are computed here.  In the variable ``x = ln u`` the measure ``du/u``
becomes ``dx``, so the integral of the ``q``-th power is a plain integral in
``x``.  Inside the grid it is a composite trapezoid; outside, the integrand
is replaced by its asymptotic model

    u**p (1 + |ln u|)**gamma (1 + ln(1 + |ln u|))**delta

anchored at the end sample and integrated analytically or by a
one-dimensional quadrature of the model.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .errors import NonConvergent
from .grid import DEFAULT_GRID, LogGrid
from .sv import SvExpr, power_log_converges, sup_bounded, _decode, _encode

_TOL = 1e-12
INF = math.inf


@dataclass(frozen=True)
class PowerTail:
    """Asymptotic model ``u**p (1+|ln u|)**gamma (1+ln(1+|ln u|))**delta`` at one end."""

    p: float = 0.0
    gamma: float = 0.0
    delta: float = 0.0

    def to_json(self) -> dict:
        return {"p": float(self.p), "gamma": float(self.gamma), "delta": float(self.delta)}

    @classmethod
    def from_json(cls, d: dict) -> "PowerTail":
        return cls(float(d.get("p", 0.0)), float(d.get("gamma", 0.0)), float(d.get("delta", 0.0)))


# -- tail integrals of the asymptotic model ----------------------------------

def tail_integral(kappa: float, m: float, n: float, y0: float, D: float = INF) -> float:
    """``int_0^D exp(kappa d) ((y0+d)/y0)**m ((1+ln(y0+d))/(1+ln y0))**n dd``.

    ``d`` is the distance from the grid end measured outward in ``x``.

    Raises
    ------
    NonConvergent
        If ``D`` is infinite and the model is not integrable.
    """
    if D <= 0:
        return 0.0
    L0 = 1.0 + math.log(y0)
    if D == INF:
        if kappa > _TOL:
            raise NonConvergent(f"tail grows like exp({kappa:g} x)", exponent=(kappa, m, n))
        if abs(kappa) <= _TOL:
            if not power_log_converges(m, n):
                raise NonConvergent(f"log-power tail with exponents m={m:g}, n={n:g} diverges",
                                    exponent=(0.0, m, n))
            if abs(m + 1) <= _TOL:
                # dy/y = dL, so the integral is y0 * L0 / (-(n+1))
                return y0 * L0 / (-(n + 1))
            if n == 0:
                return y0 / (-(m + 1))
            # y = y0 e^z, L = L0 + z
            f = lambda z: y0 * math.exp((m + 1) * z) * ((L0 + z) / L0) ** n
            val, _ = integrate.quad(f, 0.0, INF, epsabs=0.0, epsrel=1e-11, limit=400)
            return val
    f = lambda d: math.exp(_scalar_model_log(kappa, m, n, y0, L0, d))
    val, _ = integrate.quad(f, 0.0, D, epsabs=0.0, epsrel=1e-11, limit=400)
    return val


def _scalar_model_log(kappa, m, n, y0, L0, d):
    y = y0 + d
    out = kappa * d + m * math.log(y / y0)
    if n:
        out += n * math.log((1.0 + math.log(y)) / L0)
    return out


def tail_sup(kappa: float, m: float, n: float, y0: float, D: float = INF) -> float:
    """Supremum over ``[0, D]`` of the model used in :func:`tail_integral`."""
    if D <= 0:
        return 1.0
    if D == INF:
        grows = kappa > _TOL or (abs(kappa) <= _TOL and not sup_bounded(m, n))
        if grows:
            raise NonConvergent(f"tail supremum is infinite (kappa={kappa:g}, m={m:g}, n={n:g})",
                                exponent=(kappa, m, n))
    L0 = 1.0 + math.log(y0)
    cap = D if D < INF else 1e7
    d = np.concatenate([[0.0], np.geomspace(1e-8, cap, 2000)])
    y = y0 + d
    lv = kappa * d + m * np.log(y / y0)
    if n:
        lv = lv + n * np.log((1.0 + np.log(y)) / L0)
    return float(np.exp(np.max(lv)))


# -- sampled functions -------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GridFunction:
    """Non-negative samples on a :class:`LogGrid` with tail models.

    ``samples`` may carry leading batch axes; the last axis runs over the
    grid.  Tail models are shared by the whole batch and anchored per row at
    the end samples.
    """

    grid: LogGrid
    samples: np.ndarray
    tail_zero: PowerTail = field(default_factory=PowerTail)
    tail_inf: PowerTail = field(default_factory=PowerTail)

    def __post_init__(self):
        s = np.array(self.samples, dtype=float)
        if s.shape[-1:] != (self.grid.n,):
            raise ValueError(f"samples last axis {s.shape} does not match grid size {self.grid.n}")
        if not np.all(np.isfinite(s)) or np.any(s < 0):
            raise ValueError("GridFunction samples must be finite and non-negative")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    # -- constructors -----------------------------------------------------
    @classmethod
    def constant(cls, grid: LogGrid, c: float) -> "GridFunction":
        return cls(grid, np.full(grid.n, float(c)))

    @classmethod
    def from_callable(cls, grid: LogGrid, fn, tail_zero=None, tail_inf=None) -> "GridFunction":
        s = np.asarray(fn(grid.t), dtype=float)
        if tail_zero is None or tail_inf is None:
            fz, fi = fit_tails(grid, s)
            tail_zero = tail_zero or fz
            tail_inf = tail_inf or fi
        return cls(grid, s, tail_zero, tail_inf)

    @classmethod
    def fitted(cls, grid: LogGrid, samples) -> "GridFunction":
        s = np.asarray(samples, dtype=float)
        tz, ti = fit_tails(grid, s)
        return cls(grid, s, tz, ti)

    # -- access -------------------------------------------------------------
    @property
    def batch_shape(self) -> tuple:
        return self.samples.shape[:-1]

    def row(self, i) -> "GridFunction":
        return GridFunction(self.grid, self.samples[i], self.tail_zero, self.tail_inf)

    def with_samples(self, samples, tail_zero=None, tail_inf=None) -> "GridFunction":
        return GridFunction(self.grid, samples, tail_zero or self.tail_zero, tail_inf or self.tail_inf)

    def __call__(self, t):
        """Log-linear interpolation, with tail models outside the grid."""
        if self.batch_shape:
            raise ValueError("pointwise evaluation needs an unbatched GridFunction")
        t = np.asarray(t, dtype=float)
        x = np.log(t)
        gx, s = self.grid.x, self.samples
        with np.errstate(divide="ignore"):
            ls = np.log(s)
        pos = np.isfinite(ls)
        if np.all(pos):
            out = np.exp(np.interp(x, gx, ls))
        else:
            out = np.interp(x, gx, s)
        lo, hi = x < gx[0], x > gx[-1]
        if np.any(lo):
            out = np.where(lo, s[0] * np.exp(_shift_log(self.tail_zero, x, gx[0])), out)
        if np.any(hi):
            out = np.where(hi, s[-1] * np.exp(_shift_log(self.tail_inf, x, gx[-1])), out)
        return float(out) if out.ndim == 0 else out

    def tail_mismatch(self) -> float:
        """Largest log deviation of the last-decade samples from the tail models."""
        g, ppd = self.grid, self.grid.points_per_decade
        worst = 0.0
        for tail, idx in ((self.tail_zero, slice(0, ppd + 1)), (self.tail_inf, slice(g.n - ppd - 1, g.n))):
            s = self.samples[..., idx]
            anchor = 0 if idx.start == 0 else -1
            if np.any(s <= 0):
                continue
            x = g.x[idx]
            pred = np.log(s[..., anchor:anchor + 1] if anchor == 0 else s[..., -1:]) + \
                _shift_log(tail, x, x[anchor])
            worst = max(worst, float(np.max(np.abs(np.log(s) - pred))))
        return worst

    # -- serialization ----------------------------------------------------
    def to_json(self) -> dict:
        return {"grid": self.grid.to_json(), "samples": self.samples.tolist(),
                "tail_zero": self.tail_zero.to_json(), "tail_inf": self.tail_inf.to_json()}

    @classmethod
    def from_json(cls, d: dict) -> "GridFunction":
        return cls(LogGrid.from_json(d["grid"]), np.asarray(d["samples"], dtype=float),
                   PowerTail.from_json(d.get("tail_zero", {})), PowerTail.from_json(d.get("tail_inf", {})))

    def to_csv(self) -> str:
        if self.batch_shape:
            raise ValueError("CSV export needs an unbatched GridFunction")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "value"])
        for t, v in zip(self.grid.t, self.samples):
            w.writerow([repr(float(t)), repr(float(v))])
        return buf.getvalue()


def _shift_log(tail: PowerTail, x, x0):
    x = np.asarray(x, dtype=float)
    y, y0 = 1 + np.abs(x), 1 + abs(x0)
    s = tail.p * (x - x0) + tail.gamma * (np.log(y) - math.log(y0))
    if tail.delta:
        s = s + tail.delta * (np.log1p(np.log(y)) - math.log1p(math.log(y0)))
    return s


def fit_tails(grid: LogGrid, samples) -> tuple:
    """Least-squares fit of ``(p, gamma)`` over the outermost two decades.

    ``p`` is snapped to 0 when it is below 0.02 in magnitude, in which case
    ``gamma`` is refitted alone.  Zero samples give a flat model.
    """
    s = np.asarray(samples, dtype=float)
    if s.ndim > 1:
        s = s.reshape(-1, grid.n).max(axis=0)
    k = 2 * grid.points_per_decade + 1
    tails = []
    for idx in (slice(0, k), slice(grid.n - k, grid.n)):
        v = s[idx]
        if np.any(v <= 0):
            tails.append(PowerTail())
            continue
        x = grid.x[idx]
        ly = np.log1p(np.abs(x))
        A = np.column_stack([np.ones_like(x), x, ly])
        coef, *_ = np.linalg.lstsq(A, np.log(v), rcond=None)
        p, gam = coef[1], coef[2]
        if abs(p) < 0.02:
            A2 = np.column_stack([np.ones_like(x), ly])
            c2, *_ = np.linalg.lstsq(A2, np.log(v), rcond=None)
            p, gam = 0.0, c2[1]
        tails.append(PowerTail(float(p), float(gam), 0.0))
    return tails[0], tails[1]


# -- staircases ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Staircase:
    """A piecewise-constant function with jumps only at grid nodes.

    ``cells[..., j]`` is the value on ``(t_j, t_{j+1})``; ``head`` is the
    value on ``(0, t_0)`` and ``tail`` the value on ``(t_{N-1}, inf)``.
    Optional power-tail models replace the constant head or tail.
    """

    grid: LogGrid
    head: np.ndarray
    cells: np.ndarray
    tail: np.ndarray
    head_model: PowerTail = field(default_factory=PowerTail)
    tail_model: PowerTail = field(default_factory=PowerTail)

    def __post_init__(self):
        cells = np.array(self.cells, dtype=float)
        if cells.shape[-1] != self.grid.n - 1:
            raise ValueError("cells must have grid.n - 1 entries")
        head = np.broadcast_to(np.asarray(self.head, dtype=float), cells.shape[:-1]).copy()
        tail = np.broadcast_to(np.asarray(self.tail, dtype=float), cells.shape[:-1]).copy()
        for a in (cells, head, tail):
            if np.any(a < 0) or not np.all(np.isfinite(a)):
                raise ValueError("staircase values must be finite and non-negative")
            a.setflags(write=False)
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "head", head)
        object.__setattr__(self, "tail", tail)

    @property
    def batch_shape(self) -> tuple:
        return self.cells.shape[:-1]

    def antiderivative(self) -> np.ndarray:
        """``int_0^{t_i}`` at every node (exact for the staircase)."""
        t = self.grid.t
        head_int = self.head * t[0]
        cum = np.cumsum(self.cells * np.diff(t), axis=-1)
        return np.concatenate([head_int[..., None], head_int[..., None] + cum], axis=-1)

    def map(self, fn) -> "Staircase":
        return Staircase(self.grid, fn(self.head), fn(self.cells), fn(self.tail), self.head_model, self.tail_model)


def _interval_nodes(grid: LogGrid, interval):
    lo, hi = float(interval[0]), float(interval[1])
    if not (0 <= lo < hi <= INF):
        raise ValueError(f"invalid interval {interval!r}")
    xlo = -INF if lo == 0 else math.log(lo)
    xhi = INF if hi == INF else math.log(hi)
    x = grid.x
    if xlo > x[-1] + _TOL or xhi < x[0] - _TOL:
        raise ValueError("interval lies outside the grid coverage")
    return xlo, xhi


def _end_exponents(g_tail: PowerTail, b: SvExpr, end: str, theta: float):
    a = b.asymptote(end)
    return g_tail.p - theta, g_tail.gamma + a.gamma, g_tail.delta + a.delta


def _row_max(lq):
    with np.errstate(invalid="ignore"):
        M = np.max(np.where(np.isfinite(lq), lq, -INF), axis=-1)
    return np.where(np.isfinite(M), M, 0.0)


@dataclass(frozen=True)
class QuadResult:
    """Value of a weighted norm plus the share contributed by the tails."""

    value: float
    tail_fraction: float


def _kink_correction(h, x, k: int):
    """Euler-Maclaurin jump term of the trapezoid rule at node ``k``.

    SV weights built from ``|ln u|`` have a derivative jump at ``x = 0``;
    subtracting ``dx**2/12 * (h'(x_k-) - h'(x_k+))`` restores second-order
    accuracy there.  One-sided derivatives use three-point stencils.
    """
    d = x[k + 1] - x[k]
    dm = (3 * h[..., k] - 4 * h[..., k - 1] + h[..., k - 2]) / (2 * d)
    dp = (-3 * h[..., k] + 4 * h[..., k + 1] - h[..., k + 2]) / (2 * d)
    return d * d / 12.0 * (dm - dp)


def _kink_node(grid: LogGrid):
    """Index of the node ``t = 1`` if it is an exact grid node."""
    k = int(np.argmin(np.abs(grid.x)))
    return k if grid.x[k] == 0.0 else None


def weighted_qnorm(g: GridFunction, theta: float, q: float, b: SvExpr,
                   interval=(0.0, INF), details: bool = False):
    """Approximate ``||u**(-theta-1/q) b(u) g(u)||_{q,(lo,hi)}``.

    Parameters
    ----------
    g : GridFunction
        Possibly batched samples.
    theta : float
    q : float
        Index in ``(0, inf]``.
    b : SvExpr
    interval : tuple
        ``(lo, hi)`` with ``0 <= lo < hi <= inf``.
    details : bool
        Return :class:`QuadResult` (or arrays of them) with the tail fraction.

    Raises
    ------
    NonConvergent
        When a tail model is not integrable and its anchor is non-zero.
    """
    grid = g.grid
    x = grid.x
    xlo, xhi = _interval_nodes(grid, interval)
    with np.errstate(divide="ignore"):
        L = (-theta * x + b.logval(x)) + np.log(g.samples)
    inside = (x >= xlo - 1e-12) & (x <= xhi + 1e-12)
    idx = np.nonzero(inside)[0]
    y0_lo, y0_hi = 1 + abs(x[0]), 1 + abs(x[-1])
    pz, gz, dz = _end_exponents(g.tail_zero, b, "zero", theta)
    pi, gi, di = _end_exponents(g.tail_inf, b, "inf", theta)

    if q == INF:
        cand = [L[..., idx]] if idx.size else []
        if idx.size and xlo > x[0] and idx[0] > 0 and x[idx[0]] - xlo > 1e-12:
            cand.append(_interp_last(L, x, xlo)[..., None])
        if idx.size and xhi < x[-1] and idx[-1] < grid.n - 1 and xhi - x[idx[-1]] > 1e-12:
            cand.append(_interp_last(L, x, xhi)[..., None])
        tails = []
        if xlo < x[0]:
            if np.any(np.isfinite(L[..., 0])):
                s = tail_sup(-pz, gz, dz, y0_lo, x[0] - xlo)
                tails.append((L[..., 0] + math.log(s))[..., None])
        if xhi > x[-1]:
            if np.any(np.isfinite(L[..., -1])):
                s = tail_sup(pi, gi, di, y0_hi, xhi - x[-1])
                tails.append((L[..., -1] + math.log(s))[..., None])
        inner = np.max(np.concatenate(cand, axis=-1), axis=-1) if cand else np.full(g.batch_shape, -INF)
        tl = np.max(np.concatenate(tails, axis=-1), axis=-1) if tails else np.full(g.batch_shape, -INF)
        best = np.maximum(inner, tl)
        val = np.exp(best)
        frac = np.where(tl > inner, 1.0, 0.0)
        return _pack(val, frac, details)

    lq = q * L
    M = _row_max(lq)
    with np.errstate(under="ignore"):
        h = np.exp(lq - M[..., None])
    S = np.zeros(g.batch_shape)
    if idx.size >= 2:
        S = S + integrate.trapezoid(h[..., idx], x[idx], axis=-1)
    # partial cells at interval ends strictly inside the grid
    if idx.size and xlo > x[0] and idx[0] > 0 and x[idx[0]] - xlo > 1e-12:
        k = idx[0]
        hl = _interp_last(h, x, xlo)
        S = S + 0.5 * (hl + h[..., k]) * (x[k] - xlo)
    if idx.size and xhi < x[-1] and idx[-1] < grid.n - 1 and xhi - x[idx[-1]] > 1e-12:
        k = idx[-1]
        hh = _interp_last(h, x, xhi)
        S = S + 0.5 * (hh + h[..., k]) * (xhi - x[k])
    if idx.size == 0:
        hl, hh = _interp_last(h, x, xlo), _interp_last(h, x, xhi)
        S = S + 0.5 * (hl + hh) * (xhi - xlo)
    k0 = _kink_node(grid)
    if k0 is not None and idx.size and idx[0] + 2 <= k0 <= idx[-1] - 2:
        S = np.maximum(S - _kink_correction(h, x, k0), 0.0)
    T = np.zeros(g.batch_shape)
    if xlo < x[0] and np.any(h[..., 0] > 0):
        I = tail_integral(-q * pz, q * gz, q * dz, y0_lo, x[0] - xlo)
        T = T + h[..., 0] * I
    if xhi > x[-1] and np.any(h[..., -1] > 0):
        I = tail_integral(q * pi, q * gi, q * di, y0_hi, xhi - x[-1])
        T = T + h[..., -1] * I
    total = S + T
    with np.errstate(divide="ignore"):
        val = np.exp((np.log(total) + M) / q)
        frac = np.where(total > 0, T / np.where(total > 0, total, 1.0), 0.0)
    return _pack(val, frac, details)


def _interp_last(arr, x, x0):
    """Linear interpolation along the last axis at scalar ``x0``."""
    k = int(np.clip(np.searchsorted(x, x0) - 1, 0, len(x) - 2))
    w = (x0 - x[k]) / (x[k + 1] - x[k])
    a, b = arr[..., k], arr[..., k + 1]
    with np.errstate(invalid="ignore"):
        out = a + (b - a) * w
    if np.ndim(out) == 0:
        return out if np.isfinite(out) else max(a, b) if w > 0.5 else a
    return np.where(np.isfinite(out), out, np.where(w > 0.5, b, a))


def _pack(val, frac, details):
    val = np.asarray(val, dtype=float)
    frac = np.asarray(frac, dtype=float)
    if val.ndim == 0:
        return QuadResult(float(val), float(frac)) if details else float(val)
    if details:
        return val, frac
    return val


def _partial_tails(g: GridFunction, sigma: float, q: float, a: SvExpr, side: str):
    """Tail models of the partial-norm function, derived from the integrand."""
    out = {}
    integrated = "zero" if side == "lower" else "inf"
    for end, tail in (("zero", g.tail_zero), ("inf", g.tail_inf)):
        pe, ge, de = _end_exponents(tail, a, end, sigma)
        k_out = -pe if end == "zero" else pe
        if end == integrated:
            if q == INF or abs(k_out) > _TOL:
                out[end] = PowerTail(pe, ge, de)
            else:
                extra = 1.0 / q if abs(q * ge + 1) <= _TOL else 0.0
                out[end] = PowerTail(0.0, ge + 1.0 / q, de + extra)
        else:
            if q == INF:
                bounded = k_out < -_TOL or (abs(k_out) <= _TOL and sup_bounded(ge, de))
                out[end] = PowerTail() if bounded else PowerTail(pe, ge, de)
                continue
            m, n = q * ge, q * de
            if k_out < -_TOL or (abs(k_out) <= _TOL and power_log_converges(m, n)):
                out[end] = PowerTail()
            elif k_out > _TOL:
                out[end] = PowerTail(pe, ge, de)
            elif m > -1 + _TOL:
                out[end] = PowerTail(0.0, ge + 1.0 / q, de)
            elif n > -1 + _TOL:
                out[end] = PowerTail(0.0, 0.0, de + 1.0 / q)
            else:
                out[end] = PowerTail()
    return out["zero"], out["inf"]


def partial_qnorm(g: GridFunction, sigma: float, q: float, a: SvExpr, side: str,
                  bound: float | None = None) -> GridFunction:
    """Tabulate ``t -> ||u**(-sigma-1/q) a(u) g(u)||_{q,(0,t)}`` or over ``(t, inf)``.

    Parameters
    ----------
    side : {"lower", "upper"}
    bound : float, optional
        For ``side="upper"``, a finite upper limit replacing ``inf`` (the
        values at grid points beyond it are zero).
    """
    if side not in ("lower", "upper"):
        raise ValueError("side must be 'lower' or 'upper'")
    if bound is not None and side != "upper":
        raise ValueError("a finite bound is only supported for the upper side")
    grid = g.grid
    x = grid.x
    dx = np.diff(x)
    with np.errstate(divide="ignore"):
        L = (-sigma * x + a.logval(x)) + np.log(g.samples)
    pz, gz, dz = _end_exponents(g.tail_zero, a, "zero", sigma)
    pi, gi, di = _end_exponents(g.tail_inf, a, "inf", sigma)
    y0_lo, y0_hi = 1 + abs(x[0]), 1 + abs(x[-1])
    xb = INF if bound is None else math.log(bound)

    if q == INF:
        if side == "lower":
            start = L[..., 0]
            if np.any(np.isfinite(start)):
                start = start + math.log(tail_sup(-pz, gz, dz, y0_lo))
            Lc = L.copy()
            Lc[..., 0] = np.maximum(Lc[..., 0], start)
            P = np.exp(np.maximum.accumulate(Lc, axis=-1))
        else:
            Lc = L.copy()
            if xb >= x[-1]:
                if np.any(np.isfinite(L[..., -1])):
                    Lc[..., -1] = L[..., -1] + math.log(tail_sup(pi, gi, di, y0_hi, xb - x[-1]))
            else:
                Lc[..., x > xb + 1e-12] = -INF
            P = np.exp(np.maximum.accumulate(Lc[..., ::-1], axis=-1)[..., ::-1])
        tz, ti = _partial_tails(g, sigma, q, a, side)
        if bound is not None:
            ti = PowerTail()
        return GridFunction(grid, P, tz, ti)

    lq = q * L
    M = _row_max(lq)
    with np.errstate(under="ignore"):
        h = np.exp(lq - M[..., None])
    cells = 0.5 * (h[..., :-1] + h[..., 1:]) * dx
    k0 = _kink_node(grid)
    if k0 is not None and 2 <= k0 <= grid.n - 3 and (side == "lower" or xb >= x[k0 + 2]):
        # fold the jump term into the two cells meeting at the kink
        corr = 0.5 * _kink_correction(h, x, k0)
        cells = cells.copy()
        cells[..., k0 - 1] = np.maximum(cells[..., k0 - 1] - corr, 0.0)
        cells[..., k0] = np.maximum(cells[..., k0] - corr, 0.0)
    if side == "lower":
        T = np.zeros(g.batch_shape)
        if np.any(h[..., 0] > 0):
            T = h[..., 0] * tail_integral(-q * pz, q * gz, q * dz, y0_lo)
        cum = np.concatenate([T[..., None], T[..., None] + np.cumsum(cells, axis=-1)], axis=-1)
    else:
        if xb >= x[-1]:
            T = np.zeros(g.batch_shape)
            if np.any(h[..., -1] > 0):
                T = h[..., -1] * tail_integral(q * pi, q * gi, q * di, y0_hi, xb - x[-1])
            rc = np.cumsum(cells[..., ::-1], axis=-1)[..., ::-1]
            cum = np.concatenate([T[..., None] + rc, T[..., None]], axis=-1)
        else:
            k = int(np.searchsorted(x, xb + 1e-12) - 1)
            cells = cells.copy()
            cells[..., k:] = 0.0
            if xb - x[k] > 1e-12:
                hb = _interp_last(h, x, xb)
                cells[..., k] = 0.5 * (h[..., k] + hb) * (xb - x[k])
            rc = np.cumsum(cells[..., ::-1], axis=-1)[..., ::-1]
            cum = np.concatenate([rc, np.zeros(g.batch_shape)[..., None]], axis=-1)
            cum[..., k + 1:] = 0.0
    with np.errstate(divide="ignore"):
        P = np.exp((np.log(cum) + M[..., None]) / q)
    tz, ti = _partial_tails(g, sigma, q, a, side)
    if bound is not None:
        ti = PowerTail()
    return GridFunction(grid, P, tz, ti)


# -- staircase integrands ----------------------------------------------------

def _staircase_parts(f: Staircase, theta: float, q: float, b: SvExpr):
    """Per-cell weights and head/tail integrals of ``(u**-theta b)**q``."""
    grid = f.grid
    x = grid.x
    lw = -theta * x + b.logval(x)
    pz, gz, dz = -theta + f.head_model.p, b.asymptote("zero").gamma + f.head_model.gamma, \
        b.asymptote("zero").delta + f.head_model.delta
    pi, gi, di = -theta + f.tail_model.p, b.asymptote("inf").gamma + f.tail_model.gamma, \
        b.asymptote("inf").delta + f.tail_model.delta
    return lw, (pz, gz, dz), (pi, gi, di)


def staircase_qnorm(f: Staircase, theta: float, q: float, b: SvExpr):
    """``||u**(-theta-1/q) b(u) f(u)||_{q,(0,inf)}`` for a grid-aligned staircase.

    Each cell contributes its constant value to the power ``q`` times the
    trapezoid integral of the smooth weight over the cell, so jumps are
    integrated without smearing.
    """
    P = staircase_partial_qnorm(f, theta, q, b, "lower", include_tail=True)
    return P


def staircase_partial_qnorm(f: Staircase, sigma: float, q: float, a: SvExpr, side: str,
                            include_tail: bool = False):
    """Prefix (``lower``) or suffix (``upper``) norms of a staircase at every node.

    With ``include_tail=True`` and ``side="lower"`` the full norm over
    ``(0, inf)`` is returned instead (one value per batch row).
    """
    grid = f.grid
    x = grid.x
    dx = np.diff(x)
    lw, (pz, gz, dz), (pi, gi, di) = _staircase_parts(f, sigma, q, a)
    y0_lo, y0_hi = 1 + abs(x[0]), 1 + abs(x[-1])
    if q == INF:
        cellmax = np.maximum(lw[:-1], lw[1:])
        with np.errstate(divide="ignore"):
            Lc = np.log(f.cells) + cellmax
            Lh = np.log(f.head) + lw[0]
            Lt = np.log(f.tail) + lw[-1]
        if side == "lower":
            if np.any(np.isfinite(Lh)):
                Lh = Lh + math.log(tail_sup(-pz, gz, dz, y0_lo))
            seq = np.concatenate([Lh[..., None], Lc], axis=-1)
            run = np.maximum.accumulate(seq, axis=-1)
            if include_tail:
                last = run[..., -1]
                if np.any(np.isfinite(Lt)):
                    last = np.maximum(last, Lt + math.log(tail_sup(pi, gi, di, y0_hi)))
                return np.exp(last) if np.ndim(last) else float(np.exp(last))
            vals = np.exp(run)
            return GridFunction(grid, vals, PowerTail(pz, gz, dz), PowerTail())
        if np.any(np.isfinite(Lt)):
            Lt = Lt + math.log(tail_sup(pi, gi, di, y0_hi))
        seq = np.concatenate([Lc, Lt[..., None]], axis=-1)
        run = np.maximum.accumulate(seq[..., ::-1], axis=-1)[..., ::-1]
        return GridFunction(grid, np.exp(run), PowerTail(), PowerTail(pi, gi, di))
    wq = np.exp(q * (lw - np.max(lw)))
    scale = q * np.max(lw)
    W = 0.5 * (wq[:-1] + wq[1:]) * dx
    with np.errstate(under="ignore"):
        cells = f.cells ** q * W
    head_w = wq[0] * tail_integral(-q * pz, q * gz, q * dz, y0_lo) if np.any(f.head > 0) else 0.0
    tail_w = None
    H = f.head ** q * head_w
    if side == "lower":
        cum = np.concatenate([H[..., None], H[..., None] + np.cumsum(cells, axis=-1)], axis=-1)
        if include_tail:
            total = cum[..., -1]
            if np.any(f.tail > 0):
                tail_w = wq[-1] * tail_integral(q * pi, q * gi, q * di, y0_hi)
                total = total + f.tail ** q * tail_w
            with np.errstate(divide="ignore"):
                out = np.exp((np.log(total) + scale) / q)
            return out if np.ndim(out) else float(out)
        with np.errstate(divide="ignore"):
            vals = np.exp((np.log(cum) + scale) / q)
        tz = _stair_tail_integrated(pz, gz, dz, q)
        return GridFunction(grid, vals, tz, _stair_tail_far(pi, gi, di, q, f.tail))
    Tt = np.zeros(f.batch_shape)
    if np.any(f.tail > 0):
        tail_w = wq[-1] * tail_integral(q * pi, q * gi, q * di, y0_hi)
        Tt = f.tail ** q * tail_w
    rc = np.cumsum(cells[..., ::-1], axis=-1)[..., ::-1]
    cum = np.concatenate([Tt[..., None] + rc, Tt[..., None]], axis=-1)
    with np.errstate(divide="ignore"):
        vals = np.exp((np.log(cum) + scale) / q)
    ti = _stair_tail_integrated(pi, gi, di, q)
    return GridFunction(grid, vals, _stair_tail_far(-pz, gz, dz, q, f.head, flip=True), ti)


def _stair_tail_integrated(p, g, d, q):
    if abs(p) > _TOL:
        return PowerTail(p, g, d)
    extra = 1.0 / q if abs(q * g + 1) <= _TOL else 0.0
    return PowerTail(0.0, g + 1.0 / q, d + extra)


def _stair_tail_far(p, g, d, q, anchor, flip=False):
    k_out = -p if flip else p
    pe = p if not flip else -p
    if not np.any(anchor > 0):
        return PowerTail()
    m, n = q * g, q * d
    if k_out < -_TOL or (abs(k_out) <= _TOL and power_log_converges(m, n)):
        return PowerTail()
    if k_out > _TOL:
        return PowerTail(pe, g, d)
    if m > -1 + _TOL:
        return PowerTail(0.0, g + 1.0 / q, d)
    return PowerTail(0.0, 0.0, d + 1.0 / q)
