"""Slowly varying functions as symbolic expression trees.

Every node evaluates pointwise, carries log-polynomial asymptotics at both
ends of the half line, and serializes to a JSON tree.  The asymptotic
descriptor ``Asymptote(gamma, delta)`` at an end means

    b(t) ~ (1 + |ln t|)**gamma * (1 + ln(1 + |ln t|))**delta

as ``t`` tends to that end.  Convergence of every tail integral in the
package is decided from these exponents.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import ClassVar

import numpy as np

from .errors import DivergentTail, NonConvergent, RangeError
from .grid import DEFAULT_GRID, LogGrid

_TOL = 1e-12
ENDS = ("zero", "inf")


def _other(end: str) -> str:
    return "inf" if end == "zero" else "zero"


def _encode(v: float):
    return "inf" if v == math.inf else float(v)


def _decode(v) -> float:
    if isinstance(v, str):
        if v.lower() in ("inf", "infinity", "+inf"):
            return math.inf
        return float(v)
    return float(v)


@dataclass(frozen=True)
class Asymptote:
    """Log-polynomial exponents ``(gamma, delta)`` at one end."""

    gamma: float = 0.0
    delta: float = 0.0

    def __add__(self, other: "Asymptote") -> "Asymptote":
        return Asymptote(self.gamma + other.gamma, self.delta + other.delta)

    def scaled(self, r: float) -> "Asymptote":
        return Asymptote(self.gamma * r, self.delta * r)

    def to_json(self) -> dict:
        return {"gamma": float(self.gamma), "delta": float(self.delta)}

    @classmethod
    def from_json(cls, d: dict) -> "Asymptote":
        return cls(float(d.get("gamma", 0.0)), float(d.get("delta", 0.0)))


def _log1pabs(x):
    return np.log1p(np.abs(x))


class SvExpr:
    """Base class of the expression tree.

    Subclasses implement ``logval`` (log of the value as a function of
    ``x = ln t``), ``asymptote`` and JSON conversion.
    """

    kind: ClassVar[str] = ""

    # -- evaluation -----------------------------------------------------
    def logval(self, x):
        raise NotImplementedError

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        if np.any(~(t_arr > 0)) or np.any(~np.isfinite(t_arr)):
            raise ValueError("SV functions are evaluated on (0, inf) only")
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            lv = self.logval(np.log(t_arr))
            val = np.exp(lv)
        if np.any(~np.isfinite(val)) or np.any(val <= 0):
            raise RangeError(f"{self.kind} evaluation left the floating point range")
        if np.ndim(t) == 0:
            return float(val)
        return val

    def asymptote(self, end: str) -> Asymptote:
        raise NotImplementedError

    @property
    def confidence(self) -> str:
        """``"symbolic"`` unless a fitted table occurs in the tree."""
        return "fitted" if any(c.confidence == "fitted" for c in self.children()) else "symbolic"

    def children(self) -> tuple:
        return ()

    def is_unit(self) -> bool:
        """Structural test for the constant function 1."""
        return False

    # -- algebra --------------------------------------------------------
    def power(self, r: float) -> "SvExpr":
        if r == 1:
            return self
        if r == 0:
            return Const(1.0)
        return Pow(self, float(r))

    def recip_arg(self) -> "SvExpr":
        return RecipArg(self)

    def times(self, other: "SvExpr") -> "SvExpr":
        return Prod(self, other)

    def compose(self, lam: float, inner: "SvExpr") -> "SvExpr":
        return ComposeRegular(self, float(lam), inner)

    def __mul__(self, other):
        return self.times(other)

    def __truediv__(self, other):
        return Prod(self, other.power(-1.0))

    def __pow__(self, r):
        return self.power(r)

    def tabulate(self, grid: LogGrid = DEFAULT_GRID) -> "Tabulated":
        lv = np.asarray(self.logval(grid.x), dtype=float)
        return Tabulated(grid, lv, self.asymptote("zero"), self.asymptote("inf"), self.confidence)

    # -- serialization --------------------------------------------------
    def to_json(self) -> dict:
        raise NotImplementedError

    @staticmethod
    def from_json(d: dict) -> "SvExpr":
        kind = d["kind"]
        if kind == "const":
            return Const(float(d["c"]))
        if kind == "logpow":
            return LogPow(float(d["gamma"]))
        if kind == "loglogpow":
            return LogLogPow(float(d["gamma"]))
        if kind == "brokenlogpow":
            return BrokenLogPow(float(d["gamma0"]), float(d["gamma_inf"]))
        if kind == "prod":
            return Prod(SvExpr.from_json(d["left"]), SvExpr.from_json(d["right"]))
        if kind == "pow":
            return Pow(SvExpr.from_json(d["base"]), float(d["r"]))
        if kind == "recip":
            return RecipArg(SvExpr.from_json(d["inner"]))
        if kind == "compose":
            return ComposeRegular(SvExpr.from_json(d["outer"]), float(d["lam"]), SvExpr.from_json(d["inner"]))
        if kind in ("tabulated", "numeric"):
            return Tabulated.from_json(d)
        raise ValueError(f"unknown SV node kind {kind!r}")


@dataclass(frozen=True)
class Const(SvExpr):
    c: float = 1.0
    kind: ClassVar[str] = "const"

    def __post_init__(self):
        if not (self.c > 0 and math.isfinite(self.c)):
            raise ValueError("Const needs a positive finite value")

    def logval(self, x):
        return np.full(np.shape(x), math.log(self.c))

    def asymptote(self, end):
        return Asymptote()

    def recip_arg(self):
        return self

    def is_unit(self):
        return self.c == 1.0

    def to_json(self):
        return {"kind": "const", "c": float(self.c)}


@dataclass(frozen=True)
class LogPow(SvExpr):
    """``t -> (1 + |ln t|)**gamma``."""

    gamma: float = 1.0
    kind: ClassVar[str] = "logpow"

    def logval(self, x):
        return self.gamma * _log1pabs(np.asarray(x, dtype=float))

    def asymptote(self, end):
        return Asymptote(self.gamma, 0.0)

    def recip_arg(self):
        return self

    def is_unit(self):
        return self.gamma == 0

    def to_json(self):
        return {"kind": "logpow", "gamma": float(self.gamma)}


@dataclass(frozen=True)
class LogLogPow(SvExpr):
    """``t -> (1 + ln(1 + |ln t|))**gamma``."""

    gamma: float = 1.0
    kind: ClassVar[str] = "loglogpow"

    def logval(self, x):
        return self.gamma * np.log1p(_log1pabs(np.asarray(x, dtype=float)))

    def asymptote(self, end):
        return Asymptote(0.0, self.gamma)

    def recip_arg(self):
        return self

    def is_unit(self):
        return self.gamma == 0

    def to_json(self):
        return {"kind": "loglogpow", "gamma": float(self.gamma)}


@dataclass(frozen=True)
class BrokenLogPow(SvExpr):
    """``(1+|ln t|)**gamma0`` on ``(0,1]`` and ``(1+ln t)**gamma_inf`` on ``[1,inf)``."""

    gamma0: float = 0.0
    gamma_inf: float = 0.0
    kind: ClassVar[str] = "brokenlogpow"

    def logval(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x < 0, self.gamma0, self.gamma_inf) * _log1pabs(x)

    def asymptote(self, end):
        return Asymptote(self.gamma0 if end == "zero" else self.gamma_inf, 0.0)

    def recip_arg(self):
        return BrokenLogPow(self.gamma_inf, self.gamma0)

    def is_unit(self):
        return self.gamma0 == 0 and self.gamma_inf == 0

    def to_json(self):
        return {"kind": "brokenlogpow", "gamma0": float(self.gamma0), "gamma_inf": float(self.gamma_inf)}


@dataclass(frozen=True)
class Prod(SvExpr):
    left: SvExpr
    right: SvExpr
    kind: ClassVar[str] = "prod"

    def logval(self, x):
        return self.left.logval(x) + self.right.logval(x)

    def asymptote(self, end):
        return self.left.asymptote(end) + self.right.asymptote(end)

    def children(self):
        return (self.left, self.right)

    def recip_arg(self):
        return Prod(self.left.recip_arg(), self.right.recip_arg())

    def is_unit(self):
        return self.left.is_unit() and self.right.is_unit()

    def to_json(self):
        return {"kind": "prod", "left": self.left.to_json(), "right": self.right.to_json()}


@dataclass(frozen=True)
class Pow(SvExpr):
    base: SvExpr
    r: float
    kind: ClassVar[str] = "pow"

    def logval(self, x):
        return self.r * self.base.logval(x)

    def asymptote(self, end):
        return self.base.asymptote(end).scaled(self.r)

    def children(self):
        return (self.base,)

    def recip_arg(self):
        return Pow(self.base.recip_arg(), self.r)

    def is_unit(self):
        return self.r == 0 or self.base.is_unit()

    def to_json(self):
        return {"kind": "pow", "base": self.base.to_json(), "r": float(self.r)}


@dataclass(frozen=True)
class RecipArg(SvExpr):
    """``t -> inner(1/t)``.

    Construction normalizes: the reflection is pushed into closed-form nodes
    (constants and log powers are symmetric, broken powers swap exponents,
    products and powers distribute), so a ``RecipArg`` node only ever wraps a
    :class:`ComposeRegular` or tabulated function.  This keeps reflection an
    exact structural involution.
    """

    inner: SvExpr
    kind: ClassVar[str] = "recip"

    def __new__(cls, inner=None):
        if inner is not None and not isinstance(inner, (ComposeRegular, Tabulated)):
            return inner.recip_arg()
        return super().__new__(cls)

    def logval(self, x):
        return self.inner.logval(-np.asarray(x, dtype=float))

    def asymptote(self, end):
        return self.inner.asymptote(_other(end))

    def children(self):
        return (self.inner,)

    def recip_arg(self):
        return self.inner

    def is_unit(self):
        return self.inner.is_unit()

    def to_json(self):
        return {"kind": "recip", "inner": self.inner.to_json()}


@dataclass(frozen=True)
class ComposeRegular(SvExpr):
    """``t -> outer(t**lam * inner(t))`` with ``lam > 0``."""

    outer: SvExpr
    lam: float
    inner: SvExpr
    kind: ClassVar[str] = "compose"

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("compose_regular needs lam > 0")

    def logval(self, x):
        x = np.asarray(x, dtype=float)
        return self.outer.logval(self.lam * x + self.inner.logval(x))

    def asymptote(self, end):
        # |ln(t^lam inner(t))| ~ lam |ln t|, so only the outer exponents survive
        return self.outer.asymptote(end)

    def children(self):
        return (self.outer, self.inner)

    def is_unit(self):
        return self.outer.is_unit()

    def to_json(self):
        return {"kind": "compose", "outer": self.outer.to_json(), "lam": float(self.lam),
                "inner": self.inner.to_json()}


@dataclass(frozen=True, eq=False)
class Tabulated(SvExpr):
    """Samples of ``ln b`` on a grid with asymptotic tails.

    Inside the grid ``ln b`` is interpolated linearly in ``x = ln t``
    (log-linear interpolation).  Outside, the tail model is anchored at the
    end sample.
    """

    grid: LogGrid
    log_values: np.ndarray
    tail_zero: Asymptote = field(default_factory=Asymptote)
    tail_inf: Asymptote = field(default_factory=Asymptote)
    tail_confidence: str = "symbolic"
    kind: ClassVar[str] = "tabulated"

    def __post_init__(self):
        lv = np.array(self.log_values, dtype=float)
        if lv.shape != (self.grid.n,):
            raise ValueError("log_values must match the grid")
        if not np.all(np.isfinite(lv)):
            raise RangeError("tabulated SV values must be positive and finite")
        lv.setflags(write=False)
        object.__setattr__(self, "log_values", lv)

    def __eq__(self, other):
        return (type(other) is type(self) and self.grid == other.grid
                and np.array_equal(self.log_values, other.log_values)
                and self.tail_zero == other.tail_zero and self.tail_inf == other.tail_inf)

    def __hash__(self):
        return hash((self.grid, self.log_values.tobytes()))

    @property
    def confidence(self):
        return self.tail_confidence

    def logval(self, x):
        x = np.asarray(x, dtype=float)
        gx, lv = self.grid.x, self.log_values
        out = np.interp(x, gx, lv)
        lo, hi = x < gx[0], x > gx[-1]
        if np.any(lo):
            out = np.where(lo, lv[0] + self._shift(self.tail_zero, x, gx[0]), out)
        if np.any(hi):
            out = np.where(hi, lv[-1] + self._shift(self.tail_inf, x, gx[-1]), out)
        return out

    @staticmethod
    def _shift(a: Asymptote, x, x0):
        y, y0 = 1 + np.abs(x), 1 + abs(x0)
        s = a.gamma * (np.log(y) - math.log(y0))
        if a.delta:
            s = s + a.delta * (np.log1p(np.log(y)) - math.log1p(math.log(y0)))
        return s

    def asymptote(self, end):
        return self.tail_zero if end == "zero" else self.tail_inf

    @property
    def values(self) -> np.ndarray:
        return np.exp(self.log_values)

    def is_unit(self):
        return bool(np.all(self.log_values == 0)) and self.tail_zero == Asymptote() and self.tail_inf == Asymptote()

    def tabulate(self, grid: LogGrid = DEFAULT_GRID) -> "Tabulated":
        if grid == self.grid:
            return self
        return super().tabulate(grid)

    def to_json(self):
        return {"kind": "tabulated", "grid": self.grid.to_json(),
                "log_values": [float(v) for v in self.log_values],
                "tail_zero": self.tail_zero.to_json(), "tail_inf": self.tail_inf.to_json(),
                "confidence": self.tail_confidence}

    @staticmethod
    def from_json(d: dict) -> "Tabulated":
        grid = LogGrid.from_json(d["grid"])
        args = (grid, np.asarray(d["log_values"], dtype=float), Asymptote.from_json(d["tail_zero"]),
                Asymptote.from_json(d["tail_inf"]), d.get("confidence", "symbolic"))
        if d["kind"] == "numeric":
            return NumericSv(*args, provenance=d.get("provenance", {}))
        return Tabulated(*args)


@dataclass(frozen=True, eq=False)
class NumericSv(Tabulated):
    """A tabulated SV function together with the computation that produced it."""

    provenance: dict = field(default_factory=dict)
    kind: ClassVar[str] = "numeric"

    def to_json(self):
        d = super().to_json()
        d["kind"] = "numeric"
        d["provenance"] = self.provenance
        return d


# -- convenience constructors ----------------------------------------------

ONE = Const(1.0)


def sv_product(*factors) -> SvExpr:
    """Product of ``(expr, power)`` pairs, skipping unit factors."""
    out = None
    for expr, r in factors:
        if r == 0 or expr.is_unit():
            continue
        term = expr.power(r)
        out = term if out is None else Prod(out, term)
    return ONE if out is None else out


def transform(expr: SvExpr, op: str, *args) -> SvExpr:
    """Apply one closure operation.

    Parameters
    ----------
    expr : SvExpr
    op : {"power", "recip_arg", "product", "compose_regular"}
    *args
        ``r`` for power, ``other`` for product, ``(lam, inner)`` for
        compose_regular.
    """
    if op == "power":
        return expr.power(float(args[0]))
    if op == "recip_arg":
        return expr.recip_arg()
    if op == "product":
        return expr.times(args[0])
    if op == "compose_regular":
        lam, inner = args
        return expr.compose(lam, inner)
    raise ValueError(f"unknown transform {op!r}")


# -- convergence -------------------------------------------------------------

@dataclass(frozen=True)
class FiniteCheck:
    """Verdict of :func:`check_finite`."""

    finite: bool
    diagnostic: str
    confidence: str = "symbolic"

    def __bool__(self):
        return self.finite


def _interval_end(interval) -> str:
    if isinstance(interval, str):
        key = interval.replace(" ", "").lower()
        if key in ("(0,1)", "zero", "0,1"):
            return "zero"
        if key in ("(1,inf)", "(1,∞)", "inf", "1,inf"):
            return "inf"
    else:
        lo, hi = interval
        if lo == 0 and hi == 1:
            return "zero"
        if lo == 1 and hi == math.inf:
            return "inf"
    raise ValueError(f"interval must be (0,1) or (1,inf); got {interval!r}")


def power_log_converges(m: float, n: float) -> bool:
    """Whether ``int^inf y**m (1+ln y)**n dy`` is finite."""
    return m < -1 - _TOL or (abs(m + 1) <= _TOL and n < -1 - _TOL)


def sup_bounded(g: float, d: float) -> bool:
    """Whether ``y**g (1+ln y)**d`` stays bounded as ``y -> inf``."""
    return g < -_TOL or (abs(g) <= _TOL and d <= _TOL)


def check_finite(expr: SvExpr, r: float, interval) -> FiniteCheck:
    """Decide whether ``||s**(-1/r) expr(s)||_{r, interval}`` is finite.

    Only the behaviour at the open end of ``(0,1)`` or ``(1,inf)`` matters;
    the integrand is bounded elsewhere.
    """
    end = _interval_end(interval)
    a = expr.asymptote(end)
    label = "(0,1)" if end == "zero" else "(1,inf)"
    if r == math.inf:
        ok = sup_bounded(a.gamma, a.delta)
        diag = f"sup over {label}: exponents gamma={a.gamma:g}, delta={a.delta:g} -> {'bounded' if ok else 'unbounded'}"
    else:
        m, n = a.gamma * r, a.delta * r
        ok = power_log_converges(m, n)
        diag = (f"r={r:g} integral over {label}: gamma*r={m:g}, delta*r={n:g} -> "
                f"{'finite' if ok else 'infinite'}")
    return FiniteCheck(bool(ok), diag, expr.confidence)


# -- tail norms --------------------------------------------------------------

def tail_qnorm(expr: SvExpr, r: float, side: str, grid: LogGrid = DEFAULT_GRID) -> NumericSv:
    """Tabulate ``t -> ||s**(-1/r) expr(s)||_{r,(0,t)}`` (lower) or over ``(t,inf)`` (upper).

    Raises
    ------
    DivergentTail
        If the integral is infinite at the integrated end, hence for every t.
    """
    from .quad import GridFunction, partial_qnorm

    if side not in ("lower", "upper"):
        raise ValueError("side must be 'lower' or 'upper'")
    end = "zero" if side == "lower" else "inf"
    a = expr.asymptote(end)
    if r == math.inf:
        ok = sup_bounded(a.gamma, a.delta)
    else:
        ok = power_log_converges(a.gamma * r, a.delta * r)
    if not ok:
        where = "(0,t)" if side == "lower" else "(t,inf)"
        raise DivergentTail(f"{side} tail norm over {where} diverges for every t: exponents "
                            f"gamma={a.gamma:g}, delta={a.delta:g}, r={r:g}",
                            side=end, exponent=(a.gamma, a.delta))
    ones = GridFunction.constant(grid, 1.0)
    try:
        P = partial_qnorm(ones, 0.0, r, expr, side)
    except NonConvergent as exc:  # pragma: no cover - guarded above
        raise DivergentTail(str(exc), side=exc.side, exponent=exc.exponent) from exc
    with np.errstate(divide="ignore"):
        lv = np.log(P.samples)
    if not np.all(np.isfinite(lv)):
        raise RangeError("tail norm underflowed on the grid")
    return NumericSv(grid, lv, Asymptote(P.tail_zero.gamma, P.tail_zero.delta),
                     Asymptote(P.tail_inf.gamma, P.tail_inf.delta), expr.confidence,
                     provenance={"op": "tail_qnorm", "r": _encode(r), "side": side,
                                 "source": expr.to_json()})


def monotone_equivalence_constant(expr: SvExpr, eps: float, grid: LogGrid = DEFAULT_GRID) -> float:
    """Smallest ``C`` with ``t**eps b(t)`` within ``C`` of its running maximum.

    For ``eps < 0`` the running minimum is used instead, so the result
    measures how far ``t**eps b`` is from being non-increasing.
    """
    lv = eps * grid.x + expr.logval(grid.x)
    if eps >= 0:
        env = np.maximum.accumulate(lv)
        return float(np.exp(np.max(env - lv)))
    env = np.minimum.accumulate(lv)
    return float(np.exp(np.max(lv - env)))
