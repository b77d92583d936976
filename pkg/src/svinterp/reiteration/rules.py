"""Reiteration rules as executable rewrites.

Every rule takes an outer functor ``(theta, r, a)`` applied to a couple of
intermediate spaces ``(X0, X1)`` of a base couple and returns a single space
of the base couple.  All catalogue entries share one construction:

* each operand carries a weight function ``w`` (``b`` for a standard space,
  a tail norm of ``b`` for the endpoint-type standard spaces, ``c = a * tail
  norm of b/a`` for limiting spaces, and 1 for ``A0`` or ``A1``);
* ``rho(t) = t**(theta_R - theta_L) * w_L(t) / w_R(t)``, where ``theta_L``
  is 0 for ``A0`` and ``theta_R`` is 1 for ``A1``;
* ``eta = (1-theta) theta_L + theta theta_R`` and
  ``a# = w_L**(1-theta) * w_R**theta * (a o sigma)`` with ``sigma`` an
  increasing surrogate of ``rho``.

When the outer parameter sits at an end (``theta = 0`` with a standard left
operand, ``theta = 1`` with a standard right operand) the result is a
limiting space instead of a standard one.  Rules involving R-spaces whose
statement follows by the couple swap are derived through the swap.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ..errors import HypothesisFailed, InvalidDescriptor, NoRuleMatches
from ..grid import DEFAULT_GRID, LogGrid
from ..quad import GridFunction, partial_qnorm
from ..spaces import (Endpoint, LLim, RLim, SpaceDescriptor, Standard, swap, unit_extension, unit_param,
                      validate)
from ..sv import (ONE, Asymptote, NumericSv, SvExpr, _decode, _encode, check_finite, sv_product,
                  tail_qnorm)

INF = math.inf


class RuleId(str, Enum):
    """Catalogue of rules, one member per hypothesis/formula set."""

    T7 = "T7"
    T8i = "T8i"
    T8ii = "T8ii"
    T9i = "T9i"
    T9ii = "T9ii"
    T10i = "T10i"
    T10ii = "T10ii"
    T10iii = "T10iii"
    T11i = "T11i"
    T11ii = "T11ii"
    T12 = "T12"
    T13 = "T13"
    T15 = "T15"
    T16 = "T16"
    T18i = "T18i"
    T18ii = "T18ii"
    T19i = "T19i"
    T19ii = "T19ii"
    T20 = "T20"
    T21 = "T21"
    T22 = "T22"
    T23 = "T23"
    T24i = "T24i"
    T24ii = "T24ii"
    T25 = "T25"
    T26 = "T26"
    T27 = "T27"
    T28 = "T28"
    T31 = "T31"
    P1 = "P1"
    P2 = "P2"
    P3 = "P3"
    P4 = "P4"
    P5 = "P5"
    P6 = "P6"
    P7 = "P7"
    P8 = "P8"
    C37 = "C37"
    C38 = "C38"
    C39 = "C39"
    C40 = "C40"
    C41 = "C41"
    C42 = "C42"
    C43 = "C43"
    C44 = "C44"
    C45 = "C45"
    C46 = "C46"
    C47 = "C47"
    C48 = "C48"
    C49 = "C49"
    C50 = "C50"
    C51 = "C51"
    C52 = "C52"

    def __str__(self) -> str:
        return self.value

    @property
    def family(self) -> str:
        return self.value[0]


REITERATION_RULES = tuple(r for r in RuleId if r.family == "T")
PROPERTY_RULES = tuple(r for r in RuleId if r.family == "P")
COROLLARY_RULES = tuple(r for r in RuleId if r.family == "C")

# R-space rules obtained from an L-space rule through the couple swap
MIRROR = {
    RuleId.T19i: RuleId.T11i, RuleId.T19ii: RuleId.T11ii, RuleId.T20: RuleId.T12,
    RuleId.T21: RuleId.T13, RuleId.T22: RuleId.T15, RuleId.T23: RuleId.T16,
    RuleId.T24i: RuleId.T18i, RuleId.T24ii: RuleId.T18ii, RuleId.T27: RuleId.T25,
}

# (left tag, right tag) -> {outer position: rule}
DISPATCH = {
    ("S0", "A1"): {"mid": RuleId.T8i, "1": RuleId.T8i},
    ("A0", "S1"): {"0": RuleId.T8ii, "mid": RuleId.T8ii},
    ("S", "S"): {"mid": RuleId.T7, "0": RuleId.T10iii},
    ("S", "A1"): {"mid": RuleId.T9i, "1": RuleId.T9i, "0": RuleId.T10i},
    ("S", "S1"): {"mid": RuleId.T9ii, "0": RuleId.T10ii},
    ("L", "S"): {"mid": RuleId.T11i, "1": RuleId.T11ii},
    ("L", "S1"): {"mid": RuleId.T12},
    ("L", "A1"): {"mid": RuleId.T13, "1": RuleId.T13},
    ("A0", "L"): {"0": RuleId.T15, "mid": RuleId.T15},
    ("S0", "L"): {"mid": RuleId.T16},
    ("S", "L"): {"mid": RuleId.T18i, "0": RuleId.T18ii},
    ("S", "R"): {"mid": RuleId.T19i, "0": RuleId.T19ii},
    ("S0", "R"): {"mid": RuleId.T20},
    ("A0", "R"): {"0": RuleId.T21, "mid": RuleId.T21},
    ("R", "A1"): {"mid": RuleId.T22, "1": RuleId.T22},
    ("R", "S1"): {"mid": RuleId.T23},
    ("R", "S"): {"mid": RuleId.T24i, "1": RuleId.T24ii},
    ("L", "L"): {"mid": RuleId.T25},
    ("L", "R"): {"mid": RuleId.T26},
    ("R", "R"): {"mid": RuleId.T27},
    ("R", "L"): {"mid": RuleId.T28},
}
UNIT_DISPATCH = {("R", "L"): {"mid": RuleId.T31}}


# -- inputs ----------------------------------------------------------------------

@dataclass(frozen=True)
class Outer:
    """Outer functor parameters ``(theta, r, a)``."""

    theta: float
    r: float
    a: SvExpr = ONE

    def __post_init__(self):
        if not 0 <= self.theta <= 1:
            raise InvalidDescriptor(f"outer theta must lie in [0, 1]; got {self.theta!r}")
        object.__setattr__(self, "theta", unit_param(self.theta))
        r = _decode(self.r) if isinstance(self.r, str) else float(self.r)
        if not r > 0:
            raise InvalidDescriptor("outer r must lie in (0, inf]")
        object.__setattr__(self, "r", r)
        if isinstance(self.a, dict):
            object.__setattr__(self, "a", SvExpr.from_json(self.a))

    @property
    def position(self) -> str:
        return "0" if self.theta == 0 else "1" if self.theta == 1 else "mid"

    def swap(self) -> "Outer":
        return Outer(1 - self.theta, self.r, self.a.recip_arg())

    def to_json(self) -> dict:
        return {"theta": self.theta, "r": _encode(self.r), "a": self.a.to_json()}

    @classmethod
    def from_json(cls, d: dict) -> "Outer":
        return cls(float(d["theta"]), _decode(d["r"]), SvExpr.from_json(d.get("a", {"kind": "const", "c": 1.0})))


@dataclass(frozen=True)
class RuleInput:
    """``(left, right)_{outer}`` together with the interval mode."""

    left: SpaceDescriptor
    right: SpaceDescriptor
    outer: Outer
    mode: str = "full"

    def __post_init__(self):
        if self.mode not in ("full", "unit"):
            raise InvalidDescriptor("mode must be 'full' or 'unit'")
        for d in (self.left, self.right):
            if d.mode != self.mode:
                raise InvalidDescriptor(f"operand mode {d.mode!r} differs from rule mode {self.mode!r}")

    def swap(self) -> "RuleInput":
        return RuleInput(swap(self.right), swap(self.left), self.outer.swap(), self.mode)

    def to_json(self) -> dict:
        return {"left": self.left.to_json(), "right": self.right.to_json(),
                "outer": self.outer.to_json(), "mode": self.mode}

    @classmethod
    def from_json(cls, d: dict) -> "RuleInput":
        return cls(SpaceDescriptor.from_json(d["left"]), SpaceDescriptor.from_json(d["right"]),
                   Outer.from_json(d["outer"]), d.get("mode", "full"))


# -- regular maps -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RegularMap:
    """``t -> t**lam * sv(t)`` with ``lam > 0``."""

    lam: float
    sv: SvExpr

    def logval(self, x):
        x = np.asarray(x, dtype=float)
        return self.lam * x + self.sv.logval(x)

    def __call__(self, t):
        out = np.exp(self.logval(np.log(np.asarray(t, dtype=float))))
        return float(out) if out.ndim == 0 else out

    def to_json(self) -> dict:
        return {"lam": self.lam, "sv": self.sv.to_json()}


@dataclass(frozen=True, eq=False)
class MonotoneMap:
    """Strictly increasing tabulated map with its inverse.

    ``log_values`` holds ``ln sigma`` at the grid nodes.  Outside the grid
    the map continues as a pure power with exponent ``lam``.
    """

    grid: LogGrid
    log_values: np.ndarray
    lam: float
    constant: float
    source: dict = field(default_factory=dict)

    def logval(self, x):
        x = np.asarray(x, dtype=float)
        gx, lv = self.grid.x, self.log_values
        out = np.interp(x, gx, lv)
        out = np.where(x < gx[0], lv[0] + self.lam * (x - gx[0]), out)
        out = np.where(x > gx[-1], lv[-1] + self.lam * (x - gx[-1]), out)
        return out

    def inverse_logval(self, y):
        y = np.asarray(y, dtype=float)
        gx, lv = self.grid.x, self.log_values
        out = np.interp(y, lv, gx)
        out = np.where(y < lv[0], gx[0] + (y - lv[0]) / self.lam, out)
        out = np.where(y > lv[-1], gx[-1] + (y - lv[-1]) / self.lam, out)
        return out

    def __call__(self, t):
        out = np.exp(self.logval(np.log(np.asarray(t, dtype=float))))
        return float(out) if out.ndim == 0 else out

    def inverse(self, s):
        out = np.exp(self.inverse_logval(np.log(np.asarray(s, dtype=float))))
        return float(out) if out.ndim == 0 else out

    def to_json(self) -> dict:
        return {"lam": self.lam, "constant": self.constant, "grid": self.grid.to_json(),
                "log_values": [float(v) for v in self.log_values], "source": self.source}


def sigma_surrogate(lam: float, a: SvExpr, grid: LogGrid = DEFAULT_GRID) -> MonotoneMap:
    """Strictly increasing equivalent of ``rho(t) = t**lam a(t)``.

    The map is the smallest majorant of ``ln rho`` whose slope in ``ln t``
    is at least ``lam / 2``; since ``t**(lam/2) a(t)`` is equivalent to an
    increasing function, the majorant stays within a constant factor of
    ``rho``.  That factor is stored as ``constant``.
    """
    if not lam > 0:
        raise ValueError(f"sigma_surrogate needs lam > 0; got {lam!r}")
    x = grid.x
    L = lam * x + a.logval(x)
    step = 0.5 * lam * np.diff(x)
    ls = np.empty_like(L)
    ls[0] = L[0]
    for i in range(1, L.size):
        ls[i] = max(L[i], ls[i - 1] + step[i - 1])
    ls.setflags(write=False)
    return MonotoneMap(grid, ls, float(lam), float(np.exp(np.max(ls - L))),
                       {"lam": float(lam), "sv": _short_json(a)})


def _short_json(a: SvExpr) -> dict:
    if isinstance(a, NumericSv):
        return {"kind": "numeric", "provenance": a.provenance}
    return a.to_json()


# -- tabulated SV algebra ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class _Log:
    """``ln w`` on a grid with end asymptotes, plus a symbolic form when known."""

    lv: np.ndarray
    tz: Asymptote
    ti: Asymptote
    expr: SvExpr | None = None

    @classmethod
    def of(cls, e: SvExpr, grid: LogGrid) -> "_Log":
        if isinstance(e, NumericSv) and e.grid == grid:
            return cls(np.asarray(e.log_values), e.tail_zero, e.tail_inf, None)
        return cls(np.asarray(e.logval(grid.x), dtype=float), e.asymptote("zero"), e.asymptote("inf"), e)

    def times(self, other: "_Log", p: float = 1.0, q: float = 1.0) -> "_Log":
        expr = None
        if self.expr is not None and other.expr is not None:
            expr = sv_product((self.expr, p), (other.expr, q))
        return _Log(p * self.lv + q * other.lv, self.tz.scaled(p) + other.tz.scaled(q),
                    self.ti.scaled(p) + other.ti.scaled(q), expr)

    def frozen(self, grid: LogGrid) -> "_Log":
        """Constant continuation beyond ``t = 1``."""
        at1 = float(np.interp(0.0, grid.x, self.lv))
        return _Log(np.where(grid.x > 0, at1, self.lv), self.tz, Asymptote(), None)

    def to_sv(self, grid: LogGrid, provenance: dict) -> SvExpr:
        if self.expr is not None:
            return self.expr
        if np.all(self.lv == 0) and self.tz == Asymptote() and self.ti == Asymptote():
            return ONE
        return NumericSv(grid, self.lv, self.tz, self.ti, "numeric", provenance=provenance)


def _one(grid: LogGrid) -> _Log:
    return _Log(np.zeros(grid.n), Asymptote(), Asymptote(), ONE)


# -- outputs --------------------------------------------------------------------------------

@dataclass(frozen=True)
class HypothesisCheck:
    condition: str
    holds: bool
    diagnostic: str = ""

    def to_json(self) -> dict:
        return {"condition": self.condition, "holds": self.holds, "diagnostic": self.diagnostic}


@dataclass(frozen=True, eq=False)
class RuleOutput:
    """Result of :func:`derive`."""

    rule: RuleId
    input: RuleInput
    result: SpaceDescriptor
    eta: float
    a_sharp: SvExpr
    rho: RegularMap
    sigma: MonotoneMap
    c0: SvExpr | None
    c1: SvExpr | None
    hypotheses: tuple
    grid: LogGrid = DEFAULT_GRID
    route: str = "direct"

    @property
    def left(self) -> SpaceDescriptor:
        return self.input.left

    @property
    def right(self) -> SpaceDescriptor:
        return self.input.right

    @property
    def outer(self) -> Outer:
        return self.input.outer

    @property
    def mode(self) -> str:
        return self.input.mode

    @property
    def label(self) -> str:
        return str(self.rule.value)

    def at(self, grid: LogGrid) -> "RuleOutput":
        """The same derivation on another grid."""
        return derive(self.input, grid)

    def to_json(self) -> dict:
        return {"rule": str(self.rule), "input": self.input.to_json(), "route": self.route,
                "hypotheses": [h.to_json() for h in self.hypotheses], "eta": self.eta,
                "result": self.result.to_json(), "a_sharp": self.a_sharp.to_json(),
                "rho": {"lam": self.rho.lam}, "sigma": {"lam": self.sigma.lam, "constant": self.sigma.constant},
                "c0": None if self.c0 is None else self.c0.to_json(),
                "c1": None if self.c1 is None else self.c1.to_json(),
                "grid": self.grid.to_json()}


# -- classification and hypotheses -------------------------------------------------------------

def tag(d: SpaceDescriptor) -> str:
    """Operand pattern tag: ``A0``, ``A1``, ``S0``, ``S1``, ``S``, ``L`` or ``R``."""
    if isinstance(d, Endpoint):
        return f"A{d.side}"
    if isinstance(d, Standard):
        return "S0" if d.theta == 0 else "S1" if d.theta == 1 else "S"
    if isinstance(d, LLim):
        return "L"
    if isinstance(d, RLim):
        return "R"
    raise NoRuleMatches(f"unsupported operand {type(d).__name__}")


def match(inp: RuleInput) -> RuleId:
    """Rule covering the operand pattern of ``inp``."""
    key = (tag(inp.left), tag(inp.right))
    table = UNIT_DISPATCH if inp.mode == "unit" else DISPATCH
    rules = table.get(key)
    pos = inp.outer.position
    if rules is None or pos not in rules:
        raise NoRuleMatches(f"no {inp.mode}-mode rule for operands {key} with outer theta={inp.outer.theta:g}")
    return rules[pos]


def _inf_sym(r: float) -> str:
    return "∞" if r == INF else f"{r:g}"


def _norm_cond(expr: str, idx: str, interval: str, finite: bool = True) -> str:
    rel = "< ∞" if finite else "= ∞"
    return f"‖s^{{−1/{idx}}} {expr}‖_{{{idx},{interval}}} {rel}"


def _theta_of(d: SpaceDescriptor, side: int) -> float:
    """Exponent of an operand as it enters ``eta``."""
    if isinstance(d, Endpoint):
        return float(d.side)
    if isinstance(d, Standard):
        return d.theta
    return d.sigma


def _operand_checks(d: SpaceDescriptor, i: int) -> list:
    out = []
    if isinstance(d, Standard) and d.theta in (0.0, 1.0):
        interval = "(1,∞)" if d.theta == 0 else "(0,1)"
        chk = check_finite(d.b, d.q, "(1,inf)" if d.theta == 0 else "(0,1)")
        out.append(HypothesisCheck(_norm_cond(f"b_{i}(s)", f"q_{i}", interval), chk.finite, chk.diagnostic))
    elif isinstance(d, (LLim, RLim)):
        if d.mode == "unit" and isinstance(d, LLim):
            return out
        full_l = isinstance(d, LLim)
        interval = "(1,∞)" if full_l else "(0,1)"
        chk = check_finite(d.ratio, d.r, "(1,inf)" if full_l else "(0,1)")
        out.append(HypothesisCheck(_norm_cond(f"b_{i}(s)/a_{i}(s)", f"r_{i}", interval), chk.finite,
                                   chk.diagnostic))
    return out


def hypotheses(rule: RuleId, inp: RuleInput) -> list:
    """Evaluate every hypothesis of ``rule`` on ``inp`` (nothing is raised)."""
    L, R, o = inp.left, inp.right, inp.outer
    out = []
    tl, tr = _theta_of(L, 0), _theta_of(R, 1)
    if 0 < tl < 1 and 0 < tr < 1:
        out.append(HypothesisCheck("0 < θ_0 < θ_1 < 1", tl < tr, f"θ_0={tl:g}, θ_1={tr:g}"))
    out += _operand_checks(L, 0)
    out += _operand_checks(R, 1)
    if rule == RuleId.T31:
        chk = check_finite(R.ratio, R.r, "(0,1)")
        out.append(HypothesisCheck(_norm_cond("b_1(s)/a_1(s)", "r_1", "(0,1)", finite=False), not chk.finite,
                                   chk.diagnostic))
    a = o.a if inp.mode == "full" else unit_extension(o.a)
    if o.theta == 0:
        chk = check_finite(a, o.r, "(1,inf)")
        out.append(HypothesisCheck(_norm_cond("a(s)", "r", "(1,∞)"), chk.finite, chk.diagnostic))
    elif o.theta == 1:
        chk = check_finite(a, o.r, "(0,1)")
        out.append(HypothesisCheck(_norm_cond("a(s)", "r", "(0,1)"), chk.finite, chk.diagnostic))
    return out


def _require(checks) -> tuple:
    for c in checks:
        if not c.holds:
            raise HypothesisFailed(c.condition, c.diagnostic)
    return tuple(checks)


# -- construction ------------------------------------------------------------------------------

def _weight(d: SpaceDescriptor, grid: LogGrid) -> _Log:
    if isinstance(d, Endpoint):
        return _one(grid)
    if isinstance(d, Standard):
        if d.theta == 0:
            return _Log.of(tail_qnorm(d.b, d.q, "upper", grid), grid)
        if d.theta == 1:
            return _Log.of(tail_qnorm(d.b, d.q, "lower", grid), grid)
        return _Log.of(d.b, grid)
    a = _Log.of(d.a, grid)
    if d.mode == "unit" and isinstance(d, LLim):
        # a(t) (1 + ||s^(-1/r) b/a||_{r,(t,1)})
        ones = GridFunction.constant(grid, 1.0)
        P = partial_qnorm(ones, 0.0, d.r, d.ratio, "upper", bound=1.0)
        n = _Log(np.log1p(P.samples), Asymptote(P.tail_zero.gamma, P.tail_zero.delta), Asymptote(), None)
        return a.times(n)
    side = "upper" if isinstance(d, LLim) else "lower"
    return a.times(_Log.of(tail_qnorm(d.ratio, d.r, side, grid), grid))


def compose_with(a: SvExpr, sigma: MonotoneMap, grid: LogGrid) -> _Log:
    """``t -> a(sigma(t))`` on the grid."""
    if a.is_unit():
        return _one(grid)
    lv = np.asarray(a.logval(sigma.logval(grid.x)), dtype=float)
    return _Log(lv, a.asymptote("zero"), a.asymptote("inf"), None)


def compose_inverse(b: SvExpr, sigma: MonotoneMap, grid: LogGrid, provenance: dict | None = None) -> SvExpr:
    """``t -> b(sigma^{-1}(t))`` as a tabulated SV function."""
    if b.is_unit():
        return ONE
    lv = np.asarray(b.logval(sigma.inverse_logval(grid.x)), dtype=float)
    return NumericSv(grid, lv, b.asymptote("zero"), b.asymptote("inf"), "numeric",
                     provenance=provenance or {"op": "compose_inverse"})


def construct(rule: RuleId, inp: RuleInput, grid: LogGrid = DEFAULT_GRID, checks=()) -> RuleOutput:
    """Apply the shared construction directly, without the swap route."""
    L, R, o = inp.left, inp.right, inp.outer
    unit = inp.mode == "unit"
    theta = o.theta
    tl = 0.0 if tag(L) in ("A0", "S0") else _theta_of(L, 0)
    tr = 1.0 if tag(R) in ("A1", "S1") else _theta_of(R, 1)
    lam = tr - tl
    wl, wr = _weight(L, grid), _weight(R, grid)
    if unit:
        wl, wr = wl.frozen(grid), wr.frozen(grid)
    prov = {"rule": str(rule)}
    rho_sv = wl.times(wr, 1.0, -1.0)
    rho = RegularMap(lam, rho_sv.to_sv(grid, {**prov, "op": "rho"}))
    sigma = sigma_surrogate(lam, rho.sv, grid)
    a_outer = unit_extension(o.a, grid) if unit else o.a
    a_sig = compose_with(a_outer, sigma, grid)
    eta = (1 - theta) * tl + theta * tr

    if theta == 0 and tag(L) == "S":
        b_new = wl.times(a_sig).to_sv(grid, {**prov, "op": "b0*(a o sigma)"})
        result = LLim(L.theta, o.r, b_new, L.q, L.b, inp.mode)
        a_sharp, eta = b_new, L.theta
    elif theta == 1 and tag(R) == "S":
        b_new = wr.times(a_sig).to_sv(grid, {**prov, "op": "b1*(a o sigma)"})
        result = RLim(R.theta, o.r, b_new, R.q, R.b, inp.mode)
        a_sharp, eta = b_new, R.theta
    else:
        acc = wl.times(wr, 1 - theta, theta) if 0 < theta < 1 else (wl if theta == 0 else wr)
        acc = acc.times(a_sig)
        a_sharp = acc.to_sv(grid, {**prov, "op": "a_sharp"})
        result = Standard(eta, o.r, a_sharp, inp.mode)
    c0 = None if tag(L) in ("A0",) else wl.to_sv(grid, {**prov, "op": "c0"})
    c1 = None if tag(R) in ("A1",) else wr.to_sv(grid, {**prov, "op": "c1"})
    return RuleOutput(rule, inp, result, float(eta), a_sharp, rho, sigma, c0, c1, tuple(checks), grid)


def _mirror_output(rule: RuleId, inp: RuleInput, grid: LogGrid, checks) -> RuleOutput:
    """Derive an R-space rule through the swap of the base couple."""
    sw = inp.swap()
    base = construct(MIRROR[rule], sw, grid)
    res = swap(base.result)
    L, R, o = inp.left, inp.right, inp.outer
    tl = 0.0 if tag(L) in ("A0", "S0") else _theta_of(L, 0)
    tr = 1.0 if tag(R) in ("A1", "S1") else _theta_of(R, 1)
    if isinstance(res, Standard):
        eta = (1 - o.theta) * tl + o.theta * tr
        if eta != res.theta:
            res = dataclasses.replace(res, theta=eta)
    else:
        eta = res.sigma
    a_sharp = res.b
    rho = RegularMap(base.rho.lam, _reflect(base.rho.sv, grid, -1.0))
    sigma = sigma_surrogate(rho.lam, rho.sv, grid)
    c0 = None if base.c1 is None else base.c1.recip_arg()
    c1 = None if base.c0 is None else base.c0.recip_arg()
    return RuleOutput(rule, inp, res, float(eta), a_sharp, rho, sigma, c0, c1, tuple(checks), grid, "swap")


def _reflect(sv: SvExpr, grid: LogGrid, power: float) -> SvExpr:
    """Tabulate ``t -> sv(1/t) ** power``."""
    if sv.is_unit():
        return ONE
    lv = power * np.asarray(sv.logval(-grid.x), dtype=float)
    tz, ti = sv.asymptote("inf").scaled(power), sv.asymptote("zero").scaled(power)
    return NumericSv(grid, lv, tz, ti, "numeric", provenance={"op": "reflect", "power": power})


def derive(inp: RuleInput, grid: LogGrid = DEFAULT_GRID) -> RuleOutput:
    """Identify ``(left, right)_{theta,r,a}`` with one space of the base couple.

    Raises
    ------
    NoRuleMatches
        If the operand pattern is outside the catalogue.
    HypothesisFailed
        Naming the first violated hypothesis.
    """
    rule = match(inp)
    checks = _require(hypotheses(rule, inp))
    if rule in MIRROR:
        out = _mirror_output(rule, inp, grid, checks)
    else:
        out = construct(rule, inp, grid, checks)
    rep = validate(out.result)
    if not rep.ok:
        raise HypothesisFailed(f"result intermediacy: {rep.condition}", rep.diagnostic)
    return out
