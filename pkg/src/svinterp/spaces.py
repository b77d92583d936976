"""Interpolation-space descriptors, admissibility and norm evaluation.

Descriptors name a space built on an abstract couple ``(A0, A1)``:

* :class:`Endpoint` for ``A0`` or ``A1``;
* :class:`Standard` for ``(A0, A1)_{theta,q;b}``;
* :class:`LLim` and :class:`RLim` for the L- and R-limiting spaces, whose
  norm is an outer weighted norm of an inner partial norm of ``K`` over
  ``(0, t)`` or ``(t, inf)``.

Each carries ``mode`` ``"full"`` (integration over ``(0, inf)``) or
``"unit"`` (integration over ``(0, 1)``, for ordered couples).

Lorentz-type descriptors name rearrangement-invariant spaces on a measure
space and are evaluated from ``f*`` directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidDescriptor, TrivialSpace
from .grid import DEFAULT_GRID, LogGrid
from .kfunc import DecreasingProfile, DiscreteCouple, DiscreteSpaceNorm, k_l1_linf, maximal
from .quad import (GridFunction, QuadResult, partial_qnorm, staircase_partial_qnorm,
                   staircase_qnorm, weighted_qnorm)
from .sv import ONE, Asymptote, SvExpr, Tabulated, _decode, _encode, check_finite

INF = math.inf
MODES = ("full", "unit")


def _index(v, name: str) -> float:
    v = _decode(v) if isinstance(v, str) else float(v)
    if not (v > 0):
        raise InvalidDescriptor(f"{name} must lie in (0, inf]; got {v!r}")
    return v


def unit_param(v) -> float:
    """Canonical form of a parameter in ``[0, 1]``: rounded to 15 decimals.

    With this quantization ``1 - (1 - v)`` returns ``v`` exactly, so the couple
    swap is an exact involution on descriptors.
    """
    return round(float(v), 15)


def _sv(v) -> SvExpr:
    if isinstance(v, SvExpr):
        return v
    if isinstance(v, dict):
        return SvExpr.from_json(v)
    if isinstance(v, (int, float)):
        from .sv import Const
        return Const(float(v))
    raise InvalidDescriptor(f"expected an SV expression, got {type(v).__name__}")


def _mode(m: str) -> str:
    if m not in MODES:
        raise InvalidDescriptor(f"interval mode must be one of {MODES}; got {m!r}")
    return m


# -- space descriptors --------------------------------------------------------

class SpaceDescriptor:
    """Base class of interpolation-space descriptors."""

    kind = "abstract"
    mode: str = "full"

    def to_json(self) -> dict:
        raise NotImplementedError

    @staticmethod
    def from_json(d: dict) -> "SpaceDescriptor":
        kind = d.get("kind")
        mode = d.get("mode", "full")
        if kind == "endpoint":
            return Endpoint(int(d["side"]), mode)
        if kind == "standard":
            return Standard(float(d["theta"]), _decode(d["q"]), _sv(d.get("b", 1.0)), mode)
        if kind in ("llim", "rlim"):
            cls = LLim if kind == "llim" else RLim
            return cls(float(d["sigma"]), _decode(d["r"]), _sv(d.get("b", 1.0)), _decode(d["q"]),
                       _sv(d.get("a", 1.0)), mode)
        raise InvalidDescriptor(f"unknown space descriptor kind {kind!r}")


@dataclass(frozen=True)
class Endpoint(SpaceDescriptor):
    """One of the couple's own spaces, ``A0`` (side 0) or ``A1`` (side 1)."""

    side: int
    mode: str = "full"
    kind = "endpoint"

    def __post_init__(self):
        if self.side not in (0, 1):
            raise InvalidDescriptor("endpoint side must be 0 or 1")
        _mode(self.mode)

    def to_json(self):
        return {"kind": "endpoint", "side": self.side, "mode": self.mode}


@dataclass(frozen=True)
class Standard(SpaceDescriptor):
    """``(A0, A1)_{theta,q;b}``."""

    theta: float
    q: float
    b: SvExpr = ONE
    mode: str = "full"
    kind = "standard"

    def __post_init__(self):
        if not (0 <= self.theta <= 1):
            raise InvalidDescriptor(f"theta must lie in [0, 1]; got {self.theta!r}")
        object.__setattr__(self, "theta", unit_param(self.theta))
        object.__setattr__(self, "q", _index(self.q, "q"))
        object.__setattr__(self, "b", _sv(self.b))
        _mode(self.mode)

    def to_json(self):
        return {"kind": "standard", "theta": self.theta, "q": _encode(self.q), "b": self.b.to_json(),
                "mode": self.mode}


@dataclass(frozen=True)
class _Limiting(SpaceDescriptor):
    sigma: float
    r: float
    b: SvExpr
    q: float
    a: SvExpr = ONE
    mode: str = "full"

    def __post_init__(self):
        if not (0 < self.sigma < 1):
            raise InvalidDescriptor(f"sigma must lie in (0, 1); got {self.sigma!r}")
        object.__setattr__(self, "sigma", unit_param(self.sigma))
        object.__setattr__(self, "r", _index(self.r, "r"))
        object.__setattr__(self, "q", _index(self.q, "q"))
        object.__setattr__(self, "b", _sv(self.b))
        object.__setattr__(self, "a", _sv(self.a))
        _mode(self.mode)

    @property
    def ratio(self) -> SvExpr:
        """``b / a``, the weight of the outer norm."""
        return self.b if self.a.is_unit() else self.b / self.a

    def to_json(self):
        return {"kind": self.kind, "sigma": self.sigma, "r": _encode(self.r), "b": self.b.to_json(),
                "q": _encode(self.q), "a": self.a.to_json(), "mode": self.mode}


@dataclass(frozen=True)
class LLim(_Limiting):
    """L-limiting space: inner norm of ``K`` over ``(0, t)``."""

    kind = "llim"


@dataclass(frozen=True)
class RLim(_Limiting):
    """R-limiting space: inner norm of ``K`` over ``(t, inf)`` (or ``(t, 1)`` in unit mode)."""

    kind = "rlim"


# -- admissibility ----------------------------------------------------------------

@dataclass(frozen=True)
class AdmissibilityReport:
    """Verdict of :func:`validate` with the condition that decided it."""

    verdict: str
    condition: str
    holds: bool | None
    diagnostic: str = ""
    confidence: str = "symbolic"

    @property
    def ok(self) -> bool:
        return self.verdict == "intermediate"

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "condition": self.condition, "holds": self.holds,
                "diagnostic": self.diagnostic, "confidence": self.confidence}


def _norm_label(expr: str, r: float, interval: str) -> str:
    rr = "inf" if r == INF else f"{r:g}"
    return f"||s^(-1/{rr}) {expr}||_{{{rr},{interval}}} < inf"


def validate(d: SpaceDescriptor) -> AdmissibilityReport:
    """Decide whether ``d`` names an intermediate space.

    Standard spaces need ``0 < theta < 1``, or ``theta = 0`` with the
    ``(1, inf)`` integral of ``s^(-1/q) b`` finite, or ``theta = 1`` with the
    ``(0, 1)`` integral finite.  Limiting spaces are trivial (``{0}``) unless
    ``s^(-1/r) b/a`` is integrable at infinity (L) or at zero (R).  In unit
    mode the L-space condition disappears and the R-space condition is
    the same.
    """
    if isinstance(d, Endpoint):
        return AdmissibilityReport("intermediate", f"endpoint A{d.side}", True, "couple space")
    if isinstance(d, Standard):
        if 0 < d.theta < 1:
            return AdmissibilityReport("intermediate", "0 < theta < 1", True, f"theta={d.theta:g}")
        if d.theta == 0:
            if d.mode == "unit":
                return AdmissibilityReport("intermediate", "theta = 0 on (0,1)", True,
                                           "K(u) <= K(1)/u-bounded below 1; always between A1 and A0")
            chk = check_finite(d.b, d.q, "(1,inf)")
            cond = "theta = 0 and " + _norm_label("b(s)", d.q, "(1,inf)")
        else:
            chk = check_finite(d.b, d.q, "(0,1)")
            cond = "theta = 1 and " + _norm_label("b(s)", d.q, "(0,1)")
        verdict = "intermediate" if chk.finite else "not-intermediate"
        return AdmissibilityReport(verdict, cond, chk.finite, chk.diagnostic, chk.confidence)
    if isinstance(d, LLim):
        if d.mode == "unit":
            return AdmissibilityReport("intermediate", "L-space on (0,1)", True,
                                       "outer integral over (0,1) only; contained in the unit standard space")
        chk = check_finite(d.ratio, d.r, "(1,inf)")
        cond = _norm_label("b(s)/a(s)", d.r, "(1,inf)")
    elif isinstance(d, RLim):
        chk = check_finite(d.ratio, d.r, "(0,1)")
        cond = _norm_label("b(s)/a(s)", d.r, "(0,1)")
    else:
        raise InvalidDescriptor(f"cannot validate {type(d).__name__}")
    verdict = "intermediate" if chk.finite else "trivial"
    return AdmissibilityReport(verdict, cond, chk.finite, chk.diagnostic, chk.confidence)


def require_intermediate(d: SpaceDescriptor) -> AdmissibilityReport:
    rep = validate(d)
    if not rep.ok:
        raise InvalidDescriptor(f"{d.kind} descriptor is {rep.verdict}: {rep.condition} fails ({rep.diagnostic})")
    return rep


# -- unit-mode helpers ---------------------------------------------------------------

def unit_extension(b: SvExpr, grid: LogGrid = DEFAULT_GRID) -> Tabulated:
    """Extend ``b`` from ``(0, 1)`` to ``(0, inf)`` by freezing its value at 1."""
    x = grid.x
    lv = np.where(x > 0, float(b.logval(0.0)), b.logval(x))
    return Tabulated(grid, lv, b.asymptote("zero"), Asymptote(0.0, 0.0), b.confidence)


def extend_unit(d: SpaceDescriptor, grid: LogGrid = DEFAULT_GRID) -> SpaceDescriptor:
    """Full-mode descriptor whose SV functions are unit extensions of those in ``d``."""
    if isinstance(d, Endpoint):
        return Endpoint(d.side)
    if isinstance(d, Standard):
        return Standard(d.theta, d.q, unit_extension(d.b, grid))
    cls = LLim if isinstance(d, LLim) else RLim
    return cls(d.sigma, d.r, unit_extension(d.b, grid), d.q, unit_extension(d.a, grid))


def as_unit(d: SpaceDescriptor) -> SpaceDescriptor:
    if isinstance(d, Endpoint):
        return Endpoint(d.side, "unit")
    if isinstance(d, Standard):
        return Standard(d.theta, d.q, d.b, "unit")
    return type(d)(d.sigma, d.r, d.b, d.q, d.a, "unit")


# -- norms ----------------------------------------------------------------------------

def interp_norm(d: SpaceDescriptor, K: GridFunction, details: bool = False, check: bool = True):
    """Norm of ``f`` in the space ``d`` from its K-functional ``K``.

    Parameters
    ----------
    d : SpaceDescriptor
    K : GridFunction
        Samples of ``t -> K(t, f)`` (possibly batched).
    details : bool
        Also return the fraction contributed by analytic tails.
    check : bool
        Validate ``d`` first (raises :class:`InvalidDescriptor`).
    """
    if check:
        require_intermediate(d)
    unit = d.mode == "unit"
    span = (0.0, 1.0) if unit else (0.0, INF)
    if isinstance(d, Endpoint):
        if d.side == 0:
            return weighted_qnorm(K, 0.0, INF, ONE, span, details)
        return weighted_qnorm(K, 1.0, INF, ONE, span, details)
    if isinstance(d, Standard):
        return weighted_qnorm(K, d.theta, d.q, d.b, span, details)
    if isinstance(d, LLim):
        P = partial_qnorm(K, d.sigma, d.q, d.a, "lower")
    else:
        P = partial_qnorm(K, d.sigma, d.q, d.a, "upper", bound=1.0 if unit else None)
    return weighted_qnorm(P, 0.0, d.r, d.ratio, span, details)


def profile_norm(d: SpaceDescriptor, fstar: DecreasingProfile, grid: LogGrid = DEFAULT_GRID,
                 details: bool = False):
    """``interp_norm`` on the couple ``(L1, L_inf)`` for the rearrangement ``fstar``."""
    return interp_norm(d, k_l1_linf(fstar, grid), details)


def discrete_norm(d: SpaceDescriptor, couple: DiscreteCouple, **kw) -> DiscreteSpaceNorm:
    """Norm evaluator of ``d`` on a weighted-l1 discrete couple (full mode only)."""
    if d.mode != "full":
        raise InvalidDescriptor("discrete couples support full-mode descriptors only")
    require_intermediate(d)
    if isinstance(d, Endpoint):
        return DiscreteSpaceNorm(couple, f"endpoint{d.side}", **kw)
    if isinstance(d, Standard):
        return DiscreteSpaceNorm(couple, "standard", d.theta, d.q, d.b, **kw)
    kind = "llim" if isinstance(d, LLim) else "rlim"
    return DiscreteSpaceNorm(couple, kind, d.sigma, d.q, d.b, d.r, d.a, **kw)


def swap(d: SpaceDescriptor) -> SpaceDescriptor:
    """Translate ``d`` from the couple ``(A0, A1)`` to ``(A1, A0)``."""
    if d.mode != "full":
        raise InvalidDescriptor("swap is defined for full-mode descriptors only")
    if isinstance(d, Endpoint):
        return Endpoint(1 - d.side)
    if isinstance(d, Standard):
        return Standard(1 - d.theta, d.q, d.b.recip_arg())
    if isinstance(d, LLim):
        return RLim(1 - d.sigma, d.r, d.b.recip_arg(), d.q, d.a.recip_arg())
    if isinstance(d, RLim):
        return LLim(1 - d.sigma, d.r, d.b.recip_arg(), d.q, d.a.recip_arg())
    raise InvalidDescriptor(f"cannot swap {type(d).__name__}")


# -- Lorentz-type spaces -----------------------------------------------------------------

class LorentzDescriptor:
    """Base class of rearrangement-invariant space descriptors."""

    kind = "abstract"

    def canonical(self) -> "LorentzDescriptor":
        return self

    def to_json(self) -> dict:
        raise NotImplementedError

    @staticmethod
    def from_json(d: dict) -> "LorentzDescriptor":
        kind = d.get("kind")
        if kind == "karamata":
            return Karamata(float(d["p"]), _decode(d["q"]), _sv(d.get("b", 1.0)))
        if kind in ("ltype", "rtype"):
            cls = LType if kind == "ltype" else RType
            return cls(float(d["p"]), _decode(d["r"]), _sv(d.get("b", 1.0)), _decode(d["q"]),
                       _sv(d.get("a", 1.0)))
        if kind in ("small", "grand"):
            cls = Small if kind == "small" else Grand
            return cls(float(d["p"]), _decode(d["q"]), _decode(d["r"]), _sv(d.get("b", 1.0)))
        raise InvalidDescriptor(f"unknown Lorentz descriptor kind {kind!r}")


def _p(v) -> float:
    v = float(v)
    if not (0 < v < INF):
        raise InvalidDescriptor(f"p must lie in (0, inf); got {v!r}")
    return v


@dataclass(frozen=True)
class Karamata(LorentzDescriptor):
    """``||t^(1/p-1/q) b(t) f*(t)||_q``."""

    p: float
    q: float
    b: SvExpr = ONE
    kind = "karamata"

    def __post_init__(self):
        object.__setattr__(self, "p", _p(self.p))
        object.__setattr__(self, "q", _index(self.q, "q"))
        object.__setattr__(self, "b", _sv(self.b))

    def to_json(self):
        return {"kind": "karamata", "p": self.p, "q": _encode(self.q), "b": self.b.to_json()}


@dataclass(frozen=True)
class _LorentzLimiting(LorentzDescriptor):
    p: float
    r: float
    b: SvExpr
    q: float
    a: SvExpr = ONE

    def __post_init__(self):
        object.__setattr__(self, "p", _p(self.p))
        object.__setattr__(self, "r", _index(self.r, "r"))
        object.__setattr__(self, "q", _index(self.q, "q"))
        object.__setattr__(self, "b", _sv(self.b))
        object.__setattr__(self, "a", _sv(self.a))

    @property
    def ratio(self) -> SvExpr:
        return self.b if self.a.is_unit() else self.b / self.a

    def to_json(self):
        return {"kind": self.kind, "p": self.p, "r": _encode(self.r), "b": self.b.to_json(),
                "q": _encode(self.q), "a": self.a.to_json()}


@dataclass(frozen=True)
class LType(_LorentzLimiting):
    """``||t^(-1/r) (b/a)(t) ||u^(1/p-1/q) a f*||_{q,(0,t)}||_r``."""

    kind = "ltype"


@dataclass(frozen=True)
class RType(_LorentzLimiting):
    """``||t^(-1/r) (b/a)(t) ||u^(1/p-1/q) a f**||_{q,(t,inf)}||_r``."""

    kind = "rtype"


@dataclass(frozen=True)
class Small(LorentzDescriptor):
    """Small Lorentz space, the L-type space with ``a = 1``."""

    p: float
    q: float
    r: float
    b: SvExpr = ONE
    kind = "small"

    def __post_init__(self):
        object.__setattr__(self, "p", _p(self.p))
        object.__setattr__(self, "q", _index(self.q, "q"))
        object.__setattr__(self, "r", _index(self.r, "r"))
        object.__setattr__(self, "b", _sv(self.b))

    def canonical(self) -> LType:
        return LType(self.p, self.r, self.b, self.q, ONE)

    def to_json(self):
        return {"kind": "small", "p": self.p, "q": _encode(self.q), "r": _encode(self.r), "b": self.b.to_json()}


@dataclass(frozen=True)
class Grand(LorentzDescriptor):
    """Grand Lorentz space, the R-type space with ``a = 1``."""

    p: float
    q: float
    r: float
    b: SvExpr = ONE
    kind = "grand"

    def __post_init__(self):
        object.__setattr__(self, "p", _p(self.p))
        object.__setattr__(self, "q", _index(self.q, "q"))
        object.__setattr__(self, "r", _index(self.r, "r"))
        object.__setattr__(self, "b", _sv(self.b))

    def canonical(self) -> RType:
        return RType(self.p, self.r, self.b, self.q, ONE)

    def to_json(self):
        return {"kind": "grand", "p": self.p, "q": _encode(self.q), "r": _encode(self.r), "b": self.b.to_json()}


def lorentz_norm(d: LorentzDescriptor, fstar: DecreasingProfile, grid: LogGrid = DEFAULT_GRID,
                 details: bool = False):
    """Norm of ``f`` in a Lorentz-type space, computed from ``f*``.

    L-type and small spaces integrate ``f*`` cell by cell; R-type and grand
    spaces use ``f** = K/t``.

    Raises
    ------
    TrivialSpace
        If the nontriviality integral of ``s^(-1/r) b/a`` diverges.
    """
    c = d.canonical()
    if isinstance(c, Karamata):
        val = staircase_qnorm(fstar.staircase(grid), -1.0 / c.p, c.q, c.b)
        return QuadResult(float(val), 0.0) if details else float(val)
    if isinstance(c, LType):
        chk = check_finite(c.ratio, c.r, "(1,inf)")
        if not chk.finite:
            raise TrivialSpace(f"L-type space is trivial: {chk.diagnostic}")
        P = staircase_partial_qnorm(fstar.staircase(grid), -1.0 / c.p, c.q, c.a, "lower")
    elif isinstance(c, RType):
        chk = check_finite(c.ratio, c.r, "(0,1)")
        if not chk.finite:
            raise TrivialSpace(f"R-type space is trivial: {chk.diagnostic}")
        P = partial_qnorm(maximal(fstar, grid), -1.0 / c.p, c.q, c.a, "upper")
    else:
        raise InvalidDescriptor(f"unknown Lorentz descriptor {type(d).__name__}")
    return weighted_qnorm(P, 0.0, c.r, c.ratio, (0.0, INF), details)


def to_couple(d: LorentzDescriptor) -> SpaceDescriptor:
    """Descriptor on ``(L1, L_inf)`` with ``theta = 1 - 1/p``."""
    if d.p <= 1:
        raise InvalidDescriptor(f"p = {d.p:g} gives theta = 1 - 1/p outside (0, 1)")
    theta = 1.0 - 1.0 / d.p
    c = d.canonical()
    if isinstance(c, Karamata):
        return Standard(theta, c.q, c.b)
    if isinstance(c, LType):
        return LLim(theta, c.r, c.b, c.q, c.a)
    return RLim(theta, c.r, c.b, c.q, c.a)


def from_couple(d: SpaceDescriptor) -> LorentzDescriptor:
    """Inverse of :func:`to_couple`, naming small/grand spaces when ``a = 1``."""
    if d.mode != "full":
        raise InvalidDescriptor("only full-mode descriptors map to Lorentz spaces")
    if isinstance(d, Standard):
        if not 0 < d.theta < 1:
            raise InvalidDescriptor("endpoint standard spaces have no Lorentz form here")
        return Karamata(1.0 / (1.0 - d.theta), d.q, d.b)
    if isinstance(d, (LLim, RLim)):
        p = 1.0 / (1.0 - d.sigma)
        if d.a.is_unit():
            return (Small if isinstance(d, LLim) else Grand)(p, d.q, d.r, d.b)
        return (LType if isinstance(d, LLim) else RType)(p, d.r, d.b, d.q, d.a)
    raise InvalidDescriptor(f"{type(d).__name__} has no Lorentz form")
