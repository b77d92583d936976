"""Space descriptors: admissibility, norms, swap and Lorentz translations."""

import json
import math

import numpy as np
import pytest
from hypothesis import given
from scipy.integrate import cumulative_trapezoid

from strategies import ADMISSIBILITY_TABLE, descriptors
from svinterp.errors import InvalidDescriptor, TrivialSpace
from svinterp.grid import LogGrid
from svinterp.kfunc import DecreasingProfile, k_l1_linf
from svinterp.reiteration.verify import default_family, unit_family
from svinterp.spaces import (Endpoint, Grand, Karamata, LLim, LType, RLim, RType, Small, SpaceDescriptor,
                             Standard, as_unit, from_couple, interp_norm, lorentz_norm, swap, to_couple, validate)
from svinterp.sv import ONE, LogPow

INF = math.inf
CHI = DecreasingProfile.indicator()


# -- admissibility ----------------------------------------------------------------------

def test_validate_examples():
    assert validate(Standard(0, 2, ONE)).verdict == "not-intermediate"
    assert validate(Standard(0.5, 2, ONE)).verdict == "intermediate"
    rep = validate(RLim(0.5, 2, ONE, 2, ONE, "unit"))
    assert rep.verdict == "trivial" and "(0,1)" in rep.condition


@pytest.mark.parametrize("label,d,verdict", ADMISSIBILITY_TABLE, ids=[c[0] for c in ADMISSIBILITY_TABLE])
def test_admissibility_table(label, d, verdict):
    rep = validate(d)
    assert rep.verdict == verdict
    assert rep.diagnostic


def test_invalid_parameters():
    with pytest.raises(InvalidDescriptor):
        Standard(1.5, 2)
    with pytest.raises(InvalidDescriptor):
        LLim(0.0, 2, ONE, 2)
    with pytest.raises(InvalidDescriptor):
        Standard(0.5, -1)
    with pytest.raises(InvalidDescriptor):
        interp_norm(Standard(0, 2, ONE), k_l1_linf(CHI))


# -- norms ---------------------------------------------------------------------------------

def test_interp_norm_examples(grid):
    K = k_l1_linf(CHI, grid)
    assert interp_norm(Standard(0.5, 2, ONE), K) == pytest.approx(math.sqrt(2), rel=1e-3)
    assert interp_norm(Standard(0, INF, ONE), K) == pytest.approx(1.0, rel=1e-12)


def _brute_llim_chi(ppd: int = 320) -> float:
    """Two-level sum for LLim(1/2, inf, log^-1, 2, 1) at K = min(t, 1), independent of the package."""
    x = np.linspace(-18 * math.log(10), 18 * math.log(10), int(36 * ppd) + 1)
    t = np.exp(x)
    inner_sq = (t ** -0.5 * np.minimum(t, 1.0)) ** 2
    # prefix integral in du/u = dx, plus the exact head below the grid
    P = np.sqrt(cumulative_trapezoid(inner_sq, x, initial=0.0) + t[0])
    return float(np.max(P / (1 + np.abs(x))))


def test_interp_norm_llim_brute_force(grid):
    d = LLim(0.5, INF, LogPow(-1), 2, ONE)
    v = interp_norm(d, k_l1_linf(CHI, grid))
    assert v == pytest.approx(_brute_llim_chi(), rel=1e-3)


def test_lorentz_norm_examples(grid):
    assert lorentz_norm(Karamata(2, 2, ONE), CHI, grid) == pytest.approx(1.0, rel=1e-3)
    assert lorentz_norm(Grand(2, 2, INF, ONE), CHI, grid) == pytest.approx(math.sqrt(2), rel=1e-3)
    assert lorentz_norm(Small(2, 2, INF, ONE), CHI, grid) == pytest.approx(1.0, rel=1e-3)
    with pytest.raises(TrivialSpace):
        lorentz_norm(Small(2, 2, 2, ONE), CHI, grid)
    with pytest.raises(TrivialSpace):
        lorentz_norm(Grand(2, 2, 2, ONE), CHI, grid)


def test_r_identity_on_family(grid):
    for b in (ONE, LogPow(-2)):
        d = RType(2.5, 1 if b != ONE else INF, b, 2, LogPow(0.5))
        c = to_couple(d)
        for _, f in default_family(8, seed=3, grid=grid):
            assert lorentz_norm(d, f, grid) == pytest.approx(interp_norm(c, k_l1_linf(f, grid)), rel=1e-3)


def test_l_equivalence_bounded(grid):
    d = LType(2, 1, LogPow(-2), 2, ONE)
    c = to_couple(d)
    ratios = [lorentz_norm(d, f, grid) / interp_norm(c, k_l1_linf(f, grid))
              for _, f in default_family(20, grid=grid)]
    assert max(ratios) / min(ratios) <= 10


def test_unit_mode_properties(grid):
    fam = unit_family(20, grid=grid)
    # full and unit standard norms agree up to a constant for f* supported in (0, 1]
    d = Standard(0.5, 2, LogPow(1))
    r = [interp_norm(d, k_l1_linf(f, grid)) / interp_norm(as_unit(d), k_l1_linf(f, grid)) for _, f in fam]
    assert max(r) / min(r) <= 10
    # unit standard with theta = 0 is equivalent to the L1 norm
    d0 = Standard(0, 2, LogPow(-1), "unit")
    r0 = [interp_norm(d0, k_l1_linf(f, grid)) / f.k(1e12) for _, f in fam]
    assert max(r0) / min(r0) <= 10


# -- swap and Lorentz translations --------------------------------------------------------------

def test_swap_examples():
    s = swap(Standard(0.25, 2, LogPow(1)))
    assert isinstance(s, Standard) and s.theta == 0.75
    t = np.array([1e-3, 0.5, 2.0, 1e4])
    assert np.allclose(s.b(t), LogPow(1)(t))
    d = LLim(0.3, 2, LogPow(-1), 3, LogPow(0.5))
    r = swap(d)
    assert isinstance(r, RLim) and r.sigma == pytest.approx(0.7) and (r.r, r.q) == (2, 3)
    assert np.allclose(r.a(t), LogPow(0.5)(1 / t))
    with pytest.raises(InvalidDescriptor):
        swap(Standard(0.5, 2, ONE, "unit"))
    assert swap(Endpoint(0)) == Endpoint(1)


@given(descriptors)
def test_swap_involution(d):
    assert swap(swap(d)) == d


@given(descriptors)
def test_descriptor_json_round_trip(d):
    assert SpaceDescriptor.from_json(json.loads(json.dumps(d.to_json()))) == d


def test_to_couple_examples():
    assert to_couple(Karamata(2, 2, ONE)) == Standard(0.5, 2, ONE)
    assert to_couple(Small(2, 3, INF, LogPow(-1))) == LLim(0.5, INF, LogPow(-1), 3, ONE)
    assert to_couple(Grand(2, 3, INF, LogPow(-1))) == RLim(0.5, INF, LogPow(-1), 3, ONE)
    with pytest.raises(InvalidDescriptor):
        to_couple(Karamata(1, 2, ONE))
    assert from_couple(to_couple(Grand(4, 2, 1, LogPow(-2)))) == Grand(4, 2, 1, LogPow(-2))


def test_small_grand_structural_identities():
    assert Small(3, 2, 1, LogPow(-2)).canonical() == LType(3, 1, LogPow(-2), 2, ONE)
    assert Grand(3, 2, 1, LogPow(-2)).canonical() == RType(3, 1, LogPow(-2), 2, ONE)
