"""Rule engine: derivations, hypotheses, symmetry, verification and Lorentz forms."""

from __future__ import annotations

import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from svinterp.errors import HypothesisFailed, InvalidDescriptor, NoRuleMatches
from svinterp.grid import DEFAULT_GRID
from svinterp.reiteration import (COROLLARY_RULES, MIRROR, PROPERTY_RULES, REITERATION_RULES, Outer, RuleId,
                                  RuleInput, check_property, default_instance, default_lorentz_instance, derive,
                                  hypotheses, identify, match, run_chain, sigma_surrogate, specialize_lorentz,
                                  verify_equivalence)
from svinterp.reiteration.verify import default_family
from svinterp.spaces import (Endpoint, Grand, Karamata, LLim, RLim, Small, Standard, swap,
                             validate)
from svinterp.sv import ONE, LogPow

from strategies import sv_trees

T_SAMPLES = np.array([1e-6, 1e-3, 0.05, 0.5, 0.9, 1.0, 1.7, 20.0, 1e3, 1e6])


def _upper_sup_dec(t):
    """Closed form of ``sup_{s>t} (1+|ln s|)^-1``."""
    t = np.asarray(t, dtype=float)
    return np.where(t >= 1, 1 / (1 + np.log(np.maximum(t, 1.0))), 1.0)


def _upper_l1_dec2(t):
    """Closed form of ``int_t^inf (1+|ln s|)^-2 ds/s``."""
    t = np.asarray(t, dtype=float)
    lt = np.abs(np.log(t))
    return np.where(t >= 1, 1 / (1 + lt), 2 - 1 / (1 + lt))


# -- derive: worked examples ----------------------------------------------------------------

def test_t7_all_constants():
    out = derive(default_instance("T7"))
    assert out.rule == RuleId.T7
    assert isinstance(out.result, Standard)
    assert out.eta == 0.5 and out.result.theta == 0.5 and out.result.q == 2
    assert np.allclose(out.a_sharp(T_SAMPLES), 1.0, rtol=1e-12)


def test_t11i_a_sharp_against_quadrature():
    out = derive(default_instance("T11i"))
    assert out.rule == RuleId.T11i and out.eta == 0.5
    # independent oracle: brute-force supremum on a dense grid, then the square root
    s = np.logspace(-9, 9, 200001)
    vals = 1 / (1 + np.abs(np.log(s)))
    suffix_max = np.maximum.accumulate(vals[::-1])[::-1]
    c0 = np.interp(np.log(T_SAMPLES), np.log(s), suffix_max)
    assert np.allclose(c0, _upper_sup_dec(T_SAMPLES), rtol=1e-4)
    assert np.allclose(out.a_sharp(T_SAMPLES), np.sqrt(c0), rtol=1e-3)


def test_t8i_a_sharp_closed_form():
    out = derive(default_instance("T8i"))
    ref = _upper_l1_dec2(T_SAMPLES) ** 0.25
    assert np.allclose(out.a_sharp(T_SAMPLES), ref, rtol=1e-3)


def test_t7_log_power_closed_form():
    inp = RuleInput(Standard(0.2, 2, LogPow(2.0)), Standard(0.6, 3, LogPow(-1.0)), Outer(0.5, 2))
    out = derive(inp)
    assert out.eta == pytest.approx(0.4, abs=1e-15)
    assert np.allclose(out.a_sharp(T_SAMPLES), (1 + np.abs(np.log(T_SAMPLES))) ** 0.5, rtol=1e-3)


def test_t25_divergent_ratio_fails():
    inp = RuleInput(LLim(0.25, 2, ONE, 2, ONE), default_instance("T25").right, Outer(0.5, 2))
    with pytest.raises(HypothesisFailed) as exc:
        derive(inp)
    assert "b_0(s)/a_0(s)" in str(exc.value) and "r_0" in str(exc.value) and "(1,∞)" in str(exc.value)
    assert not all(c.holds for c in hypotheses(RuleId.T25, inp))


def test_no_rule_matches():
    with pytest.raises(NoRuleMatches):
        derive(RuleInput(Endpoint(1), Endpoint(0), Outer(0.5, 2)))


@pytest.mark.parametrize("rule", REITERATION_RULES, ids=lambda r: r.value)
def test_default_instances_dispatch(rule):
    inp = default_instance(rule)
    assert match(inp) == rule
    out = derive(inp)
    assert out.rule == rule
    assert 0 <= out.eta <= 1
    assert validate(out.result).ok
    rv = out.a_sharp(T_SAMPLES)
    assert np.all(np.isfinite(rv)) and np.all(rv > 0)
    assert np.all(out.sigma(T_SAMPLES) > 0)


def test_rule_input_json_round_trip():
    for rule in REITERATION_RULES:
        inp = default_instance(rule)
        back = RuleInput.from_json(inp.to_json())
        assert back.to_json() == inp.to_json()


# -- symmetry -----------------------------------------------------------------------------------

@pytest.mark.parametrize("rule", list(MIRROR), ids=lambda r: r.value)
def test_mirror_is_swap_conjugate(rule):
    inp = default_instance(rule)
    out = derive(inp)
    base = derive(inp.swap())
    assert base.rule == MIRROR[rule]
    img = swap(base.result)
    assert type(img) is type(out.result)
    a, b = out.result.to_json(), img.to_json()
    for key in a:
        if key not in ("b", "a"):
            assert a[key] == b[key], key
    x = DEFAULT_GRID.x
    assert np.array_equal(out.result.b.logval(x), img.b.logval(x))
    if isinstance(out.result, (LLim, RLim)):
        assert np.array_equal(out.result.a.logval(x), img.a.logval(x))


# -- eta arithmetic -----------------------------------------------------------------------------

@settings(max_examples=40)
@given(th0=st.floats(0.02, 0.49), gap=st.floats(0.02, 0.49), theta=st.floats(0.01, 0.99))
def test_eta_exact_and_between(th0, gap, theta):
    th1 = th0 + gap
    out = derive(RuleInput(Standard(th0, 2), Standard(th1, 2), Outer(theta, 2)))
    L, R, o = out.left.theta, out.right.theta, out.outer.theta
    assert out.eta == pytest.approx((1 - o) * L + o * R, rel=0, abs=4 * np.finfo(float).eps)
    assert L < out.eta < R


# -- sigma surrogate ---------------------------------------------------------------------------

def test_sigma_identity():
    s = sigma_surrogate(1.0, ONE)
    assert np.allclose(s(T_SAMPLES), T_SAMPLES, rtol=1e-12)
    assert s.constant == pytest.approx(1.0)


def test_sigma_round_trip_within_cell():
    s = sigma_surrogate(0.5, LogPow(1.0))
    cell = 10 ** (1 / DEFAULT_GRID.points_per_decade)
    back = s.inverse(s(T_SAMPLES))
    assert np.all(back / T_SAMPLES <= cell) and np.all(T_SAMPLES / back <= cell)


def test_sigma_decreasing_factor():
    s = sigma_surrogate(1.0, LogPow(-1.0))
    assert np.all(np.diff(s.log_values) > 0)
    rho = T_SAMPLES / (1 + np.abs(np.log(T_SAMPLES)))
    r = s(T_SAMPLES) / rho
    assert np.all(r >= 1 - 1e-12) and np.all(r <= s.constant * (1 + 1e-12))
    assert s.constant < 3


def test_sigma_rejects_nonpositive_lambda():
    with pytest.raises(ValueError):
        sigma_surrogate(0.0, ONE)


@settings(max_examples=40)
@given(lam=st.floats(0.1, 2.0), a=sv_trees)
def test_sigma_surrogate_invariants(lam, a):
    s = sigma_surrogate(lam, a)
    x = DEFAULT_GRID.x
    L = lam * x + a.logval(x)
    assert np.all(np.diff(s.log_values) > 0)
    assert np.all(s.log_values >= L - 1e-12)
    assert np.all(s.log_values - L <= math.log(s.constant) + 1e-9)
    assert np.allclose(s.inverse_logval(s.logval(x)), x, atol=1e-9)
    assert s(1e-30) < s(1e-20) and s(1e30) > s(1e20)


# -- verification ------------------------------------------------------------------------------

def test_zero_member_excluded():
    from svinterp.kfunc import DecreasingProfile
    fam = default_family(n=3) + [("zero", DecreasingProfile.zero())]
    rep = verify_equivalence(derive(default_instance("T7")), family=fam, refine=False)
    assert len(rep.records) == 3
    assert any(fid == "zero" for fid, _ in rep.skipped)


def test_t7_spread_small():
    rep = verify_equivalence(derive(default_instance("T7")), refine=False)
    assert len(rep.records) == 20 and rep.spread <= 10


def test_t25_spread_and_drift():
    rep = verify_equivalence(derive(default_instance("T25")))
    assert rep.spread <= 100 and rep.drift <= 0.1


@pytest.mark.parametrize("rule", ["T7", "T11i", "T25", "T27"])
def test_homogeneity(rule):
    out = derive(default_instance(rule))
    s1 = verify_equivalence(out, refine=False).spread
    s2 = verify_equivalence(out, refine=False, scale=2.0).spread
    assert abs(s2 / s1 - 1) <= 0.05


def test_wrong_result_detected():
    out = derive(default_instance("T7"))
    good = verify_equivalence(out, refine=False).spread
    for theta in (0.25, 0.75):
        bad = verify_equivalence(dataclasses.replace(out, result=Standard(theta, 2)), refine=False).spread
        assert bad > 20 and bad > 10 * good


# -- properties and chains ---------------------------------------------------------------------

@pytest.mark.parametrize("rule", PROPERTY_RULES, ids=lambda r: r.value)
def test_properties(rule):
    rep = check_property(rule)
    assert rep.passed, rep.verdict


def test_p5_trivial():
    first, second = identify("P5", RLim(0.5, 2, ONE, 2, ONE, "unit"))
    assert second is None and validate(first).verdict == "trivial"


@pytest.mark.parametrize("name", ["T11i", "T25"])
def test_chain(name):
    ch = run_chain(default_instance(name))
    assert ch.eta_equal and ch.steps[-1].eta == ch.direct.eta
    assert ch.passed(100.0)
    assert [s.rule for s in ch.steps][1] == RuleId.T8i


# -- Lorentz corollaries -----------------------------------------------------------------------

def test_c37_index_and_weight():
    left, right, outer = default_lorentz_instance("C37")
    out = specialize_lorentz(left, right, outer)
    assert out.rule == RuleId.C37
    assert out.p == pytest.approx(8 / 3, rel=1e-14)
    assert isinstance(out.result, Karamata) and out.result.p == pytest.approx(8 / 3, rel=1e-14)
    assert np.allclose(out.result.b(T_SAMPLES), np.sqrt(_upper_l1_dec2(T_SAMPLES)), rtol=1e-3)


def test_c47_grand_with_composed_weight():
    left, right, outer = default_lorentz_instance("C47")
    out = specialize_lorentz(left, right, outer)
    assert out.rule == RuleId.C47
    assert isinstance(out.result, Grand) and out.result.p == 4.0
    ref = outer.a(out.base.sigma(T_SAMPLES))
    assert np.allclose(out.result.b(T_SAMPLES), ref, rtol=2e-3)


def test_p0_one_rejected():
    with pytest.raises(InvalidDescriptor):
        specialize_lorentz(Small(1, 2, 1, LogPow(-2.0)), Karamata(4, 2), Outer(0.5, 2))


@pytest.mark.parametrize("rule", COROLLARY_RULES, ids=lambda r: r.value)
def test_corollary_dispatch(rule):
    out = specialize_lorentz(*default_lorentz_instance(rule))
    assert out.rule == rule
    left, right, outer = default_lorentz_instance(rule)
    inv = lambda d: 1.0 if isinstance(d, Endpoint) and d.side == 0 else (0.0 if isinstance(d, Endpoint) else 1 / d.p)
    ip = (1 - outer.theta) * inv(left) + outer.theta * inv(right)
    assert out.p == pytest.approx(1 / ip if ip else math.inf)
