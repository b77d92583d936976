"""K-functionals: rearrangement, (L1, Linf) closed form, discrete couples, convex oracle."""

import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import minimize

from svinterp.errors import NonConvexIndices
from svinterp.grid import LogGrid
from svinterp.kfunc import (DecreasingProfile, DiscreteCouple, WeightedLpNorm, k_l1_linf, k_oracle,
                            k_oracle_values, k_weighted_l1, maximal, rearrange)

SMALL = LogGrid(1e-4, 1e4, 8)

pieces = st.lists(st.tuples(st.floats(0, 100), st.floats(0.01, 10)), min_size=0, max_size=8)


@st.composite
def profiles(draw):
    n = draw(st.integers(1, 6))
    widths = np.array(draw(st.lists(st.floats(1e-3, 1e2), min_size=n, max_size=n)))
    vals = np.sort(np.array(draw(st.lists(st.floats(1e-3, 1e3), min_size=n, max_size=n))))[::-1]
    tail = draw(st.sampled_from([0.0, 0.5])) * vals[-1]
    return DecreasingProfile(np.cumsum(widths), vals, tail)


# -- rearrangement ---------------------------------------------------------------

def test_rearrange_examples():
    f = rearrange([(1, 2), (3, 1)])
    assert np.allclose(f.breakpoints, [1, 3]) and np.allclose(f.values, [3, 1])
    assert rearrange([(3, 1), (1, 2)]) == f
    assert rearrange([(0, 1), (0, 5)]).is_zero()
    with pytest.raises(ValueError):
        rearrange([(-1, 1)])


@given(pieces)
def test_rearrange_preserves_distribution_and_is_idempotent(ps):
    f = rearrange(ps)
    assert rearrange(f.pieces()) == f
    total = sum(v * m for v, m in ps)
    assert f.k(1e9) == pytest.approx(total, rel=1e-9, abs=1e-12)
    assert np.all(np.diff(f.values) <= 0)


# -- (L1, Linf) ----------------------------------------------------------------------

def test_k_l1_linf_examples(grid):
    K = k_l1_linf(DecreasingProfile.indicator(), grid)
    assert np.allclose(K.samples, np.minimum(grid.t, 1.0), rtol=1e-14)
    f = DecreasingProfile.power_log(0.5, grid=grid)
    K2 = k_l1_linf(f, grid)
    assert np.allclose(K2.samples, 2 * np.sqrt(grid.t), rtol=1e-9)
    assert np.all(k_l1_linf(DecreasingProfile.zero(), grid).samples == 0)


def test_maximal_examples(grid):
    t = grid.t
    assert np.allclose(maximal(DecreasingProfile.indicator(), grid).samples, np.where(t <= 1, 1.0, 1 / t))
    assert np.allclose(maximal(DecreasingProfile.constant(2.5), grid).samples, 2.5)
    assert np.allclose(maximal(DecreasingProfile.power_log(0.5, grid=grid), grid).samples, 2 / np.sqrt(t),
                       rtol=1e-9)


@given(profiles())
def test_k_profile_invariants(f):
    K = k_l1_linf(f, SMALL).samples
    t = SMALL.t
    assert np.all(np.diff(K) >= -1e-12 * K[1:])
    assert np.all(np.diff(K / t) <= 1e-12 * (K / t)[:-1])
    # midpoint concavity in t on each triple of consecutive nodes
    mid = f.k(0.5 * (t[:-1] + t[1:]))
    assert np.all(mid >= 0.5 * (K[:-1] + K[1:]) * (1 - 1e-6))


@given(profiles())
def test_maximal_identity(f):
    assert np.allclose(SMALL.t * maximal(f, SMALL).samples, k_l1_linf(f, SMALL).samples, rtol=1e-14)


@given(profiles())
def test_ordered_flattening(f):
    # restrict the support to (0, 1]: then K(u) = ||f||_1 for u >= 1 with constant 1
    cut = f.breakpoints <= 1.0
    if not cut.any():
        return
    g = DecreasingProfile(f.breakpoints[cut], f.values[cut], 0.0)
    t = SMALL.t[SMALL.t >= 1]
    assert np.allclose(g.k(t), g.k(1e12), rtol=1e-14)


@given(profiles())
def test_profile_json_round_trip(f):
    assert DecreasingProfile.from_json(json.loads(json.dumps(f.to_json()))) == f


# -- weighted l1 -----------------------------------------------------------------------

def brute_force_k(w0, w1, f, t):
    """Independent minimization of ``||g||_{w0} + t ||f - g||_{w1}`` over g."""
    obj = lambda g: float(np.sum(w0 * np.abs(g)) + t * np.sum(w1 * np.abs(f - g)))  # noqa: E731
    best = math.inf
    for start in (np.zeros_like(f), f, 0.5 * f):
        res = minimize(obj, start, method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 20000})
        best = min(best, res.fun)
    # coordinatewise search over the segment [0, f_i] as a second opinion
    grid = np.linspace(0, 1, 2001)
    seg = sum(min(np.min(w0[i] * np.abs(grid * f[i]) + t * w1[i] * np.abs(f[i] - grid * f[i])), math.inf)
              for i in range(f.size))
    return min(best, seg)


def test_weighted_l1_examples():
    c = DiscreteCouple([1.0], [1.0])
    for t in (0.1, 1.0, 3.0):
        assert k_weighted_l1(c, [1.0], t) == min(1.0, t)
    c2 = DiscreteCouple([1.0, 1.0], [1.0, 4.0])
    assert k_weighted_l1(c2, [0.0, 0.0], 0.5) == 0.0
    val = k_weighted_l1(c2, [1.0, 1.0], 0.5)
    # min(1, 1/2) + min(1, 2) = 3/2
    assert val == pytest.approx(brute_force_k(c2.w0, c2.w1, np.array([1.0, 1.0]), 0.5), abs=1e-6)
    assert val == 1.5


def test_weighted_l1_decomposition_and_errors(rng):
    c = DiscreteCouple.random(6, rng)
    f = rng.normal(size=6)
    val, f0, f1 = k_weighted_l1(c, f, 0.7, decomposition=True)
    assert np.allclose(f0 + f1, f)
    assert val == pytest.approx(c.endpoint(0).value(f0) + 0.7 * c.endpoint(1).value(f1), rel=1e-14)
    with pytest.raises(ValueError):
        k_weighted_l1(c, np.ones(5), 1.0)
    with pytest.raises(ValueError):
        DiscreteCouple(np.ones(65), np.ones(65))


@given(st.integers(1, 12), st.integers(0, 2**31 - 1), st.floats(1e-3, 1e3))
def test_swap_identity(n, seed, t):
    rng = np.random.default_rng(seed)
    c = DiscreteCouple.random(n, rng)
    f = rng.normal(size=n)
    assert k_weighted_l1(c, f, t) == pytest.approx(t * k_weighted_l1(c.swap(), f, 1 / t), rel=1e-13)


# -- convex oracle -------------------------------------------------------------------------

def test_oracle_unit_weights(rng):
    f = rng.normal(size=5)
    ts = np.array([0.01, 0.5, 1.0, 2.0, 100.0])
    vals, gaps = k_oracle_values(WeightedLpNorm(np.ones(5)), WeightedLpNorm(np.ones(5)), f, ts)
    assert np.allclose(vals, np.minimum(1, ts) * np.sum(np.abs(f)), rtol=1e-4)
    assert np.all(gaps <= 1e-4)


def test_oracle_zero():
    vals, _ = k_oracle_values(WeightedLpNorm(np.ones(3)), WeightedLpNorm(np.ones(3)), np.zeros(3), [1.0, 2.0])
    assert np.all(vals == 0)


def test_oracle_matches_closed_form(rng):
    for _ in range(5):
        c = DiscreteCouple.random(10, rng)
        f = rng.normal(size=10)
        ts = 10 ** np.linspace(-3, 3, 7)
        vals, _ = k_oracle_values(WeightedLpNorm(c.w0), WeightedLpNorm(c.w1), f, ts)
        ref = np.array([k_weighted_l1(c, f, t) for t in ts])
        assert np.allclose(vals, ref, rtol=1e-4)


def test_oracle_profile_invariants(rng):
    c = DiscreteCouple.random(8, rng)
    f = rng.normal(size=8)
    g = LogGrid(1e-3, 1e3, 4)
    K = k_oracle(WeightedLpNorm(c.w0, 2.0), WeightedLpNorm(c.w1, 1.0), f, g)
    s = K.samples
    assert np.all(np.diff(s) >= -1e-6 * s[1:])
    assert np.all(np.diff(s / g.t) <= 1e-6 * (s / g.t)[:-1])
    # concave in t: chords lie below the curve
    t = g.t
    for i in range(1, len(t) - 1):
        lam = (t[i] - t[i - 1]) / (t[i + 1] - t[i - 1])
        assert s[i] >= ((1 - lam) * s[i - 1] + lam * s[i + 1]) * (1 - 1e-6)


def test_oracle_rejects_quasi_norms():
    with pytest.raises(NonConvexIndices):
        k_oracle_values(WeightedLpNorm(np.ones(2), 0.5), WeightedLpNorm(np.ones(2)), np.ones(2), [1.0])
