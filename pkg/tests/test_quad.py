"""Weighted quasi-norm quadrature against hand-integrable cases."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import exp1

from svinterp.errors import NonConvergent
from svinterp.grid import LogGrid
from svinterp.quad import GridFunction, PowerTail, Staircase, partial_qnorm, staircase_qnorm, weighted_qnorm
from svinterp.sv import ONE, LogPow

INF = math.inf


def closed_form_cases(grid: LogGrid):
    """Twelve integrands with elementary antiderivatives: ``(label, g, theta, q, b, interval, exact)``."""
    t = grid.t
    kmin = GridFunction(grid, np.minimum(t, 1.0), PowerTail(1.0), PowerTail(0.0))
    one = GridFunction.constant(grid, 1.0)
    root2 = GridFunction(grid, 2 * np.sqrt(t), PowerTail(0.5), PowerTail(0.5))
    root = GridFunction(grid, np.sqrt(t), PowerTail(0.5), PowerTail(0.5))
    frac = GridFunction(grid, t / (1 + t), PowerTail(1.0), PowerTail(0.0))
    return [
        # int_0^1 u du/u + int_1^inf u^-1 du/u = 2
        ("min(u,1) theta=1/2 q=2", kmin, 0.5, 2, ONE, (0, INF), math.sqrt(2)),
        ("min(u,1) theta=1/2 q=1", kmin, 0.5, 1, ONE, (0, INF), 4.0),
        ("min(u,1) theta=1/4 q=2", kmin, 0.25, 2, ONE, (0, INF), math.sqrt(2 / 3 + 2)),
        ("min(u,1) theta=1/2 q=4", kmin, 0.5, 4, ONE, (0, INF), 1.0),
        ("min(u,1) theta=1/2 q=1/2", kmin, 0.5, 0.5, ONE, (0, INF), 64.0),
        # int_0^inf e^-y (1+y)^2 dy = 5 on each side
        ("min(u,1) theta=1/2 q=2 b=log", kmin, 0.5, 2, LogPow(1), (0, INF), math.sqrt(10)),
        # int_0^inf e^-y (1+y)^-2 dy = 1 - e E1(1) on each side
        ("min(u,1) theta=1/2 q=2 b=1/log", kmin, 0.5, 2, LogPow(-1), (0, INF),
         math.sqrt(2 * (1 - math.e * exp1(1)))),
        ("u/(1+u) theta=1/2 q=2", frac, 0.5, 2, ONE, (0, INF), 1.0),
        ("1 on (1,inf) q=1 b=log^-2", one, 0.0, 1, LogPow(-2), (1, INF), 1.0),
        ("1 on (1,inf) q=2 b=1/log", one, 0.0, 2, LogPow(-1), (1, INF), 1.0),
        ("sqrt(u) on (1,e) q=2", root, 0.0, 2, ONE, (1, math.e), math.sqrt(math.e - 1)),
        # sup of e^(-y/2)(1+y) is 2/sqrt(e) at y = 1
        ("min(u,1) theta=1/2 sup b=log", kmin, 0.5, INF, LogPow(1), (0, INF), 2 / math.sqrt(math.e)),
        ("1 theta=0 sup", one, 0.0, INF, ONE, (0, INF), 1.0),
        ("2 sqrt(u) theta=1/2 sup", root2, 0.5, INF, ONE, (0, INF), 2.0),
    ]


CASES = [c[0] for c in closed_form_cases(LogGrid())]


@pytest.mark.parametrize("label", CASES)
def test_closed_forms_default_grid(label):
    case = {c[0]: c for c in closed_form_cases(LogGrid())}[label]
    _, g, theta, q, b, interval, exact = case
    assert weighted_qnorm(g, theta, q, b, interval) == pytest.approx(exact, rel=1e-3)


@pytest.mark.parametrize("label", CASES)
def test_closed_forms_double_resolution(label):
    case = {c[0]: c for c in closed_form_cases(LogGrid(1e-8, 1e8, 64))}[label]
    _, g, theta, q, b, interval, exact = case
    assert weighted_qnorm(g, theta, q, b, interval) == pytest.approx(exact, rel=2.5e-4)


def test_second_order_convergence():
    errs = []
    for ppd in (16, 32, 64):
        _, g, theta, q, b, iv, exact = closed_form_cases(LogGrid(1e-8, 1e8, ppd))[0]
        errs.append(abs(weighted_qnorm(g, theta, q, b, iv) / exact - 1))
    # each doubling divides the error by about four (or it is already at round-off)
    for coarse, fine in zip(errs, errs[1:]):
        assert fine <= coarse / 3 or fine < 1e-9


def test_details_report_tail_fraction(grid):
    g = GridFunction(grid, np.minimum(grid.t, 1.0), PowerTail(1.0), PowerTail(0.0))
    res = weighted_qnorm(g, 0.5, 2, ONE, details=True)
    # the tails beyond 1e-8 and 1e8 each carry 1e-8 of the total 2
    assert res.tail_fraction == pytest.approx(1e-8, rel=1e-2)
    narrow = LogGrid(1e-2, 1e2, 32)
    g2 = GridFunction(narrow, np.minimum(narrow.t, 1.0), PowerTail(1.0), PowerTail(0.0))
    res2 = weighted_qnorm(g2, 0.5, 2, ONE, details=True)
    assert res2.value == pytest.approx(math.sqrt(2), rel=1e-3)
    assert res2.tail_fraction == pytest.approx(1e-2, rel=1e-2)


def test_nonconvergent_tail(grid):
    one = GridFunction.constant(grid, 1.0)
    with pytest.raises(NonConvergent):
        weighted_qnorm(one, 0.0, 2, ONE)


def test_batched_rows_match_single(grid, rng):
    rows = rng.uniform(0.1, 2.0, size=(4, 1)) * np.minimum(grid.t, 1.0)[None, :]
    g = GridFunction(grid, rows, PowerTail(1.0), PowerTail(0.0))
    batch = weighted_qnorm(g, 0.5, 2, LogPow(-1))
    single = [weighted_qnorm(g.row(i), 0.5, 2, LogPow(-1)) for i in range(4)]
    assert np.allclose(batch, np.array(single), rtol=1e-13, atol=0)


# -- partial norms -----------------------------------------------------------------

def test_partial_examples(grid):
    g = GridFunction(grid, np.minimum(grid.t, 1.0), PowerTail(1.0), PowerTail(0.0))
    lower = partial_qnorm(g, 0.5, 2, ONE, "lower")
    upper = partial_qnorm(g, 0.5, 2, ONE, "upper")
    assert lower(1.0) == pytest.approx(1.0, rel=1e-3)
    assert upper(1.0) == pytest.approx(1.0, rel=1e-3)
    zero = partial_qnorm(GridFunction.constant(grid, 0.0), 0.5, 2, ONE, "lower")
    assert np.all(zero.samples == 0)


@pytest.mark.parametrize("q", [1, 2, 3.5, INF])
@pytest.mark.parametrize("b", [ONE, LogPow(1), LogPow(-1)])
def test_partial_monotone_and_consistent(q, b, grid):
    g = GridFunction(grid, np.minimum(grid.t, 1.0), PowerTail(1.0), PowerTail(0.0))
    lower = partial_qnorm(g, 0.5, q, b, "lower").samples
    upper = partial_qnorm(g, 0.5, q, b, "upper").samples
    assert np.all(np.diff(lower) >= -1e-12 * lower[1:])
    assert np.all(np.diff(upper) <= 1e-12 * upper[:-1])
    # prefix at tmax and suffix at tmin equal the norms over (0, tmax) and (tmin, inf)
    assert lower[-1] == pytest.approx(weighted_qnorm(g, 0.5, q, b, (0, grid.tmax)), rel=1e-9)
    assert upper[0] == pytest.approx(weighted_qnorm(g, 0.5, q, b, (grid.tmin, INF)), rel=1e-9)


def test_partial_bounded_upper(grid):
    g = GridFunction(grid, np.minimum(grid.t, 1.0), PowerTail(1.0), PowerTail(0.0))
    P = partial_qnorm(g, 0.5, 2, ONE, "upper", bound=1.0)
    # (int_t^1 u du/u)^(1/2) = sqrt(1 - t) for t < 1
    t = grid.t
    sel = t < 0.5
    assert np.allclose(P.samples[sel], np.sqrt(1 - t[sel]), rtol=1e-3)
    assert np.all(P.samples[t > 1.0] == 0)


# -- Hardy inequalities ------------------------------------------------------------------

HGRID = LogGrid(1e-4, 1e4, 16)


def _random_staircase(rng, grid):
    cells = np.zeros(grid.n - 1)
    for _ in range(rng.integers(1, 5)):
        i = int(rng.integers(0, grid.n - 2))
        j = int(rng.integers(i + 1, min(i + 40, grid.n - 1) + 1))
        cells[i:j] += 10 ** rng.uniform(-2, 2)
    return Staircase(grid, 0.0, cells, 0.0)


def hardy_sides(stair: Staircase, nu: float, P: float, b, upper: bool = False):
    """``||t^(nu-1/P) b int g||_P`` and ``||t^(nu+1-1/P) b g||_P`` with Lebesgue measure.

    The first is ``weighted_qnorm(G, -nu, P, b)`` and the second
    ``staircase_qnorm(g, -(nu+1), P, b)`` in the ``du/u`` convention.
    """
    grid = stair.grid
    G = stair.antiderivative()
    if upper:
        G = G[-1] - G
        Gf = GridFunction(grid, np.maximum(G, 0.0), PowerTail(0.0), PowerTail(-1.0))
    else:
        Gf = GridFunction(grid, G, PowerTail(1.0), PowerTail(0.0))
    return weighted_qnorm(Gf, -nu, P, b), staircase_qnorm(stair, -(nu + 1), P, b)


def test_hardy_anchor_ln2():
    grid = LogGrid(1e-8, 1e8, 32)
    t = grid.t
    G = GridFunction(grid, np.clip(t - 1, 0.0, 1.0), PowerTail(1.0), PowerTail(0.0))
    lhs = weighted_qnorm(G, 1.0, 1, ONE)
    rhs = weighted_qnorm(GridFunction.constant(grid, 1.0), 0.0, 1, ONE, (1.0, 2.0))
    assert lhs == pytest.approx(math.log(2), rel=1e-3)
    assert rhs == pytest.approx(math.log(2), rel=1e-3)


HARDY_B = {"1": ONE, "log": LogPow(1), "1/log": LogPow(-1)}
# a single constant per (nu, P, b); for b = 1 the sharp constant is 1/|nu|
HARDY_C = {"1": lambda nu: 1 / abs(nu) * 1.01, "log": lambda nu: 4 / abs(nu), "1/log": lambda nu: 4 / abs(nu)}


def hardy_ratios(nu, P, bname, n=100, seed=0, upper=False):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        lhs, rhs = hardy_sides(_random_staircase(rng, HGRID), nu, P, HARDY_B[bname], upper)
        out.append(lhs / rhs)
    return np.array(out)


@pytest.mark.parametrize("bname", list(HARDY_B))
@pytest.mark.parametrize("P", [1, 2, INF])
@pytest.mark.parametrize("nu", [-0.5, -1.0])
def test_hardy_lower(nu, P, bname):
    r = hardy_ratios(nu, P, bname)
    assert np.all(np.isfinite(r)) and r.max() <= HARDY_C[bname](nu)


@pytest.mark.parametrize("bname", list(HARDY_B))
@pytest.mark.parametrize("P", [1, 2, INF])
@pytest.mark.parametrize("nu", [0.5, 1.0])
def test_hardy_upper(nu, P, bname):
    r = hardy_ratios(nu, P, bname, n=40, seed=1, upper=True)
    assert np.all(np.isfinite(r)) and r.max() <= HARDY_C[bname](nu)


@given(st.floats(0.05, 0.95), st.sampled_from([1.0, 2.0, 4.0]), st.floats(0.1, 10))
def test_homogeneity(theta, q, c):
    grid = LogGrid(1e-6, 1e6, 16)
    g = GridFunction(grid, np.minimum(grid.t, 1.0), PowerTail(1.0), PowerTail(0.0))
    gc = GridFunction(grid, c * np.minimum(grid.t, 1.0), PowerTail(1.0), PowerTail(0.0))
    assert weighted_qnorm(gc, theta, q, ONE) == pytest.approx(c * weighted_qnorm(g, theta, q, ONE), rel=1e-12)
