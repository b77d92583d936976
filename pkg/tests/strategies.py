"""Hypothesis strategies and hand-built tables shared by several test modules."""

import math

from hypothesis import strategies as st

from svinterp.spaces import LLim, RLim, Standard
from svinterp.sv import ONE, BrokenLogPow, ComposeRegular, Const, LogLogPow, LogPow, Pow, Prod, RecipArg

INF = math.inf

exponents = st.floats(-3, 3, allow_nan=False).map(lambda v: round(v, 3))
leaves = st.one_of(
    st.floats(0.1, 10).map(Const),
    exponents.map(LogPow),
    exponents.map(LogLogPow),
    st.tuples(exponents, exponents).map(lambda p: BrokenLogPow(*p)),
)


def _extend(children):
    return st.one_of(
        st.tuples(children, children).map(lambda p: Prod(*p)),
        st.tuples(children, st.floats(-2, 2).map(lambda v: round(v, 3))).map(lambda p: Pow(*p)),
        children.map(RecipArg),
        st.tuples(children, st.floats(0.25, 2), children).map(lambda p: ComposeRegular(p[0], p[1], p[2])),
    )


sv_trees = st.recursive(leaves, _extend, max_leaves=5)
indices = st.one_of(st.floats(0.5, 8).map(lambda v: round(v, 3)), st.just(INF))
open_unit = st.floats(0.01, 0.99).map(lambda v: round(v, 4))

descriptors = st.one_of(
    st.builds(Standard, st.floats(0, 1).map(lambda v: round(v, 4)), indices, sv_trees),
    st.builds(LLim, open_unit, indices, sv_trees, indices, sv_trees),
    st.builds(RLim, open_unit, indices, sv_trees, indices, sv_trees),
)

# Admissibility table: (label, descriptor, expected verdict), built from the
# three standard-space conditions and the limiting-space triviality conditions.
ADMISSIBILITY_TABLE = [
    ("standard 0<theta<1", Standard(0.5, 2, ONE), "intermediate"),
    ("standard theta=0, b=1, q=2", Standard(0.0, 2, ONE), "not-intermediate"),
    ("standard theta=0, b=log^-1, q=2", Standard(0.0, 2, LogPow(-1)), "intermediate"),
    ("standard theta=0, b=1, q=inf", Standard(0.0, INF, ONE), "intermediate"),
    ("standard theta=0, b=log^-1, q=1 (borderline)", Standard(0.0, 1, LogPow(-1)), "not-intermediate"),
    ("standard theta=1, b=1, q=2", Standard(1.0, 2, ONE), "not-intermediate"),
    ("standard theta=1, b=log^-2, q=1", Standard(1.0, 1, LogPow(-2)), "intermediate"),
    ("L-space b/a=1, r=2", LLim(0.5, 2, ONE, 2, ONE), "trivial"),
    ("L-space b/a=log^-1, r=2", LLim(0.5, 2, LogPow(-1), 2, ONE), "intermediate"),
    ("R-space b/a=log^-1, r=inf", RLim(0.5, INF, LogPow(-1), 2, ONE), "intermediate"),
    ("R-space b/a=log, r=2 (a=log^2)", RLim(0.5, 2, LogPow(1), 2, LogPow(2)), "intermediate"),
    ("R-space on (0,1), b/a=1, r=2", RLim(0.5, 2, ONE, 2, ONE, "unit"), "trivial"),
]
