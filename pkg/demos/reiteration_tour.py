"""A short tour: norms, one reiteration step, its numerical check and a Lorentz form.

Run with ``python3 demos/reiteration_tour.py``; takes a few seconds.
"""

from __future__ import annotations

import numpy as np

from svinterp import holmstedt as hm
from svinterp.kfunc import DecreasingProfile, k_l1_linf
from svinterp.reiteration import (Outer, RuleInput, default_instance, default_lorentz_instance, derive, run_chain,
                                  specialize_lorentz, verify_equivalence)
from svinterp.spaces import LLim, Standard, interp_norm
from svinterp.sv import ONE, LogLogPow, LogPow


def main() -> None:
    # 1. the norm of the indicator of (0, 1) in the space with theta = 1/2, q = 2 is sqrt(2)
    chi = DecreasingProfile.indicator()
    print("norm of chi_(0,1):", interp_norm(Standard(0.5, 2), k_l1_linf(chi)))

    # 2. reiterate between an L-limiting space and a standard space
    left = LLim(0.25, np.inf, LogPow(-1.0), 2, ONE)
    inp = RuleInput(left, Standard(0.75, 2, LogLogPow(1.0)), Outer(0.5, 2))
    out = derive(inp)
    t = np.array([1e-4, 1e-2, 1.0, 1e2, 1e4])
    print(f"rule {out.rule.value}: eta = {out.eta}, result kind = {out.result.kind}")
    print("  a#(t) at", t, "->", np.round(out.a_sharp(t), 4))
    for h in out.hypotheses:
        print(f"  hypothesis {h.condition}: {'holds' if h.holds else 'fails'}")

    # 3. check the identification numerically on 20 staircase rearrangements
    rep = verify_equivalence(out)
    print(f"  ratio spread {rep.spread:.3g}, on the doubled grid {rep.refined_spread:.3g}")

    # 4. the same result through the three-step chain
    ch = run_chain(default_instance("T25"))
    print(f"chain {ch.name}: steps {[s.rule.value for s in ch.steps]}, eta equal {ch.eta_equal}, "
          f"agreement spread {ch.agreement.spread:.3g}")

    # 5. a Lorentz-space form: small(p=2) with Karamata(p=4) at theta = 1/2 gives p = 8/3
    c = specialize_lorentz(*default_lorentz_instance("C37"))
    print(f"corollary {c.rule.value}: p = {c.p:.6f}, result kind = {c.result.kind}")

    # 6. a Holmstedt-type formula on a random 16-dimensional couple
    inst = hm.default_instance("T14", seed=0)
    r = hm.verify(inst, hm.default_family(16, 0, per_shape=1))
    print(f"Holmstedt {inst.theorem}: ratio range [{r.min:.3g}, {r.max:.3g}] over {len(r.records)} (t, f) pairs")


if __name__ == "__main__":
    main()
