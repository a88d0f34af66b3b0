"""
Two-color urns with count-dependent weights
===========================================

A draw is red with probability r/(b + r), where b and r are weights
evaluated at arguments derived from the current counts.  The three "sides"
differ only in which parity each color reads:

    plus :  b = w(2 blues + 1),  r = w(2 reds)
    minus:  b = w(2 blues),      r = w(2 reds + 1)
    zero :  b = w(2 blues),      r = w(2 reds)

The discrepancy D = reds - blues is the walking quantity everything else
watches.
"""

import numpy as np

from urnlab.rng import RngStream
from urnlab.urn import (
    UrnSpec,
    UrnState,
    draw_sequential,
    mean_increment,
    step_prob_red,
    stop_after_draws,
)
from urnlab.weights import specific_power

wf = specific_power(1.0)

print("P(red) from a few states, by side:")
for state in (UrnState(0, 0), UrnState(3, 1), UrnState(1, 3)):
    row = "  ".join(
        f"{side}: {step_prob_red(UrnSpec(side, wf), state):.4f}" for side in ("plus", "minus", "zero")
    )
    print(f"  blues={state.blues} reds={state.reds}:  {row}")

# reinforcement in reverse: the heavier color is the one drawn LESS so
# far, because weights decay in the count.  The expected step therefore
# pushes D back toward 0.
spec = UrnSpec("zero", wf)
for d in (-6, 0, 6):
    s = UrnState(10 - d // 2, 10 + d - d // 2)
    print(f"  D = {s.discrepancy:+d}: mean one-step drift {mean_increment(spec, s):+.4f}")

# sample one trajectory and watch the discrepancy oscillate
traj = draw_sequential(spec, RngStream(2, 0), stop_after_draws(30))
print()
print("one 30-draw trajectory (zero side, alpha = 1):")
print("  D_t =", traj.discrepancy().tolist())

# the two-draw law is computable by hand: P(D_2 = 0) = 3/4 for this family
hits = 0
replicas = 20000
for i in range(replicas):
    t = draw_sequential(spec, RngStream(7, i), stop_after_draws(2))
    hits += t.final.blues == t.final.reds
print()
print(f"P(D_2 = 0): empirical {hits / replicas:.4f} over {replicas} replicas, exact 0.75")
