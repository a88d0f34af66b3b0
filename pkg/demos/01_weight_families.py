"""
The three weight families
=========================

A weight function w assigns a positive weight to every count n; the chains
in this package always draw a color with probability proportional to the
weight of that color's current count-derived argument.  Reciprocals grow
like n^alpha (1 + 2B/n + ...), and (alpha, B) is all the limit theorems
ever see.
"""

import numpy as np

from urnlab.weights import (
    constant_weights,
    inv_weight_array,
    nonincreasing_from,
    odd_even_series,
    odd_even_series_target,
    perturbed_power,
    specific_power,
    table_weights,
    weight_array,
)

n = np.arange(0, 10)

# the exact power family: w(n) = (n+1)^(-alpha).  Expanding (n+1)^alpha
# shows its perturbation constant is forced to B = alpha/2.
spec = specific_power(1.0)
print("specific,  alpha=1:   w(0..9) =", np.round(weight_array(spec, n), 4))
print("           forced B =", spec.bee)

# the minimal family with a FREE B: 1/w(n) = n^alpha + 2B n^(alpha-1)
pert = perturbed_power(1.0, 0.3)
print("perturbed, B=0.3:     1/w(1..5) =", inv_weight_array(pert, np.arange(1, 6)))

# negative B dips the raw reciprocal below zero at small n; the clamp
# keeps w positive there and switches itself off for n > -4B
dip = perturbed_power(1.0, -2.0)
print("perturbed, B=-2:      w(0..9) =", np.round(weight_array(dip, n), 4))
print("           monotone from n =", nonincreasing_from(dip))

# an arbitrary head spliced onto a power tail
tab = table_weights((5.0, 0.1, 2.0), alpha=2.0)
print("table [5, .1, 2]:     w(0..5) =", np.round(weight_array(tab, np.arange(6)), 4))

# constant weights: the simple random walk in urn clothing
srw = constant_weights()
print("constant:             w(0), w(10^9) =", weight_array(srw, np.array([0, 10**9])))

# the alternating series sum_i (1/w(2i+1) - 1/w(2i)) measures the odd/even
# weight imbalance; it grows like 2^(alpha-1) n^alpha, which is what makes
# the stopped chain's mean converge
print()
print("series ratio to 2^(a-1) n^a at n = 10^5:")
for alpha in (0.5, 1.0, 2.0):
    wf = perturbed_power(alpha, 0.3)
    r = odd_even_series(wf, 10**5) / odd_even_series_target(wf, 10**5)
    print(f"  alpha={alpha}: {r:.6f}")
