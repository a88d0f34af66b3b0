"""
The limit statements, watched converging
========================================

Everything the test battery asserts at full size, shown here at friendly
sizes: variance rates, the side-dependent stopped means, the vanishing
scaled mean, and the drift-correction envelope.
"""

from urnlab.stats import (
    check_drift_bound,
    check_mean_at_tau,
    check_var_limit,
    stopped_mean_limit,
    variance_rate_limit,
)
from urnlab.urn import UrnSpec
from urnlab.weights import constant_weights, perturbed_power, specific_power

# ---- variance rates ----------------------------------------------------
print("Var(D_n)/n -> 1/(2 alpha + 1):")
for alpha in (0.5, 1.0, 2.0):
    v = check_var_limit(UrnSpec("zero", perturbed_power(alpha)), (256, 1024, 4096))
    print(
        f"  alpha={alpha}: observed {v.observed:.5f}, limit {variance_rate_limit(alpha):.5f},"
        f" pass={v.passed}"
    )

# ---- stopped means -----------------------------------------------------
# at alpha = 1 the three sides separate cleanly: +1/6, -5/6, -1/3
print()
print("E[D at tau_n] by side (alpha = 1):")
for side in ("plus", "minus", "zero"):
    limit_v, scaled_v = check_mean_at_tau(side, specific_power(1.0), (128, 512, 2048))
    means = limit_v.details["means"]
    print(
        f"  {side:5s}: {means[0]:+.4f} -> {means[1]:+.4f} -> {means[2]:+.4f}"
        f"   limit {stopped_mean_limit(side, 1.0):+.4f}"
        f"   scaled-mean decreasing: {scaled_v.passed}"
    )

# ---- the drift envelope -------------------------------------------------
# the one-step drift of D is -alpha D/i plus a remainder eps_i; the
# remainder is O((D^2 + i)/i^2), checked as a per-decade sup that must not
# grow.  Constant weights have no drift at all, and their sup reads 0.
print()
print("per-decade sup of |eps_i| i^2/(D^2 + i):")
for wf, name in (
    (specific_power(1.0), "specific alpha=1"),
    (perturbed_power(1.0, 0.3), "perturbed B=0.3"),
    (constant_weights(), "constant"),
):
    v = check_drift_bound(UrnSpec("zero", wf))
    sups = ", ".join(f"{s:.3g}" for s in v.details["decade_sups"])
    print(f"  {name:17s}: [{sups}]  spread {v.observed:.3f}")
