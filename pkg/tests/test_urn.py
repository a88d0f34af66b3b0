"""Urn chain: transition law, side conventions, samplers, and drift."""

from __future__ import annotations

import math

import numpy as np
import pytest

from urnlab.rng import RngStream
from urnlab.urn import (
    DrawCapExceeded,
    UrnSpec,
    UrnState,
    discrepancy_at,
    draw_rubin,
    draw_sequential,
    drift_residual,
    mean_increment,
    rubin_sequence_counts,
    sequence_probs,
    step_prob_red,
    stop_after_draws,
    stop_at_blues,
    stop_at_reds,
)
from urnlab.weights import constant_weights, perturbed_power, specific_power, table_weights, weight

SIDES = ("plus", "minus", "zero")


# ---------------------------------------------------------------------------
# transition law


def test_side_conventions_against_hand_weights():
    # distinct table values expose exactly which argument each side reads
    wf = table_weights((2.0, 3.0, 5.0, 7.0, 11.0, 13.0, 17.0), 1.0, 0.0)
    state = UrnState(blues=1, reds=2)

    def expect(side, blue_w, red_w):
        p = step_prob_red(UrnSpec(side, wf), state)
        assert p == pytest.approx(red_w / (blue_w + red_w), rel=1e-12)

    expect("plus", weight(wf, 3), weight(wf, 4))   # b(i) = w(2i+1), r(j) = w(2j)
    expect("minus", weight(wf, 2), weight(wf, 5))  # b(i) = w(2i),   r(j) = w(2j+1)
    expect("zero", weight(wf, 2), weight(wf, 4))   # b(i) = w(2i),   r(j) = w(2j)


@pytest.mark.parametrize("side", SIDES)
def test_first_draw_is_fair_for_symmetric_start(side):
    # all sides read w at argument 0 or 1 on both colors only when the
    # weights there agree; constant weights make every draw fair
    assert step_prob_red(UrnSpec(side, constant_weights(8)), UrnState(0, 0)) == 0.5


def test_mean_increment_is_expected_step():
    spec = UrnSpec("zero", specific_power(1.0))
    s = UrnState(3, 5)
    p = step_prob_red(spec, s)
    assert mean_increment(spec, s) == pytest.approx(p - (1 - p), rel=1e-12)


def test_extreme_states_stay_finite():
    # a 10^9-color imbalance drives the weight ratio past float range unless
    # the odds are evaluated in log space; saturating to 0 or 1 is fine,
    # NaN or a crash is not
    spec = UrnSpec("plus", specific_power(2.0))
    hi = step_prob_red(spec, UrnState(10**9, 3))
    lo = step_prob_red(spec, UrnState(3, 10**9))
    assert 0.0 <= lo < 0.01 and 0.99 < hi <= 1.0
    assert math.isfinite(mean_increment(spec, UrnState(3, 10**9)))
    assert math.isfinite(mean_increment(spec, UrnState(10**9, 3)))


# ---------------------------------------------------------------------------
# path law


@pytest.mark.parametrize("side", SIDES)
@pytest.mark.parametrize("alpha", (0.5, 1.0, 2.0))
def test_sequence_probs_sum_to_one(side, alpha):
    probs = sequence_probs(UrnSpec(side, specific_power(alpha)), 8)
    assert probs.shape == (256,)
    assert np.all(probs > 0)
    assert math.fsum(probs.tolist()) == pytest.approx(1.0, abs=1e-14)


def test_sequence_probs_match_stepwise_products():
    spec = UrnSpec("minus", perturbed_power(1.0, 0.3))
    probs = sequence_probs(spec, 5)
    for word in (0b00000, 0b10110, 0b11111, 0b01001):
        blues = reds = 0
        prod = 1.0
        for t in range(5):
            p_red = step_prob_red(spec, UrnState(blues, reds))
            if (word >> t) & 1:
                prod *= p_red
                reds += 1
            else:
                prod *= 1.0 - p_red
                blues += 1
        assert probs[word] == pytest.approx(prod, rel=1e-12)


def test_two_draw_law_for_harmonic_weights():
    # w(n) = 1/(n+1), zero start: P(D_2 = 0) = 3/4 by direct enumeration
    probs = sequence_probs(UrnSpec("zero", specific_power(1.0)), 2)
    mixed = probs[0b01] + probs[0b10]
    assert mixed == pytest.approx(0.75, abs=1e-15)


# ---------------------------------------------------------------------------
# samplers


def test_sequential_trajectory_bookkeeping():
    spec = UrnSpec("zero", specific_power(1.0))
    traj = draw_sequential(spec, RngStream(42, 0), stop_after_draws(200))
    assert traj.full
    assert traj.draws == 200
    assert np.array_equal(traj.blues + traj.reds, traj.draw_index)
    assert np.array_equal(np.abs(np.diff(traj.discrepancy())), np.ones(200, dtype=np.int64))
    # tau_blue[k] is the draw on which the (k+1)-th blue lands
    for k in range(int(traj.blues[-1])):
        i = int(traj.tau_blue[k])
        assert traj.blues[i] == k + 1 and traj.blues[i - 1] == k
    assert discrepancy_at(traj, 100) == traj.discrepancy()[100]


def test_stop_rules_stop_where_they_say():
    spec = UrnSpec("plus", perturbed_power(0.5))
    rng = RngStream(1, 5)
    t1 = draw_sequential(spec, rng, stop_at_blues(30))
    assert t1.final.blues == 30
    t2 = draw_sequential(spec, RngStream(1, 6), stop_at_reds(30))
    assert t2.final.reds == 30


def test_draw_cap_is_enforced():
    spec = UrnSpec("zero", specific_power(1.0))
    with pytest.raises(DrawCapExceeded):
        draw_sequential(spec, RngStream(3, 0), stop_at_blues(10**6), cap=50)


def test_rubin_construction_matches_sequential_law():
    # same stopping law under both constructions: chi-square on 16 four-draw
    # words, well beyond the 1e-3 significance used for the full-size check
    spec = UrnSpec("zero", specific_power(1.0))
    probs = sequence_probs(spec, 4)
    counts, ties = rubin_sequence_counts(spec, 4, 40000, RngStream(2024, 1))
    assert counts.sum() == 40000
    assert ties == 0
    from urnlab.stats import chi_square_gof

    _, dof, p = chi_square_gof(counts, probs)
    assert dof == 15
    assert p > 1e-3


def test_rubin_trajectory_respects_stop_rule():
    spec = UrnSpec("minus", specific_power(2.0))
    traj = draw_rubin(spec, RngStream(7, 9), stop_after_draws(64))
    assert traj.draws == 64
    assert traj.final.blues + traj.final.reds == 64


# ---------------------------------------------------------------------------
# drift


def test_drift_residual_shrinks_like_inverse_square():
    # along states with D ~ sqrt(i) the bound (D^2 + i)/i^2 ~ 2/i, so the
    # normalized residual stays O(1) while the raw one dies off
    spec = UrnSpec("plus", specific_power(1.0))
    raw, normalized = [], []
    for i in (100, 10000):
        d = int(math.isqrt(i))
        s = UrnState((i - d) // 2, (i + d) // 2)
        eps = abs(drift_residual(spec, s))
        raw.append(eps)
        normalized.append(eps * i * i / (d * d + i))
    assert raw[1] < raw[0] / 10
    assert max(normalized) < 10.0


def test_drift_residual_rejects_empty_urn():
    with pytest.raises(ValueError):
        drift_residual(UrnSpec("zero", specific_power(1.0)), UrnState(0, 0))


def test_constant_weights_have_no_drift_at_all():
    spec = UrnSpec("plus", constant_weights(16))
    for state in (UrnState(1, 0), UrnState(10, 3), UrnState(250, 261)):
        assert mean_increment(spec, state) == 0.0
        assert drift_residual(spec, state) == 0.0
