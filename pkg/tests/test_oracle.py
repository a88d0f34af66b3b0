"""Exact lattice laws: forward DP, absorption DP, and the stopped identity."""

from __future__ import annotations

import math

import numpy as np
import pytest

from urnlab.oracle import (
    OracleCapExceeded,
    exact_after_n,
    exact_at_tau_blue,
    exact_tail,
    toth_identity_check,
)
from urnlab.stats import sample_tau_and_fixed
from urnlab.urn import UrnSpec, sequence_probs
from urnlab.weights import constant_weights, perturbed_power, specific_power

SIDES = ("plus", "minus", "zero")


# ---------------------------------------------------------------------------
# forward DP


@pytest.mark.parametrize("side", SIDES)
def test_after_n_matches_path_enumeration(side):
    # the DP must agree with brute force over all 2^9 draw sequences
    spec = UrnSpec(side, perturbed_power(1.0, 0.3))
    n = 9
    probs = sequence_probs(spec, n)
    brute = {}
    for word in range(2**n):
        reds = bin(word).count("1")
        brute[reds] = brute.get(reds, 0.0) + probs[word]
    dist = exact_after_n(spec, n)
    assert dist.kind == "after_n"
    assert dist.residual == 0.0
    for b, r, p in zip(dist.blues, dist.reds, dist.prob):
        assert b + r == n
        assert p == pytest.approx(brute[int(r)], rel=1e-12)


def test_after_n_conserves_mass_at_depth():
    dist = exact_after_n(UrnSpec("zero", specific_power(2.0)), 4096)
    assert math.fsum(dist.prob.tolist()) == pytest.approx(1.0, abs=1e-13)
    assert len(dist.prob) == 4097


def test_after_n_simple_walk_is_binomial():
    from scipy.stats import binom

    dist = exact_after_n(UrnSpec("zero", constant_weights(256)), 64)
    expect = binom.pmf(dist.reds, 64, 0.5)
    assert np.max(np.abs(dist.prob - expect)) < 1e-14


def test_after_n_respects_cap():
    with pytest.raises(OracleCapExceeded):
        exact_after_n(UrnSpec("zero", specific_power(1.0)), 50, cap=10)


def test_exact_tail_sums_the_right_mass():
    dist = exact_after_n(UrnSpec("zero", specific_power(1.0)), 6)
    d = np.abs(dist.reds - dist.blues)
    for m in (0, 1, 2, 6, 7):
        assert exact_tail(dist, m) == pytest.approx(float(dist.prob[d >= m].sum()), abs=1e-16)
    assert np.all(np.diff([exact_tail(dist, m) for m in range(8)]) <= 0)


# ---------------------------------------------------------------------------
# absorption DP


def test_stopped_law_is_certified_and_normalized():
    spec = UrnSpec("zero", specific_power(1.0))
    dist = exact_at_tau_blue(spec, 256, tol=1e-12)
    assert dist.kind == "at_tau_blue"
    assert np.all(dist.blues == 256)
    assert dist.residual <= 1e-12
    assert math.fsum(dist.prob.tolist()) == pytest.approx(1.0, abs=1e-11)
    assert 0.0 <= dist.truncation_bound < 1e-8


def test_stopped_mean_approaches_known_limit():
    # zero side, alpha = 1: E[D at tau_n] -> -1/3
    spec = UrnSpec("zero", specific_power(1.0))
    dist = exact_at_tau_blue(spec, 2048, tol=1e-12)
    mean = float(np.dot(dist.prob, (dist.reds - dist.blues).astype(float)))
    assert mean == pytest.approx(-1.0 / 3.0, abs=2e-3)


def test_stopped_law_matches_monte_carlo():
    spec = UrnSpec("plus", specific_power(1.0))
    dist = exact_at_tau_blue(spec, 64, tol=1e-14)
    exact_mean = float(np.dot(dist.prob, (dist.reds - dist.blues).astype(float)))
    d_tau, _ = sample_tau_and_fixed(spec, 64, 0, 40000, 123)
    err = np.std(d_tau) / math.sqrt(len(d_tau))
    assert abs(np.mean(d_tau) - exact_mean) < 4 * err


def test_stopped_law_respects_cap():
    with pytest.raises(OracleCapExceeded):
        exact_at_tau_blue(UrnSpec("zero", specific_power(1.0)), 50, cap=10)


# ---------------------------------------------------------------------------
# the stopped-sum identity


@pytest.mark.parametrize("side", SIDES)
@pytest.mark.parametrize("alpha", (0.5, 1.0, 2.0))
def test_identity_certified_small_n(side, alpha):
    spec = UrnSpec(side, perturbed_power(alpha, 0.3))
    for n in range(1, 9):
        lhs, rhs, bound = toth_identity_check(spec, n)
        assert abs(lhs - rhs) <= bound
        assert bound < 1e-10


def test_identity_lhs_matches_direct_stopped_expectation():
    # recompute E[S(reds at tau)] from the absorption law itself
    spec = UrnSpec("zero", specific_power(1.0))
    n = 32
    lhs, rhs, bound = toth_identity_check(spec, n)
    dist = exact_at_tau_blue(spec, n, tol=1e-15)
    inv_r = 1.0 / spec.red_weights(int(dist.reds.max()) + 1)
    s_vals = np.concatenate([[0.0], np.cumsum(inv_r)])
    direct = float(np.dot(dist.prob, s_vals[dist.reds]))
    assert lhs == pytest.approx(direct, rel=1e-9)
    assert rhs == pytest.approx(float(np.sum(1.0 / spec.blue_weights(n))), rel=1e-12)
