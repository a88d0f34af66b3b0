"""Weight families: exact values, clamps, series, and certified envelopes."""

from __future__ import annotations

import math

import numpy as np
import pytest

from urnlab.weights import (
    WeightFunction,
    constant_weights,
    inv_weight_array,
    inv_weight_envelope,
    log_weight,
    nonincreasing_from,
    odd_even_series,
    odd_even_series_target,
    perturbed_power,
    specific_power,
    table_weights,
    weight,
    weight_array,
)

ALPHAS = (0.5, 1.0, 2.0)


# ---------------------------------------------------------------------------
# construction and validation


def test_specific_is_shifted_power():
    wf = specific_power(1.5)
    for n in (0, 1, 7, 1000):
        assert weight(wf, n) == pytest.approx((n + 1) ** -1.5, rel=1e-15)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_specific_forces_half_alpha_perturbation(alpha):
    # (n+1)^alpha = n^alpha (1 + alpha/n + ...), so B is not a free knob
    assert specific_power(alpha).bee == alpha / 2


def test_perturbed_reciprocal_formula():
    wf = perturbed_power(1.0, 0.3)
    for n in (1, 2, 50):
        assert 1.0 / weight(wf, n) == pytest.approx(n + 0.6, rel=1e-15)
    assert weight(wf, 0) == 1.0  # default w(0)


def test_perturbed_w0_override():
    wf = perturbed_power(1.0, 0.0, w0=2.5)
    assert weight(wf, 0) == pytest.approx(2.5)
    assert weight(wf, 3) == pytest.approx(1.0 / 3.0)


def test_table_head_then_power_tail():
    wf = table_weights((5.0, 0.25, 3.0), 1.0, 0.0)
    assert [weight(wf, n) for n in (0, 1, 2)] == [5.0, 0.25, 3.0]
    assert weight(wf, 7) == pytest.approx(1.0 / 7.0)


def test_constant_weights_are_one_everywhere():
    wf = constant_weights(16)
    assert wf.alpha == 0.0 and wf.bee == 0.0
    n = np.array([0, 1, 15, 16, 17, 10**6, 10**9])
    assert np.all(weight_array(wf, n) == 1.0)
    assert log_weight(wf, 10**7) == 0.0


@pytest.mark.parametrize(
    "bad",
    [
        lambda: specific_power(-0.5),
        lambda: perturbed_power(0.0, 0.3),  # constant tail forces B = 0
        lambda: perturbed_power(1.0, 0.0, w0=0.0),
        lambda: table_weights(()),
        lambda: table_weights((1.0, -2.0)),
        lambda: WeightFunction("specific", 1.0, w0_override=2.0),
        lambda: WeightFunction("perturbed", 1.0, table=(1.0,)),
        lambda: WeightFunction("gamma", 1.0),
    ],
)
def test_invalid_constructions_raise(bad):
    with pytest.raises(ValueError):
        bad()


# ---------------------------------------------------------------------------
# evaluation


@pytest.mark.parametrize(
    "wf",
    [
        specific_power(0.5),
        perturbed_power(2.0, 0.3),
        perturbed_power(1.0, -0.4),
        table_weights((2.0, 0.5), 0.5, 0.1),
        constant_weights(8),
    ],
)
def test_array_and_scalar_evaluation_agree(wf):
    n = np.arange(0, 100)
    arr = weight_array(wf, n)
    inv = inv_weight_array(wf, n)
    for k in range(100):
        assert arr[k] == pytest.approx(weight(wf, int(k)), rel=1e-14)
        assert inv[k] * arr[k] == pytest.approx(1.0, rel=1e-14)


@pytest.mark.parametrize(
    "wf",
    [specific_power(2.0), perturbed_power(0.5, 0.3), perturbed_power(1.0, -0.4), constant_weights(4)],
)
def test_log_weight_matches_direct_log(wf):
    for n in (0, 1, 2, 9, 10**3, 2**40):
        assert log_weight(wf, n) == pytest.approx(math.log(weight(wf, n)), rel=1e-12, abs=1e-12)


def test_negative_bee_clamp_keeps_weights_positive():
    # raw 1/w(1) = 1 + 2B = -3 would be nonsense; the clamp floors it
    wf = perturbed_power(1.0, -2.0)
    n = np.arange(0, 64)
    w = weight_array(wf, n)
    assert np.all(w > 0)
    # beyond n = -4B the raw formula is safely positive and used as-is
    assert 1.0 / weight(wf, 9) == pytest.approx(9 - 4.0, rel=1e-15)


# ---------------------------------------------------------------------------
# odd/even series


def test_series_alpha_one_telescopes_exactly():
    # specific: 1/w(n) = n+1 everywhere, so every difference is exactly 1;
    # perturbed: 1/w(n) = n only from n = 1 (w(0) = 1 kills the first term)
    assert odd_even_series(specific_power(1.0), 1000) == 1000.0
    assert odd_even_series(perturbed_power(1.0), 1000) == 999.0


@pytest.mark.parametrize("alpha", ALPHAS)
@pytest.mark.parametrize("bee", (0.0, 0.3))
def test_series_growth_rate(alpha, bee):
    wf = perturbed_power(alpha, bee)
    n = 10**4
    ratio = odd_even_series(wf, n) / odd_even_series_target(wf, n)
    assert ratio == pytest.approx(1.0, abs=0.02)


def test_series_rejects_empty_range():
    with pytest.raises(ValueError):
        odd_even_series(specific_power(1.0), 0)


# ---------------------------------------------------------------------------
# certified envelopes


@pytest.mark.parametrize(
    "wf",
    [
        specific_power(0.5),
        perturbed_power(1.0, 0.3),
        perturbed_power(0.5, -0.4),
        table_weights((9.0, 1.0, 4.0), 2.0, -0.2),
        constant_weights(32),
    ],
)
def test_monotone_certificate_holds(wf):
    m0 = max(1, nonincreasing_from(wf))
    n = np.arange(m0, m0 + 5000)
    w = weight_array(wf, n)
    assert np.all(np.diff(w) <= 1e-18)


@pytest.mark.parametrize(
    "wf", [specific_power(2.0), perturbed_power(1.0, 0.3), constant_weights(32)]
)
def test_inverse_weight_envelope_holds(wf):
    m0 = max(1, nonincreasing_from(wf))
    a_env = inv_weight_envelope(wf, m0)
    m = np.arange(m0, m0 + 5000)
    assert np.all(inv_weight_array(wf, m) <= a_env * np.power(m.astype(float), wf.alpha) * (1 + 1e-15))


def test_envelope_refuses_to_start_inside_table():
    wf = table_weights((1.0, 50.0, 1.0), 1.0, 0.0)
    with pytest.raises(ValueError):
        inv_weight_envelope(wf, 1)
