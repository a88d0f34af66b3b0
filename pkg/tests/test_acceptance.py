"""The verification gate: every limit statement at its stated size.

Each test covers one statement end to end — exact identities, exact-DP
convergence trends, and Monte Carlo property checks — at the sizes and
tolerances the statements are made for, and emits a single PASS/FAIL line
(run with ``-s`` or ``-rA`` to see them; the per-test pytest verdicts carry
the same information).  Seeds are fixed: every number here is reproducible
bit for bit.
"""

from __future__ import annotations

import json
import math
import time

import numpy as np
import pytest

from urnlab import cli, oracle, stats
from urnlab.rng import RngStream
from urnlab.stats import RunContext
from urnlab.urn import UrnSpec, rubin_sequence_counts, sequence_probs
from urnlab.walk import walk_path_prob
from urnlab.weights import constant_weights, odd_even_series, odd_even_series_target, perturbed_power, specific_power

SIDES = ("plus", "minus", "zero")
ALPHAS = (0.5, 1.0, 2.0)
BEES = (0.0, 0.3)


def _line(name: str, ok: bool, detail: str = "") -> None:
    tail = f"  ({detail})" if detail else ""
    print(f"{'PASS' if ok else 'FAIL'}  {name}{tail}")
    assert ok, f"{name}{tail}"


# 1 -------------------------------------------------------------------------


def test_stopped_chain_harmonic_identity():
    t0 = time.perf_counter()
    worst_gap, worst_bound, ok = 0.0, 0.0, True
    runs = 0
    for side in SIDES:
        for alpha in ALPHAS:
            for bee in BEES:
                spec = UrnSpec(side, perturbed_power(alpha, bee))
                for n in (*range(1, 9), 64, 256):
                    lhs, rhs, bound = oracle.toth_identity_check(spec, n)
                    ok &= abs(lhs - rhs) <= bound <= 1e-10
                    worst_gap = max(worst_gap, abs(lhs - rhs))
                    worst_bound = max(worst_bound, bound)
                    runs += 1
    dt = time.perf_counter() - t0
    ok &= dt < 10.0
    _line(
        "stopped-chain harmonic identity",
        ok,
        f"{runs} runs, worst |lhs-rhs| {worst_gap:.2e} <= bound <= {worst_bound:.2e}, {dt:.1f}s",
    )


# 2 -------------------------------------------------------------------------


def test_constant_weights_recover_srw():
    wf = constant_weights(256)
    worst_mean = worst_var = 0.0
    for n in range(1, 65):
        dist = oracle.exact_after_n(UrnSpec("zero", wf), n)
        worst_mean = max(worst_mean, abs(dist.disc_mean()))
        worst_var = max(worst_var, abs(dist.disc_variance() - n))
    for side in ("plus", "minus"):
        dist = oracle.exact_after_n(UrnSpec(side, wf), 64)
        worst_mean = max(worst_mean, abs(dist.disc_mean()))
        worst_var = max(worst_var, abs(dist.disc_variance() - 64))
    two = oracle.exact_after_n(UrnSpec("zero", wf), 2)
    p_two = oracle.exact_tail(two, 2)
    ok = worst_mean <= 1e-12 and worst_var <= 1e-12 and p_two == 0.5
    _line(
        "constant weights degenerate to the simple walk",
        ok,
        f"max |mean| {worst_mean:.1e}, max |var-n| {worst_var:.1e}, P(|D_2|>=2)={p_two}",
    )


# 3 -------------------------------------------------------------------------


def test_variance_rate_after_n_draws():
    t0 = time.perf_counter()
    verdicts = [
        stats.check_var_limit(UrnSpec("zero", perturbed_power(alpha, bee)), (1024, 2048, 4096))
        for alpha in ALPHAS
        for bee in BEES
    ]
    dt = time.perf_counter() - t0
    bad = [v.theorem_id for v in verdicts if not v.passed]
    errs = [abs(v.observed - v.target_value) / v.target_value for v in verdicts]
    ok = not bad and dt < 120.0
    _line(
        "variance rate after n draws -> 1/(2a+1)",
        ok,
        f"6 grids, final rel err <= {max(errs):.2%}, {dt:.1f}s" + (f", failed {bad}" if bad else ""),
    )


# 4 -------------------------------------------------------------------------


def test_variance_rate_at_stopping_time():
    ctx = RunContext(704)
    all_v = []
    for alpha in ALPHAS:
        spec = UrnSpec("zero", specific_power(alpha))
        for n in (1024, 4096):
            all_v.extend(stats.check_var_at_tau(spec, n, 0, ctx))
        all_v.extend(stats.check_var_at_tau(spec, 10**4, 10**4, ctx))
    bad = [v.theorem_id for v in all_v if not v.passed]
    dp_err = max(
        abs(v.observed - v.target_value) / v.target_value
        for v in all_v
        if v.method == "exact-DP"
    )
    _line(
        "variance rate at the stopping time",
        not bad,
        f"{len(all_v)} verdicts (DP rel err <= {dp_err:.2%}; MC within 3 stderr of DP)"
        + (f", failed {bad}" if bad else ""),
    )


# 5 & 6 ----------------------------------------------------------------------


@pytest.fixture(scope="module")
def stopped_mean_verdicts():
    grid = (256, 1024, 4096)
    out = {side: stats.check_mean_at_tau(side, specific_power(1.0), grid) for side in SIDES}
    out["zero-a2"] = stats.check_mean_at_tau("zero", specific_power(2.0), grid)
    return out


def test_mean_discrepancy_at_stopping_time_limits(stopped_mean_verdicts):
    targets = {"plus": 1 / 6, "minus": -5 / 6, "zero": -1 / 3, "zero-a2": -2 / 5}
    ok = True
    gaps = []
    for key, target in targets.items():
        limit_verdict = stopped_mean_verdicts[key][0]
        ok &= limit_verdict.passed
        ok &= limit_verdict.target_value == pytest.approx(target, abs=1e-15)
        gaps.append(abs(limit_verdict.observed - target))
    _line(
        "stopped-mean limits 1/6, -5/6, -1/3 (and -2/5 at a=2)",
        ok,
        f"final |error| <= {max(gaps):.2e} (allowed 0.05), errors non-increasing",
    )


def test_scaled_mean_vanishes(stopped_mean_verdicts):
    ok = all(stopped_mean_verdicts[side][1].passed for side in SIDES)
    seqs = {side: stopped_mean_verdicts[side][1].details["scaled_means"] for side in SIDES}
    _line(
        "scaled stopped mean |E|/sqrt(n) strictly decreasing",
        ok,
        "; ".join(f"{s}: {v[0]:.4f}>{v[1]:.4f}>{v[2]:.4f}" for s, v in seqs.items()),
    )


# 7 -------------------------------------------------------------------------


def test_odd_even_series_growth():
    n = 10**6
    t0 = time.perf_counter()
    ratios = [
        odd_even_series(wf, n) / odd_even_series_target(wf, n)
        for wf in (perturbed_power(a, b) for a in ALPHAS for b in BEES)
    ]
    dt = time.perf_counter() - t0
    gap = max(abs(r - 1.0) for r in ratios)
    ok = gap <= 0.01 and dt < 1.0
    _line(
        "odd/even weight series grows like 2^(a-1) n^a",
        ok,
        f"worst |ratio-1| {gap:.2e} at n=1e6, {dt:.2f}s",
    )


# 8 -------------------------------------------------------------------------


def test_construction_equivalences():
    # (a) the walk's direct law vs its urn composition, every 10-step path
    worst = 0.0
    for alpha in ALPHAS:
        wf = specific_power(alpha)
        for word in range(2**10):
            path = [1 if (word >> t) & 1 else -1 for t in range(10)]
            worst = max(worst, abs(walk_path_prob(path, wf, "direct") - walk_path_prob(path, wf, "urn")))
    ok_paths = worst <= 1e-12

    # (b) Rubin's exponential-race sampler vs the sequential law
    p_min = 1.0
    ties_total = 0
    for label, side in enumerate(SIDES):
        spec = UrnSpec(side, specific_power(1.0))
        counts, ties = rubin_sequence_counts(spec, 6, 10**6, RngStream(808, label))
        _, _, p = stats.chi_square_gof(counts, sequence_probs(spec, 6))
        p_min = min(p_min, p)
        ties_total += ties
    ok_rubin = p_min >= 1e-3
    _line(
        "construction equivalences (path law exact; Rubin chi-square)",
        ok_paths and ok_rubin,
        f"max path gap {worst:.1e}; min p {p_min:.3f} over 3 sides at 1e6 samples, ties {ties_total}",
    )


# 9 -------------------------------------------------------------------------


def test_tail_envelope_decay():
    run = stats.check_tail_decay(UrnSpec("zero", specific_power(1.0)), 1024)
    srw = stats.check_tail_decay(UrnSpec("zero", constant_weights(4096)), 1024, calibration=(0.4, 0.6))
    ok = run.passed and srw.passed
    _line(
        "exact tails: monotone with Gaussian-type envelope",
        ok,
        f"c_fit {run.observed:.3f} > 0; simple-walk calibration {srw.observed:.3f} in [0.4, 0.6]",
    )


# 10 ------------------------------------------------------------------------


def test_scaled_variance_bridge():
    t0 = time.perf_counter()
    n = 10**4
    grid = (0.5, 1.0)
    verdicts = [
        stats.check_variance_bridge(UrnSpec("zero", specific_power(a)), n, n, 2 * n, 10**5, RunContext(710, threads=8))
        for a in grid
    ]
    dt = time.perf_counter() - t0
    ok = all(v.passed for v in verdicts) and dt < 300.0
    _line(
        "variance of the scaled bridge functional",
        ok,
        ", ".join(f"a={a:g}: ratio {v.observed:.4f}" for a, v in zip(grid, verdicts))
        + f"; band [0.92, 1.08], {dt:.0f}s",
    )


# 11 ------------------------------------------------------------------------


def test_variance_of_increments():
    v = stats.check_var_increment(
        UrnSpec("zero", specific_power(1.0)), 10**4, 10**4 + 2000, 10**5, RunContext(711, threads=8)
    )
    _line(
        "increment variance per draw stays near 1",
        v.passed,
        f"Var(D_m - D_n)/(m-n) = {v.observed:.4f} in [0.8, 1.2]",
    )


# 12 ------------------------------------------------------------------------


def test_stopping_time_vs_double_draws_gap():
    v = stats.check_tau_vs_2n(
        UrnSpec("zero", specific_power(1.0)), (1024, 4096, 16384), 10**4, RunContext(712, threads=8)
    )
    _line(
        "gap between stopping time and doubled draw count",
        v.passed,
        f"max/median of E[(D_tau - D_2n)^2]/sqrt(n) = {v.observed:.3f} <= 2",
    )


# 13 ------------------------------------------------------------------------


def test_window_sup_excursion_tails():
    v = stats.check_sup_excursion(
        UrnSpec("zero", specific_power(1.0)), 300, 10**3, (0.5, 1.0, 1.5, 2.0), 10**4, RunContext(713, threads=8)
    )
    probs = v.details["probabilities"]
    _line(
        "windowed sup-excursion tails decay in y^2",
        v.passed,
        f"P(sup >= y sqrt(n)) = {[round(p, 3) for p in probs]}, slope {v.observed:.3f} < 0",
    )


# 14 ------------------------------------------------------------------------


def test_drift_residual_bound():
    families = [constant_weights()]
    for a in ALPHAS:
        families.append(specific_power(a))
        for b in BEES:
            families.append(perturbed_power(a, b))
    verdicts = [
        stats.check_drift_bound(UrnSpec(side, wf)) for wf in families for side in SIDES
    ]
    bad = [v.theorem_id for v in verdicts if not v.passed]
    spread = max(v.observed for v in verdicts)
    _line(
        "drift correction obeys the (D^2+i)/i^2 envelope",
        not bad,
        f"{len(verdicts)} family/side sweeps over i in [1e2, 1e6], worst decade spread {spread:.2f} <= 2"
        + (f", failed {bad}" if bad else ""),
    )


# 15 ------------------------------------------------------------------------


def test_report_thread_invariance():
    reports = []
    for threads in (1, 8):
        rep = cli.run(cli.ExperimentConfig(command="verify", seed=7, threads=threads))
        assert rep.ok, [v["theorem_id"] for v in rep.failed_verdicts]
        d = rep.to_dict()
        d.pop("execution")
        reports.append(json.dumps(d, sort_keys=True).encode())
    n_verdicts = len(json.loads(reports[0])["results"]["verdicts"])
    _line(
        "full verification battery byte-identical across thread counts",
        reports[0] == reports[1],
        f"{n_verdicts} verdicts, all green, {len(reports[0])} bytes each",
    )
