"""Exact distributions of the urn chain by dynamic programming.

Everything here is deterministic: the forward law after a fixed number of
draws, the absorbed law at the stopping time tau_n (the n-th blue draw),
certified truncation bounds for the absorbed law's infinite red tail, and
the stopped-chain harmonic identity

    E[ sum_{j < reds(tau_n)} 1/r(j) ] = sum_{i < n} 1/b(i),

which holds exactly for every weight function and side and is the
strongest self-test of the absorption DP.

Truncation certificate
----------------------
The absorption DP stops once the still-active (unabsorbed) mass drops
below a floor, leaving ``residual`` mass whose eventual absorption column
is unknown.  For a nondecreasing payoff f of the final red count J, the
per-state bound

    G(j) = (1 - q_j) f(j) + q_j G(j+1),      q_j = r(j)/(b_min + r(j)),

dominates E[f(J) | reds currently j]: a path at red count j must cross
each subsequent red level d once to exceed it, with probability at most
q_d regardless of its blue count (b_min = min_{i<n} b(i)).  The recursion
is closed analytically at a level J where the weights are certifiably
monotone, using a geometric envelope on sum_k Delta f(J+k) q^k.  The bound
on the truncated part of E[f] is then sum over active states of mass * G.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .urn import UrnSpec, UrnState
from .weights import inv_weight_envelope, nonincreasing_from

DEFAULT_AFTER_N_CAP = 10**4
DEFAULT_TAU_CAP = 10**4
DEFAULT_MASS_FLOOR = 1e-30


class OracleCapExceeded(ValueError):
    """Requested size exceeds the configured DP cap."""


class TruncationUnreachable(RuntimeError):
    """The absorption DP could not push the residual below tolerance."""

    def __init__(self, achieved: float, jmax: int):
        super().__init__(
            f"residual {achieved:.3e} still above tolerance at red cap {jmax}"
        )
        self.achieved = achieved
        self.jmax = jmax


@dataclass
class LatticeDistribution:
    """A (possibly truncated) exact law over urn states.

    kind "after_n": the joint law of (blues, reds) after ``level`` draws;
    support is finite, residual is exactly 0.  kind "at_tau_blue": the law
    of the final red count at the stopping time tau_level; ``blues`` is
    constantly ``level`` and ``residual`` is the unabsorbed mass left when
    the DP stopped.  ``truncation_bound`` certifies the expectation error
    |E_true[f] - E_reported[f]| for any payoff with |f| bounded by the
    canonical envelope (1 + reds)^p, p = max(2, alpha + 1); it is 0 for
    "after_n".
    """

    kind: str
    level: int
    blues: np.ndarray
    reds: np.ndarray
    prob: np.ndarray
    residual: float = 0.0
    truncation_bound: float = 0.0

    def mass(self) -> dict[UrnState, float]:
        """The law as an explicit state -> probability map."""
        return {
            UrnState(int(b), int(r)): float(p)
            for b, r, p in zip(self.blues, self.reds, self.prob)
        }

    def discrepancies(self) -> np.ndarray:
        return self.reds.astype(np.int64) - self.blues.astype(np.int64)

    def disc_mean(self) -> float:
        return float(np.sum(self.prob * self.discrepancies().astype(self.prob.dtype)))

    def disc_variance(self) -> float:
        d = self.discrepancies().astype(self.prob.dtype)
        m = np.sum(self.prob * d)
        return float(np.sum(self.prob * (d - m) ** 2))

    def total_mass(self) -> float:
        return float(np.sum(self.prob) + self.residual)


def exact_tail(dist: LatticeDistribution, m: int) -> float:
    """P(|D| >= m) summed from the recorded mass.

    The distribution's ``residual`` (mass of unknown location, zero for
    "after_n") is *not* included; callers treating the tail as an upper or
    lower bound consult ``dist.residual`` separately.
    """
    if m <= 0:
        return float(np.sum(dist.prob))
    return float(np.sum(dist.prob[np.abs(dist.discrepancies()) >= m]))


def exact_after_n(spec: UrnSpec, n: int, *, cap: int = DEFAULT_AFTER_N_CAP) -> LatticeDistribution:
    """Exact joint law of (blues, reds) after n draws (O(n^2) forward DP).

    Row t holds P(blues = i) over i <= t; each step splits every state by
    the transition law.  Mass is conserved exactly up to rounding (checked
    to 1e-13 in the tests).
    """
    if n < 1:
        raise ValueError("draw count must be >= 1")
    if n > cap:
        raise OracleCapExceeded(f"after-n DP capped at {cap} draws, got {n}")
    b = spec.blue_weights(n + 1)
    r = spec.red_weights(n + 1)
    row = np.ones(1)
    for t in range(n):
        i = np.arange(t + 1)
        bb = b[i]
        rr = r[t - i]
        p_red = rr / (bb + rr)
        new = np.zeros(t + 2)
        new[: t + 1] += row * p_red  # red draw: blues stay at i
        new[1:] += row * (1.0 - p_red)  # blue draw: blues move to i+1
        row = new
    blues = np.arange(n + 1, dtype=np.int64)
    return LatticeDistribution("after_n", n, blues, n - blues, row)


def _tail_product_factors(spec: UrnSpec, n: int, jhi: int, dtype) -> np.ndarray:
    """q_j = r(j)/(b_min + r(j)) for j in [0, jhi): red-crossing bounds."""
    b = spec.blue_weights(n, dtype)
    r = spec.red_weights(jhi, dtype)
    return r / (b.min() + r)


def _envelope_closure(
    spec: UrnSpec, j_env: int, q_env, df_bound_at, growth_per_level: float
):
    """Bound sum_{k>=1} Delta_f(j_env + k) * prod_{d<k} q  analytically.

    ``df_bound_at`` maps k to an upper bound of Delta_f(j_env + k) of the
    form  A * (1 + growth)^k; the series is then geometric with ratio
    rho = q_env * exp(growth_per_level) and requires rho < 1.
    """
    rho = float(q_env) * math.exp(growth_per_level)
    if not rho < 1.0:
        return math.inf
    return float(df_bound_at(1)) * rho / (1.0 - rho)


@dataclass
class _TauDP:
    """Raw output of the absorption sweep (shared by the public wrappers)."""

    reds: np.ndarray  # absorption columns j with recorded mass
    prob: np.ndarray  # P(reds(tau_n) = j), truncated
    active_blues: np.ndarray  # blue counts of still-active states
    active_reds: np.ndarray  # red counts of still-active states
    active_mass: np.ndarray
    steps: int  # DP time steps executed (for rounding models)


def _run_tau_dp(spec: UrnSpec, n: int, mass_floor: float, dtype) -> _TauDP:
    """Absorption DP: evolve states with blues < n, absorb at blues = n.

    At draw t the active row spans blues i in [max(0, t - jcap), min(t, n-1)]
    with reds = t - i; a blue drawn at i = n-1 absorbs its mass at column
    j = t - (n - 1).  Stops when active mass < mass_floor.
    """
    one = dtype(1.0)
    b = spec.blue_weights(n, dtype)
    cap_r = 4 * n + 1024
    r = spec.red_weights(cap_r, dtype)
    row = np.ones(1, dtype=dtype)  # indexed by blues, offset handled below
    lo = 0  # smallest blue count present in row
    absorbed_cols: list[int] = []
    absorbed_mass: list = []
    t = 0
    while True:
        active = float(row.sum())
        if active < mass_floor or row.size == 0:
            break
        hi = lo + row.size  # one past the largest blue count
        i = np.arange(lo, hi)
        j = t - i
        if j[0] >= cap_r:
            cap_r *= 2
            r = spec.red_weights(cap_r, dtype)
        p_red = r[j] / (b[i] + r[j])
        blue_mass = row * (one - p_red)
        red_mass = row * p_red
        new_lo = lo
        new = np.zeros(row.size + 1, dtype=dtype)
        new[: row.size] += red_mass  # red: blues unchanged, reds +1
        new[1:] += blue_mass  # blue: blues + 1
        if hi == n:  # top state bred a blue -> absorbed at column t - (n-1)
            absorbed_cols.append(t - (n - 1))
            absorbed_mass.append(new[-1])
            new = new[:-1]
        t += 1
        row = new
        # drop exhausted leading zeros (states that can no longer change)
        nz = np.nonzero(row)[0]
        if nz.size and nz[0] > 0:
            row = row[nz[0] :]
            new_lo += int(nz[0])
        lo = new_lo
    hi = lo + row.size
    i_act = np.arange(lo, hi, dtype=np.int64)
    return _TauDP(
        np.asarray(absorbed_cols, dtype=np.int64),
        np.asarray(absorbed_mass, dtype=dtype),
        i_act,
        t - i_act,
        row,
        t,
    )


def _certify_truncation(
    spec: UrnSpec, n: int, dp: _TauDP, f_vals: np.ndarray, df_env
) -> float:
    """Sum of active mass weighted by the per-state payoff bound G.

    ``f_vals[j]`` is the (nondecreasing, nonnegative) payoff at final red
    count j for j in [0, j_env]; ``df_env(k)`` bounds the payoff increment
    at level j_env + k as A * exp(g * k) — see ``_envelope_closure``.
    """
    if dp.active_mass.size == 0:
        return 0.0
    j_env = len(f_vals) - 1
    q = _tail_product_factors(spec, n, j_env + 1, np.float64).astype(np.float64)
    # beyond j_env the crossing factors are certifiably <= q[j_env]
    g = np.empty(j_env + 1)
    closure, growth = df_env
    tail = _envelope_closure(spec, j_env, q[j_env], closure, growth)
    g[j_env] = f_vals[j_env] + tail
    for j in range(j_env - 1, -1, -1):
        g[j] = (1.0 - q[j]) * f_vals[j] + q[j] * g[j + 1]
    mass = dp.active_mass.astype(np.float64)
    return float(np.sum(mass * g[dp.active_reds]))


def _canonical_envelope_power(spec: UrnSpec) -> float:
    return max(2.0, spec.wf.alpha + 1.0)


def exact_at_tau_blue(
    spec: UrnSpec,
    n: int,
    tol: float = 1e-12,
    *,
    cap: int = DEFAULT_TAU_CAP,
    mass_floor: float = DEFAULT_MASS_FLOOR,
    dtype=np.float64,
) -> LatticeDistribution:
    """Law of the red count at tau_n (the n-th blue draw), truncated.

    The DP runs until the unabsorbed mass falls below
    ``min(mass_floor, tol * 1e-3)``; ``residual`` reports what is left and
    must come out below ``tol`` or :class:`TruncationUnreachable` is
    raised.  ``truncation_bound`` certifies expectation errors for payoffs
    within the canonical envelope (1 + reds)^p, p = max(2, alpha + 1);
    see the module docstring for the certificate.
    """
    if n < 1:
        raise ValueError("absorption level must be >= 1")
    if n > cap:
        raise OracleCapExceeded(f"absorption DP capped at {cap}, got {n}")
    floor = min(mass_floor, tol * 1e-3)
    dp = _run_tau_dp(spec, n, floor, dtype)
    residual = float(dp.active_mass.sum())
    if not residual < tol:
        raise TruncationUnreachable(residual, int(dp.active_reds.max(initial=0)))

    p = _canonical_envelope_power(spec)
    j_env = _envelope_level(spec, dp)
    f_vals = (1.0 + np.arange(j_env + 1)) ** p
    # Delta f(j_env + k) <= p (1 + j_env + k)^(p-1) <= A e^{g k}
    a = p * (1.0 + j_env) ** (p - 1.0)
    g = (p - 1.0) / (1.0 + j_env)
    bound = _certify_truncation(spec, n, dp, f_vals, (lambda k: a * math.exp(g * k), g))

    blues = np.full(dp.reds.shape, n, dtype=np.int64)
    return LatticeDistribution(
        "at_tau_blue", n, blues, dp.reds, dp.prob, residual, bound
    )


def _envelope_level(spec: UrnSpec, dp: _TauDP) -> int:
    """A red level beyond every active state where weights are monotone."""
    jmax = int(dp.active_reds.max(initial=0))
    jmax = max(jmax, int(dp.reds.max(initial=0)))
    mono = nonincreasing_from(spec.wf)
    # red weight argument is 2j(+1); invert to a red level and pad
    return max(jmax + 8, (mono + 1) // 2 + 8)


def toth_identity_check(
    spec: UrnSpec, n: int, tol: float = 1e-12, *, cap: int = 2 * 10**3
) -> tuple[float, float, float]:
    """Check  E[sum_{j<reds(tau_n)} 1/r(j)] = sum_{i<n} 1/b(i)  exactly.

    Returns (lhs, rhs, bound).  The DP runs in extended precision
    (``numpy.longdouble``): the two sides reach ~1e7 by n = 256 at
    alpha = 2, where double rounding alone exceeds the 1e-10 certification
    target this identity is held to.  ``bound`` adds the certified
    truncation error for the exact payoff S(j) = sum_{d<j} 1/r(d) to a
    mean-square rounding allowance u * sqrt(3 T) * max(|lhs|, |rhs|)
    (u = longdouble unit roundoff, T = DP steps); |lhs - rhs| <= bound is
    asserted by the callers, not here.
    """
    if n < 1:
        raise ValueError("stopping level must be >= 1")
    if n > cap:
        raise OracleCapExceeded(f"identity check capped at {cap}, got {n}")
    ld = np.longdouble
    floor = min(DEFAULT_MASS_FLOOR, tol * 1e-6)
    dp = _run_tau_dp(spec, n, floor, ld)

    j_env = _envelope_level(spec, dp)
    inv_r = 1.0 / spec.red_weights(j_env + 1, ld)
    s_vals = np.concatenate([[ld(0.0)], np.cumsum(inv_r)])[: j_env + 1]
    lhs = float(np.sum(dp.prob * s_vals[dp.reds]))
    rhs = float(np.sum(1.0 / spec.blue_weights(n, ld)))

    # Delta S(j_env + k) = 1/r(j_env + k - 1) <= A (2(j_env+k)+1)^alpha
    alpha = spec.wf.alpha
    m0 = max(1, nonincreasing_from(spec.wf), 2 * j_env - 1)
    a_env = inv_weight_envelope(spec.wf, m0) * (2.0 * j_env + 3.0) ** alpha
    growth = 2.0 * alpha / (2.0 * j_env + 1.0)
    trunc = _certify_truncation(
        spec, n, dp, s_vals.astype(np.float64), (lambda k: a_env * math.exp(growth * k), growth)
    )
    u_round = float(np.finfo(ld).eps) / 2.0
    fp_allowance = u_round * math.sqrt(3.0 * dp.steps) * max(abs(lhs), abs(rhs), 1.0)
    return lhs, rhs, float(trunc + fp_allowance)
