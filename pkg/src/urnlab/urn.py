"""Generalized Pólya urn chains.

The chain counts blue and red draws: from state ``(blues, reds) = (i, j)``
the next ball is blue with probability ``b(i)/(b(i)+r(j))`` and red with
probability ``r(j)/(b(i)+r(j))``, where ``b`` and ``r`` are sequences
derived from a weight function ``w``.  Three *sides* are used, matching the
three site types of the self-repelling walk:

===== ==================== ====================
side  b(i)                 r(j)
===== ==================== ====================
plus  w(2i+1)              w(2j)
minus w(2i)                w(2j+1)
zero  w(2i)                w(2j)
===== ==================== ====================

The central observable is the discrepancy ``D_n = reds - blues`` after n
draws, and its value at the stopping times ``tau_k`` = draw index of the
k-th blue.

Two samplers are provided.  ``draw_sequential`` iterates the transition law
directly.  ``draw_rubin`` realizes the same law through the exponential-
clock construction: blue marks arrive at partial sums of Exp(b(0)),
Exp(b(1)), ... and red marks at partial sums of Exp(r(0)), Exp(r(1)), ...;
the merged mark order is the draw sequence.  Equality of the two laws is
checked exactly in the test-suite and acceptance battery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .rng import RngStream, exponential_from_uniform
from .weights import WeightFunction, log_weight, weight_array

SIDES = ("plus", "minus", "zero")

DEFAULT_DRAW_CAP = 10**9
FULL_RECORD_THRESHOLD = 10**5


class DrawCapExceeded(RuntimeError):
    """A sampler hit its hard draw cap before the stop rule fired."""


@dataclass(frozen=True)
class UrnSpec:
    """An urn side together with its weight function."""

    side: str
    wf: WeightFunction

    def __post_init__(self) -> None:
        if self.side not in SIDES:
            raise ValueError(f"unknown urn side {self.side!r}")

    def blue_arg(self, i):
        """Weight argument for the blue sequence at count i."""
        return 2 * i + 1 if self.side == "plus" else 2 * i

    def red_arg(self, j):
        """Weight argument for the red sequence at count j."""
        return 2 * j + 1 if self.side == "minus" else 2 * j

    def log_blue_weight(self, i: int) -> float:
        return log_weight(self.wf, self.blue_arg(i))

    def log_red_weight(self, j: int) -> float:
        return log_weight(self.wf, self.red_arg(j))

    def blue_weights(self, count: int, dtype=np.float64) -> np.ndarray:
        """Array of b(i) for i in [0, count)."""
        return weight_array(self.wf, self.blue_arg(np.arange(count, dtype=np.int64)), dtype)

    def red_weights(self, count: int, dtype=np.float64) -> np.ndarray:
        """Array of r(j) for j in [0, count)."""
        return weight_array(self.wf, self.red_arg(np.arange(count, dtype=np.int64)), dtype)


@dataclass(frozen=True)
class UrnState:
    """Draw counts (blues, reds) after blues + reds draws."""

    blues: int
    reds: int

    @property
    def draws(self) -> int:
        return self.blues + self.reds

    @property
    def discrepancy(self) -> int:
        return self.reds - self.blues


@dataclass(frozen=True)
class StopRule:
    """When a sampler stops: after n draws, or when a color count reaches n."""

    kind: str  # "draws" | "blues" | "reds"
    n: int

    def __post_init__(self) -> None:
        if self.kind not in ("draws", "blues", "reds"):
            raise ValueError(f"unknown stop rule {self.kind!r}")
        if self.n < 0:
            raise ValueError("stop threshold must be nonnegative")

    def satisfied(self, blues: int, reds: int) -> bool:
        if self.kind == "draws":
            return blues + reds >= self.n
        if self.kind == "blues":
            return blues >= self.n
        return reds >= self.n


def stop_after_draws(n: int) -> StopRule:
    return StopRule("draws", n)


def stop_at_blues(n: int) -> StopRule:
    return StopRule("blues", n)


def stop_at_reds(n: int) -> StopRule:
    return StopRule("reds", n)


@dataclass
class UrnTrajectory:
    """A sampled path of the chain.

    ``draw_index``, ``blues`` and ``reds`` are aligned arrays of recorded
    states; recording is complete for short runs and strided (checkpoints,
    plus the initial and final state) once a run exceeds
    ``FULL_RECORD_THRESHOLD`` draws.  ``tau_blue[k]`` is the draw index of
    the (k+1)-th blue, so ``tau_blue[n-1]`` is the classical tau_n; these
    are only collected on fully recorded runs (the terminal stopping index
    is always available as the final state).  ``rubin_ties`` counts exact
    floating-point mark collisions in the exponential construction (resolved
    blue-first).
    """

    draw_index: np.ndarray
    blues: np.ndarray
    reds: np.ndarray
    tau_blue: np.ndarray
    tau_red: np.ndarray
    rubin_ties: int = 0
    full: bool = True

    @property
    def draws(self) -> int:
        return int(self.draw_index[-1])

    @property
    def final(self) -> UrnState:
        return UrnState(int(self.blues[-1]), int(self.reds[-1]))

    def discrepancy(self) -> np.ndarray:
        """reds - blues at every recorded index."""
        return self.reds.astype(np.int64) - self.blues.astype(np.int64)


def discrepancy_at(traj: UrnTrajectory, n: int) -> int:
    """D_n = reds - blues at draw index n.

    Raises IndexError when n exceeds the trajectory or (on a strided
    recording) falls between checkpoints.
    """
    if n < 0 or n > traj.draws:
        raise IndexError(f"draw index {n} outside trajectory of {traj.draws} draws")
    pos = int(np.searchsorted(traj.draw_index, n))
    if pos == len(traj.draw_index) or traj.draw_index[pos] != n:
        raise IndexError(f"draw index {n} not recorded (strided trajectory)")
    return int(traj.reds[pos]) - int(traj.blues[pos])


def step_prob_red(spec: UrnSpec, state: UrnState) -> float:
    """P(next draw is red) = r(reds) / (b(blues) + r(reds)).

    Evaluated in log space as 1/(1 + exp(log b - log r)) so that the huge
    weight ratios arising at large counts and large alpha stay exact.
    """
    d = spec.log_blue_weight(state.blues) - spec.log_red_weight(state.reds)
    return 1.0 / (1.0 + math.exp(d))


def mean_increment(spec: UrnSpec, state: UrnState) -> float:
    """E[D_{i+1} - D_i | state] = (r - b)/(r + b) = tanh((log r - log b)/2).

    The tanh form survives the cancellation between two nearly equal tiny
    weights that the raw difference quotient would lose.
    """
    d = spec.log_red_weight(state.reds) - spec.log_blue_weight(state.blues)
    return math.tanh(0.5 * d)


def drift_residual(spec: UrnSpec, state: UrnState) -> float:
    """eps_i = E[D_{i+1} - D_i | state] + alpha * D_i / i.

    The conditional drift of the discrepancy is -alpha D_i / i to leading
    order; this returns the correction term, which the drift-bound check
    requires to stay O((D_i^2 + i)/i^2).
    """
    i = state.draws
    if i < 1:
        raise ValueError("drift residual needs at least one draw")
    return mean_increment(spec, state) + spec.wf.alpha * state.discrepancy / i


# ---------------------------------------------------------------------------
# samplers


class _Recorder:
    """Shared state recording for the two samplers."""

    def __init__(self, stop: StopRule, record_threshold: int):
        expected = stop.n if stop.kind == "draws" else 3 * stop.n + 64
        self.stride = 1
        if expected > record_threshold:
            self.stride = int(math.ceil(expected / record_threshold))
        self.full = self.stride == 1
        self.idx = [0]
        self.blues = [0]
        self.reds = [0]
        self.tau_blue: list[int] = []
        self.tau_red: list[int] = []

    def record(self, t: int, blues: int, reds: int, blue_drawn: bool) -> None:
        if self.full:
            self.idx.append(t)
            self.blues.append(blues)
            self.reds.append(reds)
            if blue_drawn:
                self.tau_blue.append(t)
            else:
                self.tau_red.append(t)
        elif t % self.stride == 0:
            self.idx.append(t)
            self.blues.append(blues)
            self.reds.append(reds)

    def finish(self, t: int, blues: int, reds: int, ties: int = 0) -> UrnTrajectory:
        if self.idx[-1] != t:
            self.idx.append(t)
            self.blues.append(blues)
            self.reds.append(reds)
        return UrnTrajectory(
            np.asarray(self.idx, dtype=np.int64),
            np.asarray(self.blues, dtype=np.int64),
            np.asarray(self.reds, dtype=np.int64),
            np.asarray(self.tau_blue, dtype=np.int64),
            np.asarray(self.tau_red, dtype=np.int64),
            rubin_ties=ties,
            full=self.full,
        )


class _WeightTable:
    """Growable cache of b(i) / r(j) values for the samplers."""

    def __init__(self, spec: UrnSpec, initial: int = 256):
        self.spec = spec
        self.b = spec.blue_weights(initial)
        self.r = spec.red_weights(initial)

    def blue(self, i: int) -> float:
        while i >= len(self.b):
            self.b = self.spec.blue_weights(2 * len(self.b))
        return self.b[i]

    def red(self, j: int) -> float:
        while j >= len(self.r):
            self.r = self.spec.red_weights(2 * len(self.r))
        return self.r[j]


def draw_sequential(
    spec: UrnSpec,
    rng: RngStream,
    stop: StopRule,
    *,
    cap: int = DEFAULT_DRAW_CAP,
    record_threshold: int = FULL_RECORD_THRESHOLD,
) -> UrnTrajectory:
    """Sample a trajectory by iterating the transition law."""
    rec = _Recorder(stop, record_threshold)
    wt = _WeightTable(spec)
    gen = rng.generator
    blues = reds = t = 0
    block = np.empty(0)
    pos = 0
    while not stop.satisfied(blues, reds):
        if t >= cap:
            raise DrawCapExceeded(f"stop rule {stop} unmet after {cap} draws")
        if pos >= len(block):
            block = gen.random(4096)
            pos = 0
        bw = wt.blue(blues)
        rw = wt.red(reds)
        blue_drawn = block[pos] >= rw / (bw + rw)
        pos += 1
        t += 1
        if blue_drawn:
            blues += 1
        else:
            reds += 1
        rec.record(t, blues, reds, blue_drawn)
    return rec.finish(t, blues, reds)


def draw_rubin(
    spec: UrnSpec,
    rng: RngStream,
    stop: StopRule,
    *,
    cap: int = DEFAULT_DRAW_CAP,
    record_threshold: int = FULL_RECORD_THRESHOLD,
) -> UrnTrajectory:
    """Sample a trajectory via the exponential-clock construction.

    The next blue mark sits at the running sum of Exp(b(i)) inter-arrival
    times, the next red mark at the running sum of Exp(r(j)); each draw
    emits the color of the earlier mark and advances that clock only.
    Exact float ties (probability zero in law) resolve blue-first and are
    counted on the trajectory.
    """
    rec = _Recorder(stop, record_threshold)
    wt = _WeightTable(spec)
    gen = rng.generator
    blues = reds = t = ties = 0
    next_blue = exponential_from_uniform(gen.random(), wt.blue(0))
    next_red = exponential_from_uniform(gen.random(), wt.red(0))
    while not stop.satisfied(blues, reds):
        if t >= cap:
            raise DrawCapExceeded(f"stop rule {stop} unmet after {cap} draws")
        if next_red == next_blue:
            ties += 1
        blue_drawn = next_blue <= next_red
        t += 1
        if blue_drawn:
            blues += 1
            next_blue += exponential_from_uniform(gen.random(), wt.blue(blues))
        else:
            reds += 1
            next_red += exponential_from_uniform(gen.random(), wt.red(reds))
        rec.record(t, blues, reds, blue_drawn)
    return rec.finish(t, blues, reds, ties)


# ---------------------------------------------------------------------------
# exact sequence laws and bulk sampling (small draw counts)


def sequence_probs(spec: UrnSpec, k: int) -> np.ndarray:
    """Exact probability of each of the 2^k color sequences of length k.

    Sequence s is encoded bitwise: bit t (from the least significant end)
    is 1 when draw t is red.  Probabilities are products of the transition
    law along the replayed path.
    """
    if k > 20:
        raise ValueError("sequence enumeration capped at 20 draws")
    probs = np.ones(1)
    for t in range(k):
        seq = np.arange(len(probs))
        reds = np.zeros(len(probs), dtype=np.int64)
        for bit in range(t):
            reds += (seq >> bit) & 1
        blues = t - reds
        bw = weight_array(spec.wf, spec.blue_arg(blues))
        rw = weight_array(spec.wf, spec.red_arg(reds))
        p_red = rw / (bw + rw)
        # blue copies keep their index, red copies land at index + 2^t,
        # so bit t of the final index is exactly the color of draw t
        probs = np.concatenate([probs * (1 - p_red), probs * p_red])
    return probs


def rubin_sequence_counts(
    spec: UrnSpec, k: int, samples: int, rng: RngStream
) -> tuple[np.ndarray, int]:
    """Empirical counts of the 2^k length-k sequences under the clock sampler.

    Vectorized across samples on a single stream (one lockstep uniform block
    per draw), so it is deliberately single-threaded; the law, not the
    stream layout, is what callers test.  Returns (counts, tie_count) with
    the same bit encoding as :func:`sequence_probs`.
    """
    if k > 20:
        raise ValueError("sequence enumeration capped at 20 draws")
    gen = rng.generator
    bw = spec.blue_weights(k + 1)
    rw = spec.red_weights(k + 1)
    n = int(samples)
    next_blue = exponential_from_uniform(gen.random(n), bw[0])
    next_red = exponential_from_uniform(gen.random(n), rw[0])
    blues = np.zeros(n, dtype=np.int64)
    reds = np.zeros(n, dtype=np.int64)
    code = np.zeros(n, dtype=np.int64)
    ties = 0
    for t in range(k):
        ties += int(np.count_nonzero(next_red == next_blue))
        red_drawn = next_red < next_blue
        code |= red_drawn.astype(np.int64) << t
        u = gen.random(n)
        reds[red_drawn] += 1
        blue_drawn = ~red_drawn
        blues[blue_drawn] += 1
        next_red[red_drawn] += exponential_from_uniform(u[red_drawn], rw[reds[red_drawn]])
        next_blue[blue_drawn] += exponential_from_uniform(u[blue_drawn], bw[blues[blue_drawn]])
    return np.bincount(code, minlength=2**k), ties
