"""The polynomially self-repelling walk, built two ways.

The walk X_n on the integers steps right from x with probability

    w(l_n(x)) / (w(l_n(x)) + w(l_n(x-1))),

where ``l_n(x)`` is the local time of the *edge* {x, x+1}: the number of
crossings, in either direction, made by time n.  Crossed edges carry
smaller weight, so the walk is pushed toward fresh territory.

The same law arises by composition of independent urns, one per site:
standing at x, draw from x's urn and step right on red, left on blue.
Sites right of the origin use the "plus" side, left of the origin "minus",
the origin itself "zero".  With left-draws i and right-draws j already
made at x, closed excursions force the edge local times to be

    site x > 0:  l(x-1) = 2i + 1,  l(x)   = 2j
    site x < 0:  l(x)   = 2j + 1,  l(x-1) = 2i
    site x = 0:  l(x-1) = 2i,      l(x)   = 2j,

which is exactly the side table of :mod:`urnlab.urn`.  The equality of the
two constructions' path laws is checked exhaustively (all 2^10 paths) in
the acceptance battery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .rng import RngStream, site_stream_id
from .urn import UrnSpec, UrnState, step_prob_red
from .weights import WeightFunction, log_weight

PATH_PROB_CAP = 24


@dataclass
class WalkState:
    """Walk position, time, and the edge local-time field.

    Local times live in a dense array re-centred with an offset (the range
    is just the walk's span, and the array is the hot path); the
    ``edge_local_times`` property exposes the conventional sparse map
    {x: l(x)} over nonzero entries.
    """

    position: int = 0
    time: int = 0
    _lt: np.ndarray = field(default_factory=lambda: np.zeros(64, dtype=np.int64))
    _offset: int = 32  # array index of edge {0, 1}

    @property
    def edge_local_times(self) -> dict[int, int]:
        nz = np.nonzero(self._lt)[0]
        return {int(x - self._offset): int(self._lt[x]) for x in nz}

    def local_time(self, x: int) -> int:
        """l(x): crossings of edge {x, x+1} so far."""
        k = x + self._offset
        if k < 0 or k >= len(self._lt):
            return 0
        return int(self._lt[k])

    def _bump(self, x: int) -> None:
        k = x + self._offset
        if k < 0 or k >= len(self._lt):
            grow = len(self._lt)
            self._lt = np.concatenate(
                [np.zeros(grow, dtype=np.int64), self._lt, np.zeros(grow, dtype=np.int64)]
            )
            self._offset += grow
            k = x + self._offset
        self._lt[k] += 1

    def apply_step(self, step: int) -> None:
        """Move by step (+1 or -1), updating time and the crossed edge."""
        self._bump(self.position if step > 0 else self.position - 1)
        self.position += step
        self.time += 1


def right_step_prob(state: WalkState, wf: WeightFunction) -> float:
    """The transition law at the current position, from edge local times."""
    d = log_weight(wf, state.local_time(state.position - 1)) - log_weight(
        wf, state.local_time(state.position)
    )
    return 1.0 / (1.0 + math.exp(d))


def walk_step_direct(state: WalkState, wf: WeightFunction, rng: RngStream) -> WalkState:
    """One step straight from the transition law.  Mutates and returns state."""
    step = 1 if rng.uniform() < right_step_prob(state, wf) else -1
    state.apply_step(step)
    return state


def side_for_site(x: int) -> str:
    return "zero" if x == 0 else ("plus" if x > 0 else "minus")


class SiteUrnBank:
    """Lazily created per-site urns driving the composed construction.

    Each site consumes its own stream, with an id derived from the signed
    site coordinate (and the owning walk's stream id), so the path law
    never depends on visit order or on how replicas are scheduled.
    """

    def __init__(self, wf: WeightFunction, master_seed: int, base_stream_id: int = 0):
        self.wf = wf
        self.master_seed = master_seed
        self.base_stream_id = base_stream_id
        self._specs = {side: UrnSpec(side, wf) for side in ("plus", "minus", "zero")}
        self._counts: dict[int, list[int]] = {}
        self._streams: dict[int, RngStream] = {}

    def counts(self, x: int) -> tuple[int, int]:
        """(blues, reds) = (left, right) draws made so far at site x."""
        c = self._counts.get(x)
        return (0, 0) if c is None else (c[0], c[1])

    def draw(self, x: int) -> int:
        """Draw at site x: +1 (red, step right) or -1 (blue, step left)."""
        c = self._counts.setdefault(x, [0, 0])
        stream = self._streams.get(x)
        if stream is None:
            stream = RngStream(self.master_seed, site_stream_id(self.base_stream_id, x))
            self._streams[x] = stream
        spec = self._specs[side_for_site(x)]
        p_red = step_prob_red(spec, UrnState(c[0], c[1]))
        red = stream.uniform() < p_red
        c[1 if red else 0] += 1
        return 1 if red else -1


def walk_step_urn(state: WalkState, bank: SiteUrnBank) -> WalkState:
    """One step by drawing from the urn at the current site."""
    state.apply_step(bank.draw(state.position))
    return state


def walk_path_prob(path, wf: WeightFunction, mode: str = "direct") -> float:
    """Exact probability of a finite path of +/-1 steps from the origin.

    Replays the path deterministically, multiplying per-step conditional
    probabilities of the chosen construction.  Capped at 24 steps (the
    callers enumerate all paths of a length, and 2^24 is the sane limit).
    """
    if mode not in ("direct", "urn"):
        raise ValueError(f"unknown mode {mode!r}")
    steps = list(path)
    if len(steps) > PATH_PROB_CAP:
        raise ValueError(f"path length {len(steps)} exceeds cap {PATH_PROB_CAP}")
    if any(s not in (1, -1) for s in steps):
        raise ValueError("path steps must be +1 or -1")
    prob = 1.0
    if mode == "direct":
        state = WalkState()
        for s in steps:
            p_right = right_step_prob(state, wf)
            prob *= p_right if s == 1 else 1.0 - p_right
            state.apply_step(s)
    else:
        specs = {side: UrnSpec(side, wf) for side in ("plus", "minus", "zero")}
        counts: dict[int, list[int]] = {}
        x = 0
        for s in steps:
            c = counts.setdefault(x, [0, 0])
            p_red = step_prob_red(specs[side_for_site(x)], UrnState(c[0], c[1]))
            prob *= p_red if s == 1 else 1.0 - p_red
            c[1 if s == 1 else 0] += 1
            x += s
    return prob


def sample_walk(
    wf: WeightFunction, steps: int, rng: RngStream, mode: str = "direct"
) -> tuple[np.ndarray, WalkState]:
    """Run one walk for ``steps`` steps; returns (positions after each step, final state).

    In "urn" mode the site bank derives its streams from ``rng.stream_id``,
    so a replica's stream id fans out over its sites.
    """
    state = WalkState()
    positions = np.empty(steps, dtype=np.int64)
    if mode == "direct":
        for t in range(steps):
            walk_step_direct(state, wf, rng)
            positions[t] = state.position
    elif mode == "urn":
        bank = SiteUrnBank(wf, rng.master_seed, rng.stream_id)
        for t in range(steps):
            walk_step_urn(state, bank)
            positions[t] = state.position
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return positions, state
