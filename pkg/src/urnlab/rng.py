"""Deterministic random-number streams.

Every stochastic routine in this package draws from an ``RngStream``
identified by a ``(master_seed, stream_id)`` pair.  The variates produced by
a stream are a pure function of that pair: they do not depend on thread
scheduling, on how many replicas run beside it, or on the block sizes used
to fetch uniforms.

Stream ids are derived with a splitmix-style 64-bit hash (``splitmix64``).
The derivation scheme is frozen:

* replica ``i``            -> ``splitmix64(REPLICA_SALT ^ i)``
* walk site ``x`` within a -> ``splitmix64(base ^ (SITE_SALT + site_key(x)))``
  walk whose own stream id    where ``site_key(x) = 3|x| + sign_code`` and
  is ``base``                 sign_code is 0 at the origin, 1 right, 2 left.

Changing any of these constants changes every sampled trajectory, so they
are part of the reproducibility contract.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_MASK64 = (1 << 64) - 1

REPLICA_SALT = 0x9D2C5F8D1E3779B9
SITE_SALT = 0x5851F42D4C957F2D


def splitmix64(x: int) -> int:
    """One splitmix64 mixing step of ``x`` (mod 2^64).

    ``splitmix64(s)`` equals the first output of the classic splitmix64
    generator seeded with ``s``.
    """
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def replica_stream_id(replica_index: int) -> int:
    """Frozen stream id for an independent replica."""
    return splitmix64(REPLICA_SALT ^ (replica_index & _MASK64))


def site_stream_id(base: int, site: int) -> int:
    """Frozen stream id for the urn at walk site ``site``.

    ``base`` is the stream id of the walk replica that owns the site bank
    (0 for a standalone walk), so distinct replicas get disjoint site
    streams.  The map ``site -> 3|site| + sign`` is injective over signed
    integers.
    """
    sign_code = 0 if site == 0 else (1 if site > 0 else 2)
    key = 3 * abs(site) + sign_code
    return splitmix64((base ^ (SITE_SALT + key)) & _MASK64)


@dataclass
class RngStream:
    """A named, reproducible uniform stream.

    The underlying bit generator is PCG64 seeded with
    ``SeedSequence((master_seed, stream_id))``.  Uniforms may be fetched in
    blocks of any size; the concatenated output depends only on the seed
    pair (numpy generators fill requests sequentially from the bit stream).
    """

    master_seed: int
    stream_id: int
    _gen: np.random.Generator | None = field(default=None, repr=False, compare=False)

    @property
    def generator(self) -> np.random.Generator:
        if self._gen is None:
            self._gen = fresh_generator(self.master_seed, self.stream_id)
        return self._gen

    def uniforms(self, n: int) -> np.ndarray:
        """Next ``n`` uniforms in [0, 1)."""
        return self.generator.random(n)

    def uniform(self) -> float:
        """Next single uniform in [0, 1)."""
        return float(self.generator.random())

    def spawn(self, label: int) -> "RngStream":
        """Derived stream: same master seed, id hashed from (id, label)."""
        return RngStream(self.master_seed, splitmix64(self.stream_id ^ splitmix64(label)))


def fresh_generator(master_seed: int, stream_id: int) -> np.random.Generator:
    """A new PCG64 generator at the start of stream (master_seed, stream_id)."""
    ss = np.random.SeedSequence((master_seed & _MASK64, stream_id & _MASK64))
    return np.random.Generator(np.random.PCG64(ss))


def exponential_from_uniform(u: float | np.ndarray, rate: float | np.ndarray):
    """Inverse-CDF sample of Exp(rate) from a uniform in [0, 1).

    Uses ``-log1p(-u)/rate``, the inverse CDF evaluated at ``u`` (identical
    in law to ``-log(u)/rate`` but finite for u = 0, which numpy's
    half-open uniforms can produce).  Inverse-CDF sampling keeps replay
    reproducible across platforms and library versions.
    """
    return -np.log1p(-u) / rate
