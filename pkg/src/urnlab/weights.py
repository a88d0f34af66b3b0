"""Weight-function families.

A weight function is a positive function ``w`` on the nonnegative integers
whose reciprocal grows like ``n^alpha (1 + 2B/n + O(n^-2))`` for some
``alpha >= 0`` and real ``B`` (``alpha = 0`` only in the constant case
``B = 0``, which is plain coin flipping).  All limit laws verified by this
package are driven by such weights.  Three families are provided:

``specific``
    ``w(n) = (n+1)^(-alpha)`` exactly.  For this family the perturbation
    constant is not free: expanding ``(n+1)^alpha = n^alpha (1 + alpha/n +
    O(n^-2))`` forces ``B = alpha/2``.

``perturbed``
    ``1/w(n) = n^alpha + 2B n^(alpha-1)`` for ``n >= 1`` (the simplest
    family with the required expansion and a vanishing remainder), with
    ``w(0) = w0_override`` (default 1).  For negative ``B`` the raw formula
    can dip to zero or below; whenever ``n + 2B < 1/2`` the reciprocal is
    clamped to ``max(formula, max(n^alpha / 2, 1 / w(0)))``.  The clamp is
    inactive for ``n > -4B``, so it never touches the asymptotic regime.

``table``
    Explicit positive values for ``n < len(table)``, continued by the
    ``perturbed`` rule beyond.  A table of ones is the degenerate
    constant-weight case used as a simple-random-walk harness.

Weights are never required to be monotone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

FAMILIES = ("specific", "perturbed", "table")


@dataclass(frozen=True)
class WeightFunction:
    """A member of one of the three weight families.

    Construct via :func:`specific_power`, :func:`perturbed_power`,
    :func:`table_weights` or :func:`constant_weights` rather than directly.
    """

    family: str
    alpha: float
    bee: float = 0.0
    w0_override: float | None = None
    table: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown weight family {self.family!r}")
        if not (self.alpha >= 0):
            raise ValueError(f"alpha must be nonnegative, got {self.alpha}")
        if self.alpha == 0 and self.bee != 0:
            raise ValueError("alpha = 0 forces a constant tail, so B must be 0")
        if self.family == "specific":
            if self.w0_override is not None:
                raise ValueError("specific family fixes w(0) = 1; no override")
            # (n+1)^alpha = n^alpha (1 + alpha/n + O(n^-2)): B is forced.
            object.__setattr__(self, "bee", self.alpha / 2.0)
        if self.family == "table":
            if not self.table:
                raise ValueError("table family needs at least one entry")
            if any(not (t > 0) for t in self.table):
                raise ValueError("table entries must be positive")
        elif self.table is not None:
            raise ValueError(f"table given for family {self.family!r}")
        if self.w0_override is not None and not (self.w0_override > 0):
            raise ValueError("w0_override must be positive")

    @property
    def w0(self) -> float:
        if self.family == "specific":
            return 1.0
        if self.family == "table":
            return float(self.table[0])
        return 1.0 if self.w0_override is None else float(self.w0_override)


def specific_power(alpha: float) -> WeightFunction:
    """w(n) = (n+1)^(-alpha)."""
    return WeightFunction("specific", float(alpha))


def perturbed_power(alpha: float, bee: float = 0.0, w0: float | None = None) -> WeightFunction:
    """1/w(n) = n^alpha + 2B n^(alpha-1) for n >= 1, w(0) = w0 (default 1)."""
    return WeightFunction("perturbed", float(alpha), float(bee), w0)


def table_weights(table, alpha: float = 1.0, bee: float = 0.0) -> WeightFunction:
    """Explicit head values, perturbed-power tail with (alpha, B)."""
    return WeightFunction("table", float(alpha), float(bee), None, tuple(float(t) for t in table))


def constant_weights(length: int = 8192) -> WeightFunction:
    """w = 1 everywhere: the simple-random-walk harness.

    A table of ones continued by an ``alpha = 0`` tail, so the value is
    exactly 1 for every argument (``length`` only sets how much of that is
    stored as an explicit head) and the drift correction ``alpha D / i``
    vanishes identically.
    """
    return table_weights((1.0,) * int(length), alpha=0.0)


# ---------------------------------------------------------------------------
# evaluation


def inv_weight_array(wf: WeightFunction, n: np.ndarray, dtype=np.float64) -> np.ndarray:
    """Vectorized 1/w(n) for a nonnegative integer array ``n``.

    The reciprocal is the natural quantity for the perturbed family (its
    defining formula) and for the series below; it is computed directly,
    without forming w first.
    """
    n = np.asarray(n)
    if n.ndim == 0:
        return inv_weight_array(wf, n.reshape(1), dtype)[0]
    if np.any(n < 0):
        raise ValueError("weight argument must be nonnegative")
    x = n.astype(dtype)
    if wf.family == "specific":
        return np.power(x + 1, dtype(wf.alpha))

    out = np.empty(n.shape, dtype=dtype)
    if wf.family == "table":
        head = n < len(wf.table)
        out[head] = 1.0 / np.asarray(wf.table, dtype=dtype)[n[head]]
        rest = ~head
    else:
        zero = n == 0
        out[zero] = 1.0 / dtype(wf.w0)
        rest = ~zero
    if np.any(rest):
        xr = x[rest]
        raw = np.power(xr, dtype(wf.alpha)) + dtype(2 * wf.bee) * np.power(xr, dtype(wf.alpha - 1))
        clamp = xr + 2 * wf.bee < 0.5
        if np.any(clamp):
            floor = np.maximum(0.5 * np.power(xr[clamp], dtype(wf.alpha)), 1.0 / dtype(wf.w0))
            raw[clamp] = np.maximum(raw[clamp], floor)
        out[rest] = raw
    return out


def weight_array(wf: WeightFunction, n: np.ndarray, dtype=np.float64) -> np.ndarray:
    """Vectorized w(n)."""
    return 1.0 / inv_weight_array(wf, n, dtype)


def weight(wf: WeightFunction, n: int) -> float:
    """w(n) for a single nonnegative integer."""
    return float(weight_array(wf, np.asarray([n]))[0])


def log_weight(wf: WeightFunction, n: int) -> float:
    """log w(n), stable where n^alpha would over- or underflow.

    Agrees with ``log(weight(wf, n))`` to 1e-12 relative wherever the
    linear-scale value is representable.
    """
    if n < 0:
        raise ValueError("weight argument must be nonnegative")
    if wf.family == "specific":
        return -wf.alpha * math.log1p(n)
    if wf.family == "table" and n < len(wf.table):
        return math.log(wf.table[n])
    if wf.family == "perturbed" and n == 0:
        return -math.log(wf.w0)
    if n + 2 * wf.bee < 0.5 or n == 0:
        # clamp region only exists at small n; the direct value is safe there
        return -math.log(inv_weight_array(wf, np.asarray([n]))[0])
    return -(wf.alpha * math.log(n) + math.log1p(2 * wf.bee / n))


# ---------------------------------------------------------------------------
# series


def odd_even_series(wf: WeightFunction, n: int) -> float:
    """Partial sum  sum_{i<n} (1/w(2i+1) - 1/w(2i)).

    Telescoping cancellation makes naive accumulation lose digits by
    n = 10^6, so terms are combined with exact (error-free-transformation)
    summation.  The sum grows like ``2^(alpha-1) n^alpha``; callers check
    that ratio.
    """
    if n < 1:
        raise ValueError("series length must be >= 1")
    i = np.arange(n, dtype=np.int64)
    terms = inv_weight_array(wf, 2 * i + 1) - inv_weight_array(wf, 2 * i)
    return math.fsum(terms.tolist())


def odd_even_series_target(wf: WeightFunction, n: int) -> float:
    """The asymptotic value 2^(alpha-1) n^alpha the series is compared to."""
    return 2.0 ** (wf.alpha - 1.0) * float(n) ** wf.alpha


# ---------------------------------------------------------------------------
# certified envelopes (used by the truncation certificates in `oracle`)


def nonincreasing_from(wf: WeightFunction) -> int:
    """Smallest N such that w is certifiably nonincreasing on [N, inf).

    For the power families ``d/dn (n^alpha + 2B n^(alpha-1)) =
    n^(alpha-2) (alpha n + 2B(alpha-1))``, positive for
    ``n > -2B(alpha-1)/alpha``; the clamp region ends at ``1/2 - 2B``.
    Table heads are arbitrary, so the table length is a lower bound.
    """
    if wf.family == "specific":
        return 0
    if wf.alpha == 0:
        n_star = 1.0  # B = 0 is enforced, so the tail is exactly constant
    else:
        n_star = max(1.0, -2.0 * wf.bee * (wf.alpha - 1.0) / wf.alpha + 1.0, 0.5 - 2.0 * wf.bee)
    if wf.family == "table":
        n_star = max(n_star, float(len(wf.table)))
    return int(math.ceil(n_star))


def inv_weight_envelope(wf: WeightFunction, m0: int) -> float:
    """Constant A with 1/w(m) <= A * m^alpha for all m >= m0.

    Requires ``m0 >= nonincreasing_from(wf)`` and ``m0 >= 1`` so that the
    clamp and any table head are out of range.
    """
    if m0 < max(1, nonincreasing_from(wf)):
        raise ValueError("envelope start must clear the table/clamp region")
    if wf.family == "specific":
        return (1.0 + 1.0 / m0) ** wf.alpha
    return 1.0 + 2.0 * max(wf.bee, 0.0) / m0
