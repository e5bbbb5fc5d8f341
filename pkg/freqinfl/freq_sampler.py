"""Corpus-frequency temperature weighting.

An entry with corpus count c gets the sample weight c**tau and is drawn in a
single sampling step with probability weight / sum(weights). tau=0 gives
uniform sampling over entries, tau=1 raw corpus frequency sampling, negative
values favour rare entries.
"""
import logging
import math
from typing import List, Optional, Sequence

import numpy as np

from freqinfl.errors import DataError, EmptyInputError, NumericRangeError, UsageError
from freqinfl.schema import AppConfig, EntryKey, Lexicon, SamplingDistribution

logger = logging.getLogger(__name__)

LOG_MAX_RATIO = math.log(AppConfig.MAX_WEIGHT_RATIO)


def compute_weights(
    counts: Sequence[int],
    tau: float,
    entry_ids: Optional[Sequence[object]] = None,
) -> np.ndarray:
    """``counts[i] ** tau`` as float64, refusing to overflow or flush entries to zero"""
    tau = float(tau)
    if not math.isfinite(tau):
        raise NumericRangeError(f"temperature must be finite, got {tau}")
    counts_arr = np.asarray(counts, dtype=np.float64)
    if counts_arr.size == 0:
        return counts_arr
    bad = np.flatnonzero((counts_arr < 1) | (counts_arr != np.floor(counts_arr)))
    if bad.size:
        raise DataError(f"counts must be integers >= 1, got {counts_arr[bad[0]]} at position {bad[0]}")

    def name(i: int) -> object:
        return entry_ids[i] if entry_ids is not None else f"#{i} (count {int(counts_arr[i])})"

    log_weights = tau * np.log(counts_arr)
    heaviest, lightest = int(np.argmax(log_weights)), int(np.argmin(log_weights))
    if log_weights[heaviest] - log_weights[lightest] > LOG_MAX_RATIO:
        raise NumericRangeError(
            f"weight ratio exceeds {AppConfig.MAX_WEIGHT_RATIO:g} at tau={tau}; "
            f"heaviest entry {name(heaviest)}",
            entry=name(lightest),
        )
    with np.errstate(over="ignore", under="ignore"):
        weights = np.power(counts_arr, tau)
    if not np.isfinite(weights[heaviest]):
        raise NumericRangeError(f"weight overflows at tau={tau}", entry=name(heaviest))
    if weights[lightest] <= 0.0:
        raise NumericRangeError(f"weight underflows to zero at tau={tau}", entry=name(lightest))
    return weights


def distribution(lexicon: Lexicon, tau: float) -> SamplingDistribution:
    if not lexicon.entries:
        raise EmptyInputError("cannot build a sampling distribution over an empty lexicon")
    entry_ids: List[EntryKey] = [entry.key for entry in lexicon.entries]
    weights = compute_weights(lexicon.counts, tau, entry_ids)
    total = weights.sum()
    if not np.isfinite(total):
        raise NumericRangeError(f"sum of weights overflows at tau={tau}")
    probabilities = weights / total
    assert abs(probabilities.sum() - 1.0) <= 1e-12
    return SamplingDistribution(
        entry_ids=tuple(entry_ids),
        weights=weights,
        probabilities=probabilities,
        tau=float(tau),
    )


def draw_indices(dist: SamplingDistribution, n: int, seed: int) -> np.ndarray:
    """``n`` independent categorical draws (with replacement) as entry positions"""
    if n < 1:
        raise UsageError(f"number of draws must be positive, got {n}")
    rng = np.random.default_rng(seed)
    return rng.choice(len(dist.entry_ids), size=n, replace=True, p=dist.probabilities)


def draw(dist: SamplingDistribution, n: int, seed: int) -> List[EntryKey]:
    return [dist.entry_ids[i] for i in draw_indices(dist, n, seed)]


def draw_counts(dist: SamplingDistribution, n: int, seed: int) -> np.ndarray:
    """How often each entry was drawn in ``n`` draws"""
    return np.bincount(draw_indices(dist, n, seed), minlength=len(dist.entry_ids))
