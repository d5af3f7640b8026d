"""Replayable per-site randomness: Poisson clocks and attached uniforms.

Every random quantity in a simulation is a pure function of
(master_seed, site, index, lane), computed by a counter-based integer hash
(two chained splitmix64-style avalanche rounds per folded coordinate).
This makes the j-th arrival time and j-th decision uniform at a site
independent of the window, of the query order, and of what happens at
other sites, so several processes driven by the same seed literally share
one noise realization.

Lanes: 0 = inter-arrival timing uniform, 1 = decision uniform,
2 = initial-condition uniform (the per-site V used for spin sampling,
with `index` acting as an independent series id).
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MULT1 = 0xBF58476D1CE4E5B9
_MULT2 = 0x94D049BB133111EB
_INV53 = 2.0 ** -53

LANE_TIME = 0
LANE_DECISION = 1
LANE_INIT = 2


def _mix(z: int) -> int:
    """splitmix64 finalizer on a 64-bit word."""
    z ^= z >> 30
    z = (z * _MULT1) & MASK64
    z ^= z >> 27
    z = (z * _MULT2) & MASK64
    z ^= z >> 31
    return z


def draw_u64(seed: int, site: int, index: int, lane: int) -> int:
    """64-bit word for the given counter coordinates; bit-exact everywhere."""
    z = (seed + _GAMMA) & MASK64
    z = _mix(z ^ ((site * _MULT1) & MASK64))
    z = _mix(z ^ ((index * _MULT2) & MASK64))
    z = _mix((z + lane) & MASK64)
    return z


def uniform(seed: int, site: int, index: int, lane: int) -> float:
    """Uniform in [0, 1) with 53 random bits."""
    return (draw_u64(seed, site, index, lane) >> 11) * _INV53


def interarrival(seed: int, site: int, index: int) -> float:
    """Exp(1) waiting time before arrival `index` (1-based), via inverse CDF.

    A zero timing uniform (probability 2^-53) is nudged to 2^-53 so waits
    are strictly positive.
    """
    u = uniform(seed, site, index, LANE_TIME)
    if u == 0.0:
        u = _INV53
    return -math.log1p(-u)


def uniform_array(seed: int, sites, indices, lane: int) -> np.ndarray:
    """Vectorized `uniform` over broadcastable site/index arrays."""
    s = np.asarray(sites, dtype=np.int64).astype(np.uint64)
    j = np.asarray(indices, dtype=np.int64).astype(np.uint64)
    s, j = np.broadcast_arrays(s, j)
    z0 = np.uint64((seed + _GAMMA) & MASK64)
    z = _mix_arr(z0 ^ (s * np.uint64(_MULT1)))
    z = _mix_arr(z ^ (j * np.uint64(_MULT2)))
    z = _mix_arr(z + np.uint64(lane))
    return (z >> np.uint64(11)).astype(np.float64) * _INV53


def _mix_arr(z: np.ndarray) -> np.ndarray:
    z = z ^ (z >> np.uint64(30))
    z = z * np.uint64(_MULT1)
    z = z ^ (z >> np.uint64(27))
    z = z * np.uint64(_MULT2)
    z = z ^ (z >> np.uint64(31))
    return z


def arrival_times(seed: int, site: int, t_max: float) -> np.ndarray:
    """All arrival times at a site up to t_max, in increasing order."""
    out = []
    t = 0.0
    j = 1
    while True:
        t += interarrival(seed, site, j)
        if t > t_max:
            break
        out.append(t)
        j += 1
    return np.asarray(out)


class SiteUniforms:
    """Per-site initial-condition uniforms V(x), one independent value per
    (seed, site, series). Shared across densities, so thresholding the same
    series at increasing p gives sitewise-monotone spin configurations."""

    def __init__(self, seed: int, series: int = 0):
        self.seed = seed
        self.series = series

    def __call__(self, site: int) -> float:
        return uniform(self.seed, site, self.series, LANE_INIT)

    def array(self, lo: int, hi: int) -> np.ndarray:
        return uniform_array(self.seed, np.arange(lo, hi + 1), self.series, LANE_INIT)


@dataclass(frozen=True, slots=True)
class Event:
    """One clock ring: absolute time, site, decision uniform, arrival index."""

    time: float
    site: int
    uniform: float
    index: int


def exchange_decision(u: float, sign: int, lambda_plus: float) -> bool:
    """Whether a particle of the given sign acts on decision uniform u.

    A +1 particle acts iff u < lambda_plus; a -1 particle iff u > lambda_plus,
    so it acts with probability lambda_minus.
    """
    if sign == 1:
        return u < lambda_plus
    if sign == -1:
        return u > lambda_plus
    raise ValueError(f"sign must be +1 or -1, got {sign}")


class EventStream:
    """Merged rate-1 Poisson arrivals over a window of sites.

    Delivery order is (time, site): globally earliest pending arrival first,
    equal times (possible only through float collision) broken by lower site.
    Two streams with the same seed and overlapping windows produce identical
    per-site event subsequences.
    """

    def __init__(self, master_seed: int, lo: int, hi: int):
        if hi < lo:
            raise ValueError("empty window")
        self.master_seed = master_seed
        self.lo = lo
        self.hi = hi
        self.horizon = 0.0
        self._count = {}
        heap = []
        for x in range(lo, hi + 1):
            heap.append((interarrival(master_seed, x, 1), x))
            self._count[x] = 0
        heapq.heapify(heap)
        self._heap = heap

    def peek_time(self) -> float:
        return self._heap[0][0]

    def next_event(self) -> Event:
        t, x = self._heap[0]
        j = self._count[x] + 1
        self._count[x] = j
        u = uniform(self.master_seed, x, j, LANE_DECISION)
        heapq.heapreplace(self._heap, (t + interarrival(self.master_seed, x, j + 1), x))
        self.horizon = t
        return Event(t, x, u, j)

    def arrival_count(self, site: int, t: float) -> int:
        """N_x(t), counted afresh from the pure per-site functions."""
        n = 0
        s = 0.0
        j = 1
        while True:
            s += interarrival(self.master_seed, site, j)
            if s > t:
                return n
            n += 1
            j += 1

    def thinned_counts(self, site: int, t: float, lambda_plus: float) -> tuple[int, int]:
        """(N_plus, N_minus) at a site up to time t: arrivals split by whether
        the decision uniform is <= lambda_plus. The two always sum to N_x(t)."""
        np_, nm = 0, 0
        s = 0.0
        j = 1
        while True:
            s += interarrival(self.master_seed, site, j)
            if s > t:
                return np_, nm
            if uniform(self.master_seed, site, j, LANE_DECISION) <= lambda_plus:
                np_ += 1
            else:
                nm += 1
            j += 1
