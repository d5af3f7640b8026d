"""Compiled event loops for large Monte Carlo runs.

Each kernel reproduces the object-layer dynamics exactly: the same
counter-based draws (bit-identical to `randomness`), the same (time, site)
event ordering, and the same transition function as `engine.step`. Spins
are uint8 arrays (1 = +1). Kernels are resumable: state lives in arrays
owned by `SimState` and each call advances to a requested time, so
measurement code can read spins between segments.

Pending arrivals are kept in a calendar queue: a ring of time buckets
(about two pending events per bucket) over a span of 40 time units, which
exceeds the largest representable Exp(1) draw (-log 2^-53 ~ 36.74), so an
inserted arrival can never lap the ring. Events inside a bucket are
delivered in exact (time, site) order.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .core import SpinConfig
from .randomness import interarrival

_U64 = np.uint64
_C_GAMMA = _U64(0x9E3779B97F4A7C15)
_C_MULT1 = _U64(0xBF58476D1CE4E5B9)
_C_MULT2 = _U64(0x94D049BB133111EB)
_INV53 = 2.0 ** -53

_RING_SPAN = 40.0  # > max Exp(1) draw, so insertions never wrap onto live buckets


@njit(inline="always", cache=True)
def _mix(z):
    z ^= z >> _U64(30)
    z = z * _C_MULT1
    z ^= z >> _U64(27)
    z = z * _C_MULT2
    z ^= z >> _U64(31)
    return z


@njit(inline="always", cache=True)
def _uniform(seed, site, index, lane):
    z = seed + _C_GAMMA
    z = _mix(z ^ (site * _C_MULT1))
    z = _mix(z ^ (index * _C_MULT2))
    z = _mix(z + lane)
    return float(z >> _U64(11)) * _INV53


@njit(inline="always", cache=True)
def _interarrival(seed, site, index):
    u = _uniform(seed, site, index, _U64(0))
    if u == 0.0:
        u = _INV53
    return -math.log1p(-u)


@njit(inline="always", cache=True)
def _decision(seed, site, index):
    return _uniform(seed, site, index, _U64(1))


@njit(inline="always", cache=True)
def _cal_insert(heads, nxt, inv_dt, n_buckets, site, t):
    b = np.int64(t * inv_dt) % n_buckets
    nxt[site] = heads[b]
    heads[b] = site


@njit(inline="always", cache=True)
def _cal_peek(heads, nxt, times, inv_dt, n_buckets, cursor):
    """(cursor', site) of the earliest pending arrival in (time, site)
    order; scans forward from the cursor bucket. Never removes."""
    while True:
        b = cursor % n_buckets
        s = heads[b]
        if s >= 0:
            best = s
            s = nxt[s]
            while s >= 0:
                if times[s] < times[best] or (times[s] == times[best] and s < best):
                    best = s
                s = nxt[s]
            return cursor, best
        cursor += 1


@njit(inline="always", cache=True)
def _cal_remove(heads, nxt, n_buckets, cursor, site):
    b = cursor % n_buckets
    s = heads[b]
    if s == site:
        heads[b] = nxt[site]
        return
    while nxt[s] != site:
        s = nxt[s]
    nxt[s] = nxt[site]


@njit(inline="always", cache=True)
def _reschedule(seed, lo, times, pend, heads, nxt, inv_dt, n_buckets, cursor, site):
    """Replace the just-delivered arrival at `site` by the next one."""
    _cal_remove(heads, nxt, n_buckets, cursor, site)
    j = pend[site] + _U64(1)
    pend[site] = j
    t_next = times[site] + _interarrival(seed, _U64(np.int64(lo + site)), j)
    times[site] = t_next
    _cal_insert(heads, nxt, inv_dt, n_buckets, site, t_next)


@njit(inline="always", cache=True)
def _first_opposite(spins, s):
    sp = spins[s]
    for j in range(s + 1, spins.shape[0]):
        if spins[j] != sp:
            return j
    return -1


@njit(cache=True)
def k_run(seed, lo, spins, times, pend, heads, nxt, inv_dt, cursor0, t_end,
          frozen_off, lam_plus):
    """Plain evolution of one window through events with time < t_end.
    Returns (events_processed, cursor)."""
    n_buckets = heads.shape[0]
    cursor = cursor0
    n_ev = 0
    while True:
        cursor, s = _cal_peek(heads, nxt, times, inv_dt, n_buckets, cursor)
        if times[s] >= t_end:
            return n_ev, cursor
        n_ev += 1
        if s >= frozen_off:
            u = _decision(seed, _U64(np.int64(lo + s)), pend[s])
            sp = spins[s]
            if (u < lam_plus) if sp == 1 else (u > lam_plus):
                z = _first_opposite(spins, s)
                if z < 0:
                    spins[s] = 1 - sp
                else:
                    spins[s] = spins[z]
                    spins[z] = sp
        _reschedule(seed, lo, times, pend, heads, nxt, inv_dt, n_buckets, cursor, s)


@njit(cache=True)
def k_run_current(seed, lo, spins, times, pend, heads, nxt, inv_dt, cursor0, t_end,
                  frozen_off, lam_plus, level_off):
    """Evolution counting the particle current through a level: exchanges
    (and flips, whose partner lies beyond the window) moving a particle from
    source < level to destination >= level, split by moved-particle sign.
    Returns (plus, minus, cursor)."""
    n_buckets = heads.shape[0]
    cursor = cursor0
    jp = 0
    jm = 0
    while True:
        cursor, s = _cal_peek(heads, nxt, times, inv_dt, n_buckets, cursor)
        if times[s] >= t_end:
            return jp, jm, cursor
        if s >= frozen_off:
            u = _decision(seed, _U64(np.int64(lo + s)), pend[s])
            sp = spins[s]
            if (u < lam_plus) if sp == 1 else (u > lam_plus):
                z = _first_opposite(spins, s)
                if z < 0:
                    spins[s] = 1 - sp
                    if s < level_off:
                        if sp == 1:
                            jp += 1
                        else:
                            jm += 1
                else:
                    spins[s] = spins[z]
                    spins[z] = sp
                    if s < level_off and z >= level_off:
                        if sp == 1:
                            jp += 1
                        else:
                            jm += 1
        _reschedule(seed, lo, times, pend, heads, nxt, inv_dt, n_buckets, cursor, s)


@njit(cache=True)
def k_run_profile(seed, lo, spins, times, pend, heads, nxt, inv_dt, cursor0, t_end,
                  frozen_off, lam_plus, acc, last):
    """Evolution accumulating per-site time integrals of the +-1 spin into
    `acc`; flushed through t_end on return so acc is exact for the segment."""
    n_buckets = heads.shape[0]
    cursor = cursor0
    while True:
        cursor, s = _cal_peek(heads, nxt, times, inv_dt, n_buckets, cursor)
        t = times[s]
        if t >= t_end:
            break
        if s >= frozen_off:
            u = _decision(seed, _U64(np.int64(lo + s)), pend[s])
            sp = spins[s]
            if (u < lam_plus) if sp == 1 else (u > lam_plus):
                z = _first_opposite(spins, s)
                acc[s] += (2.0 * sp - 1.0) * (t - last[s])
                last[s] = t
                if z < 0:
                    spins[s] = 1 - sp
                else:
                    acc[z] += (2.0 * spins[z] - 1.0) * (t - last[z])
                    last[z] = t
                    spins[s] = spins[z]
                    spins[z] = sp
        _reschedule(seed, lo, times, pend, heads, nxt, inv_dt, n_buckets, cursor, s)
    for i in range(spins.shape[0]):
        acc[i] += (2.0 * spins[i] - 1.0) * (t_end - last[i])
        last[i] = t_end
    return cursor


@njit(cache=True)
def k_run_replicas(seed, lo, spins2, times, pend, heads, nxt, inv_dt, cursor0, t_end,
                   frozen_off, lam_plus, check_order):
    """Evolution of R replicas under shared events; optionally counts
    sitewise-order violations between consecutive replicas at touched sites
    after every event. Returns (violations, cursor)."""
    n_buckets = heads.shape[0]
    cursor = cursor0
    n_rep, width = spins2.shape
    touched = np.empty(n_rep + 1, np.int64)
    violations = 0
    while True:
        cursor, s = _cal_peek(heads, nxt, times, inv_dt, n_buckets, cursor)
        if times[s] >= t_end:
            return violations, cursor
        if s >= frozen_off:
            u = _decision(seed, _U64(np.int64(lo + s)), pend[s])
            n_touch = 1
            touched[0] = s
            for r in range(n_rep):
                sp = spins2[r, s]
                if (u < lam_plus) if sp == 1 else (u > lam_plus):
                    z = -1
                    for j in range(s + 1, width):
                        if spins2[r, j] != sp:
                            z = j
                            break
                    if z < 0:
                        spins2[r, s] = 1 - sp
                    else:
                        spins2[r, s] = spins2[r, z]
                        spins2[r, z] = sp
                        touched[n_touch] = z
                        n_touch += 1
            if check_order:
                for i in range(n_touch):
                    o = touched[i]
                    for r in range(n_rep - 1):
                        if spins2[r, o] > spins2[r + 1, o]:
                            violations += 1
        _reschedule(seed, lo, times, pend, heads, nxt, inv_dt, n_buckets, cursor, s)


@njit(cache=True)
def k_run_coalesce(seed, lo, spins2, times, pend, heads, nxt, inv_dt, cursor0, t_end,
                   frozen_off, lam_plus, diffs):
    """Evolution of R replicas through events with time <= t_end, tracking
    per-replica disagreement counts against replica 0. Returns
    (first time all replicas agree or inf, number still disagreeing, cursor)."""
    n_buckets = heads.shape[0]
    cursor = cursor0
    n_rep, width = spins2.shape
    n_open = 0
    for r in range(1, n_rep):
        if diffs[r] > 0:
            n_open += 1
    tau = math.inf if n_open > 0 else 0.0
    while n_open > 0:
        cursor, s = _cal_peek(heads, nxt, times, inv_dt, n_buckets, cursor)
        t = times[s]
        if t > t_end:
            break
        if s >= frozen_off:
            u = _decision(seed, _U64(np.int64(lo + s)), pend[s])
            # replica 0 first, remembering its pre-event values
            old0_s = spins2[0, s]
            sp = old0_s
            act0 = (u < lam_plus) if sp == 1 else (u > lam_plus)
            z0 = -1
            old0_z0 = np.uint8(0)
            if act0:
                z0 = _first_opposite(spins2[0], s)
                if z0 < 0:
                    spins2[0, s] = 1 - sp
                else:
                    old0_z0 = spins2[0, z0]
                    spins2[0, s] = old0_z0
                    spins2[0, z0] = sp
            for r in range(1, n_rep):
                sp = spins2[r, s]
                act = (u < lam_plus) if sp == 1 else (u > lam_plus)
                zr = _first_opposite(spins2[r], s) if act else -1
                # pre-event disagreement with replica 0 at the affected
                # sites {s, z0, zr}; partners exceed s, and replica 0's
                # pre-event value away from s and z0 is still in place
                d = diffs[r]
                d -= spins2[r, s] != old0_s
                if z0 >= 0:
                    d -= spins2[r, z0] != old0_z0
                if zr >= 0 and zr != z0:
                    d -= spins2[r, zr] != spins2[0, zr]
                if act:
                    if zr < 0:
                        spins2[r, s] = 1 - sp
                    else:
                        spins2[r, s] = spins2[r, zr]
                        spins2[r, zr] = sp
                d += spins2[r, s] != spins2[0, s]
                if z0 >= 0:
                    d += spins2[r, z0] != spins2[0, z0]
                if zr >= 0 and zr != z0:
                    d += spins2[r, zr] != spins2[0, zr]
                if diffs[r] > 0 and d == 0:
                    n_open -= 1
                elif diffs[r] == 0 and d > 0:
                    n_open += 1
                diffs[r] = d
            if n_open == 0 and tau == math.inf:
                tau = t
        _reschedule(seed, lo, times, pend, heads, nxt, inv_dt, n_buckets, cursor, s)
    return tau, n_open, cursor


class SimState:
    """Resumable kernel state for one window: spins (uint8, possibly one row
    per replica), per-site pending arrivals in a calendar queue, and the
    per-site arrival index."""

    def __init__(self, seed: int, cfg, frozen_left_at: int | None = None):
        if isinstance(cfg, SpinConfig):
            self.lo = cfg.lo
            self.spins = cfg.to_u8()
            width = cfg.n
        else:
            cfgs = list(cfg)
            self.lo = cfgs[0].lo
            width = cfgs[0].n
            if any(c.lo != self.lo or c.n != width for c in cfgs):
                raise ValueError("replicas must share a window")
            self.spins = np.stack([c.to_u8() for c in cfgs])
        self.seed = np.uint64(seed)
        self.width = width
        self.frozen_off = 0
        if frozen_left_at is not None:
            self.frozen_off = max(0, frozen_left_at - self.lo)
        # calendar geometry: ~2 pending arrivals per bucket
        bucket_dt = 2.0 / width
        self.n_buckets = int(math.ceil(_RING_SPAN / bucket_dt))
        self.inv_dt = 1.0 / bucket_dt
        self.times = np.empty(width)
        self.pend = np.ones(width, dtype=np.uint64)
        self.heads = np.full(self.n_buckets, -1, dtype=np.int64)
        self.nxt = np.full(width, -1, dtype=np.int64)
        self.cursor = 0
        for i in range(width):
            t = interarrival(seed, self.lo + i, 1)
            self.times[i] = t
            b = int(t * self.inv_dt) % self.n_buckets
            self.nxt[i] = self.heads[b]
            self.heads[b] = i
        self.t = 0.0

    def _sched(self):
        return (self.times, self.pend, self.heads, self.nxt, self.inv_dt, self.cursor)

    def config(self, row: int | None = None) -> SpinConfig:
        spins = self.spins if row is None and self.spins.ndim == 1 else self.spins[row]
        return SpinConfig.from_u8(self.lo, spins)

    def run_to(self, t_end: float, lam_plus: float) -> int:
        n, self.cursor = k_run(
            self.seed, self.lo, self.spins, *self._sched(), t_end,
            self.frozen_off, lam_plus,
        )
        self.t = t_end
        return n

    def run_current_to(self, t_end: float, lam_plus: float, level: int):
        jp, jm, self.cursor = k_run_current(
            self.seed, self.lo, self.spins, *self._sched(), t_end,
            self.frozen_off, lam_plus, level - self.lo,
        )
        self.t = t_end
        return jp, jm

    def run_profile_to(self, t_end: float, lam_plus: float, acc, last) -> None:
        self.cursor = k_run_profile(
            self.seed, self.lo, self.spins, *self._sched(), t_end,
            self.frozen_off, lam_plus, acc, last,
        )
        self.t = t_end

    def run_replicas_to(self, t_end: float, lam_plus: float, check_order: bool = False) -> int:
        v, self.cursor = k_run_replicas(
            self.seed, self.lo, self.spins, *self._sched(), t_end,
            self.frozen_off, lam_plus, check_order,
        )
        self.t = t_end
        return v

    def run_coalesce_to(self, t_end: float, lam_plus: float):
        diffs = (self.spins[1:] != self.spins[0]).sum(axis=1)
        diffs = np.concatenate([[0], diffs]).astype(np.int64)
        tau, n_open, self.cursor = k_run_coalesce(
            self.seed, self.lo, self.spins, *self._sched(), t_end,
            self.frozen_off, lam_plus, diffs,
        )
        self.t = t_end
        return tau, n_open
