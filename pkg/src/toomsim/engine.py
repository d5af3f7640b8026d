"""Single-trajectory event-driven evolution of one spin window.

One transition function serves the finite chain, the half-line chain and
frozen-left cutoffs: the right window edge flips a spin whose suffix is
constant sign (the restriction of the infinite partner search), and sites
left of the freeze threshold ignore their clocks.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import ModelParams, SpinConfig
from .randomness import Event, EventStream, exchange_decision

NOOP = "noop"
EXCHANGE = "exchange"
FLIP = "flip"


@dataclass(frozen=True, slots=True)
class BoundaryPolicy:
    """Arrivals at sites < frozen_left_at are ignored; the right edge always
    flips when no opposite-sign partner exists in the window."""

    frozen_left_at: int | None = None

    def frozen(self, site: int) -> bool:
        return self.frozen_left_at is not None and site < self.frozen_left_at


@dataclass(frozen=True, slots=True)
class EventOutcome:
    """What one clock ring did: kind in {noop, exchange, flip}, the acting
    site, the partner site for exchanges, and the acting spin eta (spin at
    the site before a non-noop action; 0 for noop)."""

    kind: str
    time: float
    site: int
    partner: int | None = None
    eta: int = 0


def step(
    cfg: SpinConfig, event: Event, policy: BoundaryPolicy, params: ModelParams
) -> EventOutcome:
    """Apply one event in place and report the outcome.

    After a non-noop action the spin at the event site is -eta.
    """
    x = event.site
    if policy.frozen(x):
        return EventOutcome(NOOP, event.time, x)
    eta = cfg.spin(x)
    if not exchange_decision(event.uniform, eta, params.lambda_plus):
        return EventOutcome(NOOP, event.time, x)
    z = cfg.first_opposite_right(x)
    if z is None:
        cfg.flip(x)
        return EventOutcome(FLIP, event.time, x, None, eta)
    cfg.swap(x, z)
    return EventOutcome(EXCHANGE, event.time, x, z, eta)


def run(
    cfg: SpinConfig,
    stream: EventStream,
    policy: BoundaryPolicy,
    params: ModelParams,
    horizon: float,
    observers=(),
) -> SpinConfig:
    """Apply all events with time < horizon in order, mutating cfg.

    Observers receive every (event, outcome) pair as it happens and a final
    `finish(horizon, cfg)` call if they define one.
    """
    if horizon < 0:
        raise ValueError("horizon must be >= 0")
    while stream.peek_time() < horizon:
        ev = stream.next_event()
        out = step(cfg, ev, policy, params)
        for obs in observers:
            obs.observe(ev, out, cfg)
    for obs in observers:
        fin = getattr(obs, "finish", None)
        if fin is not None:
            fin(horizon, cfg)
    return cfg


class CrossingCurrent:
    """Particle current through a level x: counts exchange moves from a
    source y < x landing at z >= x, split by the sign of the moved particle.
    A flip is the restriction of an exchange with a partner beyond the
    window, so it crosses every tracked level right of its site."""

    def __init__(self, levels):
        self.levels = sorted(levels)
        self.plus = {x: 0 for x in self.levels}
        self.minus = {x: 0 for x in self.levels}

    def observe(self, event: Event, out: EventOutcome, cfg: SpinConfig) -> None:
        if out.kind == NOOP:
            return
        y = out.site
        z = out.partner  # None means beyond the right window edge
        bucket = self.plus if out.eta == 1 else self.minus
        for x in self.levels:
            if y < x and (z is None or z >= x):
                bucket[x] += 1

    def total(self, x: int) -> int:
        return self.plus[x] + self.minus[x]


class OccupationTimer:
    """Time spent in each visited configuration (for window sizes where the
    state fits a dict key); used to compare trajectories with exact
    stationary solutions."""

    def __init__(self, start_time: float = 0.0):
        self.t_prev = start_time
        self.times: dict[int, float] = {}

    def observe(self, event: Event, out: EventOutcome, cfg: SpinConfig) -> None:
        state = cfg.bits
        if out.kind != NOOP:
            # cfg already advanced; credit the elapsed time to the old state
            state = cfg.bits ^ (1 << (out.site - cfg.lo))
            if out.kind == EXCHANGE:
                state ^= 1 << (out.partner - cfg.lo)
        self.times[state] = self.times.get(state, 0.0) + (event.time - self.t_prev)
        self.t_prev = event.time

    def finish(self, horizon: float, cfg: SpinConfig) -> None:
        self.times[cfg.bits] = self.times.get(cfg.bits, 0.0) + (horizon - self.t_prev)
        self.t_prev = horizon


class TrajectoryRecorder:
    """Snapshots of the configuration at fixed times."""

    def __init__(self, times):
        self.times = sorted(times)
        self._next = 0
        self.snapshots: list[tuple[float, SpinConfig]] = []

    def observe(self, event: Event, out: EventOutcome, cfg: SpinConfig) -> None:
        while self._next < len(self.times) and self.times[self._next] < event.time:
            # state just before this event: undo the action
            prev = cfg.clone()
            if out.kind != NOOP:
                prev.bits ^= 1 << (out.site - cfg.lo)
                if out.kind == EXCHANGE:
                    prev.bits ^= 1 << (out.partner - cfg.lo)
            self.snapshots.append((self.times[self._next], prev))
            self._next += 1

    def finish(self, horizon: float, cfg: SpinConfig) -> None:
        while self._next < len(self.times) and self.times[self._next] <= horizon:
            self.snapshots.append((self.times[self._next], cfg.clone()))
            self._next += 1


def write_snapshots(path, snapshots, seed: int, params: ModelParams) -> None:
    """Snapshot file: '#'-comment header (seed, rates, window), then one
    't <tab> runlength' line per snapshot."""
    with open(path, "w") as fh:
        first = snapshots[0][1]
        fh.write(f"# seed={seed} lambda_plus={params.lambda_plus}")
        fh.write(f" window=[{first.lo},{first.hi}]\n")
        for t, cfg in snapshots:
            fh.write(f"{t:.6f}\t{cfg.to_runlength()}\n")


def read_snapshots(path, lo: int) -> list[tuple[float, SpinConfig]]:
    out = []
    with open(path) as fh:
        for line in fh:
            if line.startswith("#") or not line.strip():
                continue
            t, rle = line.split("\t")
            out.append((float(t), SpinConfig.from_runlength(lo, rle.strip())))
    return out
