"""Multi-replica evolution under one event stream, with discrepancy and
flux bookkeeping for a designated pair of replicas.

Signature convention for a pair (sigma1, sigma2): a site with
(sigma1, sigma2) = (+, -) is a discrepancy of signature +1, (-, +) one of
signature -1. Under a shared boundary policy every event changes the
discrepancy set by at most one rightward move, which may end in an
annihilation with a discrepancy of the opposite signature; flips move a
discrepancy past the right window edge.

Crossing counters use the bond convention: H[sig] at level x counts moves
with source <= x < destination ("jumped past x"), which makes the per-site
conservation law

    H[sig](x-1) - H[sig](x) = A(x) + chi_t(x in D[sig]) - chi_0(x in D[sig])

an exact integer identity after every event.
"""

from __future__ import annotations

import math
from bisect import bisect_left, insort
from dataclasses import dataclass

from .core import ModelParams, SpinConfig
from .engine import NOOP, BoundaryPolicy, EventOutcome, step
from .randomness import EventStream

MOVE = "move"
ANNIHILATE = "annihilate"


class ClassificationError(RuntimeError):
    """No structurally valid attribution exists: an implementation bug."""


@dataclass(frozen=True, slots=True)
class DiscrepancyChange:
    """One discrepancy jump: source site, destination site (None = past the
    right window edge), mover signature, and whether it annihilated the
    opposite-signature discrepancy standing at the destination."""

    kind: str
    source: int
    dest: int | None
    signature: int
    time: float


def classify_transition(
    out1: EventOutcome,
    out2: EventOutcome,
    cfg1: SpinConfig,
    cfg2: SpinConfig,
) -> DiscrepancyChange | None:
    """Attribute one coupled step (configs already advanced) to a discrepancy
    move/annihilation. Returns None when the discrepancy set is unchanged.

    The mover's signature is sigma1's pre-event spin at the source; it
    annihilates iff the un-acting replica holds the acting spin at the
    destination (the standing discrepancy there has opposite signature).
    """
    acted1 = out1.kind != NOOP
    acted2 = out2.kind != NOOP
    if not acted1 and not acted2:
        return None
    t = out1.time

    if acted1 and acted2:
        if out1.eta != out2.eta:
            raise ClassificationError("joint action with different acting spins")
        eta = out1.eta
        z1, z2 = out1.partner, out2.partner
        if z1 == z2:
            return None
        # mover sits at the smaller partner (None = beyond the window)
        if z2 is None or (z1 is not None and z1 < z2):
            source, dest, sig = z1, z2, -eta
            other_at_dest = cfg1.spin(dest) if dest is not None else None
        else:
            source, dest, sig = z2, z1, eta
            other_at_dest = cfg2.spin(dest) if dest is not None else None
    elif acted1:
        eta = out1.eta
        if cfg2.spin(out1.site) != -eta:
            raise ClassificationError("single action at a non-discrepancy site")
        source, dest, sig = out1.site, out1.partner, eta
        other_at_dest = cfg2.spin(dest) if dest is not None else None
    else:
        eta = out2.eta
        if cfg1.spin(out2.site) != -eta:
            raise ClassificationError("single action at a non-discrepancy site")
        source, dest, sig = out2.site, out2.partner, -eta
        other_at_dest = cfg1.spin(dest) if dest is not None else None

    if dest is not None and dest <= source:
        raise ClassificationError("discrepancy move is not rightward")
    if dest is not None and other_at_dest == eta:
        return DiscrepancyChange(ANNIHILATE, source, dest, sig, t)
    return DiscrepancyChange(MOVE, source, dest, sig, t)


class DiscrepancyView:
    """Incrementally maintained discrepancy sets for a replica pair."""

    def __init__(self, plus=(), minus=()):
        self.plus = sorted(plus)
        self.minus = sorted(minus)

    @classmethod
    def from_configs(cls, cfg1: SpinConfig, cfg2: SpinConfig) -> "DiscrepancyView":
        if cfg1.lo != cfg2.lo or cfg1.n != cfg2.n:
            raise ValueError("pair must share a window")
        diff = cfg1.bits ^ cfg2.bits
        plus, minus = [], []
        while diff:
            low = diff & -diff
            x = cfg1.lo + low.bit_length() - 1
            (plus if cfg1.bits & low else minus).append(x)
            diff ^= low
        return cls(plus, minus)

    def _side(self, sig: int) -> list:
        return self.plus if sig == 1 else self.minus

    def contains(self, x: int, sig: int) -> bool:
        side = self._side(sig)
        i = bisect_left(side, x)
        return i < len(side) and side[i] == x

    def signature_at(self, x: int) -> int:
        if self.contains(x, 1):
            return 1
        if self.contains(x, -1):
            return -1
        return 0

    def all_sites(self) -> list[int]:
        return sorted(self.plus + self.minus)

    def size(self) -> int:
        return len(self.plus) + len(self.minus)

    def leftmost(self) -> float:
        if not self.plus:
            return self.minus[0] if self.minus else math.inf
        if not self.minus:
            return self.plus[0]
        return min(self.plus[0], self.minus[0])

    def next_right(self, x: int) -> tuple[float, int]:
        """(d(x), signature of the discrepancy at d(x)); (inf, 0) if none."""
        best, sig = math.inf, 0
        for s, side in ((1, self.plus), (-1, self.minus)):
            i = bisect_left(side, x + 1)
            if i < len(side) and side[i] < best:
                best, sig = side[i], s
        return best, sig

    def next_right_opposite(self, x: int, sig: int) -> float:
        side = self._side(-sig)
        i = bisect_left(side, x + 1)
        return side[i] if i < len(side) else math.inf

    def interface_sites(self) -> list[int]:
        """Sites whose next discrepancy to the right exists and has the
        opposite signature."""
        marked = [(x, 1) for x in self.plus] + [(x, -1) for x in self.minus]
        marked.sort()
        out = []
        for (x, s), (_, s2) in zip(marked, marked[1:]):
            if s2 == -s:
                out.append(x)
        return out

    def apply(self, change: DiscrepancyChange) -> None:
        side = self._side(change.signature)
        i = bisect_left(side, change.source)
        if i >= len(side) or side[i] != change.source:
            raise ClassificationError(f"no {change.signature:+d} discrepancy at source {change.source}")
        side.pop(i)
        if change.kind == MOVE:
            if change.dest is not None:
                insort(side, change.dest)
        else:
            other = self._side(-change.signature)
            j = bisect_left(other, change.dest)
            if j >= len(other) or other[j] != change.dest:
                raise ClassificationError(f"no {-change.signature:+d} discrepancy at dest {change.dest}")
            other.pop(j)


class FluxLedger:
    """Integer crossing/annihilation counters at tracked sites.

    For each tracked site x: plus/minus crossing counts at level x (bond
    convention, see module docstring), annihilation count at x, and an
    optional crossing log of (time, signature, kind) entries.
    """

    def __init__(self, view: DiscrepancyView, sites, log_sites=()):
        self.sites = sorted(sites)
        self.plus = {x: 0 for x in self.sites}
        self.minus = {x: 0 for x in self.sites}
        self.annihilations = {x: 0 for x in self.sites}
        self.log_sites = set(log_sites)
        self.logs = {x: [] for x in self.log_sites}
        self.chi0 = {
            (x, sig): view.contains(x, sig) for x in self.sites for sig in (1, -1)
        }

    def net(self, x: int) -> int:
        return self.plus[x] - self.minus[x]

    def record(self, change: DiscrepancyChange) -> None:
        src, dest = change.source, change.dest
        i = bisect_left(self.sites, src)
        counts = self.plus if change.signature == 1 else self.minus
        while i < len(self.sites) and (dest is None or self.sites[i] < dest):
            x = self.sites[i]
            counts[x] += 1
            if x in self.log_sites:
                self.logs[x].append((change.time, change.signature, change.kind))
            i += 1
        if change.kind == ANNIHILATE and dest in self.annihilations:
            self.annihilations[dest] += 1

    def audit(self, view: DiscrepancyView) -> list[tuple]:
        """Conservation-law violations (empty list = identity exact) at every
        tracked site whose left neighbor is also tracked."""
        bad = []
        for x in self.sites:
            if x - 1 not in self.annihilations:
                continue
            for sig, counts in ((1, self.plus), (-1, self.minus)):
                lhs = counts[x - 1] - counts[x]
                rhs = (
                    self.annihilations[x]
                    + int(view.contains(x, sig))
                    - int(self.chi0[(x, sig)])
                )
                if lhs != rhs:
                    bad.append((x, sig, lhs, rhs))
        return bad


class ReplicaSet:
    """Ordered replicas over one window sharing one event stream and one
    boundary policy, with discrepancy/flux bookkeeping on a designated pair."""

    def __init__(
        self,
        replicas,
        stream: EventStream,
        policy: BoundaryPolicy,
        params: ModelParams,
        pair: tuple[int, int] | None = None,
        tracked_sites=(),
        log_sites=(),
    ):
        self.replicas = list(replicas)
        lo, n = self.replicas[0].lo, self.replicas[0].n
        if any(c.lo != lo or c.n != n for c in self.replicas):
            raise ValueError("replicas must share a window")
        if (stream.lo, stream.hi) != (lo, lo + n - 1):
            raise ValueError("stream window must match replica window")
        self.stream = stream
        self.policy = policy
        self.params = params
        if pair is None and len(self.replicas) >= 2:
            pair = (0, 1)
        self.pair = pair
        self.view = None
        self.ledger = None
        if pair is not None:
            c1, c2 = self.replicas[pair[0]], self.replicas[pair[1]]
            self.view = DiscrepancyView.from_configs(c1, c2)
            self.ledger = FluxLedger(self.view, tracked_sites, log_sites)

    def coupled_step(self):
        """Advance every replica by the next event; classify and book the
        designated pair's discrepancy change. Returns (event, outcomes,
        change-or-None)."""
        ev = self.stream.next_event()
        outcomes = [
            step(cfg, ev, self.policy, self.params) for cfg in self.replicas
        ]
        change = None
        if self.pair is not None:
            i, j = self.pair
            change = classify_transition(
                outcomes[i], outcomes[j], self.replicas[i], self.replicas[j]
            )
            if change is not None:
                self.view.apply(change)
                self.ledger.record(change)
        return ev, outcomes, change

    def run(self, horizon: float, per_event=None) -> int:
        """Apply all events with time < horizon; returns the event count.
        per_event(event, outcomes, change) is called after each step."""
        n = 0
        while self.stream.peek_time() < horizon:
            ev, outcomes, change = self.coupled_step()
            n += 1
            if per_event is not None:
                per_event(ev, outcomes, change)
        return n


def leftmost_discrepancy(view: DiscrepancyView) -> float:
    """min D, or +inf when the pair agrees everywhere."""
    return view.leftmost()


def stretch_histogram(log, k_max: int):
    """Counts of maximal equal-signature runs in a crossing log, by signature
    and exact length k = 1..k_max; runs longer than k_max land in the
    overflow bucket. Runs touching either end of the log count."""
    counts = {1: [0] * (k_max + 2), -1: [0] * (k_max + 2)}
    run_sig, run_len = 0, 0
    for _, sig, _ in log:
        if sig == run_sig:
            run_len += 1
        else:
            if run_sig != 0:
                counts[run_sig][min(run_len, k_max + 1)] += 1
            run_sig, run_len = sig, 1
    if run_sig != 0:
        counts[run_sig][min(run_len, k_max + 1)] += 1
    return counts


def flux_variation(log, t_lo: float, t_hi: float) -> int:
    """Number of crossings with time in (t_lo, t_hi]: the total variation of
    the net flux over the interval."""
    return sum(1 for t, _, _ in log if t_lo < t <= t_hi)


def write_crossing_log(path, logs: dict) -> None:
    """CSV of crossings: t, site, signature, kind."""
    with open(path, "w") as fh:
        fh.write("t,site,signature,kind\n")
        rows = []
        for x, log in logs.items():
            rows.extend((t, x, sig, kind) for t, sig, kind in log)
        rows.sort()
        for t, x, sig, kind in rows:
            fh.write(f"{t:.9f},{x},{sig:+d},{kind}\n")
