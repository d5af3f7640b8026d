"""toomsim: event-driven simulator and exact solver for the Toom interface
spin chain, built on a replayable per-site graphical construction."""

__version__ = "0.1.0"

from .core import (  # noqa: F401
    BlockStats,
    ModelParams,
    SpinConfig,
    p_star,
    sample_bernoulli,
    sample_monotone_family,
)
from .randomness import Event, EventStream, SiteUniforms, exchange_decision  # noqa: F401
from .engine import BoundaryPolicy, EventOutcome, run, step  # noqa: F401
