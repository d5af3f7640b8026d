"""Spin-chain domain types: model rates, bit-packed configurations, block
statistics, and Bernoulli sampling (including sitewise-monotone families)."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .randomness import SiteUniforms


def p_star(lambda_plus: float, lambda_minus: float) -> float:
    """Density p in (0,1) solving ((1-p)/p)^2 = lambda_plus/lambda_minus.

    Closed form p = 1 / (1 + sqrt(lambda_plus/lambda_minus)).
    """
    if lambda_plus <= 0 or lambda_minus <= 0:
        raise ValueError("rates must be positive")
    if abs(lambda_plus + lambda_minus - 1.0) > 1e-9:
        raise ValueError("rates must sum to 1")
    return 1.0 / (1.0 + math.sqrt(lambda_plus / lambda_minus))


@dataclass(frozen=True, slots=True)
class ModelParams:
    """Exchange rates for +1/-1 particles, normalized so they sum to 1, and
    the derived calibration density p_star."""

    lambda_plus: float
    lambda_minus: float = None  # type: ignore[assignment]
    p_star: float = None  # type: ignore[assignment]

    def __post_init__(self):
        lp = self.lambda_plus
        lm = self.lambda_minus
        if lm is None:
            lm = 1.0 - lp
        if not (0.0 < lp < 1.0 and 0.0 < lm < 1.0):
            raise ValueError("rates must lie in (0, 1)")
        if abs(lp + lm - 1.0) > 1e-9:
            raise ValueError("rates must sum to 1")
        lm = 1.0 - lp  # exact normalization
        object.__setattr__(self, "lambda_minus", lm)
        object.__setattr__(self, "p_star", p_star(lp, lm))

    def rate(self, sign: int) -> float:
        return self.lambda_plus if sign == 1 else self.lambda_minus


@dataclass(frozen=True, slots=True)
class BlockStats:
    """Lengths of the constant-sign blocks adjacent to a site; a clipped
    length ran into the window edge and is only a lower bound."""

    left_len: int
    right_len: int
    left_clipped: bool
    right_clipped: bool


class SpinConfig:
    """A finite window [lo, hi] of +-1 spins, one bit per site (1 = +1).

    Mutable and exclusively owned by one trajectory while it runs. Partner
    search and block scans are word-level operations on the packed integer.
    """

    __slots__ = ("lo", "n", "bits")

    def __init__(self, lo: int, n: int, bits: int):
        if n <= 0:
            raise ValueError("window must be non-empty")
        self.lo = lo
        self.n = n
        self.bits = bits & ((1 << n) - 1)

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_signs(cls, lo: int, signs) -> "SpinConfig":
        bits = 0
        n = 0
        for i, s in enumerate(signs):
            if s == 1:
                bits |= 1 << i
            elif s != -1:
                raise ValueError("spins must be +-1")
            n += 1
        return cls(lo, n, bits)

    @classmethod
    def constant(cls, lo: int, hi: int, sign: int) -> "SpinConfig":
        n = hi - lo + 1
        bits = (1 << n) - 1 if sign == 1 else 0
        return cls(lo, n, bits)

    # -- basics ------------------------------------------------------------

    @property
    def hi(self) -> int:
        return self.lo + self.n - 1

    def in_window(self, x: int) -> bool:
        return self.lo <= x <= self.hi

    def _off(self, x: int) -> int:
        if not self.lo <= x <= self.hi:
            raise IndexError(f"site {x} outside window [{self.lo}, {self.hi}]")
        return x - self.lo

    def spin(self, x: int) -> int:
        return 1 if (self.bits >> self._off(x)) & 1 else -1

    def flip(self, x: int) -> None:
        self.bits ^= 1 << self._off(x)

    def swap(self, x: int, z: int) -> None:
        ix, iz = self._off(x), self._off(z)
        assert (self.bits >> ix) & 1 != (self.bits >> iz) & 1, "swap needs opposite spins"
        self.bits ^= (1 << ix) | (1 << iz)

    def clone(self) -> "SpinConfig":
        return SpinConfig(self.lo, self.n, self.bits)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SpinConfig)
            and self.lo == other.lo
            and self.n == other.n
            and self.bits == other.bits
        )

    def __hash__(self) -> int:
        return hash((self.lo, self.n, self.bits))

    def __repr__(self) -> str:
        return f"SpinConfig(lo={self.lo}, {self.to_runlength()!r})"

    # -- scans -------------------------------------------------------------

    def first_opposite_right(self, x: int) -> int | None:
        """Smallest z > x in the window with spin(z) != spin(x); None when
        the suffix [x, hi] is constant sign."""
        i = self._off(x)
        if (self.bits >> i) & 1:
            y = ~self.bits & ((1 << self.n) - 1)
        else:
            y = self.bits
        y >>= i + 1
        if y == 0:
            return None
        return x + 1 + _trailing_zeros(y)

    def block_left_len(self, x: int) -> tuple[int, bool]:
        """Length of the constant block ending at x-1, and whether it was
        clipped by the window edge. Requires x-1 in window."""
        i = self._off(x - 1)
        if (self.bits >> i) & 1:
            y = ~self.bits & ((1 << self.n) - 1)
        else:
            y = self.bits
        y &= (1 << i) - 1
        if y == 0:
            return i + 1, True
        return i - (y.bit_length() - 1), False

    def block_right_len(self, x: int) -> tuple[int, bool]:
        """Length of the constant block starting at x+1, and whether it was
        clipped by the window edge. Requires x+1 in window."""
        i = self._off(x + 1)
        if (self.bits >> i) & 1:
            y = ~self.bits & ((1 << self.n) - 1)
        else:
            y = self.bits
        y >>= i + 1
        if y == 0:
            return self.n - i, True
        return 1 + _trailing_zeros(y), False

    def block_stats(self, x: int) -> BlockStats:
        l, lc = self.block_left_len(x)
        r, rc = self.block_right_len(x)
        return BlockStats(l, r, lc, rc)

    def magnetization(self) -> int:
        return 2 * self.bits.bit_count() - self.n

    # -- conversions -------------------------------------------------------

    def to_array(self) -> np.ndarray:
        """Spins as an int8 array of +-1."""
        raw = np.frombuffer(
            self.bits.to_bytes((self.n + 7) // 8, "little"), dtype=np.uint8
        )
        bits = np.unpackbits(raw, bitorder="little")[: self.n]
        return (2 * bits.astype(np.int8) - 1).astype(np.int8)

    def to_u8(self) -> np.ndarray:
        """Spins as a uint8 array (1 = +1, 0 = -1), the kernel layout."""
        raw = np.frombuffer(
            self.bits.to_bytes((self.n + 7) // 8, "little"), dtype=np.uint8
        )
        return np.unpackbits(raw, bitorder="little")[: self.n].copy()

    @classmethod
    def from_u8(cls, lo: int, arr: np.ndarray) -> "SpinConfig":
        packed = np.packbits(np.asarray(arr, dtype=np.uint8), bitorder="little")
        return cls(lo, len(arr), int.from_bytes(packed.tobytes(), "little"))

    def to_runlength(self) -> str:
        """Run-length string, e.g. '+3-2+1' for +++--+."""
        arr = self.to_array()
        out = []
        i = 0
        while i < self.n:
            j = i
            while j < self.n and arr[j] == arr[i]:
                j += 1
            out.append(("+" if arr[i] == 1 else "-") + str(j - i))
            i = j
        return "".join(out)

    @classmethod
    def from_runlength(cls, lo: int, text: str) -> "SpinConfig":
        signs = []
        for sign, count in re.findall(r"([+-])(\d+)", text):
            signs.extend([1 if sign == "+" else -1] * int(count))
        if not signs or "".join(f"{s}{c}" for s, c in re.findall(r"([+-])(\d+)", text)) != text:
            raise ValueError(f"bad run-length string: {text!r}")
        return cls.from_signs(lo, signs)


def _trailing_zeros(y: int) -> int:
    return (y & -y).bit_length() - 1


def first_opposite_right(cfg: SpinConfig, x: int) -> int | None:
    return cfg.first_opposite_right(x)


def block_left_len(cfg: SpinConfig, x: int) -> tuple[int, bool]:
    return cfg.block_left_len(x)


def block_right_len(cfg: SpinConfig, x: int) -> tuple[int, bool]:
    return cfg.block_right_len(x)


def sample_bernoulli(p: float, lo: int, hi: int, uniforms: SiteUniforms) -> SpinConfig:
    """Product-measure draw: spin(x) = +1 iff V(x) < p, so P(+1) = p."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    v = uniforms.array(lo, hi)
    return SpinConfig.from_u8(lo, (v < p).astype(np.uint8))


def sample_monotone_family(
    ps, lo: int, hi: int, uniforms: SiteUniforms
) -> list[SpinConfig]:
    """One config per density, all thresholding the same per-site uniforms,
    so p' > p implies sigma(p') >= sigma(p) at every site. Densities must be
    sorted ascending."""
    ps = list(ps)
    if any(not 0.0 < p < 1.0 for p in ps):
        raise ValueError("densities must lie in (0, 1)")
    if any(b < a for a, b in zip(ps, ps[1:])):
        raise ValueError("densities must be sorted ascending")
    v = uniforms.array(lo, hi)
    return [SpinConfig.from_u8(lo, (v < p).astype(np.uint8)) for p in ps]
