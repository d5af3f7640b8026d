"""Exact finite-state analysis of the restricted chain on N sites, plus
closed-form generator expectations under product Bernoulli measures.

State encoding is little-endian bit packing: bit i of the state index is
the spin at site i+1 (bit set = +1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .core import ModelParams

MAX_SITES = 20
DENSE_LIMIT = 12


@dataclass(frozen=True)
class GeneratorMatrix:
    """Sparse rate matrix of the restricted chain: one outgoing transition
    per (state, site), row sums zero."""

    n_sites: int
    params: ModelParams
    q: sp.csr_matrix

    @property
    def n_states(self) -> int:
        return 1 << self.n_sites

    def uniformization_rate(self) -> float:
        return float(-self.q.diagonal().min())


@dataclass(frozen=True)
class StationaryDistribution:
    pi: np.ndarray
    residual: float


def build_generator(n_sites: int, params: ModelParams) -> GeneratorMatrix:
    """Rate matrix: at each site with spin eta, at rate lambda_eta, swap with
    the first opposite spin to the right, or flip when the suffix is
    constant sign."""
    if not 1 <= n_sites <= MAX_SITES:
        raise ValueError(f"n_sites must lie in [1, {MAX_SITES}]")
    n = 1 << n_sites
    states = np.arange(n, dtype=np.int64)
    full = n - 1
    rows, cols, vals = [], [], []
    diag = np.zeros(n)
    for x in range(n_sites):
        spin_up = (states >> x) & 1
        # bits differing from the spin at x, strictly right of x
        differ = np.where(spin_up == 1, ~states & full, states)
        differ &= ~((1 << (x + 1)) - 1) & full
        partner_bit = differ & -differ  # 0 when the suffix is constant
        targets = states ^ (1 << x) ^ partner_bit
        rates = np.where(spin_up == 1, params.lambda_plus, params.lambda_minus)
        rows.append(states)
        cols.append(targets)
        vals.append(rates)
        diag -= rates
    rows.append(states)
    cols.append(states)
    vals.append(diag)
    q = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n, n),
    ).tocsr()
    return GeneratorMatrix(n_sites, params, q)


def stationary(
    gen: GeneratorMatrix, tol: float = 1e-13, max_iter: int = 2_000_000
) -> StationaryDistribution:
    """Solve pi Q = 0, sum(pi) = 1: dense LU on the augmented system up to
    12 sites, power iteration on the uniformized kernel above."""
    n = gen.n_states
    if gen.n_sites <= DENSE_LIMIT:
        a = gen.q.toarray().T
        a[-1, :] = 1.0
        b = np.zeros(n)
        b[-1] = 1.0
        pi = np.linalg.solve(a, b)
    else:
        lam = gen.uniformization_rate()
        p = sp.identity(n, format="csr") + gen.q.multiply(1.0 / lam)
        pt = p.T.tocsr()
        pi = np.full(n, 1.0 / n)
        for it in range(max_iter):
            nxt = pt @ pi
            nxt /= nxt.sum()
            if it % 50 == 0 and np.abs(nxt - pi).max() < tol / lam:
                pi = nxt
                break
            pi = nxt
        else:
            res = float(np.abs(pi @ gen.q).max())
            raise RuntimeError(f"power iteration did not converge, residual {res:.3e}")
    pi = np.maximum(pi, 0.0)
    pi /= pi.sum()
    residual = float(np.abs(pi @ gen.q).max())
    return StationaryDistribution(pi, residual)


def restrict_marginal(pi: np.ndarray, n_sites: int, m_sites: int) -> np.ndarray:
    """Marginal of a distribution over n sites onto the first m sites (the
    trailing spins are the high bits, so this is a reshape-and-sum)."""
    if m_sites > n_sites:
        raise ValueError("m_sites must be <= n_sites")
    if m_sites == n_sites:
        return pi.copy()
    return pi.reshape(1 << (n_sites - m_sites), 1 << m_sites).sum(axis=0)


def flip_all(pi: np.ndarray, n_sites: int) -> np.ndarray:
    """Pushforward under the global spin flip."""
    idx = np.arange(1 << n_sites)[::-1]  # bitwise complement reverses the index
    return pi[idx].copy()


def tv_distance(mu: np.ndarray, nu: np.ndarray) -> float:
    return 0.5 * float(np.abs(mu - nu).sum())


def _poisson_weights(rate: float, tail: float) -> np.ndarray:
    """Poisson pmf truncated so the missing tail mass is below `tail`."""
    w = [math.exp(-rate)]
    k = 0
    total = w[0]
    while total < 1.0 - tail:
        k += 1
        w.append(w[-1] * rate / k)
        total += w[-1]
        if k > 100 + 10 * rate:
            raise RuntimeError("uniformization truncation budget exceeded")
    return np.asarray(w)


def transient_matrix(
    gen: GeneratorMatrix, t: float, m0: np.ndarray | None = None, tail: float = 1e-14
) -> np.ndarray:
    """Rows of M0 @ expm(t Q) by uniformization, with truncation error below
    `tail` per internal segment (segments keep the Poisson rate moderate)."""
    n = gen.n_states
    lam = gen.uniformization_rate()
    m = np.eye(n) if m0 is None else np.array(m0, dtype=float)
    if t == 0.0 or lam == 0.0:
        return m
    n_seg = max(1, math.ceil(lam * t / 30.0))
    dt = t / n_seg
    pt = (sp.identity(n, format="csr") + gen.q.multiply(1.0 / lam)).T.tocsr()
    for _ in range(n_seg):
        w = _poisson_weights(lam * dt, tail)
        vt = m.T.copy()
        acc = w[0] * vt
        for k in range(1, len(w)):
            vt = pt @ vt
            acc += w[k] * vt
        m = acc.T
    return m


def tv_mixing_curve(
    gen: GeneratorMatrix, time_grid, pi: np.ndarray | None = None
) -> tuple[np.ndarray, float]:
    """Worst-case-over-initial-states TV distance to stationarity at each
    grid time, and the first grid time it drops below 1/2 (inf if none).

    Evaluates every point mass at once by propagating the full transition
    matrix between grid points.
    """
    if gen.n_sites > DENSE_LIMIT:
        raise ValueError(f"exact mixing curve limited to {DENSE_LIMIT} sites")
    if pi is None:
        pi = stationary(gen).pi
    grid = sorted(time_grid)
    if any(t < 0 for t in grid):
        raise ValueError("times must be >= 0")
    out = np.empty(len(grid))
    m = np.eye(gen.n_states)
    t_prev = 0.0
    for i, t in enumerate(grid):
        if t > t_prev:
            m = transient_matrix(gen, t - t_prev, m0=m)
            t_prev = t
        out[i] = 0.5 * np.abs(m - pi).sum(axis=1).max()
    tau = math.inf
    for t, d in zip(grid, out):
        if d < 0.5:
            tau = t
            break
    return out, tau


def worst_case_tv(gen: GeneratorMatrix, t: float, pi: np.ndarray | None = None) -> float:
    """max over initial states of || point-mass at time t - pi ||_TV."""
    if pi is None:
        pi = stationary(gen).pi
    m = transient_matrix(gen, t)
    return 0.5 * float(np.abs(m - pi).sum(axis=1).max())


def height_variance(pi: np.ndarray, n_sites: int, prefix_len: int) -> float:
    """Var under pi of the sum of the first `prefix_len` spins."""
    if not 1 <= prefix_len <= n_sites:
        raise ValueError("prefix length out of range")
    states = np.arange(1 << n_sites, dtype=np.uint64)
    mask = np.uint64((1 << prefix_len) - 1)
    h = 2.0 * np.bitwise_count(states & mask).astype(float) - prefix_len
    mean = float(pi @ h)
    return float(pi @ (h - mean) ** 2)


def occupation_expectation(pi: np.ndarray, n_sites: int, site: int) -> float:
    """E_pi[spin at a site], sites numbered from 1."""
    states = np.arange(1 << n_sites)
    s = 2.0 * ((states >> (site - 1)) & 1) - 1.0
    return float(pi @ s)


# -- generator expectations under product measures ---------------------------


def spin_monomial(sites) -> tuple[tuple[int, ...], np.ndarray]:
    """(support, table) for the product of spins over the given sites; table
    is indexed little-endian by the spin pattern on the sorted support."""
    support = tuple(sorted(sites))
    k = len(support)
    table = np.empty(1 << k)
    for pattern in range(1 << k):
        table[pattern] = (-1.0) ** (k - bin(pattern).count("1"))
    return support, table


def bernoulli_generator_expectation(
    support, table, p: float, params: ModelParams, max_hull: int = 20
) -> float:
    """Exact E under Ber_p of the generator applied to a local function.

    The function is given as a table over spin patterns on its support.
    Configurations are enumerated on the hull [min(support)-1, max(support)];
    events whose constant-sign run extends left of the hull are resummed as
    the geometric series p_eta/(1-p_eta), and events exchanging with a
    partner right of the hull carry total weight 1.
    """
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    support = tuple(sorted(support))
    table = np.asarray(table, dtype=float)
    if len(table) != 1 << len(support):
        raise ValueError("table size must be 2**len(support)")
    h_lo = support[0] - 1
    h_hi = support[-1]
    width = h_hi - h_lo + 1
    if width > max_hull:
        raise ValueError(f"hull of {width} sites exceeds the supported {max_hull}")

    sup_off = [s - h_lo for s in support]
    in_support = {off: k for k, off in enumerate(sup_off)}
    lam = {1: params.lambda_plus, -1: params.lambda_minus}
    dens = {1: p, -1: 1.0 - p}
    geom = {s: dens[s] / (1.0 - dens[s]) for s in (1, -1)}

    def f_of(bits: int, flips=()) -> float:
        pattern = 0
        for k, off in enumerate(sup_off):
            b = (bits >> off) & 1
            if off in flips:
                b ^= 1
            pattern |= b << k
        return table[pattern]

    total = 0.0
    for bits in range(1 << width):
        weight = 1.0
        for off in range(width):
            weight *= dens[1] if (bits >> off) & 1 else dens[-1]
        base = f_of(bits)
        acc = 0.0
        # runs within the hull: run_from[off] = length of the constant run
        spins = [(1 if (bits >> off) & 1 else -1) for off in range(width)]
        for ox in range(width):
            eta = spins[ox]
            # partner within the hull
            oy = ox + 1
            while oy < width and spins[oy] == eta:
                oy += 1
            if oy < width:
                if ox in in_support or oy in in_support:
                    flips = tuple(o for o in (ox, oy) if o in in_support)
                    acc += lam[eta] * (f_of(bits, flips) - base)
                # events at x' < h_lo whose run covers [h_lo, oy-1]: only
                # relevant when they flip a support site (the partner oy)
                if ox == 0 and oy in in_support:
                    acc += lam[eta] * geom[eta] * (f_of(bits, (oy,)) - base)
            else:
                # partner beyond the hull: the geometric sum over its
                # position is exactly 1; only the x-flip can matter
                if ox in in_support:
                    acc += lam[eta] * (f_of(bits, (ox,)) - base)
        total += weight * acc
    return total
