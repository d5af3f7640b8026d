"""Config-driven experiments with statistical error bars.

Every experiment is a pure function of its config (seed included); CSV
bodies are bit-identical across re-runs. Point estimates carry standard
errors from batch means (time averages) or across replications, and the
comparison against an analytic reference, when one exists, is computed
into the report rather than hand-entered.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .core import ModelParams, SpinConfig, p_star, sample_bernoulli
from .engine import BoundaryPolicy, step
from .exact import build_generator, stationary, tv_mixing_curve
from .kernels import SimState
from .randomness import EventStream, SiteUniforms, interarrival

EXPERIMENTS = (
    "mixing",
    "current",
    "front",
    "profile",
    "correlation",
    "stationarity",
)


@dataclass
class ExperimentConfig:
    """Knobs common to all experiments plus experiment-specific extras.

    `window` is the right extent of the simulated region, `buffer` the
    number of sites kept left of the measurement region. The config is
    echoed verbatim into every output header.
    """

    name: str
    lambda_plus: float = 0.5
    p: float | None = None
    n_sites: int | None = None
    window: int = 256
    buffer: int = 0
    horizon: float = 100.0
    burn_in: float = 0.0
    replications: int = 1
    seed: int = 1
    batches: int = 30
    extras: dict = field(default_factory=dict)

    def model(self) -> ModelParams:
        return ModelParams(self.lambda_plus)

    def density(self) -> float:
        return self.p if self.p is not None else self.model().p_star

    def validate(self) -> None:
        if self.name not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.name!r}")
        if not 0.0 < self.lambda_plus < 1.0:
            raise ValueError("lambda_plus must lie in (0, 1)")
        if self.p is not None and not 0.0 < self.p < 1.0:
            raise ValueError("p must lie in (0, 1)")
        if self.horizon < 0 or self.burn_in < 0:
            raise ValueError("times must be >= 0")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if self.name == "mixing" and (self.n_sites is None or self.n_sites < 1):
            raise ValueError("mixing needs n_sites >= 1")
        if self.batches < 2:
            raise ValueError("batches must be >= 2")

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            raw = json.load(fh)
        return cls(**raw)


@dataclass
class EstimateReport:
    """Point estimate with its standard error and, when known, the analytic
    reference value and the computed 3-SE verdict."""

    name: str
    estimate: float
    se: float
    n: int
    analytic: float | None = None
    verdict: str | None = None

    def __post_init__(self):
        if self.analytic is not None and self.verdict is None:
            dev = abs(self.estimate - self.analytic)
            self.verdict = "consistent" if dev <= 3.0 * self.se else "deviates"

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "EstimateReport":
        return cls(**d)


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    reports: list
    tables: dict
    notes: dict = field(default_factory=dict)
    n_invalid: int = 0

    def report(self, name: str) -> EstimateReport:
        for r in self.reports:
            if r.name == name:
                return r
        raise KeyError(name)


def batch_stats(values) -> tuple[float, float]:
    """(mean, standard error) across batches or replications."""
    v = np.asarray(values, dtype=float)
    if len(v) < 2:
        return float(v.mean()), float("nan")
    return float(v.mean()), float(v.std(ddof=1) / math.sqrt(len(v)))


def write_result(result: ExperimentResult, out_dir) -> None:
    """One CSV per table ('#'-comment header carrying the config echo) plus
    a run-manifest with wall time and code version."""
    import os

    os.makedirs(out_dir, exist_ok=True)
    cfg = result.config
    echo = json.dumps(asdict(cfg), sort_keys=True)
    header = [
        f"# experiment={cfg.name}",
        f"# seed={cfg.seed}",
        f"# version={__version__}",
        f"# config={echo}",
    ]
    for tname, (columns, rows) in result.tables.items():
        with open(os.path.join(out_dir, f"{cfg.name}_{tname}.csv"), "w") as fh:
            fh.write("\n".join(header) + "\n")
            fh.write(",".join(columns) + "\n")
            for row in rows:
                fh.write(",".join(_fmt(v) for v in row) + "\n")
    manifest = {
        "experiment": cfg.name,
        "config": asdict(cfg),
        "seed": cfg.seed,
        "version": __version__,
        "wall_time_s": result.notes.get("wall_time_s"),
        "n_invalid": result.n_invalid,
        "reports": [r.to_dict() for r in result.reports],
    }
    with open(os.path.join(out_dir, f"{cfg.name}_manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _timed(fn):
    def wrapper(config: ExperimentConfig) -> ExperimentResult:
        config.validate()
        t0 = time.perf_counter()
        result = fn(config)
        result.notes["wall_time_s"] = round(time.perf_counter() - t0, 3)
        return result

    return wrapper


# -- mixing ------------------------------------------------------------------


def sequential_sweep_time(seed: int, n_sites: int) -> float:
    """Time of the left-to-right sequential arrival chain: first arrival at
    site 1, then the first arrival at each next site after its predecessor.
    The sum of n_sites Exp(1) stages."""
    t = 0.0
    for x in range(1, n_sites + 1):
        s = 0.0
        j = 1
        while True:
            s += interarrival(seed, x, j)
            if s > t:
                t = s
                break
            j += 1
    return t


def _mixing_initial_states(config: ExperimentConfig, rep: int) -> list[SpinConfig]:
    n = config.n_sites
    if n <= 12:
        return [SpinConfig(1, n, b) for b in range(1 << n)]
    states = [SpinConfig.constant(1, n, -1), SpinConfig.constant(1, n, 1)]
    for r in range(64):
        u = SiteUniforms(config.seed, series=1_000_000 + rep * 100 + r)
        states.append(sample_bernoulli(0.5, 1, n, u))
    return states


@_timed
def exp_mixing(config: ExperimentConfig) -> ExperimentResult:
    """Coalescence of all (or sampled) initial states under one stream per
    replication, against the sequential-sweep comparator; exact worst-case
    TV mixing time up to 10 sites."""
    n = config.n_sites
    lam = config.lambda_plus
    rows = []
    coupled_all = True
    taus_n = []
    taus_c = []
    for rep in range(config.replications):
        seed = config.seed + rep
        tau_n = sequential_sweep_time(seed, n)
        states = _mixing_initial_states(config, rep)
        sim = SimState(seed, states)
        tau_c, n_open = sim.run_coalesce_to(tau_n, lam)
        coupled = n_open == 0
        coupled_all &= coupled
        taus_n.append(tau_n)
        taus_c.append(tau_c)
        rows.append((rep, tau_c, tau_n, int(coupled)))
    est, se = batch_stats(taus_n)
    reports = [
        EstimateReport("coupled_by_sweep_fraction",
                       float(np.mean([r[3] for r in rows])), 0.0, len(rows), 1.0,
                       "consistent" if coupled_all else "deviates"),
        EstimateReport("mean_sweep_time", est, se, len(taus_n), float(n)),
        EstimateReport("mean_coupling_time", *batch_stats(taus_c), len(taus_c)),
    ]
    tables = {"coupling": (["rep", "tau_couple", "tau_sweep", "coupled"], rows)}
    notes = {}
    if n <= 10:
        gen = build_generator(n, config.model())
        pi = stationary(gen).pi
        grid = [n * k / 20.0 for k in range(1, 41)]
        curve, tau_mix = tv_mixing_curve(gen, grid, pi)
        tables["tv_curve"] = (["t", "worst_case_tv"], list(zip(grid, curve)))
        notes["exact_tau_mix"] = tau_mix
        reports.append(EstimateReport("exact_tau_mix", tau_mix, 0.0, 1, None))
    return ExperimentResult(config, reports, tables, notes)


# -- front speed --------------------------------------------------------------


@_timed
def exp_front_speed(config: ExperimentConfig) -> ExperimentResult:
    """Two freeze cutoffs under one noise realization and one initial draw:
    tracks the discrepancy front between them and the first time any
    disagreement reaches the non-negative axis (exact, event-resolved)."""
    cut_near = config.extras.get("cutoff_near", 64)
    cut_far = config.extras.get("cutoff_far", 3 * cut_near)
    grid_dt = config.extras.get("grid_dt", max(config.horizon / 64.0, 0.25))
    if cut_near > cut_far:
        raise ValueError("cutoff_near must be <= cutoff_far")
    lo, hi = -cut_far, config.window
    params = config.model()
    p = config.density()
    pol_near = BoundaryPolicy(-cut_near)
    pol_far = BoundaryPolicy(-cut_far)
    trace_rows = []
    breach_times = []
    top_speeds = []
    for rep in range(config.replications):
        seed = config.seed + rep
        init = sample_bernoulli(p, lo, hi, SiteUniforms(seed, 0))
        a, b = init.clone(), init.clone()
        stream = EventStream(seed, lo, hi)
        breach = math.inf
        front_max = -cut_near
        next_grid = grid_dt
        while stream.peek_time() < config.horizon:
            ev = stream.next_event()
            while next_grid <= ev.time and next_grid <= config.horizon:
                front = _front_position(a, b)
                trace_rows.append((rep, next_grid, front))
                next_grid += grid_dt
            oa = step(a, ev, pol_near, params)
            ob = step(b, ev, pol_far, params)
            for out in (oa, ob):
                for site in (out.site, out.partner):
                    if site is None or out.kind == "noop":
                        continue
                    if a.spin(site) != b.spin(site):
                        if site > front_max:
                            front_max = site
                        if site >= 0 and breach == math.inf:
                            breach = ev.time
        while next_grid <= config.horizon:
            trace_rows.append((rep, next_grid, _front_position(a, b)))
            next_grid += grid_dt
        breach_times.append(breach)
        top_speeds.append((front_max + cut_near) / config.horizon)
    agree = [1.0 if bt > config.horizon else 0.0 for bt in breach_times]
    v_hat = max(top_speeds)
    reports = [
        EstimateReport("agreement_probability", *batch_stats(agree), len(agree)),
        EstimateReport("front_speed_max", v_hat, 0.0, len(top_speeds)),
        EstimateReport("front_speed_mean", *batch_stats(top_speeds), len(top_speeds)),
    ]
    tables = {
        "trace": (["rep", "t", "front"], trace_rows),
        "breach": (["rep", "breach_time"], list(enumerate(breach_times))),
    }
    return ExperimentResult(config, reports, tables, {"front_speed": v_hat})


def _front_position(a: SpinConfig, b: SpinConfig) -> float:
    diff = a.bits ^ b.bits
    if diff == 0:
        return -math.inf
    return a.lo + diff.bit_length() - 1


def calibrate_front_speed(
    lambda_plus: float, p: float | None, seed: int, horizon: float = 600.0,
    replications: int = 4, grid_dt: float = 1.0,
) -> float:
    """Worst-case front speed for buffer sizing: kernel pair runs with two
    freeze cutoffs under one noise realization, front sampled on a time
    grid. The window is sized so speeds below 6 cannot clip."""
    params = ModelParams(lambda_plus)
    dens = p if p is not None else params.p_star
    cut_near, cut_far = 64, int(64 + horizon)
    lo, hi = -cut_far, int(6 * horizon)
    v_max = 0.0
    for rep in range(replications):
        s = seed + rep
        init = sample_bernoulli(dens, lo, hi, SiteUniforms(s, 0))
        near = SimState(s, init.clone(), frozen_left_at=-cut_near)
        far = SimState(s, init.clone(), frozen_left_at=-cut_far)
        front = -cut_near
        t = grid_dt
        while t <= horizon:
            near.run_to(t, lambda_plus)
            far.run_to(t, lambda_plus)
            diff = np.nonzero(near.spins != far.spins)[0]
            if len(diff):
                front = max(front, lo + int(diff[-1]))
            t += grid_dt
        v_max = max(v_max, (front + cut_near) / horizon)
    return v_max


def required_buffer(front_speed: float, horizon: float) -> int:
    return int(math.ceil(1.3 * front_speed * horizon)) + 100


# -- currents ------------------------------------------------------------------


@_timed
def exp_current(config: ExperimentConfig) -> ExperimentResult:
    """Signature crossing currents through the bond left of site 1, measured
    on a single trajectory from the product measure (the currents there are
    functions of that trajectory alone). Buffer must cover the front."""
    params = config.model()
    p = config.density()
    t_total = config.horizon
    v_hat = config.extras.get("front_speed")
    need = required_buffer(v_hat, t_total) if v_hat is not None else None
    if config.buffer <= 0 or (need is not None and config.buffer < need):
        return ExperimentResult(
            config, [], {},
            {"invalid_reason": f"buffer {config.buffer} below required {need}"},
            n_invalid=config.replications,
        )
    lo, hi = -config.buffer, config.window
    bounds = np.linspace(0.0, t_total, config.batches + 1)[1:]
    per_rep = []
    rows = []
    for rep in range(config.replications):
        seed = config.seed + rep
        init = sample_bernoulli(p, lo, hi, SiteUniforms(seed, 0))
        sim = SimState(seed, init)
        jp_b, jm_b = [], []
        for t_end in bounds:
            jp, jm = sim.run_current_to(float(t_end), params.lambda_plus, 1)
            jp_b.append(jp)
            jm_b.append(jm)
        per_rep.append((np.array(jp_b), np.array(jm_b)))
        for b, (jp, jm) in enumerate(zip(jp_b, jm_b)):
            rows.append((rep, b, jp, jm))
    dt = t_total / config.batches
    jp_rates = np.concatenate([jp / dt for jp, _ in per_rep])
    jm_rates = np.concatenate([jm / dt for _, jm in per_rep])
    k_rates = jp_rates - jm_rates
    ref_plus = params.lambda_plus * p / (1.0 - p)
    ref_minus = params.lambda_minus * (1.0 - p) / p
    reports = [
        EstimateReport("plus_current", *batch_stats(jp_rates), len(jp_rates), ref_plus),
        EstimateReport("minus_current", *batch_stats(jm_rates), len(jm_rates), ref_minus),
        EstimateReport("net_flux_rate", *batch_stats(k_rates), len(k_rates),
                       ref_plus - ref_minus),
    ]
    tables = {"batches": (["rep", "batch", "plus_crossings", "minus_crossings"], rows)}
    return ExperimentResult(config, reports, tables)


def flux_variance_ratio(
    lambda_plus: float, p: float | None, times: tuple[float, float],
    reps: int, seed: int, front_speed: float, window: int = 64,
) -> tuple[float, dict]:
    """Var(net flux at t)/t at two horizons; diffusive behavior keeps the
    ratio near 1."""
    params = ModelParams(lambda_plus)
    dens = p if p is not None else params.p_star
    t1, t2 = times
    buf = required_buffer(front_speed, t2)
    ks = {t1: [], t2: []}
    for rep in range(reps):
        s = seed + rep
        init = sample_bernoulli(dens, -buf, window, SiteUniforms(s, 0))
        sim = SimState(s, init)
        jp1, jm1 = sim.run_current_to(t1, lambda_plus, 1)
        jp2, jm2 = sim.run_current_to(t2, lambda_plus, 1)
        ks[t1].append(jp1 - jm1)
        ks[t2].append(jp1 + jp2 - jm1 - jm2)
    v1 = float(np.var(ks[t1], ddof=1)) / t1
    v2 = float(np.var(ks[t2], ddof=1)) / t2
    return v2 / v1, {"var_rate_t1": v1, "var_rate_t2": v2}


# -- profile -------------------------------------------------------------------


@_timed
def exp_profile(config: ExperimentConfig) -> ExperimentResult:
    """Site density and height-variance profile of the equilibrated chain on
    [1, M]: per replication, burn-in then a time average plus snapshots for
    the variance of prefix spin sums.

    Standard errors for the bulk density come from independent replications
    when there are several: region-averaged density is a slow hydrodynamic
    mode whose relaxation time grows superlinearly in the region size, so
    batch means on one trajectory are far too optimistic. With a single
    replication batch means are used (and labelled by batch count).
    """
    m = config.window
    params = config.model()
    if config.burn_in < 2 * m:
        raise ValueError("burn_in must be >= 2 * window (mixing bound)")
    snap_dt = config.extras.get("snapshot_dt", 1.0)
    l_grid = np.unique(np.geomspace(4, m, 25).astype(int))
    bulk = slice(m // 4, 3 * m // 4)
    density_ref = 2.0 * params.p_star - 1.0

    n_rep = config.replications
    n_batches = config.batches if n_rep == 1 else max(2, config.batches // n_rep)
    batch_len = config.horizon / n_batches
    bulk_samples = []
    site_mean_rows = []
    height_samples = []  # rows: h_L at the grid per snapshot, pooled over reps
    for rep in range(n_rep):
        seed = config.seed + rep
        init = sample_bernoulli(params.p_star, 1, m, SiteUniforms(seed, 0))
        sim = SimState(seed, init)
        sim.run_to(config.burn_in, params.lambda_plus)
        acc = np.zeros(m)
        last = np.full(m, config.burn_in)
        rep_site_means = []
        for b in range(n_batches):
            t_b0 = config.burn_in + b * batch_len
            n_snap = max(1, int(round(batch_len / snap_dt)))
            for k in range(1, n_snap + 1):
                sim.run_profile_to(
                    t_b0 + k * batch_len / n_snap, params.lambda_plus, acc, last
                )
                h = np.cumsum(2.0 * sim.spins - 1.0)
                height_samples.append(h[l_grid - 1])
            rep_site_means.append(acc / batch_len)
            acc = np.zeros(m)
        rep_site_means = np.array(rep_site_means)
        site_mean_rows.append(rep_site_means.mean(axis=0))
        bulk_samples.append(
            rep_site_means[:, bulk].mean(axis=1) if n_rep == 1
            else [rep_site_means[:, bulk].mean()]
        )

    bulk_samples = np.concatenate(bulk_samples)
    est, se = batch_stats(bulk_samples)
    site_mean_rows = np.array(site_mean_rows)
    site_mean = site_mean_rows.mean(axis=0)
    if n_rep > 1:
        site_se = site_mean_rows.std(axis=0, ddof=1) / math.sqrt(n_rep)
    else:
        site_se = np.full(m, float("nan"))

    heights = np.array(height_samples)  # (snapshots, len(l_grid))
    n_groups = min(30, len(heights))
    groups = np.array_split(np.arange(len(heights)), n_groups)
    var_groups = np.array([heights[g].var(axis=0, ddof=1) for g in groups])
    var_mean = var_groups.mean(axis=0)
    var_se = var_groups.std(axis=0, ddof=1) / math.sqrt(n_groups)

    fit_mask = (l_grid >= m // 8) & (l_grid <= m // 2)
    slope, intercept = np.polyfit(
        np.log(l_grid[fit_mask]), np.log(var_mean[fit_mask]), 1
    )

    reports = [
        EstimateReport("bulk_density", est, se, len(bulk_samples), density_ref),
        EstimateReport("variance_log_slope", float(slope), float("nan"), len(heights)),
    ]
    tables = {
        "density": (["site", "mean_spin", "se"],
                    [(x + 1, site_mean[x], site_se[x]) for x in range(m)]),
        "height_variance": (["prefix_len", "variance", "se"],
                            list(zip(l_grid.tolist(), var_mean, var_se))),
    }
    notes = {"variance_slope_exploratory": float(slope), "intercept": float(intercept)}
    return ExperimentResult(config, reports, tables, notes)


# -- temporal correlation -------------------------------------------------------


@_timed
def exp_correlation(config: ExperimentConfig) -> ExperimentResult:
    """Autocorrelation of the centered, normalized spin at the origin under
    stationary product-measure starts, with a fitted exponential decay rate
    (jackknife SE over replication groups)."""
    params = config.model()
    p = config.density()
    t_grid = config.extras.get("t_grid", [0.25, 0.5, 1.0, 2.0])
    buf = config.buffer if config.buffer > 0 else int(10 * max(t_grid)) + 40
    lo, hi = -buf, config.window
    mu = 2.0 * p - 1.0
    sd = math.sqrt(4.0 * p * (1.0 - p))
    probe = -lo  # offset of site 0

    prods = np.empty((config.replications, len(t_grid)))
    base = np.empty(config.replications)
    for rep in range(config.replications):
        seed = config.seed + rep
        init = sample_bernoulli(p, lo, hi, SiteUniforms(seed, 0))
        sim = SimState(seed, init)
        f0 = (2.0 * sim.spins[probe] - 1.0 - mu) / sd
        base[rep] = f0 * f0
        for k, t in enumerate(t_grid):
            sim.run_to(float(t), params.lambda_plus)
            ft = (2.0 * sim.spins[probe] - 1.0 - mu) / sd
            prods[rep, k] = f0 * ft

    curve = prods.mean(axis=0)
    curve_se = prods.std(axis=0, ddof=1) / math.sqrt(config.replications)
    # fit only points resolved well above their own noise floor
    fit_mask = curve > 4.0 * curve_se
    groups = np.array_split(np.arange(config.replications), min(25, config.replications))
    fits = []
    for g in groups:
        rest = np.delete(prods, g, axis=0).mean(axis=0)
        fits.append(_decay_rate(t_grid, rest, fit_mask))
    fits = np.asarray(fits)
    c_hat = _decay_rate(t_grid, curve, fit_mask)
    g_n = len(groups)
    c_se = math.sqrt((g_n - 1) / g_n * ((fits - fits.mean()) ** 2).sum())

    reports = [
        EstimateReport("normalization_at_zero", *batch_stats(base), len(base), 1.0),
        EstimateReport("decay_rate", c_hat, c_se, config.replications),
    ]
    tables = {
        "autocorrelation": (
            ["t", "correlation", "se"],
            [(0.0, float(base.mean()), float(base.std(ddof=1) / math.sqrt(len(base))))]
            + list(zip(t_grid, curve, curve_se)),
        )
    }
    return ExperimentResult(config, reports, tables)


def _decay_rate(t_grid, values, mask=None) -> float:
    t = np.asarray(t_grid, dtype=float)
    v = np.asarray(values, dtype=float)
    keep = (v > 0) if mask is None else (mask & (v > 0))
    if keep.sum() < 2:
        return float("nan")
    slope = np.polyfit(t[keep], np.log(v[keep]), 1)[0]
    return -float(slope)


# -- stationarity ---------------------------------------------------------------


@_timed
def exp_stationarity(config: ExperimentConfig) -> ExperimentResult:
    """Local statistics of the buffered product-measure start at several
    times: single-site means against 2p-1 and adjacent-pair correlations
    against (2p-1)^2, with 3-SE bands from replications."""
    params = config.model()
    p = config.density()
    t_checks = config.extras.get("t_checks", [1.0, 5.0, 25.0])
    v_hat = config.extras.get("front_speed", 3.0)
    buf = config.buffer if config.buffer > 0 else required_buffer(v_hat, max(t_checks))
    r = config.window
    lo, hi = -buf, r + 40
    n_rep = config.replications
    means = np.empty((n_rep, len(t_checks), r + 1))
    pairs = np.empty((n_rep, len(t_checks), r))
    probe0 = -lo
    for rep in range(n_rep):
        seed = config.seed + rep
        init = sample_bernoulli(p, lo, hi, SiteUniforms(seed, 0))
        sim = SimState(seed, init)
        for k, t in enumerate(t_checks):
            sim.run_to(float(t), params.lambda_plus)
            s = 2.0 * sim.spins[probe0 : probe0 + r + 1] - 1.0
            means[rep, k] = s
            pairs[rep, k] = s[:-1] * s[1:]
    mu_ref = 2.0 * p - 1.0
    pair_ref = mu_ref * mu_ref
    rows = []
    worst_mean_z = 0.0
    worst_pair_z = 0.0
    for k, t in enumerate(t_checks):
        m = means[:, k].mean(axis=0)
        se = means[:, k].std(axis=0, ddof=1) / math.sqrt(n_rep)
        pm = pairs[:, k].mean(axis=0)
        pse = pairs[:, k].std(axis=0, ddof=1) / math.sqrt(n_rep)
        worst_mean_z = max(worst_mean_z, float(np.abs((m - mu_ref) / se).max()))
        worst_pair_z = max(worst_pair_z, float(np.abs((pm - pair_ref) / pse).max()))
        for x in range(r + 1):
            rows.append((t, x, m[x], se[x]))
    reports = [
        EstimateReport("worst_site_mean_zscore", worst_mean_z, 1.0, n_rep, None,
                       "consistent" if worst_mean_z <= 3.0 else "deviates"),
        EstimateReport("worst_pair_zscore", worst_pair_z, 1.0, n_rep, None,
                       "consistent" if worst_pair_z <= 3.0 else "deviates"),
    ]
    tables = {"site_means": (["t", "site", "mean_spin", "se"], rows)}
    return ExperimentResult(config, reports, tables)


RUNNERS = {
    "mixing": exp_mixing,
    "current": exp_current,
    "front": exp_front_speed,
    "profile": exp_profile,
    "correlation": exp_correlation,
    "stationarity": exp_stationarity,
}
