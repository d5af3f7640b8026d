import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toomsim.core import (
    ModelParams,
    SpinConfig,
    p_star,
    sample_bernoulli,
    sample_monotone_family,
)
from toomsim.randomness import SiteUniforms

spin_lists = st.lists(st.sampled_from([-1, 1]), min_size=1, max_size=48)


def test_p_star_values():
    assert p_star(0.5, 0.5) == 0.5
    assert p_star(0.8, 0.2) == pytest.approx(1 / 3, abs=1e-15)
    assert p_star(0.2, 0.8) == pytest.approx(2 / 3, abs=1e-15)


def test_p_star_rejects_bad_rates():
    with pytest.raises(ValueError):
        p_star(0.0, 1.0)
    with pytest.raises(ValueError):
        p_star(0.8, 0.3)
    with pytest.raises(ValueError):
        p_star(-0.2, 1.2)


@given(lam=st.floats(0.01, 0.99))
def test_p_star_residual(lam):
    p = p_star(lam, 1 - lam)
    assert abs(((1 - p) / p) ** 2 - lam / (1 - lam)) < 1e-12


def test_model_params():
    m = ModelParams(0.8)
    assert m.lambda_minus == pytest.approx(0.2, abs=1e-15)
    assert m.lambda_plus + m.lambda_minus == 1.0
    assert m.p_star == pytest.approx(1 / 3)
    assert m.rate(1) == 0.8 and m.rate(-1) == pytest.approx(0.2)
    with pytest.raises(ValueError):
        ModelParams(1.2)
    with pytest.raises(ValueError):
        ModelParams(0.8, 0.3)


def test_first_opposite_right_examples():
    cfg = SpinConfig.from_signs(1, [1, 1, -1, 1])
    assert cfg.first_opposite_right(1) == 3
    assert SpinConfig.from_signs(1, [1, 1, 1, 1]).first_opposite_right(2) is None
    assert SpinConfig.from_signs(1, [-1, 1, -1]).first_opposite_right(2) == 3


def test_block_len_examples():
    assert SpinConfig.from_signs(1, [1, 1, -1]).block_left_len(3) == (2, True)
    assert SpinConfig.from_signs(0, [1, -1, -1, -1]).block_right_len(0) == (3, True)
    assert SpinConfig.constant(0, 4, 1).block_left_len(5) == (5, True)
    assert SpinConfig.from_signs(0, [-1, 1, 1, -1]).block_left_len(3) == (2, False)
    stats = SpinConfig.from_signs(0, [1, 1, -1, 1, -1]).block_stats(2)
    assert (stats.left_len, stats.right_len) == (2, 1)
    assert stats.left_clipped and not stats.right_clipped


@given(signs=spin_lists, lo=st.integers(-30, 30))
@settings(max_examples=200)
def test_first_opposite_right_matches_naive_scan(signs, lo):
    cfg = SpinConfig.from_signs(lo, signs)
    for x in range(lo, lo + len(signs)):
        i = x - lo
        expected = next(
            (lo + z for z in range(i + 1, len(signs)) if signs[z] != signs[i]), None
        )
        assert cfg.first_opposite_right(x) == expected


@given(signs=spin_lists, lo=st.integers(-30, 30))
@settings(max_examples=200)
def test_block_lens_match_brute_force(signs, lo):
    cfg = SpinConfig.from_signs(lo, signs)
    n = len(signs)
    for x in range(lo + 1, lo + n + 1):
        i = x - 1 - lo
        l = 1
        while i - l >= 0 and signs[i - l] == signs[i]:
            l += 1
        assert cfg.block_left_len(x) == (l, i - l < 0)
    for x in range(lo - 1, lo + n - 1):
        i = x + 1 - lo
        r = 1
        while i + r < n and signs[i + r] == signs[i]:
            r += 1
        assert cfg.block_right_len(x) == (r, i + r >= n)


def test_window_checks():
    cfg = SpinConfig.from_signs(0, [1, -1])
    with pytest.raises(IndexError):
        cfg.spin(2)
    with pytest.raises(IndexError):
        cfg.first_opposite_right(-1)
    with pytest.raises(ValueError):
        SpinConfig(0, 0, 0)


def test_swap_and_flip_and_magnetization():
    cfg = SpinConfig.from_signs(0, [1, -1, 1])
    assert cfg.magnetization() == 1
    cfg.swap(0, 1)
    assert cfg.to_array().tolist() == [-1, 1, 1]
    assert cfg.magnetization() == 1
    cfg.flip(2)
    assert cfg.magnetization() == -1


def test_sample_bernoulli_density_and_determinism():
    u = SiteUniforms(5, 0)
    cfg = sample_bernoulli(0.5, 0, 10**6 - 1, u)
    dens = cfg.bits.bit_count() / 10**6
    assert abs(dens - 0.5) < 3 * math.sqrt(0.25 / 10**6)
    cfg3 = sample_bernoulli(0.3, 0, 10**6 - 1, u)
    assert abs(cfg3.bits.bit_count() / 10**6 - 0.3) < 3 * math.sqrt(0.21 / 10**6)
    assert sample_bernoulli(0.5, 0, 10**6 - 1, SiteUniforms(5, 0)) == cfg
    with pytest.raises(ValueError):
        sample_bernoulli(1.0, 0, 9, u)


@given(ps=st.lists(st.floats(0.05, 0.95), min_size=1, max_size=5), seed=st.integers(0, 2**32))
@settings(max_examples=60)
def test_monotone_family_order(ps, seed):
    ps = sorted(ps)
    fam = sample_monotone_family(ps, -8, 40, SiteUniforms(seed, 0))
    arrays = [f.to_u8() for f in fam]
    for a, b in zip(arrays, arrays[1:]):
        assert (a <= b).all()


def test_monotone_family_edge_cases():
    u = SiteUniforms(2, 0)
    same = sample_monotone_family([0.4, 0.4], 0, 20, u)
    assert same[0] == same[1]
    with pytest.raises(ValueError):
        sample_monotone_family([0.8, 0.2], 0, 10, u)
    fam = sample_monotone_family([0.25, 0.5, 0.75], 0, 40_000, u)
    for p, cfg in zip([0.25, 0.5, 0.75], fam):
        dens = cfg.bits.bit_count() / 40_001
        assert abs(dens - p) < 3 * math.sqrt(p * (1 - p) / 40_001)


@given(signs=spin_lists, lo=st.integers(-10, 10))
@settings(max_examples=100)
def test_runlength_roundtrip(signs, lo):
    cfg = SpinConfig.from_signs(lo, signs)
    assert SpinConfig.from_runlength(lo, cfg.to_runlength()) == cfg


def test_runlength_parse_rejects_junk():
    with pytest.raises(ValueError):
        SpinConfig.from_runlength(0, "+3x2")
    assert SpinConfig.from_runlength(0, "+3-2+1").to_array().tolist() == [1, 1, 1, -1, -1, 1]


@given(signs=spin_lists)
def test_u8_roundtrip(signs):
    cfg = SpinConfig.from_signs(0, signs)
    assert SpinConfig.from_u8(0, cfg.to_u8()) == cfg
    assert cfg.to_u8().tolist() == [(1 + s) // 2 for s in signs]
