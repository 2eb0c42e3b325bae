"""Sampled functions, spectra, decomposition and short-time norms."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modspaces.modspace import (
    NormParams,
    SampledFunction,
    TruncationWarning,
    box_k,
    check_algebra_ratio,
    default_k_max,
    estimate_gevrey_constant,
    from_spectrum,
    load_function,
    lp_norm,
    mod_norm,
    mod_norm_record,
    multiply,
    refine,
    save_function,
    stft_norm,
    synthesize,
)
from modspaces.weights import WeightSpec, weight_eval

import _oracles as orc

PI = math.pi


# ----------------------------------------------------------------------
# spectra and transform conventions
# ----------------------------------------------------------------------

def test_mode_spectrum_single_coefficient():
    f = synthesize("mode", k=3, N=64)
    F = f.spectrum
    idx = f.index_axis()
    expect = np.where(idx == 3, math.sqrt(2 * PI), 0.0)
    np.testing.assert_allclose(F, expect, atol=1e-12)


def test_gaussian_spectrum_matches_closed_form():
    f = synthesize("gaussian", a=1.0, L=12.0, N=512)
    xi = f.xi_axis()
    expect = np.array([float(orc.gaussian_transform(1.0, x)) for x in xi])
    np.testing.assert_allclose(f.spectrum.real, expect, atol=1e-12)
    np.testing.assert_allclose(f.spectrum.imag, 0.0, atol=1e-12)


def test_from_spectrum_round_trip():
    rng = np.random.default_rng(41)
    coeffs = rng.standard_normal(64) + 1j * rng.standard_normal(64)
    f = from_spectrum(1, PI, 64, coeffs)
    g = SampledFunction(1, PI, 64, f.values)  # force recomputation
    np.testing.assert_allclose(g.spectrum, coeffs, atol=1e-10)


def test_parseval_identity():
    f = synthesize("random_bandlimited", B=10.0, N=128, seed=5)
    space = f.cell_volume * np.sum(np.abs(f.values) ** 2)
    freq = (PI / f.L) ** f.n * np.sum(np.abs(f.spectrum) ** 2)
    assert space == pytest.approx(freq, rel=1e-12)


def test_grid_bookkeeping():
    f = synthesize("gaussian", a=1.0, L=2.0, N=8)
    np.testing.assert_allclose(f.grid_axis(), -2.0 + 0.5 * np.arange(8))
    assert f.spacing == pytest.approx(0.5)
    assert f.cell_volume == pytest.approx(0.5)
    np.testing.assert_allclose(f.xi_axis(), PI * f.index_axis() / 2.0)
    assert default_k_max(f) == int(PI * 4 / 2.0)


def test_sampled_function_validation():
    with pytest.raises(ValueError):
        SampledFunction(3, PI, 8, np.zeros(8))
    with pytest.raises(ValueError):
        SampledFunction(1, PI, 12, np.zeros(12))
    with pytest.raises(ValueError):
        SampledFunction(1, PI, 8, np.zeros(9))


def test_synthesize_validation():
    with pytest.raises(ValueError):
        synthesize("mode", k=1, L=2.0)  # off the frequency grid
    with pytest.raises(ValueError):
        synthesize("mode", k=200, N=64)  # beyond Nyquist
    with pytest.raises(ValueError):
        synthesize("gaussian", a=-1.0)
    with pytest.raises(ValueError):
        synthesize("random_bandlimited", B=8.0)  # no seed
    with pytest.raises(ValueError):
        synthesize("random_bandlimited", B=1e6, seed=1)
    with pytest.raises(ValueError):
        synthesize("wavelet")


def test_random_bandlimited_is_real_and_banded():
    f = synthesize("random_bandlimited", B=6.0, N=64, seed=11)
    assert np.max(np.abs(f.values.imag)) < 1e-12
    xi = f.xi_axis()
    outside = np.abs(xi) > 6.0 + 1e-9
    assert np.max(np.abs(f.spectrum[outside])) == 0.0


def test_random_bandlimited_seed_determinism():
    f = synthesize("random_bandlimited", B=6.0, N=64, seed=11)
    g = synthesize("random_bandlimited", B=6.0, N=64, seed=11)
    np.testing.assert_array_equal(f.values, g.values)
    h = synthesize("random_bandlimited", B=6.0, N=64, seed=12)
    assert np.max(np.abs(f.values - h.values)) > 1e-6


# ----------------------------------------------------------------------
# block operators
# ----------------------------------------------------------------------

def test_box_k_lattice_selects_exactly():
    f = synthesize("random_bandlimited", B=5.0, N=64, seed=2)
    g = box_k(f, 3)
    idx = f.index_axis()
    expect = np.where(idx == 3, f.spectrum, 0.0)
    np.testing.assert_allclose(g.spectrum, expect, atol=1e-12)


def test_box_sum_reconstructs():
    f = synthesize("random_bandlimited", B=5.0, N=64, seed=3)
    total = np.zeros_like(f.values)
    for k in range(-6, 7):
        total = total + box_k(f, k).values
    np.testing.assert_allclose(total, f.values, atol=1e-10)


def test_box_sum_reconstructs_continuum():
    f = synthesize("gaussian", a=1.0, L=8.0, N=256)
    total = np.zeros_like(f.values)
    for k in range(-12, 13):
        total = total + box_k(f, k, mode="continuum").values
    np.testing.assert_allclose(total, f.values, atol=1e-9)


def test_box_mode_validation():
    f = synthesize("gaussian", a=1.0, L=2.0, N=32)
    with pytest.raises(ValueError):
        box_k(f, 0, mode="lattice")  # L != pi
    with pytest.raises(ValueError):
        box_k(f, 0, mode="windowed")


# ----------------------------------------------------------------------
# norms
# ----------------------------------------------------------------------

def test_lp_norm_gaussian_against_oracle():
    f = synthesize("gaussian", a=1.0, L=10.0, N=512)
    assert lp_norm(f, 2) == pytest.approx(float(orc.gaussian_l2_norm(1.0)), rel=1e-10)
    assert lp_norm(f, math.inf) == pytest.approx(1.0, rel=1e-12)
    with pytest.raises(ValueError):
        lp_norm(f, 0.5)


def test_mod_norm_single_mode_closed_form():
    c, k = 2.5, 4
    f = synthesize("mode", k=k, c=c, N=64)
    for spec in (WeightSpec.polynomial(2.0), WeightSpec.gevrey(2.0)):
        for p, q in [(2.0, 1.0), (1.0, 2.0), (math.inf, math.inf)]:
            val = mod_norm(f, NormParams(p, q, spec))
            blk = c * (2 * PI) ** (1.0 / p) if p != math.inf else c
            assert val == pytest.approx(weight_eval(spec, k) * blk, rel=1e-12)


def test_mod_norm_two_modes_q_aggregation():
    f1 = synthesize("mode", k=2, c=1.0, N=64)
    f2 = synthesize("mode", k=5, c=3.0, N=64)
    f = f1.copy_with(f1.values + f2.values)
    spec = WeightSpec.polynomial(1.0)
    q = 2.0
    terms = [
        math.sqrt(1 + 2 * 2) * 1.0 * math.sqrt(2 * PI),
        math.sqrt(1 + 5 * 5) * 3.0 * math.sqrt(2 * PI),
    ]
    expect = (terms[0] ** q + terms[1] ** q) ** (1.0 / q)
    assert mod_norm(f, NormParams(2.0, q, spec)) == pytest.approx(expect, rel=1e-12)
    # q = inf takes the max term
    expect_sup = max(terms)
    assert mod_norm(f, NormParams(2.0, math.inf, spec)) == pytest.approx(expect_sup, rel=1e-12)


def test_mod_norm_lattice_equals_continuum_at_integer_period():
    # At L = pi the window restricted to the xi grid is a Kronecker
    # delta, so the two modes must agree to rounding.
    f = synthesize("random_bandlimited", B=8.0, N=64, seed=9)
    spec = WeightSpec.gevrey(2.0)
    a = mod_norm(f, NormParams(2.0, 2.0, spec, mode="lattice"))
    b = mod_norm(f, NormParams(2.0, 2.0, spec, mode="continuum"))
    assert a == pytest.approx(b, rel=1e-12)


def test_mod_norm_continuum_refinement_stable():
    f = synthesize("gaussian", a=1.0, L=8.0, N=256)
    spec = WeightSpec.polynomial(2.0)
    a = mod_norm(f, NormParams(2.0, 2.0, spec, mode="continuum"))
    b = mod_norm(refine(f), NormParams(2.0, 2.0, spec, mode="continuum"))
    assert a == pytest.approx(b, rel=1e-9)


def test_mod_norm_zero_function():
    f = SampledFunction(1, PI, 32, np.zeros(32, dtype=complex))
    rec = mod_norm_record(f, NormParams(2.0, 1.0, WeightSpec.polynomial(0.0)))
    assert rec["value"] == 0.0
    assert rec["truncation_tail"] == 0.0


def test_mod_norm_truncation_warning():
    f = synthesize("random_bandlimited", B=20.0, N=64, seed=4)
    params = NormParams(2.0, 1.0, WeightSpec.polynomial(0.0), k_max=5)
    with pytest.warns(TruncationWarning):
        rec = mod_norm_record(f, params)
    assert rec["truncation_tail"] > 1e-9
    assert rec["warnings"]


def test_norm_params_validation():
    f = synthesize("mode", k=1, N=32)
    with pytest.raises(ValueError):
        NormParams(2.0, 1.0, WeightSpec.loglog(), k_max=100).resolved_k_max(f)
    with pytest.raises(ValueError):
        mod_norm(f, NormParams(2.0, 0.5, WeightSpec.loglog()))
    with pytest.raises(ValueError):
        mod_norm(f, NormParams(2.0, 1.0, WeightSpec.loglog(), mode="spooky"))


def test_norm_params_to_dict_tokens():
    d = NormParams(math.inf, 2.0, WeightSpec.gevrey(1.5)).to_dict()
    assert d["p"] == "inf" and d["q"] == 2.0
    assert d["weight"] == {"variant": "gevrey", "s": 1.5}


@settings(max_examples=20, deadline=None)
@given(
    st.floats(min_value=-5.0, max_value=5.0, allow_nan=False),
    st.integers(min_value=0, max_value=9999),
)
def test_mod_norm_homogeneous_and_triangle(c, seed):
    f = synthesize("random_bandlimited", B=5.0, N=32, seed=seed)
    g = synthesize("random_bandlimited", B=5.0, N=32, seed=seed + 13)
    params = NormParams(2.0, 1.0, WeightSpec.gevrey(2.0))
    nf, ng = mod_norm(f, params), mod_norm(g, params)
    scaled = mod_norm(f.copy_with(c * f.values), params)
    assert scaled == pytest.approx(abs(c) * nf, rel=1e-10, abs=1e-12)
    nsum = mod_norm(f.copy_with(f.values + g.values), params)
    assert nsum <= nf + ng + 1e-10


@settings(max_examples=15, deadline=None)
@given(st.integers(min_value=0, max_value=9999))
def test_mod_norm_decreasing_in_q(seed):
    f = synthesize("random_bandlimited", B=5.0, N=32, seed=seed)
    spec = WeightSpec.loglog()
    vals = [mod_norm(f, NormParams(2.0, q, spec)) for q in (1.0, 2.0, 4.0, math.inf)]
    for a, b in zip(vals, vals[1:]):
        assert b <= a + 1e-12


# ----------------------------------------------------------------------
# short-time transform norm
# ----------------------------------------------------------------------

def test_stft_norm_mode_closed_form():
    # For f = e^{ikx} the transform modulus is |spectrum of window| at
    # xi - k, independent of the shift, so the norm reduces to a single
    # weighted sum over the window spectrum.
    N, k = 128, 3
    f = synthesize("mode", k=k, N=N)
    window = synthesize("gaussian", a=2.0, N=N)
    p, q = 2.0, 2.0
    spec = WeightSpec.polynomial(1.0)
    got = stft_norm(f, p, q, spec, window)

    W = np.abs(np.roll(window.spectrum, k))
    idx = f.index_axis()
    wts = (1.0 + (PI * idx / f.L) ** 2) ** 0.5
    inner = (2 * f.L) ** (1.0 / p) * W
    expect = ((PI / f.L) * np.sum((wts * inner) ** q)) ** (1.0 / q)
    assert got == pytest.approx(expect, rel=1e-10)


def test_stft_norm_sup_variants():
    f = synthesize("mode", k=0, N=64)
    window = synthesize("gaussian", a=1.0, N=64)
    val = stft_norm(f, math.inf, math.inf, WeightSpec.polynomial(0.0), window)
    assert val == pytest.approx(float(np.max(np.abs(window.spectrum))), rel=1e-10)


def test_stft_norm_guards():
    f = synthesize("gaussian", a=1.0, N=8192)
    window = synthesize("gaussian", a=1.0, N=8192)
    with pytest.raises(ValueError):
        stft_norm(f, 2, 2, WeightSpec.loglog(), window)
    f = synthesize("gaussian", a=1.0, N=64)
    wrong = synthesize("gaussian", a=1.0, N=32)
    with pytest.raises(ValueError):
        stft_norm(f, 2, 2, WeightSpec.loglog(), wrong)


def test_stft_and_decomposition_comparable():
    f = synthesize("random_bandlimited", B=10.0, N=128, seed=21)
    window = synthesize("gaussian", a=2.0, N=128)
    spec = WeightSpec.gevrey(2.0)
    s = stft_norm(f, 2.0, 2.0, spec, window)
    m = mod_norm(f, NormParams(2.0, 2.0, spec))
    assert 0.05 < s / m < 20.0


# ----------------------------------------------------------------------
# algebra helpers
# ----------------------------------------------------------------------

def test_multiply_and_refine():
    f = synthesize("mode", k=2, N=64)
    g = synthesize("mode", k=3, N=64)
    h = multiply(f, g)
    expect = synthesize("mode", k=5, N=64)
    np.testing.assert_allclose(h.values, expect.values, atol=1e-12)
    r = refine(f)
    assert r.N == 128 and r.L == f.L
    expect_fine = synthesize("mode", k=2, N=128)
    np.testing.assert_allclose(r.values, expect_fine.values, atol=1e-10)
    with pytest.raises(ValueError):
        multiply(f, synthesize("mode", k=1, N=32))
    with pytest.raises(ValueError):
        refine(f, 3)


def test_refine_2d_preserves_spectrum():
    f = synthesize("random_bandlimited", n=2, B=4.0, N=16, seed=30)
    r = refine(f)
    params = NormParams(2.0, 2.0, WeightSpec.polynomial(1.0))
    assert mod_norm(r, params) == pytest.approx(mod_norm(f, params), rel=1e-10)


def test_check_algebra_ratio_constant_pair_is_one():
    # f = g = 1: every norm involves only the k = 0 block, and with
    # p1 = p2 = 2p the (2L)^(1/p) factors cancel exactly.
    one = synthesize("mode", k=0, N=32)
    params = NormParams(2.0, 1.0, WeightSpec.polynomial(2.0))
    rep = check_algebra_ratio([(one, one)], params)
    assert rep.passed
    assert rep.extra["max_ratio"] == pytest.approx(1.0, rel=1e-12)


def test_check_algebra_ratio_corpus():
    corpus = [
        (
            synthesize("random_bandlimited", B=6.0, N=64, seed=50 + i),
            synthesize("random_bandlimited", B=6.0, N=64, seed=60 + i),
        )
        for i in range(4)
    ]
    params = NormParams(2.0, 2.0, WeightSpec.gevrey(2.0))
    rep = check_algebra_ratio(corpus, params)
    assert rep.passed
    assert len(rep.extra["ratios"]) == 4
    assert all(math.isfinite(r) for r in rep.extra["ratios"])
    assert rep.extra["rel_change"] < 0.05


def test_estimate_gevrey_constant_mode_closed_form():
    k, s = 4, 1.5
    f = synthesize("mode", k=k, N=128)
    got = estimate_gevrey_constant(f, s, alpha_max=10)
    expect = max(
        (k ** a / math.factorial(a) ** s) ** (1.0 / (a + 1)) for a in range(11)
    )
    assert got == pytest.approx(expect, rel=1e-9)
    assert estimate_gevrey_constant(f.copy_with(0 * f.values), s) == 0.0
    with pytest.raises(ValueError):
        estimate_gevrey_constant(f, s, alpha_max=25)


# ----------------------------------------------------------------------
# file format
# ----------------------------------------------------------------------

def test_save_load_round_trip_bit_exact(tmp_path):
    f = synthesize("random_bandlimited", B=7.0, N=64, seed=77)
    path = tmp_path / "fn.csv"
    save_function(f, path, kind="random_bandlimited", seed=77)
    g, header = load_function(path)
    np.testing.assert_array_equal(g.values, f.values)
    assert (g.n, g.L, g.N) == (f.n, f.L, f.N)
    assert header["kind"] == "random_bandlimited" and header["seed"] == 77


def test_load_function_rejects_short_file(tmp_path):
    f = synthesize("mode", k=1, N=32)
    path = tmp_path / "fn.csv"
    save_function(f, path)
    lines = path.read_text().splitlines()
    path.write_text("\n".join(lines[:-4]) + "\n")
    with pytest.raises(ValueError):
        load_function(path)
