import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from torus_lab import errors
from torus_lab.torus_fn import (
    NormKind,
    constant,
    e,
    from_fourier,
    from_samples,
    mean,
    norm,
    random_trig,
    signed_freqs,
    translate,
)

grids = st.sampled_from([16, 32, 64, 128])
seeds = st.integers(0, 2**32 - 1)


def test_signed_freqs_layout():
    assert signed_freqs(8).tolist() == [0, 1, 2, 3, 4, -3, -2, -1]


def test_character_samples_and_coefficients():
    f = from_fourier({3: 1.0}, 32)
    x = np.arange(32) / 32
    assert np.allclose(f.samples, np.exp(2j * np.pi * 3 * x))
    assert f.coeff(3) == pytest.approx(1.0)
    assert f.band() == 3
    assert f.one_bounded


def test_constant_mean():
    assert mean(constant(0.25, 16)) == pytest.approx(0.25)


def test_evaluation_off_grid_matches_closed_form():
    f = from_fourier({2: 0.5, -5: 0.25j}, 64)
    x = np.array([0.123, 0.77, 0.5001])
    expected = 0.5 * np.exp(4j * np.pi * x) + 0.25j * np.exp(-10j * np.pi * x)
    assert np.allclose(f(x), expected, atol=1e-14)


def test_nyquist_and_band_errors():
    with pytest.raises(errors.BandLimitError):
        from_fourier({8: 1.0}, 16)
    with pytest.raises(errors.BandLimitError):
        from_fourier({9: 1.0}, 16)
    with pytest.raises(errors.BandLimitError):
        from_fourier({1: 1.0}, 16).coeff(9)
    with pytest.raises(errors.BandLimitError):
        random_trig(np.random.default_rng(0), 16, 8)


def test_bad_grid_size():
    with pytest.raises(errors.TorusLabError):
        from_samples(np.ones(12))


def test_norm_kind_validation():
    with pytest.raises(errors.ParameterError):
        NormKind.Lp(0.5)
    with pytest.raises(errors.ParameterError):
        NormKind.SobolevNeg(0)
    with pytest.raises(errors.ParameterError):
        NormKind("nope")


def test_norms_of_a_character():
    f = from_fourier({5: 1.0}, 64)
    assert norm(f, NormKind.Lp(2)) == pytest.approx(1.0)
    assert norm(f, NormKind.Linf()) == pytest.approx(1.0)
    assert norm(f, NormKind.U2Fourier()) == pytest.approx(1.0)
    # (1 + 25)^(-1/2) under the square root
    assert norm(f, NormKind.SobolevNeg(1.0)) == pytest.approx(26 ** -0.25)


def test_resample_preserves_polynomial():
    f = from_fourier({1: 1.0, -3: 0.5}, 16)
    g = f.resample(64)
    x = np.linspace(0, 1, 7)
    assert np.allclose(f(x), g(x))
    with pytest.raises(errors.BandLimitError):
        f.resample(4)


def test_grid_mismatch_rejected():
    with pytest.raises(errors.ShapeError):
        from_fourier({0: 1.0}, 16) + from_fourier({0: 1.0}, 32)


@given(grids, seeds)
def test_parseval(n, seed):
    f = random_trig(np.random.default_rng(seed), n, n // 4, one_bounded=False)
    l2 = np.mean(np.abs(f.samples) ** 2)
    assert l2 == pytest.approx(np.sum(np.abs(f.coeffs) ** 2), rel=1e-12)


@given(grids, seeds)
def test_random_trig_is_one_bounded(n, seed):
    f = random_trig(np.random.default_rng(seed), n, n // 4)
    assert np.abs(f.samples).max() <= 1 + 1e-12
    assert f.band() <= n // 4


@given(grids, seeds, st.floats(-3, 3))
def test_translation_is_a_modulation_of_coefficients(n, seed, t):
    f = random_trig(np.random.default_rng(seed), n, n // 4)
    g = translate(f, t)
    xi = f.freqs
    assert np.allclose(g.coeffs, f.coeffs * e(xi * t), atol=1e-13)
    assert np.allclose(g(0.3), f(0.3 + t), atol=1e-12)


@given(grids, seeds)
def test_lp_norms_increase_with_p(n, seed):
    f = random_trig(np.random.default_rng(seed), n, n // 4)
    values = [norm(f, NormKind.Lp(p)) for p in (1, 2, 4)] + [norm(f, NormKind.Linf())]
    assert all(a <= b * (1 + 1e-12) for a, b in zip(values, values[1:]))
