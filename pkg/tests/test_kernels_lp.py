import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from torus_lab import errors
from torus_lab.kernels import (
    KernelSpec,
    annulus_mask,
    apply_multiplier,
    convolve,
    dirichlet_closed_form,
    fejer_closed_form,
    kernel,
    lp_project,
    max_annulus,
)
from torus_lab.torus_fn import from_fourier, random_trig


@pytest.mark.parametrize("M", [1, 5, 31])
def test_kernels_match_closed_forms(M):
    n = 128
    x = np.arange(n) / n
    assert np.allclose(kernel(KernelSpec("dirichlet", M), n).samples, dirichlet_closed_form(M, x), atol=1e-11)
    assert np.allclose(kernel(KernelSpec("fejer", M), n).samples, fejer_closed_form(M, x), atol=1e-11)


def test_fejer_is_nonnegative_with_unit_mass():
    K = kernel(KernelSpec("fejer", 10), 64)
    assert K.samples.real.min() > -1e-12
    assert np.mean(K.samples).real == pytest.approx(1.0)


def test_kernel_spec_validation():
    with pytest.raises(errors.ParameterError):
        KernelSpec("gauss", 3)
    with pytest.raises(errors.ParameterError):
        KernelSpec("fejer", 0)
    with pytest.raises(errors.BandLimitError):
        kernel(KernelSpec("dirichlet", 8), 16)


def test_multiplier_values():
    assert KernelSpec("fejer", 3).multiplier(np.array([0, 2, 4])).tolist() == [1.0, 0.5, 0.0]
    assert KernelSpec("dirichlet", 3).multiplier(np.array([3, 4])).tolist() == [1.0, 0.0]


def test_convolution_equals_multiplier():
    f = random_trig(np.random.default_rng(3), 64, 20)
    spec = KernelSpec("fejer", 7)
    a = convolve(f, kernel(spec, 64))
    b = apply_multiplier(f, spec)
    assert np.allclose(a.coeffs, b.coeffs)


def test_annuli():
    xi = np.arange(-9, 10)
    assert xi[annulus_mask(xi, 0)].tolist() == [0]
    assert sorted(xi[annulus_mask(xi, 3)].tolist()) == [-7, -6, -5, -4, 4, 5, 6, 7]
    assert max_annulus(64) == 6
    f = from_fourier({1: 1.0}, 16)
    with pytest.raises(errors.BandLimitError):
        lp_project(f, 5)
    with pytest.raises(errors.ParameterError):
        lp_project(f, -1)


@given(st.sampled_from([16, 64, 256]), st.integers(0, 2**31))
def test_lp_pieces_sum_back(n, seed):
    f = random_trig(np.random.default_rng(seed), n, n // 2 - 1)
    total = sum((lp_project(f, j) for j in range(max_annulus(n) + 1)), start=0 * f)
    assert np.allclose(total.samples, f.samples, atol=1e-12)


@given(st.sampled_from([32, 64]), st.integers(0, 2**31), st.integers(1, 15))
def test_fejer_smoothing_contracts_linf(n, seed, M):
    f = random_trig(np.random.default_rng(seed), n, n // 4)
    g = apply_multiplier(f, KernelSpec("fejer", M))
    assert np.abs(g.samples).max() <= np.abs(f.samples).max() + 1e-12
