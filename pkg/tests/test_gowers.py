import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from torus_lab import errors
from torus_lab.gowers import (
    BoxWeights,
    box_bound_factor,
    box_norm,
    box_norm_quadrature,
    dual_difference_sides,
    dual_function,
    gcs_check,
    gowers_norm,
    gowers_power,
    mult_derivative,
    sobolev_difference_sides,
)
from torus_lab.oscillatory import validate_family
from torus_lab.torus_fn import NormKind, from_fourier, from_samples, norm, random_trig


def brute_u2_power(v):
    n = len(v)
    total = 0
    for x, h1, h2 in itertools.product(range(n), repeat=3):
        total += (
            v[x]
            * np.conj(v[(x + h1) % n])
            * np.conj(v[(x + h2) % n])
            * v[(x + h1 + h2) % n]
        )
    return total.real / n**3


def test_u2_all_methods_match_brute_force(rng):
    f = random_trig(rng, 8, 3)
    ref = brute_u2_power(f.samples)
    for method in ("direct", "recursive", "fourier"):
        assert gowers_power(f, 2, method) == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("s", [2, 3])
def test_characters_have_unit_norm(s):
    f = from_fourier({3: 1.0}, 16)
    assert gowers_norm(f, s, "recursive") == pytest.approx(1.0)
    assert gowers_norm(f, s, "direct") == pytest.approx(1.0)


def test_quadratic_phase_is_u3_structured_but_u2_small():
    n = 64
    j = np.arange(n)
    f = from_samples(np.exp(2j * np.pi * j * j / n))
    assert gowers_norm(f, 3) == pytest.approx(1.0, abs=1e-12)
    assert gowers_norm(f, 2) < 0.5


def test_u1_is_abs_mean():
    f = from_fourier({0: 0.3, 2: 0.5}, 16)
    assert gowers_norm(f, 1) == pytest.approx(0.3)


def test_parameter_and_budget_errors():
    f = from_fourier({1: 1.0}, 16)
    with pytest.raises(errors.ParameterError):
        gowers_power(f, 0)
    with pytest.raises(errors.ParameterError):
        gowers_power(f, 3, "fourier")
    with pytest.raises(errors.BudgetError):
        gowers_power(from_fourier({1: 1.0}, 512), 2, "direct")


def test_mult_derivative_of_character_is_constant():
    f = from_fourier({5: 1.0}, 32)
    d = mult_derivative(f, 0.1)
    assert np.allclose(d.samples, np.exp(-2j * np.pi * 5 * 0.1))


def test_box_norm_fft_pairing_matches_quadrature(rng):
    f = random_trig(rng, 32, 5)
    w = BoxWeights((0.3, 0.7))
    assert box_norm(f, w) == pytest.approx(box_norm_quadrature(f, w), rel=1e-12)
    with pytest.raises(errors.BandLimitError):
        box_norm(random_trig(rng, 32, 9), w)


def test_box_weights():
    w = BoxWeights((0.5, 2.0))
    h, wt = w.nodes(1)
    assert wt.sum() == pytest.approx(1.0)
    assert np.all(np.abs(h) <= 2.0)
    assert box_bound_factor(w, 4) == pytest.approx(64.0)
    with pytest.raises(errors.ParameterError):
        box_bound_factor(w, 2)
    with pytest.raises(errors.ParameterError):
        BoxWeights((0.0, 1.0))


def test_dual_function_of_character_along_linear_family():
    # F(x) = (1/N) int e(xi (x - y)) dy = e(xi x) * (1 - e(-xi N)) / (2 pi i xi N)
    fam = validate_family([[0, 1]])
    xi, N = 3, 7.25
    fs = [from_fourier({xi: 1.0}, 16), from_fourier({0: 1.0}, 16)]
    F, est = dual_function(fam, N, 1, fs)
    factor = (1 - np.exp(-2j * np.pi * xi * N)) / (2j * np.pi * xi * N)
    x = np.linspace(0, 1, 5)
    assert np.allclose(F(x), np.exp(2j * np.pi * xi * x) * factor, atol=1e-12)
    assert est < 1e-8


def test_dual_difference_interchange(rng):
    shifts = [np.array([0.0, 1.0]), np.array([0.0, 0.0, 1.0])]
    fs = [random_trig(rng, 16, 1), random_trig(rng, 16, 1)]
    lhs, rhs = dual_difference_sides(shifts, fs, 3.0)
    assert lhs <= rhs * (1 + 1e-9)


def test_sobolev_difference_bound(rng):
    f = random_trig(rng, 16, 4)
    lhs, rhs, _ = sobolev_difference_sides(f, 1, 1.0)
    # the H^-sigma norm is dominated by L^2, and averaging |Delta_h f|^2 over h
    # gives ||f||_2^4
    assert lhs <= norm(f, NormKind.Lp(2)) ** 4 + 1e-12
    assert rhs <= 1 + 1e-12


seeds = st.integers(0, 2**31)


@given(seeds)
def test_monotone_in_s(seed):
    f = random_trig(np.random.default_rng(seed), 16, 5)
    u1, u2, u3 = (gowers_norm(f, s) for s in (1, 2, 3))
    assert u1 <= u2 * (1 + 1e-12) and u2 <= u3 * (1 + 1e-12)
    assert u3 <= np.abs(f.samples).max() + 1e-12


@given(seeds)
def test_gowers_cauchy_schwarz(seed):
    r = np.random.default_rng(seed)
    lhs, rhs = gcs_check([random_trig(r, 16, 4) for _ in range(4)])
    assert lhs <= rhs * (1 + 1e-12)


@given(seeds, st.floats(0, 1))
def test_u2_is_translation_and_modulation_invariant(seed, t):
    f = random_trig(np.random.default_rng(seed), 32, 6)
    g = from_samples(f(np.arange(32) / 32 + t))
    h = f * from_fourier({2: 1.0}, 32)
    base = gowers_norm(f, 2)
    assert gowers_norm(g, 2) == pytest.approx(base, rel=1e-10)
    assert gowers_norm(h, 2) == pytest.approx(base, rel=1e-10)
