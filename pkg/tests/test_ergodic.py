import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from torus_lab import errors
from torus_lab.counting import counting_form
from torus_lab.ergodic import (
    DeviationTable,
    box_dimension,
    deviation_set,
    ergodic_average,
    fit_gap_constant,
    interpolation_gap,
    l1_mu_convergence,
    lacunary_N,
    lacunary_sweep,
    limit_value,
)
from torus_lab.fractal import lebesgue
from torus_lab.oscillatory import validate_family
from torus_lab.torus_fn import from_fourier, mean, random_trig

QUAD = validate_family([[0, 1], [0, 0, 1]])
LINEAR = validate_family([[0, 1]])


def test_linear_average_of_a_character():
    # (1/N) int e(3(x + y)) dy = e(3x) (e(3N) - 1) / (2 pi i 3 N)
    N = 2.3
    x = np.array([0.0, 0.25, 0.6])
    avg = ergodic_average(LINEAR, N, [from_fourier({3: 1.0}, 16)], x)
    factor = (np.exp(6j * np.pi * N) - 1) / (6j * np.pi * N)
    assert np.allclose(avg.values, np.exp(6j * np.pi * x) * factor, atol=1e-13)


def test_fubini_against_counting_form(rng):
    fs = [random_trig(rng, 32, 3) for _ in range(3)]
    x = np.arange(32) / 32
    avg = ergodic_average(QUAD, 11.0, fs[1:], x)
    paired = np.mean(fs[0].samples * avg.values)
    lam = counting_form(QUAD, 11.0, fs)
    assert abs(paired - lam.value) <= lam.est_error + avg.est_error + 1e-13


def test_argument_checks(rng):
    f = random_trig(rng, 16, 2)
    with pytest.raises(errors.ParameterError):
        ergodic_average(QUAD, 5.0, [f], [0.0])
    with pytest.raises(errors.ParameterError):
        ergodic_average(QUAD, 0.5, [f, f], [0.0])
    with pytest.raises(errors.ParameterError):
        lacunary_sweep(QUAD, [f, f], 0.0, range(3), [0.0])


def test_lacunary_sequence():
    assert lacunary_N(0.5, 0) == 1.0
    assert lacunary_N(1.0, 5) == 32.0


def test_sweep_of_constants_has_zero_deviation():
    fs = [from_fourier({0: 0.5}, 16)] * 2
    tab = lacunary_sweep(QUAD, fs, 1.0, range(4), np.linspace(0, 1, 5))
    assert tab.complete and tab.l_list == (0, 1, 2, 3)
    assert np.all(tab.dev < 1e-14)
    assert limit_value(fs) == pytest.approx(0.25)


def test_sweep_stops_cleanly_on_budget(rng):
    fs = [random_trig(rng, 16, 2) for _ in range(2)]
    tab = lacunary_sweep(QUAD, fs, 1.0, range(40), [0.0, 0.5], method="grid", cap=20_000)
    assert not tab.complete
    assert 0 < len(tab.l_list) < 40
    assert tab.dev.shape == (2, len(tab.l_list))


def test_integer_times_average_a_character_to_zero():
    # N = 2^l covers whole periods of e(x + y), so A_N vanishes exactly
    tab = lacunary_sweep(LINEAR, [from_fourier({1: 1.0}, 16)], 1.0, range(2, 8), [0.1])
    assert np.all(tab.dev < 1e-12)


def test_interpolation_gap_small_for_slow_family(rng):
    slow = validate_family([[0, 1 / 8], [0, 0, 1 / 64]])
    fs = [random_trig(rng, 16, 2) for _ in range(2)]
    x = np.linspace(0, 1, 9)
    g1 = interpolation_gap(slow, fs, 0.1, 0, x)
    g2 = interpolation_gap(slow, fs, 0.05, 0, x)
    assert g2 < g1
    assert fit_gap_constant([1.0, 2.0], [0.5, 1.0]) == pytest.approx(2.0)


def test_box_dimension_of_full_grid_is_one():
    assert box_dimension(np.arange(256) / 256, 256) == pytest.approx(1.0)
    assert box_dimension([], 256) == 0.0


def test_deviation_set_errors():
    empty = DeviationTable(np.zeros(4), (), (), np.zeros((4, 0)), 0.5, np.zeros((4, 0)))
    with pytest.raises(errors.ParameterError):
        deviation_set(empty, 0.1, 0)
    full = DeviationTable(np.zeros(2), (0,), (1.0,), np.ones((2, 1)), 0.5, np.zeros((2, 1)))
    with pytest.raises(errors.ParameterError):
        deviation_set(full, 0.0, 0)
    with pytest.raises(errors.ParameterError):
        deviation_set(full, 0.1, 3)


def test_l1_convergence_under_lebesgue():
    fs = [from_fourier({1: 1.0}, 64), from_fourier({0: 1.0}, 64)]
    fit, vals = l1_mu_convergence(validate_family([[0, 0, 1], [0, 0, 0, 1]]), fs, lebesgue(64), [4.5, 8.5, 16.5, 32.5])
    assert all(v >= 0 for v in vals)
    assert fit.slope < -0.4


tables = st.integers(0, 2**31).map(
    lambda s: np.random.default_rng(s).random((16, 6))
)


@given(tables, st.floats(0.01, 0.5), st.floats(0.01, 0.5))
def test_deviation_set_is_antitone_in_delta(dev, d1, d2):
    lo, hi = min(d1, d2), max(d1, d2)
    tab = DeviationTable(np.arange(16) / 16, tuple(range(6)), tuple(range(6)), dev, 0.5, np.zeros_like(dev))
    a = set(deviation_set(tab, lo, 0).points.tolist())
    b = set(deviation_set(tab, hi, 0).points.tolist())
    assert b <= a
    # raising l0 can only shrink the set as well
    assert set(deviation_set(tab, lo, 3).points.tolist()) <= a


@given(st.integers(0, 2**31), st.floats(1.0, 30.0))
def test_averages_are_one_bounded(seed, N):
    r = np.random.default_rng(seed)
    fs = [random_trig(r, 16, 2) for _ in range(2)]
    avg = ergodic_average(QUAD, N, fs, np.linspace(0, 1, 7))
    assert np.abs(avg.values).max() <= 1 + 1e-10
