import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from torus_lab import errors, multilinear
from torus_lab.counting import (
    SmoothCutoff,
    counting_form,
    decay_fit,
    dual_pairing_check,
    dualization_check,
    fit_loglog,
    main_term,
    two_term_oracle,
)
from torus_lab.oscillatory import validate_family
from torus_lab.torus_fn import from_fourier, from_samples, random_trig

QUAD = validate_family([[0, 1], [0, 0, 1]])
LINEAR = validate_family([[0, 1]])

# int_0.1^1 of the normalised bump, from mpmath quad at 30 digits
BUMP_MASS = 0.317987137748526718923261759817


def test_cutoff_mass_and_shape():
    chi = SmoothCutoff()
    assert chi.mass == pytest.approx(BUMP_MASS, rel=1e-13)
    assert chi(0.55) == pytest.approx(1.0)
    assert chi(0.05) == 0.0 and chi(1.0) == 0.0
    with pytest.raises(errors.ParameterError):
        SmoothCutoff(0.5, 0.4)


def test_constants_count_exactly():
    fs = [from_fourier({0: 1.0}, 16)] * 3
    res = counting_form(QUAD, 12.5, fs)
    assert res.value == pytest.approx(1.0, abs=1e-14)
    assert res.main_term == 1.0
    cut = counting_form(QUAD, 12.5, fs, SmoothCutoff())
    assert cut.value == pytest.approx(BUMP_MASS, rel=1e-10)
    assert main_term(fs, SmoothCutoff()) == pytest.approx(BUMP_MASS)


def test_two_term_form_against_linear_closed_form():
    # f0 = e(-x), f1 = e(x): Lambda = (1/N) int e(y) dy
    N = 9.3
    fs = [from_fourier({-1: 1.0}, 16), from_fourier({1: 1.0}, 16)]
    expected = (np.exp(2j * np.pi * N) - 1) / (2j * np.pi * N)
    assert counting_form(LINEAR, N, fs).value == pytest.approx(expected, abs=1e-13)
    assert two_term_oracle([0, 1], fs[0], fs[1], N) == pytest.approx(expected, abs=1e-13)


def test_grid_and_spectral_paths_agree(rng):
    fs = [random_trig(rng, 32, 3) for _ in range(3)]
    a = counting_form(QUAD, 20.0, fs, method="grid").value
    b = counting_form(QUAD, 20.0, fs, method="spectral").value
    assert abs(a - b) < 1e-12


def test_dual_identities(rng):
    fs = [random_trig(rng, 32, 3) for _ in range(3)]
    for i in (0, 1, 2):
        lam, paired, bound = dual_pairing_check(QUAD, 10.0, fs, i)
        assert abs(lam - paired) <= bound + 1e-13
    lhs, rhs, est = dualization_check(QUAD, 10.0, fs, 2)
    assert lhs <= rhs + est + 1e-13


def test_slot_count_and_band_checks(rng):
    with pytest.raises(errors.ParameterError):
        counting_form(QUAD, 10.0, [random_trig(rng, 16, 2)] * 2)
    with pytest.raises(errors.BandLimitError):
        counting_form(QUAD, 10.0, [random_trig(rng, 16, 7)] * 3)
    with pytest.raises(errors.ParameterError):
        counting_form(QUAD, 0.5, [random_trig(rng, 16, 2)] * 3)


def test_fit_loglog_recovers_power_law():
    N = np.array([4, 8, 16, 32, 64.0])
    fit = fit_loglog(N, 3.0 * N**-1.5)
    assert fit.slope == pytest.approx(-1.5)
    assert fit.r2 == pytest.approx(1.0)
    assert fit.predict(128) == pytest.approx(3.0 * 128**-1.5)
    with pytest.raises(errors.DegenerateFit):
        fit_loglog(N, np.zeros(5))
    with pytest.raises(errors.ParameterError):
        fit_loglog(N[:3], N[:3])
    with pytest.raises(errors.ParameterError):
        fit_loglog(N[::-1], N)


def test_linear_two_term_decays_like_one_over_N():
    fs = [from_fourier({-1: 1.0, 0: 0.5}, 16), from_fourier({1: 1.0, 0: 0.5}, 16)]
    # half-integer N keeps |e(N) - 1| = 2 so the error is exactly 1/(pi N)
    fit, results = decay_fit(LINEAR, fs, [4.5, 8.5, 16.5, 32.5, 64.5])
    assert fit.slope == pytest.approx(-1.0, abs=1e-9)
    assert abs(results[0].error) == pytest.approx(1 / (np.pi * 4.5))


def test_budget_error_carries_partial_results(rng):
    fs = [random_trig(rng, 16, 2) for _ in range(3)]
    with pytest.raises(errors.BudgetError) as info:
        decay_fit(QUAD, fs, [2.0, 4.0, 1e6, 2e6], method="grid", cap=10_000)
    assert len(info.value.partial) == 2


seeds = st.integers(0, 2**31)


@given(seeds, st.floats(-2, 2), st.floats(-2, 2))
def test_multilinear_in_each_slot(seed, a, b):
    r = np.random.default_rng(seed)
    fs = [random_trig(r, 16, 2) for _ in range(3)]
    g = random_trig(r, 16, 2)
    slot = int(r.integers(0, 3))
    combo = list(fs)
    combo[slot] = from_samples(a * fs[slot].samples + b * g.samples)
    other = list(fs)
    other[slot] = g
    lhs = counting_form(QUAD, 6.0, combo).value
    rhs = a * counting_form(QUAD, 6.0, fs).value + b * counting_form(QUAD, 6.0, other).value
    assert abs(lhs - rhs) < 1e-12


@given(seeds, st.floats(0, 1))
def test_common_translation_invariance(seed, t):
    r = np.random.default_rng(seed)
    fs = [random_trig(r, 16, 2) for _ in range(3)]
    x = np.arange(16) / 16 + t
    moved = [from_samples(f(x)) for f in fs]
    assert abs(counting_form(QUAD, 6.0, fs).value - counting_form(QUAD, 6.0, moved).value) < 1e-12


@given(seeds)
def test_counting_form_is_one_bounded(seed):
    r = np.random.default_rng(seed)
    fs = [random_trig(r, 16, 2) for _ in range(3)]
    assert abs(counting_form(QUAD, 5.0, fs).value) <= 1 + 1e-12


def test_working_grid():
    assert multilinear.working_grid(3) == 8
    assert multilinear.working_grid(4) == 16
    assert multilinear.working_grid(40) == 128


def test_auto_method_prefers_cheaper_path(rng):
    fs = [from_fourier({1: 1.0}, 16), from_fourier({-1: 1.0}, 16)]
    assert counting_form(validate_family([[0, 0, 1]]), 512.0, fs, method="auto").method == "spectral"
    dense = [random_trig(rng, 64, 8) for _ in range(3)]
    small = counting_form(QUAD, 2.0, dense, method="auto")
    assert small.method == "grid"
    assert abs(small.value - counting_form(QUAD, 2.0, dense, method="spectral").value) < 1e-13
