import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from torus_lab import errors
from torus_lab.oscillatory import (
    Window,
    check_frequency_control,
    frequency_control,
    poly_deriv,
    poly_eval,
    validate_family,
    vdc_check,
    weyl_average,
    weyl_batch,
)
from torus_lab.quadrature import integrate_doubling, integrate_panels, pairwise_sum

# (1/N) int_0^N e(xi y^2) dy from the complex error function, evaluated once
# with mpmath at 30 digits and frozen here
FRESNEL = [
    (1, 10.0, 0.02499936674861722 + 0.024204226796297693j),
    (3, 100.5, 0.0014335684452900916 + 0.0014361947063738921j),
    (-2, 1000.0, 0.00017677669529505373 - 0.0001767369065608639j),
]


@pytest.mark.parametrize("xi,N,expected", FRESNEL)
def test_quadratic_weyl_matches_fresnel(xi, N, expected):
    res = weyl_average([0, 0, 1], xi, N)
    assert abs(res.value - expected) < 1e-13
    assert res.est_error < 1e-10


@pytest.mark.parametrize("xi,N", [(1, 1.5), (7, 33.3), (-4, 250.0)])
def test_linear_weyl_closed_form(xi, N):
    expected = (np.exp(2j * np.pi * xi * N) - 1) / (2j * np.pi * xi * N)
    assert abs(weyl_average([0, 1], xi, N).value - expected) < 1e-13


def test_composite_agrees_with_panel_engine():
    a = weyl_average([0, 0.5, 1], 2, 20.0, method="panel").value
    b = weyl_average([0, 0.5, 1], 2, 20.0, method="composite").value
    assert abs(a - b) < 1e-10


def test_zero_frequency_is_trivial():
    assert weyl_average([0, 0, 1], 0, 17.0).value == 1


def test_weyl_argument_checks():
    with pytest.raises(errors.ParameterError):
        weyl_average([1, 1], 1, 10.0)
    with pytest.raises(errors.ParameterError):
        weyl_average([0, 1], 1, 0.5)
    with pytest.raises(errors.ParameterError):
        weyl_average([0, 1], 1, 10.0, method="magic")


def test_weighted_window_against_scipy():
    from scipy import integrate

    w = lambda y: np.sin(np.pi * y / 12.0) ** 2
    win = Window(0.0, 12.0, w)
    vals, _, _ = weyl_batch(np.array([[0.0, 0.3, 0.05]]), 12.0, win)
    re = integrate.quad(lambda y: w(y) * np.cos(2 * np.pi * (0.3 * y + 0.05 * y * y)), 0, 12, epsabs=1e-14, limit=200)[0]
    im = integrate.quad(lambda y: w(y) * np.sin(2 * np.pi * (0.3 * y + 0.05 * y * y)), 0, 12, epsabs=1e-14, limit=200)[0]
    assert abs(vals[0] - (re + 1j * im) / 12.0) < 1e-12


def test_batch_conjugation_symmetry():
    Q = np.array([[0, 1.0, 0.5], [0, -1.0, -0.5]])
    vals, _, _ = weyl_batch(Q, 40.0)
    assert abs(vals[1] - np.conj(vals[0])) < 1e-15


def test_vdc_table_bounded_for_quadratic():
    table, worst, _ = vdc_check([0, 0, 1], range(1, 9), [2, 16, 128, 1024])
    assert table.shape == (8, 4)
    assert worst < 1.0


def test_family_validation():
    fam = validate_family([[0, 0, 1], [0, 1]])
    assert fam.degrees == (1, 2)
    assert fam.coeff_matrix.tolist() == [[1, 0], [0, 1]]
    bad = {
        "constant": [[1, 1]],
        "degrees": [[0, 1], [0, 2]],
        "empty": [],
    }
    for reason, polys in bad.items():
        with pytest.raises(errors.InvalidFamily) as info:
            validate_family(polys)
        assert info.value.reason == reason
    with pytest.raises(errors.InvalidFamily):
        validate_family([[0]])


def test_frequency_control_identity_family():
    fc = frequency_control(validate_family([[0, 1], [0, 0, 1]]))
    assert fc.rows == (1, 2)
    assert fc.A_inv_inf == pytest.approx(1.0)
    assert check_frequency_control(validate_family([[0, 1], [0, 0, 1]]), box=6) <= 1.0


def test_pairwise_sum_is_fixed_tree():
    assert pairwise_sum([]) == 0.0
    assert pairwise_sum([1.0, 2.0, 3.0]) == 6.0


def test_panel_quadrature_exact_for_polynomials():
    val = integrate_panels(lambda y: y**7, 0.0, 2.0, 3)
    assert val == pytest.approx(2.0**8 / 8, rel=1e-14)


def test_node_cap_raises_budget_error():
    with pytest.raises(errors.BudgetError) as info:
        integrate_doubling(np.sin, 0.0, 1.0, 10_000, cap=1000)
    assert info.value.required > info.value.cap


def test_worker_count_does_not_change_sums():
    fn = lambda y: np.exp(2j * np.pi * 3.1 * y * y)
    a = integrate_panels(fn, 0.0, 30.0, 200_000, workers=1)
    b = integrate_panels(fn, 0.0, 30.0, 200_000, workers=4)
    assert a == b


coef = st.floats(-3, 3, allow_nan=False)


@given(st.lists(coef, min_size=1, max_size=5), st.floats(-2, 2))
def test_poly_deriv_matches_finite_difference(c, y):
    h = 1e-6
    p = [0.0] + c
    fd = (poly_eval(p, y + h) - poly_eval(p, y - h)) / (2 * h)
    assert poly_eval(poly_deriv(p), y) == pytest.approx(fd, abs=1e-5)


@given(st.integers(1, 20), st.floats(1.0, 300.0))
def test_weyl_average_is_bounded_by_one(xi, N):
    assert abs(weyl_average([0, 0.3, 1], xi, N).value) <= 1 + 1e-12
