import numpy as np
import pytest

from purf.quadrature import QuadratureError, QuadratureSettings, integrate_cells


def test_polynomial_is_exact():
    lo = np.array([0.0, 0.25, 0.9])
    hi = np.array([0.25, 0.9, 1.0])
    got = integrate_cells(lambda x, _: x ** 5, lo, hi)
    np.testing.assert_allclose(got, (hi ** 6 - lo ** 6) / 6, rtol=1e-14)


def test_oscillatory_integrand_refines():
    got = integrate_cells(lambda x, _: np.sin(200 * x) ** 2, np.array([0.0]), np.array([1.0]))
    exact = 0.5 - np.sin(400) / 800
    assert got[0] == pytest.approx(exact, rel=1e-10)


def test_per_cell_constants_reach_the_integrand():
    c = np.array([1.0, 2.0, 3.0])
    lo, hi = np.array([0.0, 0.0, 0.0]), np.array([1.0, 1.0, 1.0])
    got = integrate_cells(lambda x, ids: (x - c[ids][:, None]) ** 2, lo, hi)
    np.testing.assert_allclose(got, c ** 2 - c + 1 / 3, rtol=1e-13)


def test_nonconvergence_names_the_cell():
    quad = QuadratureSettings(max_depth=2)
    with pytest.raises(QuadratureError) as err:
        integrate_cells(lambda x, _: np.sin(1e4 * x), np.array([0.0, 0.0]), np.array([1e-9, 1.0]), quad)
    assert err.value.cell == 1


def test_settings_require_sixteen_nodes():
    with pytest.raises(ValueError):
        QuadratureSettings(nodes=8)
