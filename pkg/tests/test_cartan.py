import numpy as np
import pytest
from numpy.testing import assert_allclose

from shilov import FormSystem, cartan_decompose, wedge_sum_residual


def random_system(rng, r, D, contaminate=False):
    thetas = rng.normal(size=(r, D)) + 1j * rng.normal(size=(r, D))
    M = rng.normal(size=(r, r)) + 1j * rng.normal(size=(r, r))
    c = (M + M.T) / 2
    phis = c @ thetas
    if contaminate:
        a = np.zeros((r, r), dtype=complex)
        while np.max(np.abs(a)) < 0.1:
            A = rng.normal(size=(r, r)) + 1j * rng.normal(size=(r, r))
            a = (A - A.T) / 2
        phis = phis + a @ thetas
    return FormSystem(thetas, phis), c


def test_symmetric_systems_are_recovered():
    rng = np.random.default_rng(0)
    for _ in range(50):
        r = int(rng.integers(1, 5))
        D = r + int(rng.integers(1, 6))
        sys, c = random_system(rng, r, D)
        rep = cartan_decompose(sys)
        assert rep.ok
        assert rep.decomposition_residual < 1e-9 * max(1.0, np.max(np.abs(c)))
        assert_allclose(rep.coeffs, c, atol=1e-8 * max(1.0, np.max(np.abs(c))))
        assert rep.symmetry_defect < 1e-8 * max(1.0, np.max(np.abs(c)))


def test_antisymmetric_contamination_is_detected():
    rng = np.random.default_rng(1)
    for _ in range(50):
        r = int(rng.integers(2, 5))
        D = r + int(rng.integers(1, 6))
        sys, _ = random_system(rng, r, D, contaminate=True)
        assert wedge_sum_residual(sys) > 1e-6
        rep = cartan_decompose(sys)
        assert not rep.ok
        assert rep.coeffs is None


def test_dependent_thetas_raise():
    thetas = np.array([[1.0, 0.0, 0.0], [2.0, 0.0, 0.0]], dtype=complex)
    with pytest.raises(np.linalg.LinAlgError):
        cartan_decompose(FormSystem(thetas, thetas))


def test_shape_mismatch_rejected():
    with pytest.raises(ValueError):
        FormSystem(np.zeros((2, 3)), np.zeros((3, 3)))


def test_single_form_system():
    # r = 1: any phi proportional to theta passes, the wedge condition is empty
    theta = np.array([[1.0, 2.0, 3.0]], dtype=complex)
    rep = cartan_decompose(FormSystem(theta, 2.5 * theta))
    assert rep.ok
    assert_allclose(rep.coeffs, [[2.5]], atol=1e-12)
