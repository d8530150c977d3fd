import numpy as np
import pytest
from numpy.testing import assert_allclose

from shilov import (DimensionError, SignatureForm, form_value, gram_matrix,
                    is_frame_group_element, reference_frame)


def test_signature_matrices():
    F = SignatureForm(3, 2)
    assert F.p == 3 and F.q == 2 and F.n == 1 and F.dim == 5
    assert_allclose(F.Jdiag, np.array([-1, -1, 1, 1, 1.0]))
    assert_allclose(F.J, np.diag(F.Jdiag))
    S = np.zeros((5, 5))
    S[0, 3] = S[1, 4] = S[3, 0] = S[4, 1] = S[2, 2] = 1.0
    assert_allclose(F.S, S)
    assert_allclose(F.S @ F.S, np.eye(5))


def test_invalid_signature_rejected():
    with pytest.raises(ValueError):
        SignatureForm(2, 2)
    with pytest.raises(ValueError):
        SignatureForm(1, 0)
    with pytest.raises(ValueError):
        SignatureForm(1, 2)


def test_form_value_sesquilinear():
    F = SignatureForm(4, 2)
    rng = np.random.default_rng(0)
    u = rng.normal(size=6) + 1j * rng.normal(size=6)
    v = rng.normal(size=6) + 1j * rng.normal(size=6)
    expect = np.conj(v) @ (F.Jdiag * u)
    assert_allclose(form_value(F, u, v), expect, atol=1e-14)
    # conjugate symmetry
    assert_allclose(form_value(F, v, u), np.conj(form_value(F, u, v)), atol=1e-14)
    # linear in the first slot
    assert_allclose(form_value(F, 2j * u, v), 2j * form_value(F, u, v), atol=1e-13)


def test_reference_frame_is_adapted():
    for p, q in [(2, 1), (3, 2), (5, 3)]:
        F = SignatureForm(p, q)
        A = reference_frame(F)
        assert_allclose(gram_matrix(F, A), F.S, atol=1e-12)
        assert_allclose(np.linalg.det(A), 1.0, atol=1e-12)


def test_gram_matrix_entries_match_form_value():
    F = SignatureForm(3, 1)
    rng = np.random.default_rng(1)
    A = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    G = gram_matrix(F, A)
    for i in range(4):
        for j in range(4):
            assert_allclose(G[i, j], form_value(F, A[i], A[j]), atol=1e-13)


def test_frame_group_membership():
    F = SignatureForm(3, 2)
    A = reference_frame(F)
    assert is_frame_group_element(F, A)
    # the identity has Gram J, not the anti-diagonal pattern S
    assert not is_frame_group_element(F, np.eye(5))
    assert not is_frame_group_element(F, 2.0 * A)
    # a unit phase on one row keeps the Gram but breaks det = 1
    B = A.copy()
    B[2, :] *= np.exp(0.3j)
    assert not is_frame_group_element(F, B)
