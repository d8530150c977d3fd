import numpy as np
import pytest
from numpy.testing import assert_allclose

from shilov import (AdaptedFrame, FrameChange, SignatureForm, apply_change,
                    build_adapted_frame, change_matrix, sample_boundary,
                    solve_general_change_A)
from shilov.frames import frame_rows, validate_change
from shilov.hermitian import gram_matrix


def random_change(F, kind, rng):
    q, n = F.q, F.n
    if kind == "position":
        W = rng.normal(size=(q, q)) + 1j * rng.normal(size=(q, q))
        return FrameChange("position", {"W": W})
    if kind == "real_vectors":
        H = rng.normal(size=(q, q)) + 1j * rng.normal(size=(q, q))
        return FrameChange("real_vectors", {"H": (H + H.conj().T) / 2})
    if kind == "dilation":
        return FrameChange("dilation", {"lam": np.exp(rng.normal(size=q))})
    if kind == "rotation":
        M = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        U, _ = np.linalg.qr(M)
        return FrameChange("rotation", {"U": U})
    B = rng.normal(size=(q, n)) + 1j * rng.normal(size=(q, n))
    return FrameChange("general", {"B": B})


KINDS = ["position", "real_vectors", "dilation", "rotation", "general"]


def test_build_adapted_frame_properties():
    rng = np.random.default_rng(0)
    for p, q in [(2, 1), (3, 2), (5, 3)]:
        F = SignatureForm(p, q)
        for bp in sample_boundary(F, 1, 5):
            fr = build_adapted_frame(F, bp.z)
            assert fr.gram_residual() < 1e-12
            assert fr.det_residual() < 1e-12
            assert_allclose(fr.point(), bp.z, atol=1e-10)


def test_frame_at_singular_pairing_point():
    # z with z^t z = -1 makes the naive conjugate-pairing matrix singular;
    # the pivoted fallback must still produce an adapted frame
    F = SignatureForm(2, 1)
    z = np.array([[1j], [0.0]], dtype=complex)
    fr = build_adapted_frame(F, z)
    assert fr.gram_residual() < 1e-10
    assert_allclose(fr.point(), z, atol=1e-10)


def test_build_rejects_interior_points():
    F = SignatureForm(3, 2)
    with pytest.raises(ValueError):
        build_adapted_frame(F, np.zeros((3, 2), dtype=complex))


def test_section_seed_scrambles_frame_only():
    F = SignatureForm(3, 2)
    z = sample_boundary(F, 2, 1)[0].z
    f1 = build_adapted_frame(F, z, section_seed=1)
    f2 = build_adapted_frame(F, z, section_seed=9)
    assert np.max(np.abs(f1.A - f2.A)) > 1e-6
    for fr in (f1, f2):
        assert fr.gram_residual() < 1e-11
        assert_allclose(fr.point(), z, atol=1e-9)


def test_change_matrices_preserve_gram_pattern():
    rng = np.random.default_rng(1)
    F = SignatureForm(4, 2)
    for kind in KINDS:
        for _ in range(20):
            U = change_matrix(F, random_change(F, kind, rng))
            # U S U* = S: the change maps adapted frames to adapted frames
            assert_allclose(U @ F.S @ U.conj().T, F.S, atol=1e-10)
            assert abs(abs(np.linalg.det(U)) - 1.0) < 1e-10


def test_apply_change_preserves_frame_and_point():
    rng = np.random.default_rng(2)
    F = SignatureForm(3, 2)
    z = sample_boundary(F, 3, 1)[0].z
    fr = build_adapted_frame(F, z)
    for kind in KINDS:
        for _ in range(20):
            out = apply_change(fr, random_change(F, kind, rng))
            assert out.gram_residual() < 1e-12
            assert out.det_residual() < 1e-12
            assert_allclose(out.point(), z, atol=1e-10)


def test_general_change_null_constraint():
    rng = np.random.default_rng(3)
    B = rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3))
    A = solve_general_change_A(B)
    assert_allclose(A + A.conj().T, -B @ B.conj().T, atol=1e-13)


def test_validate_change_rejects_bad_payloads():
    F = SignatureForm(3, 2)
    with pytest.raises(ValueError):
        validate_change(F, FrameChange("position", {"W": np.zeros((2, 2))}))
    with pytest.raises(ValueError):
        validate_change(F, FrameChange("real_vectors", {"H": 1j * np.eye(2)}))
    with pytest.raises(ValueError):
        validate_change(F, FrameChange("dilation", {"lam": np.array([1.0, -2.0])}))
    with pytest.raises(ValueError):
        validate_change(F, FrameChange("rotation", {"U": 2.0 * np.eye(1)}))
    with pytest.raises(ValueError):
        FrameChange("shear", {})


def test_generic_frame_rows_match_dedicated_builder():
    # frame_rows works over plain complex scalars too; its Gram must be S
    F = SignatureForm(4, 3)
    z = sample_boundary(F, 4, 1)[0].z
    A = frame_rows(F, z).astype(complex)
    assert np.max(np.abs(gram_matrix(F, A) - F.S)) < 1e-11
    fr = AdaptedFrame(F, A)
    assert_allclose(fr.point(), z, atol=1e-10)
