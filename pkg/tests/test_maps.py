import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from shilov import (PolyMatrixMap, SignatureForm, Term, block_diagonal_map,
                    map_from_json, map_to_json, sample_boundary,
                    standard_embedding, verify_boundary_preserving, verify_cr,
                    whitney_map)
from shilov.maps import (cr_vector_basis, directional_derivative,
                         holomorphic_pushforward, scaled_map)


def test_standard_embedding_values():
    f = standard_embedding(3, 2, 5, 3)
    z = sample_boundary(SignatureForm(3, 2), 0, 1)[0].z
    w = f.evaluate(z)
    assert w.shape == (5, 3)
    assert_allclose(w[:3, :2], z, atol=0)
    assert_allclose(w[3, 2], 1.0, atol=0)
    assert f.is_holomorphic and f.degree == 1


def test_classical_whitney_values():
    f = whitney_map(2, 1, 1, 0)
    assert f.target == (3, 1)
    z = np.array([[0.6], [0.8j]], dtype=complex)
    w = f.evaluate(z)
    assert_allclose(w[:, 0], [0.6, 0.6 * 0.8j, (0.8j) ** 2], atol=1e-14)
    assert f.degree == 2


def test_whitney_shapes_and_padding():
    f = whitney_map(3, 2, 2, 1)
    assert f.target == (2 * 3 - 1 + 1, 2 + 1)
    z = sample_boundary(SignatureForm(3, 2), 1, 1)[0].z
    w = f.evaluate(z)
    assert_allclose(w[-1, -1], 1.0, atol=0)
    with pytest.raises(ValueError):
        whitney_map(3, 1, 2, 0)  # q2 > q


def test_boundary_preservation_suite():
    maps = [standard_embedding(3, 2, 4, 3), whitney_map(2, 1, 1, 0),
            whitney_map(3, 2, 2, 1)]
    for f in maps:
        rep = verify_boundary_preserving(f, seed=0, count=200)
        assert rep["pass"] and rep["residual"] < 1e-12


def test_scaled_map_fails_boundary():
    f = scaled_map(standard_embedding(3, 2, 4, 3), 1.1)
    rep = verify_boundary_preserving(f, seed=0, count=50)
    assert not rep["pass"]
    assert rep["residual"] > 0.1


def test_cr_verification_suite():
    for f in (standard_embedding(3, 2, 4, 3), whitney_map(3, 2, 2, 1)):
        rep = verify_cr(f, seed=1, count=20)
        assert rep["pass"]
        assert rep["cr_residual"] < 1e-12
        assert rep["min_singular_value"] > 1e-3


def test_cr_basis_annihilated_by_contact_form():
    F = SignatureForm(4, 2)
    z = sample_boundary(F, 2, 1)[0].z
    basis = cr_vector_basis(z)
    assert len(basis) == F.n * F.q
    for w in basis:
        assert np.max(np.abs(z.conj().T @ w)) < 1e-12


def test_directional_derivative_matches_finite_difference():
    f = whitney_map(3, 2, 2, 1)
    F = SignatureForm(3, 2)
    z = sample_boundary(F, 3, 1)[0].z
    rng = np.random.default_rng(4)
    w = rng.normal(size=(3, 2)) + 1j * rng.normal(size=(3, 2))
    jet = directional_derivative(f, z, w)
    h = 1e-6
    fd = (f.evaluate(z + h * w) - f.evaluate(z - h * w)) / (2 * h)
    assert_allclose(jet, fd, atol=1e-6)


def test_holomorphic_pushforward_is_complex_linear():
    f = standard_embedding(3, 2, 5, 3)
    z = sample_boundary(SignatureForm(3, 2), 5, 1)[0].z
    w = cr_vector_basis(z)[0]
    assert_allclose(holomorphic_pushforward(f, z, 1j * w),
                    1j * holomorphic_pushforward(f, z, w), atol=1e-12)


def test_rank_collapse_raises():
    # a constant unitary column is boundary preserving but has zero differential
    f = PolyMatrixMap((2, 1), (3, 1), {(0, 0): [Term(1.0 + 0j)]})
    assert verify_boundary_preserving(f, seed=0, count=10)["pass"]
    with pytest.raises(np.linalg.LinAlgError):
        verify_cr(f, seed=0, count=5)


def test_block_diagonal_assembly():
    blocks = [whitney_map(3, 1, 1, 0), standard_embedding(3, 1, 3, 1)]
    f = block_diagonal_map(3, 2, blocks, [0, 1])
    assert f.target == (8, 2)
    rep = verify_boundary_preserving(f, seed=1, count=200)
    assert rep["pass"]
    with pytest.raises(ValueError):
        block_diagonal_map(3, 2, blocks, [0])
    with pytest.raises(ValueError):
        block_diagonal_map(3, 2, [scaled_map(whitney_map(3, 1, 1, 0), 2.0)], [0])


def test_json_round_trip():
    for f in (whitney_map(3, 2, 2, 1), standard_embedding(2, 1, 4, 2)):
        blob = json.dumps(map_to_json(f), sort_keys=True)
        g = map_from_json(json.loads(blob))
        assert g.source == f.source and g.target == f.target
        z = sample_boundary(SignatureForm(*f.source), 6, 1)[0].z
        assert_allclose(g.evaluate(z), f.evaluate(z), atol=0)
        assert json.dumps(map_to_json(g), sort_keys=True) == blob


def test_json_rejects_malformed_input():
    good = map_to_json(whitney_map(2, 1, 1, 0))
    bad = json.loads(json.dumps(good))
    bad["entries"][0]["terms"][0]["powers"] = {"0": 1}  # not an "i,j" key
    with pytest.raises(ValueError):
        map_from_json(bad)
    with pytest.raises(ValueError):
        map_from_json({"schema_version": 99})
