import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ceswit import DEFAULT_TOL, SearchBudget, Subspace, is_ces, is_supported, make_subspace, max_ces_dim
from ceswit.constructions import (
    counterexample_family,
    footnote_pair,
    general_family,
    symmetric_family,
)
from ceswit.subspaces import local_transform, random_ces, random_invertible, random_subspace

from oracles import cplx, ket

SMALL = SearchBudget(starts=32)


def test_make_subspace_examples():
    V = make_subspace(2, 2, [ket(2, 2, 0, 1) - ket(2, 2, 1, 0)])
    assert V.dim == 1
    assert abs(np.linalg.norm(V.basis[0]) - 1) < 1e-15
    vecs = [ket(3, 3, 0, 1) - ket(3, 3, 1, 0), ket(3, 3, 0, 2) - ket(3, 3, 2, 0),
            ket(3, 3, 1, 1) + 2 * ket(3, 3, 1, 2) + ket(3, 3, 2, 2)]
    assert make_subspace(3, 3, vecs).dim == 3
    with pytest.raises(ValueError):
        make_subspace(3, 3, [vecs[0], vecs[0]])
    with pytest.raises(ValueError):
        make_subspace(3, 3, [np.ones(8)])


@given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_gram_identity(m, n, seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, m * n + 1))
    V = make_subspace(m, n, cplx(rng, d, m * n))
    assert V.gram_residual() <= DEFAULT_TOL.orth_tol


def test_subspace_json_round_trip():
    V = general_family(3, 4)
    W = Subspace.from_dict(json.loads(json.dumps(V.to_dict())))
    assert np.allclose(W.projector, V.projector, atol=1e-12)
    assert W.family.kind == "general"


def test_complement_and_contains():
    V = symmetric_family(3)
    C = V.complement()
    assert C.dim == 6
    assert np.allclose(C.basis.conj() @ V.basis.T, 0, atol=1e-12)
    assert V.contains(ket(3, 3, 0, 1) - ket(3, 3, 1, 0))
    assert not V.contains(ket(3, 3, 0, 0))


def test_is_ces_examples(rng):
    cert = is_ces(make_subspace(3, 3, [ket(3, 3, 0, 0)]), rng=rng)
    assert not cert.is_ces
    assert cert.best_product_overlap > 1 - 1e-12
    assert abs(abs(cert.witness_e[0]) - 1) < 1e-9 and abs(abs(cert.witness_f[0]) - 1) < 1e-9
    assert is_ces(symmetric_family(3), rng=rng).is_ces
    assert is_ces(footnote_pair()[0], rng=rng).is_ces


def test_is_supported_examples():
    assert not is_supported(make_subspace(2, 2, [ket(2, 2, 0, 0), ket(2, 2, 0, 1)]))
    assert is_supported(general_family(3, 4))
    assert is_supported(counterexample_family(3, 4))


def test_max_ces_dim_examples():
    assert max_ces_dim(2, 7) == 6
    assert max_ces_dim(4, 4) == 9
    assert max_ces_dim(2, 2) == 1
    with pytest.raises(ValueError):
        max_ces_dim(1, 3)


def test_is_ces_invariant_under_local_maps():
    rng = np.random.default_rng(11)
    pool = [symmetric_family(3), general_family(3, 4), counterexample_family(3, 4),
            random_ces(3, 3, 3, rng), make_subspace(3, 3, [ket(3, 3, 0, 0), cplx(rng, 9)])]
    for k in range(50):
        V = pool[k % len(pool)]
        A, B = random_invertible(rng, V.m), random_invertible(rng, V.n)
        W = local_transform(V, A, B)
        assert is_ces(W, budget=SMALL, rng=rng).is_ces == is_ces(V, budget=SMALL, rng=rng).is_ces


@settings(max_examples=25)
@given(st.integers(2, 4), st.integers(2, 4), st.integers(0, 2**32 - 1))
def test_planted_product_vector_is_found(m, n, seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, m * n))
    prod = np.kron(cplx(rng, m), cplx(rng, n))
    V = make_subspace(m, n, np.vstack([prod, cplx(rng, d - 1, m * n)]))
    cert = is_ces(V, budget=SMALL, rng=rng)
    assert not cert.is_ces
    assert cert.best_product_overlap >= 1 - 1e-6


def test_random_ces_rejects_oversized():
    with pytest.raises(ValueError):
        random_ces(3, 3, 5)


def test_local_transform_shape_checks():
    V = random_subspace(2, 3, 2, 0)
    with pytest.raises(ValueError):
        local_transform(V, np.eye(3), np.eye(3))
    with pytest.raises(ValueError):
        local_transform(V, np.zeros((2, 2)), np.eye(3))
