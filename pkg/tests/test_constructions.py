import numpy as np
import pytest

from ceswit import DEFAULT_TOL, SearchBudget, is_ces, is_supported, make_subspace
from ceswit.constructions import (
    FamilySpec,
    antisymmetric_partner,
    counterexample_family,
    extend_ces,
    extension_chain,
    family_from_name,
    family_vectors,
    footnote_pair,
    general_family,
    symmetric_family,
)
from ceswit.linalg import schmidt_rank
from ceswit.subspaces import max_ces_dim

from oracles import general_raw, ket, proj, swap, symmetric_raw

SYMMETRIC_MS = (3, 4, 5, 6)
PAIRS = [(m, n) for m in range(3, 7) for n in range(m + 1, 7)]


def _rows_parallel(stored, raw):
    for b, r in zip(stored, raw):
        r = r / np.linalg.norm(r)
        assert abs(abs(np.vdot(b, r)) - 1) < 1e-12


def test_symmetric_m3_basis():
    V = symmetric_family(3)
    raw = [ket(3, 3, 0, 1) - ket(3, 3, 1, 0), ket(3, 3, 0, 2) - ket(3, 3, 2, 0),
           ket(3, 3, 1, 1) + 2 * ket(3, 3, 1, 2) + ket(3, 3, 2, 2)]
    assert V.dim == 3
    _rows_parallel(V.basis, raw)


@pytest.mark.parametrize("m", SYMMETRIC_MS)
def test_symmetric_matches_oracle_and_is_unmixed(m):
    V = symmetric_family(m)
    _rows_parallel(V.basis, symmetric_raw(m))
    G = V.basis.conj() @ V.basis.T
    assert np.max(np.abs(G - np.eye(m))) <= DEFAULT_TOL.orth_tol


def test_symmetric_m4_schmidt_rank():
    V = symmetric_family(4)
    assert V.dim == 4
    assert schmidt_rank(V.basis[-1], 4, 4) == 3


def test_general_examples(rng):
    V = general_family(3, 5)
    assert V.dim == 5
    assert is_ces(V, rng=rng).is_ces
    with pytest.raises(ValueError):
        general_family(4, 4)


@pytest.mark.parametrize("m,n", PAIRS)
def test_general_matches_oracle(m, n):
    V = general_family(m, n)
    assert np.allclose(V.projector, proj(general_raw(m, n)), atol=1e-12)


def test_printed_variant_extra_vector():
    raw = family_vectors(FamilySpec("general", 3, 4, variant="printed"))
    assert np.array_equal(raw[-1], ket(3, 4, 1, 2) - ket(3, 4, 2, 3))


def test_printed_variant_drops_sum_zero_product():
    # (1,1,-1) (x) (1,1,-1,-1,-1) is orthogonal to the default variant only
    e = np.array([1, 1, -1])
    f = np.array([1, 1, -1, -1, -1])
    v = np.kron(e, f)
    assert np.max(np.abs(general_family(3, 5).basis.conj() @ v)) < 1e-12
    assert np.max(np.abs(general_family(3, 5, variant="printed").basis.conj() @ v)) > 0.1


def test_counterexample_examples(rng):
    V = counterexample_family(3, 4)
    ant = np.zeros((3, 4), dtype=complex)
    ant[1, 2], ant[2, 1] = 1, -1
    raw = [ket(3, 4, 0, 1) - ket(3, 4, 1, 0), ket(3, 4, 0, 2) - ket(3, 4, 2, 0),
           ket(3, 4, 0, 3) - ant.reshape(-1) / np.sqrt(2)]
    assert np.allclose(V.projector, proj(raw), atol=1e-12)
    assert is_ces(V, rng=rng).is_ces and is_supported(V)
    assert counterexample_family(3, 5).dim == 4


@pytest.mark.parametrize("m", SYMMETRIC_MS)
def test_antisymmetric_partner(m):
    a = antisymmetric_partner(m)
    assert np.allclose(swap(m) @ a, -a, atol=DEFAULT_TOL.orth_tol)
    for i in range(1, m):
        assert abs(np.vdot(ket(m, m, 0, i) - ket(m, m, i, 0), a)) <= DEFAULT_TOL.orth_tol


def test_footnote_pair(rng):
    first, second = footnote_pair()
    assert first.dim + second.dim == 12
    assert first.contains(ket(3, 4, 0, 1) - ket(3, 4, 1, 0))
    assert np.allclose(first.basis.conj() @ second.basis.T, 0, atol=1e-12)
    assert is_ces(first, rng=rng).is_ces and is_ces(second, rng=rng).is_ces


def _all_families():
    out = [symmetric_family(m) for m in SYMMETRIC_MS]
    out += [general_family(m, n) for m, n in PAIRS]
    out += [counterexample_family(m, n) for m, n in PAIRS]
    return out + list(footnote_pair())


def test_every_family_is_supported_ces():
    rng = np.random.default_rng(3)
    for V in _all_families():
        cert = is_ces(V, budget=SearchBudget(starts=48), rng=rng)
        assert cert.is_ces and cert.best_product_overlap < 1 - 1e-6, V.family
        assert is_supported(V), V.family


def test_family_spec_validation():
    with pytest.raises(ValueError):
        FamilySpec("symmetric", 3, 4)
    with pytest.raises(ValueError):
        FamilySpec("counterexample", 4, 4)
    with pytest.raises(ValueError):
        FamilySpec("general", 3, 4, variant="other")
    with pytest.raises(ValueError):
        symmetric_family(3, A_tilde=np.zeros((2, 2)))
    with pytest.raises(ValueError):
        family_from_name("symmetric", 3, 4)
    spec = general_family(3, 4).family.transformed(2 * np.eye(3), np.eye(4))
    back = FamilySpec.from_dict(spec.to_dict())
    assert back.kind == "general" and np.array_equal(back.transform[0], 2 * np.eye(3))


def test_extend_once(rng):
    V = make_subspace(3, 3, [ket(3, 3, 0, 1) - ket(3, 3, 1, 0)])
    step = extend_ces(V, rng)
    assert step.subspace.dim == 2 and step.certificate.is_ces
    P = step.subspace.projector
    assert np.allclose(P @ V.basis.T, V.basis.T, atol=DEFAULT_TOL.orth_tol)


def test_extension_chain_to_maximal(rng):
    V = make_subspace(3, 3, [ket(3, 3, 0, 1) - ket(3, 3, 1, 0)])
    steps = extension_chain(V, max_ces_dim(3, 3), rng)
    assert [s.subspace.dim for s in steps] == [2, 3, 4]
    assert all(s.certificate.is_ces for s in steps)
    for a, b in zip([V] + [s.subspace for s in steps], [s.subspace for s in steps]):
        assert np.allclose(b.projector @ a.basis.T, a.basis.T, atol=DEFAULT_TOL.orth_tol)
    with pytest.raises(ValueError):
        extend_ces(steps[-1].subspace, rng)
