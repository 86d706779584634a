import numpy as np
import pytest

from ceswit import DEFAULT_TOL
from ceswit.constructions import counterexample_family, footnote_pair, general_family, symmetric_family
from ceswit.linalg import numerical_rank
from ceswit.products import enumerate_all_classes
from ceswit.spanning import span_of_PV
from ceswit.subspaces import random_ces
from ceswit.witness import (
    PerturbationPath,
    block_positivity_min,
    build_witness,
    check_necessary_form,
    closed_form_value,
    optimality_counterexample,
    product_expectation,
    random_psd_on,
    verify_optimal,
    witness_from_Q,
)

from oracles import cplx, ket, omega, pt_loop

FAMILIES = [symmetric_family(3), symmetric_family(4), general_family(3, 4), general_family(3, 5),
            counterexample_family(3, 4), *footnote_pair()]


def test_build_witness_examples():
    wp = build_witness(symmetric_family(3))
    assert wp.min_eig_W < 0 and wp.is_npt()
    assert np.allclose(wp.W, pt_loop(wp.Q, 3, 3), atol=0)
    assert numerical_rank(build_witness(general_family(3, 5)).Q) == 5
    with pytest.raises(ValueError):
        build_witness(symmetric_family(3), [1, 0, 1])
    with pytest.raises(ValueError):
        build_witness(symmetric_family(3), [1, 1])


def test_block_positivity_min_examples(rng):
    val, _ = block_positivity_min(-np.eye(9), 3, 3, 8, rng)
    assert abs(val + 1) < 1e-12
    wp = build_witness(symmetric_family(3))
    phi = np.kron([1, 0, 0], omega(3, 3)) / np.sqrt(2)
    val, _ = block_positivity_min(wp.W - 0.01 * np.outer(phi, phi.conj()), 3, 3, 64, rng)
    assert val < -DEFAULT_TOL.neg_tol


@pytest.mark.parametrize("V", FAMILIES, ids=lambda V: f"{V.family.kind}-{V.m}x{V.n}")
def test_family_witnesses_are_block_positive(V, rng):
    val, _ = block_positivity_min(build_witness(V).W, V.m, V.n, 64, rng)
    assert val >= -1e-9


@pytest.mark.parametrize("V", FAMILIES[:5], ids=lambda V: f"{V.family.kind}-{V.m}x{V.n}")
def test_decomposability_identity(V):
    rng = np.random.default_rng(31)
    wp = build_witness(V, rng.uniform(0.5, 2.0, V.dim))
    for _ in range(200):
        e, f = cplx(rng, V.m), cplx(rng, V.n)
        lhs = product_expectation(wp.W, e, f)
        v = np.kron(e, f.conj())
        rhs = float(np.real(v.conj() @ wp.Q @ v))
        assert abs(lhs - rhs) <= 1e-10 * abs(rhs)


@pytest.mark.parametrize("V", FAMILIES[:5], ids=lambda V: f"{V.family.kind}-{V.m}x{V.n}")
def test_separable_states_have_nonnegative_value(V):
    rng = np.random.default_rng(32)
    W = build_witness(V).W
    mn = V.m * V.n
    for _ in range(200):
        k = int(rng.integers(1, 2 * mn + 1))
        p = rng.dirichlet(np.ones(k))
        rho = np.zeros((mn, mn), dtype=complex)
        for w in p:
            v = np.kron(cplx(rng, V.m), cplx(rng, V.n))
            v /= np.linalg.norm(v)
            rho += w * np.outer(v, v.conj())
        assert np.real(np.trace(W @ rho)) >= -1e-9


@pytest.mark.parametrize("V", FAMILIES[:4], ids=lambda V: f"{V.family.kind}-{V.m}x{V.n}")
def test_conjugated_products_are_zeros_of_W(V):
    W = build_witness(V).W
    for p in enumerate_all_classes(V, 20, 33):
        assert product_expectation(W, p.e, p.f.conj()) <= 1e-9


def test_closed_form_at_simplest_base_point():
    """Base |00>, direction |1>|1>: value = lam |t|^4 / 6 - eps |<phi|u, v*>|^2."""
    lam = 1.7
    wp = build_witness(symmetric_family(3), [1.0, 1.0, lam])
    e0 = np.array([1, 0, 0], dtype=complex)
    d = np.array([0, 1, 0], dtype=complex)
    path = PerturbationPath(e0, e0, d, d, 0.0, 0.0)
    rng = np.random.default_rng(34)
    K = span_of_PV(wp.V, rng=rng).kernel_basis
    eps = 0.05
    for _ in range(20):
        phi = cplx(rng, K.shape[0]) @ K
        t = complex(*rng.standard_normal(2))
        a00, a01, a10, a11 = (np.conj(phi[i]) for i in (0, 1, 3, 4))
        overlap = a00 + np.conj(t) * a01 + t * a10 + abs(t) ** 2 * a11
        expected = lam * abs(t) ** 4 / 6 - eps * abs(overlap) ** 2
        got = closed_form_value(wp, phi[None, :], eps, path, t)
        assert abs(got - expected) <= 1e-12 * max(1.0, abs(expected))
        u, v = e0 + t * d, e0 + t * d
        direct = product_expectation(wp.W - eps * np.outer(phi, phi.conj()), u, v.conj())
        assert abs(direct - expected) <= 1e-12 * max(1.0, abs(expected))


def test_counterexample_symmetric_kernel_projector(rng):
    wp = build_witness(symmetric_family(3))
    phi = np.kron([1, 0, 0], omega(3, 3)) / np.sqrt(2)
    cert = optimality_counterexample(wp, np.outer(phi, phi.conj()), 0.01, rng=rng)
    assert cert.success and cert.value < -DEFAULT_TOL.neg_tol
    if cert.strategy == "A":
        assert cert.closed_form_rel_err <= 1e-8


def test_counterexample_general_random_psd(rng):
    wp = build_witness(general_family(3, 5))
    K = span_of_PV(wp.V, rng=rng).kernel_basis
    P = random_psd_on(K, rng)
    assert abs(np.trace(P) - 1) < 1e-12
    cert = optimality_counterexample(wp, P, 0.1, rng=rng)
    assert cert.success and cert.value < -DEFAULT_TOL.neg_tol


def test_counterexample_eps_zero_is_degenerate(rng):
    wp = build_witness(symmetric_family(3))
    cert = optimality_counterexample(wp, np.eye(9), 0.0, rng=rng)
    assert cert.strategy == "degenerate" and not cert.success
    assert abs(cert.value) < 1e-12
    with pytest.raises(ValueError):
        optimality_counterexample(wp, np.eye(9), -0.1, rng=rng)


@pytest.mark.parametrize("V", [symmetric_family(3), general_family(3, 5)], ids=["symmetric", "general"])
def test_verify_optimal_families(V, rng):
    rep = verify_optimal(build_witness(V), (1e-3, 1e-2, 0.1), 10, rng)
    assert rep.all_negative
    assert all(c.value < -1e-12 for c in rep.certificates)
    assert all(c.closed_form_rel_err <= 1e-8 for c in rep.certificates if c.strategy == "A")


def test_verify_optimal_with_trivial_kernel():
    rng = np.random.default_rng(35)
    V = random_ces(3, 3, 2, rng)
    rep = verify_optimal(build_witness(V), (0.1,), 2, rng)
    assert rep.kernel.shape[0] == 0 and rep.all_negative and rep.certificates == []
    assert "spanning" in rep.note


def test_verify_optimal_rejects_bad_grid():
    wp = build_witness(symmetric_family(3))
    with pytest.raises(ValueError):
        verify_optimal(wp, (0.1, 0.0))
    with pytest.raises(ValueError):
        verify_optimal(wp, ())


def test_verify_optimal_invariant_under_weight_scaling():
    V = symmetric_family(3)
    K = span_of_PV(V, rng=36).kernel_basis
    a = verify_optimal(build_witness(V), (1e-2,), 3, 37, kernel=K)
    b = verify_optimal(build_witness(V, 3.7 * np.ones(3)), (1e-2,), 3, 37, kernel=K)
    assert a.all_negative == b.all_negative


def test_check_necessary_form_examples():
    for V in FAMILIES[:4]:
        assert check_necessary_form(build_witness(V), rng=0)
    p = ket(3, 3, 0, 0)
    assert not check_necessary_form(witness_from_Q(np.outer(p, p), 3, 3), rng=0)
    assert not check_necessary_form(witness_from_Q(np.eye(9) / 9, 3, 3), rng=0)


def test_witness_from_Q_reads_support():
    V = symmetric_family(3)
    wp = witness_from_Q(build_witness(V).Q, 3, 3)
    assert wp.V.dim == 3
    assert np.allclose(wp.V.projector, V.projector, atol=1e-12)
    with pytest.raises(ValueError):
        witness_from_Q(np.zeros((9, 9)), 3, 3)
