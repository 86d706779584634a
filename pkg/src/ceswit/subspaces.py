"""Subspaces of C^m (x) C^n, CES certificates and support checks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    ToleranceConfig,
    as_matrix,
    as_vector,
    decode_vector,
    encode_vector,
    numerical_rank,
    orthonormalize,
    product_overlap_search,
    projector,
    random_complex,
)


def as_rng(rng=None) -> np.random.Generator:
    """Accept a Generator, an int seed or None (seed 0)."""
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(0 if rng is None else rng)


@dataclass(frozen=True, eq=False)
class Subspace:
    m: int
    n: int
    basis: np.ndarray  # (dim, m*n), orthonormal rows
    family: Any = None  # FamilySpec when built by a family constructor

    @property
    def dim(self) -> int:
        return int(self.basis.shape[0])

    @property
    def projector(self) -> np.ndarray:
        return projector(self.basis)

    @property
    def matrices(self) -> np.ndarray:
        return self.basis.reshape(-1, self.m, self.n)

    def gram_residual(self) -> float:
        G = self.basis.conj() @ self.basis.T
        return float(np.max(np.abs(G - np.eye(self.dim)), initial=0.0))

    def complement(self, tol: ToleranceConfig = DEFAULT_TOL) -> "Subspace":
        P = np.eye(self.m * self.n) - self.projector
        w, U = np.linalg.eigh(P)
        keep = w > 0.5
        return Subspace(self.m, self.n, U[:, keep].T.copy())

    def contains(self, v, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
        v = as_vector(v, self.m * self.n)
        nrm = np.linalg.norm(v)
        if nrm < tol.zero_tol:
            return True
        resid = v - self.projector @ v
        # orth_tol is a Gram tolerance; membership allows two orders of slack for accumulated rounding
        return bool(np.linalg.norm(resid) <= 1e2 * tol.orth_tol * nrm)

    def to_dict(self) -> dict:
        out = {"m": self.m, "n": self.n, "basis": [encode_vector(b) for b in self.basis]}
        if self.family is not None:
            out["family"] = self.family.to_dict()
        return out

    @classmethod
    def from_dict(cls, obj: dict, tol: ToleranceConfig = DEFAULT_TOL) -> "Subspace":
        m, n = int(obj["m"]), int(obj["n"])
        vecs = [decode_vector(v) for v in obj["basis"]]
        family = None
        if "family" in obj:
            from .constructions import FamilySpec

            family = FamilySpec.from_dict(obj["family"])
        return make_subspace(m, n, vecs, tol, family=family)


def make_subspace(m: int, n: int, vectors, tol: ToleranceConfig = DEFAULT_TOL, family=None) -> Subspace:
    if m < 1 or n < 1:
        raise ValueError("local dimensions must be positive")
    X = np.atleast_2d(np.asarray(vectors, dtype=complex))
    if X.size == 0:
        raise ValueError("empty vector set")
    if X.shape[1] != m * n:
        raise ValueError(f"vectors must have length {m * n}, got {X.shape[1]}")
    if X.shape[0] > m * n:
        raise ValueError("more vectors than the ambient dimension")
    Q = orthonormalize(X, tol)
    return Subspace(m, n, Q, family)


def max_ces_dim(m: int, n: int) -> int:
    if m < 2 or n < 2:
        raise ValueError("m and n must be >= 2")
    return (m - 1) * (n - 1)


def is_supported(V: Subspace, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Both reduced projections of the projector onto V have full rank."""
    T = V.projector.reshape(V.m, V.n, V.m, V.n)
    rho_a = np.einsum("ijkj->ik", T)
    rho_b = np.einsum("ijil->jl", T)
    return numerical_rank(rho_a, tol) == V.m and numerical_rank(rho_b, tol) == V.n


@dataclass(frozen=True)
class SearchBudget:
    starts: int = 64
    iterations: int = 200
    structured_samples: int = 256
    structured_iterations: int = 60

    def __post_init__(self) -> None:
        if self.starts < 1 or self.iterations < 1:
            raise ValueError("search budget must be positive")


@dataclass
class CesCertificate:
    is_ces: bool
    best_product_overlap: float
    witness_e: np.ndarray | None = None
    witness_f: np.ndarray | None = None
    structured_checked: bool = False
    structured_min_minor: float | None = None
    starts: int = 0
    iterations: int = 0

    def to_dict(self) -> dict:
        out = {
            "is_ces": self.is_ces,
            "best_product_overlap": self.best_product_overlap,
            "structured_checked": self.structured_checked,
            "structured_min_minor": self.structured_min_minor,
            "starts": self.starts,
            "iterations": self.iterations,
        }
        if self.witness_e is not None:
            out["witness"] = {"e": encode_vector(self.witness_e), "f": encode_vector(self.witness_f)}
        return out


def _max_minor(M: np.ndarray) -> np.ndarray:
    """Largest |2x2 minor| of each matrix in a batch, relative to ||M||_F^2."""
    s = np.linalg.svd(M, compute_uv=False)
    # every 2x2 minor is bounded by sigma_1 sigma_2 and the max minor is zero iff rank <= 1
    m, n = M.shape[-2:]
    iu = np.array([(a, b) for a in range(m) for b in range(a + 1, m)])
    ju = np.array([(a, b) for a in range(n) for b in range(a + 1, n)])
    rows_a, rows_b = M[:, iu[:, 0], :], M[:, iu[:, 1], :]
    minors = (
        rows_a[:, :, None, ju[:, 0]] * rows_b[:, :, None, ju[:, 1]]
        - rows_a[:, :, None, ju[:, 1]] * rows_b[:, :, None, ju[:, 0]]
    )
    scale = np.sum(s**2, axis=1)
    return np.max(np.abs(minors).reshape(M.shape[0], -1), axis=1) / scale


def structured_rank_one_check(
    V: Subspace, rng: np.random.Generator, budget: SearchBudget, seeds: np.ndarray | None = None
) -> float:
    """Smallest normalized 2x2 minor over refined combinations sum_i a_i A_i.

    Random coefficient vectors (plus optional seeds) are refined by alternating
    projection between span V and the rank-1 matrices.
    """
    A = V.matrices
    d = V.dim
    alpha = random_complex(rng, budget.structured_samples, d)
    if seeds is not None and len(seeds):
        alpha = np.vstack([alpha, seeds])
    alpha /= np.linalg.norm(alpha, axis=1, keepdims=True)
    for _ in range(budget.structured_iterations):
        M = np.einsum("sd,dkl->skl", alpha, A)
        U, s, Vh = np.linalg.svd(M)
        R1 = s[:, :1, None] * U[:, :, :1] @ Vh[:, :1, :]
        alpha = np.einsum("skl,dkl->sd", R1, A.conj())
        alpha /= np.linalg.norm(alpha, axis=1, keepdims=True)
    M = np.einsum("sd,dkl->skl", alpha, A)
    return float(np.min(_max_minor(M)))


def is_ces(V: Subspace, tol: ToleranceConfig = DEFAULT_TOL, budget: SearchBudget = SearchBudget(), rng=None) -> CesCertificate:
    """Search for a unit product vector nearly inside V.

    The certificate reports the largest ||Pi_V (e (x) f)||^2 found; V is
    declared completely entangled when it stays below 1 - ces_gap.
    """
    rng = as_rng(rng)
    if V.dim == 0:
        return CesCertificate(True, 0.0, starts=0, iterations=0)
    vals, E, F = product_overlap_search(
        V.matrices, np.ones(V.dim), rng, starts=budget.starts, iterations=budget.iterations, maximize=True
    )
    best = int(np.argmax(vals))
    overlap = float(min(1.0, max(0.0, vals[best])))
    cert = CesCertificate(
        is_ces=overlap < 1 - tol.ces_gap,
        best_product_overlap=overlap,
        witness_e=E[best],
        witness_f=F[best],
        starts=budget.starts,
        iterations=budget.iterations,
    )
    if V.dim <= 4:
        prod = np.einsum("sk,sl->skl", E, F).reshape(len(E), -1)
        seeds = prod @ V.basis.conj().T
        minor = structured_rank_one_check(V, rng, budget, seeds)
        cert.structured_checked = True
        cert.structured_min_minor = minor
        if minor < tol.ces_gap:
            cert.is_ces = False
    return cert


def local_transform(V: Subspace, A, B, tol: ToleranceConfig = DEFAULT_TOL) -> Subspace:
    """(A (x) B) V, re-orthonormalized; family metadata follows the transform."""
    A = as_matrix(A)
    B = as_matrix(B)
    if A.shape != (V.m, V.m) or B.shape != (V.n, V.n):
        raise ValueError("local operators have the wrong shape")
    if numerical_rank(A, tol) < V.m or numerical_rank(B, tol) < V.n:
        raise ValueError("local operators must be invertible")
    new = np.einsum("ik,dkl,jl->dij", A, V.matrices, B).reshape(V.dim, -1)
    family = V.family.transformed(A, B) if V.family is not None else None
    return make_subspace(V.m, V.n, new, tol, family=family)


def random_subspace(m: int, n: int, dim: int, rng=None, tol: ToleranceConfig = DEFAULT_TOL) -> Subspace:
    rng = as_rng(rng)
    return make_subspace(m, n, random_complex(rng, dim, m * n), tol)


def random_invertible(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Complex Gaussian matrix shifted towards the identity to stay well conditioned."""
    return np.eye(dim) + 0.5 * random_complex(rng, dim, dim)


def random_ces(m: int, n: int, dim: int, rng=None, tol: ToleranceConfig = DEFAULT_TOL, max_tries: int = 16) -> Subspace:
    """Random subspace of the given dimension, redrawn until the CES search passes."""
    rng = as_rng(rng)
    if dim > max_ces_dim(m, n):
        raise ValueError(f"dim {dim} exceeds the maximal CES dimension {max_ces_dim(m, n)}")
    for _ in range(max_tries):
        V = random_subspace(m, n, dim, rng, tol)
        if is_ces(V, tol, rng=rng).is_ces:
            return V
    raise RuntimeError("no CES found within max_tries")
