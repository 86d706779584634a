"""Dense complex linear algebra primitives for bipartite spaces C^m (x) C^n.

A bipartite vector psi of length m*n stores the coefficient of |i>|j> at
index i*n + j, so ``vec_to_matrix`` is a plain row-major reshape.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict
from typing import Iterable, Sequence

import numpy as np


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical thresholds for rank, orthogonality and sign decisions."""

    rank_rel: float = 1e-9
    orth_tol: float = 1e-10
    neg_tol: float = 1e-12
    search_neg_tol: float = 1e-9
    ces_gap: float = 1e-6
    zero_tol: float = 1e-12

    def __post_init__(self) -> None:
        for name, value in asdict(self).items():
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be finite and > 0, got {value}")
        if self.rank_rel >= 1:
            raise ValueError(f"rank_rel must be < 1, got {self.rank_rel}")
        if self.ces_gap >= 1:
            raise ValueError(f"ces_gap must be < 1, got {self.ces_gap}")

    def replace(self, **changes) -> "ToleranceConfig":
        return ToleranceConfig(**{**asdict(self), **changes})


DEFAULT_TOL = ToleranceConfig()


def as_vector(x, length: int | None = None) -> np.ndarray:
    v = np.asarray(x, dtype=complex).reshape(-1)
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite entries")
    if length is not None and v.size != length:
        raise ValueError(f"expected length {length}, got {v.size}")
    return v


def as_matrix(M) -> np.ndarray:
    A = np.asarray(M, dtype=complex)
    if A.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def ket(m: int, n: int, i: int, j: int) -> np.ndarray:
    """Basis vector |i>|j> of C^m (x) C^n."""
    v = np.zeros(m * n, dtype=complex)
    v[i * n + j] = 1.0
    return v


def basis_vector(dim: int, i: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[i] = 1.0
    return v


def normalize(v, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    v = as_vector(v)
    nrm = np.linalg.norm(v)
    if nrm < tol.zero_tol:
        raise ValueError("cannot normalize a zero vector")
    return v / nrm


def vec_to_matrix(psi, m: int, n: int) -> np.ndarray:
    psi = as_vector(psi)
    if psi.size != m * n:
        raise ValueError(f"length {psi.size} does not match m*n = {m * n}")
    return psi.reshape(m, n).copy()


def matrix_to_vec(A) -> np.ndarray:
    return as_matrix(A).reshape(-1).copy()


def singular_values(M) -> np.ndarray:
    M = as_matrix(M)
    if M.size == 0:
        return np.zeros(0)
    return np.linalg.svd(M, compute_uv=False)


def numerical_rank(M, tol: ToleranceConfig = DEFAULT_TOL) -> int:
    """Count singular values above ``rank_rel * sigma_max``."""
    s = singular_values(M)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol.rank_rel * s[0]))


def null_space(M, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal kernel basis, one vector per row."""
    M = as_matrix(M)
    cols = M.shape[1]
    if M.shape[0] == 0:
        return np.eye(cols, dtype=complex)
    _, s, Vh = np.linalg.svd(M, full_matrices=True)
    r = 0 if s[0] == 0.0 else int(np.sum(s > tol.rank_rel * s[0]))
    return Vh[r:].conj().copy()


def row_space(M, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (rows) of span of the conjugated rows, i.e. ker(M)^perp."""
    M = as_matrix(M)
    if M.shape[0] == 0:
        return np.zeros((0, M.shape[1]), dtype=complex)
    _, s, Vh = np.linalg.svd(M, full_matrices=False)
    r = 0 if s[0] == 0.0 else int(np.sum(s > tol.rank_rel * s[0]))
    return Vh[:r].conj().copy()


def orthonormalize(vectors, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Two-pass QR orthonormalization of the rows of ``vectors``.

    Order is kept and the diagonal of R is made positive, so input vectors
    that are already mutually orthogonal come back only rescaled.
    """
    X = np.atleast_2d(np.asarray(vectors, dtype=complex))
    k = X.shape[0]
    if k == 0:
        return X.copy()
    norms = np.linalg.norm(X, axis=1)
    if np.any(norms < tol.zero_tol):
        raise ValueError("zero vector in input set")
    if numerical_rank(X / norms[:, None], tol) < k:
        raise ValueError("input vectors are linearly dependent")
    Q = X.T
    for _ in range(2):
        Q, R = np.linalg.qr(Q)
        phase = np.diag(R) / np.abs(np.diag(R))
        Q = Q * phase[None, :]
    return Q.T.copy()


def projector(basis) -> np.ndarray:
    B = np.atleast_2d(np.asarray(basis, dtype=complex))
    return B.T @ B.conj()


def projector_distance(U, V) -> float:
    """Operator-norm distance between orthogonal projectors onto two row spans."""
    PU = projector(U) if len(U) else None
    PV = projector(V) if len(V) else None
    if PU is None and PV is None:
        return 0.0
    if PU is None:
        PU = np.zeros_like(PV)
    if PV is None:
        PV = np.zeros_like(PU)
    return float(np.linalg.norm(PU - PV, 2))


def partial_transpose(M, m: int, n: int) -> np.ndarray:
    """Transpose on the second tensor factor."""
    M = as_matrix(M)
    if M.shape != (m * n, m * n):
        raise ValueError(f"expected shape {(m * n, m * n)}, got {M.shape}")
    return M.reshape(m, n, m, n).transpose(0, 3, 2, 1).reshape(m * n, m * n).copy()


def is_hermitian(M, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    M = as_matrix(M)
    scale = max(1.0, float(np.max(np.abs(M)))) if M.size else 1.0
    return bool(np.max(np.abs(M - M.conj().T), initial=0.0) <= tol.orth_tol * scale)


def basis_matrices(V) -> np.ndarray:
    """Stored basis of a subspace-like object as an array of shape (d, m, n)."""
    return np.asarray(V.basis).reshape(-1, V.m, V.n)


def local_vectors(V, x) -> np.ndarray:
    """Rows |Psi_i(x)> = (<x| (x) 1)|Psi_i>, shape (d, n)."""
    x = as_vector(x, V.m)
    return np.einsum("k,dkl->dl", x.conj(), basis_matrices(V))


def local_projection(V, x) -> np.ndarray:
    """Pi_V(x) = sum_i |Psi_i(x)><Psi_i(x)|, an n x n PSD matrix."""
    R = local_vectors(V, x)
    return R.T @ R.conj()


def schmidt_rank(psi, m: int, n: int, tol: ToleranceConfig = DEFAULT_TOL) -> int:
    psi = as_vector(psi, m * n)
    if np.linalg.norm(psi) < tol.zero_tol:
        raise ValueError("Schmidt rank of the zero vector is undefined")
    return numerical_rank(vec_to_matrix(psi, m, n), tol)


def random_complex(rng: np.random.Generator, *shape) -> np.ndarray:
    """Standard complex Gaussian: real and imaginary parts N(0, 1/2)."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_unit(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = random_complex(rng, dim)
    return v / np.linalg.norm(v)


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    Z = random_complex(rng, dim, dim)
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))[None, :]


def product_overlap_search(
    C: np.ndarray,
    weights: np.ndarray,
    rng: np.random.Generator,
    starts: int = 64,
    iterations: int = 200,
    maximize: bool = True,
    init_e: np.ndarray | None = None,
    stall: float = 1e-15,
):
    """Alternating optimization of sum_i w_i |<c_i|e (x) f>|^2 over unit e, f.

    ``C`` has shape (r, m, n). Each step fixes one factor and solves the
    resulting Hermitian eigenproblem exactly; all starts run as one batch.
    Returns (values, E, F) with one row per start.
    """
    C = np.asarray(C, dtype=complex)
    w = np.asarray(weights, dtype=float)
    r, m, n = C.shape
    Cc = C.conj()
    pick = -1 if maximize else 0
    E = random_complex(rng, starts, m) if init_e is None else np.array(init_e, dtype=complex)
    E /= np.linalg.norm(E, axis=1, keepdims=True)
    prev = None
    F = None
    vals = None
    for _ in range(iterations):
        R = np.einsum("sk,rkl->srl", E, Cc)
        H = np.einsum("srl,r,srj->slj", R.conj(), w, R)
        vals, vecs = np.linalg.eigh(H)
        F = vecs[:, :, pick]
        R = np.einsum("sl,rkl->srk", F, Cc)
        H = np.einsum("srk,r,srj->skj", R.conj(), w, R)
        vals, vecs = np.linalg.eigh(H)
        E = vecs[:, :, pick]
        cur = vals[:, pick]
        if prev is not None and np.max(np.abs(cur - prev)) < stall:
            break
        prev = cur
    return vals[:, pick].copy(), E, F


def hermitian_factors(H, m: int, n: int):
    """Write H = sum_i w_i |c_i><c_i| via its eigendecomposition."""
    w, U = np.linalg.eigh(as_matrix(H))
    return U.T.reshape(-1, m, n), w


# JSON encoding: complex scalar as [re, im]; matrix as {"rows","cols","data"}.

def encode_complex(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def decode_complex(pair) -> complex:
    re, im = pair
    return complex(float(re), float(im))


def encode_vector(v) -> list:
    return [encode_complex(z) for z in as_vector(v)]


def decode_vector(data) -> np.ndarray:
    return np.array([decode_complex(p) for p in data], dtype=complex)


def encode_matrix(M) -> dict:
    M = as_matrix(M)
    return {"rows": M.shape[0], "cols": M.shape[1], "data": [encode_complex(z) for z in M.reshape(-1)]}


def decode_matrix(obj) -> np.ndarray:
    rows, cols = int(obj["rows"]), int(obj["cols"])
    data = obj["data"]
    if len(data) != rows * cols:
        raise ValueError(f"matrix data has {len(data)} entries, expected {rows * cols}")
    return np.array([decode_complex(p) for p in data], dtype=complex).reshape(rows, cols)


def stack_rows(vectors: Iterable, length: int) -> np.ndarray:
    rows = [as_vector(v, length) for v in vectors]
    if not rows:
        return np.zeros((0, length), dtype=complex)
    return np.vstack(rows)


__all__: Sequence[str] = [
    "ToleranceConfig", "DEFAULT_TOL", "as_vector", "as_matrix", "ket", "basis_vector", "normalize",
    "vec_to_matrix", "matrix_to_vec", "singular_values", "numerical_rank", "null_space", "row_space",
    "orthonormalize", "projector", "projector_distance", "partial_transpose", "is_hermitian",
    "basis_matrices", "local_vectors", "local_projection", "schmidt_rank", "random_complex",
    "random_unit", "random_unitary", "product_overlap_search", "hermitian_factors",
    "encode_complex", "decode_complex", "encode_vector", "decode_vector", "encode_matrix",
    "decode_matrix", "stack_rows",
]
