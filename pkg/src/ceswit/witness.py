"""Decomposable witnesses W = Q^Gamma built on a CES, and their optimality tests.

Optimality is probed by perturbing W to W - eps P with P >= 0 supported on the
kernel K and exhibiting a product vector with negative expectation.

Strategy A is a second-order expansion around a product vector e0 (x) f0 in
the complement of V. Along u = e0 + t de, v = f0 + t df with (de, df) in the
kernel of the linearized orthogonality conditions, the Q part starts at |t|^4
while the P part is -eps |t a + conj(t) b|^2 + ..., so a small enough |t|
gives a negative value whenever a or b is nonzero. Strategy B is a direct
multi-start minimization over product vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    ToleranceConfig,
    encode_matrix,
    encode_vector,
    hermitian_factors,
    null_space,
    partial_transpose,
    product_overlap_search,
    random_complex,
)
from .products import product_residual
from .spanning import collect_products, span_of_PV
from .subspaces import SearchBudget, Subspace, as_rng, is_ces, make_subspace

MAX_HALVINGS = 60
CLOSED_FORM_RTOL = 1e-8


@dataclass
class WitnessPair:
    V: Subspace
    lambdas: np.ndarray
    Q: np.ndarray
    W: np.ndarray
    min_eig_W: float

    @property
    def m(self) -> int:
        return self.V.m

    @property
    def n(self) -> int:
        return self.V.n

    def is_npt(self, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
        return self.min_eig_W < -tol.neg_tol

    def to_dict(self) -> dict:
        return {
            "subspace": self.V.to_dict(),
            "lambdas": [float(x) for x in self.lambdas],
            "Q": encode_matrix(self.Q),
            "W": encode_matrix(self.W),
            "min_eig_W": self.min_eig_W,
        }


def build_witness(V: Subspace, lambdas=None) -> WitnessPair:
    """Q = sum_i lambda_i |Psi_i><Psi_i| over the stored basis, W = Q^Gamma."""
    lam = np.ones(V.dim) if lambdas is None else np.asarray(lambdas, dtype=float).reshape(-1)
    if lam.shape != (V.dim,):
        raise ValueError(f"need {V.dim} weights, got {lam.size}")
    if np.any(~np.isfinite(lam)) or np.any(lam <= 0):
        raise ValueError("weights must be finite and positive")
    Q = (V.basis.T * lam) @ V.basis.conj()
    Q = (Q + Q.conj().T) / 2
    W = partial_transpose(Q, V.m, V.n)
    return WitnessPair(V, lam, Q, W, float(np.linalg.eigvalsh(W)[0]))


def witness_from_Q(Q, m: int, n: int, tol: ToleranceConfig = DEFAULT_TOL) -> WitnessPair:
    """Wrap an arbitrary PSD Q; the support is read off its spectrum."""
    Q = np.asarray(Q, dtype=complex)
    w, U = np.linalg.eigh((Q + Q.conj().T) / 2)
    keep = w > tol.rank_rel * max(w[-1], 0.0)
    if not np.any(keep):
        raise ValueError("Q has empty support")
    V = make_subspace(m, n, U[:, keep].T, tol)
    W = partial_transpose(Q, m, n)
    return WitnessPair(V, w[keep], Q, W, float(np.linalg.eigvalsh((W + W.conj().T) / 2)[0]))


def block_positivity_min(W, m: int, n: int, starts: int = 64, rng=None, tol: ToleranceConfig = DEFAULT_TOL,
                         iterations: int = 300):
    """Smallest <e,f|W|e,f> found by multi-start alternating minimization.

    Returns (value, (e, f)).
    """
    rng = as_rng(rng)
    W = np.asarray(W, dtype=complex)
    C, w = hermitian_factors((W + W.conj().T) / 2, m, n)
    vals, E, F = product_overlap_search(C, w, rng, starts=starts, iterations=iterations, maximize=False)
    i = int(np.argmin(vals))
    return float(vals[i]), (E[i], F[i])


def product_expectation(M, e, f) -> float:
    v = np.kron(e, f)
    return float(np.real(v.conj() @ M @ v))


def random_psd_on(K: np.ndarray, rng=None) -> np.ndarray:
    """G G^dagger on span K (rows), normalized to unit trace."""
    rng = as_rng(rng)
    k = K.shape[0]
    G = random_complex(rng, k, k)
    P = K.T @ (G @ G.conj().T) @ K.conj()
    P = (P + P.conj().T) / 2
    return P / np.real(np.trace(P))


@dataclass
class OptimalityCertificate:
    eps: float
    P_label: str
    strategy: str  # "A", "B", "none" or "degenerate"
    success: bool
    value: float  # normalized: <u,v*|W - eps P|u,v*> with unit u, v
    u: np.ndarray | None = None
    v: np.ndarray | None = None
    closed_form: float | None = None
    closed_form_rel_err: float | None = None
    t: complex | None = None

    def to_dict(self) -> dict:
        out = {
            "P": self.P_label,
            "eps": self.eps,
            "strategy": self.strategy,
            "success": self.success,
            "value": self.value,
            "closed_form": self.closed_form,
            "closed_form_rel_err": self.closed_form_rel_err,
        }
        if self.u is not None:
            out["u"] = encode_vector(self.u)
            out["v"] = encode_vector(self.v)
        if self.t is not None:
            out["t"] = [self.t.real, self.t.imag]
        return out


@dataclass
class PerturbationPath:
    """Polynomial data of <u (x) v*|W - eps P|u (x) v*> along u = e0 + t de, v = f0 + t df."""

    e0: np.ndarray
    f0: np.ndarray
    de: np.ndarray
    df: np.ndarray
    delta: float
    score: float

    def point(self, r: float):
        t = r * np.exp(1j * self.delta)
        return self.e0 + t * self.de, self.f0 + t * self.df, t


def closed_form_value(wp: WitnessPair, P_factors: np.ndarray, eps: float, path: PerturbationPath, t: complex) -> float:
    """Expansion in t of the unnormalized value, from Q's spectral data and P's factors."""
    B = wp.V.basis.conj()
    lam = wp.lambdas
    e0, f0, de, df = path.e0, path.f0, path.de, path.df
    g0 = B @ np.kron(e0, f0)
    g1 = B @ (np.kron(de, f0) + np.kron(e0, df))
    g2 = B @ np.kron(de, df)
    q = np.sum(lam * np.abs(g0 + t * g1 + t**2 * g2) ** 2)
    Pc = P_factors.conj()
    c0 = Pc @ np.kron(e0, f0.conj())
    a = Pc @ np.kron(de, f0.conj())
    b = Pc @ np.kron(e0, df.conj())
    c = Pc @ np.kron(de, df.conj())
    p = np.sum(np.abs(c0 + t * a + np.conj(t) * b + abs(t) ** 2 * c) ** 2)
    return float(q - eps * p)


def _psd_factors(P: np.ndarray, tol: ToleranceConfig) -> np.ndarray:
    """Rows p_k with P = sum_k |p_k><p_k|."""
    w, U = np.linalg.eigh((P + P.conj().T) / 2)
    if w[0] < -tol.orth_tol * max(1.0, abs(w[-1])):
        raise ValueError("P must be positive semidefinite")
    keep = w > tol.rank_rel * max(w[-1], 0.0)
    return (U[:, keep] * np.sqrt(w[keep])).T


def _best_direction(wp: WitnessPair, P_factors: np.ndarray, e0, f0, tol: ToleranceConfig, grid: int = 32):
    """Tangent direction and phase maximizing the first-order P coupling."""
    m, n = wp.m, wp.n
    A = wp.V.matrices.conj()
    J = np.hstack([np.einsum("dkl,l->dk", A, f0), np.einsum("dkl,k->dl", A, e0)])
    D = null_space(J, tol)
    if D.shape[0] == 0:
        return None
    DE, DF = D[:, :m], D[:, m:]
    Pc = P_factors.conj()
    Ma = np.einsum("kab,jab->kj", Pc.reshape(-1, m, n), np.einsum("ja,b->jab", DE, f0.conj()))
    Mb = np.einsum("kab,jab->kj", Pc.reshape(-1, m, n), np.einsum("a,jb->jab", e0, DF.conj()))
    # c -> Ma c + phi Mb conj(c) as a real-linear map on (Re c, Im c)
    best = (-1.0, None, 0.0)
    for delta in np.linspace(0, np.pi, grid, endpoint=False):
        phi = np.exp(-2j * delta)
        Mp = phi * Mb
        R = np.block([
            [Ma.real + Mp.real, -Ma.imag + Mp.imag],
            [Ma.imag + Mp.imag, Ma.real - Mp.real],
        ])
        _, s, Vt = np.linalg.svd(R)
        if s[0] ** 2 > best[0]:
            x = Vt[0]
            best = (s[0] ** 2, x[: len(x) // 2] + 1j * x[len(x) // 2:], delta)
    score, c, delta = best
    if c is None or score <= 0:
        return None
    alpha, beta = Ma @ c, Mb @ np.conj(c)
    gamma = np.sum(beta * np.conj(alpha))
    if abs(gamma) > 0:
        delta = float(np.angle(gamma) / 2)
    score = float(np.sum(np.abs(alpha + np.exp(-2j * delta) * beta) ** 2))
    return PerturbationPath(e0, f0, c @ DE, c @ DF, delta, score)


def base_points(wp: WitnessPair, rng=None, tol: ToleranceConfig = DEFAULT_TOL, count: int = 24) -> list[tuple]:
    """Product vectors of the complement used as expansion points."""
    rng = as_rng(rng)
    m, n = wp.m, wp.n
    pts = []
    for i in range(m):
        for j in range(n):
            e, f = np.eye(m)[i].astype(complex), np.eye(n)[j].astype(complex)
            if product_residual(wp.V, e, f) < tol.zero_tol:
                pts.append((e, f))
    products, _, _ = collect_products(wp.V, max(count, m * n), rng, tol)
    idx = rng.permutation(len(products))[:count]
    pts.extend((products[i].e, products[i].f) for i in idx)
    return pts


def strategy_a(wp: WitnessPair, P: np.ndarray, eps: float, points, tol: ToleranceConfig = DEFAULT_TOL,
               candidates: int = 4) -> OptimalityCertificate | None:
    P_factors = _psd_factors(P, tol)
    paths = [p for p in (_best_direction(wp, P_factors, e0, f0, tol) for e0, f0 in points) if p is not None]
    paths.sort(key=lambda p: -p.score)
    M = wp.W - eps * P
    best = None
    for path in paths[:candidates]:
        found = None
        r = 1.0
        for _ in range(MAX_HALVINGS + 1):
            u, v, t = path.point(r)
            val = product_expectation(M, u, v.conj())
            if val < -tol.neg_tol * (np.linalg.norm(u) * np.linalg.norm(v)) ** 2:
                if found is not None and val >= found[0]:
                    break
                found = (val, u, v, t)
            elif found is not None:
                break
            r /= 2
        if found is None:
            continue
        val, u, v, t = found
        cf = closed_form_value(wp, P_factors, eps, path, t)
        scale = (np.linalg.norm(u) * np.linalg.norm(v)) ** 2
        cert = OptimalityCertificate(
            eps=eps, P_label="", strategy="A", success=bool(val / scale < -tol.neg_tol), value=float(val / scale),
            u=u / np.linalg.norm(u), v=v / np.linalg.norm(v), closed_form=float(cf / scale),
            closed_form_rel_err=float(abs(val - cf) / max(abs(cf), np.finfo(float).tiny)), t=complex(t),
        )
        if best is None or cert.value < best.value:
            best = cert
    return best


def optimality_counterexample(wp: WitnessPair, P, eps: float, tol: ToleranceConfig = DEFAULT_TOL, rng=None,
                              points=None, starts: int = 64, label: str = "") -> OptimalityCertificate:
    """Product vector with <u, v*|W - eps P|u, v*> < 0, by Strategy A then B."""
    rng = as_rng(rng)
    if eps < 0:
        raise ValueError("eps must be >= 0")
    P = np.asarray(P, dtype=complex)
    if points is None:
        points = base_points(wp, rng, tol)
    if eps == 0:
        e0, f0 = points[0]
        val = product_expectation(wp.W, e0, f0.conj())
        return OptimalityCertificate(eps, label, "degenerate", False, val, e0, f0)
    cert = strategy_a(wp, P, eps, points, tol)
    if cert is not None and cert.success:
        cert.P_label = label
        return cert
    val, (e, f) = block_positivity_min(wp.W - eps * P, wp.m, wp.n, starts, rng, tol)
    # the argmin is the product vector e (x) f = u (x) v*, so v = conj(f)
    return OptimalityCertificate(eps, label, "B", bool(val < -tol.search_neg_tol), val, e, f.conj())


@dataclass
class OptimalityReport:
    kernel: np.ndarray
    certificates: list = field(default_factory=list)
    all_negative: bool = True
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "kernel_dim": int(self.kernel.shape[0]),
            "kernel": [encode_vector(k) for k in self.kernel],
            "all_negative": self.all_negative,
            "note": self.note,
            "certificates": [c.to_dict() for c in self.certificates],
        }


def verify_optimal(wp: WitnessPair, eps_grid, trials: int = 10, rng=None, tol: ToleranceConfig = DEFAULT_TOL,
                   samples: int | None = None, kernel: np.ndarray | None = None) -> OptimalityReport:
    rng = as_rng(rng)
    eps_grid = [float(e) for e in eps_grid]
    if not eps_grid or any(e <= 0 for e in eps_grid):
        raise ValueError("eps grid must be nonempty and strictly positive")
    if kernel is None:
        kernel = span_of_PV(wp.V, samples, rng, tol, compare=False).kernel_basis
    if kernel.shape[0] == 0:
        return OptimalityReport(kernel, [], True, "kernel is trivial: the spanning property already implies optimality")
    Ps = [(f"kernel[{i}]", np.outer(k, k.conj())) for i, k in enumerate(kernel)]
    Ps += [(f"random[{i}]", random_psd_on(kernel, rng)) for i in range(trials)]
    points = base_points(wp, rng, tol)
    report = OptimalityReport(kernel)
    for eps in eps_grid:
        for label, P in Ps:
            cert = optimality_counterexample(wp, P, eps, tol, rng, points, label=label)
            report.certificates.append(cert)
    report.all_negative = all(c.success for c in report.certificates)
    if not report.all_negative:
        report.note = "some perturbations stayed block-positive within the search budget"
    return report


def check_necessary_form(wp: WitnessPair, tol: ToleranceConfig = DEFAULT_TOL, budget: SearchBudget = SearchBudget(),
                         rng=None) -> bool:
    """Q >= 0, W = Q^Gamma and the support of Q is completely entangled."""
    Q = wp.Q
    w = np.linalg.eigvalsh((Q + Q.conj().T) / 2)
    if w[0] < -tol.orth_tol * max(1.0, abs(w[-1])):
        return False
    if np.max(np.abs(partial_transpose(Q, wp.m, wp.n) - wp.W)) > tol.orth_tol * max(1.0, np.max(np.abs(Q))):
        return False
    return is_ces(wp.V, tol, budget, rng).is_ces
