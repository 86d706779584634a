"""Span of partially conjugated product vectors orthogonal to V, and its kernel K."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    ToleranceConfig,
    encode_vector,
    null_space,
    numerical_rank,
    projector_distance,
    random_complex,
)
from .products import (
    ProductVector,
    enumerate_class,
    generic_solutions,
    harvest_solutions,
    solution_classes,
)
from .subspaces import Subspace, as_rng

KERNEL_MATCH_TOL = 1e-8


def partial_conjugate(p: ProductVector) -> ProductVector:
    return replace(p, f=np.conj(p.f))


def conjugated_row(p: ProductVector) -> np.ndarray:
    """Unit vector e (x) f* of C^m (x) C^n."""
    v = np.kron(p.e, np.conj(p.f))
    return v / np.linalg.norm(v)


@dataclass
class SpanReport:
    span_dim: int
    kernel_basis: np.ndarray  # (k, m*n), orthonormal rows
    samples_used: int
    m: int = 0
    n: int = 0
    predicted_kernel: np.ndarray | None = None
    kernel_match: bool | None = None
    kernel_distance: float | None = None
    routes: dict = field(default_factory=dict)
    approximate: bool = False

    @property
    def kernel_dim(self) -> int:
        return int(self.kernel_basis.shape[0])

    @property
    def has_spanning(self) -> bool:
        return self.span_dim == self.m * self.n

    def to_dict(self) -> dict:
        return {
            "span_dim": self.span_dim,
            "kernel_dim": self.kernel_dim,
            "kernel": [encode_vector(k) for k in self.kernel_basis],
            "samples_used": self.samples_used,
            "kernel_match": self.kernel_match,
            "kernel_distance": self.kernel_distance,
            "routes": dict(self.routes),
            "approximate": self.approximate,
        }


def collect_products(V: Subspace, samples: int | None = None, rng=None, tol: ToleranceConfig = DEFAULT_TOL,
                     include_classes: bool = True) -> tuple[list[ProductVector], dict, bool]:
    """Product vectors of the complement from every applicable route."""
    rng = as_rng(rng)
    samples = 4 * V.m * V.n if samples is None else samples
    routes = {"generic": 0, "classes": 0, "harvest": 0}
    out: list[ProductVector] = []
    if V.dim < V.n:
        for _ in range(samples):
            got = generic_solutions(V, random_complex(rng, V.m), tol)
            out.extend(got)
            routes["generic"] += len(got)
    classes = solution_classes(V.family) if include_classes else []
    if classes:
        per = max(1, samples // len(classes))
        for spec in classes:
            got = enumerate_class(spec, per, rng, V, tol)
            out.extend(got)
            routes["classes"] += len(got)
    approximate = False
    if not out and V.dim >= V.n:
        # no closed form: numerical harvest
        got = harvest_solutions(V, samples, rng, tol)
        out.extend(got)
        routes["harvest"] = len(got)
        approximate = True
    return out, routes, approximate


def span_from_products(products: list[ProductVector], m: int, n: int, tol: ToleranceConfig = DEFAULT_TOL):
    if not products:
        return 0, np.eye(m * n, dtype=complex)
    R = np.array([conjugated_row(p) for p in products])
    rank = numerical_rank(R, tol)
    kernel = null_space(R.conj(), tol)
    return rank, kernel


def span_of_PV(V: Subspace, samples: int | None = None, rng=None, tol: ToleranceConfig = DEFAULT_TOL,
               include_classes: bool = True, compare: bool = True) -> SpanReport:
    samples = 4 * V.m * V.n if samples is None else samples
    if samples < V.m * V.n:
        raise ValueError(f"need at least m*n = {V.m * V.n} samples")
    products, routes, approximate = collect_products(V, samples, rng, tol, include_classes)
    rank, kernel = span_from_products(products, V.m, V.n, tol)
    report = SpanReport(rank, kernel, len(products), V.m, V.n, routes=routes, approximate=approximate)
    if compare and V.family is not None and V.family.kind in ("symmetric", "general"):
        pred = predicted_kernel(V.family)
        report.predicted_kernel = pred
        report.kernel_distance = projector_distance(kernel, pred)
        report.kernel_match = report.kernel_distance <= KERNEL_MATCH_TOL
    return report


def _omega(length: int, m: int) -> np.ndarray:
    w = np.zeros(length, dtype=complex)
    w[1:m] = 1.0
    return w


def predicted_kernel(family) -> np.ndarray:
    """Claimed kernel: |0>|w>, |w>|0> and, for m < n, |w>|j> (j = m..n-1), w = |1> + ... + |m-1>."""
    if family.kind not in ("symmetric", "general"):
        raise ValueError(
            f"no closed-form kernel for the {family.kind} family; check membership of |0>|{family.n - 1}> instead"
        )
    m, n = family.m, family.n
    e0m, e0n = np.eye(m)[0], np.eye(n)[0]
    vecs = [np.kron(e0m, _omega(n, m)), np.kron(_omega(m, m), e0n)]
    for j in range(m, n):
        vecs.append(np.kron(_omega(m, m), np.eye(n)[j]))
    if family.transform is not None:
        # conjugated rows map by A^-dagger (x) B^-T, so K maps by A (x) conj(B)
        A, B = family.transform
        T = np.kron(A, B.conj())
        vecs = [T @ v for v in vecs]
    Q, _ = np.linalg.qr(np.array(vecs, dtype=complex).T)
    return Q.T.copy()


def dim_span_S1_star(m: int, rng=None, tol: ToleranceConfig = DEFAULT_TOL, samples: int | None = None) -> int:
    """Span dimension of conjugated S1-class vectors of the symmetric family."""
    from .constructions import symmetric_family

    V = symmetric_family(m, tol=tol)
    samples = 4 * m * m if samples is None else samples
    spec = next(c for c in solution_classes(V.family) if c.class_tag == "S1")
    rank, _ = span_from_products(enumerate_class(spec, samples, rng, V, tol), m, m, tol)
    return rank


def has_spanning_property(V: Subspace, samples: int | None = None, rng=None, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    return span_of_PV(V, samples, rng, tol, compare=False).span_dim == V.m * V.n


def kernel_contains(report: SpanReport, v) -> float:
    """Distance of a unit vector from the kernel span."""
    v = np.asarray(v, dtype=complex)
    v = v / np.linalg.norm(v)
    K = report.kernel_basis
    proj = K.T @ (K.conj() @ v) if len(K) else np.zeros_like(v)
    return float(np.linalg.norm(v - proj))
