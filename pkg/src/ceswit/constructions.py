"""Builders for the explicit CES families and the one-vector extension step."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    ToleranceConfig,
    as_matrix,
    decode_matrix,
    encode_matrix,
    ket,
    null_space,
    numerical_rank,
    random_complex,
)
from .subspaces import (
    CesCertificate,
    SearchBudget,
    Subspace,
    as_rng,
    is_ces,
    make_subspace,
    max_ces_dim,
)

KINDS = ("symmetric", "general", "counterexample", "footnote_pair")
GENERAL_VARIANTS = ("nx", "printed")


@dataclass(frozen=True, eq=False)
class FamilySpec:
    """Which family a subspace came from.

    ``transform`` holds local operators (A, B) when the stored subspace is
    (A (x) B) applied to the family member; product vectors of the complement
    then map as (e, f) -> (A^-dagger e, B^-dagger f).
    """

    kind: str
    m: int
    n: int
    A_tilde: np.ndarray | None = None
    variant: str = "nx"
    transform: tuple | None = None
    member: int = 0  # footnote pair: 0 = listed subspace, 1 = complement

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown family kind {self.kind!r}")
        if self.kind == "symmetric" and not (self.m == self.n and self.m >= 3):
            raise ValueError("symmetric family requires m = n >= 3")
        if self.kind in ("general", "counterexample") and not (3 <= self.m < self.n):
            raise ValueError(f"{self.kind} family requires 3 <= m < n")
        if self.kind == "footnote_pair" and (self.m, self.n) != (3, 4):
            raise ValueError("footnote pair lives in 3 x 4")
        if self.variant not in GENERAL_VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")

    @property
    def a_tilde(self) -> np.ndarray:
        return default_a_tilde(self.m) if self.A_tilde is None else self.A_tilde

    def transformed(self, A, B) -> "FamilySpec":
        A, B = as_matrix(A), as_matrix(B)
        if self.transform is not None:
            A = A @ self.transform[0]
            B = B @ self.transform[1]
        return FamilySpec(self.kind, self.m, self.n, self.A_tilde, self.variant, (A, B), self.member)

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "m": self.m, "n": self.n, "variant": self.variant, "member": self.member}
        out["A_tilde"] = None if self.A_tilde is None else encode_matrix(self.A_tilde)
        out["transform"] = None if self.transform is None else [encode_matrix(t) for t in self.transform]
        return out

    @classmethod
    def from_dict(cls, obj: dict) -> "FamilySpec":
        A = obj.get("A_tilde")
        T = obj.get("transform")
        return cls(
            kind=obj["kind"],
            m=int(obj["m"]),
            n=int(obj["n"]),
            A_tilde=None if A is None else decode_matrix(A),
            variant=obj.get("variant", "nx"),
            transform=None if T is None else tuple(decode_matrix(t) for t in T),
            member=int(obj.get("member", 0)),
        )


def default_a_tilde(m: int) -> np.ndarray:
    """(m-1) x (m-1) unitriangular matrix with 2s strictly above the diagonal."""
    k = m - 1
    return np.eye(k, dtype=complex) + 2 * np.triu(np.ones((k, k), dtype=complex), 1)


def _psi_m(m: int, n: int, A_tilde: np.ndarray) -> np.ndarray:
    M = np.zeros((m, n), dtype=complex)
    M[1:m, 1:m] = A_tilde
    return M.reshape(-1)


def _check_a_tilde(m: int, A_tilde, tol: ToleranceConfig) -> np.ndarray:
    A = default_a_tilde(m) if A_tilde is None else as_matrix(A_tilde)
    if A.shape != (m - 1, m - 1):
        raise ValueError(f"A_tilde must be {(m - 1, m - 1)}, got {A.shape}")
    if numerical_rank(A, tol) < m - 1:
        raise ValueError("A_tilde must have full rank")
    return A


def antisymmetric_partner(m: int) -> np.ndarray:
    """Unit antisymmetric vector of C^m (x) C^m orthogonal to |0i>-|i0>.

    The lowest-index such direction is (|12> - |21>)/sqrt(2).
    """
    if m < 3:
        raise ValueError("no admissible antisymmetric vector for m < 3")
    return (ket(m, m, 1, 2) - ket(m, m, 2, 1)) / np.sqrt(2)


def family_vectors(spec: FamilySpec) -> list[np.ndarray]:
    """Raw (unnormalized, untransformed) spanning vectors of a family member."""
    m, n = spec.m, spec.n
    if spec.kind == "footnote_pair":
        vecs = _footnote_vectors()
        if spec.member == 0:
            return vecs
        comp = null_space(np.conj(np.array(vecs)))
        return list(comp)
    vecs = []
    if spec.kind in ("symmetric", "general"):
        for i in range(1, m):
            vecs.append(ket(m, n, 0, i) - ket(m, n, i, 0))
        vecs.append(_psi_m(m, n, spec.a_tilde))
        if spec.kind == "general":
            for i in range(m + 1, n + 1):
                if spec.variant == "nx":
                    vecs.append(ket(m, n, 0, i - 2) - ket(m, n, 1, i - 1))
                else:
                    vecs.append(ket(m, n, 1, i - 2) - ket(m, n, 2, i - 1))
        return vecs
    # counterexample
    for i in range(1, m):
        vecs.append(ket(m, n, 0, i) - ket(m, n, i, 0))
    for i in range(m, n - 1):
        vecs.append(ket(m, n, 0, i) - ket(m, n, 1, i - 1))
    ant = antisymmetric_partner(m).reshape(m, m)
    A = np.zeros((m, n), dtype=complex)
    A[:, :m] = ant
    vecs.append(ket(m, n, 0, n - 1) - A.reshape(-1))
    return vecs


def _footnote_vectors() -> list[np.ndarray]:
    k = lambda i, j: ket(3, 4, i, j)
    return [
        k(0, 1) - k(1, 0),
        k(0, 2) - k(2, 0),
        k(0, 3) - (k(1, 2) - k(2, 1)),
        k(1, 3) - k(2, 2),
        k(1, 1) - k(2, 3),
        k(0, 0) - k(1, 3) - k(2, 1),
    ]


def build_family(spec: FamilySpec, tol: ToleranceConfig = DEFAULT_TOL) -> Subspace:
    V = make_subspace(spec.m, spec.n, family_vectors(spec), tol, family=FamilySpec(
        spec.kind, spec.m, spec.n, spec.A_tilde, spec.variant, None, spec.member))
    if spec.transform is not None:
        from .subspaces import local_transform

        V = local_transform(V, spec.transform[0], spec.transform[1], tol)
    return V


def symmetric_family(m: int, A_tilde=None, scales=None, tol: ToleranceConfig = DEFAULT_TOL) -> Subspace:
    """span{a_i|0i> - b_i|i0>, vec(0 (+) A_tilde)} in C^m (x) C^m.

    ``scales`` optionally passes (a, b) weight vectors of length m-1; the
    default a_i = b_i = 1 is the one the family metadata describes.
    """
    if m < 3:
        raise ValueError("symmetric family requires m >= 3")
    A = _check_a_tilde(m, A_tilde, tol)
    spec = FamilySpec("symmetric", m, m, None if A_tilde is None else A)
    if scales is None:
        return build_family(spec, tol)
    a, b = (np.asarray(s, dtype=complex) for s in scales)
    if a.shape != (m - 1,) or b.shape != (m - 1,) or np.any(np.abs(a) < tol.zero_tol) or np.any(np.abs(b) < tol.zero_tol):
        raise ValueError("scales must be two nonzero vectors of length m-1")
    vecs = [a[i - 1] * ket(m, m, 0, i) - b[i - 1] * ket(m, m, i, 0) for i in range(1, m)]
    vecs.append(_psi_m(m, m, A))
    return make_subspace(m, m, vecs, tol)


def general_family(m: int, n: int, variant: str = "nx", A_tilde=None, tol: ToleranceConfig = DEFAULT_TOL) -> Subspace:
    """n-dimensional family in C^m (x) C^n (3 <= m < n).

    ``variant="nx"`` uses the extra vectors |0>|i-2> - |1>|i-1>, the choice
    whose B(x) has the block form with det N = det M * (-x1)^(n-m);
    ``variant="printed"`` uses |1>|i-2> - |2>|i-1>.
    """
    if not 3 <= m < n:
        raise ValueError("general family requires 3 <= m < n")
    A = _check_a_tilde(m, A_tilde, tol)
    return build_family(FamilySpec("general", m, n, None if A_tilde is None else A, variant), tol)


def counterexample_family(m: int, n: int, tol: ToleranceConfig = DEFAULT_TOL) -> Subspace:
    if not 3 <= m < n:
        raise ValueError("counterexample family requires 3 <= m < n")
    return build_family(FamilySpec("counterexample", m, n), tol)


def footnote_pair(tol: ToleranceConfig = DEFAULT_TOL) -> tuple[Subspace, Subspace]:
    first = build_family(FamilySpec("footnote_pair", 3, 4, member=0), tol)
    second = build_family(FamilySpec("footnote_pair", 3, 4, member=1), tol)
    return first, second


def family_from_name(kind: str, m: int, n: int | None = None, variant: str = "nx", tol: ToleranceConfig = DEFAULT_TOL):
    if kind == "symmetric":
        if n is not None and n != m:
            raise ValueError("symmetric family requires n = m")
        return symmetric_family(m, tol=tol)
    if n is None:
        raise ValueError(f"{kind} family needs n")
    if kind == "general":
        return general_family(m, n, variant=variant, tol=tol)
    if kind == "counterexample":
        return counterexample_family(m, n, tol=tol)
    raise ValueError(f"unknown family {kind!r}")


@dataclass
class ExtensionStep:
    subspace: Subspace
    certificate: CesCertificate
    tries: int


def extend_ces(
    V: Subspace,
    rng=None,
    tol: ToleranceConfig = DEFAULT_TOL,
    max_tries: int = 16,
    budget: SearchBudget = SearchBudget(),
    check_input: bool = True,
) -> ExtensionStep:
    """Add one Gaussian-random direction of the complement while staying CES."""
    rng = as_rng(rng)
    cap = max_ces_dim(V.m, V.n)
    if V.dim >= cap:
        raise ValueError(f"subspace already has the maximal CES dimension {cap}")
    if check_input and not is_ces(V, tol, budget, rng).is_ces:
        raise ValueError("input subspace is not completely entangled")
    comp = V.complement(tol).basis
    best: CesCertificate | None = None
    for attempt in range(1, max_tries + 1):
        c = random_complex(rng, comp.shape[0])
        psi = c @ comp
        W = make_subspace(V.m, V.n, np.vstack([V.basis, psi]), tol)
        cert = is_ces(W, tol, budget, rng)
        if cert.is_ces:
            return ExtensionStep(W, cert, attempt)
        if best is None or cert.best_product_overlap < best.best_product_overlap:
            best = cert
    raise RuntimeError(
        f"no CES extension within {max_tries} tries (best overlap {best.best_product_overlap:.3e})"
    )


def extension_chain(V: Subspace, target: int, rng=None, tol: ToleranceConfig = DEFAULT_TOL, max_tries: int = 16,
                    budget: SearchBudget = SearchBudget()) -> list[ExtensionStep]:
    rng = as_rng(rng)
    cap = max_ces_dim(V.m, V.n)
    if target > cap:
        raise ValueError(f"target {target} exceeds the maximal CES dimension {cap}")
    steps = []
    cur = V
    while cur.dim < target:
        step = extend_ces(cur, rng, tol, max_tries, budget, check_input=not steps)
        steps.append(step)
        cur = step.subspace
    return steps
