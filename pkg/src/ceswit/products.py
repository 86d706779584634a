"""Product vectors e (x) f in the orthogonal complement of a subspace V.

Three routes are provided:

* ``generic_solutions``: for a given x solve B(x) y = 0, with the cofactor
  formula when B(x) is (n-1) x n.
* ``enumerate_class``: closed-form parametrized classes of the constructed
  families (tags by defining condition: S1 x0 = 0, S2 zero quadratic form,
  S3/S4 x1 = 0, S5 x0 = x1 = 0).
* ``harvest_solutions``: numerical search plus Gauss-Newton polishing, for
  subspaces with neither a closed form nor generic solutions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    ToleranceConfig,
    as_vector,
    basis_vector,
    encode_vector,
    local_projection,
    null_space,
    numerical_rank,
    product_overlap_search,
    random_complex,
)
from .subspaces import Subspace, as_rng

RESIDUAL_BOUND = 1e-9
CLASS_TAGS = ("S1", "S2", "S3", "S4", "S5", "generic")


@dataclass
class ProductVector:
    e: np.ndarray
    f: np.ndarray
    class_tag: str = "generic"
    params: dict = field(default_factory=dict)
    residual: float = float("nan")

    @property
    def vector(self) -> np.ndarray:
        return np.kron(self.e, self.f)

    def to_dict(self) -> dict:
        return {
            "e": encode_vector(self.e),
            "f": encode_vector(self.f),
            "class": self.class_tag,
            "residual": float(self.residual),
        }


def product_residual(V: Subspace, e, f) -> float:
    """max_i |<Psi_i|e (x) f>| for unit-normalized e and f."""
    e = as_vector(e, V.m)
    f = as_vector(f, V.n)
    e = e / np.linalg.norm(e)
    f = f / np.linalg.norm(f)
    return float(np.max(np.abs(np.einsum("dkl,k,l->d", V.matrices.conj(), e, f)), initial=0.0))


def make_product(V: Subspace, e, f, tag: str, params: dict | None = None,
                 tol: ToleranceConfig = DEFAULT_TOL, bound: float = RESIDUAL_BOUND) -> ProductVector:
    e = as_vector(e, V.m)
    f = as_vector(f, V.n)
    ne, nf = np.linalg.norm(e), np.linalg.norm(f)
    if ne < tol.zero_tol or nf < tol.zero_tol:
        raise ValueError("product vector factors must be nonzero")
    res = product_residual(V, e, f)
    if res > bound:
        raise ValueError(f"{tag} product vector is not orthogonal to V (residual {res:.2e})")
    return ProductVector(e / ne, f / nf, tag, dict(params or {}), res)


def build_Bx(V: Subspace, x) -> np.ndarray:
    """Row i is the linear form y -> <Psi_i|x (x) y>."""
    x = as_vector(x, V.m)
    return np.einsum("k,dkl->dl", x, V.matrices.conj())


def raw_Bx(vectors, m: int, n: int, x) -> np.ndarray:
    """Same as build_Bx but on an explicit (unnormalized) vector list."""
    A = np.asarray(vectors, dtype=complex).reshape(-1, m, n)
    return np.einsum("k,dkl->dl", as_vector(x, m), A.conj())


def det_condition(V: Subspace, x) -> complex:
    """det M(x) = x0^(m-2) <x*|A_m*|x> for the symmetric family.

    M(x) has rows (x_i, 0, .., -x0, .., 0) for i < m and last row
    <x*|A_m*|j>; B(x) on the unnormalized family vectors has
    det B = (-1)^(m-1) det M.
    """
    fam = V.family
    if fam is None or fam.kind != "symmetric" or fam.transform is not None:
        raise ValueError("det_condition needs an untransformed symmetric family")
    m = V.m
    x = as_vector(x, m)
    q = x[1:] @ fam.a_tilde.conj() @ x[1:]
    return complex(x[0] ** (m - 2) * q)


def cofactor_solution(B: np.ndarray) -> np.ndarray:
    """y_i = (-1)^i det(B with column i removed) for an (n-1) x n matrix."""
    d, n = B.shape
    if d != n - 1:
        raise ValueError("cofactor formula needs an (n-1) x n matrix")
    return np.array([(-1) ** i * np.linalg.det(np.delete(B, i, axis=1)) for i in range(n)])


def generic_solutions(V: Subspace, x, tol: ToleranceConfig = DEFAULT_TOL, method: str = "auto") -> list[ProductVector]:
    """All f with x (x) f orthogonal to V.

    ``method="auto"`` uses the cofactor formula when B(x) is (n-1) x n of full
    rank, otherwise the null space.
    """
    x = as_vector(x, V.m)
    if np.linalg.norm(x) < tol.zero_tol:
        raise ValueError("x must be nonzero")
    B = build_Bx(V, x)
    d, n = B.shape
    if method not in ("auto", "cofactor", "null_space"):
        raise ValueError(f"unknown method {method!r}")
    use_cof = method == "cofactor" or (method == "auto" and d == n - 1 and numerical_rank(B, tol) == d)
    out = []
    if use_cof:
        y = cofactor_solution(B)
        if np.linalg.norm(y) > tol.zero_tol * max(1.0, np.linalg.norm(B)) ** d:
            out.append(make_product(V, x, y, "generic", {"x": x, "method": "cofactor"}, tol))
        return out
    for y in null_space(B, tol):
        out.append(make_product(V, x, y, "generic", {"x": x, "method": "null_space"}, tol))
    return out


def theorem1_assumption(V: Subspace, trials: int = 16, rng=None, tol: ToleranceConfig = DEFAULT_TOL):
    """Is Pi_V(x) of full possible rank min(dim V, n) for some sampled x?"""
    rng = as_rng(rng)
    target = min(V.dim, V.n)
    x = None
    for _ in range(trials):
        x = random_complex(rng, V.m)
        if numerical_rank(local_projection(V, x), tol) == target:
            return True, x
    return False, x


# closed-form solution classes


@dataclass(frozen=True)
class SolutionClassSpec:
    family: object  # FamilySpec
    class_tag: str
    description: str
    degenerate: bool = False


def solution_classes(family) -> list[SolutionClassSpec]:
    """Closed-form classes whose union is every product vector of the complement."""
    if family is None:
        return []
    m = family.m
    if family.kind == "symmetric":
        return [
            SolutionClassSpec(family, "S1", "(0,x~) (x) (0,y~) with x~^T conj(A~) y~ = 0"),
            SolutionClassSpec(family, "S2", "(1,x~) (x) (1,x~) with x~^T conj(A~) x~ = 0"),
        ]
    if family.kind == "general" and family.variant == "nx":
        return [
            SolutionClassSpec(family, "S1", "(0,x~), x1 != 0  (x)  (0,y~,0) with x~^T conj(A~) y~ = 0"),
            SolutionClassSpec(family, "S2", "(1,x~) with x~^T conj(A~) x~ = 0  (x)  (1,x~) + x_{m-1}(t,...,t^(n-m)), t = 1/x1"),
            SolutionClassSpec(
                family, "S3",
                "(1,0,x2..x_{m-2},0) with zero quadratic form  (x)  y0 x + s|n-1>",
                degenerate=m <= 4,
            ),
            SolutionClassSpec(family, "S4", "(1,0,x2,...,x_{m-1})  (x)  |n-1>"),
            SolutionClassSpec(family, "S5", "(0,0,x2,...,x_{m-1})  (x)  (0,y~,y'') with x~^T conj(A~) y~ = 0"),
        ]
    return []


def _quadratic_root(Aq: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Random nonzero z with z^T Aq z = 0 (Aq square, size >= 2)."""
    k = Aq.shape[0]
    S = Aq + Aq.T
    if numerical_rank(S) <= 1:
        # a perfect square (c^T z)^2: solve the linear condition, avoiding a double root
        K = null_space(S)
        return random_complex(rng, K.shape[0]) @ K
    u, v = random_complex(rng, k), random_complex(rng, k)
    a = v @ Aq @ v
    b = u @ S @ v
    c = u @ Aq @ u
    if abs(a) < 1e-14:
        s = -c / b
    else:
        roots = np.roots([a, b, c])
        s = roots[rng.integers(len(roots))]
    return u + s * v


def _solve_s1(x_tilde: np.ndarray, Ac: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Random y~ with x~^T Ac y~ = 0."""
    row = (x_tilde @ Ac)[None, :]
    K = null_space(row)
    return random_complex(rng, K.shape[0]) @ K


def class_vector(family, tag: str, rng: np.random.Generator, params: dict | None = None):
    """One (e, f, params) sample of a class on the untransformed family."""
    m, n = family.m, family.n
    Ac = family.a_tilde.conj()
    params = dict(params or {})
    if tag == "S1":
        xt = as_vector(params.get("x_tilde", random_complex(rng, m - 1)), m - 1)
        yt = params.get("y_tilde")
        yt = _solve_s1(xt, Ac, rng) if yt is None else as_vector(yt, m - 1)
        e = np.concatenate([[0], xt])
        f = np.zeros(n, dtype=complex)
        f[1:m] = yt
        return e, f, {"x_tilde": xt, "y_tilde": yt}
    if tag == "S2":
        xt = params.get("x_tilde")
        xt = _quadratic_root(Ac, rng) if xt is None else as_vector(xt, m - 1)
        e = np.concatenate([[1], xt])
        if family.kind == "symmetric":
            return e, e.copy(), {"x_tilde": xt}
        t = 1 / xt[0]
        tail = xt[-1] * t ** np.arange(1, n - m + 1)
        return e, np.concatenate([e, tail]), {"x_tilde": xt, "t": t}
    if tag == "S3":
        inner = np.zeros(0, dtype=complex)
        if m - 3 >= 2:
            inner = _quadratic_root(Ac[1:m - 2, 1:m - 2], rng)
        elif m - 3 == 1 and abs(Ac[1, 1]) < 1e-14:
            inner = random_complex(rng, 1)
        elif m - 3 == 1:
            inner = np.zeros(1, dtype=complex)
        x = np.concatenate([[1, 0], inner, [0]]) if m > 3 else np.array([1, 0, 0], dtype=complex)
        y0, s = params.get("y0", random_complex(rng)), params.get("s", random_complex(rng))
        f = np.zeros(n, dtype=complex)
        f[:m] = y0 * x
        f[n - 1] += s
        return x, f, {"y0": y0, "s": s, "degenerate_e": not np.any(np.abs(inner) > 0)}
    if tag == "S4":
        x = np.concatenate([[1, 0], random_complex(rng, m - 2)])
        return x, basis_vector(n, n - 1).astype(complex), {"x": x}
    if tag == "S5":
        xt = np.concatenate([[0], random_complex(rng, m - 2)])
        yt = _solve_s1(xt, Ac, rng)
        f = np.concatenate([[0], yt, random_complex(rng, n - m)])
        return np.concatenate([[0], xt]), f, {"x_tilde": xt}
    raise ValueError(f"unknown class tag {tag!r}")


def enumerate_class(spec: SolutionClassSpec, count: int, rng=None, V: Subspace | None = None,
                    tol: ToleranceConfig = DEFAULT_TOL) -> list[ProductVector]:
    """Seeded samples of one class, each checked against V."""
    from .constructions import build_family

    rng = as_rng(rng)
    fam = spec.family
    if spec.class_tag not in {c.class_tag for c in solution_classes(fam)}:
        raise ValueError(f"class {spec.class_tag} is not available for the {fam.kind} family")
    if V is None:
        V = build_family(fam, tol)
    T = fam.transform
    if T is not None:
        Ainv = np.linalg.inv(T[0]).conj().T
        Binv = np.linalg.inv(T[1]).conj().T
    out = []
    for _ in range(count):
        e, f, params = class_vector(fam, spec.class_tag, rng)
        if T is not None:
            e, f = Ainv @ e, Binv @ f
        out.append(make_product(V, e, f, spec.class_tag, params, tol))
    return out


def enumerate_all_classes(V: Subspace, count: int, rng=None, tol: ToleranceConfig = DEFAULT_TOL) -> list[ProductVector]:
    rng = as_rng(rng)
    out = []
    for spec in solution_classes(V.family):
        out.extend(enumerate_class(spec, count, rng, V, tol))
    return out


# numerical harvest


def polish_product(V: Subspace, e, f, iterations: int = 40, target: float = 1e-14):
    """Gauss-Newton on g_i(e, f) = <Psi_i|e (x) f> with minimum-norm steps."""
    Ac = V.matrices.conj()
    e = as_vector(e, V.m) / np.linalg.norm(e)
    f = as_vector(f, V.n) / np.linalg.norm(f)
    res = np.inf
    for _ in range(iterations):
        g = np.einsum("dkl,k,l->d", Ac, e, f)
        res = float(np.max(np.abs(g), initial=0.0))
        if res < target:
            break
        J = np.hstack([np.einsum("dkl,l->dk", Ac, f), np.einsum("dkl,k->dl", Ac, e)])
        step = np.linalg.lstsq(J, -g, rcond=None)[0]
        e = e + step[: V.m]
        f = f + step[V.m:]
        e /= np.linalg.norm(e)
        f /= np.linalg.norm(f)
    return e, f, res


def _line_seeds(V: Subspace, rng: np.random.Generator, lines: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Points of {x : B(x) singular} on random lines, for square B(x)."""
    import scipy.linalg

    seeds = []
    for _ in range(lines):
        a, b = random_complex(rng, V.m), random_complex(rng, V.m)
        w = scipy.linalg.eig(build_Bx(V, a), -build_Bx(V, b), right=False)
        for t in w[np.isfinite(w)]:
            if abs(t) > 1e6:
                continue
            x = a + t * b
            _, _, Vh = np.linalg.svd(build_Bx(V, x))
            seeds.append((x, Vh[-1].conj()))
    return seeds


def harvest_solutions(V: Subspace, count: int, rng=None, tol: ToleranceConfig = DEFAULT_TOL,
                      starts: int = 64, iterations: int = 300) -> list[ProductVector]:
    """Numerically located product vectors of the complement (approximate route)."""
    rng = as_rng(rng)
    seeds = []
    if V.dim == V.n:
        seeds.extend(_line_seeds(V, rng, max(1, count // max(1, V.m))))
    vals, E, F = product_overlap_search(V.matrices, np.ones(V.dim), rng, starts=starts,
                                        iterations=iterations, maximize=False)
    seeds.extend((E[i], F[i]) for i in np.argsort(vals) if vals[i] < 1e-6)
    out = []
    for e, f in seeds:
        e, f, res = polish_product(V, e, f)
        if res <= RESIDUAL_BOUND * 1e-1:
            out.append(make_product(V, e, f, "generic", {"route": "harvest"}, tol))
        if len(out) >= count:
            break
    return out
