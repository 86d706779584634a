"""The acceptance battery: one function per criterion, each returning a CriterionResult."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .constructions import (
    counterexample_family,
    extension_chain,
    family_vectors,
    footnote_pair,
    general_family,
    symmetric_family,
)
from .linalg import DEFAULT_TOL, ToleranceConfig, ket, random_complex
from .products import build_Bx, cofactor_solution, generic_solutions, raw_Bx, theorem1_assumption
from .spanning import dim_span_S1_star, has_spanning_property, kernel_contains, span_of_PV
from .subspaces import SearchBudget, is_ces, is_supported, max_ces_dim, random_ces
from .witness import CLOSED_FORM_RTOL, block_positivity_min, build_witness, product_expectation, verify_optimal

SYMMETRIC_MS = (3, 4, 5, 6)
GENERAL_PAIRS = ((3, 4), (3, 5), (4, 5), (4, 6))
COUNTER_PAIRS = ((3, 4), (3, 5), (4, 5))
EPS_GRID = (1e-3, 1e-2, 0.1)


@dataclass
class SuiteConfig:
    seed: int = 42
    tol: ToleranceConfig = DEFAULT_TOL
    samples: int | None = None  # None: 4*m*n per subspace
    eps_grid: tuple = EPS_GRID
    trials: int = 10
    starts: int = 64


@dataclass
class CriterionResult:
    key: str
    title: str
    passed: bool
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.key} {self.title}"

    def to_dict(self) -> dict:
        return {"key": self.key, "title": self.title, "passed": self.passed, "details": self.details}


def _rng(cfg: SuiteConfig, index: int) -> np.random.Generator:
    return np.random.default_rng([cfg.seed, index])


def _named_families():
    out = [(f"symmetric m={m}", symmetric_family(m)) for m in SYMMETRIC_MS]
    out += [(f"general {m}x{n}", general_family(m, n)) for m, n in GENERAL_PAIRS]
    out += [(f"counterexample {m}x{n}", counterexample_family(m, n)) for m, n in COUNTER_PAIRS]
    first, second = footnote_pair()
    out += [("footnote first", first), ("footnote second", second)]
    return out


def c1_ces_certificates(cfg: SuiteConfig) -> CriterionResult:
    rng = _rng(cfg, 1)
    rows = {}
    for name, V in _named_families():
        cert = is_ces(V, cfg.tol, SearchBudget(starts=cfg.starts), rng)
        rows[name] = {
            "is_ces": cert.is_ces,
            "overlap": cert.best_product_overlap,
            "supported": is_supported(V, cfg.tol),
            "ok": cert.is_ces and cert.best_product_overlap < 1 - 1e-6,
        }
    return CriterionResult("C1", "CES certificates for every family", all(r["ok"] for r in rows.values()), rows)


def c2_kernel_dimensions(cfg: SuiteConfig) -> CriterionResult:
    rng = _rng(cfg, 2)
    rows = {}
    cases = [(f"symmetric m={m}", symmetric_family(m), 2) for m in SYMMETRIC_MS]
    cases += [(f"general {m}x{n}", general_family(m, n), n - m + 2) for m, n in GENERAL_PAIRS]
    for name, V, expected in cases:
        rep = span_of_PV(V, cfg.samples, rng, cfg.tol)
        rows[name] = {
            "kernel_dim": rep.kernel_dim,
            "expected": expected,
            "projector_distance": rep.kernel_distance,
            "ok": rep.kernel_dim == expected and bool(rep.kernel_match),
        }
    return CriterionResult("C2", "kernel dimensions and predicted kernels", all(r["ok"] for r in rows.values()), rows)


def c3_s1_span(cfg: SuiteConfig) -> CriterionResult:
    rng = _rng(cfg, 3)
    rows = {}
    for m in (3, 4, 5):
        d = dim_span_S1_star(m, rng, cfg.tol)
        rows[f"m={m}"] = {"dim": d, "expected": (m - 1) ** 2, "ok": d == (m - 1) ** 2}
    return CriterionResult("C3", "span of conjugated S1 vectors is (m-1)^2", all(r["ok"] for r in rows.values()), rows)


def c4_counterexample_kernel(cfg: SuiteConfig) -> CriterionResult:
    rng = _rng(cfg, 4)
    rows = {}
    for m, n in ((3, 4), (3, 5)):
        rep = span_of_PV(counterexample_family(m, n, cfg.tol), cfg.samples, rng, cfg.tol)
        res = kernel_contains(rep, ket(m, n, 0, n - 1))
        rows[f"{m}x{n}"] = {"residual": res, "kernel_dim": rep.kernel_dim, "ok": res <= 1e-8}
    return CriterionResult("C4", "|0>|n-1> lies in the counterexample kernel", all(r["ok"] for r in rows.values()), rows)


def c5_witness_validity(cfg: SuiteConfig) -> CriterionResult:
    rng = _rng(cfg, 5)
    rows = {}
    for name, V in _named_families():
        wp = build_witness(V)
        bp, _ = block_positivity_min(wp.W, V.m, V.n, cfg.starts, rng, cfg.tol)
        rows[name] = {
            "min_eig_W": wp.min_eig_W,
            "block_min": bp,
            "ok": wp.min_eig_W < -1e-6 and bp >= -1e-9,
        }
    return CriterionResult("C5", "witnesses are NPT and block-positive", all(r["ok"] for r in rows.values()), rows)


def c6_optimality(cfg: SuiteConfig) -> CriterionResult:
    rng = _rng(cfg, 6)
    rows = {}
    cases = [(f"symmetric m={m}", symmetric_family(m)) for m in (3, 4)]
    cases += [(f"general {m}x{n}", general_family(m, n)) for m, n in ((3, 4), (3, 5))]
    for name, V in cases:
        wp = build_witness(V)
        rep = verify_optimal(wp, cfg.eps_grid, cfg.trials, rng, cfg.tol, cfg.samples)
        certs = rep.certificates
        a_errs = [c.closed_form_rel_err for c in certs if c.strategy == "A"]
        max_val = max((c.value for c in certs), default=float("nan"))
        max_err = max(a_errs, default=0.0)
        rows[name] = {
            "kernel_dim": int(rep.kernel.shape[0]),
            "certificates": len(certs),
            "strategy_A": len(a_errs),
            "all_negative": rep.all_negative,
            "max_value": max_val,
            "max_closed_form_rel_err": max_err,
            "ok": rep.all_negative and len(certs) > 0 and max_val < -1e-12 and max_err <= CLOSED_FORM_RTOL,
        }
    return CriterionResult("C6", "optimality: every perturbation breaks block-positivity",
                           all(r["ok"] for r in rows.values()), rows)


def _ray_distance(a: np.ndarray, b: np.ndarray) -> float:
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    phase = np.vdot(b, a)
    phase = phase / abs(phase) if abs(phase) > 0 else 1.0
    return float(np.linalg.norm(a - phase * b))


def c7_codim_one_spanning(cfg: SuiteConfig) -> CriterionResult:
    rng = _rng(cfg, 7)
    rows = {}
    ok = True
    for n in (3, 4):
        passing = spanning = 0
        worst_ray = 0.0
        for _ in range(20):
            V = random_ces(n, n, n - 1, rng, cfg.tol)
            good, _ = theorem1_assumption(V, rng=rng, tol=cfg.tol)
            if good:
                passing += 1
                spanning += has_spanning_property(V, cfg.samples, rng, cfg.tol)
        V = random_ces(n, n, n - 1, rng, cfg.tol)
        for _ in range(100):
            x = random_complex(rng, n)
            B = build_Bx(V, x)
            y_cof = cofactor_solution(B)
            y_ns = generic_solutions(V, x, cfg.tol, method="null_space")
            if len(y_ns) != 1:
                worst_ray = float("inf")
                continue
            worst_ray = max(worst_ray, _ray_distance(y_cof, y_ns[0].f))
        rows[f"n={n}"] = {"assumption_holds": passing, "spanning": spanning, "worst_ray_distance": worst_ray}
        ok &= passing == 20 and spanning == passing and worst_ray <= 1e-9
    return CriterionResult("C7", "random (n-1)-dim CESs span; cofactor rays match", ok, rows)


def c8_low_dim_spanning(cfg: SuiteConfig) -> CriterionResult:
    rng = _rng(cfg, 8)
    spanning = 0
    dims = []
    for k in range(20):
        V = random_ces(4, 4, 1 + k % 3, rng, cfg.tol)
        dims.append(V.dim)
        spanning += is_supported(V, cfg.tol) and has_spanning_property(V, cfg.samples, rng, cfg.tol)
    return CriterionResult("C8", "random supported CESs of dim <= 3 in 4x4 span", spanning == 20,
                           {"spanning": spanning, "total": 20, "dims": dims})


def c9_extension(cfg: SuiteConfig) -> CriterionResult:
    rng = _rng(cfg, 9)
    rows = {}
    for m, n in ((3, 3), (3, 4), (4, 4)):
        try:
            V0 = random_ces(m, n, 1, rng, cfg.tol)
            steps = extension_chain(V0, max_ces_dim(m, n), rng, cfg.tol, 16, SearchBudget(starts=cfg.starts))
            rows[f"{m}x{n}"] = {
                "final_dim": steps[-1].subspace.dim,
                "target": max_ces_dim(m, n),
                "tries": [s.tries for s in steps],
                "overlaps": [s.certificate.best_product_overlap for s in steps],
                "ok": steps[-1].subspace.dim == max_ces_dim(m, n) and all(s.certificate.is_ces for s in steps),
            }
        except (RuntimeError, ValueError) as exc:
            rows[f"{m}x{n}"] = {"error": str(exc), "ok": False}
    return CriterionResult("C9", "extension chains reach the maximal CES dimension",
                           all(r["ok"] for r in rows.values()), rows)


def c10_identities(cfg: SuiteConfig) -> CriterionResult:
    rng = _rng(cfg, 10)
    worst_det = 0.0
    for m, n in GENERAL_PAIRS:
        raw_n = family_vectors(general_family(m, n).family)
        raw_m = family_vectors(symmetric_family(m).family)
        for _ in range(100):
            x = random_complex(rng, m)
            dN = np.linalg.det(raw_Bx(raw_n, m, n, x))
            rhs = np.linalg.det(raw_Bx(raw_m, m, m, x)) * (-x[1]) ** (n - m)
            worst_det = max(worst_det, abs(dN - rhs) / abs(rhs))
    worst_id = 0.0
    for V in (symmetric_family(3), general_family(3, 5), counterexample_family(3, 4)):
        wp = build_witness(V)
        for _ in range(200):
            e, f = random_complex(rng, V.m), random_complex(rng, V.n)
            lhs = product_expectation(wp.W, e, f)
            rhs = product_expectation(wp.Q, e, f.conj())
            worst_id = max(worst_id, abs(lhs - rhs) / max(abs(rhs), 1e-300))
    ok = worst_det <= 1e-9 and worst_id <= 1e-10
    return CriterionResult("C10", "det N = det M (-x1)^(n-m) and <e,f|Q^G|e,f> = <e,f*|Q|e,f*>", ok,
                           {"worst_det_rel_err": worst_det, "worst_identity_rel_err": worst_id})


CRITERIA: dict[str, Callable[[SuiteConfig], CriterionResult]] = {
    "C1": c1_ces_certificates,
    "C2": c2_kernel_dimensions,
    "C3": c3_s1_span,
    "C4": c4_counterexample_kernel,
    "C5": c5_witness_validity,
    "C6": c6_optimality,
    "C7": c7_codim_one_spanning,
    "C8": c8_low_dim_spanning,
    "C9": c9_extension,
    "C10": c10_identities,
}


def run_criterion(key: str, cfg: SuiteConfig) -> CriterionResult:
    try:
        return CRITERIA[key](cfg)
    except Exception as exc:  # a crash is a failed check, not a crashed suite
        return CriterionResult(key, "error", False, {"error": f"{type(exc).__name__}: {exc}"})


def run_suite(cfg: SuiteConfig = SuiteConfig(), keys=None) -> list[CriterionResult]:
    return [run_criterion(k, cfg) for k in (keys or CRITERIA)]
