"""Kernel of span P_V for the general family over a range of (m, n), both variants.

Prints the computed kernel dimension next to n - m + 2 and the projector
distance to the predicted kernel, plus which predicted vectors are actually
contained. The printed variant has no closed-form classes, so its rows
rest on numerically harvested product vectors.

    python3 scripts/kernel_scan.py --max-n 7
"""

import argparse

import numpy as np

from ceswit.constructions import general_family
from ceswit.spanning import kernel_contains, span_of_PV


def omega(length, m):
    w = np.zeros(length)
    w[1:m] = 1
    return w


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-n", type=int, default=7)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    print(f"{'variant':8} {'m':>2} {'n':>2} {'kernel':>6} {'claim':>5} {'dist':>8} {'route':>8}  contained")
    for variant in ("nx", "printed"):
        for m in range(3, args.max_n):
            for n in range(m + 1, args.max_n + 1):
                V = general_family(m, n, variant=variant)
                rep = span_of_PV(V, rng=rng)
                e0m, e0n = np.eye(m)[0], np.eye(n)[0]
                named = {"|0>|w>": np.kron(e0m, omega(n, m)), "|w>|0>": np.kron(omega(m, m), e0n)}
                for j in range(m, n):
                    named[f"|w>|{j}>"] = np.kron(omega(m, m), np.eye(n)[j])
                inside = [k for k, v in named.items() if kernel_contains(rep, v) <= 1e-8]
                print(f"{variant:8} {m:>2} {n:>2} {rep.kernel_dim:>6} {n - m + 2:>5} "
                      f"{rep.kernel_distance:>8.3f} {'harvest' if rep.approximate else 'classes':>8}  {' '.join(inside) or '-'}")


if __name__ == "__main__":
    main()
