#!/usr/bin/env python3
"""Run the identity verification battery on both catalog surfaces.

Usage: python3 scripts/run_verify.py [--res-torus 64] [--res-sphere 4]
"""

import argparse
import sys

from spherevar.catalog import build_clifford_torus, build_equatorial_sphere
from spherevar.verify import run_verification


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--res-torus", type=int, default=64)
    ap.add_argument("--res-sphere", type=int, default=4)
    ap.add_argument("--tol", type=float, default=0.02)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    failed = False
    meshes = [build_clifford_torus(args.res_torus),
              build_equatorial_sphere(3, args.res_sphere)]
    for mesh in meshes:
        report = run_verification(mesh, tol=args.tol, seed=args.seed)
        print(f"== {report.surface} (n={report.n}, h={report.mesh_size:.4f}) ==")
        for c in report.checks:
            mark = "PASS" if c.passed else "FAIL"
            print(f"  {mark} {c.name:28s} err={c.error:.3e} tol={c.tolerance:.3e}")
        failed = failed or not report.passed
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
