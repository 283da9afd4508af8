"""Command-line interface: catalog | spectrum | verify | index | certificate.

Configuration precedence: command-line flags > key=value config file >
built-in defaults. Exit codes: 0 success / all checks pass, 1 verification
failure, 2 usage or configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .catalog import CATALOG, build_by_name, minimality_residual
from .certificates import build_certificate, el_soufi_lower_bound_check, threshold
from .errors import (
    ContractError,
    MeshError,
    ParameterError,
    SolverError,
    UnsupportedSurfaceError,
)
from .mesh import contained_in_geodesic_s2, mesh_size, read_off
from .operators import (
    assemble_mass,
    assemble_stiffness,
    eigen_clusters,
    solve_smallest_eigenpairs,
    write_spectrum_csv,
)
from .secondvar import (
    area_jacobi_matrix,
    ejiri_micallef_r,
    energy_quadratic_matrix,
    negative_index_count,
)
from .verify import run_verification

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

DEFAULTS = {
    "surface": "clifford-torus",
    "n": None,
    "res": None,
    "k": 8,
    "delta": 0.1,
    "seed": 0,
    "tol": 0.02,
    "out": None,
    "synthetic_lambda": None,
}

_CASTS = {
    "surface": str,
    "n": int,
    "res": int,
    "k": int,
    "delta": float,
    "seed": int,
    "tol": float,
    "out": str,
    "synthetic_lambda": float,
}


def load_config_file(path):
    """Parse a flat key=value config file (''#'' comments, blank lines ok)."""
    values = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ParameterError(f"cannot read config file {path!r}: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, val = line.partition("=")
        key = key.strip().replace("-", "_")
        if key not in _CASTS:
            raise ParameterError(f"{path}:{lineno}: unknown config key {key!r}")
        try:
            values[key] = _CASTS[key](val.strip())
        except ValueError as exc:
            raise ParameterError(f"{path}:{lineno}: bad value for {key}: {exc}") from exc
    return values


def resolve_config(args):
    """Merge flags over config file over defaults into one namespace dict."""
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        cfg.update(load_config_file(args.config))
    for key in DEFAULTS:
        flag = getattr(args, key, None)
        if flag is not None:
            cfg[key] = flag
    return cfg


def build_surface(cfg):
    """Build a catalog surface or load a mesh file, per the surface value."""
    name = cfg["surface"]
    if os.path.sep in name or name.endswith(".off") or os.path.isfile(name):
        mesh = read_off(name)
        if cfg["n"] is not None and cfg["n"] != mesh.n:
            raise ParameterError(
                f"--n {cfg['n']} conflicts with mesh file dimension n={mesh.n}")
        return mesh
    return build_by_name(name, n=cfg["n"], res=cfg["res"])


def _write_json(report, out):
    text = json.dumps(report, indent=2)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_catalog(args):
    for entry in CATALOG.values():
        print(f"{entry.name}")
        print(f"  {entry.description}")
        known = []
        if entry.area is not None:
            known.append(f"area={entry.area:.6f}")
        if entry.lambda1 is not None:
            known.append(f"lambda1={entry.lambda1} (mult {entry.lambda1_multiplicity})")
        if entry.normsq_A is not None:
            known.append(f"|A|^2={entry.normsq_A}")
        if entry.expected_index_area is not None:
            known.append(f"ind_A={entry.expected_index_area}")
        if entry.expected_index_energy is not None:
            known.append(f"ind_E={entry.expected_index_energy}")
        known.append(f"in_geodesic_s2={entry.in_geodesic_s2}")
        print("  known: " + ", ".join(known))
        print(f"  provenance: {entry.provenance}")
    return EXIT_OK


def cmd_spectrum(args):
    cfg = resolve_config(args)
    if cfg["k"] < 1:
        raise ParameterError(f"k={cfg['k']} must be at least 1")
    mesh = build_surface(cfg)
    S = assemble_stiffness(mesh)
    M = assemble_mass(mesh, "consistent")
    pairs = solve_smallest_eigenpairs(S, M, k=cfg["k"], seed=cfg["seed"])
    out = cfg["out"] or "spectrum.csv"
    write_spectrum_csv(pairs, out)
    clusters = eigen_clusters(pairs)
    nonzero = [c for c in clusters if pairs[c[0]].lam > 1e-6]
    print(f"surface={mesh.name} n={mesh.n} V={mesh.num_vertices} h={mesh_size(mesh):.4f}")
    print(f"wrote {len(pairs)} eigenpairs to {out}")
    if nonzero:
        first = nonzero[0]
        lam1 = float(np.mean([pairs[j].lam for j in first]))
        thr = threshold(mesh.n) if mesh.n >= 3 else float("nan")
        rel = "<" if lam1 < thr else ">="
        print(f"lambda1 = {lam1:.6f} (multiplicity {len(first)})")
        print(f"threshold (n-2)/(2n) = {thr:.6f}; lambda1 {rel} threshold")
    else:
        print("no nonzero eigenvalue resolved; increase k")
    return EXIT_OK


def cmd_verify(args):
    cfg = resolve_config(args)
    mesh = build_surface(cfg)
    report = run_verification(mesh, tol=cfg["tol"], seed=cfg["seed"], k=cfg["k"])
    for c in report.checks:
        status = "PASS" if c.passed else "FAIL"
        print(f"{status:4s} {c.name:28s} err={c.error:.3e} tol={c.tolerance:.3e} "
              f"[{c.provenance}]")
    _write_json(report.to_dict(), cfg["out"])
    if not report.passed:
        names = ", ".join(c.name for c in report.failures)
        print(f"verification FAILED: {names}", file=sys.stderr)
        return EXIT_VERIFICATION
    print("verification passed")
    return EXIT_OK


def cmd_index(args):
    cfg = resolve_config(args)
    mesh = build_surface(cfg)
    delta = cfg["delta"]
    report = {
        "surface": mesh.name,
        "n": mesh.n,
        "num_vertices": mesh.num_vertices,
        "mesh_size": mesh_size(mesh),
        "delta": delta,
        "counts": {},
    }

    energy = negative_index_count(energy_quadratic_matrix(mesh),
                                  delta=delta, seed=cfg["seed"])
    report["counts"]["energy"] = {
        "count": energy.count,
        "negatives": [float(v) for v in energy.negatives],
        "near_zero": [float(v) for v in energy.near_zero],
        "provenance": "shift-invert Lanczos on the frame-coordinate energy pencil",
    }
    print(f"energy index: {energy.count} "
          f"(negatives {np.round(energy.negatives, 4).tolist()})")

    B, negdef, claim_valid = el_soufi_lower_bound_check(mesh)
    lower = mesh.n + 1
    report["el_soufi"] = {
        "moebius_energy_matrix_eigenvalues":
            [float(v) for v in np.linalg.eigvalsh(B)],
        "negative_definite": negdef,
        "claim_valid": claim_valid,
        "lower_bound": lower if claim_valid else None,
        "provenance": "energy form on the Moebius-field span",
    }
    if claim_valid:
        ok = negdef and energy.count >= lower
        print(f"lower bound ind_E >= {lower}: "
              f"{'pass' if ok else 'FAIL'} (Moebius span negative definite: {negdef})")
        report["el_soufi"]["pass"] = ok
    else:
        print("lower bound not claimed (surface lies in a geodesic S^2)")

    area_count = None
    try:
        area = negative_index_count(area_jacobi_matrix(mesh),
                                    delta=delta, seed=cfg["seed"])
        area_count = area.count
        report["counts"]["area_jacobi"] = {
            "count": area.count,
            "negatives": [float(v) for v in area.negatives],
            "near_zero": [float(v) for v in area.near_zero],
            "provenance": "scalar Jacobi pencil with analytic |A|^2",
        }
        print(f"area Jacobi index: {area.count} "
              f"(negatives {np.round(area.negatives, 4).tolist()})")
    except UnsupportedSurfaceError as exc:
        report["counts"]["area_jacobi"] = {"skipped": str(exc)}
        print(f"area Jacobi index skipped: {exc}")

    if area_count is not None and mesh.genus is not None:
        r = ejiri_micallef_r(mesh.genus, 0)
        ok = energy.count <= area_count <= energy.count + r.value
        report["bracket"] = {
            "ind_E": energy.count,
            "ind_A": area_count,
            "r": r.value,
            "cases": list(r.cases),
            "pass": ok,
            "provenance": "index gap bound r(genus, branch points)",
        }
        print(f"bracket ind_E <= ind_A <= ind_E + r(g={mesh.genus}, b=0): "
              f"{energy.count} <= {area_count} <= {energy.count + r.value} "
              f"-> {'pass' if ok else 'FAIL'}")

    _write_json(report, cfg["out"])
    return EXIT_OK


def cmd_certificate(args):
    cfg = resolve_config(args)
    mesh = build_surface(cfg)
    report = build_certificate(mesh, k=cfg["k"], seed=cfg["seed"],
                               synthetic_lambda=cfg["synthetic_lambda"])
    payload = report.to_dict()
    payload["tolerances"] = {
        "orthogonality_residual": 1e-8,
        "provenance": "projection coefficients from the Moebius Gram system",
    }
    print(f"surface={report.surface} lambda1={report.lambda1:.6f} "
          f"(mult {report.multiplicity}) threshold={report.threshold:.6f}")
    print(f"hypothesis lambda1 < threshold: {report.hypothesis_met}"
          + (" [synthetic]" if report.synthetic else ""))
    print(f"selected i0={report.i0}, D2E on projected field = {report.d2e_value:.6f}, "
          f"verdict: {report.verdict}")
    print(f"max orthogonality residual = {float(np.max(report.orthogonality_residuals)):.3e}")
    _write_json(payload, cfg["out"])
    return EXIT_OK


def _add_common(p):
    p.add_argument("--surface", help="catalog name or mesh file path")
    p.add_argument("--n", type=int, help="ambient sphere dimension")
    p.add_argument("--res", type=int, help="mesh resolution (catalog semantics)")
    p.add_argument("--k", type=int, help="number of eigenpairs")
    p.add_argument("--delta", type=float, help="negative-eigenvalue separation")
    p.add_argument("--seed", type=int, help="random seed")
    p.add_argument("--tol", type=float, help="discretization tolerance")
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--out", help="output path (CSV or JSON)")
    p.add_argument("--synthetic-lambda", dest="synthetic_lambda", type=float,
                   help="override the first eigenvalue (plumbing exercise)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="spherevar",
        description="Second-variation toolkit for minimal surfaces in round spheres")
    sub = parser.add_subparsers(dest="command", required=True)
    commands = {
        "catalog": (cmd_catalog, "list catalog surfaces with known data"),
        "spectrum": (cmd_spectrum, "solve the Laplace spectrum, write CSV"),
        "verify": (cmd_verify, "run the identity verification battery"),
        "index": (cmd_index, "count negative directions of the quadratic forms"),
        "certificate": (cmd_certificate, "run the certificate pipeline"),
    }
    for name, (fn, help_text) in commands.items():
        p = sub.add_parser(name, help=help_text)
        if name != "catalog":
            _add_common(p)
        p.set_defaults(func=fn)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses exit code 2 for usage errors already
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ParameterError, UnsupportedSurfaceError, MeshError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SolverError, ContractError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
