"""Verification battery behavior on good, coarse, and non-minimal meshes."""

import numpy as np

from spherevar.mesh import jitter_vertices
from spherevar.verify import run_verification

EXPECTED_CHECKS = {
    "minimality-gate",
    "moebius-norm-identity",
    "moebius-sum-identity",
    "tangential-norm-identity",
    "covariant-derivative",
    "gram-trace",
    "sum-normal-sq",
    "d2e-moebius-fields",
    "form-equivalence",
    "prop1-random",
    "prop1-eigen",
    "identity-55",
    "identity-normal",
    "mixed-gradient",
}


def test_all_checks_pass_on_clifford(clifford64):
    report = run_verification(clifford64, k=12, seed=0)
    assert report.passed, [c.name for c in report.failures]
    assert {c.name for c in report.checks} == EXPECTED_CHECKS


def test_all_checks_pass_on_sphere(sphere4):
    report = run_verification(sphere4, k=10, seed=0)
    assert report.passed, [c.name for c in report.failures]


def test_minimality_gate_short_circuits(sphere2):
    jittered = jitter_vertices(sphere2, 0.05, seed=1)
    report = run_verification(jittered)
    assert not report.passed
    assert len(report.checks) == 1
    assert report.checks[0].name == "minimality-gate"


def test_coarse_mesh_algebraic_checks_still_pass(clifford16):
    # discretization-limited checks may fail at res=16; algebraic ones cannot
    report = run_verification(clifford16, k=8, seed=0)
    algebraic = [c for c in report.checks if c.provenance == "algebraic"]
    assert algebraic and all(c.passed for c in algebraic)


def test_report_serializes_with_provenance(sphere4):
    report = run_verification(sphere4, k=8, seed=0)
    payload = report.to_dict()
    assert payload["pass"] is True
    for entry in payload["checks"]:
        assert {"name", "error", "tolerance", "pass", "provenance"} <= set(entry)
        assert entry["provenance"] in ("algebraic", "oracle", "theorem")


def test_report_deterministic(clifford16):
    a = run_verification(clifford16, k=8, seed=0)
    b = run_verification(clifford16, k=8, seed=0)
    for ca, cb in zip(a.checks, b.checks):
        assert ca.name == cb.name
        assert np.isclose(ca.error, cb.error, rtol=0, atol=1e-12)
        assert ca.passed == cb.passed
