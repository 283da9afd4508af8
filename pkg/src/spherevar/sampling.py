"""Seeded smooth test data: random low-degree functions and tangent fields.

Band-limited means low-degree polynomials in the ambient coordinates
restricted to the surface, so the fields are smooth at every mesh scale and
independent of any eigensolve.
"""

from __future__ import annotations

import numpy as np


def random_polynomial_scalar(mesh, rng, degree=2):
    """Random polynomial c0 + sum c_i x_i + sum c_ij x_i x_j at the vertices."""
    x = mesh.vertices
    d = mesh.n + 1
    f = rng.standard_normal() * np.ones(mesh.num_vertices)
    if degree >= 1:
        f = f + x @ rng.standard_normal(d)
    if degree >= 2:
        C = rng.standard_normal((d, d))
        f = f + np.einsum("vi,ij,vj->v", x, C, x)
    return f


def random_bandlimited_field(mesh, rng, terms=3, degree=2):
    """Random sphere-tangent field sum_m f_m(x) * xi_{v_m}(x)."""
    from .mobius import moebius_field

    X = np.zeros_like(mesh.vertices)
    d = mesh.n + 1
    for _ in range(terms):
        v = rng.standard_normal(d)
        f = random_polynomial_scalar(mesh, rng, degree=degree)
        X += f[:, None] * moebius_field(mesh, v)
    return X


def random_unit_direction(rng, d):
    v = rng.standard_normal(d)
    return v / np.linalg.norm(v)
