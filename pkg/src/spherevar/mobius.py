"""Moebius vector fields xi_v(x) = v - <v,x> x and tangent/normal splits.

These are the gradients of the ambient linear coordinates restricted to the
sphere; they span the explicit negative directions of the energy second
variation. All pointwise algebra (|xi_v|^2 = |v|^2 - <v,x>^2 etc.) holds to
machine precision regardless of mesh quality; only the split against the
surface tangent plane carries discretization error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractError, MeshError
from .mesh import surface_tangent_frames
from .operators import integrate, surface_gradient, vertex_weights

SPHERE_TANGENCY_TOL = 1e-10
GRAM_SINGULAR_REL = 1e-12


def moebius_field(mesh, v):
    """Tangent field v - <v,x> x per vertex; linear in v. Shape (V, n+1)."""
    v = np.asarray(v, dtype=float)
    if v.shape != (mesh.n + 1,):
        raise ContractError(f"direction vector must have length {mesh.n + 1}")
    x = mesh.vertices
    return v[None, :] - (x @ v)[:, None] * x


def moebius_basis(mesh):
    """All n+1 coordinate Moebius fields, shape (n+1, V, n+1)."""
    d = mesh.n + 1
    return np.stack([moebius_field(mesh, np.eye(d)[i]) for i in range(d)])


def check_sphere_tangent(mesh, X, tol=SPHERE_TANGENCY_TOL):
    X = np.asarray(X, dtype=float)
    if X.shape != mesh.vertices.shape:
        raise ContractError("tangent field must have shape (V, n+1)")
    radial = np.abs(np.einsum("vd,vd->v", X, mesh.vertices))
    scale = np.maximum(np.linalg.norm(X, axis=1), 1.0)
    worst = float(np.max(radial / scale))
    if worst > tol:
        raise ContractError(f"field is not sphere-tangent (radial part {worst:.3e})")
    return X


@dataclass
class SplitField:
    """Orthogonal decomposition of a sphere-tangent field along the surface."""

    tangential: np.ndarray   # (V, n+1), in the discrete tangent plane of Sigma
    normal: np.ndarray       # (V, n+1), sphere-tangent and Sigma-normal


def split_tangent_normal(mesh, X, frames=None):
    """Project X onto the discrete tangent plane; the rest is the normal part."""
    X = check_sphere_tangent(mesh, X)
    if frames is None:
        frames = surface_tangent_frames(mesh)
    if frames.shape[0] != mesh.num_vertices:
        raise MeshError("tangent frames do not match the mesh")
    coeff = np.einsum("vkd,vd->vk", frames, X)
    tangential = np.einsum("vkd,vk->vd", frames, coeff)
    return SplitField(tangential=tangential, normal=X - tangential)


def field_inner(weights, X, Y):
    """L2 inner product int X . Y dmu, pointwise dot against the vertex weights.

    Using the barycentric quadrature keeps the algebraic Moebius identities
    (Gram integrand, trace) exact up to rounding.
    """
    return float(np.einsum("v,vd,vd->", weights, X, Y))


def field_norm(weights, X):
    return float(np.sqrt(max(field_inner(weights, X, X), 0.0)))


def moebius_gram(mesh, weights=None):
    """(n+1)x(n+1) matrix of int xi_i . xi_j dmu."""
    if weights is None:
        weights = vertex_weights(mesh)
    basis = moebius_basis(mesh)
    d = mesh.n + 1
    G = np.empty((d, d))
    for i in range(d):
        for j in range(i, d):
            G[i, j] = G[j, i] = field_inner(weights, basis[i], basis[j])
    return G


def project_orthogonal_to_moebius(mesh, X, weights=None, gram=None, basis=None):
    """Remove the Moebius components: X_perp = X - sum_j a_j xi_j.

    Coefficients solve G a = (int X . xi_j)_j; a singular Gram matrix falls
    back to least squares and sets the warning flag. Returns
    (X_perp, a, residuals, degenerate_gram) with residuals normalized by
    ||X||_{L2} ||xi_j||_{L2}.
    """
    if weights is None:
        weights = vertex_weights(mesh)
    if basis is None:
        basis = moebius_basis(mesh)
    if gram is None:
        gram = moebius_gram(mesh, weights=weights)
    X = check_sphere_tangent(mesh, X)
    b = np.array([field_inner(weights, X, xi) for xi in basis])
    evals = np.linalg.eigvalsh(gram)
    degenerate = bool(evals[0] <= GRAM_SINGULAR_REL * max(evals[-1], 1.0))
    if degenerate:
        a, *_ = np.linalg.lstsq(gram, b, rcond=None)
    else:
        a = np.linalg.solve(gram, b)
    X_perp = X - np.einsum("j,jvd->vd", a, basis)
    norm_x = max(field_norm(weights, X_perp), np.finfo(float).tiny)
    residuals = np.array([
        abs(field_inner(weights, X_perp, xi))
        / (norm_x * max(field_norm(weights, xi), np.finfo(float).tiny))
        for xi in basis
    ])
    return X_perp, a, residuals, degenerate


def pointwise_identity_report(mesh, frames=None):
    """Max pointwise errors of the Moebius-field identities, per coordinate.

    Returns a dict with, for each coordinate index i:
      norm_sq       | |xi_i|^2 - (1 - x_i^2) |            (algebraic, ~machine)
      tangential_sq | |xi_i^T|^2 - |grad x_i|^2 |          (discretization)
      covariant     | FD of xi_i along an edge + x_i * edge | / |edge|
    plus the aggregate sum_sq error | sum_i |xi_i|^2 - n |.
    """
    x = mesh.vertices
    d = mesh.n + 1
    if frames is None:
        frames = surface_tangent_frames(mesh)
    basis = moebius_basis(mesh)
    tri = mesh.faces
    centroid = x[tri].mean(axis=1)
    centroid /= np.linalg.norm(centroid, axis=1, keepdims=True)

    # unique undirected edges with their unit-sphere midpoints
    e = np.concatenate([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [2, 0]]])
    e = np.unique(np.sort(e, axis=1), axis=0)
    p, q = x[e[:, 0]], x[e[:, 1]]
    mid = 0.5 * (p + q)
    mid_hat = mid / np.linalg.norm(mid, axis=1, keepdims=True)
    edge = q - p
    edge_len = np.linalg.norm(edge, axis=1)

    report = {}
    norm_sq_all = np.zeros(mesh.num_vertices)
    for i in range(d):
        xi = basis[i]
        sq = np.einsum("vd,vd->v", xi, xi)
        norm_sq_all += sq
        err_norm = float(np.max(np.abs(sq - (1.0 - x[:, i] ** 2))))

        split = split_tangent_normal(mesh, xi, frames=frames)
        tansq = np.einsum("vd,vd->v", split.tangential, split.tangential)
        # compare per face: analytic tangential norm at the centroid vs the
        # P1 gradient of the coordinate function on the same face
        g = surface_gradient(mesh, x[:, i])
        gradsq = np.einsum("fd,fd->f", g, g)
        tansq_face = tansq[tri].mean(axis=1)
        err_tan = float(np.max(np.abs(tansq_face - gradsq)))

        # finite difference of xi_i along each edge, projected to the sphere
        # tangent space at the midpoint, against -x_i * edge
        delta = basis[i][e[:, 1]] - basis[i][e[:, 0]]
        delta -= np.einsum("ed,ed->e", delta, mid_hat)[:, None] * mid_hat
        target = -mid_hat[:, i][:, None] * edge
        err_cov = float(np.max(np.linalg.norm(delta - target, axis=1) / edge_len))

        report[i] = {
            "norm_sq": err_norm,
            "tangential_sq": err_tan,
            "covariant": err_cov,
        }
    report["sum_sq"] = float(np.max(np.abs(norm_sq_all - mesh.n)))
    return report


def sum_normal_sq(mesh, frames=None):
    """Per-vertex sum_i |xi_i^N|^2 (equals n-2 on minimal surfaces)."""
    if frames is None:
        frames = surface_tangent_frames(mesh)
    total = np.zeros(mesh.num_vertices)
    for xi in moebius_basis(mesh):
        split = split_tangent_normal(mesh, xi, frames=frames)
        total += np.einsum("vd,vd->v", split.normal, split.normal)
    return total
