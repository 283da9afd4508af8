"""P1 finite-element operators on a SurfaceMesh.

Cotangent stiffness, barycentric (lumped) and consistent mass, per-face
gradients of linear interpolants, quadrature, and the low end of the
Laplace-Beltrami eigenproblem S f = lambda M f.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import ContractError, MeshError, SolverError
from .mesh import face_areas, face_corner_vectors

DEFAULT_EIG_TOL = 1e-8
CLUSTER_REL_TOL = 1e-3


def assemble_stiffness(mesh):
    """Cotangent-weight stiffness matrix (PSD, constants in the kernel).

    Built intrinsically from edge lengths, so it works in any ambient
    dimension.
    """
    from .mesh import edge_lengths

    l0, l1, l2 = edge_lengths(mesh)
    areas = face_areas(mesh)
    if np.any(areas <= 0.0):
        raise MeshError("zero-area triangle in stiffness assembly")
    # cot(angle at corner k) = (sum of adjacent squared lengths - opposite^2) / (4 area)
    sq0, sq1, sq2 = l0 * l0, l1 * l1, l2 * l2
    cot0 = (sq1 + sq2 - sq0) / (4.0 * areas)
    cot1 = (sq2 + sq0 - sq1) / (4.0 * areas)
    cot2 = (sq0 + sq1 - sq2) / (4.0 * areas)
    f = mesh.faces
    V = mesh.num_vertices
    # half-cotangent weight on the edge opposite each corner
    rows = np.concatenate([f[:, 1], f[:, 2], f[:, 0], f[:, 2], f[:, 0], f[:, 1]])
    cols = np.concatenate([f[:, 2], f[:, 1], f[:, 2], f[:, 0], f[:, 1], f[:, 0]])
    w = np.concatenate([cot0, cot0, cot1, cot1, cot2, cot2]) * 0.5
    off = sp.coo_matrix((-w, (rows, cols)), shape=(V, V)).tocsr()
    diag = -np.asarray(off.sum(axis=1)).ravel()
    return (off + sp.diags(diag)).tocsr()


def assemble_mass(mesh, mode="consistent"):
    """Mass matrix: 'consistent' (P1 Gram) or 'lumped' (barycentric diagonal)."""
    areas = face_areas(mesh)
    if np.any(areas <= 0.0):
        raise MeshError("zero-area triangle in mass assembly")
    f = mesh.faces
    V = mesh.num_vertices
    if mode == "lumped":
        w = np.zeros(V)
        for corner in range(3):
            np.add.at(w, f[:, corner], areas / 3.0)
        return sp.diags(w).tocsr()
    if mode != "consistent":
        raise ContractError(f"unknown mass mode {mode!r}")
    rows = np.concatenate([f[:, 0], f[:, 1], f[:, 2],
                           f[:, 0], f[:, 1], f[:, 0], f[:, 2], f[:, 1], f[:, 2]])
    cols = np.concatenate([f[:, 0], f[:, 1], f[:, 2],
                           f[:, 1], f[:, 0], f[:, 2], f[:, 0], f[:, 2], f[:, 1]])
    vals = np.concatenate([areas / 6.0] * 3 + [areas / 12.0] * 6)
    return sp.coo_matrix((vals, (rows, cols)), shape=(V, V)).tocsr()


def vertex_weights(mesh):
    """Barycentric quadrature weights (row sums of the mass matrix)."""
    return assemble_mass(mesh, mode="lumped").diagonal()


def integrate(mesh, values):
    """Integral over the mesh of a per-vertex field or per-face density.

    Per-vertex input is integrated as its linear interpolant; per-face input
    as a piecewise constant. integrate(1) equals the total area.
    """
    values = np.asarray(values, dtype=float)
    if np.ndim(values) == 0:
        return float(values) * float(face_areas(mesh).sum())
    if values.shape[0] == mesh.num_vertices:
        return float(vertex_weights(mesh) @ values)
    if values.shape[0] == mesh.num_faces:
        return float(face_areas(mesh) @ values)
    raise ContractError(
        f"field length {values.shape[0]} matches neither vertex ({mesh.num_vertices}) "
        f"nor face ({mesh.num_faces}) count")


def _face_gram(mesh):
    u, w = face_corner_vectors(mesh)
    guu = np.einsum("fd,fd->f", u, u)
    gww = np.einsum("fd,fd->f", w, w)
    guw = np.einsum("fd,fd->f", u, w)
    det = guu * gww - guw * guw
    if np.any(det <= 0.0):
        raise MeshError("degenerate face in gradient computation")
    return u, w, guu, gww, guw, det


def surface_gradient(mesh, f):
    """Per-face constant gradient of the linear interpolant, shape (F, n+1)."""
    f = np.asarray(f, dtype=float)
    if f.shape != (mesh.num_vertices,):
        raise ContractError("scalar field length must equal vertex count")
    u, w, guu, gww, guw, det = _face_gram(mesh)
    tri = mesh.faces
    du = f[tri[:, 1]] - f[tri[:, 0]]
    dw = f[tri[:, 2]] - f[tri[:, 0]]
    c1 = (gww * du - guw * dw) / det
    c2 = (guu * dw - guw * du) / det
    return c1[:, None] * u + c2[:, None] * w


def field_face_gradients(mesh, X):
    """Gradients of all components of a vector field at once, shape (F, C, n+1)."""
    X = np.asarray(X, dtype=float)
    u, w, guu, gww, guw, det = _face_gram(mesh)
    tri = mesh.faces
    du = X[tri[:, 1]] - X[tri[:, 0]]   # (F, C)
    dw = X[tri[:, 2]] - X[tri[:, 0]]
    c1 = (gww[:, None] * du - guw[:, None] * dw) / det[:, None]
    c2 = (guu[:, None] * dw - guw[:, None] * du) / det[:, None]
    return c1[..., None] * u[:, None, :] + c2[..., None] * w[:, None, :]


def face_orthonormal_basis(mesh):
    """Orthonormal in-plane directions (d1, d2) per face, each (F, n+1)."""
    u, w = face_corner_vectors(mesh)
    d1 = u / np.linalg.norm(u, axis=1, keepdims=True)
    w_perp = w - np.einsum("fd,fd->f", w, d1)[:, None] * d1
    d2 = w_perp / np.linalg.norm(w_perp, axis=1, keepdims=True)
    return d1, d2


def face_centroids_on_sphere(mesh):
    c = mesh.vertices[mesh.faces].mean(axis=1)
    return c / np.linalg.norm(c, axis=1, keepdims=True)


@dataclass
class EigenPair:
    """Generalized eigenpair of (S, M), with the field mass-normalized."""

    lam: float
    field: np.ndarray
    residual: float


def eigen_clusters(pairs, rel_tol=CLUSTER_REL_TOL):
    """Group eigenpairs whose eigenvalues agree within rel_tol (chained)."""
    clusters = []
    for k, p in enumerate(pairs):
        scale = max(abs(p.lam), 1.0)
        if clusters and abs(p.lam - pairs[clusters[-1][-1]].lam) <= rel_tol * scale:
            clusters[-1].append(k)
        else:
            clusters.append([k])
    return clusters


def solve_smallest_eigenpairs(S, M, k, tol=DEFAULT_EIG_TOL, seed=0):
    """k smallest eigenpairs of S f = lambda M f, mass-orthonormal, ascending.

    Shift-invert Lanczos below the spectrum; deterministic via a seeded
    starting vector. Raises SolverError (carrying the best residual) on
    failure of the residual contract.
    """
    V = S.shape[0]
    if not (1 <= k <= V - 1):
        raise ContractError(f"k={k} out of range for dimension {V}")
    rng = np.random.default_rng(seed)
    v0 = rng.standard_normal(V)
    sigma = -0.1  # S is PSD, so S - sigma M is SPD for sigma < 0
    try:
        vals, vecs = spla.eigsh(S, k=k, M=M, sigma=sigma, which="LM", v0=v0,
                                maxiter=5000)
    except (spla.ArpackNoConvergence, RuntimeError) as exc:
        raise SolverError(f"eigensolver failed: {exc}") from exc
    order = np.argsort(vals)
    vals, vecs = vals[order], vecs[:, order]
    # deterministic signs and exact M-orthonormalization in index order
    pairs = []
    basis = []
    for j in range(k):
        v = vecs[:, j]
        for b in basis:
            v = v - (b @ (M @ v)) * b
        nrm = np.sqrt(v @ (M @ v))
        if nrm <= 0:
            raise SolverError("degenerate eigenvector block")
        v = v / nrm
        pivot = int(np.argmax(np.abs(v)))
        if v[pivot] < 0:
            v = -v
        basis.append(v)
        res = np.linalg.norm(S @ v - vals[j] * (M @ v)) / np.linalg.norm(M @ v)
        pairs.append(EigenPair(lam=float(max(vals[j], 0.0) if abs(vals[j]) < tol else vals[j]),
                               field=v, residual=float(res)))
    worst = max(p.residual for p in pairs)
    if worst > tol:
        raise SolverError(f"eigenpair residual {worst:.3e} exceeds tol {tol:.1e}",
                          best_residual=worst)
    return pairs


def write_spectrum_csv(pairs, path):
    """CSV with header index,lambda,residual at 17 significant digits."""
    with open(path, "w") as fh:
        fh.write("index,lambda,residual\n")
        for idx, p in enumerate(pairs):
            fh.write(f"{idx},{p.lam:.17g},{p.residual:.17g}\n")
