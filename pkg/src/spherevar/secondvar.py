"""Second-variation quadratic forms and Morse-index counts.

Two independent discretizations of the energy second variation:

* coordinate form: sum_i int |grad X^i|^2 - 2 |X^i|^2 over the ambient
  components, assembled from the scalar stiffness/mass matrices (canonical);
* covariant form: int |D X|^2 - 2|X^N|^2 - |X^T|^2 with the derivative taken
  per face and projected into the sphere tangent space (cross-check only).

The codimension-one area Jacobi form int |grad f|^2 - 2 f^2 - |A|^2 f^2 is
available for catalog surfaces in S^3 with analytic |A|^2.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import ContractError, ParameterError, SolverError, UnsupportedSurfaceError
from .mesh import face_areas, surface_tangent_frames, sphere_tangent_frames
from .mobius import check_sphere_tangent, split_tangent_normal
from .operators import (
    assemble_mass,
    assemble_stiffness,
    face_centroids_on_sphere,
    face_orthonormal_basis,
    field_face_gradients,
    integrate,
)

DEFAULT_INDEX_DELTA = 0.1


class FormOperators(NamedTuple):
    """Scalar matrices shared by all form evaluations on one mesh."""

    S: sp.csr_matrix
    M: sp.csr_matrix


def form_operators(mesh):
    return FormOperators(S=assemble_stiffness(mesh), M=assemble_mass(mesh, "consistent"))


def energy_form_coordinate(mesh, X, Y=None, ops=None):
    """D^2E as a bilinear form: sum_i (X^i' S Y^i - 2 X^i' M Y^i)."""
    if ops is None:
        ops = form_operators(mesh)
    X = check_sphere_tangent(mesh, X)
    Y = X if Y is None else check_sphere_tangent(mesh, Y)
    SY = ops.S @ Y
    MY = ops.M @ Y
    return float(np.einsum("vd,vd->", X, SY) - 2.0 * np.einsum("vd,vd->", X, MY))


def covariant_gradient_inner(mesh, X, Y=None):
    """int <D X, D Y> with D the per-face sphere-covariant derivative.

    The flat derivative of the linear interpolant is projected to the sphere
    tangent space at the face centroid along each of the two orthonormal
    in-plane directions.
    """
    X = np.asarray(X, dtype=float)
    Y = X if Y is None else np.asarray(Y, dtype=float)
    areas = face_areas(mesh)
    d1, d2 = face_orthonormal_basis(mesh)
    centroid = face_centroids_on_sphere(mesh)
    gX = field_face_gradients(mesh, X)   # (F, C, n+1)
    gY = gX if Y is X else field_face_gradients(mesh, Y)
    total = 0.0
    for direction in (d1, d2):
        hX = np.einsum("fcd,fd->fc", gX, direction)
        hY = hX if Y is X else np.einsum("fcd,fd->fc", gY, direction)
        hX_t = hX - np.einsum("fc,fc->f", hX, centroid)[:, None] * centroid
        hY_t = hY if Y is X else hY - np.einsum("fc,fc->f", hY, centroid)[:, None] * centroid
        if Y is X:
            hY_t = hX_t
        total += float(areas @ np.einsum("fc,fc->f", hX_t, hY_t))
    return total


def energy_form_covariant(mesh, X, frames=None):
    """D^2E(X) = int |D X|^2 - 2 |X^N|^2 - |X^T|^2 (cross-check form)."""
    X = check_sphere_tangent(mesh, X)
    split = split_tangent_normal(mesh, X, frames=frames)
    tansq = np.einsum("vd,vd->v", split.tangential, split.tangential)
    norsq = np.einsum("vd,vd->v", split.normal, split.normal)
    grad = covariant_gradient_inner(mesh, X)
    return grad - integrate(mesh, 2.0 * norsq + tansq)


def _normsq_A_values(mesh):
    if mesh.chart is None or mesh.chart.normsq_A is None:
        raise UnsupportedSurfaceError(
            "area Jacobi form needs analytic |A|^2 chart data (catalog surfaces in S^3)")
    a2 = mesh.chart.normsq_A
    if np.ndim(a2) == 0:
        return float(a2) * np.ones(mesh.num_vertices)
    a2 = np.asarray(a2, dtype=float)
    if a2.shape != (mesh.num_vertices,):
        raise ContractError("|A|^2 array length must equal vertex count")
    return a2


def weighted_mass(mesh, weights):
    """Consistent mass with a per-face constant weight (centroid average)."""
    w_face = np.asarray(weights, dtype=float)[mesh.faces].mean(axis=1)
    areas = face_areas(mesh) * w_face
    f = mesh.faces
    V = mesh.num_vertices
    rows = np.concatenate([f[:, 0], f[:, 1], f[:, 2],
                           f[:, 0], f[:, 1], f[:, 0], f[:, 2], f[:, 1], f[:, 2]])
    cols = np.concatenate([f[:, 0], f[:, 1], f[:, 2],
                           f[:, 1], f[:, 0], f[:, 2], f[:, 0], f[:, 2], f[:, 1]])
    vals = np.concatenate([areas / 6.0] * 3 + [areas / 12.0] * 6)
    return sp.coo_matrix((vals, (rows, cols)), shape=(V, V)).tocsr()


def area_jacobi_form(mesh, f, g=None, ops=None):
    """int grad f . grad g - 2 f g - |A|^2 f g (codimension one, n = 3 only)."""
    if mesh.n != 3:
        raise UnsupportedSurfaceError("area Jacobi form is defined for surfaces in S^3 only")
    a2 = _normsq_A_values(mesh)
    if ops is None:
        ops = form_operators(mesh)
    f = np.asarray(f, dtype=float)
    g = f if g is None else np.asarray(g, dtype=float)
    if f.shape != (mesh.num_vertices,) or g.shape != (mesh.num_vertices,):
        raise ContractError("scalar fields must have one value per vertex")
    MW = weighted_mass(mesh, a2)
    return float(f @ (ops.S @ g) - 2.0 * f @ (ops.M @ g) - f @ (MW @ g))


class QuadraticFormMatrix(NamedTuple):
    """Sparse pencil (Q, M) of a second-variation form over explicit DOFs."""

    Q: sp.csr_matrix
    M: sp.csr_matrix
    kind: str                  # "energy" | "areaJacobi"
    frames: np.ndarray | None  # energy only: (V, n, n+1) DOF frame
    lower_bound: float         # certified lower bound on the (Q, M) spectrum


def _frame_block_matrix(A, frames):
    """Congruence of a scalar matrix to per-vertex frame coordinates.

    For A with entries A_vw, the block at (v, w) is A_vw * F_v F_w^T where
    F_v is the (count, n+1) frame at vertex v.
    """
    A = A.tocoo()
    count = frames.shape[1]
    blocks = np.einsum("eki,eli->ekl", frames[A.row], frames[A.col]) * A.data[:, None, None]
    k_idx, l_idx = np.meshgrid(np.arange(count), np.arange(count), indexing="ij")
    rows = (A.row[:, None, None] * count + k_idx[None]).ravel()
    cols = (A.col[:, None, None] * count + l_idx[None]).ravel()
    dim = A.shape[0] * count
    return sp.coo_matrix((blocks.ravel(), (rows, cols)), shape=(dim, dim)).tocsr()


def energy_quadratic_matrix(mesh, ops=None, frames=None):
    """Energy form over per-vertex orthonormal sphere-tangent frames.

    DOF dimension is n * V; the frame removes the radial directions, so the
    pencil has no artificial zero modes. D^2E(X) >= -2 int |X|^2 gives the
    spectral lower bound -2.
    """
    if ops is None:
        ops = form_operators(mesh)
    if frames is None:
        frames = sphere_tangent_frames(mesh)
    A = (ops.S - 2.0 * ops.M).tocsr()
    Q = _frame_block_matrix(A, frames)
    MQ = _frame_block_matrix(ops.M, frames)
    Q = 0.5 * (Q + Q.T)
    MQ = 0.5 * (MQ + MQ.T)
    return QuadraticFormMatrix(Q=Q.tocsr(), M=MQ.tocsr(), kind="energy",
                               frames=frames, lower_bound=-2.0)


def area_jacobi_matrix(mesh, ops=None):
    """Scalar area Jacobi pencil (S - 2M - |A|^2-weighted M, M), n = 3 only."""
    if mesh.n != 3:
        raise UnsupportedSurfaceError("area Jacobi form is defined for surfaces in S^3 only")
    a2 = _normsq_A_values(mesh)
    if ops is None:
        ops = form_operators(mesh)
    MW = weighted_mass(mesh, a2)
    Q = (ops.S - 2.0 * ops.M - MW).tocsr()
    lower = -2.0 - float(np.max(a2))
    return QuadraticFormMatrix(Q=Q, M=ops.M.tocsr(), kind="areaJacobi",
                               frames=None, lower_bound=lower)


class IndexCount(NamedTuple):
    count: int
    negatives: np.ndarray     # eigenvalues below -delta, ascending
    near_zero: np.ndarray     # eigenvalues in [-delta, delta] (diagnostics)
    delta: float


def negative_index_count(form, delta=DEFAULT_INDEX_DELTA, seed=0, k0=12):
    """Count eigenvalues of Q w = mu M w below -delta.

    Shift-invert Lanczos anchored below the certified lower bound; k grows
    until the spectrum above +delta is reached, so every negative and
    near-zero eigenvalue is captured.
    """
    dim = form.Q.shape[0]
    rng = np.random.default_rng(seed)
    v0 = rng.standard_normal(dim)
    sigma = form.lower_bound - 0.5
    k = min(k0, dim - 1)
    while True:
        try:
            vals = spla.eigsh(form.Q, k=k, M=form.M, sigma=sigma, which="LM",
                              v0=v0, maxiter=5000, return_eigenvectors=False)
        except (spla.ArpackNoConvergence, RuntimeError) as exc:
            raise SolverError(f"index eigensolver failed: {exc}") from exc
        vals = np.sort(vals)
        if vals[-1] > delta or k >= dim - 1:
            break
        k = min(2 * k, dim - 1)
    negatives = vals[vals < -delta]
    near_zero = vals[(vals >= -delta) & (vals <= delta)]
    return IndexCount(count=int(negatives.size), negatives=negatives,
                      near_zero=near_zero, delta=delta)


class EjiriMicallefR(NamedTuple):
    """Index-gap bound r with the case(s) of the piecewise formula that fired."""

    value: int
    cases: tuple


def ejiri_micallef_r(g, b):
    """Piecewise bound r(g, b) on ind_A - ind_E for genus g, b branch points."""
    if not (isinstance(g, (int, np.integer)) and g >= 0):
        raise ParameterError(f"genus g={g} must be a nonnegative integer")
    if not (isinstance(b, (int, np.integer)) and b >= 0):
        raise ParameterError(f"branch count b={b} must be a nonnegative integer")
    hits = []
    if b <= 2 * g - 3:
        hits.append(("b <= 2g-3", 6 * g - 6 - 2 * b))
    if 2 * g - 2 <= b <= 4 * g - 4:
        hits.append(("2g-2 <= b <= 4g-4", 4 * g - 2 + 2 * math.floor(-b / 2)))
    if b >= 4 * g - 3:
        hits.append(("b >= 4g-3", 0))
    if not hits:
        raise ParameterError(f"(g={g}, b={b}) falls in no case of the r formula")
    values = {v for _, v in hits}
    if len(values) > 1:
        raise ParameterError(
            f"(g={g}, b={b}) matches cases with conflicting values: {hits}")
    return EjiriMicallefR(value=hits[0][1], cases=tuple(name for name, _ in hits))
