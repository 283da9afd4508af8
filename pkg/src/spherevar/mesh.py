"""Triangle meshes on the unit sphere S^n in R^{n+1}.

A SurfaceMesh stores vertices (all on the unit sphere), oriented triangular
faces, and optional analytic chart data for catalog surfaces (per-vertex
tangent frames, unit normal when the surface has codimension one in S^3, and
the squared norm of the second fundamental form).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .errors import MeshError, ParameterError

UNIT_SPHERE_TOL = 1e-12
FRAME_SKIP_TOL = 1e-6
GEODESIC_RANK_CUTOFF = 1e-8


@dataclass
class Chart:
    """Analytic per-vertex data for exactly-known surfaces.

    tangent_frames : (V, 2, n+1) orthonormal basis of the surface tangent
        plane at each vertex, orthogonal to the position vector.
    normsq_A : squared norm of the second fundamental form, a constant or a
        per-vertex array; only meaningful for surfaces in S^3.
    unit_normal : (V, n+1) unit normal of the surface inside S^3, or None.
    """

    tangent_frames: np.ndarray
    normsq_A: Union[float, np.ndarray, None] = None
    unit_normal: Optional[np.ndarray] = None


@dataclass
class SurfaceMesh:
    """Closed orientable triangulated surface with vertices on S^n."""

    n: int
    vertices: np.ndarray          # (V, n+1)
    faces: np.ndarray             # (F, 3) int
    name: str = "mesh"
    genus: Optional[int] = None
    chart: Optional[Chart] = None
    full: Optional[bool] = None   # spans all of R^{n+1} (not an equatorial inclusion)

    def __post_init__(self):
        self.vertices = np.ascontiguousarray(self.vertices, dtype=float)
        self.faces = np.ascontiguousarray(self.faces, dtype=np.int64)
        if self.vertices.ndim != 2 or self.vertices.shape[1] != self.n + 1:
            raise MeshError("vertices must have shape (V, n+1)")
        if self.faces.ndim != 2 or self.faces.shape[1] != 3:
            raise MeshError("faces must have shape (F, 3)")

    @property
    def num_vertices(self):
        return self.vertices.shape[0]

    @property
    def num_faces(self):
        return self.faces.shape[0]


def face_corner_vectors(mesh):
    """Edge vectors (B-A, C-A) per face, each of shape (F, n+1)."""
    x = mesh.vertices
    f = mesh.faces
    return x[f[:, 1]] - x[f[:, 0]], x[f[:, 2]] - x[f[:, 0]]


def face_areas(mesh):
    """Triangle areas from the ambient Gram determinant (any codimension)."""
    u, w = face_corner_vectors(mesh)
    uu = np.einsum("fd,fd->f", u, u)
    ww = np.einsum("fd,fd->f", w, w)
    uw = np.einsum("fd,fd->f", u, w)
    g = uu * ww - uw * uw
    return 0.5 * np.sqrt(np.maximum(g, 0.0))


def edge_lengths(mesh):
    """Lengths (L0, L1, L2) opposite to corners 0, 1, 2, each (F,)."""
    x = mesh.vertices
    f = mesh.faces
    l0 = np.linalg.norm(x[f[:, 2]] - x[f[:, 1]], axis=1)
    l1 = np.linalg.norm(x[f[:, 0]] - x[f[:, 2]], axis=1)
    l2 = np.linalg.norm(x[f[:, 1]] - x[f[:, 0]], axis=1)
    return l0, l1, l2


def mesh_size(mesh):
    """Longest edge length h."""
    return float(max(l.max() for l in edge_lengths(mesh)))


def validate_mesh(mesh, unit_tol=UNIT_SPHERE_TOL):
    """Raise MeshError unless the mesh is a valid closed oriented surface.

    Checks: finite unit vertices, positive triangle areas, every directed
    edge used exactly once with its reverse also used exactly once.
    """
    x = mesh.vertices
    if not np.all(np.isfinite(x)):
        raise MeshError("non-finite vertex coordinates")
    r = np.linalg.norm(x, axis=1)
    off = float(np.max(np.abs(r - 1.0)))
    if off > unit_tol:
        raise MeshError(f"vertices off the unit sphere by {off:.3e}")
    f = mesh.faces
    if f.min() < 0 or f.max() >= mesh.num_vertices:
        raise MeshError("face index out of range")
    areas = face_areas(mesh)
    if np.any(areas <= 0.0):
        raise MeshError("degenerate (zero-area) triangle")
    directed = {}
    for tri in f:
        for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
            key = (int(a), int(b))
            if key in directed:
                raise MeshError(f"directed edge {key} used twice (non-orientable or non-manifold)")
            directed[key] = True
    for a, b in directed:
        if (b, a) not in directed:
            raise MeshError(f"boundary edge ({a}, {b}): mesh is not closed")
    return True


def total_area(mesh):
    return float(face_areas(mesh).sum())


def contained_in_geodesic_s2(mesh, cutoff=GEODESIC_RANK_CUTOFF):
    """True iff the vertices span a linear subspace of dimension <= 3.

    Rank is taken from the singular values of the vertex matrix with a
    relative cutoff, i.e. the surface lies in some totally geodesic S^2.
    """
    s = np.linalg.svd(mesh.vertices, compute_uv=False)
    rank = int(np.sum(s > cutoff * s[0]))
    return rank <= 3


def frames_from_projectors(proj, count, skip_tol=FRAME_SKIP_TOL):
    """Deterministic orthonormal frames inside per-vertex subspaces.

    proj is (V, d, d), the orthogonal projector onto the desired subspace at
    each vertex. Ambient axes are projected and Gram-Schmidt-ed in index
    order, skipping near-degenerate directions; the first `count` survivors
    form the frame. Returns (V, count, d).
    """
    V, d, _ = proj.shape
    frames = np.zeros((V, count, d))
    filled = np.zeros(V, dtype=int)
    for axis in range(d):
        w = proj[:, :, axis].copy()
        # remove components along frame vectors already chosen (unfilled rows are zero)
        coeff = np.einsum("vkd,vd->vk", frames, w)
        w -= np.einsum("vkd,vk->vd", frames, coeff)
        norm = np.linalg.norm(w, axis=1)
        take = (norm > skip_tol) & (filled < count)
        idx = np.nonzero(take)[0]
        frames[idx, filled[idx]] = w[idx] / norm[idx, None]
        filled[idx] += 1
        if np.all(filled == count):
            break
    if np.any(filled < count):
        raise MeshError("could not build a full tangent frame at some vertex")
    return frames


def sphere_tangent_frames(mesh):
    """(V, n, n+1) orthonormal basis of T_x S^n (everything orthogonal to x)."""
    x = mesh.vertices
    d = mesh.n + 1
    proj = np.eye(d)[None] - np.einsum("vi,vj->vij", x, x)
    return frames_from_projectors(proj, mesh.n)


def surface_tangent_frames(mesh):
    """(V, 2, n+1) orthonormal basis of the discrete tangent plane of Sigma.

    Uses the analytic chart frames when present; otherwise the area-weighted
    average of incident face planes (projected orthogonal to the position
    vector), canonicalized by Gram-Schmidt over the ambient axes.
    """
    if mesh.chart is not None:
        return mesh.chart.tangent_frames
    x = mesh.vertices
    d = mesh.n + 1
    V = mesh.num_vertices
    areas = face_areas(mesh)
    u, w = face_corner_vectors(mesh)
    b1 = u / np.linalg.norm(u, axis=1, keepdims=True)
    w_perp = w - np.einsum("fd,fd->f", w, b1)[:, None] * b1
    b2 = w_perp / np.linalg.norm(w_perp, axis=1, keepdims=True)
    face_proj = np.einsum("fi,fj->fij", b1, b1) + np.einsum("fi,fj->fij", b2, b2)
    acc = np.zeros((V, d, d))
    for corner in range(3):
        np.add.at(acc, mesh.faces[:, corner], areas[:, None, None] * face_proj)
    # restrict to the sphere tangent space before extracting the plane
    sph = np.eye(d)[None] - np.einsum("vi,vj->vij", x, x)
    acc = sph @ acc @ sph
    vals, vecs = np.linalg.eigh(acc)
    top2 = vecs[:, :, -2:]  # (V, d, 2)
    plane = np.einsum("vik,vjk->vij", top2, top2)
    return frames_from_projectors(plane, 2)


def jitter_vertices(mesh, scale, seed=0):
    """Random perturbation renormalized back to the sphere (negative control)."""
    rng = np.random.default_rng(seed)
    x = mesh.vertices + scale * rng.standard_normal(mesh.vertices.shape)
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    return SurfaceMesh(
        n=mesh.n, vertices=x, faces=mesh.faces.copy(),
        name=mesh.name + "-jittered", genus=mesh.genus, chart=None, full=mesh.full,
    )


# ---------------------------------------------------------------------------
# Extended OFF format: "nOFF" header, "<n+1> <V> <F> 0" counts line,
# V vertex lines of n+1 floats at 17 significant digits, F lines "3 i j k".
# ---------------------------------------------------------------------------

def write_off(mesh, path):
    with open(path, "w") as fh:
        fh.write("nOFF\n")
        fh.write(f"{mesh.n + 1} {mesh.num_vertices} {mesh.num_faces} 0\n")
        for row in mesh.vertices:
            fh.write(" ".join(f"{c:.17g}" for c in row) + "\n")
        for tri in mesh.faces:
            fh.write(f"3 {tri[0]} {tri[1]} {tri[2]}\n")


def read_off(path, name=None):
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]
    if not lines or lines[0] != "nOFF":
        raise ParameterError(f"{path}: missing nOFF header")
    dim, nv, nf, _ = (int(tok) for tok in lines[1].split())
    if dim < 3:
        raise ParameterError(f"{path}: ambient dimension {dim} below 3")
    verts = np.array([[float(t) for t in ln.split()] for ln in lines[2:2 + nv]])
    faces = []
    for ln in lines[2 + nv:2 + nv + nf]:
        toks = ln.split()
        if toks[0] != "3":
            raise ParameterError(f"{path}: non-triangular face")
        faces.append([int(t) for t in toks[1:4]])
    if verts.shape != (nv, dim) or len(faces) != nf:
        raise ParameterError(f"{path}: truncated OFF data")
    return SurfaceMesh(
        n=dim - 1, vertices=verts, faces=np.array(faces, dtype=np.int64),
        name=name or "off-mesh",
    )
