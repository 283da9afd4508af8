"""Exactly-known minimal surfaces in S^n, built as triangle meshes.

Builders return a SurfaceMesh with analytic chart metadata so the tangent /
normal splits downstream carry no discretization error. Resolution semantics:
the equatorial sphere takes an icosahedron subdivision level, the Clifford
torus a grid size (points per circle).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import MeshError, ParameterError, UnsupportedSurfaceError
from .mesh import Chart, SurfaceMesh, contained_in_geodesic_s2, face_areas, validate_mesh

GOLDEN = (1.0 + np.sqrt(5.0)) / 2.0


def _icosahedron():
    p = GOLDEN
    verts = np.array([
        [-1, p, 0], [1, p, 0], [-1, -p, 0], [1, -p, 0],
        [0, -1, p], [0, 1, p], [0, -1, -p], [0, 1, -p],
        [p, 0, -1], [p, 0, 1], [-p, 0, -1], [-p, 0, 1],
    ], dtype=float)
    verts /= np.linalg.norm(verts, axis=1, keepdims=True)
    faces = np.array([
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ], dtype=np.int64)
    return verts, faces


def _subdivide(verts, faces):
    """Loop-style 1-to-4 subdivision with midpoints pushed to the sphere."""
    verts = list(verts)
    cache = {}

    def midpoint(i, j):
        key = (min(i, j), max(i, j))
        if key not in cache:
            m = verts[i] + verts[j]
            verts.append(m / np.linalg.norm(m))
            cache[key] = len(verts) - 1
        return cache[key]

    out = []
    for a, b, c in faces:
        ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
        out.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]])
    return np.array(verts), np.array(out, dtype=np.int64)


def _sphere_chart(vertices3, n):
    """Chart for the equatorial S^2 sitting in the first 3 coordinates."""
    V = vertices3.shape[0]
    d = n + 1
    # tangent plane at x: orthogonal complement of x inside span(e0, e1, e2)
    from .mesh import frames_from_projectors

    proj = np.zeros((V, d, d))
    proj[:, :3, :3] = np.eye(3)[None] - np.einsum("vi,vj->vij", vertices3, vertices3)
    frames = frames_from_projectors(proj, 2)
    normal = None
    if n == 3:
        normal = np.zeros((V, 4))
        normal[:, 3] = 1.0
    return Chart(tangent_frames=frames, normsq_A=0.0, unit_normal=normal)


def build_equatorial_sphere(n, res):
    """Totally geodesic S^2 inside S^n: icosphere at subdivision level res."""
    if not (isinstance(n, (int, np.integer)) and n >= 2):
        raise ParameterError(f"ambient dimension n={n} must be an integer >= 2")
    if not (isinstance(res, (int, np.integer)) and res >= 0):
        raise ParameterError(f"subdivision level res={res} must be a nonnegative integer")
    verts3, faces = _icosahedron()
    for _ in range(res):
        verts3, faces = _subdivide(verts3, faces)
    verts3 /= np.linalg.norm(verts3, axis=1, keepdims=True)
    verts = np.zeros((verts3.shape[0], n + 1))
    verts[:, :3] = verts3
    mesh = SurfaceMesh(
        n=n, vertices=verts, faces=faces, name="equatorial-sphere",
        genus=0, chart=_sphere_chart(verts3, n), full=(n == 2),
    )
    validate_mesh(mesh)
    return mesh


def _torus_chart(angles_a, angles_b, n):
    V = angles_a.shape[0]
    d = n + 1
    frames = np.zeros((V, 2, d))
    frames[:, 0, 0] = -np.sin(angles_a)
    frames[:, 0, 1] = np.cos(angles_a)
    frames[:, 1, 2] = -np.sin(angles_b)
    frames[:, 1, 3] = np.cos(angles_b)
    normal = None
    if n == 3:
        normal = np.stack([
            np.cos(angles_a), np.sin(angles_a),
            -np.cos(angles_b), -np.sin(angles_b),
        ], axis=1) / np.sqrt(2.0)
    return Chart(tangent_frames=frames, normsq_A=2.0, unit_normal=normal)


def _clifford_vertices(res, n):
    idx = np.arange(res)
    a = 2.0 * np.pi * idx / res
    ii, jj = np.meshgrid(idx, idx, indexing="ij")
    aa = a[ii.ravel()]
    bb = a[jj.ravel()]
    verts = np.zeros((res * res, n + 1))
    verts[:, 0] = np.cos(aa)
    verts[:, 1] = np.sin(aa)
    verts[:, 2] = np.cos(bb)
    verts[:, 3] = np.sin(bb)
    verts /= np.sqrt(2.0)
    verts /= np.linalg.norm(verts, axis=1, keepdims=True)
    return verts, aa, bb


def _torus_faces(res):
    """Each grid quad split along the (i,j) -> (i+1,j+1) diagonal."""
    def vid(i, j):
        return (i % res) * res + (j % res)

    faces = []
    for i in range(res):
        for j in range(res):
            v00, v10 = vid(i, j), vid(i + 1, j)
            v11, v01 = vid(i + 1, j + 1), vid(i, j + 1)
            faces.append([v00, v10, v11])
            faces.append([v00, v11, v01])
    return np.array(faces, dtype=np.int64)


def build_clifford_torus(res):
    """Square Clifford torus (cos a, sin a, cos b, sin b)/sqrt(2) in S^3."""
    return build_product_torus(2, res, n=3)


def build_product_torus(k, res, n=3):
    """Clifford torus (k=2 only) embedded equatorially in S^n, n >= 3."""
    if k != 2:
        raise UnsupportedSurfaceError(f"product of k={k} circles not in the catalog (only k=2)")
    if not (isinstance(res, (int, np.integer)) and res >= 8):
        raise ParameterError(f"torus grid size res={res} must be an integer >= 8")
    if not (isinstance(n, (int, np.integer)) and n >= 3):
        raise ParameterError(f"ambient dimension n={n} must be an integer >= 3")
    verts, aa, bb = _clifford_vertices(res, n)
    mesh = SurfaceMesh(
        n=n, vertices=verts, faces=_torus_faces(res),
        name="clifford-torus" if n == 3 else f"clifford-torus-in-s{n}",
        genus=1, chart=_torus_chart(aa, bb, n),
        full=(n == 3),
    )
    if n > 3:
        # codimension > 1: the scalar area Jacobi form does not apply
        mesh.chart.normsq_A = None
    validate_mesh(mesh)
    return mesh


class MinimalityResidual(NamedTuple):
    """Defect of the minimal-immersion equation -Delta u = 2u."""

    laplace: float       # mass-weighted relative L2 norm of (lumped-inverse S u - 2u)
    laplace_max: float   # max over vertices/coordinates (diagnostic; does not
                         # converge at irregular vertices)
    gradsq_max: float    # max over faces of | |grad u|^2 - 2 |

    @property
    def value(self):
        return self.laplace


def minimality_residual(mesh):
    """Check the discrete minimal-immersion equation coordinatewise.

    The weak Laplacian S u is converted to a strong (pointwise) form with the
    lumped-mass inverse and compared against 2u in the mass-weighted norm
    relative to |2u|; the face-wise check compares the squared gradient of
    the coordinate interpolants against 2.
    """
    from .operators import assemble_mass, assemble_stiffness, surface_gradient

    S = assemble_stiffness(mesh)
    ML = assemble_mass(mesh, mode="lumped")
    w = ML.diagonal()
    u = mesh.vertices
    r = (S @ u) / w[:, None] - 2.0 * u
    laplace = float(np.sqrt(np.einsum("v,vd->", w, r * r)
                            / np.einsum("v,vd->", w, 4.0 * u * u)))
    laplace_max = float(np.max(np.abs(r)))
    gradsq = np.zeros(mesh.num_faces)
    for c in range(mesh.n + 1):
        g = surface_gradient(mesh, u[:, c])
        gradsq += np.einsum("fd,fd->f", g, g)
    gradsq_max = float(np.max(np.abs(gradsq - 2.0)))
    return MinimalityResidual(laplace, laplace_max, gradsq_max)


@dataclass
class CatalogEntry:
    """A catalog surface with its analytically certain data."""

    name: str
    builder: callable
    description: str
    area: Optional[float] = None
    lambda1: Optional[float] = None
    lambda1_multiplicity: Optional[int] = None
    normsq_A: Optional[float] = None
    expected_index_area: Optional[int] = None
    expected_index_energy: Optional[int] = None
    in_geodesic_s2: bool = False
    provenance: str = ""


CATALOG = {
    "equatorial-sphere": CatalogEntry(
        name="equatorial-sphere",
        builder=lambda n=3, res=4: build_equatorial_sphere(n, res),
        description="totally geodesic S^2 in S^n (icosphere, res = subdivision level)",
        area=4.0 * np.pi,
        lambda1=2.0,
        lambda1_multiplicity=3,
        normsq_A=0.0,
        expected_index_area=1,
        expected_index_energy=None,
        in_geodesic_s2=True,
        provenance="spherical harmonics oracle lambda_k = k(k+1); area index 1 (Urbano)",
    ),
    "clifford-torus": CatalogEntry(
        name="clifford-torus",
        builder=lambda n=3, res=64: build_product_torus(2, res, n=n),
        description="square Clifford torus in S^3 (res = grid points per circle)",
        area=2.0 * np.pi ** 2,
        lambda1=2.0,
        lambda1_multiplicity=4,
        normsq_A=2.0,
        expected_index_area=5,
        expected_index_energy=4,
        in_geodesic_s2=False,
        provenance="flat-torus spectrum oracle 2(j^2+k^2); area index 5 (Urbano), energy index 4",
    ),
    "product-torus": CatalogEntry(
        name="product-torus",
        builder=lambda n=4, res=64: build_product_torus(2, res, n=n),
        description="Clifford torus included equatorially in S^n, n > 3 (non-full)",
        area=2.0 * np.pi ** 2,
        lambda1=2.0,
        lambda1_multiplicity=4,
        normsq_A=None,
        in_geodesic_s2=False,
        provenance="equatorial inclusion of the Clifford torus; fullness only for n=3",
    ),
}


def build_by_name(name, n=None, res=None):
    if name not in CATALOG:
        raise UnsupportedSurfaceError(f"unknown catalog surface {name!r}")
    entry = CATALOG[name]
    kwargs = {}
    if n is not None:
        kwargs["n"] = n
    if res is not None:
        kwargs["res"] = res
    return entry.builder(**kwargs)
