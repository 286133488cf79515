"""Polytopal mesh container and mesh ingestion.

The solver only ever talks to cells and facets through measures, barycenters
and normals, so the mesh container is deliberately flat: numpy arrays for the
geometry, plain lists for the connectivity.  Cells are simplices (triangles,
tetrahedra) or convex 2D polygons given as a counter-clockwise vertex loop;
facets are derived, deduplicated and oriented once at construction time.

Example::

    mesh = generate_rect_mesh(1.0, 1.0, 10, 10)
    part = facet_classification(mesh, dirichlet_tags={"left", "right"})
    print(mesh.num_cells, len(part.interior), len(part.dirichlet))
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Mesh",
    "MeshError",
    "FacetPartition",
    "facet_classification",
    "generate_rect_mesh",
    "generate_box_mesh",
    "load_mesh",
    "load_mesh_json",
    "load_mesh_gmsh",
    "save_mesh_json",
]

# Relative tolerance for the closed-polytope identity sum(|F| n_{F,c}) = 0.
_CLOSURE_RTOL = 1e-12
# Facets of 3D cells must be planar to this fraction of their diameter.
_PLANARITY_RTOL = 1e-9


class MeshError(Exception):
    """Raised for malformed meshes or mesh files."""


def _polygon_area_centroid(pts: np.ndarray) -> tuple[float, np.ndarray]:
    """Signed shoelace area and area centroid of a 2D polygon loop."""
    x, y = pts[:, 0], pts[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    area = 0.5 * float(np.sum(cross))
    if abs(area) < 1e-300:
        raise MeshError("degenerate polygon cell with zero area")
    cx = float(np.sum((x + xn) * cross)) / (6.0 * area)
    cy = float(np.sum((y + yn) * cross)) / (6.0 * area)
    return area, np.array([cx, cy])


def _tet_volume(pts: np.ndarray) -> float:
    return float(np.linalg.det(pts[1:] - pts[0])) / 6.0


def _triangle_area_normal_3d(pts: np.ndarray) -> tuple[float, np.ndarray]:
    n = np.cross(pts[1] - pts[0], pts[2] - pts[0])
    nrm = float(np.linalg.norm(n))
    if nrm < 1e-300:
        raise MeshError("degenerate triangular facet")
    return 0.5 * nrm, n / nrm


@dataclass
class FacetPartition:
    """Facet index sets produced by :func:`facet_classification`."""

    interior: np.ndarray
    dirichlet: np.ndarray
    neumann: np.ndarray


class Mesh:
    """Conforming mesh of a d-dimensional domain, d in {2, 3}.

    Args:
        vertices: float array of shape (num_vertices, dim).
        cells: sequence of vertex-id tuples.  Triangles/polygons (CCW loops)
            in 2D, tetrahedra in 3D.
        boundary_tags: optional mapping of tag name to a list of boundary
            facets, each given by its vertex ids (any order).

    Raises:
        MeshError: on degenerate cells, non-manifold facets, unmatched
            boundary tag entries, non-planar 3D facets, or cells that fail
            the closed-polytope identity.

    Attributes (all derived at construction):
        cell_measure, cell_centroid, cell_diameter: per-cell geometry.
        facet_vertices: list of vertex tuples per facet.
        facet_measure, facet_centroid, facet_normal, facet_diameter: per
            facet geometry.  The normal of an interior facet points from the
            first adjacent cell to the second; boundary normals point out of
            the domain.
        facet_cells: (num_facets, 2) int array, second entry -1 on boundary.
        cell_facets: per cell, list of (facet_id, sign) with sign +1 when the
            facet normal points out of the cell.
        boundary_tags: dict facet_id -> tag string.
    """

    def __init__(self, vertices, cells, boundary_tags=None):
        self.vertices = np.asarray(vertices, dtype=float)
        if self.vertices.ndim != 2 or self.vertices.shape[1] not in (2, 3):
            raise MeshError("vertices must be an (n, 2) or (n, 3) array")
        self.dim = self.vertices.shape[1]
        self.cells = [tuple(int(v) for v in c) for c in cells]
        if not self.cells:
            raise MeshError("mesh has no cells")
        for c in self.cells:
            if self.dim == 3 and len(c) != 4:
                raise MeshError("3D cells must be tetrahedra")
            if self.dim == 2 and len(c) < 3:
                raise MeshError("2D cells need at least 3 vertices")
        self._build_cell_geometry()
        self._build_facets()
        self._check_closure()
        self.boundary_tags: dict[int, str] = {}
        if boundary_tags:
            self._attach_boundary_tags(boundary_tags)

    # ------------------------------------------------------------------
    # construction helpers
    # ------------------------------------------------------------------

    def _build_cell_geometry(self) -> None:
        nc = len(self.cells)
        self.cell_measure = np.empty(nc)
        self.cell_centroid = np.empty((nc, self.dim))
        self.cell_diameter = np.empty(nc)
        for i, c in enumerate(self.cells):
            pts = self.vertices[list(c)]
            if self.dim == 2:
                area, centroid = _polygon_area_centroid(pts)
                if area < 0:
                    # reorder to CCW so facet windings stay consistent
                    c = tuple(reversed(c))
                    self.cells[i] = c
                    pts = self.vertices[list(c)]
                    area, centroid = _polygon_area_centroid(pts)
                self.cell_measure[i] = area
                self.cell_centroid[i] = centroid
            else:
                vol = _tet_volume(pts)
                if vol < 0:
                    c = (c[0], c[2], c[1], c[3])
                    self.cells[i] = c
                    pts = self.vertices[list(c)]
                    vol = _tet_volume(pts)
                if vol <= 0:
                    raise MeshError(f"degenerate tetrahedron {i}")
                self.cell_measure[i] = vol
                self.cell_centroid[i] = pts.mean(axis=0)
            d = pts[:, None, :] - pts[None, :, :]
            self.cell_diameter[i] = np.sqrt((d * d).sum(axis=2)).max()
        if np.any(self.cell_measure <= 0):
            raise MeshError("cell with non-positive measure")

    def _cell_facet_loops(self, cell: tuple[int, ...]):
        """Facets of one cell as vertex tuples, outward winding implied."""
        if self.dim == 2:
            n = len(cell)
            return [(cell[k], cell[(k + 1) % n]) for k in range(n)]
        v0, v1, v2, v3 = cell
        # faces of a positively oriented tet, wound so the right-hand
        # normal points outward
        return [(v1, v2, v3), (v0, v3, v2), (v0, v1, v3), (v0, v2, v1)]

    def _build_facets(self) -> None:
        facet_index: dict[frozenset, int] = {}
        self.facet_vertices: list[tuple[int, ...]] = []
        facet_cells: list[list[int]] = []
        cell_facets: list[list[tuple[int, int]]] = [[] for _ in self.cells]
        for ci, cell in enumerate(self.cells):
            for loop in self._cell_facet_loops(cell):
                key = frozenset(loop)
                fi = facet_index.get(key)
                if fi is None:
                    fi = len(self.facet_vertices)
                    facet_index[key] = fi
                    self.facet_vertices.append(loop)
                    facet_cells.append([ci])
                else:
                    if len(facet_cells[fi]) == 2:
                        raise MeshError(f"facet {fi} shared by more than two cells")
                    facet_cells[fi].append(ci)
                cell_facets[ci].append((fi, 0))
        nf = len(self.facet_vertices)
        self.facet_cells = np.full((nf, 2), -1, dtype=int)
        for fi, adj in enumerate(facet_cells):
            self.facet_cells[fi, : len(adj)] = adj
        self._facet_key_index = facet_index
        self._build_facet_geometry()
        # orientation: from first cell to second, outward on the boundary
        for fi in range(nf):
            cneg = self.facet_cells[fi, 0]
            ref = self.facet_centroid[fi] - self.cell_centroid[cneg]
            if float(self.facet_normal[fi] @ ref) < 0.0:
                self.facet_normal[fi] = -self.facet_normal[fi]
        self.cell_facets = [
            [
                (fi, 1 if self.facet_cells[fi, 0] == ci else -1)
                for fi, _ in facets
            ]
            for ci, facets in enumerate(cell_facets)
        ]
        self.boundary_facets = np.flatnonzero(self.facet_cells[:, 1] < 0)
        self.interior_facets = np.flatnonzero(self.facet_cells[:, 1] >= 0)

    def _build_facet_geometry(self) -> None:
        nf = len(self.facet_vertices)
        self.facet_measure = np.empty(nf)
        self.facet_centroid = np.empty((nf, self.dim))
        self.facet_normal = np.empty((nf, self.dim))
        self.facet_diameter = np.empty(nf)
        for fi, fv in enumerate(self.facet_vertices):
            pts = self.vertices[list(fv)]
            if self.dim == 2:
                t = pts[1] - pts[0]
                length = float(np.linalg.norm(t))
                if length < 1e-300:
                    raise MeshError("zero-length edge facet")
                self.facet_measure[fi] = length
                self.facet_centroid[fi] = pts.mean(axis=0)
                self.facet_normal[fi] = np.array([t[1], -t[0]]) / length
                self.facet_diameter[fi] = length
            else:
                area, normal = _triangle_area_normal_3d(pts[:3])
                d = pts[:, None, :] - pts[None, :, :]
                diam = float(np.sqrt((d * d).sum(axis=2)).max())
                if len(fv) > 3:
                    dev = np.abs((pts - pts[0]) @ normal).max()
                    if dev > _PLANARITY_RTOL * diam:
                        raise MeshError(f"non-planar 3D facet {fi}")
                self.facet_measure[fi] = area
                self.facet_centroid[fi] = pts.mean(axis=0)
                self.facet_normal[fi] = normal
                self.facet_diameter[fi] = diam

    def _check_closure(self) -> None:
        for ci, facets in enumerate(self.cell_facets):
            acc = np.zeros(self.dim)
            scale = 0.0
            for fi, sign in facets:
                acc += sign * self.facet_measure[fi] * self.facet_normal[fi]
                scale += self.facet_measure[fi]
            if np.linalg.norm(acc) > _CLOSURE_RTOL * scale:
                raise MeshError(f"cell {ci} fails the closed-polytope identity")

    def _attach_boundary_tags(self, tags) -> None:
        for tag, facet_list in tags.items():
            for fv in facet_list:
                key = frozenset(int(v) for v in fv)
                fi = self._facet_key_index.get(key)
                if fi is None:
                    raise MeshError(f"tag {tag!r} names a non-existent facet {sorted(key)}")
                if self.facet_cells[fi, 1] >= 0:
                    raise MeshError(f"tag {tag!r} names interior facet {fi}")
                self.boundary_tags[fi] = str(tag)

    # ------------------------------------------------------------------
    # public helpers
    # ------------------------------------------------------------------

    @property
    def num_cells(self) -> int:
        return len(self.cells)

    @property
    def num_facets(self) -> int:
        return len(self.facet_vertices)

    @property
    def mesh_size(self) -> float:
        """Largest cell diameter."""
        return float(self.cell_diameter.max())

    def facet_cell(self, fi: int) -> int:
        """The single adjacent cell of a boundary facet."""
        if self.facet_cells[fi, 1] >= 0:
            raise MeshError(f"facet {fi} is interior")
        return int(self.facet_cells[fi, 0])

    def facets_with_tag(self, tag: str) -> np.ndarray:
        return np.array(
            sorted(fi for fi, t in self.boundary_tags.items() if t == tag),
            dtype=int,
        )

    def __repr__(self) -> str:
        return (
            f"Mesh(dim={self.dim}, cells={self.num_cells}, "
            f"facets={self.num_facets}, tags={sorted(set(self.boundary_tags.values()))})"
        )


def facet_classification(mesh: Mesh, dirichlet_tags=None, predicate=None) -> FacetPartition:
    """Split facets into interior, Dirichlet and Neumann sets.

    Args:
        mesh: the mesh.
        dirichlet_tags: collection of tag names treated as Dirichlet.
        predicate: alternatively, a callable tag -> bool.

    Raises:
        MeshError: if a boundary facet carries no tag.
    """
    if predicate is None:
        tags = set(dirichlet_tags or ())
        predicate = tags.__contains__
    dirichlet, neumann = [], []
    for fi in mesh.boundary_facets:
        tag = mesh.boundary_tags.get(int(fi))
        if tag is None:
            raise MeshError(f"boundary facet {fi} has no tag")
        (dirichlet if predicate(tag) else neumann).append(int(fi))
    return FacetPartition(
        interior=mesh.interior_facets.copy(),
        dirichlet=np.array(dirichlet, dtype=int),
        neumann=np.array(neumann, dtype=int),
    )


# ----------------------------------------------------------------------
# generators
# ----------------------------------------------------------------------


def generate_rect_mesh(lx, ly, nx, ny, origin=(0.0, 0.0)) -> Mesh:
    """Structured triangulation of an axis-aligned rectangle.

    Each of the nx*ny sub-rectangles is split into two triangles along the
    same diagonal, giving 2*nx*ny cells.  Boundary edges are tagged
    left/right (x = min/max) and bottom/top (y = min/max).
    """
    if nx < 1 or ny < 1:
        raise MeshError("nx and ny must be at least 1")
    x0, y0 = origin
    xs = x0 + np.linspace(0.0, lx, nx + 1)
    ys = y0 + np.linspace(0.0, ly, ny + 1)
    verts = np.array([[x, y] for y in ys for x in xs])

    def vid(i, j):
        return j * (nx + 1) + i

    cells = []
    for j in range(ny):
        for i in range(nx):
            a, b = vid(i, j), vid(i + 1, j)
            c, d = vid(i + 1, j + 1), vid(i, j + 1)
            cells.append((a, b, c))
            cells.append((a, c, d))
    tags = {"left": [], "right": [], "bottom": [], "top": []}
    for j in range(ny):
        tags["left"].append((vid(0, j), vid(0, j + 1)))
        tags["right"].append((vid(nx, j), vid(nx, j + 1)))
    for i in range(nx):
        tags["bottom"].append((vid(i, 0), vid(i + 1, 0)))
        tags["top"].append((vid(i, ny), vid(i + 1, ny)))
    return Mesh(verts, cells, tags)


def generate_quarter_plate_mesh(hole_radius, width, nr, nt, grading=1.0) -> Mesh:
    """Graded polar mesh of a quarter square plate with a quarter hole.

    The domain is [0, width]^2 minus the quarter disc of ``hole_radius``
    at the origin. A transfinite grid sweeps nt angular intervals over
    [0, pi/2] and nr radial intervals from the hole rim to the outer
    square, geometrically graded toward the rim (``grading`` > 1 biases
    points toward the hole beyond plain geometric spacing). Each quad is
    split into two triangles. Boundary tags: hole, bottom (y = 0), left
    (x = 0), right (x = width), top (y = width).

    ``nt`` must be even so a grid ray hits the square corner exactly.
    """
    if nt % 2:
        raise MeshError("nt must be even (a grid line must pass the corner)")
    if hole_radius <= 0 or hole_radius >= width:
        raise MeshError("hole radius must lie strictly inside the plate")
    theta = np.linspace(0.0, np.pi / 2.0, nt + 1)
    r_out = width / np.maximum(np.cos(theta), np.sin(theta))

    s = np.linspace(0.0, 1.0, nr + 1) ** grading
    # radius grows geometrically from the rim to the (angle-dependent) edge
    radii = hole_radius * (r_out[None, :] / hole_radius) ** s[:, None]
    verts = np.empty(((nr + 1) * (nt + 1), 2))
    for i in range(nr + 1):
        for j in range(nt + 1):
            verts[i * (nt + 1) + j] = radii[i, j] * np.array(
                [np.cos(theta[j]), np.sin(theta[j])])
    # snap the outer ring onto the square exactly
    for j in range(nt + 1):
        k = nr * (nt + 1) + j
        x, y = verts[k]
        if x >= y:
            verts[k] = [width, width * y / x]
        else:
            verts[k] = [width * x / y, width]

    def vid(i, j):
        return i * (nt + 1) + j

    cells = []
    for i in range(nr):
        for j in range(nt):
            a, b = vid(i, j), vid(i + 1, j)
            c, d = vid(i + 1, j + 1), vid(i, j + 1)
            cells.append((a, b, c))
            cells.append((a, c, d))

    tags = {"hole": [], "bottom": [], "left": [], "right": [], "top": []}
    for j in range(nt):
        tags["hole"].append((vid(0, j), vid(0, j + 1)))
        mid = 0.5 * (verts[vid(nr, j)] + verts[vid(nr, j + 1)])
        tags["right" if mid[0] > mid[1] else "top"].append(
            (vid(nr, j), vid(nr, j + 1)))
    for i in range(nr):
        tags["bottom"].append((vid(i, 0), vid(i + 1, 0)))
        tags["left"].append((vid(i, nt), vid(i + 1, nt)))
    return Mesh(verts, cells, tags)


def generate_box_mesh(lx, ly, lz, nx, ny, nz, origin=(0.0, 0.0, 0.0), jitter=0.0, seed=0) -> Mesh:
    """Tetrahedral mesh of an axis-aligned box (six tets per sub-cube).

    The split follows the main cube diagonal, so neighbouring cubes share
    matching triangulations.  ``jitter`` moves interior vertices by a
    uniform random fraction of the local spacing (deterministic for a given
    ``seed``), which turns the grid into a genuinely unstructured tet mesh
    while keeping the boundary flat.

    Boundary faces are tagged left/right (x), bottom/top (y), back/front (z).
    """
    if min(nx, ny, nz) < 1:
        raise MeshError("nx, ny, nz must be at least 1")
    x0, y0, z0 = origin
    xs = x0 + np.linspace(0.0, lx, nx + 1)
    ys = y0 + np.linspace(0.0, ly, ny + 1)
    zs = z0 + np.linspace(0.0, lz, nz + 1)
    verts = np.array([[x, y, z] for z in zs for y in ys for x in xs])

    def vid(i, j, k):
        return (k * (ny + 1) + j) * (nx + 1) + i

    if jitter > 0.0:
        rng = np.random.default_rng(seed)
        h = min(lx / nx, ly / ny, lz / nz)
        for k in range(1, nz):
            for j in range(1, ny):
                for i in range(1, nx):
                    verts[vid(i, j, k)] += rng.uniform(-jitter, jitter, 3) * h

    # Kuhn split: six tets around the (0,0,0)-(1,1,1) diagonal.
    corner_paths = [
        (0, 1, 3), (0, 1, 5), (0, 2, 3), (0, 2, 6), (0, 4, 5), (0, 4, 6),
    ]
    corners = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 0),
               (0, 0, 1), (1, 0, 1), (0, 1, 1), (1, 1, 1)]
    cells = []
    for k in range(nz):
        for j in range(ny):
            for i in range(nx):
                local = [vid(i + dx, j + dy, k + dz) for dx, dy, dz in corners]
                for path in corner_paths:
                    cells.append((local[path[0]], local[path[1]], local[path[2]], local[7]))

    tags = {"left": [], "right": [], "bottom": [], "top": [], "back": [], "front": []}

    def quad_tris(q):
        # candidate triangles for both diagonals; non-existent ones are
        # filtered against the real facet set below
        return [(q[0], q[1], q[2]), (q[0], q[2], q[3]),
                (q[0], q[1], q[3]), (q[1], q[2], q[3])]

    for k in range(nz):
        for j in range(ny):
            for q in quad_tris((vid(0, j, k), vid(0, j + 1, k), vid(0, j + 1, k + 1), vid(0, j, k + 1))):
                tags["left"].append(q)
            for q in quad_tris((vid(nx, j, k), vid(nx, j + 1, k), vid(nx, j + 1, k + 1), vid(nx, j, k + 1))):
                tags["right"].append(q)
    for k in range(nz):
        for i in range(nx):
            for q in quad_tris((vid(i, 0, k), vid(i + 1, 0, k), vid(i + 1, 0, k + 1), vid(i, 0, k + 1))):
                tags["bottom"].append(q)
            for q in quad_tris((vid(i, ny, k), vid(i + 1, ny, k), vid(i + 1, ny, k + 1), vid(i, ny, k + 1))):
                tags["top"].append(q)
    for j in range(ny):
        for i in range(nx):
            for q in quad_tris((vid(i, j, 0), vid(i + 1, j, 0), vid(i + 1, j + 1, 0), vid(i, j + 1, 0))):
                tags["back"].append(q)
            for q in quad_tris((vid(i, j, nz), vid(i + 1, j, nz), vid(i + 1, j + 1, nz), vid(i, j + 1, nz))):
                tags["front"].append(q)

    # the Kuhn split puts both diagonal triangles of every boundary quad in
    # the mesh only for one of the two diagonals; match them by facet key
    mesh = Mesh(verts, cells)
    matched: dict[str, list] = {t: [] for t in tags}
    for tag, tris in tags.items():
        for tri in tris:
            if frozenset(tri) in mesh._facet_key_index:
                matched[tag].append(tri)
    # rebuild with only the tags that name real facets, then demand that
    # every boundary facet got one
    mesh = Mesh(verts, cells, matched)
    untagged = [fi for fi in mesh.boundary_facets if int(fi) not in mesh.boundary_tags]
    if untagged:
        raise MeshError(f"box generator left {len(untagged)} boundary facets untagged")
    return mesh


# ----------------------------------------------------------------------
# file loaders
# ----------------------------------------------------------------------


def save_mesh_json(mesh: Mesh, path) -> None:
    """Write the internal JSON mesh format."""
    tags: dict[str, list] = {}
    for fi, tag in sorted(mesh.boundary_tags.items()):
        tags.setdefault(tag, []).append([int(v) for v in mesh.facet_vertices[fi]])
    doc = {
        "dim": mesh.dim,
        "vertices": mesh.vertices.tolist(),
        "cells": [list(c) for c in mesh.cells],
        "boundary_tags": tags,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)


def load_mesh_json(path) -> Mesh:
    """Load the internal JSON mesh format (simplicial cells only)."""
    with open(path) as fh:
        doc = json.load(fh)
    try:
        dim = int(doc["dim"])
        vertices = np.asarray(doc["vertices"], dtype=float)
        cells = doc["cells"]
        tags = doc.get("boundary_tags", {})
    except (KeyError, TypeError, ValueError) as exc:
        raise MeshError(f"malformed mesh JSON: {exc}") from exc
    if vertices.ndim != 2 or vertices.shape[1] != dim:
        raise MeshError("vertex array does not match declared dimension")
    want = dim + 1
    for c in cells:
        if len(c) != want:
            raise MeshError("file loader accepts simplicial cells only")
    return Mesh(vertices, cells, tags)


_GMSH_SIMPLEX = {1: 2, 2: 3, 4: 4}  # element type -> node count (line, tri, tet)


def load_mesh_gmsh(path) -> Mesh:
    """Load a Gmsh MSH 2.2 ASCII file (simplicial elements only).

    Physical tags on codimension-one elements become boundary facet tags,
    named through $PhysicalNames when present and by the numeric physical id
    otherwise.
    """
    with open(path) as fh:
        lines = [ln.strip() for ln in fh]
    sections: dict[str, list[str]] = {}
    i = 0
    while i < len(lines):
        ln = lines[i]
        if ln.startswith("$") and not ln.startswith("$End"):
            name = ln[1:]
            j = i + 1
            body = []
            endmark = f"$End{name}"
            while j < len(lines) and lines[j] != endmark:
                body.append(lines[j])
                j += 1
            if j == len(lines):
                raise MeshError(f"unterminated section ${name}")
            sections[name] = body
            i = j + 1
        else:
            i += 1
    if "MeshFormat" not in sections:
        raise MeshError("not a Gmsh MSH file")
    fmt = sections["MeshFormat"][0].split()
    if not fmt or not fmt[0].startswith("2.2"):
        raise MeshError(f"unsupported MSH version {fmt[0] if fmt else '?'} (need 2.2)")
    if fmt[1] != "0":
        raise MeshError("binary MSH files are not supported")
    if "Nodes" not in sections or "Elements" not in sections:
        raise MeshError("MSH file lacks $Nodes or $Elements")

    node_lines = sections["Nodes"]
    nn = int(node_lines[0])
    node_ids = {}
    coords = np.empty((nn, 3))
    for k, ln in enumerate(node_lines[1 : 1 + nn]):
        parts = ln.split()
        node_ids[int(parts[0])] = k
        coords[k] = [float(parts[1]), float(parts[2]), float(parts[3])]

    phys_names = {}
    for ln in sections.get("PhysicalNames", [])[1:]:
        parts = ln.split(maxsplit=2)
        if len(parts) == 3:
            phys_names[int(parts[1])] = parts[2].strip().strip('"')

    elem_lines = sections["Elements"]
    ne = int(elem_lines[0])
    tris, tets, lines_el, tri_faces = [], [], [], []
    for ln in elem_lines[1 : 1 + ne]:
        parts = [int(p) for p in ln.split()]
        etype = parts[1]
        if etype not in _GMSH_SIMPLEX:
            raise MeshError(f"unsupported element type {etype} (simplicial only)")
        ntags = parts[2]
        phys = parts[3] if ntags >= 1 else 0
        nodes = [node_ids[p] for p in parts[3 + ntags :]]
        if etype == 1:
            lines_el.append((phys, nodes))
        elif etype == 2:
            tris.append((phys, nodes))
        else:
            tets.append((phys, nodes))

    if tets:
        dim = 3
        cells = [n for _, n in tets]
        boundary = tris
    elif tris:
        dim = 2
        cells = [n for _, n in tris]
        boundary = lines_el
    else:
        raise MeshError("no triangle or tetrahedron elements found")
    if dim == 2:
        if np.abs(coords[:, 2]).max() > 1e-12 * (1.0 + np.abs(coords).max()):
            raise MeshError("triangle mesh with non-zero z coordinates")
        vertices = coords[:, :2]
    else:
        vertices = coords

    tags: dict[str, list] = {}
    for phys, nodes in boundary:
        name = phys_names.get(phys, str(phys))
        tags.setdefault(name, []).append(nodes)
    return Mesh(vertices, cells, tags)


def load_mesh(path) -> Mesh:
    """Load a mesh file, dispatching on extension (.json or .msh)."""
    p = str(path)
    if p.endswith(".json"):
        return load_mesh_json(p)
    if p.endswith(".msh"):
        return load_mesh_gmsh(p)
    raise MeshError(f"unknown mesh format: {p}")
