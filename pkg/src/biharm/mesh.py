"""Triangle meshes of the unit square and of a polygonal unit disk.

Meshes are immutable: vertex coordinates, counterclockwise triangles and
oriented boundary edges (domain on the left, so the outward normal is the
tangent rotated by -90 degrees). Every constructor and the text-format
reader validate the full invariant set: positive triangle areas, area sum
equal to the shoelace area of the boundary loop, interior edges shared by
exactly two triangles and boundary edges by exactly one, a single closed
boundary loop, and the Euler relation V - E + F = 1.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path
from typing import TextIO

import numpy as np

__all__ = [
    "DomainTag",
    "Mesh",
    "MeshValidationError",
    "MeshFormatError",
    "unit_square_mesh",
    "unit_disk_mesh",
    "refine_uniform",
    "write_mesh",
    "read_mesh",
]

AREA_RTOL = 1e-12

# Text format magic line; version suffix guards future layout changes.
FORMAT_MAGIC = "biharm-mesh v1"


class DomainTag(enum.Enum):
    UNIT_SQUARE = "unit_square"
    UNIT_DISK_POLYGON = "unit_disk_polygon"


class MeshValidationError(ValueError):
    """A mesh invariant does not hold."""


class MeshFormatError(ValueError):
    """Mesh file is malformed; carries the 1-based offending line when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class Mesh:
    """Immutable triangulation with oriented boundary.

    Parameters
    ----------
    vertices : (V, 2) float array
    triangles : (T, 3) int array, each row counterclockwise
    boundary_edges : (B, 3) int array of (start, end, marker), oriented so
        the domain lies on the left
    domain_tag : DomainTag
    """

    vertices: np.ndarray
    triangles: np.ndarray
    boundary_edges: np.ndarray
    domain_tag: DomainTag

    def __post_init__(self):
        v = np.ascontiguousarray(np.asarray(self.vertices, dtype=float))
        t = np.ascontiguousarray(np.asarray(self.triangles, dtype=np.int64))
        b = np.ascontiguousarray(np.asarray(self.boundary_edges, dtype=np.int64))
        if v.ndim != 2 or v.shape[1] != 2:
            raise MeshValidationError("vertices must be a (V, 2) array")
        if t.ndim != 2 or t.shape[1] != 3:
            raise MeshValidationError("triangles must be a (T, 3) array")
        if b.ndim != 2 or b.shape[1] != 3:
            raise MeshValidationError("boundary_edges must be a (B, 3) array")
        for arr in (v, t, b):
            arr.flags.writeable = False
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "triangles", t)
        object.__setattr__(self, "boundary_edges", b)
        self.validate()

    @property
    def num_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def num_triangles(self) -> int:
        return self.triangles.shape[0]

    @property
    def num_boundary_edges(self) -> int:
        return self.boundary_edges.shape[0]

    def signed_areas(self) -> np.ndarray:
        p = self.vertices[self.triangles]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    def area(self) -> float:
        return float(self.signed_areas().sum())

    def undirected_edges(self) -> np.ndarray:
        """Distinct undirected edges as sorted (lo, hi) pairs, lexicographic."""
        t = self.triangles
        pairs = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        pairs.sort(axis=1)
        return np.unique(pairs, axis=0)

    def boundary_loop(self) -> np.ndarray:
        """Boundary vertices in traversal order; raises unless one closed loop."""
        edges = self.boundary_edges
        succ = {int(a): int(b) for a, b, _ in edges}
        if len(succ) != len(edges):
            raise MeshValidationError("boundary vertex repeats as an edge start")
        start = int(edges[0, 0])
        loop = [start]
        cur = succ[start]
        while cur != start:
            loop.append(cur)
            if cur not in succ:
                raise MeshValidationError("boundary walk left the edge set")
            cur = succ[cur]
            if len(loop) > len(edges):
                raise MeshValidationError("boundary walk does not close")
        if len(loop) != len(edges):
            raise MeshValidationError("boundary edges form more than one loop")
        return np.array(loop, dtype=np.int64)

    def validate(self) -> None:
        """Check all mesh invariants; raise MeshValidationError on the first failure."""
        v, t, b = self.vertices, self.triangles, self.boundary_edges
        if not np.isfinite(v).all():
            raise MeshValidationError("non-finite vertex coordinate")
        if t.size and (t.min() < 0 or t.max() >= len(v)):
            raise MeshValidationError("triangle vertex index out of range")
        if b.size and (b[:, :2].min() < 0 or b[:, :2].max() >= len(v)):
            raise MeshValidationError("boundary edge vertex index out of range")
        if len(t) == 0:
            raise MeshValidationError("mesh has no triangles")

        areas = self.signed_areas()
        if not (areas > 0).all():
            bad = int(np.argmin(areas))
            raise MeshValidationError(
                f"triangle {bad} is not counterclockwise (signed area {areas[bad]:.3e})"
            )

        # Edge incidence: directed edges of CCW triangles; an undirected edge
        # seen once is boundary, twice (in opposite directions) is interior.
        directed = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        directed_set = {(int(a), int(bb)) for a, bb in directed}
        if len(directed_set) != len(directed):
            raise MeshValidationError("duplicated directed edge (overlapping triangles)")
        und = np.sort(directed, axis=1)
        und_unique, counts = np.unique(und, axis=0, return_counts=True)
        if counts.max() > 2:
            raise MeshValidationError("an edge is shared by more than two triangles")
        boundary_expected = {
            (int(lo), int(hi)) for (lo, hi), c in zip(und_unique, counts) if c == 1
        }
        boundary_listed = {(int(min(a, bb)), int(max(a, bb))) for a, bb, _ in b}
        if boundary_listed != boundary_expected:
            raise MeshValidationError(
                "boundary_edges do not match the triangulation's once-seen edges"
            )
        for a, bb, _ in b:
            if (int(a), int(bb)) not in directed_set:
                raise MeshValidationError(
                    f"boundary edge ({a}, {bb}) disagrees with triangle orientation"
                )

        loop = self.boundary_loop()

        # Area consistency: triangle areas against the shoelace of the loop.
        pts = v[loop]
        nxt = np.roll(pts, -1, axis=0)
        loop_area = 0.5 * float(np.sum(pts[:, 0] * nxt[:, 1] - nxt[:, 0] * pts[:, 1]))
        total = float(areas.sum())
        if abs(total - loop_area) > AREA_RTOL * max(abs(loop_area), 1.0):
            raise MeshValidationError(
                f"triangle area sum {total!r} mismatches boundary loop area {loop_area!r}"
            )

        n_edges = len(und_unique)
        euler = len(v) - n_edges + len(t)
        if euler != 1:
            raise MeshValidationError(f"Euler relation violated: V - E + F = {euler}")


def unit_square_mesh(n: int) -> Mesh:
    """Structured triangulation of [0,1]^2 with n cells per side.

    Each grid cell is split along its bottom-left to top-right diagonal,
    giving (n+1)^2 vertices and 2 n^2 triangles. Boundary markers: 0 on
    y=0, 1 on x=1, 2 on y=1, 3 on x=0, with the loop oriented
    counterclockwise.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    idx = lambda i, j: j * (n + 1) + i
    g = np.linspace(0.0, 1.0, n + 1)
    xx, yy = np.meshgrid(g, g)
    vertices = np.column_stack([xx.ravel(), yy.ravel()])

    tris = []
    for j in range(n):
        for i in range(n):
            v00, v10 = idx(i, j), idx(i + 1, j)
            v01, v11 = idx(i, j + 1), idx(i + 1, j + 1)
            tris.append((v00, v10, v11))
            tris.append((v00, v11, v01))

    edges = []
    for i in range(n):  # bottom, left to right
        edges.append((idx(i, 0), idx(i + 1, 0), 0))
    for j in range(n):  # right, bottom to top
        edges.append((idx(n, j), idx(n, j + 1), 1))
    for i in range(n, 0, -1):  # top, right to left
        edges.append((idx(i, n), idx(i - 1, n), 2))
    for j in range(n, 0, -1):  # left, top to bottom
        edges.append((idx(0, j), idx(0, j - 1), 3))

    return Mesh(vertices, np.array(tris), np.array(edges), DomainTag.UNIT_SQUARE)


def unit_disk_mesh(rings: int) -> Mesh:
    """Polygonal approximation of the unit disk from concentric rings.

    Ring k (1 <= k <= rings) carries 6k vertices at radius k/rings, plus
    the center vertex; the strip between consecutive rings is filled with
    a fan of triangles. ``rings=1`` gives the regular hexagon (7 vertices,
    6 triangles). All boundary edges carry marker 0. The mesh covers the
    inscribed polygon, not the exact disk.
    """
    if rings < 1:
        raise ValueError("rings must be at least 1")
    verts = [(0.0, 0.0)]
    ring_start = [None, 1]
    for k in range(1, rings + 1):
        m = np.arange(6 * k)
        theta = 2.0 * np.pi * m / (6 * k)
        r = k / rings
        verts.extend(zip(r * np.cos(theta), r * np.sin(theta)))
        ring_start.append(ring_start[k] + 6 * k)

    tris = []
    for k in range(1, rings + 1):
        outer = ring_start[k]
        n_out = 6 * k
        if k == 1:
            for s in range(6):
                tris.append((outer + s, outer + (s + 1) % 6, 0))
            continue
        inner = ring_start[k - 1]
        n_in = 6 * (k - 1)
        for s in range(6):
            O = [outer + (s * k + j) % n_out for j in range(k + 1)]
            I = [inner + (s * (k - 1) + j) % n_in for j in range(k)]
            for j in range(k):
                tris.append((O[j], O[j + 1], I[j]))
            for j in range(k - 1):
                tris.append((O[j + 1], I[j + 1], I[j]))

    outer = ring_start[rings]
    n_out = 6 * rings
    edges = [(outer + m, outer + (m + 1) % n_out, 0) for m in range(n_out)]

    return Mesh(
        np.array(verts), np.array(tris), np.array(edges), DomainTag.UNIT_DISK_POLYGON
    )


def refine_uniform(mesh: Mesh) -> Mesh:
    """Split every triangle into four by edge midpoints.

    Original vertices keep their indices and coordinates; midpoint
    vertices are appended in lexicographic edge order. Boundary edges are
    split in two, inheriting marker and orientation, so markers, the loop
    and the total area are all preserved.
    """
    edges = mesh.undirected_edges()
    edge_rank = {(int(a), int(b)): k for k, (a, b) in enumerate(edges)}
    mids = 0.5 * (mesh.vertices[edges[:, 0]] + mesh.vertices[edges[:, 1]])
    vertices = np.vstack([mesh.vertices, mids])
    base = mesh.num_vertices

    def mid(a: int, b: int) -> int:
        return base + edge_rank[(a, b) if a < b else (b, a)]

    tris = []
    for v0, v1, v2 in mesh.triangles:
        m01, m12, m20 = mid(v0, v1), mid(v1, v2), mid(v2, v0)
        tris.extend([(v0, m01, m20), (v1, m12, m01), (v2, m20, m12), (m01, m12, m20)])

    bedges = []
    for a, b, marker in mesh.boundary_edges:
        m = mid(int(a), int(b))
        bedges.append((a, m, marker))
        bedges.append((m, b, marker))

    return Mesh(vertices, np.array(tris), np.array(bedges), mesh.domain_tag)


def write_mesh(mesh: Mesh, destination: str | Path | TextIO) -> None:
    """Write the plain-text mesh format (full-precision decimal floats).

    Coordinates are written with repr, which round-trips float64 exactly,
    so write followed by read reproduces the mesh bit for bit.
    """
    if hasattr(destination, "write"):
        _write_mesh_stream(mesh, destination)
        return
    with open(destination, "w", encoding="ascii") as fh:
        _write_mesh_stream(mesh, fh)


def _write_mesh_stream(mesh: Mesh, fh: TextIO) -> None:
    fh.write(f"{FORMAT_MAGIC}\n")
    fh.write(f"vertices {mesh.num_vertices}\n")
    for x, y in mesh.vertices:
        fh.write(f"{float(x)!r} {float(y)!r}\n")
    fh.write(f"triangles {mesh.num_triangles}\n")
    for a, b, c in mesh.triangles:
        fh.write(f"{a} {b} {c}\n")
    fh.write(f"boundary {mesh.num_boundary_edges}\n")
    for a, b, m in mesh.boundary_edges:
        fh.write(f"{a} {b} {m}\n")


def read_mesh(source: str | Path | TextIO, domain_tag: DomainTag | None = None) -> Mesh:
    """Read the plain-text mesh format and validate all mesh invariants.

    Raises MeshFormatError with a 1-based line number for malformed input,
    including triangles stored with negative orientation. ``domain_tag``
    defaults to UNIT_SQUARE when all vertices lie in [0,1]^2 and
    UNIT_DISK_POLYGON otherwise; pass it explicitly to override.
    """
    if hasattr(source, "read"):
        lines = source.read().splitlines()
    else:
        lines = Path(source).read_text(encoding="ascii").splitlines()

    pos = 0

    def next_line() -> tuple[int, str]:
        nonlocal pos
        while pos < len(lines):
            pos += 1
            stripped = lines[pos - 1].strip()
            if stripped:
                return pos, stripped
        raise MeshFormatError("unexpected end of file", line=len(lines) or 1)

    def section(name: str) -> tuple[int, int]:
        ln, text = next_line()
        parts = text.split()
        if len(parts) != 2 or parts[0] != name:
            raise MeshFormatError(f"expected '{name} <count>', got {text!r}", line=ln)
        try:
            count = int(parts[1])
        except ValueError:
            raise MeshFormatError(f"bad {name} count {parts[1]!r}", line=ln) from None
        if count < 0:
            raise MeshFormatError(f"negative {name} count", line=ln)
        return ln, count

    ln, text = next_line()
    if text != FORMAT_MAGIC:
        raise MeshFormatError(f"bad header {text!r}, expected {FORMAT_MAGIC!r}", line=ln)

    _, nv = section("vertices")
    vertices = np.empty((nv, 2))
    for k in range(nv):
        ln, text = next_line()
        parts = text.split()
        try:
            if len(parts) != 2:
                raise ValueError
            vertices[k] = [float(parts[0]), float(parts[1])]
        except ValueError:
            raise MeshFormatError(f"bad vertex line {text!r}", line=ln) from None

    _, nt = section("triangles")
    triangles = np.empty((nt, 3), dtype=np.int64)
    tri_lines = np.empty(nt, dtype=np.int64)
    for k in range(nt):
        ln, text = next_line()
        parts = text.split()
        try:
            if len(parts) != 3:
                raise ValueError
            triangles[k] = [int(p) for p in parts]
        except ValueError:
            raise MeshFormatError(f"bad triangle line {text!r}", line=ln) from None
        tri_lines[k] = ln

    _, nb = section("boundary")
    bedges = np.empty((nb, 3), dtype=np.int64)
    for k in range(nb):
        ln, text = next_line()
        parts = text.split()
        try:
            if len(parts) != 3:
                raise ValueError
            bedges[k] = [int(p) for p in parts]
        except ValueError:
            raise MeshFormatError(f"bad boundary edge line {text!r}", line=ln) from None

    if triangles.size and (triangles.min() < 0 or triangles.max() >= nv):
        raise MeshFormatError("triangle vertex index out of range")
    # Orientation is checked here so the error can point at the file line.
    p = vertices[triangles] if nt else np.empty((0, 3, 2))
    areas = 0.5 * (
        (p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
        - (p[:, 1, 1] - p[:, 0, 1]) * (p[:, 2, 0] - p[:, 0, 0])
    )
    if nt and areas.min() <= 0:
        bad = int(np.argmin(areas))
        raise MeshFormatError(
            f"triangle is not counterclockwise (signed area {areas[bad]:.3e})",
            line=int(tri_lines[bad]),
        )

    if domain_tag is None:
        in_square = nv > 0 and vertices.min() >= -1e-12 and vertices.max() <= 1 + 1e-12
        domain_tag = DomainTag.UNIT_SQUARE if in_square else DomainTag.UNIT_DISK_POLYGON

    try:
        return Mesh(vertices, triangles, bedges, domain_tag)
    except MeshValidationError as exc:
        raise MeshFormatError(str(exc)) from exc
