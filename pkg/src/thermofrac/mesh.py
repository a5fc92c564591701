"""Deterministic triangular meshes for the simulator's domains.

Generation is fully structured: rectangles are grids of quads split along
mirror-symmetric diagonals, circular holes become inscribed polygons carved
with exactly conforming boundaries, corridor grading uses longest-edge
bisection, and the sharp notch of the slit domains is realized by
duplicating nodes along the crack faces.  No randomness anywhere; repeated
generation is bitwise identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

_KINDS = ("unit_square_2x2", "lshape", "square_with_holes", "rectangle")

#: Snap tolerance for on-line / on-boundary classification, relative to
#: the local feature size.
_GEOM_TOL = 1.0e-12


@dataclass(frozen=True)
class Hole:
    """A circular hole approximated by an inscribed polygon."""

    cx: float
    cy: float
    radius: float
    segments: int = 32

    def polygon(self) -> np.ndarray:
        """Counterclockwise vertex array of shape (segments, 2)."""
        k = np.arange(self.segments)
        ang = 2.0 * math.pi * k / self.segments
        return np.column_stack(
            [self.cx + self.radius * np.cos(ang), self.cy + self.radius * np.sin(ang)]
        )

    def polygon_area(self) -> float:
        n = self.segments
        return 0.5 * n * self.radius ** 2 * math.sin(2.0 * math.pi / n)


@dataclass(frozen=True)
class DomainSpec:
    """Geometry description consumed by `generate`.

    kind:
        ``unit_square_2x2`` is (-1,1)^2; ``rectangle`` uses ``bounds``;
        ``lshape`` is (-1,1)^2 minus the quadrant [0,1] x [0,1], a column
        with a beam sticking out to the lower right;
        ``square_with_holes`` is (-1,1)^2 minus polygonal holes.
    slit:
        Cut the square along x2 = 0 for x1 <= ``slit_tip_x`` by duplicating
        the nodes on the crack faces (the tip node stays single).
    """

    kind: str = "unit_square_2x2"
    bounds: tuple[float, float, float, float] = (-1.0, 1.0, -1.0, 1.0)
    holes: tuple[Hole, ...] = ()
    slit: bool = False
    slit_tip_x: float = 0.5

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown domain kind {self.kind!r}")
        x0, x1, y0, y1 = self.bounds
        if x0 >= x1 or y0 >= y1:
            raise ValueError(f"degenerate bounds {self.bounds}")
        if self.kind != "rectangle" and self.bounds != (-1.0, 1.0, -1.0, 1.0):
            raise ValueError(f"{self.kind} fixes bounds to (-1,1)^2")
        if self.holes and self.kind != "square_with_holes":
            raise ValueError("holes require kind='square_with_holes'")
        if self.kind == "square_with_holes" and not self.holes:
            raise ValueError("square_with_holes needs at least one hole")
        if self.slit and self.kind not in ("unit_square_2x2", "rectangle"):
            raise ValueError("slit only supported on plain rectangles")
        for h in self.holes:
            if not (x0 < h.cx - h.radius and h.cx + h.radius < x1
                    and y0 < h.cy - h.radius and h.cy + h.radius < y1):
                raise ValueError(f"hole at ({h.cx}, {h.cy}) not strictly inside")
        for i, a in enumerate(self.holes):
            for b in self.holes[i + 1:]:
                if math.hypot(a.cx - b.cx, a.cy - b.cy) <= a.radius + b.radius:
                    raise ValueError("holes overlap")

    def analytic_area(self) -> float:
        x0, x1, y0, y1 = self.bounds
        area = (x1 - x0) * (y1 - y0)
        if self.kind == "lshape":
            area -= 1.0
        area -= sum(h.polygon_area() for h in self.holes)
        return area


@dataclass(frozen=True)
class GradingSpec:
    """Refinement corridor: every triangle whose bounding box meets one of
    the boxes is bisected until its longest edge is at most 1.5*h_min."""

    boxes: tuple[tuple[float, float, float, float], ...]
    h_min: float

    def __post_init__(self) -> None:
        if self.h_min <= 0.0:
            raise ValueError("h_min must be positive")
        for x0, x1, y0, y1 in self.boxes:
            if x0 >= x1 or y0 >= y1:
                raise ValueError("degenerate grading box")


@dataclass(frozen=True, eq=False)
class Mesh:
    """Immutable conforming triangulation with tagged boundary edges.

    ``tris`` rows are counterclockwise; ``boundary_edges`` rows are node
    pairs (sorted, lexicographic order) with a parallel tag-id array and a
    name -> id map in ``tags``.
    """

    nodes: np.ndarray
    tris: np.ndarray
    boundary_edges: np.ndarray
    edge_tag_ids: np.ndarray
    tags: dict[str, int] = field(default_factory=lambda: {"untagged": 0})

    def __post_init__(self) -> None:
        for name in ("nodes", "tris", "boundary_edges", "edge_tag_ids"):
            arr = getattr(self, name)
            arr.setflags(write=False)
        if np.any(self.areas <= 0.0):
            bad = int(np.argmin(self.areas))
            raise ValueError(f"triangle {bad} has nonpositive area {self.areas[bad]}")

    # ---- derived geometry, cached per mesh --------------------------------

    @cached_property
    def areas(self) -> np.ndarray:
        p = self.nodes[self.tris]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        a = 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])
        a.setflags(write=False)
        return a

    @cached_property
    def grads(self) -> tuple[np.ndarray, np.ndarray]:
        """P1 shape-gradient coefficients (b, c), each of shape (M, 3).

        grad(phi_i) = (b[:, i], c[:, i]) on each triangle, with
        b_i = (y_j - y_k)/(2A) and c_i = (x_k - x_j)/(2A) cyclically.
        """
        p = self.nodes[self.tris]
        x = p[..., 0]
        y = p[..., 1]
        inv2a = 1.0 / (2.0 * self.areas)
        b = np.empty_like(x)
        c = np.empty_like(x)
        for i in range(3):
            j, k = (i + 1) % 3, (i + 2) % 3
            b[:, i] = (y[:, j] - y[:, k]) * inv2a
            c[:, i] = (x[:, k] - x[:, j]) * inv2a
        b.setflags(write=False)
        c.setflags(write=False)
        return b, c

    @cached_property
    def centroids(self) -> np.ndarray:
        c = self.nodes[self.tris].mean(axis=1)
        c.setflags(write=False)
        return c

    @cached_property
    def edge_lengths(self) -> np.ndarray:
        """Per-triangle edge lengths opposite each local vertex, shape (M, 3)."""
        p = self.nodes[self.tris]
        out = np.empty((len(self.tris), 3))
        for i in range(3):
            j, k = (i + 1) % 3, (i + 2) % 3
            out[:, i] = np.hypot(p[:, j, 0] - p[:, k, 0], p[:, j, 1] - p[:, k, 1])
        out.setflags(write=False)
        return out

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def tri_count(self) -> int:
        return len(self.tris)

    def h_max(self, boxes: tuple[tuple[float, float, float, float], ...] | None = None) -> float:
        """Longest edge, optionally restricted to triangles meeting boxes."""
        lengths = self.edge_lengths
        if boxes is None:
            return float(lengths.max())
        keep = _tris_meeting_boxes(self.nodes, self.tris, boxes)
        return float(lengths[keep].max()) if keep.any() else 0.0

    def edges_with_tag(self, tag: str) -> np.ndarray:
        tid = self.tags[tag]
        return self.boundary_edges[self.edge_tag_ids == tid]

    def nodes_with_tag(self, tag: str) -> np.ndarray:
        return np.unique(self.edges_with_tag(tag))


# ---- structured generation -------------------------------------------------

def _grid(spec: DomainSpec, target_h: float) -> tuple[list[list[float]], list[list[int]]]:
    x0, x1, y0, y1 = spec.bounds
    extent = max(x1 - x0, y1 - y0)
    n = max(2, math.ceil(extent / target_h))
    if spec.kind == "lshape" and n % 2:
        n += 1
    if spec.slit:
        # the slit tip and the crack line must be grid entities
        n = 4 * math.ceil(n / 4)
    if spec.kind == "square_with_holes" and n % 2:
        n += 1
    nx = ny = n
    xs = np.linspace(x0, x1, nx + 1)
    ys = np.linspace(y0, y1, ny + 1)
    nodes = [[float(xs[i]), float(ys[j])] for j in range(ny + 1) for i in range(nx + 1)]
    tris: list[list[int]] = []
    for j in range(ny):
        yc = 0.5 * (ys[j] + ys[j + 1])
        for i in range(nx):
            n00 = j * (nx + 1) + i
            n10 = n00 + 1
            n01 = n00 + (nx + 1)
            n11 = n01 + 1
            if yc > 0.0:
                # "/" diagonal; mirrored below the axis so the mesh is
                # symmetric under y -> -y (path-symmetry tests rely on it)
                tris.append([n00, n10, n11])
                tris.append([n00, n11, n01])
            else:
                tris.append([n00, n10, n01])
                tris.append([n10, n11, n01])
    if spec.kind == "lshape":
        kept = []
        for t in tris:
            cx = sum(nodes[v][0] for v in t) / 3.0
            cy = sum(nodes[v][1] for v in t) / 3.0
            if not (cx > 0.0 and cy > 0.0):
                kept.append(t)
        tris = kept
    return nodes, tris


def _compact(nodes: list[list[float]], tris: list[list[int]]) -> tuple[list[list[float]], list[list[int]]]:
    """Drop nodes not referenced by any triangle, preserving order."""
    used = sorted({v for t in tris for v in t})
    remap = {old: new for new, old in enumerate(used)}
    return [nodes[i] for i in used], [[remap[v] for v in t] for t in tris]


# ---- polygonal hole carving ------------------------------------------------

def _poly_side(poly: np.ndarray, pt: np.ndarray) -> tuple[int, float]:
    """Classify a point against a convex CCW polygon.

    Returns (side, dist): side is +1 inside, -1 outside, 0 on the boundary
    within tolerance; dist is the signed distance to the nearest edge line
    (positive inside).
    """
    d = np.roll(poly, -1, axis=0) - poly
    lengths = np.hypot(d[:, 0], d[:, 1])
    cross = d[:, 0] * (pt[1] - poly[:, 1]) - d[:, 1] * (pt[0] - poly[:, 0])
    signed = cross / lengths
    m = float(signed.min())
    tol = _GEOM_TOL * max(1.0, float(lengths.max()))
    if abs(m) <= tol:
        return 0, m
    return (1 if m > 0.0 else -1), m


def _segment_crossing(poly: np.ndarray, p: np.ndarray, q: np.ndarray) -> np.ndarray | None:
    """Intersection of segment p-q (p outside, q inside) with the polygon.

    The returned point is formed as a convex combination of the polygon
    edge endpoints so it sits on the polygon boundary to roundoff.
    """
    best = None
    for k in range(len(poly)):
        a = poly[k]
        b = poly[(k + 1) % len(poly)]
        r = q - p
        s = b - a
        denom = r[0] * s[1] - r[1] * s[0]
        if denom == 0.0:
            continue
        t = ((a[0] - p[0]) * s[1] - (a[1] - p[1]) * s[0]) / denom
        u = ((a[0] - p[0]) * r[1] - (a[1] - p[1]) * r[0]) / denom
        if -1e-12 <= t <= 1.0 + 1e-12 and -1e-9 <= u <= 1.0 + 1e-9:
            u = min(max(u, 0.0), 1.0)
            pt = (1.0 - u) * a + u * b
            if best is None or t < best[0]:
                best = (t, pt)
    return None if best is None else best[1]


def _carve_holes(nodes: list[list[float]], tris: list[list[int]], holes: tuple[Hole, ...]) -> tuple[list[list[float]], list[list[int]]]:
    for hole in holes:
        poly = hole.polygon()
        pts = np.asarray(nodes)
        # 1. vertex capture: move the nearest free mesh node onto each
        #    polygon vertex (deterministic order, no node captured twice)
        captured: set[int] = set()
        for v in poly:
            d2 = (pts[:, 0] - v[0]) ** 2 + (pts[:, 1] - v[1]) ** 2
            order = np.argsort(d2, kind="stable")
            for idx in order:
                if int(idx) not in captured:
                    captured.add(int(idx))
                    nodes[int(idx)] = [float(v[0]), float(v[1])]
                    break
        pts = np.asarray(nodes)
        side = np.array([_poly_side(poly, p)[0] for p in pts])

        # 2. cut every in/out edge at its boundary crossing, splitting both
        #    adjacent triangles so the mesh stays conforming
        adj: dict[tuple[int, int], list[int]] = {}
        for ti, t in enumerate(tris):
            for i in range(3):
                e = (min(t[i], t[(i + 1) % 3]), max(t[i], t[(i + 1) % 3]))
                adj.setdefault(e, []).append(ti)
        side_list = side.tolist()
        cut_edges = sorted(
            e for e in adj
            if side_list[e[0]] * side_list[e[1]] < 0
        )
        def has_edge(t: list[int], a: int, b: int) -> bool:
            return any({t[i], t[(i + 1) % 3]} == {a, b} for i in range(3))

        for a, b in cut_edges:
            pa, pb = np.asarray(nodes[a]), np.asarray(nodes[b])
            if side_list[a] < 0:
                crossing = _segment_crossing(poly, pa, pb)
            else:
                crossing = _segment_crossing(poly, pb, pa)
            if crossing is None:
                raise RuntimeError(f"no polygon crossing found for edge {(a, b)}")
            m = len(nodes)
            nodes.append([float(crossing[0]), float(crossing[1])])
            side_list.append(0)
            # adjacency entries may be stale after earlier splits; keep only
            # triangles that still carry this edge
            owners = sorted(x for x in adj[(a, b)] if has_edge(tris[x], a, b))
            for ti in owners:
                t = tris[ti]
                # split t = (v0, v1, v2) through m on edge {a, b}
                i = next(i for i in range(3) if {t[i], t[(i + 1) % 3]} == {a, b})
                v0, v1, v2 = t[i], t[(i + 1) % 3], t[(i + 2) % 3]
                child_a = [v0, m, v2]
                child_b = [m, v1, v2]
                tris[ti] = child_a
                tris.append(child_b)
                nb = len(tris) - 1
                # register both children on all their edges
                for tj, tt in ((ti, child_a), (nb, child_b)):
                    for k in range(3):
                        e = (min(tt[k], tt[(k + 1) % 3]), max(tt[k], tt[(k + 1) % 3]))
                        lst = adj.setdefault(e, [])
                        if tj not in lst:
                            lst.append(tj)

        # 3. drop triangles whose centroid landed inside the hole
        pts = np.asarray(nodes)
        kept = []
        for t in tris:
            c = pts[t].mean(axis=0)
            if _poly_side(poly, c)[0] < 0:
                kept.append(t)
        tris = kept
        nodes, tris = _compact(nodes, tris)
    return nodes, tris


# ---- longest-edge bisection grading ---------------------------------------

def _tris_meeting_boxes(nodes: np.ndarray, tris: np.ndarray, boxes) -> np.ndarray:
    p = np.asarray(nodes)[np.asarray(tris)]
    xmin, xmax = p[..., 0].min(axis=1), p[..., 0].max(axis=1)
    ymin, ymax = p[..., 1].min(axis=1), p[..., 1].max(axis=1)
    hit = np.zeros(len(p), dtype=bool)
    for bx0, bx1, by0, by1 in boxes:
        hit |= (xmax >= bx0) & (xmin <= bx1) & (ymax >= by0) & (ymin <= by1)
    return hit


class _Bisector:
    """Mutable triangulation supporting conforming longest-edge bisection."""

    def __init__(self, nodes: list[list[float]], tris: list[list[int]]):
        self.nodes = nodes
        self.tris: list[list[int] | None] = [list(t) for t in tris]
        self.adj: dict[tuple[int, int], list[int]] = {}
        for ti, t in enumerate(tris):
            for e in self._edges(t):
                self.adj.setdefault(e, []).append(ti)

    @staticmethod
    def _edges(t):
        return [
            (min(t[0], t[1]), max(t[0], t[1])),
            (min(t[1], t[2]), max(t[1], t[2])),
            (min(t[2], t[0]), max(t[2], t[0])),
        ]

    def _len2(self, e: tuple[int, int]) -> float:
        a, b = self.nodes[e[0]], self.nodes[e[1]]
        return (a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2

    def longest_edge(self, ti: int) -> tuple[int, int]:
        t = self.tris[ti]
        edges = self._edges(t)
        # unique winner under exact float comparison; index tie-break keeps
        # the choice deterministic for degenerate shapes
        return max(edges, key=lambda e: (self._len2(e), -e[0], -e[1]))

    def _neighbor(self, ti: int, e: tuple[int, int]) -> int | None:
        for x in self.adj.get(e, ()):
            if x != ti and self.tris[x] is not None:
                return x
        return None

    def _split(self, ti: int, e: tuple[int, int], m: int) -> None:
        t = self.tris[ti]
        i = next(i for i in range(3) if {t[i], t[(i + 1) % 3]} == set(e))
        v0, v1, v2 = t[i], t[(i + 1) % 3], t[(i + 2) % 3]
        child_a = [v0, m, v2]
        child_b = [m, v1, v2]
        for edge in self._edges(t):
            self.adj[edge] = [x for x in self.adj[edge] if x != ti]
        self.tris[ti] = None
        for child in (child_a, child_b):
            self.tris.append(child)
            ci = len(self.tris) - 1
            for edge in self._edges(child):
                self.adj.setdefault(edge, []).append(ci)

    def bisect(self, ti: int) -> None:
        """Rivara refinement of one triangle, propagating to keep the mesh
        conforming."""
        stack = [ti]
        while stack:
            s = stack[-1]
            if self.tris[s] is None:
                stack.pop()
                continue
            e = self.longest_edge(s)
            nbr = self._neighbor(s, e)
            if nbr is not None and self.longest_edge(nbr) != e:
                stack.append(nbr)
                continue
            a, b = e
            m = len(self.nodes)
            self.nodes.append([
                0.5 * (self.nodes[a][0] + self.nodes[b][0]),
                0.5 * (self.nodes[a][1] + self.nodes[b][1]),
            ])
            self._split(s, e, m)
            if nbr is not None:
                self._split(nbr, e, m)
            stack.pop()

    def alive(self) -> list[list[int]]:
        return [t for t in self.tris if t is not None]


def _grade(nodes: list[list[float]], tris: list[list[int]], grading: GradingSpec) -> tuple[list[list[float]], list[list[int]]]:
    bis = _Bisector(nodes, tris)
    threshold2 = (1.5 * grading.h_min) ** 2
    while True:
        marked = []
        for ti, t in enumerate(bis.tris):
            if t is None:
                continue
            e = bis.longest_edge(ti)
            if bis._len2(e) <= threshold2:
                continue
            p = np.asarray([bis.nodes[v] for v in t])
            xmin, xmax = p[:, 0].min(), p[:, 0].max()
            ymin, ymax = p[:, 1].min(), p[:, 1].max()
            for bx0, bx1, by0, by1 in grading.boxes:
                if xmax >= bx0 and xmin <= bx1 and ymax >= by0 and ymin <= by1:
                    marked.append(ti)
                    break
        if not marked:
            break
        for ti in marked:
            if bis.tris[ti] is not None:
                bis.bisect(ti)
    return bis.nodes, bis.alive()


# ---- slit duplication ------------------------------------------------------

def _cut_slit(nodes: list[list[float]], tris: list[list[int]], tip_x: float) -> tuple[list[list[float]], list[list[int]]]:
    on_line = [
        i for i, (x, y) in enumerate(nodes)
        if abs(y) <= _GEOM_TOL and x < tip_x - _GEOM_TOL
    ]
    twin = {}
    for i in on_line:
        twin[i] = len(nodes)
        nodes.append([nodes[i][0], nodes[i][1]])
    for t in tris:
        cy = sum(nodes[v][1] for v in t) / 3.0
        if cy < 0.0:
            for k in range(3):
                if t[k] in twin:
                    t[k] = twin[t[k]]
    return nodes, tris


# ---- assembly into the immutable record ------------------------------------

def _boundary_from_adjacency(tris: np.ndarray) -> np.ndarray:
    count: dict[tuple[int, int], int] = {}
    for t in tris:
        for i in range(3):
            e = (min(t[i], t[(i + 1) % 3]), max(t[i], t[(i + 1) % 3]))
            count[e] = count.get(e, 0) + 1
    edges = sorted(e for e, c in count.items() if c == 1)
    return np.asarray(edges, dtype=np.int64).reshape(-1, 2)


def _finalize(nodes: list[list[float]], tris: list[list[int]]) -> Mesh:
    nodes_arr = np.asarray(nodes, dtype=float)
    tris_arr = np.asarray(tris, dtype=np.int64)
    boundary = _boundary_from_adjacency(tris_arr)
    return Mesh(
        nodes=nodes_arr,
        tris=tris_arr,
        boundary_edges=boundary,
        edge_tag_ids=np.zeros(len(boundary), dtype=np.int64),
        tags={"untagged": 0},
    )


def generate(spec: DomainSpec, target_h: float, grading: GradingSpec | None = None) -> Mesh:
    """Generate a conforming mesh of the domain.

    Longest edges are at most 1.5*target_h away from any grading corridor
    and at most 1.5*grading.h_min on triangles meeting one.

    Raises
    ------
    ValueError
        For nonpositive target_h or an infeasible grading
        (h_min >= target_h).
    """
    if target_h <= 0.0:
        raise ValueError("target_h must be positive")
    if grading is not None and grading.h_min >= target_h:
        raise ValueError(
            f"grading h_min = {grading.h_min} must be below target_h = {target_h}"
        )
    nodes, tris = _grid(spec, target_h)
    nodes, tris = _compact(nodes, tris)
    if spec.holes:
        # pre-refine the hole neighborhoods so each polygon vertex captures
        # its own nearby node (capture needs local h below the chord length)
        chord = min(2.0 * h.radius * math.sin(math.pi / h.segments) for h in spec.holes)
        rings = tuple(
            (h.cx - h.radius - 2 * chord, h.cx + h.radius + 2 * chord,
             h.cy - h.radius - 2 * chord, h.cy + h.radius + 2 * chord)
            for h in spec.holes
        )
        nodes, tris = _grade(nodes, tris, GradingSpec(boxes=rings, h_min=chord / 1.5))
        nodes, tris = _carve_holes(nodes, tris, spec.holes)
    if grading is not None:
        nodes, tris = _grade(nodes, tris, grading)
    if spec.slit:
        nodes, tris = _cut_slit(nodes, tris, spec.slit_tip_x)
    return _finalize(nodes, tris)


def tag_boundary(msh: Mesh, predicates: list[tuple[str, object]]) -> Mesh:
    """Assign tags to boundary edges; the first matching predicate wins.

    Parameters
    ----------
    predicates:
        Ordered (name, fn) pairs; fn maps an edge midpoint (ndarray of
        shape (2,)) to bool.

    Raises
    ------
    ValueError
        If some boundary edge matches no predicate (the midpoint is named).
    """
    names: list[str] = []
    for name, _ in predicates:
        if name not in names:
            names.append(name)
    tags = {name: i for i, name in enumerate(names)}
    ids = np.empty(len(msh.boundary_edges), dtype=np.int64)
    mids = 0.5 * (msh.nodes[msh.boundary_edges[:, 0]] + msh.nodes[msh.boundary_edges[:, 1]])
    for k, mid in enumerate(mids):
        for name, fn in predicates:
            if fn(mid):
                ids[k] = tags[name]
                break
        else:
            raise ValueError(
                f"boundary edge with midpoint ({mid[0]!r}, {mid[1]!r}) matched no predicate"
            )
    return replace(msh, edge_tag_ids=ids, tags=tags)


# ---- plain-text serialization ----------------------------------------------

def write_mesh(msh: Mesh, path: str) -> None:
    """Write the plain-text mesh format (counts, 'x y', 'i j k', 'i j tag')."""
    id_to_name = {i: n for n, i in msh.tags.items()}
    lines = [str(msh.node_count)]
    lines += [f"{x:.17g} {y:.17g}" for x, y in msh.nodes]
    lines.append(str(msh.tri_count))
    lines += [f"{a} {b} {c}" for a, b, c in msh.tris]
    lines.append(str(len(msh.boundary_edges)))
    lines += [
        f"{a} {b} {id_to_name[int(t)]}"
        for (a, b), t in zip(msh.boundary_edges, msh.edge_tag_ids)
    ]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_mesh(path: str) -> Mesh:
    with open(path) as fh:
        toks = fh.read().split("\n")
    pos = 0

    def take() -> str:
        nonlocal pos
        line = toks[pos]
        pos += 1
        return line

    n_nodes = int(take())
    nodes = np.asarray(
        [[float(v) for v in take().split()] for _ in range(n_nodes)], dtype=float
    )
    n_tris = int(take())
    tris = np.asarray(
        [[int(v) for v in take().split()] for _ in range(n_tris)], dtype=np.int64
    )
    n_edges = int(take())
    edges = np.empty((n_edges, 2), dtype=np.int64)
    tag_ids = np.empty(n_edges, dtype=np.int64)
    tags: dict[str, int] = {}
    for k in range(n_edges):
        a, b, name = take().split()
        edges[k] = (int(a), int(b))
        if name not in tags:
            tags[name] = len(tags)
        tag_ids[k] = tags[name]
    return Mesh(nodes=nodes, tris=tris, boundary_edges=edges,
                edge_tag_ids=tag_ids, tags=tags)
