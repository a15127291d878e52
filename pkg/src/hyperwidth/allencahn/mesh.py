"""Triangulations of pants-glued hyperbolic surfaces.

Each hexagon chart is triangulated on its own: sides are sampled at equal
hyperbolic spacing (glued sides get identical samples, so their points are
shared), the interior is filled by a hyperbolic Poisson-disk sample, and the
points are connected by a Delaunay triangulation in Poincare coordinates
(conformal, so well-shaped triangles stay well-shaped).  Triangles are read
as geodesic triangles; they tile each hexagon exactly, so the total area is
the Gauss-Bonnet area up to rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp
from scipy.spatial import Delaunay, cKDTree

from ..fuchsian import SurfaceKind, SurfaceSpec, pants_polygons
from ..geometry import (
    disk_distance,
    disk_geodesic_point,
    hyperboloid_combination,
    hyperbolic_triangle_area,
    moving_to_origin,
    side_of_geodesic,
)

#: Points per unit area of a maximal Poisson-disk sample with radius 1.
POISSON_DENSITY = 0.57


class MeshError(RuntimeError):
    """The triangulation is not a closed surface mesh."""


@dataclass
class TriangulatedSurface:
    """Closed triangulated surface glued from hexagon charts.

    ``chart_points[c]`` are the disk coordinates of the points of chart ``c``
    and ``chart_global[c]`` their global vertex ids; a vertex on a glued side
    appears in several charts (the identification table).  Triangles live in
    one chart each and index that chart's points.
    """

    charts: list
    chart_points: list
    chart_global: list
    tri_chart: np.ndarray
    tri_local: np.ndarray
    n_vertices: int
    genus: int
    spec: SurfaceSpec | None = None
    # derived
    triangles: np.ndarray = field(init=False, repr=False)
    tri_z: np.ndarray = field(init=False, repr=False)
    edge_lengths: np.ndarray = field(init=False, repr=False)
    tri_area: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.tri_chart = np.asarray(self.tri_chart, dtype=int)
        self.tri_local = np.asarray(self.tri_local, dtype=int)
        self.triangles = np.empty_like(self.tri_local)
        self.tri_z = np.empty(self.tri_local.shape, dtype=complex)
        for c in range(len(self.charts)):
            m = self.tri_chart == c
            self.triangles[m] = self.chart_global[c][self.tri_local[m]]
            self.tri_z[m] = self.chart_points[c][self.tri_local[m]]
        z = self.tri_z
        # edge k is opposite vertex k
        self.edge_lengths = np.stack([disk_distance(z[:, 1], z[:, 2]),
                                      disk_distance(z[:, 2], z[:, 0]),
                                      disk_distance(z[:, 0], z[:, 1])], axis=1)
        self.tri_area = hyperbolic_triangle_area(*self.edge_lengths.T)

    # -- basic quantities --------------------------------------------------------------

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    @property
    def area(self) -> float:
        return float(math.fsum(self.tri_area))

    @property
    def gauss_bonnet_area(self) -> float:
        return 2 * math.pi * (2 * self.genus - 2)

    def edges(self) -> np.ndarray:
        """Unique global edges as sorted vertex pairs."""
        e = np.concatenate([self.triangles[:, [1, 2]], self.triangles[:, [2, 0]], self.triangles[:, [0, 1]]])
        return np.unique(np.sort(e, axis=1), axis=0)

    @property
    def mesh_width(self) -> float:
        """Mean edge length."""
        return float(self.edge_lengths.mean())

    @property
    def max_edge(self) -> float:
        return float(self.edge_lengths.max())

    def euler_characteristic(self) -> int:
        return self.n_vertices - len(self.edges()) + self.n_triangles

    def home_chart(self) -> tuple:
        """One ``(chart, disk point)`` per global vertex."""
        chart = np.full(self.n_vertices, -1)
        z = np.zeros(self.n_vertices, dtype=complex)
        for c in reversed(range(len(self.charts))):
            chart[self.chart_global[c]] = c
            z[self.chart_global[c]] = self.chart_points[c]
        return chart, z

    def relabeled(self, perm) -> "TriangulatedSurface":
        """Same mesh with vertex ``i`` renamed ``perm[i]``; a field ``u`` becomes ``v[perm] = u``."""
        perm = np.asarray(perm, dtype=int)
        return TriangulatedSurface(self.charts, self.chart_points, [perm[g] for g in self.chart_global],
                                   self.tri_chart, self.tri_local, self.n_vertices, self.genus, self.spec)

    # -- finite elements ----------------------------------------------------------------

    @cached_property
    def K(self) -> sp.csr_matrix:
        return self.stiffness()

    @cached_property
    def mass(self) -> np.ndarray:
        return self.lumped_mass()

    def side_vertex_ids(self, chart: int, side: int, tol: float = 1e-9) -> np.ndarray:
        """Global ids of the chart points lying on a side of the chart polygon."""
        poly = self.charts[chart]
        a, b = poly[side], poly[(side + 1) % len(poly)]
        z = self.chart_points[chart]
        on = np.abs(disk_distance(a, z) + disk_distance(z, b) - disk_distance(a, b)) < tol
        return self.chart_global[chart][on]

    def pants_vertex_ids(self, p: int) -> np.ndarray:
        return np.unique(np.concatenate([self.chart_global[2 * p], self.chart_global[2 * p + 1]]))

    def cuff_vertex_ids(self, p: int, slot: int) -> np.ndarray:
        return np.unique(np.concatenate([self.side_vertex_ids(2 * p, 2 * slot),
                                         self.side_vertex_ids(2 * p + 1, 2 * slot)]))

    def edge_graph(self) -> sp.csr_matrix:
        """Symmetric sparse graph of mesh edges weighted by hyperbolic length."""
        t = self.triangles
        pairs = np.sort(np.concatenate([t[:, [1, 2]], t[:, [2, 0]], t[:, [0, 1]]]), axis=1)
        pairs, first = np.unique(pairs, axis=0, return_index=True)
        w = self.edge_lengths.T.ravel()[first]
        n = self.n_vertices
        g = sp.coo_matrix((np.concatenate([w, w]),
                           (np.concatenate([pairs[:, 0], pairs[:, 1]]),
                            np.concatenate([pairs[:, 1], pairs[:, 0]]))), shape=(n, n))
        return g.tocsr()

    def stiffness(self) -> sp.csr_matrix:
        """Cotangent stiffness of the Euclidean triangles with the hyperbolic edge lengths."""
        l2 = self.edge_lengths ** 2
        a, b, c = self.edge_lengths.T
        s = (a + b + c) / 2
        area_e = np.sqrt(np.maximum(s * (s - a) * (s - b) * (s - c), 0))
        rows, cols, vals = [], [], []
        for k in range(3):
            i, j = (k + 1) % 3, (k + 2) % 3
            cot = (l2[:, i] + l2[:, j] - l2[:, k]) / (4 * area_e)
            w = 0.5 * cot
            vi, vj = self.triangles[:, i], self.triangles[:, j]
            rows += [vi, vj, vi, vj]
            cols += [vj, vi, vi, vj]
            vals += [-w, -w, w, w]
        K = sp.coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                          shape=(self.n_vertices, self.n_vertices)).tocsr()
        K.sum_duplicates()
        return K

    def lumped_mass(self) -> np.ndarray:
        """One third of each hyperbolic triangle area to each of its vertices."""
        return np.bincount(self.triangles.ravel(), weights=np.repeat(self.tri_area / 3, 3),
                           minlength=self.n_vertices)

    # -- checks -------------------------------------------------------------------------

    def check(self, area_tol: float = 0.02) -> None:
        """Closedness, triangle inequalities, Euler characteristic and Gauss-Bonnet area."""
        e = np.concatenate([self.triangles[:, [1, 2]], self.triangles[:, [2, 0]], self.triangles[:, [0, 1]]])
        _, counts = np.unique(np.sort(e, axis=1), axis=0, return_counts=True)
        if np.any(counts != 2):
            raise MeshError(f"{np.sum(counts != 2)} edges are not shared by exactly two triangles")
        a, b, c = self.edge_lengths.T
        if np.any((a >= b + c) | (b >= c + a) | (c >= a + b)):
            raise MeshError("degenerate triangle")
        if self.euler_characteristic() != 2 - 2 * self.genus:
            raise MeshError(f"Euler characteristic {self.euler_characteristic()} != {2 - 2 * self.genus}")
        rel = abs(self.area - self.gauss_bonnet_area) / self.gauss_bonnet_area
        if rel > area_tol:
            raise MeshError(f"area {self.area:.6f} differs from 2 pi (2g - 2) by {rel:.2%}")

    # -- text format ----------------------------------------------------------------------

    def save(self, path) -> None:
        """Plain-text mesh: chart polygons, chart points with global ids, triangles."""
        with open(path, "w") as fh:
            fh.write(f"hyperwidth-mesh 1\ngenus {self.genus}\nvertices {self.n_vertices}\n")
            for c, poly in enumerate(self.charts):
                fh.write(f"chart {c} " + " ".join(f"{z.real:.17g} {z.imag:.17g}" for z in poly) + "\n")
            for c, (pts, gid) in enumerate(zip(self.chart_points, self.chart_global)):
                for z, g in zip(pts, gid):
                    fh.write(f"point {c} {g} {z.real:.17g} {z.imag:.17g}\n")
            for c, (i, j, k) in zip(self.tri_chart, self.tri_local):
                fh.write(f"triangle {c} {i} {j} {k}\n")

    @classmethod
    def load(cls, path) -> "TriangulatedSurface":
        charts, points, gids, tri_c, tri_l = {}, {}, {}, [], []
        genus = n = None
        with open(path) as fh:
            for line in fh:
                f = line.split()
                if not f:
                    continue
                if f[0] == "genus":
                    genus = int(f[1])
                elif f[0] == "vertices":
                    n = int(f[1])
                elif f[0] == "chart":
                    xy = np.array(f[2:], dtype=float)
                    charts[int(f[1])] = xy[0::2] + 1j * xy[1::2]
                elif f[0] == "point":
                    c = int(f[1])
                    points.setdefault(c, []).append(float(f[3]) + 1j * float(f[4]))
                    gids.setdefault(c, []).append(int(f[2]))
                elif f[0] == "triangle":
                    tri_c.append(int(f[1]))
                    tri_l.append([int(x) for x in f[2:5]])
        order = sorted(charts)
        return cls([charts[c] for c in order], [np.array(points[c]) for c in order],
                   [np.array(gids[c]) for c in order], np.array(tri_c), np.array(tri_l), n, genus)


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------

class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _inside(poly: np.ndarray, z: np.ndarray, margin: float = 0.0) -> np.ndarray:
    """Points strictly inside a convex geodesic polygon (counterclockwise or not)."""
    centre = complex(hyperboloid_combination(poly, np.ones(len(poly)) / len(poly)))
    ok = np.ones(len(z), dtype=bool)
    for j in range(len(poly)):
        a, b = poly[j], poly[(j + 1) % len(poly)]
        ref = side_of_geodesic(a, b, centre)
        s = side_of_geodesic(a, b, z)
        ok &= s * ref > margin
    return ok


def _poisson_interior(poly: np.ndarray, fixed: np.ndarray, r: float, rng: np.random.Generator,
                      oversample: float = 8.0) -> np.ndarray:
    """Greedy hyperbolic Poisson-disk sample of the polygon interior, avoiding ``fixed`` points."""
    centre = complex(hyperboloid_combination(poly, np.ones(len(poly)) / len(poly)))
    to0 = moving_to_origin(centre)
    back = to0.inverse()
    rho_max = float(disk_distance(centre, poly).max())
    area = (len(poly) - 2) * math.pi - sum(_corner_angles(poly))
    n_cand = int(oversample * POISSON_DENSITY * area / r ** 2) + 100
    cands = []
    total = 0
    while total < n_cand:
        m = 4 * (n_cand - total) + 100
        cosh_r = 1 + rng.random(m) * (math.cosh(rho_max) - 1)
        rho = np.arccosh(cosh_r)
        w = np.tanh(rho / 2) * np.exp(2j * math.pi * rng.random(m))
        z = back.act_disk(w)
        z = z[_inside(poly, z)]
        cands.append(z)
        total += len(z)
    cand = np.concatenate(cands)[:n_cand]
    pts = np.concatenate([fixed, cand])
    xy = np.column_stack([pts.real, pts.imag])
    tree = cKDTree(xy)
    # Euclidean radius enclosing the hyperbolic r-ball, with room to spare
    r_e = 1.6 * r * (1 - np.abs(pts) ** 2) / 2 + 1e-15
    alive = np.ones(len(pts), dtype=bool)
    accepted = []
    for i in range(len(pts)):
        if not alive[i]:
            continue
        if i >= len(fixed):
            accepted.append(i)
        nb = np.array(tree.query_ball_point(xy[i], r_e[i]), dtype=int)
        nb = nb[nb >= len(fixed)]
        close = nb[disk_distance(pts[i], pts[nb]) < r]
        alive[close] = False
    return pts[np.array(accepted, dtype=int)]


def _corner_angles(poly: np.ndarray) -> list:
    out = []
    for j in range(len(poly)):
        p = poly[j]
        to0 = moving_to_origin(p)
        a = complex(to0.act_disk(poly[j - 1]))
        b = complex(to0.act_disk(poly[(j + 1) % len(poly)]))
        out.append(abs(np.angle(a / b)))
    return out


def build_mesh(spec: SurfaceSpec, target_vertices: int = 20000, seed: int = 0) -> TriangulatedSurface:
    """Triangulate a pants-glued surface with roughly ``target_vertices`` vertices.

    Deterministic for a given ``seed``.
    """
    if spec.kind is not SurfaceKind.PANTS_GLUED:
        raise NotImplementedError("meshes are built for pants-glued surfaces")
    rng = np.random.default_rng(seed)
    polys, gluings = pants_polygons(spec)
    area = 2 * math.pi * (2 * spec.genus - 2)
    r = math.sqrt(POISSON_DENSITY * area / target_vertices)

    # side samples, shared across gluings
    n_seg = {}
    for c, poly in enumerate(polys):
        for s in range(6):
            n_seg[(c, s)] = max(1, math.ceil(float(disk_distance(poly[s], poly[(s + 1) % 6])) / r))
    uf = _UnionFind()

    def key(c, s, k):
        n = n_seg[(c, s)]
        if k == 0:
            return (c, "v", s)
        if k == n:
            return (c, "v", (s + 1) % 6)
        return (c, "e", s, k)

    for g in gluings:
        n = n_seg[(g.poly, g.side)]
        if n != n_seg[(g.other_poly, g.other_side)]:
            raise MeshError("glued sides have different lengths")
        for k in range(n + 1):
            k2 = n - k if g.reversed else k
            uf.union(key(g.poly, g.side, k), key(g.other_poly, g.other_side, k2))

    chart_points, chart_keys, tri_chart, tri_local = [], [], [], []
    for c, poly in enumerate(polys):
        bkeys, bpts = [], []
        for s in range(6):
            n = n_seg[(c, s)]
            frac = np.arange(n) / n  # the end vertex is the next side's start
            bpts.append(disk_geodesic_point(poly[s], poly[(s + 1) % 6], frac))
            bkeys += [key(c, s, k) for k in range(n)]
        bpts = np.concatenate(bpts)
        interior = _poisson_interior(poly, bpts, r, rng)
        pts = np.concatenate([bpts, interior])
        tri = Delaunay(np.column_stack([pts.real, pts.imag])).simplices
        cen = pts[tri].mean(axis=1)
        tri = tri[_inside(poly, cen)]
        # boundary segments must all be edges of the triangulation
        nb = len(bpts)
        have = {tuple(sorted(e)) for t in tri for e in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0]))}
        missing = [i for i in range(nb) if tuple(sorted((i, (i + 1) % nb))) not in have]
        if missing:
            raise MeshError(f"chart {c}: {len(missing)} boundary segments missing from the triangulation")
        chart_points.append(pts)
        chart_keys.append(bkeys + [(c, "i", k) for k in range(len(interior))])
        tri_chart.append(np.full(len(tri), c))
        tri_local.append(tri)

    roots = {}
    chart_global = []
    for keys in chart_keys:
        gid = np.empty(len(keys), dtype=int)
        for i, k in enumerate(keys):
            gid[i] = roots.setdefault(uf.find(k), len(roots))
        chart_global.append(gid)
    mesh = TriangulatedSurface(polys, chart_points, chart_global, np.concatenate(tri_chart),
                               np.concatenate(tri_local), len(roots), spec.genus, spec)
    mesh.check()
    return mesh
