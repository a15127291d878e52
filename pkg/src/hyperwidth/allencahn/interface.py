"""Interfaces of phase fields: zero level sets, their topology and their distance to geodesics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..geometry import disk_distance, disk_geodesic_point
from .energy import AllenCahn, PhaseField
from .mesh import TriangulatedSurface
from .potential import QUARTIC, DoubleWell


@dataclass
class InterfaceCurve:
    """Closed polyline of a zero level set, one segment per crossed triangle.

    ``charts[k]`` is the chart of segment ``k``, from ``start[k]`` to ``end[k]``
    (disk coordinates of that chart); consecutive segments meet on shared
    mesh edges, possibly seen from different charts.
    """

    charts: np.ndarray
    start: np.ndarray
    end: np.ndarray
    triangles: np.ndarray

    @property
    def n_segments(self) -> int:
        return len(self.charts)

    @property
    def length(self) -> float:
        return float(math.fsum(disk_distance(self.start, self.end)))

    def points(self) -> list:
        """``(chart, z)`` pairs of the segment start points."""
        return list(zip(self.charts.tolist(), self.start.tolist()))


def zero_level_set(u: PhaseField | np.ndarray, mesh: TriangulatedSurface) -> list:
    """Closed curves where the piecewise-linear ``u`` vanishes.

    Sign changes are located on edges by linear interpolation, mapped to the
    geodesic edge at the same fraction, and chained through shared edges.
    Values equal to zero count as positive, so every crossed triangle has
    exactly two crossed edges.  A field of one sign gives an empty list.
    """
    u = np.asarray(getattr(u, "u", u), dtype=float)
    pos = u[mesh.triangles] >= 0
    mixed = np.flatnonzero(pos.any(axis=1) & ~pos.all(axis=1))
    if not len(mixed):
        return []
    links = {}
    seg = {}
    for t in mixed:
        tri = mesh.triangles[t]
        z = mesh.tri_z[t]
        pts, keys = [], []
        for a, b in ((0, 1), (1, 2), (2, 0)):
            if pos[t, a] == pos[t, b]:
                continue
            ua, ub = u[tri[a]], u[tri[b]]
            f = ua / (ua - ub)
            pts.append(complex(disk_geodesic_point(z[a], z[b], f)))
            keys.append((min(tri[a], tri[b]), max(tri[a], tri[b])))
        seg[t] = (keys, pts)
        for k in keys:
            links.setdefault(k, []).append(t)
    used = set()
    curves = []
    for t0 in mixed:
        if t0 in used:
            continue
        charts, start, end, tris = [], [], [], []
        t, entry = t0, seg[t0][0][0]
        while t not in used:
            used.add(t)
            keys, pts = seg[t]
            i = keys.index(entry)
            charts.append(mesh.tri_chart[t])
            start.append(pts[i])
            end.append(pts[1 - i])
            tris.append(t)
            entry = keys[1 - i]
            nxt = [s for s in links[entry] if s != t]
            t = nxt[0]
        curves.append(InterfaceCurve(np.array(charts), np.array(start), np.array(end), np.array(tris)))
    return curves


def interface_mass(u: PhaseField, mesh: TriangulatedSurface, h0: float, W: DoubleWell = QUARTIC) -> float:
    """Energy divided by ``h0``: the interface length the energy predicts."""
    return AllenCahn(mesh, u.epsilon, W, check_regime=False).energy(u.u) / h0


# ---------------------------------------------------------------------------
# Topology of the transition band
# ---------------------------------------------------------------------------

@dataclass
class BandComponent:
    """Connected piece of the band ``{|u| < level}`` (triangles touching it)."""

    triangles: np.ndarray
    euler: int
    curves: list
    curve_length: float

    @property
    def self_intersections(self) -> int:
        """``-chi``: a regular neighbourhood of a curve with ``k`` transverse double points has ``chi = -k``."""
        return -self.euler

    @property
    def kind(self) -> str:
        return {0: "simple", 1: "figure-eight"}.get(self.self_intersections, f"chi={self.euler}")


def band_components(u: PhaseField | np.ndarray, mesh: TriangulatedSurface, level: float = 0.5) -> list:
    """Components of the transition band with their Euler characteristics and zero-set curves.

    The zero set of a smooth field is generically embedded; near a
    transverse crossing of two interfaces it reconnects at the scale of
    ``eps``.  The band keeps the crossing, so the topology of an immersed
    interface is read from the band: ``chi = 0`` for a simple closed curve,
    ``chi = -1`` for a figure eight.
    """
    u = np.asarray(getattr(u, "u", u), dtype=float)
    tri = mesh.triangles
    in_band = np.flatnonzero((np.abs(u[tri]) < level).any(axis=1))
    # union-find over band triangles through shared vertices
    parent = np.arange(mesh.n_vertices)

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for t in in_band:
        r = [find(v) for v in tri[t]]
        root = min(r)
        for x in r:
            parent[x] = root
    label = np.array([find(tri[t][0]) for t in in_band])
    curves = zero_level_set(u, mesh)
    tri_label = dict(zip(in_band.tolist(), label.tolist()))
    out = []
    for lab in np.unique(label):
        ts = in_band[label == lab]
        sub = tri[ts]
        e = np.unique(np.sort(np.concatenate([sub[:, [0, 1]], sub[:, [1, 2]], sub[:, [2, 0]]]), axis=1), axis=0)
        chi = len(np.unique(sub)) - len(e) + len(ts)
        mine = [c for c in curves if tri_label.get(int(c.triangles[0])) == lab]
        out.append(BandComponent(ts, int(chi), mine, float(sum(c.length for c in mine))))
    out.sort(key=lambda b: -b.curve_length)
    return out


# ---------------------------------------------------------------------------
# Distance to a reference curve
# ---------------------------------------------------------------------------

def _chart_images(domain, z_model: np.ndarray, poly: np.ndarray, depth: int = 2) -> tuple:
    """Copies of model-chart points in the charts of neighbouring tiles, up to ``depth`` steps.

    Returns ``(charts, points, source index)``.
    """
    tiling = domain.tiling
    ids = np.arange(len(z_model))
    level = (poly, z_model, ids)
    out = [level]
    for _ in range(depth):
        nxt = []
        p, z, i = level
        for c in np.unique(p):
            m = p == c
            for s in range(len(tiling.polygons[c])):
                if (c, s) in tiling.boundary:
                    continue
                y, _, t = tiling.neighbor[(c, s)]
                nxt.append((np.full(m.sum(), y), t.inverse().act_disk(z[m]), i[m]))
        level = tuple(np.concatenate(parts) for parts in zip(*nxt))
        out.append(level)
    return tuple(np.concatenate(parts) for parts in zip(*out))


def reference_samples(domain, curve, spacing: float) -> tuple:
    """Dense samples of a lifted sweepout curve as ``(chart, z, sample id, n)`` in model charts, with neighbour copies."""
    z = curve.closed_points()
    pts = []
    for a, b in zip(z[:-1], z[1:]):
        n = max(1, math.ceil(float(disk_distance(a, b)) / spacing))
        pts.append(disk_geodesic_point(a, b, np.arange(n) / n))
    pts = np.concatenate(pts)
    polys, model = [], []
    for p in pts:
        poly, _, element = domain.tiling.locate(complex(p))
        g = element @ domain.tiling.placements[poly]
        polys.append(poly)
        model.append(complex(g.inverse().act_disk(p)))
    charts, zs, ids = _chart_images(domain, np.array(model), np.array(polys))
    return charts, zs, ids, len(pts)


def _min_distances(a_chart, a_z, b_chart, b_z, chunk: int = 2048) -> np.ndarray:
    out = np.full(len(a_z), np.inf)
    for c in np.unique(a_chart):
        ia = np.flatnonzero(a_chart == c)
        bz = b_z[b_chart == c]
        if not len(bz):
            continue
        for k in range(0, len(ia), chunk):
            sl = ia[k:k + chunk]
            out[sl] = disk_distance(a_z[sl][:, None], bz[None, :]).min(axis=1)
    return out


def hausdorff_to_reference(curves: list, domain, reference, chart_offset: int, spacing: float = 0.005) -> float:
    """Hausdorff distance between zero-set curves and a sweepout curve of one pants.

    ``domain`` is the pants domain of the reference curve; its hexagon charts
    are the mesh charts ``chart_offset`` and ``chart_offset + 1``.  Zero-set
    points in other charts are at infinite distance (the interface has left
    the pants).
    """
    if not curves:
        return math.inf
    z_chart = np.concatenate([c.charts for c in curves]) - chart_offset
    valid = (z_chart == 0) | (z_chart == 1)
    if not valid.all():
        return math.inf
    # densify the zero set so the second half of the distance is resolved
    dense_chart, dense_z = [], []
    for c in curves:
        for ch, a, b in zip(c.charts - chart_offset, c.start, c.end):
            n = max(1, math.ceil(float(disk_distance(a, b)) / spacing))
            dense_z.append(disk_geodesic_point(a, b, np.arange(n) / n))
            dense_chart.append(np.full(n, ch))
    dense_chart = np.concatenate(dense_chart)
    dense_z = np.concatenate(dense_z)
    r_chart, r_z, r_id, n_ref = reference_samples(domain, reference, spacing)
    d_zero = _min_distances(dense_chart, dense_z, r_chart, r_z).max()
    d_img = _min_distances(r_chart, r_z, dense_chart, dense_z)
    d_ref = np.full(n_ref, np.inf)
    np.minimum.at(d_ref, r_id, d_img)
    return float(max(d_zero, d_ref.max()))
