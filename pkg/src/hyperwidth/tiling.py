"""Tilings of the hyperbolic plane by glued convex polygons.

A closed surface is described by finitely many convex model polygons with
a side-gluing table.  Laying the polygons out along a spanning tree gives
a fundamental domain ``D``; the gluings not used by the tree become the
side-pairing generators of the deck group.  The same data supports point
location (walking from tile to tile) and the vertex-cycle relations used
for first homology.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    MobiusIsometry,
    disk_distance,
    disk_to_klein,
    klein_to_disk,
    hyperboloid_combination,
    isometry_matching,
    reflection_through,
    side_of_geodesic,
)


class TilingError(ValueError):
    """Inconsistent gluing data."""


@dataclass(frozen=True)
class Gluing:
    """Side ``side`` of polygon ``poly`` is glued to side ``other_side`` of ``other_poly``.

    When ``reversed`` is true the start vertex of one side is identified with
    the end vertex of the other; otherwise starts match starts.
    """

    poly: int
    side: int
    other_poly: int
    other_side: int
    reversed: bool


def _polygon_orientation(vertices: np.ndarray) -> float:
    k = disk_to_klein(vertices)
    return float(np.sign(np.sum((k.real * np.roll(k.imag, -1)) - (np.roll(k.real, -1) * k.imag))))


@dataclass
class Tiling:
    polygons: list
    gluings: list
    root: int | None = 0  # None: most central polygon, tree of shortest centre-to-centre steps
    allow_boundary: bool = False  # unglued sides become geodesic boundary
    # filled by __post_init__
    neighbor: dict = field(init=False, repr=False)
    placements: list = field(init=False, repr=False)
    side_letter: dict = field(init=False, repr=False)
    generators: list = field(init=False, repr=False)
    generator_sides: list = field(init=False, repr=False)
    centres: list = field(init=False, repr=False)

    def __post_init__(self):
        self.polygons = [np.asarray(p, dtype=complex) for p in self.polygons]
        self.orientation = [_polygon_orientation(p) for p in self.polygons]
        self.centres = [complex(hyperboloid_combination(p, np.ones(len(p)) / len(p))) for p in self.polygons]
        table = {}
        for g in self.gluings:
            for key, val in (((g.poly, g.side), (g.other_poly, g.other_side)),
                             ((g.other_poly, g.other_side), (g.poly, g.side))):
                if key in table:
                    raise TilingError(f"side {key} glued twice")
                table[key] = (val, g.reversed)
        self.boundary = set()
        for i, p in enumerate(self.polygons):
            for s in range(len(p)):
                if (i, s) not in table:
                    if not self.allow_boundary:
                        raise TilingError(f"side {(i, s)} is not glued")
                    self.boundary.add((i, s))
        self._table = table
        self.neighbor = {key: (val[0], val[1], self._transform(key, val[0], val[1], rev))
                         for key, (val, rev) in table.items()}
        self._layout()

    # -- geometry of a single gluing -------------------------------------------------

    def side_endpoints(self, poly: int, side: int):
        v = self.polygons[poly]
        return complex(v[side]), complex(v[(side + 1) % len(v)])

    def _transform(self, key, other_poly, other_side, rev) -> MobiusIsometry:
        """Isometry placing ``other_poly`` across side ``key`` of the model polygon ``key[0]``."""
        p0, p1 = self.side_endpoints(*key)
        q0, q1 = self.side_endpoints(other_poly, other_side)
        if rev:
            q0, q1 = q1, q0
        t = isometry_matching(q0, q1, p0, p1)
        here = side_of_geodesic(p0, p1, self.centres[key[0]])
        there = side_of_geodesic(p0, p1, t.act_disk(self.centres[other_poly]))
        if here == there:
            t = reflection_through(p0, p1) @ t
        return t

    # -- spanning-tree layout and side pairings ------------------------------------

    def _shortest_tree(self, root: int) -> tuple:
        """Dijkstra over polygons, a step costing the distance between the two centres."""
        n = len(self.polygons)
        dist = [np.inf] * n
        parent = [None] * n
        order = []
        dist[root] = 0.0
        heap = [(0.0, root)]
        while heap:
            d, x = heapq.heappop(heap)
            if x in order:
                continue
            order.append(x)
            for s in range(len(self.polygons[x])):
                if (x, s) in self.boundary:
                    continue
                y, s2, t = self.neighbor[(x, s)]
                w = d + float(disk_distance(self.centres[x], t.act_disk(self.centres[y])))
                if y not in order and w < dist[y] - 1e-12:
                    dist[y] = w
                    parent[y] = (x, s, s2)
                    heapq.heappush(heap, (w, y))
        return dist, parent, order

    def _layout(self):
        n = len(self.polygons)
        placement = [None] * n
        tree = set()
        if self.root is None:
            # the compact layout keeps deck matrices small on long thin polygons
            trees = [self._shortest_tree(r) for r in range(n)]
            self.root = int(np.argmin([max(t[0]) for t in trees]))
            _, parent, order = trees[self.root]
            placement[self.root] = MobiusIsometry.identity()
            for y in order[1:]:
                x, s, s2 = parent[y]
                placement[y] = placement[x] @ self.neighbor[(x, s)][2]
                tree.add((x, s))
                tree.add((y, s2))
        else:
            placement[self.root] = MobiusIsometry.identity()
            queue = deque([self.root])
            while queue:
                x = queue.popleft()
                for s in range(len(self.polygons[x])):
                    if (x, s) in self.boundary:
                        continue
                    y, s2, t = self.neighbor[(x, s)]
                    if placement[y] is None:
                        placement[y] = placement[x] @ t
                        tree.add((x, s))
                        tree.add((y, s2))
                        queue.append(y)
        if any(p is None for p in placement):
            raise TilingError("gluing graph is disconnected")
        self.placements = placement

        gens, sides = [], []
        letter = {}
        for (x, s), (y, s2, t) in sorted(self.neighbor.items()):
            if (x, s) in tree or (x, s) in letter:
                continue
            g = placement[x] @ t @ placement[y].inverse()
            if not g.preserves_orientation:
                raise TilingError("side pairing reverses orientation; the surface is not orientable")
            k = len(gens) // 2
            gens.extend([g, g.inverse()])
            sides.extend([(x, s), (y, s2)])
            letter[(x, s)] = 2 * k
            letter[(y, s2)] = 2 * k + 1
        self.side_letter = letter
        self.generators = gens
        self.generator_sides = sides

    @property
    def n_generators(self) -> int:
        return len(self.generators) // 2

    def domain_vertices(self) -> np.ndarray:
        return np.concatenate([pl.act_disk(p) for pl, p in zip(self.placements, self.polygons)])

    def radius_about(self, base: complex) -> float:
        return float(disk_distance(base, self.domain_vertices()).max())

    # -- point location ---------------------------------------------------------------

    def _outside_side(self, poly: int, z: complex):
        """Index of the side whose half-plane most strongly excludes model point ``z``, or None."""
        k = disk_to_klein(self.polygons[poly])
        kz = complex(disk_to_klein(z))
        a = k
        b = np.roll(k, -1)
        edge = b - a
        cross = (np.conj(edge) * (kz - a)).imag * self.orientation[poly] / np.abs(edge)
        for x, s in self.boundary:
            if x == poly:
                cross[s] = np.inf  # beyond a boundary side lies the funnel of this tile
        j = int(np.argmin(cross))
        return j if cross[j] < -1e-13 else None

    def locate(self, z: complex, start: int | None = None, max_steps: int = 100000):
        """Walk the tiling to the tile containing disk point ``z``.

        Returns ``(poly, word, element)``: ``z`` lies in ``element(P_poly(model polygon))``,
        where ``element`` is the deck transformation spelled by ``word``.
        """
        poly = self.root if start is None else start
        g = self.placements[poly]
        element = MobiusIsometry.identity()
        word = []
        for _ in range(max_steps):
            zm = complex(g.inverse().act_disk(z))
            j = self._outside_side(poly, zm)
            if j is None:
                return poly, tuple(word), element
            y, _, t = self.neighbor[(poly, j)]
            letter = self.side_letter.get((poly, j))
            if letter is not None:
                word.append(letter)
                element = element @ self.generators[letter]
            g = g @ t
            poly = y
        raise TilingError("point location did not terminate")

    def word_of(self, element: MobiusIsometry, base: complex):
        """Spell a deck transformation in the side-pairing generators."""
        _, word, found = self.locate(complex(element.act_disk(base)))
        if found.distance_to(element) > 1e-6 * max(1.0, np.abs(element.matrix).max()):
            raise TilingError("element is not a deck transformation of this tiling")
        return word

    def is_deck_transformation(self, element: MobiusIsometry, base: complex, tol: float = 1e-7) -> bool:
        _, _, found = self.locate(complex(element.act_disk(base)))
        return found.distance_to(element) <= tol * max(1.0, np.abs(element.matrix).max())

    # -- relations -------------------------------------------------------------------

    def vertex_cycles(self):
        """Words (lists of letters) read off by walking once around each tiling vertex.

        Their abelianizations span the relations of first homology.
        """
        seen = set()
        cycles = []
        self.vertex_class = {}
        for x, poly in enumerate(self.polygons):
            for v in range(len(poly)):
                if (x, v) in seen:
                    continue
                cls = len(cycles)
                word = []
                state = (x, v, v)  # (polygon, vertex, side to cross next; incident to vertex)
                for _ in range(256):
                    cx, cv, side = state
                    seen.add((cx, cv))
                    self.vertex_class[(cx, cv)] = cls
                    letter = self.side_letter.get((cx, side))
                    if letter is not None:
                        word.append(letter)
                    y, s2, _ = self.neighbor[(cx, side)]
                    rev = self._table[(cx, side)][1]
                    n2 = len(self.polygons[y])
                    at_start = cv == side
                    # image of cv on side s2 of y
                    w = s2 if at_start != rev else (s2 + 1) % n2
                    other = (w - 1) % n2 if w == s2 else w
                    state = (y, w, other)
                    if state == (x, v, v):
                        break
                else:
                    raise TilingError("vertex cycle did not close")
                cycles.append(word)
        return cycles

    # -- projecting curves into the fundamental domain ------------------------------------

    def _clip(self, poly: int, ka: complex, kb: complex):
        """Cyrus-Beck clip of the Klein segment ``ka -> kb`` against model polygon ``poly``.

        Returns ``(t_in, t_out, exit_side)`` or None when the segment misses the polygon.
        """
        k = disk_to_klein(self.polygons[poly])
        sgn = self.orientation[poly]
        t_in, t_out, exit_side = 0.0, 1.0, None
        d = kb - ka
        for j in range(len(k)):
            if (poly, j) in self.boundary:
                continue
            a, b = k[j], k[(j + 1) % len(k)]
            e = b - a
            f0 = sgn * (np.conj(e) * (ka - a)).imag  # >= 0 inside
            fd = sgn * (np.conj(e) * d).imag
            if abs(fd) < 1e-11 * abs(e) * abs(d):  # parallel to this side
                if f0 < -1e-12:
                    return None
                continue
            t = -f0 / fd
            if fd > 0:
                t_in = max(t_in, t)
            elif t < t_out:
                t_out, exit_side = t, j
        if t_in > t_out + 1e-12:
            return None
        return t_in, t_out, exit_side

    def _walk_to(self, poly: int, g: MobiusIsometry, z: complex, max_steps: int = 10000,
                 letters: list | None = None):
        """Walk from the tile ``g(P_poly)`` to the tile containing ``z``."""
        for _ in range(max_steps):
            j = self._outside_side(poly, complex(g.inverse().act_disk(z)))
            if j is None:
                return poly, g
            if letters is not None and (poly, j) in self.side_letter:
                letters.append(self.side_letter[(poly, j)])
            y, _, t = self.neighbor[(poly, j)]
            g = g @ t
            poly = y
        raise TilingError("point location did not terminate")

    def project_segment(self, p: complex, q: complex, start=None, step: float = 1e-9,
                        with_maps: bool = False, letters: list | None = None):
        """Pieces of the geodesic segment ``p -> q`` in fundamental-domain coordinates.

        Returns a list of ``(poly, klein_start, klein_end)`` in the model chart of
        each polygon, together with the final ``(poly, element)`` tile.  After
        leaving a tile the walk steps a Klein parameter ``step`` past the exit
        point and relocates, so passing through a vertex is harmless.  With ``with_maps``
        each piece also carries the isometry from the model chart to the
        piece's actual position; side-pairing letters crossed are appended to
        ``letters`` when given.
        """
        if start is None:
            poly, _, element = self.locate(p)
        else:
            poly, element = start
        g = element @ self.placements[poly]
        pieces = []
        here = p  # disk point reached so far
        for _ in range(100000):
            gi = g.inverse()
            ka = complex(disk_to_klein(gi.act_disk(p)))
            kb = complex(disk_to_klein(gi.act_disk(q)))
            kh = complex(disk_to_klein(gi.act_disk(here)))
            t_lo = float(((kh - ka) / (kb - ka)).real) if kb != ka else 1.0
            clip = self._clip(poly, ka, kb)
            t_out = t_lo
            if clip is not None:
                t_in, t_out, _ = clip
                t_in = max(t_in, t_lo)
                if t_out > t_in:
                    piece = (poly, ka + t_in * (kb - ka), ka + t_out * (kb - ka))
                    pieces.append(piece + (g,) if with_maps else piece)
                t_out = max(t_out, t_lo)
            if t_out >= 1.0 - 1e-14:
                return pieces, (poly, g @ self.placements[poly].inverse())
            here = complex(g.act_disk(klein_to_disk(ka + t_out * (kb - ka))))
            beyond = complex(g.act_disk(klein_to_disk(ka + min(1.0, t_out + step) * (kb - ka))))
            poly, g = self._walk_to(poly, g, beyond, letters=letters)
        raise TilingError("segment projection did not terminate")

    def in_domain(self, z: complex, tol: float = 1e-9) -> bool:
        """Whether disk point ``z`` lies in the closed fundamental domain (up to ``tol`` in Klein units)."""
        for poly in range(len(self.polygons)):
            zm = complex(self.placements[poly].inverse().act_disk(z))
            k = disk_to_klein(self.polygons[poly])
            kz = complex(disk_to_klein(zm))
            edge = np.roll(k, -1) - k
            cross = (np.conj(edge) * (kz - k)).imag * self.orientation[poly] / np.abs(edge)
            for x, side in self.boundary:
                if x == poly:
                    cross[side] = np.inf
            if cross.min() >= -tol:
                return True
        return False

    def domain_chords(self, pieces, min_length: float = 1e-6) -> np.ndarray:
        """Distinct Klein lines of the domain carrying the given pieces, as ``(n, 2)`` point pairs."""
        lines = []
        for poly, ka, kb in pieces:
            if abs(kb - ka) < min_length:
                continue
            pa, pb = (complex(disk_to_klein(self.placements[poly].act_disk(klein_to_disk(k))))
                      for k in (ka, kb))
            d = (pb - pa) / abs(pb - pa)
            if d.real < 0 or (d.real == 0 and d.imag < 0):
                d = -d
            off = (np.conj(d) * pa).imag
            if not any(abs(d - e) < 1e-7 and abs(off - o) < 1e-7 for e, o, _, _ in lines):
                lines.append((d, off, pa, pb))
        return np.array([(pa, pb) for _, _, pa, pb in lines]).reshape(-1, 2)

    def project_polyline(self, points, with_maps: bool = False, letters: list | None = None) -> list:
        """Project consecutive geodesic segments of a polyline; returns tagged pieces.

        Each piece is ``(poly, klein_start, klein_end, segment_index)``, followed
        by the chart map when ``with_maps`` is set.
        """
        points = np.asarray(points, dtype=complex)
        out = []
        tile = None
        for i in range(len(points) - 1):
            pieces, tile = self.project_segment(points[i], points[i + 1], start=tile,
                                                with_maps=True, letters=letters)
            for poly, a, b, g in pieces:
                out.append((poly, a, b, i, g) if with_maps else (poly, a, b, i))
        return out


def _proper_crossings(a0, a1, b0, b1, tol=1e-10):
    """Boolean mask of proper crossings between segment arrays (complex endpoints)."""
    da = a1 - a0
    db = b1 - b0
    den = (np.conj(da) * db).imag
    w = b0 - a0
    with np.errstate(divide="ignore", invalid="ignore"):
        s = (np.conj(w) * db).imag / den
        t = (np.conj(w) * da).imag / den
    return (np.abs(den) > 1e-16) & (s > tol) & (s < 1 - tol) & (t > tol) & (t < 1 - tol)


def crossing_pairs(pieces_a, pieces_b=None):
    """Index pairs of pieces that cross transversally inside a common polygon.

    With one argument, pairs within the same curve (``i < j``) are returned.
    """
    same = pieces_b is None
    if same:
        pieces_b = pieces_a
    out = []
    polys_a = np.array([p[0] for p in pieces_a])
    polys_b = np.array([p[0] for p in pieces_b])
    a0 = np.array([p[1] for p in pieces_a])
    a1 = np.array([p[2] for p in pieces_a])
    b0 = np.array([p[1] for p in pieces_b])
    b1 = np.array([p[2] for p in pieces_b])
    for poly in np.intersect1d(polys_a, polys_b):
        ia = np.flatnonzero(polys_a == poly)
        ib = np.flatnonzero(polys_b == poly)
        mask = _proper_crossings(a0[ia][:, None], a1[ia][:, None], b0[ib][None, :], b1[ib][None, :])
        for r, c in zip(*np.nonzero(mask)):
            i, j = int(ia[r]), int(ib[c])
            if same and i >= j:
                continue
            out.append((i, j))
    return out
