"""Closed hyperbolic surfaces as deck groups, with length-spectrum enumeration.

Two families are supported:

* pants-glued surfaces, assembled from right-angled hexagons (two per pair
  of pants) with zero twist;
* the Bolza surface, from the regular octagon with vertex angles pi/4.

Both become a :class:`~hyperwidth.tiling.Tiling`, whose side pairings
generate the deck group.  Closed geodesics are enumerated as group elements
within a displacement radius of a base point; the radius bound and the
completeness horizon follow from the fundamental domain's circumradius.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    MobiusIsometry,
    axis_foot,
    disk_distance,
    disk_to_klein,
    klein_to_disk,
    reflection_through,
    right_angled_hexagon,
)
from .hyptrig import HyperbolicDomainError, collar_halfwidth
from .tiling import Gluing, Tiling

log = logging.getLogger(__name__)


class SurfaceStructureError(ValueError):
    """The pants graph does not describe a closed surface of the stated genus."""


class SurfaceKind(str, enum.Enum):
    PANTS_GLUED = "pants_glued"
    BOLZA = "bolza"


Slot = tuple  # (pants index, cuff slot 0..2)


@dataclass(frozen=True)
class SurfaceSpec:
    """Declarative description of a closed hyperbolic surface.

    ``gluings[k] = ((p, i), (q, j))`` glues cuff slot ``i`` of pants ``p``
    to slot ``j`` of pants ``q``; that cuff has length ``cuff_lengths[k]``
    and twist ``twists[k]``.
    """

    kind: SurfaceKind
    genus: int
    gluings: tuple = ()
    cuff_lengths: tuple = ()
    twists: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", SurfaceKind(self.kind))
        object.__setattr__(self, "gluings", tuple((tuple(a), tuple(b)) for a, b in self.gluings))
        object.__setattr__(self, "cuff_lengths", tuple(float(x) for x in self.cuff_lengths))
        twists = tuple(float(x) for x in self.twists) or (0.0,) * len(self.gluings)
        object.__setattr__(self, "twists", twists)
        self.validate()

    @property
    def n_pants(self) -> int:
        return 2 * self.genus - 2

    def validate(self) -> None:
        if self.genus < 2:
            raise SurfaceStructureError(f"genus must be at least 2, got {self.genus}")
        if self.kind is SurfaceKind.BOLZA:
            if self.genus != 2:
                raise SurfaceStructureError("the Bolza surface has genus 2")
            return
        n_cuffs = 3 * self.genus - 3
        if len(self.gluings) != n_cuffs:
            raise SurfaceStructureError(f"genus {self.genus} needs {n_cuffs} gluings, got {len(self.gluings)}")
        if len(self.cuff_lengths) != n_cuffs or len(self.twists) != n_cuffs:
            raise SurfaceStructureError("one cuff length and one twist per gluing are required")
        slots = [s for pair in self.gluings for s in pair]
        expected = {(p, i) for p in range(self.n_pants) for i in range(3)}
        if len(slots) != len(set(slots)) or set(slots) != expected:
            raise SurfaceStructureError("every cuff slot of every pants must be glued exactly once")
        for length in self.cuff_lengths:
            if not math.isfinite(length) or length <= 0:
                raise HyperbolicDomainError(f"cuff lengths must be positive, got {length!r}")
        if any(t != 0.0 for t in self.twists):
            raise NotImplementedError("only zero-twist gluings are supported")
        # connectivity of the pants graph
        adj = {p: set() for p in range(self.n_pants)}
        for (p, _), (q, _) in self.gluings:
            adj[p].add(q)
            adj[q].add(p)
        seen, stack = {0}, [0]
        while stack:
            for q in adj[stack.pop()]:
                if q not in seen:
                    seen.add(q)
                    stack.append(q)
        if len(seen) != self.n_pants:
            raise SurfaceStructureError("pants graph is disconnected")

    def pants_cuffs(self, p: int) -> tuple:
        """Cuff lengths of pants ``p`` in slot order."""
        out = [None] * 3
        for k, ((a, i), (b, j)) in enumerate(self.gluings):
            if a == p:
                out[i] = self.cuff_lengths[k]
            if b == p:
                out[j] = self.cuff_lengths[k]
        return tuple(out)

    # -- the families with known widths ---------------------------------------------

    @classmethod
    def s_ma(cls, m: int, a: float) -> "SurfaceSpec":
        """Genus-``m`` surface glued from ``2m-2`` pants with all cuffs of length ``a``.

        The gluing is a linear chain: the two end pants have cuff slots 0 and 1
        glued to each other, interior pants come in pairs glued along two
        cuffs, and consecutive blocks are joined through slot 2.  For ``m = 2``
        this is two one-holed tori joined along a separating cuff.
        """
        if m < 2:
            raise SurfaceStructureError("genus must be at least 2")
        n = 2 * m - 2
        gl = [((0, 0), (0, 1))]
        prev = (0, 2)
        p = 1
        while p < n - 1:
            gl.append((prev, (p, 0)))
            gl.append(((p, 1), (p + 1, 1)))
            gl.append(((p, 2), (p + 1, 2)))
            prev = (p + 1, 0)
            p += 2
        gl.append((prev, (n - 1, 2)))
        gl.append(((n - 1, 0), (n - 1, 1)))
        return cls(SurfaceKind.PANTS_GLUED, m, tuple(gl), (a,) * len(gl))

    @classmethod
    def s_L(cls, L: float) -> "SurfaceSpec":
        """Genus-2 surface from two isometric pants glued cuff-to-cuff (theta graph)."""
        gl = (((0, 0), (1, 0)), ((0, 1), (1, 1)), ((0, 2), (1, 2)))
        return cls(SurfaceKind.PANTS_GLUED, 2, gl, (L, L, L))

    @classmethod
    def bolza(cls) -> "SurfaceSpec":
        return cls(SurfaceKind.BOLZA, 2)


# ---------------------------------------------------------------------------
# Surface models
# ---------------------------------------------------------------------------

BOLZA_LETTERS = "abcd"


@dataclass
class Cuff:
    """A distinguished simple closed geodesic of a model."""

    name: str
    length: float
    element: MobiusIsometry
    word: tuple


@dataclass
class SurfaceModel:
    """Immutable-by-convention deck-group model of a closed hyperbolic surface."""

    spec: SurfaceSpec
    tiling: Tiling
    base_point: complex
    radius: float
    relations: np.ndarray
    cuffs: list = field(default_factory=list)
    generator_names: list = field(default_factory=list)

    def __post_init__(self):
        rel = np.atleast_2d(self.relations).astype(float)
        # integer homology is free, so triviality can be decided over the rationals
        _, s, vt = np.linalg.svd(rel) if rel.size else (None, np.zeros(0), np.eye(self.n_generators))
        rank = int(np.sum(s > 1e-9 * max(1.0, s.max(initial=0.0))))
        self._cycle_basis = vt[rank:].T  # columns span the orthogonal complement of the relations
        self.homology_rank = self._cycle_basis.shape[1]
        self._mod2_rows = _gf2_echelon(np.rint(rel).astype(np.int64) % 2) if rel.size else []

    @property
    def generators(self) -> list:
        return self.tiling.generators

    @property
    def n_generators(self) -> int:
        return self.tiling.n_generators

    @property
    def genus(self) -> int:
        return self.spec.genus

    def abelianize(self, word) -> np.ndarray:
        v = np.zeros(self.n_generators)
        for letter in word:
            v[letter // 2] += 1 if letter % 2 == 0 else -1
        return v

    def homology_class(self, word) -> np.ndarray:
        """Coordinates of the word's class in a rational basis of first homology."""
        return self.abelianize(word) @ self._cycle_basis

    def is_separating(self, word) -> bool:
        return bool(np.all(np.abs(self.homology_class(word)) < 1e-8))

    def is_separating_mod2(self, word) -> bool:
        """True when the word is null in homology with Z/2 coefficients.

        A closed curve that is null mod 2 bounds a region; this is the sense in
        which a figure eight winding twice around one class separates.
        """
        v = np.rint(self.abelianize(word)).astype(np.int64) % 2
        for pivot, row in self._mod2_rows:
            if v[pivot]:
                v ^= row
        return not v.any()

    def element(self, word) -> MobiusIsometry:
        out = MobiusIsometry.identity()
        for letter in word:
            out = out @ self.generators[letter]
        return out

    def word_str(self, word) -> str:
        return "".join(self.generator_names[letter] for letter in word) or "1"

    def parse_word(self, text: str) -> tuple:
        names = sorted(((n, i) for i, n in enumerate(self.generator_names)), key=lambda t: -len(t[0]))
        out, pos = [], 0
        while pos < len(text):
            for name, i in names:
                if text.startswith(name, pos):
                    out.append(i)
                    pos += len(name)
                    break
            else:
                raise ValueError(f"cannot parse word {text!r} at {pos}")
        return tuple(out)

    def contains(self, element: MobiusIsometry) -> bool:
        return self.tiling.is_deck_transformation(element, self.base_point)

    def relator_residual(self, relative: bool = False) -> float:
        """Max matrix residual of the vertex-cycle relators (each should be +-identity).

        With ``relative`` each residual is divided by the largest entry of the
        partial products, the scale at which roundoff enters.
        """
        ident = MobiusIsometry.identity()
        worst = 0.0
        for w in self.tiling.vertex_cycles():
            out, scale = ident, 1.0
            for letter in w:
                out = out @ self.generators[letter]
                scale = max(scale, float(np.abs(out.matrix).max()))
            r = out.distance_to(ident)
            worst = max(worst, r / scale if relative else r)
        return worst


def _gf2_echelon(rows: np.ndarray) -> list:
    """Reduced rows over GF(2) as ``(pivot, row)`` pairs."""
    basis = []
    for r in rows:
        r = r.copy()
        for pivot, b in basis:
            if r[pivot]:
                r ^= b
        nz = np.flatnonzero(r)
        if len(nz):
            pivot = int(nz[0])
            basis = [(p, b ^ r if b[pivot] else b) for p, b in basis]
            basis.append((pivot, r))
    return basis


def pants_polygons(spec: SurfaceSpec):
    """Hexagon charts and side gluings of a pants-glued surface.

    Pants ``p`` contributes the right-angled hexagon ``2p`` and its mirror
    image ``2p + 1``; cuff slot ``i`` is made of side ``2i`` of both.
    """
    polys = []
    for p in range(spec.n_pants):
        hexagon = right_angled_hexagon(spec.pants_cuffs(p))
        polys.append(hexagon.vertices)
        polys.append(np.conj(hexagon.vertices))
    gluings = []
    for p in range(spec.n_pants):
        for seam in (1, 3, 5):
            gluings.append(Gluing(2 * p, seam, 2 * p + 1, seam, reversed=False))
    for (p, i), (q, j) in spec.gluings:
        gluings.append(Gluing(2 * p, 2 * i, 2 * q + 1, 2 * j, reversed=False))
        gluings.append(Gluing(2 * p + 1, 2 * i, 2 * q, 2 * j, reversed=False))
    return polys, gluings


def _pants_tiling(spec: SurfaceSpec) -> Tiling:
    return Tiling(*pants_polygons(spec), root=None)


def bolza_octagon() -> np.ndarray:
    """Vertices of the regular octagon with angles pi/4, centred at the disk origin."""
    circumradius = math.acosh(3 + 2 * math.sqrt(2))
    r = math.tanh(circumradius / 2)
    return r * np.exp(1j * (np.pi / 8 + np.arange(8) * np.pi / 4))


def _bolza_tiling() -> Tiling:
    gluings = [Gluing(0, k, 0, k + 4, reversed=True) for k in range(4)]
    return Tiling([bolza_octagon()], gluings, root=0)


def build_surface(spec: SurfaceSpec) -> SurfaceModel:
    """Deck-group model of ``spec``; cuff holonomies are attached to the model."""
    if spec.kind is SurfaceKind.BOLZA:
        tiling = _bolza_tiling()
        base = 0j
        names = []
        for k in range(tiling.n_generators):
            names += [BOLZA_LETTERS[k], BOLZA_LETTERS[k].upper()]
    else:
        tiling = _pants_tiling(spec)
        base = _central_base_point(tiling)
        names = []
        for k in range(tiling.n_generators):
            names += [f"x{k}.", f"X{k}."]
    relations = np.array([_abelianize(w, tiling.n_generators) for w in tiling.vertex_cycles()])
    model = SurfaceModel(spec, tiling, base, tiling.radius_about(base), relations,
                         generator_names=names)
    if model.homology_rank != 2 * spec.genus:
        raise SurfaceStructureError(
            f"homology rank {model.homology_rank} does not match genus {spec.genus}")
    model.cuffs = _cuffs(model)
    return model


def _abelianize(word, n):
    v = np.zeros(n)
    for letter in word:
        v[letter // 2] += 1 if letter % 2 == 0 else -1
    return v


def _central_base_point(tiling: Tiling) -> complex:
    """Polygon centre minimising the domain circumradius."""
    candidates = [complex(pl.act_disk(c)) for pl, c in zip(tiling.placements, tiling.centres)]
    return min(candidates, key=tiling.radius_about)


def _cuffs(model: SurfaceModel) -> list:
    tiling = model.tiling
    out = []
    if model.spec.kind is SurfaceKind.BOLZA:
        for k in range(tiling.n_generators):
            g = tiling.generators[2 * k]
            out.append(Cuff(f"systole-{BOLZA_LETTERS[k]}", g.translation_length, g, (2 * k,)))
        return out
    for k, ((p, i), _) in enumerate(model.spec.gluings):
        poly = 2 * p
        verts = tiling.polygons[poly]
        prev_seam = (2 * i - 1) % 6
        next_seam = 2 * i + 1
        r1 = reflection_through(verts[prev_seam], verts[(prev_seam + 1) % 6])
        r2 = reflection_through(verts[next_seam], verts[(next_seam + 1) % 6])
        pl = tiling.placements[poly]
        g = pl @ r2 @ r1 @ pl.inverse()
        word = tiling.word_of(g, model.base_point)
        out.append(Cuff(f"cuff-{k}", g.translation_length, g, word))
    return out


# ---------------------------------------------------------------------------
# Length spectrum
# ---------------------------------------------------------------------------

@dataclass
class SpectrumEntry:
    length: float
    multiplicity: int
    separating: bool
    word: str
    simple: bool | None = None
    separating_mod2: bool | None = None


@dataclass
class Spectrum:
    entries: list
    cutoff: float
    horizon: float
    n_elements: int
    elements: list = field(default_factory=list, repr=False)

    @property
    def complete(self) -> bool:
        return self.horizon >= self.cutoff

    @property
    def possibly_incomplete(self) -> bool:
        return not self.complete

    def distinct_lengths(self, tol: float = 1e-9) -> list:
        out = []
        for e in self.entries:
            if not out or e.length - out[-1] > tol:
                out.append(e.length)
        return out


def _matrix_key(m: np.ndarray) -> tuple:
    scale = np.abs(m).max()
    n = m / scale
    flat = n.ravel()
    k = int(np.argmax(np.abs(flat) > 1e-6))
    if flat[k] < 0:
        n = -n
    return tuple(np.round(n.ravel() * 1e7).astype(np.int64)) + (int(round(math.log(scale) * 1e4)),)


def enumerate_elements(model: SurfaceModel, cutoff: float, max_word_len: int):
    """Deck elements carrying every closed geodesic of length ``<= cutoff``, by tile walks.

    Each closed geodesic has a lift whose axis meets some model polygon
    ``P_k`` at a point ``p``.  The walk from ``P_k`` along ``[p, g p]`` stays
    among tiles whose centres lie within ``cutoff + r_k + r_j`` of the
    centre of ``P_k`` (``r`` the tile circumradii), and ends at the tile
    ``g P_k`` whose centre is within ``cutoff + 2 r_k``.  Breadth-first
    search over that region, capped at ``max_word_len`` tile steps, therefore
    finds a representative of every class.

    Returns ``(matrices, words, horizon)``; ``horizon`` is the length below
    which the search is provably complete despite the step cap (``inf`` when
    the cap never bit).
    """
    tiling = model.tiling
    n_poly = len(tiling.polygons)
    centres_h = np.array([complex(1j * (1 + c) / (1 - c)) for c in tiling.centres])
    radii = np.array([float(disk_distance(c, p).max()) for c, p in zip(tiling.centres, tiling.polygons)])
    steps = {}
    for (poly, side), (other, _, t) in tiling.neighbor.items():
        steps.setdefault(poly, []).append((other, t.matrix, tiling.side_letter.get((poly, side))))
    seen_elements = set()
    mats, words = [], []
    horizon = math.inf
    for k in range(n_poly):
        root = tiling.placements[k].matrix
        root_inv = tiling.placements[k].inverse().matrix
        base = complex(_act_h(root[None], centres_h[k])[0])
        prune = cutoff + radii[k] + radii
        seen = {(k, _matrix_key(root))}
        frontier = {k: (root[None], [()])}
        for depth in range(1, max_word_len + 2):
            if not frontier:
                break
            nxt = {}
            for poly, (fm, fw) in frontier.items():
                for other, tmat, letter in steps[poly]:
                    cand = fm @ tmat
                    dist = _hdist(_act_h(cand, centres_h[other]), base)
                    for idx in np.flatnonzero(dist <= prune[other] + 1e-9):
                        key = (other, _matrix_key(cand[idx]))
                        if key in seen:
                            continue
                        if depth == max_word_len + 1:
                            horizon = min(horizon, float(dist[idx]) - radii[k] - radii[other])
                            continue
                        seen.add(key)
                        w = fw[idx] + ((letter,) if letter is not None else ())
                        bucket = nxt.setdefault(other, ([], []))
                        bucket[0].append(cand[idx])
                        bucket[1].append(w)
                        if other == k and dist[idx] <= cutoff + 2 * radii[k] + 1e-9:
                            h = cand[idx] @ root_inv
                            hkey = _matrix_key(h)
                            if hkey not in seen_elements:
                                seen_elements.add(hkey)
                                mats.append(h)
                                words.append(w)
            frontier = {p: (np.array(m), w) for p, (m, w) in nxt.items()}
    if not mats:
        return np.zeros((0, 2, 2)), [], horizon
    return np.array(mats), words, horizon


def _act_h(mats: np.ndarray, z: complex) -> np.ndarray:
    """Apply matrices to a half-plane point (orientation-reversing ones act on the conjugate)."""
    det = mats[:, 0, 0] * mats[:, 1, 1] - mats[:, 0, 1] * mats[:, 1, 0]
    w = np.where(det > 0, z, np.conj(z))
    return (mats[:, 0, 0] * w + mats[:, 0, 1]) / (mats[:, 1, 0] * w + mats[:, 1, 1])


def _hdist(w: np.ndarray, z: complex) -> np.ndarray:
    return 2 * np.arcsinh(np.abs(w - z) / (2 * np.sqrt(w.imag * z.imag)))


def _cyclic_reduce(word: tuple) -> tuple:
    w = list(word)
    while len(w) >= 2 and w[0] == (w[-1] ^ 1):
        w = w[1:-1]
    return tuple(w)


def _root_element(m: np.ndarray, k: int) -> MobiusIsometry:
    vals, vecs = np.linalg.eig(m)
    roots = np.sign(vals.real) * np.abs(vals.real) ** (1.0 / k)
    r = (vecs @ np.diag(roots) @ np.linalg.inv(vecs)).real
    return MobiusIsometry(r / math.sqrt(abs(np.linalg.det(r))))


MAX_SIMPLICITY_PROBES = 48


def default_max_word_len(model: SurfaceModel) -> int:
    """Tile-step cap: 12 for the single-octagon Bolza domain, generous for hexagon tilings."""
    return 12 if model.spec.kind is SurfaceKind.BOLZA else 64


def length_spectrum(model: SurfaceModel, cutoff: float, max_word_len: int | None = None,
                    keep_elements: bool = False, with_simplicity: bool = False) -> Spectrum:
    """Primitive closed-geodesic lengths up to ``cutoff``.

    Every free homotopy class of length ``l`` has a representative moving
    the base point by at most ``l + 2 rho`` (``rho`` the domain
    circumradius), so enumerating that ball is complete unless the word-length
    cap intervenes; in that case ``horizon`` reports the largest length
    below which the result is still provably complete.

    Entries are grouped by (length rounded to 1e-9, separating flag);
    ``multiplicity`` counts distinct first-homology classes up to sign, so
    all separating classes of one length count once.  With
    ``with_simplicity`` each group is further split by whether its geodesic
    is simple (checked by projecting one period of the axis to the domain).
    """
    if not cutoff > 0:
        raise HyperbolicDomainError("cutoff must be positive")
    if max_word_len is None:
        max_word_len = default_max_word_len(model)
    mats, words, horizon = enumerate_elements(model, cutoff, max_word_len)
    traces = np.abs(mats[:, 0, 0] + mats[:, 1, 1])
    hyper = traces > 2.0 + 1e-12
    lengths = np.zeros(len(mats))
    lengths[hyper] = 2 * np.arccosh(traces[hyper] / 2)

    groups = {}
    for idx in np.flatnonzero(hyper & (lengths <= cutoff + 1e-9)):
        length = float(lengths[idx])
        word = words[idx]
        hclass = model.homology_class(word)
        sep = bool(np.all(np.abs(hclass) < 1e-8))
        nz = np.flatnonzero(np.abs(hclass) > 1e-8)
        if len(nz) and hclass[nz[0]] < 0:
            hclass = -hclass
        hkey = tuple(np.round(hclass, 6) + 0.0)
        lkey = round(length, 9)
        group = groups.setdefault((lkey, sep), {})
        cur = group.get(hkey)
        if cur is None:
            group[hkey] = (length, word, idx, [idx])
        else:
            reps = cur[3]
            if len(reps) < MAX_SIMPLICITY_PROBES:
                reps.append(idx)
            if len(word) < len(cur[1]):
                group[hkey] = (length, word, idx, reps)

    shortest = min((k[0] for k in groups), default=math.inf)
    entries = []
    kept_elements = []
    for (lkey, sep), classes in sorted(groups.items()):
        primitive = {}
        for hkey, (length, word, idx, reps) in classes.items():
            if _is_proper_power(model, mats[idx], length, shortest):
                continue
            primitive[hkey] = (length, word, idx, reps)
        if not primitive:
            continue
        by_flags = {}
        for hkey, item in primitive.items():
            # a homology class can hold several geodesics of one length; one simple one suffices
            simple = (any(is_simple(model, MobiusIsometry(mats[i])) for i in item[3])
                      if with_simplicity else None)
            mod2 = model.is_separating_mod2(item[1])
            by_flags.setdefault((simple, mod2), {})[hkey] = item
        for (simple, mod2), subset in by_flags.items():
            best = min(subset.values(), key=lambda t: (len(t[1]), t[1]))
            entries.append(SpectrumEntry(
                length=best[0], multiplicity=len(subset), separating=sep,
                word=model.word_str(_cyclic_reduce(best[1])), simple=simple,
                separating_mod2=mod2))
            if keep_elements:
                kept_elements.extend(MobiusIsometry(mats[item[2]]) for item in subset.values())
    entries.sort(key=lambda e: (e.length, e.separating, bool(e.simple)))
    log.info("spectrum: %d elements, %d entries, horizon %.3f", len(mats), len(entries), horizon)
    return Spectrum(entries, cutoff, horizon, len(mats), kept_elements)


def self_intersections(model: SurfaceModel, element: MobiusIsometry) -> int:
    """Number of self-intersections of the closed geodesic of ``element``.

    One period of the axis is projected to the fundamental domain.  Crossings
    away from tiling vertices are found by intersecting the geodesic lines
    carrying the pieces inside the closed domain.  Passages through a vertex
    are counted per vertex class: two distinct strands of a geodesic through
    one point always cross, so ``k`` passages add ``k(k-1)/2``.  A crossing on
    a domain side can be seen from both paired sides, so the count is exact
    for deciding simplicity and an upper bound otherwise.
    """
    tiling = model.tiling
    x = axis_foot(element, model.base_point)
    # conjugate so the axis meets the fundamental domain
    _, _, e = tiling.locate(x)
    element = e.inverse() @ element @ e
    x = axis_foot(element, model.base_point)
    pieces, _ = tiling.project_segment(x, complex(element.act_disk(x)))
    if not hasattr(tiling, "vertex_class"):
        tiling.vertex_cycles()
    passes = {}
    for poly, ka, kb in pieces:
        if abs(kb - ka) < 1e-9:
            continue
        corners = disk_to_klein(tiling.polygons[poly])
        hit = np.flatnonzero(np.abs(corners - kb) < 1e-7)
        if len(hit):
            cls = tiling.vertex_class[(poly, int(hit[0]))]
            passes[cls] = passes.get(cls, 0) + 1
    count = sum(k * (k - 1) // 2 for k in passes.values())
    domain_corners = [complex(disk_to_klein(pl.act_disk(v)))
                      for pl, poly in zip(tiling.placements, tiling.polygons) for v in poly]
    chords = tiling.domain_chords(pieces)
    points = []
    for i in range(len(chords)):
        for j in range(i + 1, len(chords)):
            p = _chord_intersection(chords[i], chords[j])
            if p is None or min(abs(p - c) for c in domain_corners) < 1e-7:
                continue
            z = complex(klein_to_disk(p))
            if tiling.in_domain(z, 1e-9) and not any(abs(z - w) < 1e-7 for w in points):
                points.append(z)
    return count + len(points)


def _chord_intersection(a, b):
    da, db = a[1] - a[0], b[1] - b[0]
    den = (np.conj(da) * db).imag
    if abs(den) < 1e-14:
        return None
    w = b[0] - a[0]
    s = (np.conj(w) * db).imag / den
    p = a[0] + s * da
    return p if abs(p) < 1 - 1e-12 else None


def is_simple(model: SurfaceModel, element: MobiusIsometry) -> bool:
    return self_intersections(model, element) == 0


def _is_proper_power(model: SurfaceModel, m: np.ndarray, length: float, shortest: float) -> bool:
    k = 2
    while length / k >= shortest - 1e-9:
        if model.contains(_root_element(m, k)):
            return True
        k += 1
    return False


# ---------------------------------------------------------------------------
# Systole certificates
# ---------------------------------------------------------------------------

class CertificateStatus(str, enum.Enum):
    CERTIFIED = "certified"
    FAILED = "failed"
    UNKNOWN = "unknown"


@dataclass
class SystoleCertificate:
    status: CertificateStatus
    cuff_length: float
    collar_crossing: float | None
    shortest_other: float | None
    horizon: float | None
    notes: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.status is CertificateStatus.CERTIFIED


def collar_certifies(length: float) -> bool:
    """True when any geodesic crossing the collar is longer than its core."""
    return 2 * collar_halfwidth(length) > length


def collar_certificate(length: float) -> SystoleCertificate:
    """Certificate from the collar inequality alone, for a cuff of a pants-glued surface.

    Every cuff is then shorter than any closed geodesic crossing a collar, and a
    simple closed geodesic that is not a cuff crosses one; since a systole is
    simple, the cuffs are the systoles.
    """
    crossing = 2 * collar_halfwidth(length)
    ok = crossing > length
    note = f"collar crossing 2w(l) = {crossing:.6g} {'>' if ok else '<='} l = {length:.6g}"
    status = CertificateStatus.CERTIFIED if ok else CertificateStatus.UNKNOWN
    return SystoleCertificate(status, length, crossing, None, None, [note])


def certify_systole(model: SurfaceModel, cuff: int, max_word_len: int | None = None,
                    enumerate_spectrum: bool | None = None) -> SystoleCertificate:
    """Certify that a distinguished simple geodesic of ``model`` is a systole.

    For pants-glued models the collar inequality ``2 w(l) > l`` proves it
    outright (a systole is simple, and a simple geodesic other than the cuffs
    crosses some collar completely).  The spectrum check, run when
    ``enumerate_spectrum`` is true or when the collar inequality fails,
    looks for a strictly shorter closed geodesic within a provably complete
    enumeration.
    """
    c = model.cuffs[cuff]
    notes = []
    collar = None
    collar_ok = False
    if model.spec.kind is SurfaceKind.PANTS_GLUED:
        crossing = 2 * collar_halfwidth(c.length)
        collar = crossing
        collar_ok = crossing > c.length
        notes.append(f"collar crossing 2w(l) = {crossing:.6g} {'>' if collar_ok else '<='} l = {c.length:.6g}")
    else:
        notes.append("collar inequality not applicable; certificate rests on enumeration")
    if enumerate_spectrum is None:
        enumerate_spectrum = not collar_ok
    shortest = horizon = None
    if enumerate_spectrum:
        spec = length_spectrum(model, c.length + 1e-6, max_word_len)
        horizon = spec.horizon
        shorter = [e.length for e in spec.entries if e.length < c.length - 1e-9]
        shortest = min((e.length for e in spec.entries), default=None)
        if shorter:
            notes.append(f"closed geodesic of length {min(shorter):.6g} is shorter than the cuff")
            return SystoleCertificate(CertificateStatus.FAILED, c.length, collar, shortest, horizon, notes)
        if not spec.complete:
            notes.append(f"enumeration complete only below {spec.horizon:.6g}")
            status = CertificateStatus.CERTIFIED if collar_ok else CertificateStatus.UNKNOWN
            return SystoleCertificate(status, c.length, collar, shortest, horizon, notes)
        notes.append("complete enumeration finds nothing shorter")
        return SystoleCertificate(CertificateStatus.CERTIFIED, c.length, collar, shortest, horizon, notes)
    status = CertificateStatus.CERTIFIED if collar_ok else CertificateStatus.UNKNOWN
    return SystoleCertificate(status, c.length, collar, shortest, horizon, notes)
