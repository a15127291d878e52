"""Discrete sweepouts of a pair of pants by closed curves.

A pair of pants is the quotient of the hyperbolic plane by a free group
generated by the holonomies of two cuffs.  Curves are stored as one period
of a lift to the plane: points ``z_0 .. z_{N-1}`` together with a holonomy
``g``, the curve being the polyline ``z_0, ..., z_{N-1}, g(z_0)`` closed up
by ``g``.  The free homotopy class is the conjugacy class of ``g``, so the
flow below cannot leave it.

Curve shortening is a red-black relaxation: each vertex moves a fraction
``dt`` of the way to the geodesic midpoint of its two neighbours.  Distance
is convex along geodesics, so every half-sweep shortens the polyline; the
fixed points are exactly the closed geodesics with evenly spaced vertices.
"""

from __future__ import annotations

import csv
import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    MobiusIsometry,
    RightAngledHexagon,
    disk_distance,
    disk_geodesic_point,
    disk_midpoint,
    disk_to_klein,
    klein_to_disk,
    reflection_through,
    right_angled_hexagon,
)
from .hyptrig import CuffLengths, HyperbolicDomainError, figure_eight_length, hexagon_seam
from .tiling import Gluing, Tiling

log = logging.getLogger(__name__)

DEFAULT_RESOLUTION = 0.05
#: Smallest interior angle (degrees) tolerated at a vertex after corner rounding.
CORNER_THRESHOLD_DEG = 150.0
#: Length increase tolerated per step before the flow is declared unstable.
MONOTONE_TOL = 1e-12


class FlowInstabilityError(RuntimeError):
    """A shortening step increased length; a smaller ``dt`` is needed."""


class FlowStagnationError(RuntimeError):
    """The flow stopped before reaching the expected geodesic."""


class SurgeryError(ValueError):
    """Surgery preconditions failed (no unique transverse self-intersection)."""


class Direction(str, enum.Enum):
    SPLIT = "split"
    MERGE = "merge"


# ---------------------------------------------------------------------------
# The pants and its group
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PantsDomain:
    """Pair of pants as two right-angled hexagons glued along their seams.

    ``holonomies[i]`` translates along a lift of cuff ``i``; they are
    oriented so that ``g1 g2`` is conjugate to cuff 3 and ``g1 g2^-1`` is
    the figure eight around cuffs 1 and 2.
    """

    cuffs: CuffLengths
    hexagon: RightAngledHexagon
    tiling: Tiling
    holonomies: tuple

    @property
    def figure_eight_element(self) -> MobiusIsometry:
        g1, g2, _ = self.holonomies
        return g1 @ g2.inverse()

    @property
    def base_point(self) -> complex:
        return complex(self.tiling.centres[0])

    def boundary_lengths(self) -> tuple:
        return tuple(g.translation_length for g in self.holonomies)

    def side_relation_residual(self) -> float:
        """Residual of the right-angled hexagon relations (seams from cuffs, closure, angles)."""
        c1, c2, c3 = (x / 2 for x in self.cuffs)
        s = self.hexagon.side_lengths
        expected = (hexagon_seam(c3, c1, c2), hexagon_seam(c1, c2, c3), hexagon_seam(c2, c3, c1))
        res = max(abs(a - b) for a, b in zip((s[1], s[3], s[5]), expected))
        return max(res, self.hexagon.closure_residual())

    def generator_names(self) -> list:
        return ["x", "X", "y", "Y"][: 2 * self.tiling.n_generators]


def build_pants_domain(cuffs) -> PantsDomain:
    """Pants with boundary lengths ``cuffs``; its cuffs are the hexagon sides 0, 2, 4."""
    c = CuffLengths(*cuffs).validated()
    hexagon = right_angled_hexagon(c)
    upper = hexagon.vertices
    lower = np.conj(upper)
    gluings = [Gluing(0, seam, 1, seam, reversed=False) for seam in (1, 3, 5)]
    tiling = Tiling([upper, lower], gluings, root=0, allow_boundary=True)

    def cuff_holonomy(i):
        prev_seam, next_seam = (2 * i - 1) % 6, 2 * i + 1
        r1 = reflection_through(upper[prev_seam], upper[(prev_seam + 1) % 6])
        r2 = reflection_through(upper[next_seam], upper[(next_seam + 1) % 6])
        return r2 @ r1

    g1, g2, g3 = (cuff_holonomy(i) for i in range(3))
    if abs((g1 @ g2).translation_length - c.l3) > abs((g1 @ g2.inverse()).translation_length - c.l3):
        g2 = g2.inverse()
    g3 = (g1 @ g2).inverse()
    domain = PantsDomain(c, hexagon, tiling, (g1, g2, g3))
    fig8 = domain.figure_eight_element.translation_length
    if abs(fig8 - figure_eight_length(c)) > 1e-8 * max(1.0, fig8):
        raise HyperbolicDomainError("pants group does not realize the figure-eight length")
    return domain


# ---------------------------------------------------------------------------
# Discrete curves
# ---------------------------------------------------------------------------

@dataclass
class DiscreteCurve:
    """One period of a lifted closed polyline; the curve closes up through ``holonomy``."""

    points: np.ndarray
    holonomy: MobiusIsometry
    resolution: float = DEFAULT_RESOLUTION
    label: str = ""

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=complex).copy()
        if len(self.points) < 3:
            raise ValueError("a discrete curve needs at least three vertices")

    @property
    def n(self) -> int:
        return len(self.points)

    def closed_points(self) -> np.ndarray:
        """Vertices followed by the image of the first one under the holonomy."""
        return np.append(self.points, self.holonomy.act_disk(self.points[0]))

    def edge_lengths(self) -> np.ndarray:
        z = self.closed_points()
        return disk_distance(z[:-1], z[1:])

    @property
    def length(self) -> float:
        return float(math.fsum(self.edge_lengths()))

    def spacing_ok(self) -> bool:
        e = self.edge_lengths()
        return bool(e.min() >= 0.25 * self.resolution and e.max() <= 4 * self.resolution)

    def turning_angles(self) -> np.ndarray:
        """Exterior angle at each vertex (0 on a geodesic)."""
        z = self.points
        h = self.holonomy
        prev = np.roll(z, 1)
        prev[0] = h.inverse().act_disk(z[-1])
        nxt = np.roll(z, -1)
        nxt[-1] = h.act_disk(z[0])
        u = (nxt - z) / (1 - np.conj(z) * nxt)
        v = (prev - z) / (1 - np.conj(z) * prev)
        return np.pi - np.abs(np.angle(u / v))

    def copy(self) -> "DiscreteCurve":
        return DiscreteCurve(self.points.copy(), self.holonomy, self.resolution, self.label)


def point_at(curve: DiscreteCurve, s: float) -> complex:
    """Point at arclength ``s`` along the periodic lift (``s`` may be negative or exceed one period)."""
    L = curve.length
    k = math.floor(s / L)
    g = curve.holonomy.power(k) if k else MobiusIsometry.identity()
    s -= k * L
    z = curve.closed_points()
    cum = np.concatenate([[0.0], np.cumsum(curve.edge_lengths())])
    i = min(int(np.searchsorted(cum, s, side="right")) - 1, curve.n - 1)
    frac = (s - cum[i]) / max(cum[i + 1] - cum[i], 1e-300)
    return complex(g.act_disk(disk_geodesic_point(z[i], z[i + 1], frac)))


def sub_polyline(curve: DiscreteCurve, s0: float, s1: float) -> np.ndarray:
    """Lift of the arc between arclengths ``s0 < s1``, vertices included."""
    L = curve.length
    cum = np.concatenate([[0.0], np.cumsum(curve.edge_lengths())])[:-1]
    out = [point_at(curve, s0)]
    k0 = math.floor(s0 / L)
    for k in range(k0, math.floor(s1 / L) + 1):
        g = curve.holonomy.power(k) if k else MobiusIsometry.identity()
        for i in range(curve.n):
            s = cum[i] + k * L
            if s0 + 1e-12 < s < s1 - 1e-12:
                out.append(complex(g.act_disk(curve.points[i])))
    out.append(point_at(curve, s1))
    return np.array(out)


def resample(curve: DiscreteCurve, resolution: float | None = None) -> DiscreteCurve:
    """Equal-arclength vertices along the current polyline (never lengthens it)."""
    res = curve.resolution if resolution is None else resolution
    L = curve.length
    n = max(8, 2 * int(round(L / (2 * res))))
    z = curve.closed_points()
    cum = np.concatenate([[0.0], np.cumsum(curve.edge_lengths())])
    s = np.arange(n) * (L / n)
    i = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, curve.n - 1)
    frac = (s - cum[i]) / np.maximum(cum[i + 1] - cum[i], 1e-300)
    pts = disk_geodesic_point(z[i], z[i + 1], frac)
    return DiscreteCurve(pts, curve.holonomy, res, curve.label)


def curve_through(element: MobiusIsometry, base: complex, resolution: float = DEFAULT_RESOLUTION,
                  label: str = "") -> DiscreteCurve:
    """Closed curve in the class of ``element``: the projection of the segment ``[base, element(base)]``."""
    end = complex(element.act_disk(base))
    n = max(8, 2 * int(round(float(disk_distance(base, end)) / (2 * resolution))))
    pts = disk_geodesic_point(base, end, np.arange(n) / n)
    return DiscreteCurve(pts, element, resolution, label)


# ---------------------------------------------------------------------------
# Curve shortening
# ---------------------------------------------------------------------------

@dataclass
class FlowLog:
    lengths: list = field(default_factory=list)
    displacements: list = field(default_factory=list)
    steps: int = 0


def _half_sweep(z: np.ndarray, h: MobiusIsometry, h_inv: MobiusIsometry, parity: int, dt: float,
                active: np.ndarray | None) -> float:
    n = len(z)
    idx = np.arange(parity, n, 2)
    if active is not None:
        idx = idx[active[idx]]
        if not len(idx):
            return 0.0
    prev = z[(idx - 1) % n]
    nxt = z[(idx + 1) % n]
    if idx[0] == 0:
        prev[0] = h_inv.act_disk(z[-1])
    if idx[-1] == n - 1:
        nxt[-1] = h.act_disk(z[0])
    target = disk_midpoint(prev, nxt)
    new = disk_geodesic_point(z[idx], target, dt)
    disp = float(disk_distance(z[idx], new).max())
    z[idx] = new
    return disp


def shorten(curve: DiscreteCurve, domain: PantsDomain | None = None, steps: int = 1, dt: float = 1.0,
            resample_every: int = 0, tol: float = 0.0, log_to: FlowLog | None = None,
            active: np.ndarray | None = None) -> DiscreteCurve:
    """Run ``steps`` shortening steps; stop early once vertices move less than ``tol * dt``.

    ``dt`` in ``(0, 1]`` is the fraction of the way each vertex moves to its
    neighbours' midpoint.  Lengths are checked after every step; an increase
    beyond ``1e-12`` raises :class:`FlowInstabilityError`.  ``active``
    restricts the update to a boolean mask of vertices.  ``domain`` is
    accepted for symmetry with the other operations and is not needed.
    """
    if not 0 < dt <= 1:
        raise FlowInstabilityError(f"dt must lie in (0, 1], got {dt}")
    out = curve.copy()
    if out.n % 2:
        out = resample(out)
        active = None
    h = out.holonomy
    h_inv = h.inverse()
    length = out.length
    for step in range(steps):
        disp = _half_sweep(out.points, h, h_inv, 0, dt, active)
        disp = max(disp, _half_sweep(out.points, h, h_inv, 1, dt, active))
        if resample_every and (step + 1) % resample_every == 0 and active is None:
            out = resample(out)
        new_length = out.length
        if new_length > length + MONOTONE_TOL * max(1.0, length):
            raise FlowInstabilityError(
                f"length increased from {length!r} to {new_length!r}; use a smaller dt")
        length = new_length
        if log_to is not None:
            log_to.lengths.append(length)
            log_to.displacements.append(disp)
            log_to.steps += 1
        if disp < tol * dt:
            break
    return out


def flow_to_geodesic(curve: DiscreteCurve, tol: float = 1e-8, max_steps: int = 200000,
                     levels: int = 3, log_to: FlowLog | None = None) -> DiscreteCurve:
    """Flow until vertices move less than ``tol`` per unit time, refining the resolution dyadically.

    The flow starts at ``2**(levels-1)`` times the target spacing, which cuts
    the relaxation time of the fine levels.
    """
    target = curve.resolution
    out = curve
    for level in reversed(range(levels)):
        out = resample(out, target * 2 ** level)
        out = shorten(out, steps=max_steps, tol=tol if level == 0 else 10 * tol,
                      resample_every=500, log_to=log_to)
    return resample_if_needed(out)


def resample_if_needed(curve: DiscreteCurve) -> DiscreteCurve:
    return curve if curve.spacing_ok() and curve.n % 2 == 0 else resample(curve)


# ---------------------------------------------------------------------------
# Self-intersections and homotopy words
# ---------------------------------------------------------------------------

@dataclass
class Crossing:
    seg_a: int
    seg_b: int
    s_a: float  # arclength positions along one period
    s_b: float
    point_a: complex  # lift on segment a
    point_b: complex  # lift on segment b
    deck: MobiusIsometry  # point_b = deck(point_a)


def _klein_params(a0, a1, b0, b1):
    """Parameters ``(s, t)`` of the intersection of Klein lines ``a0 a1`` and ``b0 b1``."""
    da, db, w = a1 - a0, b1 - b0, b0 - a0
    den = (np.conj(da) * db).imag
    if abs(den) < 1e-14 * abs(da) * abs(db):
        return None
    return (np.conj(w) * db).imag / den, (np.conj(w) * da).imag / den


def _lift_crossings(pieces_a, pts_a, pieces_b, pts_b, same: bool, tol: float = 1e-9) -> list:
    """Transverse crossings between two projected polylines, or of one polyline with itself.

    Pieces meeting in a common model polygon (endpoints included, so that
    crossings on a shared side are seen) propose a deck element ``h``; the
    full lifted segments are then tested in the chart of segment ``a``.
    Segments count as half-open so a crossing at a vertex is seen once.
    Returns ``(i, j, s, t, point_a, h)`` tuples, where ``h`` maps the lift on
    segment ``i`` of ``a`` to the lift on segment ``j`` of ``b``.
    """
    out = []
    by_poly = {}
    for q, piece in enumerate(pieces_b):
        by_poly.setdefault(piece[0], []).append(q)
    for pa in pieces_a:
        poly, ka0, ka1, i, ga = pa
        for q in by_poly.get(poly, ()):
            _, kb0, kb1, j, gb = pieces_b[q]
            if same and j <= i:
                continue
            st = _klein_params(ka0, ka1, kb0, kb1)
            if st is None or not (-tol <= st[0] <= 1 + tol and -tol <= st[1] <= 1 + tol):
                continue
            A = disk_to_klein(ga.inverse().act_disk(pts_a[i:i + 2]))
            B = disk_to_klein(gb.inverse().act_disk(pts_b[j:j + 2]))
            st = _klein_params(A[0], A[1], B[0], B[1])
            if st is None or not (-tol <= st[0] < 1 - tol and -tol <= st[1] < 1 - tol):
                continue
            h = gb @ ga.inverse()
            if any(i == c[0] and j == c[1] and h.distance_to(c[5]) < 1e-7 for c in out):
                continue
            x = complex(ga.act_disk(klein_to_disk(A[0] + st[0] * (A[1] - A[0]))))
            out.append((i, j, st[0], st[1], x, h))
    return out


def self_crossings(curve: DiscreteCurve, domain: PantsDomain) -> list:
    """Transverse self-intersections of the projected polyline."""
    z = curve.closed_points()
    pieces = domain.tiling.project_polyline(z, with_maps=True)
    cum = np.concatenate([[0.0], np.cumsum(curve.edge_lengths())])
    out = []
    for i, j, _, _, xa, h in _lift_crossings(pieces, z, pieces, z, same=True):
        if j == curve.n - 1 and i == 0 and h.distance_to(curve.holonomy) < 1e-7:
            continue  # the closing vertex meeting its own translate
        xb = complex(h.act_disk(xa))
        s_a = cum[i] + float(disk_distance(z[i], xa))
        s_b = cum[j] + float(disk_distance(z[j], xb))
        out.append(Crossing(i, j, s_a, s_b, xa, xb, h))
    return out


def crossings_between(c1: DiscreteCurve, c2: DiscreteCurve, domain: PantsDomain) -> int:
    t = domain.tiling
    z1, z2 = c1.closed_points(), c2.closed_points()
    return len(_lift_crossings(t.project_polyline(z1, with_maps=True), z1,
                               t.project_polyline(z2, with_maps=True), z2, same=False))


def crossing_word(curve: DiscreteCurve, domain: PantsDomain) -> str:
    """Cyclically reduced word of side pairings crossed by one period of the curve."""
    letters = []
    domain.tiling.project_polyline(curve.closed_points(), letters=letters)
    word = []
    for letter in letters:
        if word and word[-1] == letter ^ 1:
            word.pop()
        else:
            word.append(letter)
    while len(word) >= 2 and word[0] == word[-1] ^ 1:
        word = word[1:-1]
    names = domain.generator_names()
    return "".join(names[x] for x in word)


def canonical_cyclic_word(word: str) -> str:
    """Lexicographically least rotation, so conjugate cyclic words compare equal."""
    if not word:
        return word
    return min(word[i:] + word[:i] for i in range(len(word)))


# ---------------------------------------------------------------------------
# The figure eight
# ---------------------------------------------------------------------------

def figure_eight_geodesic(domain: PantsDomain, resolution: float = DEFAULT_RESOLUTION,
                          tol: float = 1e-9, log_to: FlowLog | None = None) -> DiscreteCurve:
    """Flow a curve in the figure-eight class to the figure-eight geodesic."""
    start = curve_through(domain.figure_eight_element, domain.base_point, resolution, "figure-eight")
    curve = flow_to_geodesic(start, tol=tol, log_to=log_to)
    crossings = self_crossings(curve, domain)
    target = figure_eight_length(domain.cuffs)
    if len(crossings) != 1 or abs(curve.length - target) > 0.01 * target:
        raise FlowStagnationError(
            f"flow ended with {len(crossings)} self-intersections and length {curve.length:.6g} "
            f"(expected 1 and {target:.6g})")
    return curve


# ---------------------------------------------------------------------------
# Surgery at the double point
# ---------------------------------------------------------------------------

def _chord(p: complex, q: complex, resolution: float) -> np.ndarray:
    n = max(2, int(math.ceil(float(disk_distance(p, q)) / resolution)))
    return disk_geodesic_point(p, q, np.arange(1, n) / n)


def surgery(curve: DiscreteCurve, direction, t: float, domain: PantsDomain,
            smooth: bool = True) -> list:
    """Resolve the unique double point by cutting a ball of radius ``t`` around it.

    ``split`` reconnects the strands into two loops (one per lobe); ``merge``
    reconnects them into one loop traversing one lobe backwards.  Corners
    left by the geodesic chords are rounded by local shortening until every
    interior angle is at least 150 degrees, so the outputs stay shorter than
    the input.
    """
    direction = Direction(direction)
    crossings = self_crossings(curve, domain)
    if len(crossings) != 1:
        raise SurgeryError(f"expected one transverse self-intersection, found {len(crossings)}")
    x = crossings[0]
    L = curve.length
    s1, s2 = x.s_a, x.s_b
    if not 0 < t < min(s2 - s1, L - (s2 - s1)) / 4:
        raise SurgeryError(f"surgery radius {t} exceeds the lobe scale")
    h = x.deck
    F = curve.holonomy
    res = curve.resolution
    if direction is Direction.SPLIT:
        lobe1 = sub_polyline(curve, s1 + t, s2 - t)
        lobe2 = sub_polyline(curve, s2 + t, s1 + L - t)
        loops = [(lobe1, h), (lobe2, F @ h.inverse())]
    else:
        forward = sub_polyline(curve, s1 + t, s2 - t)
        backward = h.act_disk(sub_polyline(curve, s2 + t - L, s1 - t)[::-1])
        loops = [(np.concatenate([forward, _chord(forward[-1], backward[0], res), backward]),
                  h @ F.inverse() @ h)]
    out = []
    for pts, hol in loops:
        closing = _chord(pts[-1], complex(hol.act_disk(pts[0])), res)
        c = DiscreteCurve(np.concatenate([pts, closing]), hol, res, direction.value)
        c = resample(c)
        if smooth:
            c = round_corners(c)
        out.append(c)
    return out


def round_corners(curve: DiscreteCurve, threshold_deg: float = CORNER_THRESHOLD_DEG,
                  window: int = 3, max_rounds: int = 10000) -> DiscreteCurve:
    """Shorten locally, within ``window`` vertices of each sharp corner, until no corner is sharp."""
    limit = np.pi - math.radians(threshold_deg)
    out = curve
    for _ in range(max_rounds):
        sharp = out.turning_angles() > limit
        if not sharp.any():
            return out
        active = np.zeros(out.n, dtype=bool)
        for k in np.flatnonzero(sharp):
            active[np.arange(k - window, k + window + 1) % out.n] = True
        out = shorten(out, steps=5, active=active)
    raise FlowStagnationError("corner rounding did not converge")


# ---------------------------------------------------------------------------
# Sweepout
# ---------------------------------------------------------------------------

@dataclass
class SweepoutSample:
    t: float
    components: list
    length: float
    embedded: bool | None = None

    @property
    def n_components(self) -> int:
        return len(self.components)


@dataclass
class SweepoutTrace:
    samples: list
    cuffs: tuple = ()

    @property
    def lengths(self) -> np.ndarray:
        return np.array([s.length for s in self.samples])

    @property
    def max_index(self) -> int:
        return int(np.argmax(self.lengths))

    @property
    def max_length(self) -> float:
        return float(self.lengths.max())

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "length", "components"])
            for s in self.samples:
                w.writerow([f"{s.t:.12g}", f"{s.length:.12g}", s.n_components])

    def write_polylines(self, path, domain: PantsDomain) -> None:
        """Plain-text polylines in fundamental-domain disk coordinates, one block per piece."""
        with open(path, "w") as fh:
            for k, s in enumerate(self.samples):
                fh.write(f"# sample {k} t={s.t:.12g} length={s.length:.12g} components={s.n_components}\n")
                for c_idx, c in enumerate(s.components):
                    fh.write(f"# component {c_idx}\n")
                    for poly, ka, kb, _ in domain.tiling.project_polyline(c.closed_points()):
                        pl = domain.tiling.placements[poly]
                        for q in (ka, kb):
                            z = complex(pl.act_disk(klein_to_disk(q)))
                            fh.write(f"{z.real:.12g} {z.imag:.12g}\n")
                        fh.write("\n")


def _embedded(components: list, domain: PantsDomain) -> bool:
    if any(self_crossings(c, domain) for c in components):
        return False
    return all(crossings_between(a, b, domain) == 0
               for i, a in enumerate(components) for b in components[i + 1:])


def _flow_samples(components: list, sign: float, surgery_t: float, n_samples: int,
                  tol: float) -> list:
    """Flow all components together, sampling at geometrically growing step counts."""
    samples = []
    res = components[0].resolution
    flow_time = 0.0
    checkpoints = np.unique(np.geomspace(1, 20000, n_samples).astype(int))
    done = 0
    comps = [c.copy() for c in components]
    for cp in checkpoints:
        steps = cp - done
        comps = [shorten(c, steps=steps, resample_every=200) for c in comps]
        done = cp
        flow_time = done * res ** 2 / 2
        t = sign * (2 / math.pi) * math.atan(surgery_t + flow_time)
        samples.append((t, comps))
    comps = [flow_to_geodesic(c, tol=tol, levels=1) for c in comps]
    samples.append((sign * 1.0, comps))
    return samples


def run_sweepout(domain: PantsDomain, resolution: float = DEFAULT_RESOLUTION, surgery_t: float = 0.05,
                 n_samples: int = 12, tol: float = 1e-9, check_embedded: bool = True) -> SweepoutTrace:
    """Sweep the pants from the two cuffs 1, 2 (``t = -1``) through the figure eight to cuff 3 (``t = 1``).

    ``t`` is ``sign * (2/pi) * arctan(surgery radius + flow time)``, with the
    flow time of the discrete scheme taken as ``steps * h^2 / 2``.
    """
    fig8 = figure_eight_geodesic(domain, resolution, tol)
    samples = [SweepoutSample(0.0, [fig8], fig8.length, False)]
    for direction, sign in ((Direction.MERGE, 1.0), (Direction.SPLIT, -1.0)):
        comps = surgery(fig8, direction, surgery_t, domain)
        first = SweepoutSample(sign * (2 / math.pi) * math.atan(surgery_t), comps,
                               math.fsum(c.length for c in comps))
        flowed = [SweepoutSample(t, cs, math.fsum(c.length for c in cs))
                  for t, cs in _flow_samples(comps, sign, surgery_t, n_samples, tol)]
        samples.extend([first] + flowed)
    samples.sort(key=lambda s: s.t)
    if check_embedded:
        for s in samples:
            if s.t != 0.0:
                s.embedded = _embedded(s.components, domain)
    return SweepoutTrace(samples, tuple(domain.cuffs))


# ---------------------------------------------------------------------------
# Composite sweepouts of glued surfaces
# ---------------------------------------------------------------------------

@dataclass
class CompositeSample:
    t: float
    mass: float
    pants: int
    components: int


@dataclass
class CompositeTrace:
    surface: str
    samples: list

    @property
    def max_mass(self) -> float:
        return max(s.mass for s in self.samples)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "mass", "pants", "components"])
            for s in self.samples:
                w.writerow([f"{s.t:.12g}", f"{s.mass:.12g}", s.pants, s.components])


def _append_stage(out: list, trace: SweepoutTrace, pants: int, n_stages: int, reverse: bool,
                  extra: float, cancel_start: bool, cancel_end: bool) -> None:
    samples = trace.samples[::-1] if reverse else trace.samples
    for k, s in enumerate(samples):
        local = (1 - s.t) / 2 if reverse else (s.t + 1) / 2
        mass = s.length + extra
        if (k == 0 and cancel_start) or (k == len(samples) - 1 and cancel_end):
            mass = 0.0  # two glued copies of one cuff cancel mod 2
        out.append(CompositeSample((pants + local) / n_stages * 2 - 1, mass, pants, s.n_components))


def composite_sweepout_S_ma(a: float, m: int, trace: SweepoutTrace | None = None,
                            **kwargs) -> CompositeTrace:
    """Sweep the linear-chain surface one pants at a time, from the zero cycle to the zero cycle.

    Between stages the cycle is the cuff (or cuff pair) shared with the next
    pants, so every sample is a cycle inside a single pants and the maximum
    mass is the single-pants maximum.  All pants are isometric, so one pants
    trace serves every stage; a stage entered through two cuffs runs it from
    ``t = -1`` and one entered through a single cuff runs it backwards.
    """
    if trace is None:
        trace = run_sweepout(build_pants_domain((a, a, a)), **kwargs)
    n = 2 * m - 2
    out = []
    for p in range(n):
        # stage 0 starts at its self-glued pair (zero cycle); interior pants of a pair
        # alternate single-cuff and two-cuff entry; the last stage ends at its self-glued pair
        enters_through_pair = p % 2 == 0
        _append_stage(out, trace, p, n, reverse=not enters_through_pair, extra=0.0,
                      cancel_start=p == 0, cancel_end=p == n - 1)
    return CompositeTrace(f"S_ma(m={m}, a={a:g})", out)


def composite_sweepout_S_L(L: float, trace: SweepoutTrace | None = None, **kwargs) -> CompositeTrace:
    """Sweep one pants from cuff 3 to cuffs 1 and 2, then the other back, plus the cuff 3 cycle.

    Adding the cuff shared by the two pants makes both ends the zero cycle.
    """
    if trace is None:
        trace = run_sweepout(build_pants_domain((L, L, L)), **kwargs)
    out = []
    _append_stage(out, trace, 0, 2, reverse=True, extra=L, cancel_start=True, cancel_end=False)
    _append_stage(out, trace, 1, 2, reverse=False, extra=L, cancel_start=False, cancel_end=True)
    return CompositeTrace(f"S_L(L={L:g})", out)
