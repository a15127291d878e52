"""Hyperbolic-plane plumbing: isometries, model conversions, hexagons.

Isometries are real 2x2 matrices acting on the upper half-plane.  A matrix
with determinant +1 acts by ``z -> (az+b)/(cz+d)``; a matrix with
determinant -1 acts by the same formula applied to ``conj(z)`` and is an
orientation-reversing isometry (a reflection or glide).  With this
convention composition of isometries is plain matrix multiplication.

Points handed to and returned from the public helpers live in the Poincare
disk unless a function name says otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hyptrig import HyperbolicDomainError, hexagon_seam, safe_arccosh

DET_TOL = 1e-12


# ---------------------------------------------------------------------------
# Model conversions (vectorized over complex arrays)
# ---------------------------------------------------------------------------

def disk_to_halfplane(z):
    z = np.asarray(z, dtype=complex)
    return 1j * (1 + z) / (1 - z)


def halfplane_to_disk(w):
    w = np.asarray(w, dtype=complex)
    return (w - 1j) / (w + 1j)


def disk_to_klein(z):
    z = np.asarray(z, dtype=complex)
    return 2 * z / (1 + np.abs(z) ** 2)


def klein_to_disk(k):
    k = np.asarray(k, dtype=complex)
    r2 = np.abs(k) ** 2
    return k / (1 + np.sqrt(np.maximum(1 - r2, 0.0)))


def disk_to_hyperboloid(z):
    """Return an ``(..., 3)`` array ``(x0, x1, x2)`` with ``x0^2 - x1^2 - x2^2 = 1``."""
    z = np.asarray(z, dtype=complex)
    r2 = np.abs(z) ** 2
    d = 1 - r2
    return np.stack([(1 + r2) / d, 2 * z.real / d, 2 * z.imag / d], axis=-1)


def hyperboloid_to_disk(x):
    x = np.asarray(x, dtype=float)
    return (x[..., 1] + 1j * x[..., 2]) / (1 + x[..., 0])


def disk_distance(z, w):
    """Hyperbolic distance between disk points (broadcasting)."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    num = np.abs(z - w)
    den = np.abs(1 - np.conj(w) * z)
    ratio = np.minimum(num / den, 1 - 1e-16)
    return 2 * np.arctanh(ratio)


def disk_geodesic_point(z, w, t):
    """Point at fraction ``t`` of the way from ``z`` to ``w`` along their geodesic."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    u = (w - z) / (1 - np.conj(z) * w)
    r = np.abs(u)
    with np.errstate(invalid="ignore", divide="ignore"):
        scale = np.where(r > 0, np.tanh(t * np.arctanh(np.minimum(r, 1 - 1e-16))) / r, 0.0)
    v = u * scale
    return (v + z) / (1 + np.conj(z) * v)


def disk_midpoint(z, w):
    return disk_geodesic_point(z, w, 0.5)


def disk_exp(z, direction, dist):
    """Move from ``z`` a hyperbolic distance ``dist`` in the unit direction ``direction``."""
    v = np.tanh(np.asarray(dist) / 2) * np.asarray(direction, dtype=complex)
    z = np.asarray(z, dtype=complex)
    return (v + z) / (1 + np.conj(z) * v)


def hyperbolic_triangle_area(a, b, c):
    """Area (angle defect) of geodesic triangles with side lengths ``a, b, c``."""
    a, b, c = (np.asarray(x, dtype=float) for x in (a, b, c))
    ca, cb, cc = np.cosh(a), np.cosh(b), np.cosh(c)
    sa, sb, sc = np.sinh(a), np.sinh(b), np.sinh(c)

    def angle(opp_c, s1, c1, s2, c2):
        cos = (c1 * c2 - opp_c) / (s1 * s2)
        return np.arccos(np.clip(cos, -1.0, 1.0))

    alpha = angle(ca, sb, cb, sc, cc)
    beta = angle(cb, sa, ca, sc, cc)
    gamma = angle(cc, sa, ca, sb, cb)
    return np.pi - alpha - beta - gamma


# ---------------------------------------------------------------------------
# Isometries
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class MobiusIsometry:
    """Isometry of the hyperbolic plane as a real 2x2 matrix of determinant +-1.

    Determinant +1 is the orientation-preserving case (an element of
    PSL(2,R)); the matrix is only defined up to sign.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float).reshape(2, 2)
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        if abs(abs(det) - 1.0) > 1e-6:
            raise HyperbolicDomainError(f"isometry matrix must have determinant +-1, got {det}")
        m = m / math.sqrt(abs(det))
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls) -> "MobiusIsometry":
        return cls(np.eye(2))

    @property
    def det(self) -> float:
        m = self.matrix
        return float(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])

    @property
    def preserves_orientation(self) -> bool:
        return self.det > 0

    @property
    def trace(self) -> float:
        return float(self.matrix[0, 0] + self.matrix[1, 1])

    @property
    def is_hyperbolic(self) -> bool:
        return self.preserves_orientation and abs(self.trace) > 2.0

    @property
    def translation_length(self) -> float:
        """``2 arccosh(|tr|/2)``; zero for elliptic/parabolic elements."""
        t = abs(self.trace) / 2
        return 2.0 * math.acosh(t) if t > 1.0 else 0.0

    def __matmul__(self, other: "MobiusIsometry") -> "MobiusIsometry":
        # the product has determinant +-1 exactly; renormalize away accumulated roundoff
        return MobiusIsometry._normalized(self.matrix @ other.matrix)

    @classmethod
    def _normalized(cls, m: np.ndarray) -> "MobiusIsometry":
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        out = object.__new__(cls)
        m = m / math.sqrt(abs(det))
        m.setflags(write=False)
        object.__setattr__(out, "matrix", m)
        return out

    def inverse(self) -> "MobiusIsometry":
        (a, b), (c, d) = self.matrix
        return MobiusIsometry._normalized(np.array([[d, -b], [-c, a]]) * np.sign(self.det))

    def power(self, n: int) -> "MobiusIsometry":
        base = self if n >= 0 else self.inverse()
        out = MobiusIsometry.identity()
        for _ in range(abs(n)):
            out = out @ base
        return out

    def act_halfplane(self, w):
        w = np.asarray(w, dtype=complex)
        if not self.preserves_orientation:
            w = np.conj(w)
        (a, b), (c, d) = self.matrix
        return (a * w + b) / (c * w + d)

    def act_disk(self, z):
        return halfplane_to_disk(self.act_halfplane(disk_to_halfplane(z)))

    def __call__(self, z):
        return self.act_disk(z)

    def normalized(self) -> np.ndarray:
        """Matrix with the sign fixed so the first significant entry is positive."""
        flat = self.matrix.ravel()
        k = int(np.argmax(np.abs(flat) > 1e-9))
        return self.matrix if flat[k] > 0 else -self.matrix

    def distance_to(self, other: "MobiusIsometry") -> float:
        """Matrix distance modulo sign."""
        return float(min(np.abs(self.matrix - other.matrix).max(),
                         np.abs(self.matrix + other.matrix).max()))

    def __repr__(self) -> str:
        return f"MobiusIsometry({np.array2string(self.matrix, precision=6)})"


def halfplane_matrix_from_disk(su11) -> np.ndarray:
    """Convert an SU(1,1) matrix acting on the disk to an SL(2,R) matrix on H."""
    c = np.array([[1, -1j], [1, 1j]])  # H -> D
    ci = np.linalg.inv(c)
    m = ci @ np.asarray(su11, dtype=complex) @ c
    m = m / np.sqrt(np.linalg.det(m))
    if np.abs(m.imag).max() > 1e-9:
        raise HyperbolicDomainError("disk matrix is not in SU(1,1)")
    return m.real


def translation_along_real_axis(d: float) -> MobiusIsometry:
    """Hyperbolic translation by ``d`` along the disk diameter (-1, 1)."""
    return MobiusIsometry(halfplane_matrix_from_disk(
        [[math.cosh(d / 2), math.sinh(d / 2)], [math.sinh(d / 2), math.cosh(d / 2)]]))


def rotation_about_origin(theta: float) -> MobiusIsometry:
    """Rotation by ``theta`` around the disk origin."""
    return MobiusIsometry(halfplane_matrix_from_disk(
        [[np.exp(0.5j * theta), 0], [0, np.exp(-0.5j * theta)]]))


def moving_to_origin(z: complex) -> MobiusIsometry:
    """Orientation-preserving isometry sending disk point ``z`` to 0."""
    z = complex(z)
    s = 1 / math.sqrt(1 - abs(z) ** 2)
    return MobiusIsometry(halfplane_matrix_from_disk([[s, -z * s], [-np.conj(z) * s, s]]))


def reflection_through(p: complex, q: complex) -> MobiusIsometry:
    """Reflection in the complete geodesic through disk points ``p`` and ``q``."""
    t = moving_to_origin(p)
    q0 = complex(t.act_disk(q))
    rot = rotation_about_origin(-np.angle(q0))
    frame = rot @ t  # sends the geodesic to the real diameter
    conj = MobiusIsometry(np.array([[-1.0, 0.0], [0.0, 1.0]]))  # z -> -conj(z) on H == z -> conj(z) on D
    return frame.inverse() @ conj @ frame


def isometry_matching(p1: complex, p2: complex, q1: complex, q2: complex) -> MobiusIsometry:
    """Orientation-preserving isometry sending ``p1 -> q1`` and the ray towards ``p2`` to the ray towards ``q2``.

    When ``d(p1, p2) == d(q1, q2)`` this maps ``p2`` to ``q2``.
    """
    tp = moving_to_origin(p1)
    tq = moving_to_origin(q1)
    a = np.angle(complex(tp.act_disk(p2)))
    b = np.angle(complex(tq.act_disk(q2)))
    return tq.inverse() @ rotation_about_origin(b - a) @ tp


def side_of_geodesic(p: complex, q: complex, z) -> np.ndarray:
    """Sign of ``z`` relative to the oriented geodesic ``p -> q`` (+1 = left)."""
    t = moving_to_origin(p)
    q0 = complex(t.act_disk(q))
    rot = rotation_about_origin(-np.angle(q0))
    return np.sign(np.imag((rot @ t).act_disk(z)))


# ---------------------------------------------------------------------------
# Right-angled hexagons
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RightAngledHexagon:
    """Right-angled hexagon with alternate sides ``l1/2, l2/2, l3/2``.

    Sides, in counter-clockwise order, are
    ``[cuff1, seam12, cuff2, seam23, cuff3, seam31]``; side ``k`` runs from
    ``vertices[k]`` to ``vertices[(k+1) % 6]``.  ``seam12`` joins cuff 1 to
    cuff 2 and is opposite cuff 3.
    """

    cuffs: tuple
    vertices: np.ndarray  # complex disk coordinates, counter-clockwise
    side_lengths: tuple

    SIDE_NAMES = ("c1", "s12", "c2", "s23", "c3", "s31")

    def side(self, name: str) -> tuple:
        k = self.SIDE_NAMES.index(name)
        return complex(self.vertices[k]), complex(self.vertices[(k + 1) % 6])

    def contains(self, z, tol: float = 1e-12) -> np.ndarray:
        """Membership test (Klein model, where the hexagon is a Euclidean polygon)."""
        k = disk_to_klein(np.atleast_1d(z))
        kv = disk_to_klein(self.vertices)
        inside = np.ones(k.shape, dtype=bool)
        for j in range(6):
            a, b = kv[j], kv[(j + 1) % 6]
            cross = ((b - a).conjugate() * (k - a)).imag
            inside &= cross >= -tol
        return inside

    def closure_residual(self) -> float:
        """Max deviation of the side lengths and right angles from the construction data."""
        v = self.vertices
        lengths = [float(disk_distance(v[k], v[(k + 1) % 6])) for k in range(6)]
        res = max(abs(a - b) for a, b in zip(lengths, self.side_lengths))
        for k in range(6):
            prev, here, nxt = v[k - 1], v[k], v[(k + 1) % 6]
            t = moving_to_origin(here)
            a = np.angle(complex(t.act_disk(prev)))
            b = np.angle(complex(t.act_disk(nxt)))
            ang = abs((a - b + np.pi) % (2 * np.pi) - np.pi)
            res = max(res, abs(ang - np.pi / 2))
        return res


def right_angled_hexagon(cuffs) -> RightAngledHexagon:
    """Build the right-angled hexagon of a pair of pants with the given cuff lengths.

    The hexagon is positioned so that the hyperboloid barycentre of its
    vertices sits at the disk origin.
    """
    l1, l2, l3 = (float(x) for x in cuffs)
    c1, c2, c3 = l1 / 2, l2 / 2, l3 / 2
    s12 = hexagon_seam(c3, c1, c2)
    s23 = hexagon_seam(c1, c2, c3)
    s31 = hexagon_seam(c2, c3, c1)
    sides = (c1, s12, c2, s23, c3, s31)

    frame = MobiusIsometry.identity()
    pts = []
    for length in sides:
        pts.append(complex(frame.act_disk(0.0)))
        frame = frame @ translation_along_real_axis(length) @ rotation_about_origin(np.pi / 2)
    pts = np.array(pts)

    centre = hyperboloid_to_disk(_normalize_hyperboloid(disk_to_hyperboloid(pts).sum(axis=0)))
    pts = moving_to_origin(complex(centre)).act_disk(pts)
    return RightAngledHexagon(cuffs=(l1, l2, l3), vertices=np.asarray(pts), side_lengths=sides)


def _normalize_hyperboloid(x):
    x = np.asarray(x, dtype=float)
    q = x[..., 0] ** 2 - x[..., 1] ** 2 - x[..., 2] ** 2
    return x / np.sqrt(q)[..., None]


def hyperboloid_combination(points, weights):
    """Normalized hyperboloid combination ``sum w_k P_k`` of disk points (equivariant)."""
    x = disk_to_hyperboloid(np.asarray(points))
    w = np.asarray(weights, dtype=float)
    return hyperboloid_to_disk(_normalize_hyperboloid(np.tensordot(w, x, axes=([-1], [-2]))))


def geodesic_arc_points(p: complex, q: complex, n: int) -> np.ndarray:
    """``n + 1`` points spaced uniformly in hyperbolic arclength from ``p`` to ``q``."""
    t = np.linspace(0.0, 1.0, n + 1)
    return disk_geodesic_point(p, q, t)


def translation_length_from_trace(trace: float) -> float:
    return 2.0 * safe_arccosh(abs(trace) / 2)


def axis_endpoints(g: MobiusIsometry):
    """Repelling and attracting fixed points of a hyperbolic element, in the disk."""
    vals, vecs = np.linalg.eig(g.matrix)
    order = np.argsort(np.abs(vals.real))
    # eigenvector (x, y) is the fixed point x/y of H; (x - iy)/(x + iy) is its disk image
    pts = [complex((vecs[0, k] - 1j * vecs[1, k]) / (vecs[0, k] + 1j * vecs[1, k])) for k in order]
    return pts[0], pts[1]


def axis_foot(g: MobiusIsometry, base: complex = 0j) -> complex:
    """Point of the axis of ``g`` closest to ``base``."""
    t = moving_to_origin(base)
    e1, e2 = axis_endpoints(t @ g @ t.inverse())
    e1, e2 = e1 / abs(e1), e2 / abs(e2)
    half = abs(np.angle(e2 / e1)) / 2
    bis = e1 + e2
    direction = bis / abs(bis) if abs(bis) > 1e-15 else 1j * e1
    r = (1 - math.sin(half)) / math.cos(half) if half < np.pi / 2 - 1e-15 else 0.0
    return complex(t.inverse().act_disk(r * direction))
