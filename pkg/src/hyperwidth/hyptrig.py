"""Closed-form hyperbolic trigonometry used by the width computations.

All lengths are in units where the curvature is -1.  Every function is a
pure function of float inputs.
"""

from __future__ import annotations

import math
from typing import NamedTuple

#: Tolerance below 1 within which an arccosh argument is treated as roundoff.
ARCCOSH_CLAMP = 1e-12


class HyperbolicDomainError(ValueError):
    """Raised when a length or curvature lies outside a formula's domain."""


class CuffLengths(NamedTuple):
    """Boundary lengths of a pair of pants.

    ``l3`` is the cuff the figure-eight geodesic separates from the other
    two; the figure eight winds once around ``l1`` and once around ``l2``.
    """

    l1: float
    l2: float
    l3: float

    def validated(self) -> "CuffLengths":
        for name, value in zip(self._fields, self):
            _check_positive(value, name)
        return CuffLengths(*(float(v) for v in self))


def _check_positive(value: float, name: str = "length") -> float:
    if not math.isfinite(value) or value <= 0.0:
        raise HyperbolicDomainError(f"{name} must be positive and finite, got {value!r}")
    return float(value)


def safe_arccosh(x: float) -> float:
    """arccosh that forgives roundoff just below 1.

    Arguments in ``[1 - 1e-12, 1)`` are clamped to 1; anything smaller is a
    caller bug and raises :class:`HyperbolicDomainError`.
    """
    if not math.isfinite(x):
        raise HyperbolicDomainError(f"arccosh of non-finite value {x!r}")
    if x < 1.0:
        if x < 1.0 - ARCCOSH_CLAMP:
            raise HyperbolicDomainError(f"arccosh argument {x!r} is below 1")
        return 0.0
    return math.acosh(x)


def figure_eight_length(cuffs) -> float:
    """Length of the figure-eight geodesic in a pair of pants.

    The figure eight winds around cuffs ``l1`` and ``l2`` and is separated
    by them from ``l3``::

        2 arccosh(cosh(l3/2) + 2 cosh(l1/2) cosh(l2/2))
    """
    l1, l2, l3 = CuffLengths(*cuffs).validated()
    return 2.0 * safe_arccosh(math.cosh(l3 / 2) + 2.0 * math.cosh(l1 / 2) * math.cosh(l2 / 2))


def min_figure_eight_length(cuffs) -> float:
    """Shortest of the three figure eights, one per choice of separated cuff."""
    l1, l2, l3 = CuffLengths(*cuffs).validated()
    return min(
        figure_eight_length((l1, l2, l3)),
        figure_eight_length((l2, l3, l1)),
        figure_eight_length((l3, l1, l2)),
    )


def width_lower_bound(k_inf: float) -> float:
    """Lower bound ``2 (-k_inf)^(-1/2) arccosh 3`` for curvature ``K >= k_inf``."""
    if not math.isfinite(k_inf) or k_inf >= 0.0:
        raise HyperbolicDomainError(f"curvature bound must be negative, got {k_inf!r}")
    return 2.0 * math.acosh(3.0) / math.sqrt(-k_inf)


def collar_halfwidth(length: float) -> float:
    """Half-width ``arcsinh(1/sinh(l/2))`` of the standard collar of a simple geodesic."""
    length = _check_positive(length)
    return math.asinh(1.0 / math.sinh(length / 2))


def trirectangle_opposite_side() -> float:
    """Length of the separating geodesic built from four octagon arcs (Bolza surface).

    The regular octagon with vertex angles pi/4 is cut by the arc joining two
    sides separated by one edge; bisecting the resulting quadrilateral gives a
    trirectangle with acute angle pi/4, whose trigonometry yields
    ``8 arccosh(1 + sqrt(2)/2)``.
    """
    return 8.0 * math.acosh(1.0 + math.sqrt(2.0) / 2.0)


def parlier_interior_bound(l_boundary: float) -> float:
    """Upper bound ``2 arccosh(cosh(l/6) + 1/2)`` for an interior geodesic of a one-holed torus."""
    l_boundary = _check_positive(l_boundary, "boundary length")
    return 2.0 * math.acosh(math.cosh(l_boundary / 6) + 0.5)


def bolza_systole() -> float:
    """``2 arccosh(1 + sqrt 2)``."""
    return 2.0 * math.acosh(1.0 + math.sqrt(2.0))


def bolza_second_length() -> float:
    """``2 arccosh(3 + 2 sqrt 2)``, the next value of the Bolza length spectrum."""
    return 2.0 * math.acosh(3.0 + 2.0 * math.sqrt(2.0))


def hexagon_seam(c_opposite: float, c_left: float, c_right: float) -> float:
    """Length of the side of a right-angled hexagon opposite the side ``c_opposite``.

    The three arguments are the lengths of alternate sides; the result is the
    side sitting between ``c_left`` and ``c_right``.
    """
    for v in (c_opposite, c_left, c_right):
        _check_positive(v, "hexagon side")
    num = math.cosh(c_opposite) + math.cosh(c_left) * math.cosh(c_right)
    return math.acosh(num / (math.sinh(c_left) * math.sinh(c_right)))
