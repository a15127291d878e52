"""First min-max widths of the hyperbolic surface families.

Each evaluator returns a :class:`WidthResult`: either an exact value with its
decomposition into a figure-eight geodesic plus simple closed geodesics, or
a bracket ``[lo, hi]`` when the hypotheses behind the exact formula could
not be certified numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .fuchsian import (
    CertificateStatus,
    SurfaceSpec,
    build_surface,
    certify_systole,
    collar_certificate,
    length_spectrum,
)
from .hyptrig import (
    bolza_second_length,
    bolza_systole,
    figure_eight_length,
    parlier_interior_bound,
    trirectangle_opposite_side,
    width_lower_bound,
)

FIGURE_EIGHT = "figure-eight"
SIMPLE = "simple"

#: Spectrum cutoff for the Bolza search; just above the octagon curve of length 9.027.
BOLZA_CUTOFF = 9.1


class HypothesisNotCertified(RuntimeError):
    """The systole hypothesis of an exact width formula failed or stayed undecided."""

    def __init__(self, message: str, certificate=None):
        super().__init__(message)
        self.certificate = certificate


@dataclass
class WidthResult:
    """Width of a surface, exact or bracketed, with its geodesic decomposition."""

    surface: str
    genus: int
    lo: float
    hi: float
    decomposition: list = field(default_factory=list)  # (role, length) pairs
    certificate: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    @property
    def exact(self) -> bool:
        return self.lo == self.hi

    @property
    def value(self) -> float | None:
        return self.hi if self.exact else None

    @property
    def bracket(self) -> tuple:
        return (self.lo, self.hi)

    @property
    def n_simple(self) -> int:
        return sum(1 for role, _ in self.decomposition if role == SIMPLE)

    def decomposition_total(self) -> float:
        return math.fsum(length for _, length in self.decomposition)

    def check(self) -> None:
        """Assert the structural invariants of a width result."""
        if self.lo > self.hi:
            raise ValueError(f"inconsistent bracket [{self.lo}, {self.hi}]")
        roles = [role for role, _ in self.decomposition]
        if self.decomposition and roles.count(FIGURE_EIGHT) != 1:
            raise ValueError("a decomposition has exactly one figure-eight component")
        if self.exact and self.decomposition and not math.isclose(
                self.decomposition_total(), self.hi, rel_tol=1e-12):
            raise ValueError("decomposition lengths do not add up to the width")
        if self.lo <= width_lower_bound(-1.0):
            raise ValueError("width must exceed 2 arccosh 3")

    def to_record(self) -> dict:
        return {
            "surface": self.surface,
            "genus": self.genus,
            "exact": self.exact,
            "value": self.value,
            "bracket": [self.lo, self.hi],
            "decomposition": [{"role": r, "length": x} for r, x in self.decomposition],
            "certificate": list(self.certificate),
            **self.extras,
        }


def _require(cert, what: str):
    if cert.status is not CertificateStatus.CERTIFIED:
        raise HypothesisNotCertified(f"{what}: {'; '.join(cert.notes)}", cert)
    return cert


def _cuff_certificate(length: float, spec: SurfaceSpec | None, enumerate_spectrum: bool):
    """Collar certificate, optionally backed by a spectrum search on the built surface."""
    cert = collar_certificate(length)
    if cert.status is CertificateStatus.CERTIFIED and not enumerate_spectrum:
        return cert
    return certify_systole(build_surface(spec), 0, enumerate_spectrum=True)


def width_S_ma(a: float, m: int, enumerate_spectrum: bool = False) -> WidthResult:
    """Width of the genus-``m`` surface glued from pants with all cuffs ``a``.

    Exact value: the figure eight of one pair of pants, provided the cuffs are
    systoles.  That hypothesis is certified by the collar inequality and, when
    ``enumerate_spectrum`` is set or the collar test is inconclusive, by a
    length-spectrum search on the built surface.
    """
    if m < 2:
        raise ValueError("genus must be at least 2")
    cert = _require(_cuff_certificate(a, SurfaceSpec.s_ma(m, a), enumerate_spectrum),
                    f"cuffs of length {a} are not certified systoles")
    value = figure_eight_length((a, a, a))
    return WidthResult(f"S_ma(m={m}, a={a:g})", m, value, value, [(FIGURE_EIGHT, value)], cert.notes)


def width_S_L(L: float, enumerate_spectrum: bool = False) -> WidthResult:
    """Width of the genus-2 surface of two isometric pants glued cuff to cuff, all cuffs ``L``.

    Exact value: the pants figure eight plus one cuff.
    """
    cert = _require(_cuff_certificate(L, SurfaceSpec.s_L(L), enumerate_spectrum),
                    f"cuffs of length {L} are not certified systoles")
    fig8 = figure_eight_length((L, L, L))
    value = fig8 + L
    return WidthResult(f"S_L(L={L:g})", 2, value, value, [(FIGURE_EIGHT, fig8), (SIMPLE, L)], cert.notes)


def bolza_closed_form_bounds() -> dict:
    """Closed-form quantities of the Bolza width argument."""
    sys_ = bolza_systole()
    l_gamma = trirectangle_opposite_side()
    l_beta = figure_eight_length((sys_, sys_, sys_))
    hi_bound = 2 * math.acosh(math.cosh(l_gamma / 2) + 2 * math.cosh(sys_ / 2) ** 2)
    return {
        "systole": sys_,
        "second_length": bolza_second_length(),
        "L_gamma": l_gamma,
        "parlier_bound": parlier_interior_bound(l_gamma),
        "L_beta": l_beta,
        "hi_bound": hi_bound,
        "sys_plus_L_beta": sys_ + l_beta,
    }


def width_bolza(max_word_len: int | None = None, spectrum=None) -> WidthResult:
    """Width of the Bolza surface.

    The width is the figure eight of a pair of pants bounded by two systoles
    and the shortest separating simple closed geodesic ``alpha``; it is at
    most the closed-form bound built from the octagon curve of length
    ``8 arccosh(1 + sqrt 2 / 2)``.  The length of ``alpha`` comes from a
    length-spectrum search.  When that search is complete past ``alpha`` the
    result is exact; otherwise it is a bracket and the certificate says why.
    """
    cf = bolza_closed_form_bounds()
    sys_ = cf["systole"]
    notes = []
    if not cf["sys_plus_L_beta"] > cf["hi_bound"]:
        raise ArithmeticError("closed-form bound does not exclude simple components")
    notes.append(f"sys + L_beta = {cf['sys_plus_L_beta']:.6f} > {cf['hi_bound']:.6f}: no simple components")
    if cf["parlier_bound"] >= cf["second_length"]:
        raise ArithmeticError("interior-geodesic bound does not force systoles")
    notes.append(f"interior geodesic bound {cf['parlier_bound']:.6f} < {cf['second_length']:.6f}: "
                 "both one-holed tori contain systoles")

    if spectrum is None:
        spectrum = length_spectrum(build_surface(SurfaceSpec.bolza()), BOLZA_CUTOFF,
                                   max_word_len, with_simplicity=True)
    if abs(spectrum.entries[0].length - sys_) > 1e-9:
        raise ArithmeticError("enumerated systole disagrees with the closed form")
    separating = [e for e in spectrum.entries if e.separating and e.simple]
    alpha = min((e.length for e in separating), default=None)
    horizon = spectrum.horizon
    extras = {"closed_form": cf, "bound_bracket": [width_lower_bound(-1.0), cf["hi_bound"]],
              "spectrum_horizon": horizon, "L_alpha": alpha}

    # every simple separating curve is at least min(alpha, horizon), and at most L_gamma
    alpha_lo = min(alpha if alpha is not None else math.inf, horizon, cf["L_gamma"])
    lo = width_lower_bound(-1.0) + 1e-12
    if alpha_lo > 0:
        lo = max(figure_eight_length((sys_, sys_, alpha_lo)), lo)
    if alpha is None:
        notes.append("uncertified L_alpha: no separating simple geodesic found below the cutoff")
        hi = cf["hi_bound"]
        return WidthResult("bolza", 2, lo, hi, [], notes, extras)
    hi = figure_eight_length((sys_, sys_, alpha))
    if alpha > horizon:
        notes.append(f"uncertified L_alpha: enumeration complete only below {horizon:.6f}")
        return WidthResult("bolza", 2, lo, hi, [(FIGURE_EIGHT, hi)], notes, extras)
    notes.append(f"shortest separating simple geodesic {alpha:.12f} (complete below {horizon:.6f})")
    # the figure eight itself must be a closed geodesic that separates mod 2
    witness = [e for e in spectrum.entries
               if e.separating_mod2 and not e.simple and abs(e.length - hi) < 1e-8]
    if witness:
        notes.append(f"figure eight {witness[0].word} of length {witness[0].length:.12f} found in the spectrum")
    else:
        notes.append("figure eight not found in the spectrum")
        return WidthResult("bolza", 2, lo, hi, [(FIGURE_EIGHT, hi)], notes, extras)
    shorter = [e for e in spectrum.entries
               if e.separating_mod2 and not e.simple and e.length < hi - 1e-8]
    if shorter:
        notes.append(f"shorter non-simple mod-2 separating geodesic at {shorter[0].length:.6f}")
    return WidthResult("bolza", 2, hi, hi, [(FIGURE_EIGHT, hi)], notes, extras)


def decomposition_count_check(result: WidthResult, genus: int) -> bool:
    """True when the number of simple components is at most ``3 genus - 3``."""
    return result.n_simple <= 3 * genus - 3
