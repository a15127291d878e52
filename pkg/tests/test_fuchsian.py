import math

import numpy as np
import pytest

from hyperwidth.fuchsian import (
    CertificateStatus,
    SurfaceSpec,
    SurfaceStructureError,
    bolza_octagon,
    build_surface,
    certify_systole,
    collar_certificate,
    is_simple,
    length_spectrum,
)
from hyperwidth.geometry import disk_distance, moving_to_origin, rotation_about_origin
from hyperwidth.hyptrig import HyperbolicDomainError

SQRT2 = math.sqrt(2)
SYSTOLE = 2 * math.acosh(1 + SQRT2)
SECOND = 2 * math.acosh(3 + 2 * SQRT2)
L_GAMMA = 8 * math.acosh(1 + SQRT2 / 2)


@pytest.fixture(scope="module")
def bolza():
    return build_surface(SurfaceSpec.bolza())


@pytest.fixture(scope="module")
def s2():
    return build_surface(SurfaceSpec.s_ma(2, 0.5))


@pytest.fixture(scope="module")
def bolza_spectrum5(bolza):
    return length_spectrum(bolza, 5.0, keep_elements=True)


class TestSurfaceSpec:
    def test_families(self):
        s = SurfaceSpec.s_ma(3, 0.7)
        assert s.genus == 3 and s.n_pants == 4 and len(s.gluings) == 6
        assert SurfaceSpec.s_L(0.5).pants_cuffs(1) == (0.5, 0.5, 0.5)

    def test_double_gluing_rejected(self):
        with pytest.raises(SurfaceStructureError):
            SurfaceSpec("pants_glued", 2, (((0, 0), (1, 0)), ((0, 0), (1, 1)), ((0, 2), (1, 2))), (1, 1, 1))

    def test_wrong_count_rejected(self):
        with pytest.raises(SurfaceStructureError):
            SurfaceSpec("pants_glued", 2, (((0, 0), (1, 0)),), (1,))

    def test_disconnected_rejected(self):
        gl = (((0, 0), (0, 1)), ((0, 2), (1, 0)), ((1, 1), (1, 2)), ((2, 0), (2, 1)), ((2, 2), (3, 0)),
              ((3, 1), (3, 2)))
        with pytest.raises(SurfaceStructureError):
            SurfaceSpec("pants_glued", 3, gl, (1,) * 6)

    def test_degenerate_length(self):
        with pytest.raises(HyperbolicDomainError):
            SurfaceSpec.s_L(0.0)

    def test_genus_one_rejected(self):
        with pytest.raises(SurfaceStructureError):
            SurfaceSpec.s_ma(1, 0.5)


class TestBuild:
    def test_bolza_generators(self, bolza):
        assert len(bolza.generators) == 8
        for g in bolza.generators:
            assert abs(g.det - 1) < 1e-12
            assert abs(abs(g.trace) - (2 + 2 * SQRT2)) < 1e-12
            assert g.translation_length == pytest.approx(SYSTOLE, abs=1e-12)

    def test_bolza_relator(self, bolza):
        assert bolza.relator_residual() < 1e-10
        assert bolza.homology_rank == 4

    def test_octagon_angles(self):
        v = bolza_octagon()
        side = disk_distance(v[0], v[1])
        # regular n-gon with angle alpha: cosh(side/2) = cos(pi/n) / sin(alpha/2)
        assert math.cosh(side / 2) == pytest.approx(math.cos(math.pi / 8) / math.sin(math.pi / 8), rel=1e-12)

    @pytest.mark.parametrize("spec", [SurfaceSpec.s_ma(2, 0.5), SurfaceSpec.s_L(0.5), SurfaceSpec.s_ma(3, 1.0)])
    def test_cuff_holonomies(self, spec):
        model = build_surface(spec)
        assert model.homology_rank == 2 * spec.genus
        for c in model.cuffs:
            assert c.length == pytest.approx(spec.cuff_lengths[0], abs=1e-10)
            assert model.contains(c.element)

    def test_relators(self, s2):
        assert build_surface(SurfaceSpec.s_L(0.5)).relator_residual() < 1e-9
        assert s2.relator_residual(relative=True) < 1e-9


class TestSpectrum:
    def test_bolza_first_values(self, bolza_spectrum5):
        d = bolza_spectrum5.distinct_lengths()
        assert d[0] == pytest.approx(SYSTOLE, abs=1e-9)
        assert d[1] == pytest.approx(SECOND, abs=1e-9)
        assert round(d[0], 3) == 3.057 and round(d[1], 3) == 4.897
        assert not bolza_spectrum5.entries[0].separating
        assert bolza_spectrum5.complete

    def test_sorted_and_hyperbolic(self, bolza_spectrum5):
        lengths = [e.length for e in bolza_spectrum5.entries]
        assert lengths == sorted(lengths)
        assert all(abs(g.trace) > 2 for g in bolza_spectrum5.elements)
        assert all(e.multiplicity >= 1 for e in bolza_spectrum5.entries)

    def test_conjugation_invariant(self, bolza_spectrum5):
        rng = np.random.default_rng(1)
        for g in bolza_spectrum5.elements[:40]:
            z = 0.8 * math.sqrt(rng.uniform()) * np.exp(2j * math.pi * rng.uniform())
            c = rotation_about_origin(rng.uniform(0, 2 * math.pi)) @ moving_to_origin(complex(z))
            h = c @ g @ c.inverse()
            assert h.translation_length == pytest.approx(g.translation_length, abs=1e-10)

    def test_inversion_symmetric(self, bolza, bolza_spectrum5):
        lengths = {round(e.length, 9) for e in bolza_spectrum5.entries}
        for g in bolza_spectrum5.elements[:40]:
            assert round(g.inverse().translation_length, 9) in lengths

    def test_octagon_symmetry(self, bolza, bolza_spectrum5):
        r = rotation_about_origin(math.pi / 4)
        for g in bolza.generators:
            assert min((r @ g @ r.inverse()).distance_to(h) for h in bolza.generators) < 1e-10
        lengths = sorted(round(e.length, 9) for e in bolza_spectrum5.entries)
        for g in bolza_spectrum5.elements[:40]:
            h = r @ g @ r.inverse()
            assert bolza.contains(h)
            assert round(h.translation_length, 9) in lengths

    def test_cuff_lengths_appear(self, s2):
        spec = length_spectrum(s2, 1.0)
        assert spec.complete
        assert any(abs(e.length - 0.5) < 1e-9 for e in spec.entries)
        assert min(e.length for e in spec.entries) == pytest.approx(0.5, abs=1e-9)
        # one separating cuff and two nonseparating ones
        seps = {e.separating for e in spec.entries if abs(e.length - 0.5) < 1e-9}
        assert seps == {True, False}

    def test_incomplete_flagged(self, bolza):
        spec = length_spectrum(bolza, 9.1, max_word_len=4)
        assert spec.possibly_incomplete and spec.horizon < 9.1

    def test_systoles_simple(self, bolza):
        assert all(is_simple(bolza, g) for g in bolza.generators[::2])


@pytest.mark.slow
def test_bolza_separating_lgamma(bolza):
    spec = length_spectrum(bolza, 9.1, with_simplicity=True)
    seps = [e for e in spec.entries if e.separating]
    assert any(abs(e.length - L_GAMMA) < 1e-9 for e in seps)
    assert any(abs(e.length - L_GAMMA) < 1e-9 and e.simple for e in seps)


class TestCertificates:
    def test_s2_half(self, s2):
        c = certify_systole(s2, 0)
        assert c.status is CertificateStatus.CERTIFIED
        assert c.collar_crossing == pytest.approx(2 * math.asinh(1 / math.sinh(0.25)), rel=1e-12)
        assert c.collar_crossing > 0.5

    def test_s2_half_with_enumeration(self, s2):
        c = certify_systole(s2, 2, enumerate_spectrum=True)
        assert c.status is CertificateStatus.CERTIFIED
        assert c.shortest_other == pytest.approx(0.5, abs=1e-9)

    def test_thick_cuffs_not_certified(self):
        assert collar_certificate(6.0).status is not CertificateStatus.CERTIFIED
        model = build_surface(SurfaceSpec.s_ma(2, 6.0))
        c = certify_systole(model, 0, enumerate_spectrum=False)
        assert not c
        assert c.status is CertificateStatus.UNKNOWN

    def test_bolza_cuff(self, bolza):
        assert certify_systole(bolza, 0).status is CertificateStatus.CERTIFIED
