import math

import pytest

from hyperwidth.fuchsian import CertificateStatus
from hyperwidth.hyptrig import figure_eight_length, width_lower_bound
from hyperwidth.widths import (
    FIGURE_EIGHT,
    HypothesisNotCertified,
    WidthResult,
    bolza_closed_form_bounds,
    decomposition_count_check,
    width_bolza,
    width_S_L,
    width_S_ma,
)

# 50-digit mpmath evaluations, frozen
F8_HALF = 3.634732625668904503381877
S_L_HALF = 4.134732625668904503381877
HI_BOUND = 9.482194149271678881281349
L_BETA = 6.672005769911159451311056
SYS_PLUS_L_BETA = 9.729147608873155773855968
BOLZA_WIDTH = 8.436849640523808839092588
L_GAMMA = 9.027071719730408706238619
PARLIER = 3.425323051312845707174792
TWO_ACOSH_3 = 3.525494348078172100930437


class TestSma:
    def test_value(self):
        r = width_S_ma(0.5, 2)
        assert r.exact and r.value == pytest.approx(F8_HALF, rel=1e-14)
        assert r.decomposition_total() == pytest.approx(r.value, rel=1e-12)
        r.check()

    @pytest.mark.parametrize("m", [2, 3, 5, 10])
    def test_genus_independent(self, m):
        assert width_S_ma(0.5, m).value == width_S_ma(0.5, 2).value

    def test_thin_limit(self):
        assert width_S_ma(1e-6, 3).value == pytest.approx(TWO_ACOSH_3, abs=1e-5)
        assert width_S_ma(1e-6, 3).value > TWO_ACOSH_3

    def test_with_enumeration(self):
        r = width_S_ma(0.5, 2, enumerate_spectrum=True)
        assert r.value == pytest.approx(F8_HALF, rel=1e-14)

    def test_thick_cuffs_rejected(self):
        with pytest.raises(HypothesisNotCertified) as exc:
            width_S_ma(6.0, 2)
        assert exc.value.certificate.status is not CertificateStatus.CERTIFIED

    def test_genus_one(self):
        with pytest.raises(ValueError):
            width_S_ma(0.5, 1)


class TestSL:
    def test_value(self):
        r = width_S_L(0.5)
        assert r.value == pytest.approx(S_L_HALF, rel=1e-14)
        assert [role for role, _ in r.decomposition].count(FIGURE_EIGHT) == 1
        assert r.n_simple == 1
        assert decomposition_count_check(r, 2)
        r.check()

    @pytest.mark.parametrize("L", [0.1, 0.5, 1.0, 1.5])
    def test_matches_formula(self, L):
        assert width_S_L(L).value == pytest.approx(figure_eight_length((L, L, L)) + L, rel=1e-14)

    def test_exceeds_s_ma(self):
        assert width_S_L(0.5).value > width_S_ma(0.5, 2).value


def test_bolza_closed_form():
    cf = bolza_closed_form_bounds()
    assert cf["hi_bound"] == pytest.approx(HI_BOUND, rel=1e-14)
    assert cf["L_beta"] == pytest.approx(L_BETA, rel=1e-14)
    assert cf["sys_plus_L_beta"] == pytest.approx(SYS_PLUS_L_BETA, rel=1e-14)
    assert cf["L_gamma"] == pytest.approx(L_GAMMA, rel=1e-14)
    assert cf["parlier_bound"] == pytest.approx(PARLIER, rel=1e-14)
    assert round(cf["hi_bound"], 3) == 9.482
    assert cf["sys_plus_L_beta"] > cf["hi_bound"]
    assert cf["parlier_bound"] < cf["second_length"]


@pytest.fixture(scope="module")
def result():
    return width_bolza()


@pytest.mark.slow
class TestBolza:
    def test_bracket(self, result):
        lo, hi = result.extras["bound_bracket"]
        assert lo == pytest.approx(TWO_ACOSH_3, rel=1e-14)
        assert hi == pytest.approx(HI_BOUND, rel=1e-14)
        assert lo < result.lo <= result.hi <= hi

    def test_exact_value(self, result):
        assert result.exact
        assert result.value == pytest.approx(BOLZA_WIDTH, abs=1e-9)
        assert result.extras["L_alpha"] < L_GAMMA
        result.check()

    def test_record(self, result):
        rec = result.to_record()
        assert rec["exact"] and rec["bracket"] == [result.lo, result.hi]
        assert rec["decomposition"][0]["role"] == FIGURE_EIGHT

    def test_short_search_brackets(self):
        r = width_bolza(max_word_len=3)
        assert r.lo <= BOLZA_WIDTH <= r.hi
        assert not r.exact or r.value == pytest.approx(BOLZA_WIDTH, abs=1e-9)


class TestWidthResult:
    def test_inverted_bracket(self):
        with pytest.raises(ValueError):
            WidthResult("x", 2, 5.0, 4.0).check()

    def test_two_figure_eights(self):
        with pytest.raises(ValueError):
            WidthResult("x", 2, 8.0, 8.0, [(FIGURE_EIGHT, 4.0), (FIGURE_EIGHT, 4.0)]).check()

    def test_below_bound(self):
        with pytest.raises(ValueError):
            WidthResult("x", 2, 3.0, 3.0).check()

    def test_decomposition_sum(self):
        with pytest.raises(ValueError):
            WidthResult("x", 2, 8.0, 8.0, [(FIGURE_EIGHT, 4.0)]).check()

    def test_count(self):
        r = WidthResult("x", 2, 8.0, 8.0, [(FIGURE_EIGHT, 4.0)] + [("simple", 1.0)] * 4)
        assert not decomposition_count_check(r, 2)
        assert width_lower_bound(-1.0) < r.lo
        assert math.isclose(r.decomposition_total(), 8.0)
