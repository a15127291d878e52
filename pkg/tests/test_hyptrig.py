import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperwidth.hyptrig import (
    CuffLengths,
    HyperbolicDomainError,
    bolza_second_length,
    bolza_systole,
    collar_halfwidth,
    figure_eight_length,
    hexagon_seam,
    min_figure_eight_length,
    parlier_interior_bound,
    safe_arccosh,
    trirectangle_opposite_side,
    width_lower_bound,
)

# 50-digit mpmath evaluations, frozen
TWO_ACOSH_3 = 3.525494348078172100930437
F8_HALF = 3.634732625668904503381877
F8_1_15_2 = 4.35231015916466031998884
F8_2 = 5.056371081290106513153402
COLLAR_SYSTOLE = 0.4406867935097715126163047
L_GAMMA = 9.027071719730408706238619
PARLIER_L_GAMMA = 3.425323051312845707174792
SYSTOLE = 3.057141838961996322544912
SECOND = 4.89690489535615158001062
TWO_ACOSH_1_5 = 1.924847300238413789991036
SEAM_QUARTER = 4.184375285294267687928181
COLLAR_THRESHOLD = 1.7627471740390860504652186  # root of 2 asinh(1/sinh(a/2)) = a

cuff = st.floats(0.01, 10.0)


def mp_f8(l1, l2, l3):
    with mpmath.workdps(50):
        l1, l2, l3 = (mpmath.mpf(x) for x in (l1, l2, l3))
        return 2 * mpmath.acosh(mpmath.cosh(l3 / 2) + 2 * mpmath.cosh(l1 / 2) * mpmath.cosh(l2 / 2))


class TestFigureEight:
    def test_systole_cuffs(self):
        s = bolza_systole()
        v = figure_eight_length((s, s, s))
        assert abs(math.cosh(v / 2) - (7 + 5 * math.sqrt(2))) < 1e-12 * (7 + 5 * math.sqrt(2)) * 10

    @pytest.mark.parametrize("cuffs, expected", [
        ((0.5, 0.5, 0.5), F8_HALF),
        ((1.0, 1.5, 2.0), F8_1_15_2),
        ((2.0, 2.0, 2.0), F8_2),
    ])
    def test_oracle_values(self, cuffs, expected):
        assert figure_eight_length(cuffs) == pytest.approx(expected, rel=1e-14)

    def test_thin_limit(self):
        assert abs(figure_eight_length((1e-8,) * 3) - TWO_ACOSH_3) < 1e-6

    @pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
    def test_symmetric_reduction(self, a):
        alt = 2 * math.acosh(math.cosh(a / 2) + 2 * math.cosh(a / 2) ** 2)
        assert figure_eight_length((a, a, a)) == pytest.approx(alt, rel=1e-13)

    @pytest.mark.parametrize("bad", [(0.0, 1, 1), (-1, 1, 1), (1, math.inf, 1), (1, 1, math.nan)])
    def test_domain(self, bad):
        with pytest.raises(HyperbolicDomainError):
            figure_eight_length(bad)

    @settings(max_examples=200, deadline=None)
    @given(cuff, cuff, cuff)
    def test_matches_high_precision(self, a, b, c):
        assert figure_eight_length((a, b, c)) == pytest.approx(float(mp_f8(a, b, c)), rel=1e-13)

    @settings(max_examples=200, deadline=None)
    @given(cuff, cuff, cuff)
    def test_symmetric_in_first_two(self, a, b, c):
        assert figure_eight_length((a, b, c)) == figure_eight_length((b, a, c))

    @settings(max_examples=200, deadline=None)
    @given(cuff, cuff, cuff, st.integers(0, 2))
    def test_increasing_in_each_cuff(self, a, b, c, k):
        x = [a, b, c]
        base = figure_eight_length(x)
        x[k] *= 1.01
        assert figure_eight_length(x) > base

    def test_min_over_choices(self):
        c = (1.0, 1.5, 2.0)
        assert min_figure_eight_length(c) == F8_1_15_2 or min_figure_eight_length(c) == pytest.approx(
            min(figure_eight_length(c), figure_eight_length((1.5, 2.0, 1.0)), figure_eight_length((2.0, 1.0, 1.5))))
        assert min_figure_eight_length(c) <= figure_eight_length(c)


def test_strict_bound_random_triples():
    rng = np.random.default_rng(20240611)
    triples = rng.uniform(0.01, 10.0, size=(10_000, 3))
    bound = width_lower_bound(-1.0)
    assert all(figure_eight_length(t) > bound for t in triples)


class TestWidthLowerBound:
    def test_value(self):
        assert width_lower_bound(-1.0) == pytest.approx(TWO_ACOSH_3, rel=1e-15)

    def test_scaling(self):
        assert width_lower_bound(-4.0) == pytest.approx(width_lower_bound(-1.0) / 2, rel=1e-15)

    def test_below_figure_eight(self):
        assert width_lower_bound(-1.0) < figure_eight_length((0.3, 0.7, 1.1))

    @pytest.mark.parametrize("k", [0.0, 1.0, math.nan])
    def test_domain(self, k):
        with pytest.raises(HyperbolicDomainError):
            width_lower_bound(k)


class TestCollar:
    def test_systole_value(self):
        assert collar_halfwidth(bolza_systole()) == pytest.approx(COLLAR_SYSTOLE, rel=1e-14)

    def test_decreasing_to_zero(self):
        w = [collar_halfwidth(x) for x in (10, 20, 40)]
        assert w[0] > w[1] > w[2] > 0
        assert w[2] < 1e-8
        assert collar_halfwidth(1) > collar_halfwidth(2)

    def test_certificate_threshold(self):
        # 2 w(a) = a exactly where sinh(a/2) = 1
        threshold = 2 * math.asinh(1.0)
        lo, hi = 0.1, 10.0
        for _ in range(200):
            mid = (lo + hi) / 2
            lo, hi = (mid, hi) if 2 * collar_halfwidth(mid) > mid else (lo, mid)
        assert lo == pytest.approx(COLLAR_THRESHOLD, abs=1e-12)
        assert threshold == pytest.approx(COLLAR_THRESHOLD, abs=1e-14)
        grid = np.linspace(0.01, threshold, 200)[:-1]
        assert all(2 * collar_halfwidth(a) > a for a in grid)
        # the Bolza systole lies past the threshold: the collar alone cannot certify it
        assert 2 * collar_halfwidth(bolza_systole()) < bolza_systole()

    def test_domain(self):
        with pytest.raises(HyperbolicDomainError):
            collar_halfwidth(0.0)


class TestBolzaConstants:
    def test_trirectangle(self):
        L = trirectangle_opposite_side()
        assert L == pytest.approx(L_GAMMA, rel=1e-14)
        assert round(L, 3) == 9.027
        assert abs(math.cosh(L / 8) - (1 + math.sqrt(2) / 2)) < 1e-13

    def test_parlier(self):
        assert parlier_interior_bound(L_GAMMA) == pytest.approx(PARLIER_L_GAMMA, rel=1e-14)
        assert round(parlier_interior_bound(L_GAMMA), 3) == 3.425

    def test_parlier_limit_and_monotone(self):
        assert parlier_interior_bound(1e-8) == pytest.approx(TWO_ACOSH_1_5, abs=1e-12)
        v = [parlier_interior_bound(x) for x in np.linspace(0.1, 20, 100)]
        assert np.all(np.diff(v) > 0)
        with pytest.raises(HyperbolicDomainError):
            parlier_interior_bound(-1.0)

    def test_spectrum_values(self):
        assert bolza_systole() == pytest.approx(SYSTOLE, rel=1e-15)
        assert bolza_second_length() == pytest.approx(SECOND, rel=1e-15)


def test_hexagon_seam():
    assert hexagon_seam(0.25, 0.25, 0.25) == pytest.approx(SEAM_QUARTER, rel=1e-13)


def test_safe_arccosh():
    assert safe_arccosh(1 - 1e-13) == 0.0
    assert safe_arccosh(2.0) == math.acosh(2.0)
    with pytest.raises(HyperbolicDomainError):
        safe_arccosh(1 - 1e-9)
    with pytest.raises(HyperbolicDomainError):
        safe_arccosh(math.nan)


def test_cuff_lengths_validated():
    assert CuffLengths(1, 2, 3).validated() == (1.0, 2.0, 3.0)
    with pytest.raises(HyperbolicDomainError):
        CuffLengths(1, 0, 3).validated()
