import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperwidth.geometry import disk_distance
from hyperwidth.hyptrig import figure_eight_length
from hyperwidth.sweepout import (
    FlowInstabilityError,
    FlowLog,
    SurgeryError,
    build_pants_domain,
    canonical_cyclic_word,
    composite_sweepout_S_L,
    composite_sweepout_S_ma,
    crossing_word,
    curve_through,
    figure_eight_geodesic,
    flow_to_geodesic,
    point_at,
    resample,
    run_sweepout,
    self_crossings,
    shorten,
    surgery,
)

F8_HALF = 3.634732625668904503381877  # mpmath, 50 digits


def jiggle(z, size, rng):
    """Move each point about ``size`` in hyperbolic distance."""
    w = rng.standard_normal(len(z)) + 1j * rng.standard_normal(len(z))
    return z + size * (1 - np.abs(z) ** 2) / 2 * w


@pytest.fixture(scope="module")
def pants():
    return build_pants_domain((0.5, 0.5, 0.5))


@pytest.fixture(scope="module")
def fig8(pants):
    return figure_eight_geodesic(pants)


@pytest.fixture(scope="module")
def trace(pants):
    return run_sweepout(pants)


class TestDomain:
    @pytest.mark.parametrize("cuffs", [(0.5, 0.5, 0.5), (1.0, 1.5, 2.0), (0.3, 0.3, 2.5)])
    def test_holonomies(self, cuffs):
        d = build_pants_domain(cuffs)
        assert np.allclose(d.boundary_lengths(), cuffs, atol=1e-10)
        assert d.side_relation_residual() < 1e-10
        assert d.figure_eight_element.translation_length == pytest.approx(figure_eight_length(cuffs), rel=1e-10)


class TestCurves:
    def test_point_at_periodic(self, pants):
        c = curve_through(pants.figure_eight_element, pants.base_point)
        L = c.length
        for s in (0.0, 0.3, 1.7):
            a = point_at(c, s + L)
            b = complex(c.holonomy.act_disk(point_at(c, s)))
            assert abs(a - b) < 1e-12

    def test_resample_never_lengthens(self, pants):
        rng = np.random.default_rng(0)
        c = curve_through(pants.figure_eight_element, pants.base_point)
        c.points = jiggle(c.points, 0.01, rng)
        assert resample(c).length <= c.length + 1e-12
        assert resample(c).spacing_ok()

    def test_canonical_word(self):
        assert canonical_cyclic_word("yXx") == canonical_cyclic_word("xyX")
        assert canonical_cyclic_word("") == ""


class TestFlow:
    def test_monotone(self, pants):
        c = curve_through(pants.figure_eight_element, pants.base_point)
        log = FlowLog()
        shorten(c, steps=2000, log_to=log)
        assert np.all(np.diff(log.lengths) <= 1e-12 * max(log.lengths))
        assert log.lengths[-1] < c.length

    @settings(max_examples=10, deadline=None)
    @given(st.floats(0.05, 1.0), st.integers(0, 2 ** 16))
    def test_monotone_perturbed(self, dt, seed):
        d = build_pants_domain((0.5, 0.5, 0.5))
        c = curve_through(d.holonomies[0] @ d.holonomies[1] @ d.holonomies[1], d.base_point)
        rng = np.random.default_rng(seed)
        c.points = jiggle(c.points, 0.05, rng)
        log = FlowLog()
        shorten(c, steps=200, dt=dt, log_to=log)
        assert np.all(np.diff(log.lengths) <= 1e-12 * max(log.lengths))

    def test_bad_step(self, pants):
        c = curve_through(pants.figure_eight_element, pants.base_point)
        with pytest.raises(FlowInstabilityError):
            shorten(c, dt=1.5)

    def test_geodesic_is_fixed(self, fig8):
        moved = shorten(fig8, steps=1000)
        drift = float(disk_distance(moved.points, fig8.points).max())
        assert drift < 1e-6
        assert abs(moved.length - fig8.length) < 1e-6

    def test_word_invariant(self, pants):
        c = curve_through(pants.figure_eight_element, pants.base_point)
        before = canonical_cyclic_word(crossing_word(c, pants))
        after = shorten(c, steps=10_000, resample_every=500)
        assert canonical_cyclic_word(crossing_word(after, pants)) == before
        assert after.holonomy is c.holonomy

    @pytest.mark.parametrize("cuffs", [(0.5, 0.5, 0.5), (1.0, 1.5, 2.0)])
    def test_figure_eight_limit(self, cuffs):
        d = build_pants_domain(cuffs)
        c = figure_eight_geodesic(d)
        assert len(self_crossings(c, d)) == 1
        # second-order discretization at spacing 0.05
        assert c.length == pytest.approx(figure_eight_length(cuffs), rel=1e-3)

    def test_cuff_limit(self, pants):
        c = flow_to_geodesic(curve_through(pants.holonomies[0], pants.base_point))
        assert c.length == pytest.approx(0.5, rel=1e-3)
        assert not self_crossings(c, pants)


class TestSurgery:
    def test_split(self, pants, fig8):
        loops = surgery(fig8, "split", 0.05, pants)
        assert len(loops) == 2
        assert sum(c.length for c in loops) < fig8.length
        flowed = [flow_to_geodesic(c) for c in loops]
        assert sorted(c.length for c in flowed) == pytest.approx([0.5, 0.5], rel=5e-3)

    def test_merge(self, pants, fig8):
        (loop,) = surgery(fig8, "merge", 0.05, pants)
        assert loop.length < fig8.length
        assert not self_crossings(loop, pants)
        assert flow_to_geodesic(loop).length == pytest.approx(0.5, rel=5e-3)

    def test_radius_too_large(self, pants, fig8):
        with pytest.raises(SurgeryError):
            surgery(fig8, "split", 5.0, pants)

    def test_needs_one_crossing(self, pants):
        c = flow_to_geodesic(curve_through(pants.holonomies[0], pants.base_point))
        with pytest.raises(SurgeryError):
            surgery(c, "merge", 0.01, pants)

    def test_bad_direction(self, pants, fig8):
        with pytest.raises(ValueError):
            surgery(fig8, "sideways", 0.05, pants)


class TestSweepout:
    def test_maximum_at_figure_eight(self, trace):
        s = trace.samples[trace.max_index]
        assert s.t == 0.0
        assert trace.max_length == pytest.approx(F8_HALF, rel=0.01)

    def test_ends(self, trace):
        first, last = trace.samples[0], trace.samples[-1]
        assert first.t == -1.0 and last.t == 1.0
        assert first.n_components == 2 and last.n_components == 1
        assert first.length == pytest.approx(1.0, rel=5e-3)
        assert last.length == pytest.approx(0.5, rel=5e-3)

    def test_embedded_away_from_zero(self, trace):
        assert all(s.embedded for s in trace.samples if s.t != 0.0)

    def test_lengths_fall_away_from_zero(self, trace):
        t = np.array([s.t for s in trace.samples])
        L = trace.lengths
        right, left = L[t > 0], L[t < 0][::-1]
        assert np.all(np.diff(right) <= 1e-9) and np.all(np.diff(left) <= 1e-9)

    def test_csv(self, trace, tmp_path):
        p = tmp_path / "trace.csv"
        trace.to_csv(p)
        rows = p.read_text().splitlines()
        assert rows[0] == "t,length,components" and len(rows) == len(trace.samples) + 1

    def test_composite_S_ma(self, trace):
        comp = composite_sweepout_S_ma(0.5, 3, trace=trace)
        assert comp.max_mass == pytest.approx(trace.max_length, rel=1e-12)
        assert comp.samples[0].mass == 0.0 and comp.samples[-1].mass == 0.0
        t = [s.t for s in comp.samples]
        assert t[0] == pytest.approx(-1) and t[-1] == pytest.approx(1)

    def test_composite_S_L(self, trace):
        comp = composite_sweepout_S_L(0.5, trace=trace)
        assert comp.max_mass == pytest.approx(F8_HALF + 0.5, rel=0.01)
        assert comp.samples[0].mass == 0.0 and comp.samples[-1].mass == 0.0
        assert math.isclose(comp.max_mass, trace.max_length + 0.5, rel_tol=1e-12)
