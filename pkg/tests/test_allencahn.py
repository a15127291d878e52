import math

import numpy as np
import pytest

from hyperwidth.allencahn import (
    QUARTIC,
    AllenCahn,
    ConvergenceError,
    DoubleWell,
    MeshError,
    PhaseField,
    ProfileError,
    TriangulatedSurface,
    arrival_function,
    band_components,
    build_mesh,
    default_stages,
    energy,
    heteroclinic,
    initial_path,
    interface_mass,
    mountain_pass,
    solve_critical,
    zero_level_set,
)
from hyperwidth.fuchsian import SurfaceSpec
from hyperwidth.hyptrig import HyperbolicDomainError

H0 = 0.9428090415820633658677925  # mpmath quad of sqrt(2 W), 50 digits
F8_HALF = 3.634732625668904503381877
EPS = 0.15


@pytest.fixture(scope="module")
def mesh():
    return build_mesh(SurfaceSpec.s_ma(2, 0.5), 4000)


@pytest.fixture(scope="module")
def ac(mesh):
    return AllenCahn(mesh, EPS)


@pytest.fixture(scope="module")
def collar(mesh, ac):
    v = -np.ones(mesh.n_vertices)
    v[mesh.pants_vertex_ids(0)] = 1
    return solve_critical(PhaseField(ac.descend(v, 1.0, 20000, 1e-9), EPS), mesh)


class TestPotential:
    def test_quartic(self):
        QUARTIC.validate()
        assert QUARTIC.heteroclinic_energy() == pytest.approx(H0, rel=1e-12)
        assert QUARTIC.d2W(1.0) == 2.0

    @pytest.mark.parametrize("W, dW, d2W", [
        # not even
        (lambda u: (1 - u ** 2) ** 2 / 4 + 0.1 * u, lambda u: u ** 3 - u + 0.1, lambda u: 3 * u ** 2 - 1),
        # negative, wells not at zero
        (lambda u: (1 - u ** 2) ** 2 / 4 - 0.01, lambda u: u ** 3 - u, lambda u: 3 * u ** 2 - 1),
        # degenerate wells
        (lambda u: (1 - u ** 2) ** 4, lambda u: -8 * u * (1 - u ** 2) ** 3,
         lambda u: -8 * (1 - u ** 2) ** 3 + 48 * u ** 2 * (1 - u ** 2) ** 2),
    ])
    def test_invalid(self, W, dW, d2W):
        with pytest.raises(ValueError):
            DoubleWell(W, dW, d2W).validate()


@pytest.fixture(scope="module")
def prof():
    return heteroclinic()


class TestHeteroclinic:
    def test_closed_form(self, prof):
        assert np.abs(prof.H - np.tanh(prof.t / math.sqrt(2))).max() < 1e-10
        assert prof(0.0) == 0.0

    def test_ode(self, prof):
        dt = prof.t[1] - prof.t[0]
        H2 = (prof.H[2:] - 2 * prof.H[1:-1] + prof.H[:-2]) / dt ** 2
        assert np.abs(H2 - QUARTIC.dW(prof.H[1:-1])).max() < 1e-4

    def test_energy(self, prof):
        assert prof.h0 == pytest.approx(H0, rel=1e-12)
        assert prof.grid_energy(QUARTIC) == pytest.approx(H0, rel=1e-8)

    def test_wells_outside_grid(self, prof):
        assert prof(100.0) == 1.0 and prof(-100.0) == -1.0

    def test_short_grid(self):
        with pytest.raises(ProfileError):
            heteroclinic(T=2.0)


class TestMesh:
    def test_topology(self, mesh):
        mesh.check()
        assert mesh.euler_characteristic() == -2
        assert mesh.area == pytest.approx(4 * math.pi, rel=0.02)

    @pytest.mark.parametrize("spec, chi", [(SurfaceSpec.s_L(0.5), -2), (SurfaceSpec.s_ma(3, 0.5), -4)])
    def test_other_surfaces(self, spec, chi):
        m = build_mesh(spec, 3000)
        m.check()
        assert m.euler_characteristic() == chi
        assert m.area == pytest.approx(-2 * math.pi * chi, rel=0.02)

    def test_fem_matrices(self, mesh):
        K = mesh.K
        assert abs(K - K.T).max() < 1e-12
        assert np.abs(np.asarray(K.sum(axis=1))).max() < 1e-10
        x = np.random.default_rng(0).standard_normal(mesh.n_vertices)
        assert x @ (K @ x) > 0
        assert mesh.mass.sum() == pytest.approx(mesh.area, rel=1e-12)

    def test_save_load(self, mesh, tmp_path):
        p = tmp_path / "mesh.txt"
        mesh.save(p)
        back = TriangulatedSurface.load(p)
        assert back.n_vertices == mesh.n_vertices
        assert np.array_equal(back.triangles, mesh.triangles)
        assert abs(back.K - mesh.K).max() < 1e-12

    def test_broken_mesh(self, mesh):
        bad = TriangulatedSurface(mesh.charts, mesh.chart_points, mesh.chart_global,
                                  mesh.tri_chart[1:], mesh.tri_local[1:], mesh.n_vertices, mesh.genus)
        with pytest.raises(MeshError):
            bad.check()


class TestEnergy:
    def test_wells(self, mesh):
        assert abs(energy(PhaseField(np.ones(mesh.n_vertices), EPS), mesh)) < 1e-12

    def test_epsilon_validated(self, mesh):
        with pytest.raises(HyperbolicDomainError):
            PhaseField(np.zeros(3), 0.0)
        with pytest.raises(HyperbolicDomainError):
            AllenCahn(mesh, -1.0)

    def test_regime_warning(self, mesh):
        with pytest.warns(UserWarning, match="under-resolved"):
            AllenCahn(mesh, 0.01)

    def test_gradient(self, ac):
        rng = np.random.default_rng(1)
        u = np.tanh(rng.standard_normal(ac.n))
        g = ac.gradient(u)
        for _ in range(5):
            v = rng.standard_normal(ac.n)
            h = 1e-6
            fd = (ac.energy(u + h * v) - ac.energy(u - h * v)) / (2 * h)
            assert abs(fd - g @ v) < 1e-6 * max(1.0, abs(fd))

    def test_second_variation(self, ac):
        rng = np.random.default_rng(2)
        u = np.tanh(rng.standard_normal(ac.n))
        H = ac.hessian(u)
        for _ in range(20):
            v = rng.standard_normal(ac.n)
            h = 1e-4
            fd = (ac.energy(u + h * v) - 2 * ac.energy(u) + ac.energy(u - h * v)) / h ** 2
            assert abs(fd - v @ (H @ v)) < 1e-4 * abs(fd)

    @pytest.mark.parametrize("tau", [0.01, 1.0, 100.0])
    def test_flow_decreases(self, ac, tau):
        u = np.tanh(np.random.default_rng(3).standard_normal(ac.n))
        E = [ac.energy(u)]
        for _ in range(20):
            u = ac.flow_step(u, tau)
            E.append(ac.energy(u))
        assert np.all(np.diff(E) <= 1e-12 * E[0])

    def test_newton_to_well(self, mesh):
        u = solve_critical(PhaseField(np.full(mesh.n_vertices, 0.8), EPS), mesh)
        assert np.allclose(u.u, 1.0, atol=1e-9)

    def test_newton_budget(self, mesh):
        rng = np.random.default_rng(4)
        with pytest.raises(ConvergenceError):
            solve_critical(PhaseField(rng.uniform(-1, 1, mesh.n_vertices), EPS), mesh, max_iter=1)

    def test_field_io(self, tmp_path, collar):
        p = tmp_path / "u.txt"
        collar.save(p)
        back = PhaseField.load(p)
        assert back.epsilon == EPS and np.array_equal(back.u, collar.u)


class TestInterface:
    def test_empty(self, mesh):
        assert zero_level_set(np.ones(mesh.n_vertices), mesh) == []
        assert band_components(np.ones(mesh.n_vertices), mesh) == []

    def test_collar(self, mesh, collar):
        curves = zero_level_set(collar, mesh)
        assert len(curves) == 1
        assert curves[0].length == pytest.approx(0.5, rel=0.02)
        (band,) = band_components(collar, mesh)
        assert band.euler == 0 and band.kind == "simple"
        assert interface_mass(collar, mesh, H0) == pytest.approx(0.5, rel=0.05)

    def test_sign_symmetry(self, mesh, collar):
        a = zero_level_set(collar, mesh)
        b = zero_level_set(-collar, mesh)
        assert sum(c.length for c in a) == pytest.approx(sum(c.length for c in b), rel=1e-9)


class TestMinmax:
    def test_stages(self):
        assert default_stages(SurfaceSpec.s_ma(2, 0.5))[0][0] == 0
        assert len(default_stages(SurfaceSpec.s_ma(3, 0.5))) == 4
        assert [p for p, _ in default_stages(SurfaceSpec.s_L(0.5))] == [0, 1]

    def test_initial_path(self, mesh):
        T = arrival_function(mesh, default_stages(mesh.spec))
        assert np.all(np.isfinite(T)) and T.min() == 0.0
        U = initial_path(mesh, EPS, n_images=9)
        assert U.shape == (9, mesh.n_vertices)
        assert np.all(U[0] == -1) and np.all(U[-1] == 1)
        assert np.all(np.diff(U, axis=0) >= -1e-12)

    def test_mountain_pass(self, mesh):
        crit, rec = mountain_pass(mesh, epsilon=EPS, path_resolution=17)
        assert rec.newton_residual < 1e-8
        assert np.all(np.diff(rec.max_energy_history) <= 0)
        assert 0 < rec.pass_index < len(rec.energies) - 1
        assert rec.pass_energy == pytest.approx(AllenCahn(mesh, EPS).energy(crit.u))
        # one figure-eight interface, energy within 15% of its length times h0
        bands = band_components(crit, mesh)
        assert [b.euler for b in bands] == [-1]
        assert rec.pass_energy / H0 == pytest.approx(F8_HALF, rel=0.15)
        assert rec.to_record()["pass_index"] == rec.pass_index
