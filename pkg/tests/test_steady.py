import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mvlb.spectral import Grid, SolenoidalField, VectorField, div, max_norm, norm, rot
from mvlb.steady import (
    GridTooSmall,
    Lattice,
    OverlapError,
    VortexSpec,
    assemble_multivortex,
    build_vortex,
    grashof_case1,
    grashof_case2,
    single_vortex_state,
    steady_forcing,
    steady_residual,
    support_radius,
)

import oracles


@pytest.fixture(scope="module")
def g16():
    return Grid(128, 16.0)


class TestVortex:
    def test_zero_amplitude(self, g16):
        assert not np.any(build_vortex(g16, VortexSpec(amplitude=0.0)).values)

    @pytest.mark.parametrize("family", ["counter-rotating-ring", "smooth-bump"])
    def test_linear_in_amplitude(self, g16, family):
        u1 = build_vortex(g16, VortexSpec(family, 1.5, center=(8, 8)))
        u2 = build_vortex(g16, VortexSpec(family, 3.0, center=(8, 8)))
        assert np.allclose(u2.values, 2 * u1.values, rtol=0, atol=1e-14 * max_norm(u2))

    def test_support_radius(self):
        g = Grid(256, 16.0)
        u = build_vortex(g, VortexSpec(amplitude=1.0, center=(8.0, 8.0)))
        assert support_radius(u, (8.0, 8.0), 1e-6) <= 2.0

    def test_matches_independent_builder(self):
        g = Grid(64, 8.0)
        u = build_vortex(g, VortexSpec(amplitude=5.0, center=(4.0, 4.0)))
        ref = oracles.vortex_field(64, 8.0, 5.0)
        assert np.allclose(u.values, ref, atol=1e-12 * np.abs(ref).max())

    def test_divergence_free(self, g16):
        u = build_vortex(g16, VortexSpec(amplitude=7.0, center=(3, 5)))
        assert np.max(np.abs(div(u).values)) <= 1e-12 * max_norm(u)

    def test_grid_too_small(self):
        with pytest.raises(GridTooSmall):
            build_vortex(Grid(32, 3.9), VortexSpec(core_radius=1.0))

    @pytest.mark.parametrize("kw", [{"family": "tornado"}, {"core_radius": 0.0}, {"amplitude": -1.0}])
    def test_rejects_bad_spec(self, kw):
        with pytest.raises(ValueError):
            VortexSpec(**kw)

    @given(st.floats(0, 16), st.floats(0, 16))
    def test_translation_equivariance(self, c1, c2):
        g = Grid(64, 16.0)
        spec = VortexSpec(amplitude=3.0)
        moved = build_vortex(g, spec.at((c1, c2)))
        shifted = build_vortex(g, spec).translated((c1, c2))
        assert np.max(np.abs(moved.values - shifted.values)) <= 1e-12 * max_norm(moved)


class TestForcing:
    def test_zero(self, g16):
        assert not np.any(steady_forcing(SolenoidalField.zeros(g16), 1.0).values)

    def test_kolmogorov(self):
        g = Grid(32, 2 * math.pi)
        x1, x2 = g.coords
        u = SolenoidalField(g, np.stack([np.sin(x2), 0 * x1]))
        f = steady_forcing(u, 1.0, 0.0)
        assert np.allclose(f.values, u.values, atol=1e-13)

    @pytest.mark.parametrize("mu", [0.0, 0.7])
    def test_vortex_residual(self, g16, mu):
        st_ = single_vortex_state(g16, VortexSpec(amplitude=1.0, center=(8, 8)), 1.0, mu)
        assert st_.residual <= 1e-10
        assert st_.residual <= 1e-10 * (max_norm(st_.forcing) + max_norm(st_.velocity))
        assert np.max(np.abs(div(st_.forcing).values)) <= 1e-10 * max_norm(st_.forcing)

    def test_rejects_bad_coefficients(self, g16):
        u = SolenoidalField.zeros(g16)
        with pytest.raises(ValueError):
            steady_forcing(u, 0.0)
        with pytest.raises(ValueError):
            steady_forcing(u, 1.0, -1.0)

    def test_additivity_for_disjoint_supports(self):
        g = Grid(128, 16.0)
        spec = VortexSpec(amplitude=40.0)
        u1 = build_vortex(g, spec.at((4, 4)))
        u2 = build_vortex(g, spec.at((12, 10)))
        both = steady_forcing(SolenoidalField(g, u1.values + u2.values), 1.0)
        parts = steady_forcing(u1, 1.0).values + steady_forcing(u2, 1.0).values
        assert np.max(np.abs(both.values - parts)) <= 1e-9 * max_norm(both)


class TestLattice:
    def test_square_offsets(self):
        lat = Lattice.square(2, 8.0)
        assert lat.offsets == ((4.0, 4.0), (4.0, 12.0), (12.0, 4.0), (12.0, 12.0))
        assert lat.min_distance(16.0) == pytest.approx(8.0)

    @pytest.mark.parametrize("count", [2, 8, 32])
    def test_rotated_spacing(self, count):
        lat, side = Lattice.rotated(count, 8.0)
        assert len(lat) == count
        assert side == pytest.approx(math.sqrt(count) * 8.0)
        assert lat.min_distance(side) == pytest.approx(8.0)

    def test_rejects_duplicates(self):
        with pytest.raises(ValueError):
            Lattice(8.0, ((1, 1), (1, 1)))

    def test_overlap(self):
        with pytest.raises(OverlapError):
            Lattice(3.0, ((4.0, 4.0), (7.0, 4.0))).validate(16.0, core_radius=1.0)
        with pytest.raises(OverlapError):
            Lattice(8.0, ((4.0, 4.0), (7.0, 4.0))).validate(16.0)

    def test_margin(self):
        with pytest.raises(ValueError):
            Lattice(8.0, ((0.5, 8.0),), margin=1.0).validate(16.0)


class TestMultivortex:
    def test_single_centre_matches_single_state(self, g16):
        spec = VortexSpec(amplitude=20.0)
        multi = assemble_multivortex(g16, spec, Lattice(16.0, ((5.0, 9.0),)))
        single = single_vortex_state(g16, spec.at((5.0, 9.0)))
        assert np.allclose(multi.velocity.values, single.velocity.values, atol=1e-13 * max_norm(single.velocity))
        assert np.allclose(multi.forcing.values, single.forcing.values, atol=1e-11 * max_norm(single.forcing))

    def test_norm_additivity_four(self):
        g = Grid(128, 16.0)
        spec = VortexSpec(amplitude=150.0)
        multi = assemble_multivortex(g, spec, Lattice.square(2, 8.0))
        single = single_vortex_state(g, spec.at((8, 8)))
        assert 3.96 <= norm(multi.forcing) ** 2 / norm(single.forcing) ** 2 <= 4.04
        assert 3.96 <= norm(rot(multi.forcing)) ** 2 / norm(rot(single.forcing)) ** 2 <= 4.04
        assert multi.residual <= 1e-10 * (max_norm(multi.forcing) + max_norm(multi.velocity))

    def test_summed_forcing_at_default_resolution(self):
        # 16 points per core radius: translated single forcings reproduce the full forcing
        g = Grid(256, 16.0)
        multi = assemble_multivortex(g, VortexSpec(amplitude=150.0), Lattice.square(2, 8.0))
        assert multi.meta["cross_term"] <= 1e-9

    def test_global_translation(self):
        g = Grid(128, 16.0)
        spec = VortexSpec(amplitude=30.0)
        a = assemble_multivortex(g, spec, Lattice.square(2, 8.0))
        shifted = Lattice(8.0, tuple((x + 1.25, y - 2.5) for x, y in Lattice.square(2, 8.0).offsets))
        b = assemble_multivortex(g, spec, shifted)
        assert norm(a.forcing) == pytest.approx(norm(b.forcing), rel=1e-12)
        assert abs(a.residual - b.residual) <= 1e-10 * max_norm(a.forcing)

    def test_overlapping_lattice_rejected(self, g16):
        with pytest.raises(OverlapError):
            assemble_multivortex(g16, VortexSpec(), Lattice(3.0, ((4.0, 4.0), (7.0, 4.0))))

    def test_metadata(self, g16):
        st_ = assemble_multivortex(g16, VortexSpec(amplitude=2.0), Lattice.square(2, 8.0), 1.0, 0.5)
        meta = st_.metadata()
        assert meta["L"] == 8.0 and meta["mu"] == 0.5 and len(meta["offsets"]) == 4


class TestGrashof:
    def _field_with_norm(self, target):
        g = Grid(32, 2 * math.pi)
        x1, x2 = g.coords
        v = VectorField(g, np.stack([np.sin(x2), 0 * x1]))
        return VectorField(g, v.values * target / norm(v))

    def test_zero(self, g16):
        z = VectorField.zeros(g16)
        assert grashof_case1(z, 1.0, 1.0) == 0.0
        assert grashof_case2(z, 1.0, 1.0) == 0.0

    def test_case1_arithmetic(self):
        f = self._field_with_norm(2.0)
        assert grashof_case1(f, 0.5, 4 * math.pi**2) == pytest.approx(32 * math.pi**2, rel=1e-12)
        assert 32 * math.pi**2 == pytest.approx(315.83, abs=5e-3)

    def test_case1_homogeneous(self):
        f = self._field_with_norm(1.3)
        g2 = grashof_case1(VectorField(f.grid, 2.5 * f.values), 1.0, 7.0)
        assert g2 == pytest.approx(2.5 * grashof_case1(f, 1.0, 7.0), rel=1e-12)

    def test_case2_arithmetic(self):
        # rot(sin x2, 0) = cos x2, same L2 norm as the field
        f = self._field_with_norm(3.0)
        assert norm(rot(f)) ** 2 == pytest.approx(9.0, rel=1e-12)
        assert grashof_case2(f, 1.0, 1.0) == pytest.approx(9.0, rel=1e-12)
        assert grashof_case2(f, 2.0, 1.0) == pytest.approx(9.0 / 8, rel=1e-12)

    @pytest.mark.parametrize("args", [(0.0, 1.0), (1.0, 0.0), (-1.0, 1.0)])
    def test_rejects_bad_parameters(self, g16, args):
        z = VectorField.zeros(g16)
        with pytest.raises(ValueError):
            grashof_case1(z, *args)
        with pytest.raises(ValueError):
            grashof_case2(z, *args)
