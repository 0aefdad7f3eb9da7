import json
import math

import numpy as np
import pytest

from mvlb import eigen
from mvlb.eigen import (
    EigenRequest,
    NoInstabilityFound,
    count_unstable,
    dense_spectrum,
    find_unstable_vortex,
    leading_spectrum,
    pick_seeds,
)
from mvlb.oseen import OseenParams
from mvlb.spectral import Grid, VectorField, inner, norm
from mvlb.steady import VortexSpec, build_vortex

import heavy
import oracles

# leading eigenvalues of the dense vorticity-form operator (tests/oracles.py),
# one ring vortex at the centre of a 64^2 box with d = 8, nu = 1, mu = 0
ORACLE_A5 = [
    -0.616851989016822,
    -0.617754640502227 + 0.01329541280634516j,
    -0.617754640502227 - 0.01329541280634516j,
    -0.619299904760494,
]
ORACLE_A150 = [
    3.935064404311719 + 4.097717930606460j,
    3.935064404311719 - 4.097717930606460j,
    -0.617332256380595,
    -0.745953053215915 + 0.05176596194536465j,
]


def _close_sets(a, b, tol):
    a, b = list(a), list(b)
    for z in a:
        j = int(np.argmin([abs(z - w) for w in b]))
        if abs(z - b[j]) > tol:
            return False
        b.pop(j)
    return True


@pytest.fixture(scope="module")
def small():
    (state, params, rep, pair), _ = heavy.small_pair()
    return state, params, rep, pair


class TestRequest:
    @pytest.mark.parametrize("kw", [{"how_many": 0}, {"how_many": 2, "subspace_dim": 7},
                                    {"subspace_dim": 401}, {"tol": 1e-12}, {"tol": 1e-3},
                                    {"target": "leftmost"}])
    def test_validation(self, kw):
        g = Grid(32, 1.0)
        with pytest.raises(ValueError):
            EigenRequest(OseenParams(VectorField.zeros(g), 1.0), **kw)


class TestLeadingSpectrum:
    def test_zero_flow(self):
        p = OseenParams(VectorField.zeros(Grid(32, 2 * math.pi)), 1.0)
        rep = leading_spectrum(EigenRequest(p, how_many=2, proxy_n=32))
        assert np.allclose(rep.eigenvalues[:2], [-1, -1], atol=1e-8)

    def test_uniform_damping(self):
        p = OseenParams(VectorField.zeros(Grid(32, 2 * math.pi)), 1.0, 0.3)
        rep = leading_spectrum(EigenRequest(p, how_many=1, proxy_n=32))
        assert rep.eigenvalues[0] == pytest.approx(-1.3, abs=1e-8)

    def test_near_shift_target(self):
        p = OseenParams(VectorField.zeros(Grid(32, 2 * math.pi)), 1.0)
        rep = leading_spectrum(EigenRequest(p, how_many=1, target=-4.1))
        assert rep.eigenvalues[0] == pytest.approx(-4.0, abs=1e-8)

    def test_unstable_vortex_matches_oracle(self, small):
        _, params, rep, _ = small
        assert _close_sets(rep.eigenvalues[:4], ORACLE_A150, 1e-6)

    def test_residuals_recomputed(self, small):
        _, params, rep, _ = small
        eng = params.engine
        for p in rep.pairs:
            r = np.linalg.norm(eng.matvec(p.vec) - p.lam * p.vec) / np.linalg.norm(p.vec)
            assert r <= 1e-9

    def test_sorted_and_conjugate_closed(self, small):
        _, _, rep, _ = small
        lams = rep.eigenvalues
        assert np.all(np.diff(lams.real) <= 1e-8)
        for z in lams:
            if abs(z.imag) > 1e-8:
                assert np.min(np.abs(lams - np.conj(z))) <= 1e-8

    def test_json_export(self, small):
        _, _, rep, _ = small
        d = json.loads(rep.to_json())
        assert len(d["pairs"]) == len(rep.pairs) and {"re", "im", "residual"} <= set(d["pairs"][0])


class TestDenseOracle:
    def test_weak_vortex_frozen(self):
        U = build_vortex(Grid(64, 8.0), VortexSpec(amplitude=5.0, center=(4.0, 4.0)))
        ev = dense_spectrum(OseenParams(U, 1.0))
        assert _close_sets(oracles.leading(ev, 4), ORACLE_A5, 1e-9)

    def test_vorticity_form_agrees(self):
        g = Grid(32, 8.0)
        U = build_vortex(g, VortexSpec(amplitude=40.0, center=(4.0, 4.0)))
        a = np.sort_complex(dense_spectrum(OseenParams(U, 0.7, 0.2)))
        b = np.sort_complex(np.linalg.eigvals(oracles.vorticity_operator(U.values, 8.0, 0.7, 0.2)))
        assert a.size == b.size
        assert _close_sets(oracles.leading(a, 10), oracles.leading(b, 10), 1e-8)

    def test_dense_refuses_large(self):
        with pytest.raises(ValueError):
            dense_spectrum(OseenParams(VectorField.zeros(Grid(256, 1.0)), 1.0))


class TestSearch:
    def test_no_instability_for_tiny_amplitude(self):
        with pytest.raises(NoInstabilityFound):
            find_unstable_vortex("counter-rotating-ring", 1.0, Grid(64, 8.0), (0.0, 1e-3))

    def test_rejects_bad_range(self):
        with pytest.raises(ValueError):
            find_unstable_vortex("counter-rotating-ring", 1.0, Grid(64, 8.0), (5.0, 1.0))

    def test_bracket_property(self):
        res, _ = heavy.amplitude_search()
        thr = 0.05
        a = res.spec.amplitude
        assert res.pair.lam.real >= thr
        assert res.below == pytest.approx(a / 1.02, rel=1e-12)
        # re-evaluate both ends independently of the search's cache
        g = Grid(256, 16.0)
        for amp, above in ((a, True), (res.below, False)):
            u = build_vortex(g, res.spec.with_amplitude(amp))
            rep = leading_spectrum(EigenRequest(OseenParams(u, 1.0), how_many=1, subspace_dim=6,
                                                seeds=[res.pair.lam], per_seed=1))
            assert (rep.eigenvalues[0].real >= thr) == above


class TestAdjoint:
    def test_adjoint_eigenvalue(self, small):
        _, _, _, pair = small
        lam_adj = complex(pair.meta["adjoint_lambda_re"], pair.meta["adjoint_lambda_im"])
        assert abs(lam_adj - pair.lam) <= 1e-6

    def test_normalization(self, small):
        _, _, _, pair = small
        assert abs(pair.normalization() - 1) <= 1e-8

    def test_biorthogonal_to_other_modes(self, small):
        _, params, rep, pair = small
        for p in rep.pairs[1:]:
            other = params.basis.field(p.vec / np.linalg.norm(p.vec))
            assert abs(inner(other, pair.psi)) <= 1e-4 * norm(other) * norm(pair.psi)


class TestCount:
    def test_single_vortex(self, small):
        state, _, _, pair = small
        c = count_unstable(state, pair.lam.real / 2)
        assert c >= 1 and not c.capped
        assert np.min(np.abs(c.eigenvalues - pair.lam)) <= 1e-6

    def test_cap(self, small):
        state, _, _, pair = small
        c = count_unstable(state, pair.lam.real / 2, m_max=1)
        assert c == 1 and c.capped

    def test_rejects_nonpositive_threshold(self, small):
        with pytest.raises(ValueError):
            count_unstable(small[0], 0.0)

    def test_pick_seeds_separated(self):
        seeds = pick_seeds(np.array([1 + 2j, 1 - 2j, 1.001 + 2j, -1.0]), 3)
        assert seeds == [1.001 + 2j, -1.0]
