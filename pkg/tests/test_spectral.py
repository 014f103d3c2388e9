import math
import warnings

import numpy as np
import pytest

from conftest import uniform_k33_walk
from qwalk.embeddings import parse_rotation_system
from qwalk.errors import ParameterError
from qwalk.graph import complete_graph
from qwalk.spectral import (
    ClusterAmbiguityWarning,
    apply_channel,
    average_mixing_matrix,
    entropy_stats,
    limiting_probability,
    spectral_decomposition,
    time_averaged_mixing,
    time_averaged_mixing_series,
    trace_lower_bound,
)
from qwalk.walks import arc_reversal_from_rotation, make_coin

K4_PLANAR = "0: (1, 2, 3), 1: (0, 3, 2), 2: (0, 1, 3), 3: (0, 2, 1)"


def random_state(rng, dim):
    x = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return x / np.linalg.norm(x)


class TestDecomposition:
    def test_identity(self):
        sd = spectral_decomposition(np.eye(4))
        assert sd.multiplicities == (4,)
        assert np.allclose(sd.projectors[0], np.eye(4))

    def test_diag_plus_minus(self):
        sd = spectral_decomposition(np.diag([1.0, -1.0]))
        assert sd.multiplicities == (1, 1)
        assert np.allclose(sd.thetas, [0, np.pi])
        assert np.allclose(sd.projectors[0], np.diag([1, 0]))
        assert np.allclose(sd.projectors[1], np.diag([0, 1]))

    def test_branch_cut_merges(self):
        eps = 1e-11
        u = np.diag(np.exp(1j * np.array([np.pi - eps, -np.pi + eps, 0.3])))
        sd = spectral_decomposition(u)
        assert sorted(sd.multiplicities) == [1, 2]
        assert np.abs(sd.reconstruct() - u).max() < 1e-9

    def test_ambiguity_warning(self):
        u = np.diag(np.exp(1j * np.array([0.1, 0.1 + 5e-9, 2.0])))
        with pytest.warns(ClusterAmbiguityWarning):
            sd = spectral_decomposition(u)
        assert sd.warnings and len(sd) == 3

    def test_no_warning_for_separated_spectrum(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            spectral_decomposition(np.diag(np.exp(1j * np.array([0.1, 1.0, 2.0]))))

    def test_invariants_on_catalogue(self, walks):
        for name, u in walks:
            sd = spectral_decomposition(u)
            defects = sd.check()
            assert max(defects.values()) < 1e-9, name
            assert sum(sd.multiplicities) == u.dim
            assert np.abs(sd.reconstruct() - u.matrix).max() < 1e-9, name
            assert np.all(np.diff(sd.thetas) > 0)
            assert np.all((sd.thetas > -np.pi) & (sd.thetas <= np.pi))


class TestAverageMixing:
    def test_identity(self):
        amm = average_mixing_matrix(spectral_decomposition(np.eye(5)))
        assert np.allclose(amm.matrix, np.eye(5)) and amm.trace == pytest.approx(5)

    def test_uniform_k33(self):
        amm = average_mixing_matrix(spectral_decomposition(uniform_k33_walk()))
        assert np.abs(amm.matrix - 1 / 18).max() < 1e-9
        assert amm.uniform and amm.walk_regular and amm.simple_spectrum
        assert amm.trace == pytest.approx(1, abs=1e-9)
        assert amm.total_entropy == pytest.approx(18 * math.log(18), abs=1e-9)

    def test_k4_planar_trace_and_entropy(self):
        g = complete_graph(4)
        u = arc_reversal_from_rotation(g, parse_rotation_system(K4_PLANAR), make_coin("circulant7", 3))
        amm = average_mixing_matrix(spectral_decomposition(u))
        assert amm.trace == pytest.approx(3.0, abs=1e-5)
        assert amm.total_entropy == pytest.approx(25.364055, abs=1e-3)

    def test_invariants_on_catalogue(self, walks):
        for name, u in walks:
            sd = spectral_decomposition(u)
            amm = average_mixing_matrix(sd)
            m = amm.matrix
            assert np.abs(m - m.T).max() < 1e-9, name
            assert m.min() >= -1e-12
            assert np.abs(m.sum(axis=0) - 1).max() < 1e-9
            assert np.abs(m.sum(axis=1) - 1).max() < 1e-9
            ev = np.linalg.eigvalsh((m + m.T) / 2)
            assert ev.min() >= -1e-9 and ev.max() <= 1 + 1e-9
            assert amm.trace >= max(1.0, trace_lower_bound(sd)) - 1e-9
            ones = np.ones(u.dim)
            assert np.abs(m @ ones - ones).max() < 1e-9

    def test_three_way_equivalence_on_catalogue(self, walks):
        for name, u in walks:
            sd = spectral_decomposition(u)
            amm = average_mixing_matrix(sd)
            trace_one = abs(amm.trace - 1) <= 1e-6
            regular_simple = amm.walk_regular and sd.simple
            assert trace_one == amm.uniform == regular_simple, name


class TestEntropy:
    def test_uniform(self):
        cols, total = entropy_stats(np.full((18, 18), 1 / 18))
        assert np.allclose(cols, math.log(18))
        assert total == pytest.approx(52.0266, abs=1e-4)

    def test_identity_is_zero(self):
        cols, total = entropy_stats(np.eye(6))
        assert total == 0 and not cols.any()


class TestBounds:
    def test_simple_spectrum_bound_is_one(self):
        sd = spectral_decomposition(uniform_k33_walk())
        assert trace_lower_bound(sd) == pytest.approx(1.0)

    def test_identity_bound_attained(self):
        sd = spectral_decomposition(np.eye(7))
        assert trace_lower_bound(sd) == pytest.approx(7)
        assert average_mixing_matrix(sd).trace == pytest.approx(7)


class TestTimeAverage:
    def test_horizon_one_is_identity(self, walks):
        _, u = walks[0]
        assert np.allclose(time_averaged_mixing(u, 1), np.eye(u.dim))

    def test_uniform_k33_converges(self):
        avg = time_averaged_mixing(uniform_k33_walk(), 20000)
        assert np.abs(avg - 1 / 18).max() < 5e-3

    def test_series_matches_single_calls(self, walks):
        _, u = walks[3]
        a, b = time_averaged_mixing_series(u, [10, 40])
        assert np.allclose(a, time_averaged_mixing(u, 10))
        assert np.allclose(b, time_averaged_mixing(u, 40))

    def test_stacked_input(self, walks):
        same = [u.matrix for _, u in walks if u.dim == 12][:3]
        stacked = time_averaged_mixing(np.stack(same), 25)
        for k, m in enumerate(same):
            assert np.allclose(stacked[k], time_averaged_mixing(m, 25))

    def test_bad_horizon(self):
        with pytest.raises(ParameterError):
            time_averaged_mixing(np.eye(2), 0)

    def test_within_order_one_over_k(self, walks):
        for name, u in walks[::4]:
            amm = average_mixing_matrix(spectral_decomposition(u))
            errs = [np.abs(a - amm.matrix).max() for a in time_averaged_mixing_series(u, [100, 1000])]
            assert errs[1] < errs[0] or errs[1] < 1e-12, name


class TestLimitingProbability:
    def test_all_arcs(self, walks):
        rng = np.random.default_rng(1)
        for _, u in walks[:5]:
            sd = spectral_decomposition(u)
            assert limiting_probability(sd, random_state(rng, u.dim), range(u.dim)) == pytest.approx(1)

    def test_diagonal_of_mhat(self, walks):
        _, u = walks[2]
        sd = spectral_decomposition(u)
        amm = average_mixing_matrix(sd)
        for j in range(u.dim):
            e = np.zeros(u.dim)
            e[j] = 1
            assert limiting_probability(sd, e, [j]) == pytest.approx(amm.matrix[j, j], abs=1e-12)

    def test_uniform_out_arcs(self):
        u = uniform_k33_walk()
        sd = spectral_decomposition(u)
        for j in range(u.dim):
            e = np.zeros(u.dim)
            e[j] = 1
            out_of_0 = [i for i, (v, _) in enumerate(u.basis) if v == 0]
            assert limiting_probability(sd, e, out_of_0) == pytest.approx(1 / 6, abs=1e-9)

    def test_constant_over_vertices_for_walk_regular_simple(self):
        u = uniform_k33_walk()
        sd = spectral_decomposition(u)
        rng = np.random.default_rng(2)
        for _ in range(20):
            x = random_state(rng, u.dim)
            vals = [limiting_probability(sd, x, [i for i, (w, _) in enumerate(u.basis) if w == v]) for v in range(6)]
            assert max(vals) - min(vals) < 1e-9

    def test_rejects_non_unit(self):
        sd = spectral_decomposition(np.eye(2))
        with pytest.raises(ParameterError):
            limiting_probability(sd, [1, 1], [0])


class TestChannel:
    def test_maximally_mixed_fixed(self, walks):
        _, u = walks[1]
        sd = spectral_decomposition(u)
        rho = np.eye(u.dim) / u.dim
        assert np.allclose(apply_channel(sd, rho), rho)

    def test_eigenvector_fixed(self, walks):
        _, u = walks[1]
        sd = spectral_decomposition(u)
        x = sd.bases[0][:, 0]
        rho = np.outer(x, x.conj())
        assert np.allclose(apply_channel(sd, rho), rho)

    def test_idempotent_and_trace_preserving(self, walks):
        rng = np.random.default_rng(3)
        _, u = walks[5]
        sd = spectral_decomposition(u)
        x = random_state(rng, u.dim)
        rho = np.outer(x, x.conj())
        once = apply_channel(sd, rho)
        assert np.trace(once).real == pytest.approx(1)
        assert np.allclose(apply_channel(sd, once), once)
        assert np.linalg.eigvalsh(once).min() > -1e-12

    def test_duality_with_limiting_probability(self, walks):
        rng = np.random.default_rng(4)
        for _, u in walks[:6]:
            sd = spectral_decomposition(u)
            x = random_state(rng, u.dim)
            s = sorted(rng.choice(u.dim, size=3, replace=False))
            d = np.zeros((u.dim, u.dim))
            d[s, s] = 1 / len(s)
            lhs = len(s) * np.vdot(x, apply_channel(sd, d) @ x).real
            assert lhs == pytest.approx(limiting_probability(sd, x, s), abs=1e-12)

    @pytest.mark.parametrize("rho", [np.eye(2), np.diag([1.5, -0.5]), np.array([[0.5, 0.5], [0, 0.5]])])
    def test_rejects_non_density(self, rho):
        with pytest.raises(ParameterError):
            apply_channel(spectral_decomposition(np.eye(2)), rho)


