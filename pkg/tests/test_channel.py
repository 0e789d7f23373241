import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from ris_mcrb.channel import (
    RealifiedModel,
    build_B,
    complexify_vec,
    e2e_channel,
    generate_observations,
    model_pair,
    realify,
    realify_vec,
    sample_loads,
    substream,
)
from ris_mcrb.errors import SingularModelError
from ris_mcrb.impedance import build_impedance_set
from ris_mcrb.scenario import scenario_from_config

from conftest import crandn


def symmetric_system(rng, n, diag_boost=4.0):
    m = crandn(rng, (n, n))
    m = m + m.T  # complex-symmetric like a reciprocal impedance matrix
    m[np.arange(n), np.arange(n)] += diag_boost
    return m


class TestSampleLoads:
    def test_degenerate_ranges_give_point_loads(self):
        sc = scenario_from_config({
            "load_r_min_ohm": 3.0, "load_r_max_ohm": 3.0,
            "load_l_min_nh": 2.0, "load_l_max_nh": 2.0,
        })
        seq = sample_loads(sc)
        want = 3.0 + 1j * sc.constants.omega * 2.0e-9
        assert np.allclose(seq.loads, want, rtol=1e-12)

    def test_samples_inside_box_and_uniform(self):
        # 640 transmissions x 16 elements -> 10240 samples per component
        sc = scenario_from_config({"num_transmissions": 640})
        seq = sample_loads(sc)
        resistance = seq.loads.real
        inductance_nh = seq.loads.imag / sc.constants.omega * 1e9
        assert resistance.min() >= 0.1 and resistance.max() <= 10.1
        assert inductance_nh.min() >= 0.1 and inductance_nh.max() <= 10.1
        for samples in (resistance.ravel(), inductance_nh.ravel()):
            assert samples.size >= 10_000
            p = stats.kstest(samples, "uniform", args=(0.1, 10.0)).pvalue
            assert p > 0.01

    def test_same_seed_bit_identical(self):
        sc = scenario_from_config({})
        assert np.array_equal(sample_loads(sc).loads, sample_loads(sc).loads)

    def test_independent_of_other_streams(self):
        sc = scenario_from_config({})
        a = sample_loads(sc).loads
        # drawing noise elsewhere must not disturb the load substream
        substream(sc.rng_seed, 1, 12345).standard_normal(10_000)
        assert np.array_equal(a, sample_loads(sc).loads)

    def test_empty_range_rejected(self):
        sc = scenario_from_config({})
        broken = dataclasses.replace(sc, load_resistance_range=(5.0, 1.0))
        with pytest.raises(ValueError):
            sample_loads(broken)

    def test_loads_strictly_inductive(self):
        sc = scenario_from_config({})
        assert np.all(sample_loads(sc).loads.imag > 0.0)


class TestE2EChannel:
    def test_scalar_closed_form(self):
        z_rs, z_st = np.array([2.0 + 1j]), np.array([3.0 - 2j])
        z_ss = np.array([[5.0 + 0.5j]])
        z_ris = np.array([1.0 + 2j])
        got = e2e_channel(z_rs, z_ss, z_ris, z_st)
        assert got == pytest.approx(z_rs[0] * z_st[0] / (z_ss[0, 0] + z_ris[0]), rel=1e-14)

    def test_linearity_zero_channel(self):
        rng = np.random.default_rng(3)
        z = symmetric_system(rng, 3)
        got = e2e_channel(crandn(rng, (3,)), z, crandn(rng, (3,)) + 5j, np.zeros(3))
        assert got == 0.0

    def test_matches_explicit_inverse_oracle(self):
        rng = np.random.default_rng(7)
        n = 4
        z_ss = symmetric_system(rng, n)
        z_ris = crandn(rng, (n,)) + 3j
        z_rs, z_st = crandn(rng, (n,)), crandn(rng, (n,))
        want = z_rs @ np.linalg.inv(z_ss + np.diag(z_ris)) @ z_st
        got = e2e_channel(z_rs, z_ss, z_ris, z_st)
        assert got == pytest.approx(want, rel=1e-10)

    def test_singular_system_reports_condition(self):
        z_ss = np.array([[1.0, 1.0], [1.0, 1.0]], dtype=complex)
        with pytest.raises(SingularModelError) as exc_info:
            e2e_channel(np.ones(2), z_ss, np.zeros(2), np.ones(2))
        assert exc_info.value.rcond is not None


class TestBuildB:
    def test_rows_reproduce_e2e_channel(self):
        rng = np.random.default_rng(11)
        n, g = 3, 5
        z_self = crandn(rng, (n,)) + 4.0
        z_mut = symmetric_system(rng, n, diag_boost=0.0)
        z_mut[np.arange(n), np.arange(n)] = 0.0
        loads = crandn(rng, (g, n)) + 5j
        z_rs, z_st = crandn(rng, (n,)), crandn(rng, (n,))
        b = build_B(z_rs, z_self, z_mut, loads)
        z_ss = np.diag(z_self) + z_mut
        for row in range(g):
            want = e2e_channel(z_rs, z_ss, loads[row], z_st)
            assert b[row] @ z_st == pytest.approx(want, rel=1e-12)

    def test_scalar_mismatched_model(self):
        z_rs = np.array([1.5 - 0.5j])
        z_self = np.array([2.0 + 1j])
        loads = np.array([[0.5 + 2j], [1.0 + 1j], [0.1 + 3j]])
        b = build_B(z_rs, z_self, None, loads)
        want = z_rs[0] / (z_self[0] + loads[:, 0])
        assert np.allclose(b[:, 0], want, rtol=1e-14)

    def test_matches_per_row_inverse_oracle(self):
        rng = np.random.default_rng(13)
        g, n = 3, 2
        z_self = crandn(rng, (n,)) + 4.0
        z_mut = np.array([[0.0, 0.3 + 0.1j], [0.3 + 0.1j, 0.0]])
        loads = crandn(rng, (g, n)) + 4j
        z_rs = crandn(rng, (n,))
        b = build_B(z_rs, z_self, z_mut, loads)
        for row in range(g):
            z = np.diag(z_self) + z_mut + np.diag(loads[row])
            want = z_rs @ np.linalg.inv(z)
            assert np.allclose(b[row], want, rtol=1e-10)

    def test_singular_row_reports_index(self):
        z_rs = np.ones(2, dtype=complex)
        z_self = np.array([1.0, 1.0], dtype=complex)
        z_mut = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
        loads = np.array([[1j, 1j], [0.0, 0.0]])  # second row singular
        with pytest.raises(SingularModelError, match="configuration 1"):
            build_B(z_rs, z_self, z_mut, loads)

    def test_mutual_coupling_continuity(self):
        rng = np.random.default_rng(17)
        n, g = 4, 6
        z_self = crandn(rng, (n,)) + 5.0
        z_mut = symmetric_system(rng, n, diag_boost=0.0)
        z_mut[np.arange(n), np.arange(n)] = 0.0
        loads = crandn(rng, (g, n)) + 5j
        z_rs = crandn(rng, (n,))
        b_mismatched = build_B(z_rs, z_self, None, loads)
        gaps = []
        for eps in (1e-2, 1e-6, 1e-10):
            b_eps = build_B(z_rs, z_self, eps * z_mut, loads)
            gaps.append(np.abs(b_eps - b_mismatched).max())
        assert gaps[0] > gaps[1] > gaps[2]
        assert gaps[2] <= 1e-9 * np.abs(b_mismatched).max()


class TestRealify:
    def test_hand_example(self):
        model = realify(np.array([[1.0 + 2.0j]]), includes_mutual_coupling=False)
        assert np.array_equal(model.matrix, [[1.0, -2.0], [2.0, 1.0]])
        got = model.matrix @ realify_vec(np.array([3.0 + 4.0j]))
        assert np.array_equal(got, realify_vec(np.array([-5.0 + 10.0j])))

    def test_real_matrix_block_diagonal(self):
        model = realify(np.eye(2) * 3.0, includes_mutual_coupling=False)
        assert np.array_equal(model.matrix, 3.0 * np.eye(4))

    def test_multiply_both_paths_oracle(self):
        rng = np.random.default_rng(23)
        b = crandn(rng, (5, 3))
        v = crandn(rng, (3,))
        model = realify(b, includes_mutual_coupling=True)
        lhs = realify_vec(b @ v)
        rhs = model.matrix @ realify_vec(v)
        assert np.linalg.norm(lhs - rhs) <= 1e-12 * np.linalg.norm(rhs)

    @settings(deadline=None, max_examples=60)
    @given(seed=st.integers(0, 2**32 - 1), g=st.integers(1, 6), n=st.integers(1, 5))
    def test_complex_real_equivalence_property(self, seed, g, n):
        rng = np.random.default_rng(seed)
        b = crandn(rng, (g, n))
        v = crandn(rng, (n,))
        model = realify(b, includes_mutual_coupling=False)
        lhs = realify_vec(b @ v)
        rhs = model.matrix @ realify_vec(v)
        assert np.linalg.norm(lhs - rhs) <= 1e-12 * max(np.linalg.norm(rhs), 1e-300)

    @settings(deadline=None, max_examples=60)
    @given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 8))
    def test_vector_round_trip(self, seed, n):
        rng = np.random.default_rng(seed)
        v = crandn(rng, (n,))
        assert np.array_equal(complexify_vec(realify_vec(v)), v)

    def test_block_structure_validated(self):
        bad = np.arange(16.0).reshape(4, 4)
        with pytest.raises(ValueError, match="block structure"):
            RealifiedModel(matrix=bad, includes_mutual_coupling=False)

    def test_complex_model_recovery(self):
        rng = np.random.default_rng(29)
        b = crandn(rng, (4, 2))
        model = realify(b, includes_mutual_coupling=True)
        assert np.array_equal(model.complex_model, b)
        assert model.num_configurations == 4
        assert model.num_elements == 2


class TestGenerateObservations:
    def test_noiseless_is_exact(self):
        rng = np.random.default_rng(31)
        b = crandn(rng, (6, 2))
        model = realify(b, includes_mutual_coupling=True)
        x = rng.standard_normal(4)
        r = generate_observations(model, x, 4.0, 1.0, rng, noiseless=True)
        assert np.array_equal(r, 2.0 * (model.matrix @ x))

    def test_pure_noise_moments(self):
        rng = np.random.default_rng(37)
        b = crandn(rng, (3, 2))
        model = realify(b, includes_mutual_coupling=True)
        x = np.zeros(4)
        sigma2 = 2.0
        draws = np.stack([
            generate_observations(model, x, 1.0, sigma2, rng)
            for _ in range(100_000)
        ])
        variances = draws.var(axis=0)
        assert np.allclose(variances, sigma2 / 2.0, rtol=0.02)
        cov = np.cov(draws.T)
        off_diag = cov - np.diag(np.diagonal(cov))
        assert np.abs(off_diag).max() < 0.02 * sigma2 / 2.0

    def test_rejects_bad_power_and_variance(self):
        model = realify(np.eye(2), includes_mutual_coupling=False)
        rng = np.random.default_rng(0)
        with pytest.raises(ValueError):
            generate_observations(model, np.zeros(4), 0.0, 1.0, rng)
        with pytest.raises(ValueError):
            generate_observations(model, np.zeros(4), 1.0, -1.0, rng)


class TestScenarioModels:
    def test_tight_spacing_mismatch_is_nontrivial(self, point_002):
        b_true = point_002.d_true.complex_model
        b_est = point_002.d_est.complex_model
        assert np.linalg.norm(b_true - b_est) > 0.0
        assert point_002.d_true.includes_mutual_coupling
        assert not point_002.d_est.includes_mutual_coupling

    def test_true_channel_realification_round_trips(self, point_002):
        z_st = point_002.impedances.z_st
        assert np.array_equal(complexify_vec(point_002.x_true), z_st)

    def test_all_default_configurations_solve(self):
        # conditioning guard: default-setup spacings build without a
        # singular-model error
        for d in (0.002, 0.02, 0.5, 2.5):
            sc = scenario_from_config({"ris_spacing_over_lambda": d,
                                       "num_transmissions": 16})
            imp = build_impedance_set(sc.tx, sc.rx, sc.ris_radiators(), sc.constants)
            model_pair(imp, sample_loads(sc))
