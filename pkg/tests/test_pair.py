import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from topowalk import (
    AngleField,
    DisorderSpec,
    InitialPairState,
    JointDistribution,
    LatticeWindow,
    evolve_pair,
    iter_pair_trajectory,
    joint_distribution_direct,
    joint_distribution_interference,
    make_pair_state,
    make_single_state,
    marginals,
    pair_coin_density_from_singles,
    pair_entropy_series,
    pair_split_step,
    position_distribution,
    product_terms,
    reduce_to_coin,
    sample_angle_field,
    split_step,
    tensor_pair,
    von_neumann_entropy,
    window_for_steps,
)
from topowalk.errors import NumericalError
from topowalk.experiments import ANGLES_WINDING_1, ANGLES_WINDING_0

# frozen from the reference run of the clean two-phase pair walk
# (walker A at (-pi/2, pi/4), walker B at (-pi/2, 3pi/4), psi+, 100 steps)
TPTPW_S_FINAL = 1.9078984289940009
TPTPW_S_LONGMEAN = 1.907904301773915
TPTPW_JOINT_P00 = 2.198861177021983e-06
TPTPW_QUADRANTS = (0.2483782301898173, 0.2475932461044761, 0.2475932461044761, 0.24837823018981733)
TPTPW_MAX_CELL = (-68, 36, 0.004823980903377774)


def run_single(window, coin, field, n_steps):
    s = make_single_state(window, 0, coin)
    for step in range(n_steps):
        s = split_step(s, field, step)
    return s


def clean_fields(window, n_steps, angles_a=ANGLES_WINDING_1, angles_b=ANGLES_WINDING_0):
    fa = sample_angle_field(angles_a, DisorderSpec.none(), n_steps, window, "a")
    fb = sample_angle_field(angles_b, DisorderSpec.none(), n_steps, window, "b")
    return fa, fb


class TestMakePairState:
    def test_separable(self):
        win = LatticeWindow(4)
        pair = make_pair_state(InitialPairState("sep"), win)
        i0 = win.index(0)
        assert pair.amps[i0, 0, i0, 1] == 1.0
        assert np.count_nonzero(pair.amps) == 1

    def test_psi_plus(self):
        win = LatticeWindow(4)
        pair = make_pair_state(InitialPairState("psi+"), win)
        i0 = win.index(0)
        assert_allclose(pair.amps[i0, 0, i0, 1], 1 / np.sqrt(2))
        assert_allclose(pair.amps[i0, 1, i0, 0], 1 / np.sqrt(2))

    def test_psi_minus_relative_sign(self):
        win = LatticeWindow(4)
        pair = make_pair_state(InitialPairState("psi-"), win)
        i0 = win.index(0)
        assert_allclose(pair.amps[i0, 1, i0, 0], -pair.amps[i0, 0, i0, 1])

    def test_positions_respected(self):
        win = LatticeWindow(6)
        pair = make_pair_state(InitialPairState("sep", (2, -3)), win)
        assert pair.amps[win.index(2), 0, win.index(-3), 1] == 1.0

    def test_rejects_positions_at_edge(self):
        with pytest.raises(ValueError):
            make_pair_state(InitialPairState("sep", (6, 0)), LatticeWindow(6))

    def test_rejects_unknown_kind(self):
        with pytest.raises(ValueError):
            InitialPairState("bell")


class TestEvolvePair:
    def test_zero_steps(self):
        win = LatticeWindow(4)
        pair = make_pair_state(InitialPairState("psi+"), win)
        final, _ = evolve_pair(pair, *clean_fields(win, 0), 0)
        assert final is pair

    def test_product_input_equals_tensor_of_singles(self):
        n = 12
        win = window_for_steps(n)
        fa, fb = clean_fields(win, n)
        prod = tensor_pair(make_single_state(win, 0, (1, 0)), make_single_state(win, 0, (0, 1)))
        final, _ = evolve_pair(prod, fa, fb, n)
        ref = tensor_pair(run_single(win, (1, 0), fa, n), run_single(win, (0, 1), fb, n))
        assert np.abs(final.amps - ref.amps).max() < 1e-12

    def test_norm_preserved(self):
        n = 20
        win = window_for_steps(n)
        dis = DisorderSpec.strong(3, "both")
        fa = sample_angle_field(ANGLES_WINDING_1, dis, n, win, "a")
        fb = sample_angle_field(ANGLES_WINDING_0, dis, n, win, "b")
        pair = make_pair_state(InitialPairState("psi+"), win)
        final, _ = evolve_pair(pair, fa, fb, n)
        assert abs(final.norm() - 1.0) < 1e-12

    def test_each_particle_sees_its_own_field(self):
        # zero angles transport A's coin-0 right and B's coin-1 left
        win = LatticeWindow(3)
        zeros = AngleField(np.zeros((win.size, 1)), np.zeros((win.size, 1)))
        pair = make_pair_state(InitialPairState("sep"), win)
        out = pair_split_step(pair, zeros, zeros, 0)
        assert out.amps[win.index(1), 0, win.index(-1), 1] == 1.0


class TestJointDistributionDirect:
    def test_unevolved_psi_plus_is_origin_delta(self):
        win = LatticeWindow(4)
        pair = make_pair_state(InitialPairState("psi+"), win)
        joint = joint_distribution_direct(pair)
        assert_allclose(joint.values[win.index(0), win.index(0)], 1.0, atol=1e-12)
        assert_allclose(joint.values.sum(), 1.0, atol=1e-12)

    def test_product_state_factorizes(self):
        n = 8
        win = window_for_steps(n)
        fa, fb = clean_fields(win, n)
        a = run_single(win, (1, 0), fa, n)
        b = run_single(win, (0, 1), fb, n)
        joint = joint_distribution_direct(tensor_pair(a, b))
        expected = np.outer(position_distribution(a), position_distribution(b))
        assert np.abs(joint.values - expected).max() < 1e-12

    def test_separable_factorizes_at_every_step(self):
        n = 10
        win = window_for_steps(n)
        dis = DisorderSpec.weak(5, "both")
        fa = sample_angle_field(ANGLES_WINDING_1, dis, n, win, "a")
        fb = sample_angle_field(ANGLES_WINDING_0, dis, n, win, "b")
        pair = make_pair_state(InitialPairState("sep"), win)
        for state in iter_pair_trajectory(pair, fa, fb, n):
            joint = joint_distribution_direct(state)
            pa, pb = marginals(joint)
            assert np.abs(joint.values - np.outer(pa, pb)).max() < 1e-10


class TestJointDistributionInterference:
    def test_unevolved_origin_delta(self):
        win = LatticeWindow(4)
        c0 = make_single_state(win, 0, (1, 0))
        c1 = make_single_state(win, 0, (0, 1))
        joint = joint_distribution_interference(c0, c1, sign=+1)
        assert_allclose(joint.values[win.index(0), win.index(0)], 1.0, atol=1e-14)

    @pytest.mark.parametrize("sign", [+1, -1])
    @pytest.mark.parametrize("n_steps", [1, 2, 5, 10, 20])
    def test_matches_direct_tensor_evolution(self, sign, n_steps):
        win = window_for_steps(n_steps)
        fa, fb = clean_fields(win, n_steps)
        kind = "psi+" if sign > 0 else "psi-"
        pair = make_pair_state(InitialPairState(kind), win)
        final, _ = evolve_pair(pair, fa, fb, n_steps)
        direct = joint_distribution_direct(final)
        interf = joint_distribution_interference(
            run_single(win, (1, 0), fa, n_steps),
            run_single(win, (0, 1), fa, n_steps),
            run_single(win, (1, 0), fb, n_steps),
            run_single(win, (0, 1), fb, n_steps),
            sign=sign,
        )
        assert np.abs(direct.values - interf.values).max() < 1e-10
        assert abs(interf.values.sum() - 1.0) < 1e-10

    def test_normalized_for_any_fields(self):
        n = 7
        win = window_for_steps(n)
        dis = DisorderSpec.strong(9, "both")
        fa = sample_angle_field((0.2, 1.3), dis, n, win, "a")
        fb = sample_angle_field((-1.0, 0.4), dis, n, win, "b")
        joint = joint_distribution_interference(
            run_single(win, (1, 0), fa, n),
            run_single(win, (0, 1), fa, n),
            run_single(win, (1, 0), fb, n),
            run_single(win, (0, 1), fb, n),
            sign=-1,
        )
        assert abs(joint.values.sum() - 1.0) < 1e-10
        assert joint.values.min() >= 0.0

    @given(st.integers(0, 2**32 - 1), st.integers(1, 8), st.sampled_from([+1, -1]))
    @settings(max_examples=15, deadline=None)
    def test_matches_direct_for_arbitrary_fields(self, seed, n_steps, sign):
        rng = np.random.default_rng(seed)
        win = window_for_steps(n_steps)
        shape = (win.size, n_steps)
        fa = AngleField(rng.uniform(-np.pi, np.pi, shape), rng.uniform(-np.pi, np.pi, shape))
        fb = AngleField(rng.uniform(-np.pi, np.pi, shape), rng.uniform(-np.pi, np.pi, shape))
        kind = "psi+" if sign > 0 else "psi-"
        final, _ = evolve_pair(make_pair_state(InitialPairState(kind), win), fa, fb, n_steps)
        direct = joint_distribution_direct(final).values
        interf = joint_distribution_interference(
            run_single(win, (1, 0), fa, n_steps),
            run_single(win, (0, 1), fa, n_steps),
            run_single(win, (1, 0), fb, n_steps),
            run_single(win, (0, 1), fb, n_steps),
            sign=sign,
        ).values
        assert np.abs(direct - interf).max() < 1e-10

    def test_rejects_bad_sign(self):
        win = LatticeWindow(3)
        c0 = make_single_state(win, 0, (1, 0))
        c1 = make_single_state(win, 0, (0, 1))
        with pytest.raises(ValueError):
            joint_distribution_interference(c0, c1, sign=2)

    def test_rejects_mismatched_windows(self):
        c0 = make_single_state(LatticeWindow(3), 0, (1, 0))
        c1 = make_single_state(LatticeWindow(4), 0, (0, 1))
        with pytest.raises(ValueError):
            joint_distribution_interference(c0, c1)

    def test_inconsistent_inputs_fail_normalization(self):
        # walkers evolved for different durations are physically inconsistent
        win = window_for_steps(6)
        fa, fb = clean_fields(win, 6)
        with pytest.raises(NumericalError):
            joint_distribution_interference(
                run_single(win, (1, 0), fa, 6),
                run_single(win, (0, 1), fa, 4),
                sign=+1,
            )


class TestCorrelations:
    @pytest.mark.parametrize("sign,kind", [(+1, "psi+"), (-1, "psi-")])
    def test_entangled_pairs_are_correlated(self, sign, kind):
        # the joint distribution must not factorize into its marginals
        n = 6
        win = window_for_steps(n)
        fa, fb = clean_fields(win, n)
        pair = make_pair_state(InitialPairState(kind), win)
        final, _ = evolve_pair(pair, fa, fb, n)
        joint = joint_distribution_direct(final)
        pa, pb = marginals(joint)
        assert np.abs(joint.values - np.outer(pa, pb)).max() > 1e-4

    @pytest.mark.parametrize("kind", ["psi+", "psi-"])
    def test_exchange_symmetry_identical_fields(self, kind):
        n = 15
        win = window_for_steps(n)
        field = sample_angle_field(ANGLES_WINDING_1, DisorderSpec.none(), n, win, "a")
        pair = make_pair_state(InitialPairState(kind), win)
        final, _ = evolve_pair(pair, field, field, n)
        joint = joint_distribution_direct(final)
        assert np.abs(joint.values - joint.values.T).max() < 1e-12


class TestMarginals:
    def test_delta_joint(self):
        win = LatticeWindow(4)
        pair = make_pair_state(InitialPairState("psi+"), win)
        pa, pb = marginals(joint_distribution_direct(pair))
        assert_allclose(pa[win.index(0)], 1.0, atol=1e-12)
        assert_allclose(pb[win.index(0)], 1.0, atol=1e-12)

    def test_product_distribution_recovers_factors(self):
        win = LatticeWindow(3)
        rng = np.random.default_rng(4)
        pa = rng.random(win.size)
        pa /= pa.sum()
        pb = rng.random(win.size)
        pb /= pb.sum()
        joint = JointDistribution(win, np.outer(pa, pb))
        got_a, got_b = marginals(joint)
        assert np.abs(got_a - pa).max() < 1e-14
        assert np.abs(got_b - pb).max() < 1e-14

    def test_marginals_sum_to_one(self):
        n = 8
        win = window_for_steps(n)
        fa, fb = clean_fields(win, n)
        pair = make_pair_state(InitialPairState("psi+"), win)
        final, _ = evolve_pair(pair, fa, fb, n)
        pa, pb = marginals(joint_distribution_direct(final))
        assert abs(pa.sum() - 1.0) < 1e-10
        assert abs(pb.sum() - 1.0) < 1e-10

    @pytest.mark.parametrize("kind,sign", [("psi+", +1), ("psi-", -1)])
    def test_entangled_marginals_are_coin_mixtures(self, kind, sign):
        # each walker's marginal is the 50/50 mixture of its coin-0/coin-1 runs
        n = 12
        win = window_for_steps(n)
        fa, fb = clean_fields(win, n)
        pair = make_pair_state(InitialPairState(kind), win)
        final, _ = evolve_pair(pair, fa, fb, n)
        pa, pb = marginals(joint_distribution_direct(final))
        mix_a = 0.5 * (
            position_distribution(run_single(win, (1, 0), fa, n))
            + position_distribution(run_single(win, (0, 1), fa, n))
        )
        mix_b = 0.5 * (
            position_distribution(run_single(win, (1, 0), fb, n))
            + position_distribution(run_single(win, (0, 1), fb, n))
        )
        assert np.abs(pa - mix_a).max() < 1e-10
        assert np.abs(pb - mix_b).max() < 1e-10


class TestPairEntropy:
    def test_unevolved_separable_zero(self):
        win = LatticeWindow(4)
        series = pair_entropy_series([make_pair_state(InitialPairState("sep"), win)])
        assert series.steps == [0]
        assert series.entropy_bits[0] < 1e-10

    def test_unevolved_psi_plus_zero(self):
        win = LatticeWindow(4)
        series = pair_entropy_series([make_pair_state(InitialPairState("psi+"), win)])
        assert series.entropy_bits[0] < 1e-10

    def test_series_within_bounds(self):
        n = 12
        win = window_for_steps(n)
        fa, fb = clean_fields(win, n)
        pair = make_pair_state(InitialPairState("psi+"), win)
        series = pair_entropy_series(iter_pair_trajectory(pair, fa, fb, n))
        assert series.steps == list(range(n + 1))
        assert all(0.0 <= s <= 2.0 + 1e-12 for s in series.entropy_bits)

    def test_clean_two_phase_regression(self):
        # reference run: final entropy, long-time mean, and late fluctuation envelope
        n = 100
        win = window_for_steps(n)
        fa, fb = clean_fields(win, n)
        pair = make_pair_state(InitialPairState("psi+"), win)
        _, records = evolve_pair(
            pair, fa, fb, n,
            {"entropy": lambda s: von_neumann_entropy(reduce_to_coin(s))},
        )
        ent = np.array(records["entropy"])
        assert_allclose(ent[-1], TPTPW_S_FINAL, atol=1e-9)
        assert_allclose(ent[-25:].mean(), TPTPW_S_LONGMEAN, atol=1e-9)
        assert np.abs(np.diff(ent[50:])).max() < 0.01

    def test_joint_regression_two_phase_walk(self):
        # frozen features of the 100-step clean two-phase joint distribution
        n = 100
        win = window_for_steps(n)
        fa, fb = clean_fields(win, n)
        pair = make_pair_state(InitialPairState("psi+"), win)
        final, _ = evolve_pair(pair, fa, fb, n)
        joint = joint_distribution_direct(final).values
        i0 = win.index(0)
        assert_allclose(joint[i0, i0], TPTPW_JOINT_P00, atol=1e-12)
        quadrants = (
            joint[:i0, :i0].sum(),
            joint[:i0, i0 + 1 :].sum(),
            joint[i0 + 1 :, :i0].sum(),
            joint[i0 + 1 :, i0 + 1 :].sum(),
        )
        assert_allclose(quadrants, TPTPW_QUADRANTS, atol=1e-9)
        am = np.unravel_index(np.argmax(joint), joint.shape)
        x = win.positions()
        assert (int(x[am[0]]), int(x[am[1]])) == TPTPW_MAX_CELL[:2]
        assert_allclose(joint.max(), TPTPW_MAX_CELL[2], atol=1e-12)


class TestProductDecomposition:
    @pytest.mark.parametrize("kind", ["psi+", "psi-", "sep"])
    def test_coin_density_matches_direct_reduction(self, kind):
        n = 15
        win = window_for_steps(n)
        dis = DisorderSpec.strong(11, "both")
        fa = sample_angle_field((0.3, -1.1), dis, n, win, "a")
        fb = sample_angle_field((-2.0, 0.7), dis, n, win, "b")
        init = InitialPairState(kind)
        pair = make_pair_state(init, win)
        final, _ = evolve_pair(pair, fa, fb, n)
        walkers_a = (run_single(win, (1, 0), fa, n), run_single(win, (0, 1), fa, n))
        walkers_b = (run_single(win, (1, 0), fb, n), run_single(win, (0, 1), fb, n))
        rho = pair_coin_density_from_singles(walkers_a, walkers_b, product_terms(init))
        assert np.abs(rho - reduce_to_coin(final)).max() < 1e-12

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=10, deadline=None)
    def test_coin_density_random_angles(self, seed):
        rng = np.random.default_rng(seed)
        n = 6
        win = window_for_steps(n)
        fa = AngleField(
            rng.uniform(-np.pi, np.pi, (win.size, n)), rng.uniform(-np.pi, np.pi, (win.size, n))
        )
        fb = AngleField(
            rng.uniform(-np.pi, np.pi, (win.size, n)), rng.uniform(-np.pi, np.pi, (win.size, n))
        )
        init = InitialPairState("psi+")
        final, _ = evolve_pair(make_pair_state(init, win), fa, fb, n)
        walkers_a = (run_single(win, (1, 0), fa, n), run_single(win, (0, 1), fa, n))
        walkers_b = (run_single(win, (1, 0), fb, n), run_single(win, (0, 1), fb, n))
        rho = pair_coin_density_from_singles(walkers_a, walkers_b, product_terms(init))
        assert np.abs(rho - reduce_to_coin(final)).max() < 1e-12
