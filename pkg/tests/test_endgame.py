"""Endgame bookkeeping: Z-system joints, hypothesis gates, the 480k bound."""

import numpy as np
import pytest

from entropic_doubling.dist import (
    map_joint,
    product,
    random_dist,
    uniform_on,
    uniform_on_subspace,
    xor_convolve,
)
from entropic_doubling.endgame import (
    endgame,
    endgame_fiber_systems,
    endgame_move_quantities,
    measure_endgame_kappa,
    z_system_joints,
)
from entropic_doubling.entropy import (
    conditional_mutual_information,
    doubling_mass,
    shannon_entropy,
)
from entropic_doubling.errors import CapacityError, HypothesisViolationError
from entropic_doubling.gf2 import span


class TestZSystemJoints:
    def test_matches_product_route(self):
        rng = np.random.default_rng(0)
        for n in (1, 2):
            p, q = random_dist(n, rng), random_dist(n, rng)
            j = product(p, p, q, q)  # X1, X2, Y1, Y2
            ref12 = map_joint(j, [(0, 2), (1, 2), (0, 1, 2, 3)])
            ref13 = map_joint(j, [(0, 2), (0, 1), (0, 1, 2, 3)])
            j12, j13 = z_system_joints(p, q)
            assert np.max(np.abs(j12.mass - ref12.mass)) < 1e-12
            assert np.max(np.abs(j13.mass - ref13.mass)) < 1e-12

    def test_single_bit_mi_is_exactly_zero(self):
        bit = uniform_on([0, 1], 1)
        j12, _ = z_system_joints(bit, bit)
        assert conditional_mutual_information(j12, 0, 1, 2) == pytest.approx(0.0, abs=1e-12)

    def test_z1_z2_symmetry_for_exchangeable_copies(self):
        rng = np.random.default_rng(1)
        p, q = random_dist(2, rng), random_dist(2, rng)
        j = product(p, p, q, q)
        j13 = map_joint(j, [(0, 2), (0, 1), (0, 1, 2, 3)])  # (Z1, Z3, S)
        j23 = map_joint(j, [(1, 2), (0, 1), (0, 1, 2, 3)])  # (Z2, Z3, S)
        i13 = conditional_mutual_information(j13, 0, 1, 2)
        i23 = conditional_mutual_information(j23, 0, 1, 2)
        assert i13 == pytest.approx(i23, abs=1e-9)


class TestMoves:
    def test_move_quantities_consistent(self):
        rng = np.random.default_rng(2)
        p, q = random_dist(3, rng), random_dist(3, rng)
        moves = endgame_move_quantities(p, q)
        conv_pp, conv_qq = xor_convolve(p, p), xor_convolve(q, q)
        assert moves["sumset_1"][0] == pytest.approx(
            doubling_mass(conv_pp, conv_qq), abs=1e-9
        )
        # First-fibring pairing: H[X1|X1+X2] + H[X1+X2] = 2 H[X]
        lhs_pairs = moves["fiber_1"][1] + moves["sumset_1"][1]
        assert lhs_pairs == pytest.approx(
            2 * (shannon_entropy(p) + shannon_entropy(q)), abs=1e-9
        )

    def test_first_fibring_identity(self):
        # s[X1+X2; Y1+Y2] + s[X1|X1+X2; Y1|Y1+Y2] = 2 s[X;Y] + I[Z1:Z3|S]
        rng = np.random.default_rng(20)
        for _ in range(5):
            p, q = random_dist(2, rng), random_dist(2, rng)
            moves = endgame_move_quantities(p, q)
            _, j13 = z_system_joints(p, q)
            i13 = conditional_mutual_information(j13, 0, 1, 2)
            lhs = moves["sumset_1"][0] + moves["fiber_1"][0]
            assert lhs == pytest.approx(2 * doubling_mass(p, q) + i13, abs=1e-9)

    def test_second_fibring_identity(self):
        rng = np.random.default_rng(21)
        for _ in range(5):
            p, q = random_dist(2, rng), random_dist(2, rng)
            moves = endgame_move_quantities(p, q)
            j12, _ = z_system_joints(p, q)
            i12 = conditional_mutual_information(j12, 0, 1, 2)
            lhs = moves["sumset_2"][0] + moves["fiber_2"][0]
            assert lhs == pytest.approx(2 * doubling_mass(p, q) + i12, abs=1e-9)

    def test_measured_kappa_makes_hypotheses_hold(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            p, q = random_dist(2, rng), random_dist(2, rng)
            h = shannon_entropy(p) + shannon_entropy(q)
            s = doubling_mass(p, q)
            if s <= 1e-6:
                continue
            eta = min(0.5, s / h)
            kappa = measure_endgame_kappa(p, q, eta)
            transcript = endgame(p, q, eta, kappa)
            assert transcript.mi_bound_holds
            assert transcript.z_entropy_gap_holds
            assert transcript.expectation_holds


class TestEndgameTranscript:
    def test_uniform_subspace_trivial_case(self):
        u = uniform_on_subspace(span([1, 2], 3))
        kappa = measure_endgame_kappa(u, u, 0.5)
        t = endgame(u, u, 0.5, kappa)
        assert t.i_z1_z3 == pytest.approx(0.0, abs=1e-9)
        assert t.i_z1_z2 == pytest.approx(0.0, abs=1e-9)
        assert {entry[3] for entry in t.table} == {span([1, 2], 3)}
        assert t.expectation == pytest.approx(0.0, abs=1e-12)
        assert t.expectation_holds

    def test_hypothesis_violation_raises_with_gaps(self):
        p = uniform_on([0, 1, 2], 3)
        with pytest.raises(HypothesisViolationError) as err:
            endgame(p, p, 0.25, 1e-12)
        assert err.value.gaps

    def test_size_budget_respected_in_table(self):
        rng = np.random.default_rng(4)
        p, q = random_dist(3, rng), random_dist(3, rng)
        s = doubling_mass(p, q)
        h = shannon_entropy(p) + shannon_entropy(q)
        eta = min(0.5, s / h)
        t = endgame(p, q, eta, measure_endgame_kappa(p, q, eta))
        for (_u, _w, _weight, v, hx, hy, _px, _py) in t.table:
            assert v.dim <= 7 * (hx + hy) + 1e-9

    def test_capacity_guard(self):
        rng = np.random.default_rng(5)
        p = random_dist(7, rng)
        with pytest.raises(CapacityError):
            endgame(p, p, 0.4, 1.0)

    def test_fiber_cap_recorded_and_weights_renormalized(self):
        rng = np.random.default_rng(6)
        p, q = random_dist(3, rng), random_dist(3, rng)
        s = doubling_mass(p, q)
        h = shannon_entropy(p) + shannon_entropy(q)
        eta = min(0.5, s / h)
        t = endgame(p, q, eta, measure_endgame_kappa(p, q, eta), fiber_cap=4)
        assert t.fiber_cap["applied"]
        assert sum(entry[2] for entry in t.table) == pytest.approx(1.0, abs=1e-9)

    def test_transcript_serializes(self):
        u = uniform_on_subspace(span([1], 2))
        t = endgame(u, u, 0.5, measure_endgame_kappa(u, u, 0.5))
        payload = t.to_json()
        assert payload["expectation_holds"] is True
        assert payload["table"][0]["subspace"] == {"n": 2, "basis": ["1"]}

    def test_fiber_systems_reassembly(self):
        rng = np.random.default_rng(7)
        p, q = random_dist(2, rng), random_dist(2, rng)
        s = doubling_mass(p, q)
        h = shannon_entropy(p) + shannon_entropy(q)
        eta = min(0.5, s / h)
        t = endgame(p, q, eta, measure_endgame_kappa(p, q, eta))
        fam_u, fam_w, v_table = endgame_fiber_systems(t, p, q)
        assert fam_u.weights.sum() == pytest.approx(1.0, abs=1e-9)
        assert set(v_table) == {(u, w) for u in fam_u.labels for w in fam_w.labels}
        # Mixture of the u-fibers is the X-marginal.
        assert np.max(np.abs(fam_u.mixture().mass - p.mass)) < 1e-9
