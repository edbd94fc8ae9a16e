from fractions import Fraction

import numpy as np
import pytest

from qnnspectra import encodings as enc
from qnnspectra import simulator as sim
from qnnspectra.errors import ArchitectureError, ContractError

SHAPES = [(1, 2), (2, 1), (1, 4), (2, 2), (4, 1), (1, 6), (2, 3), (3, 2), (6, 1)]


class TestSchedule:
    def test_binary_2x2(self):
        np.testing.assert_array_equal(enc.schedule("binary", 2, 2).beta, [[1, 2], [4, 8]])

    def test_exponential_2x2(self):
        np.testing.assert_array_equal(enc.schedule("exponential", 2, 2).beta, [[1, 2], [4, 9]])

    def test_golomb_q2(self):
        fam = enc.EncodingFamily("golomb", 2, (0, 1, 4, 6))
        np.testing.assert_array_equal(enc.schedule(fam, 4, 1).beta, [[1], [13]])

    def test_ternary_and_hamming(self):
        np.testing.assert_array_equal(enc.schedule("ternary", 1, 3).beta, [[1, 3, 9]])
        np.testing.assert_array_equal(enc.schedule("hamming", 3, 2).beta, np.ones((3, 2)))

    def test_turnpike_base_from_K(self):
        # K=24 -> base 49
        np.testing.assert_array_equal(enc.schedule("turnpike", 6, 1).beta, [[1], [49]])

    def test_exponential_area_one_is_all_ones(self):
        np.testing.assert_array_equal(enc.schedule("exponential", 1, 1).beta, [[1]])

    def test_block_width_must_divide(self):
        with pytest.raises(ArchitectureError):
            enc.schedule(enc.EncodingFamily("golomb", 2), 3, 1)
        with pytest.raises(ArchitectureError):
            enc.schedule("golomb", 5, 1)

    def test_unknown_family(self):
        with pytest.raises(ArchitectureError):
            enc.family("fibonacci")

    @pytest.mark.parametrize("name", ["binary", "ternary", "turnpike", "golomb"])
    @pytest.mark.parametrize("A", [2, 4, 6])
    def test_exponent_multiset_is_shape_invariant(self, name, A):
        seen = set()
        for R, L in SHAPES:
            if R * L != A:
                continue
            try:
                fam = enc.family(name, R)
            except ArchitectureError:
                continue
            beta = enc.schedule(fam, R, L).beta
            base = enc._base(fam)
            exps = sorted(round(np.log(int(b)) / np.log(base)) for b in beta.ravel())
            assert exps == list(range((R // fam.q) * L))
            seen.add((fam.q, tuple(exps)))
        assert seen

    @pytest.mark.parametrize("R,L", [s for s in SHAPES if s[0] * s[1] > 1])
    def test_exponential_differs_from_binary_in_one_entry(self, R, L):
        diff = enc.schedule("exponential", R, L).beta != enc.schedule("binary", R, L).beta
        assert diff.sum() == 1 and diff[-1, -1]


class TestEigenvalues:
    def test_single_qubit_families(self):
        for name in enc.SINGLE_QUBIT:
            assert enc.subgenerator_eigenvalues(enc.family(name)) == (Fraction(-1, 2), Fraction(1, 2))

    def test_turnpike_q3(self):
        assert enc.subgenerator_eigenvalues(enc.family("turnpike", 3)) == (0, 8, 15, 17, 20, 21, 31, 39)

    def test_golomb_q3(self):
        assert enc.subgenerator_eigenvalues(enc.family("golomb", 6)) == (0, 1, 4, 9, 15, 22, 32, 34)

    def test_q2_shared(self):
        assert enc.subgenerator_eigenvalues(enc.family("golomb", 2)) == (0, 1, 4, 6)
        assert enc.subgenerator_eigenvalues(enc.family("turnpike", 4)) == (0, 1, 4, 6)

    def test_block_width_rule(self):
        assert [enc.block_width("golomb", R) for R in (2, 3, 4, 6)] == [2, 3, 2, 3]

    def test_eigenvalue_invariants(self):
        with pytest.raises(ArchitectureError):
            enc.EncodingFamily("golomb", 2, (1, 2, 4, 6))
        with pytest.raises(ArchitectureError):
            enc.EncodingFamily("golomb", 2, (0, 4, 1, 6))


class TestDataLayer:
    def test_hamming(self):
        gates = enc.data_layer("hamming", 2, 1, 1)
        assert [g.qubits for g in gates] == [(0,), (1,)]
        for g in gates:
            np.testing.assert_array_equal(g.angles, [-0.5, 0.5])

    def test_ternary_second_layer(self):
        (g,) = enc.data_layer("ternary", 1, 2, 2)
        np.testing.assert_array_equal(g.angles, [-1.5, 1.5])

    def test_golomb_two_qubit_block(self):
        (g,) = enc.data_layer("golomb", 2, 1, 1)
        assert g.qubits == (0, 1)
        np.testing.assert_array_equal(g.angles, [0, 1, 4, 6])

    def test_layer_index_checked(self):
        with pytest.raises(ContractError):
            enc.data_layer("binary", 2, 2, 3)

    def test_gates_within_layer_commute(self, rng):
        gates = enc.data_layer("golomb", 4, 1, 1) + enc.data_layer("binary", 4, 1, 1)
        pre = [sim.GeneralRotation(q, (3 * q, 3 * q + 1, 3 * q + 2)) for q in range(4)]
        theta = rng.uniform(0, 6, 12)
        a = sim.Circuit(4, pre + gates, 12, 1)
        b = sim.Circuit(4, pre + gates[::-1], 12, 1)
        np.testing.assert_allclose(sim.run(a, theta, [[0.7]]), sim.run(b, theta, [[0.7]]), atol=1e-12)
