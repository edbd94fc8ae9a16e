import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import central_difference, circuit_as_tuples, dense_state, random_circuit, z0
from qnnspectra import simulator as sim
from qnnspectra.errors import CapacityError, ContractError
from qnnspectra.simulator import (
    Circuit, ControlledNot, DiagonalPhase, GeneralRotation, apply_gate, expectation_z0, init_state,
)


class TestInitState:
    def test_two_qubits(self):
        np.testing.assert_array_equal(init_state(2).amplitudes, [1, 0, 0, 0])

    def test_one_qubit(self):
        np.testing.assert_array_equal(init_state(1).amplitudes, [1, 0])

    @pytest.mark.parametrize("R", [0, 25, -1])
    def test_capacity(self, R):
        with pytest.raises(CapacityError):
            init_state(R)


class TestApplyGate:
    def test_cnot_truth_table(self):
        s = sim.StateVector(np.array([0, 0, 1, 0]), 2)  # |10>
        out = apply_gate(s, ControlledNot(0, 1))
        np.testing.assert_array_equal(out.amplitudes, [0, 0, 0, 1])

    def test_cnot_control_on_low_qubit(self):
        s = sim.StateVector(np.array([0, 1, 0, 0]), 2)  # |01>
        np.testing.assert_array_equal(apply_gate(s, ControlledNot(1, 0)).amplitudes, [0, 0, 0, 1])

    def test_diagonal_phase_on_plus_state(self):
        beta, x = 1.7, 0.4
        s = sim.StateVector(np.array([1, 1]) / np.sqrt(2), 1)
        out = apply_gate(s, DiagonalPhase((0,), [beta / 2, -beta / 2], 0), x=[x])
        expected = np.array([np.exp(-0.5j * beta * x), np.exp(0.5j * beta * x)]) / np.sqrt(2)
        np.testing.assert_allclose(out.amplitudes, expected, atol=1e-15)

    def test_unbound_parameter(self):
        with pytest.raises(ContractError):
            apply_gate(init_state(1), GeneralRotation(0, (0, 1, 2)), theta=[0.1, 0.2])
        with pytest.raises(ContractError):
            apply_gate(init_state(1), DiagonalPhase((0,), [0, 1], 0))

    def test_bad_indices(self):
        with pytest.raises(ContractError):
            ControlledNot(1, 1)
        with pytest.raises(ContractError):
            apply_gate(init_state(2), GeneralRotation(2, (0, 1, 2)), theta=[0, 0, 0])
        with pytest.raises(ContractError):
            DiagonalPhase((0, 1), [0, 1, 2], 0)

    def test_random_1000_gate_circuit_matches_dense_matrices(self, rng):
        n = 6
        c = random_circuit(n, 1000, rng)
        theta = rng.uniform(0, 2 * np.pi, c.parameter_slot_count)
        x = [0.83]
        state = init_state(n)
        for g in c.gates:
            state = apply_gate(state, g, theta=theta, x=x)
        ref = dense_state(circuit_as_tuples(c), n, theta, x)
        np.testing.assert_allclose(state.amplitudes, ref, atol=1e-10)
        # the kernel path agrees too
        np.testing.assert_allclose(sim.run(c, theta, [x])[0], ref, atol=1e-10)


class TestExpectation:
    def test_ground(self):
        assert expectation_z0(init_state(3)) == 1.0

    def test_first_qubit_flipped(self):
        amps = np.zeros(8)
        amps[4] = 1
        assert expectation_z0(sim.StateVector(amps, 3)) == -1.0

    def test_plus_state(self):
        assert abs(expectation_z0(sim.StateVector(np.array([1, 1]) / np.sqrt(2), 1))) < 1e-15


class TestGradient:
    def cos_circuit(self):
        # RZ(0) RY(theta) RZ(0): f = cos(theta)
        return Circuit(1, [GeneralRotation(0, (0, 1, 2))], 3, 1)

    def test_cos_extremum(self, backend):
        g = sim.gradient(self.cos_circuit(), [0, 0, 0], [0.0])
        assert abs(g[1]) < 1e-15

    def test_cos_slope(self, backend):
        g = sim.gradient(self.cos_circuit(), [0, np.pi / 2, 0], [0.0])
        assert g[1] == pytest.approx(-1.0, abs=1e-14)

    def test_parameter_count_mismatch(self):
        with pytest.raises(ContractError):
            sim.gradient(self.cos_circuit(), [0, 0], [0.0])

    def test_random_90_parameter_circuit_vs_finite_differences(self, rng, backend):
        n = 3
        gates, slot = [], 0
        while slot < 90:
            for q in range(n):
                gates.append(GeneralRotation(q, (slot, slot + 1, slot + 2)))
                slot += 3
            gates += [ControlledNot(0, 1), ControlledNot(1, 2), DiagonalPhase((2,), [0.5, -0.5], 0)]
        c = Circuit(n, gates, slot, 1)
        theta = rng.uniform(0, 2 * np.pi, 90)
        x = [0.37]
        analytic = sim.gradient(c, theta, x)
        fd = central_difference(lambda t: sim.evaluate_batch(c, t, [x])[0], theta)
        rel = np.abs(analytic - fd) / np.maximum(np.abs(fd), 1e-3)
        assert rel.max() <= 1e-5

    def test_adjoint_equals_parameter_shift(self, rng, backend):
        c = random_circuit(4, 60, rng, n_data=2)
        theta = rng.uniform(0, 2 * np.pi, c.parameter_slot_count)
        x = [0.3, -1.1]
        np.testing.assert_allclose(sim.gradient(c, theta, x), sim.parameter_shift_gradient(c, theta, x), atol=1e-10)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2 ** 32 - 1))
def test_oracle_equivalence_small(n, seed):
    rng = np.random.default_rng(seed)
    c = random_circuit(n, 40, rng, n_data=2)
    theta = rng.uniform(0, 2 * np.pi, c.parameter_slot_count)
    x = rng.normal(size=2)
    ref = dense_state(circuit_as_tuples(c), n, theta, x)
    out = sim.run(c, theta, [x])[0]
    np.testing.assert_allclose(out, ref, atol=1e-10)
    assert abs(sim.evaluate_batch(c, theta, [x])[0] - z0(ref)) < 1e-10
    assert -1 <= sim.evaluate_batch(c, theta, [x])[0] <= 1


def test_norm_after_ten_thousand_gates(rng, backend):
    c = random_circuit(5, 10_000, rng)
    theta = rng.uniform(0, 2 * np.pi, c.parameter_slot_count)
    psi = sim.run(c, theta, [[1.3]])[0]
    assert abs(np.vdot(psi, psi).real - 1) <= 1e-12


def test_dense_unitary_helper_matches_oracle(rng):
    c = random_circuit(3, 30, rng)
    theta = rng.uniform(0, 2 * np.pi, c.parameter_slot_count)
    U = sim.dense_unitary(c, theta, [0.2])
    np.testing.assert_allclose(U[:, 0], dense_state(circuit_as_tuples(c), 3, theta, [0.2]), atol=1e-12)
    np.testing.assert_allclose(U.conj().T @ U, np.eye(8), atol=1e-12)
