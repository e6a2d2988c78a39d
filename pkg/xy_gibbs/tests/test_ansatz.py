import math

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, strategies as st

from xy_gibbs.exceptions import DomainError, GateError, InvalidModelError
from xy_gibbs.models import BrickwallParams, GateKind, GRAngles, ModelParams, ReducedXYAngles, Statevector
from xy_gibbs.utils import ansatz, exactsolver, simulator


def load(angles):
    return simulator.run_circuit(simulator.zero_state(angles.n_qubits), ansatz.gr_circuit(angles))


def even_parity_mask(n_qubits):
    return np.array([bin(i).count('1') % 2 == 0 for i in range(1 << n_qubits)])


class GroverRudolphCircuitTestCase(SimpleTestCase):

    def test_single_qubit(self):
        circuit = ansatz.gr_circuit(GRAngles(1, [0.3]))
        self.assertEqual(len(circuit), 1)
        gate = circuit.gates[0]
        self.assertEqual(gate.kind, GateKind.RY)
        self.assertEqual(gate.targets, (0,))

    def test_four_qubit_layout(self):
        circuit = ansatz.gr_circuit(GRAngles(4, np.arange(15) / 10))
        self.assertEqual(len(circuit), 15)
        self.assertEqual([gate.param_index for gate in circuit], list(range(15)))
        gate = circuit.gates[9]
        self.assertEqual(gate.kind, GateKind.CONTROLLED_RY)
        self.assertEqual(gate.controls, ((0, 0), (1, 1), (2, 0)))
        self.assertEqual(gate.targets, (3,))
        self.assertAlmostEqual(gate.angle, 0.9)

    def test_qubit_offset(self):
        circuit = ansatz.gr_circuit(GRAngles(2, [0.1, 0.2, 0.3]), qubit_offset=4)
        self.assertEqual(circuit.n_qubits, 6)
        self.assertEqual(circuit.gates[2].controls, ((4, 1),))
        self.assertEqual(circuit.gates[2].targets, (5,))

    def test_zero_angles_leave_vacuum(self):
        state = load(GRAngles(4, np.zeros(15)))
        expected = np.zeros(16)
        expected[0] = 1.0
        np.testing.assert_array_equal(state.amplitudes, expected)

    def test_simulated_distribution_matches_closed_form(self):
        rng = np.random.default_rng(0)
        for n in (1, 2, 3, 4):
            angles = GRAngles(n, rng.uniform(0, math.pi, (1 << n) - 1))
            np.testing.assert_allclose(
                simulator.measurement_distribution(load(angles)), ansatz.gr_distribution(angles), atol=1e-14,
            )

    def test_wrong_angle_count(self):
        with self.assertRaises(GateError):
            GRAngles(3, np.zeros(6))

    def test_non_finite_angle(self):
        with self.assertRaises(DomainError):
            GRAngles(1, [math.nan])

    def test_rejects_plain_arrays(self):
        with self.assertRaises(GateError):
            ansatz.gr_circuit(np.zeros(3))


class AnglesFromDistributionTestCase(SimpleTestCase):

    def test_point_mass(self):
        p = np.zeros(16)
        p[0] = 1.0
        np.testing.assert_array_equal(ansatz.angles_from_distribution(p).thetas, np.zeros(15))

    def test_uniform(self):
        angles = ansatz.angles_from_distribution(np.full(16, 1 / 16))
        np.testing.assert_allclose(angles.thetas, math.pi / 2, atol=1e-15)

    def test_last_leaf(self):
        rng = np.random.default_rng(5)
        p = rng.uniform(size=16)
        p /= p.sum()
        theta = ansatz.angles_from_distribution(p).thetas[14]
        self.assertAlmostEqual(theta, 2 * math.atan(math.sqrt(p[15] / p[14])), places=12)

    def test_equal_last_pair(self):
        p = np.full(16, 1 / 20)
        p[:4] = 1 / 10 - 1 / 80
        p /= p.sum()
        self.assertAlmostEqual(ansatz.angles_from_distribution(p).thetas[14], math.pi / 2, places=14)

    def test_round_trip(self):
        """Load, simulate and read back 200 random distributions per register size."""
        rng = np.random.default_rng(1234)
        for n in (2, 3, 4):
            for _ in range(200):
                p = rng.dirichlet(np.ones(1 << n))
                angles = ansatz.angles_from_distribution(p)
                state = load(angles)
                np.testing.assert_allclose(simulator.measurement_distribution(state), p, atol=1e-12)
                np.testing.assert_array_equal(state.amplitudes.imag, 0.0)
                self.assertTrue(np.all(state.amplitudes.real >= -1e-15))

    def test_sparse_distribution(self):
        p = np.array([0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.5, 0.0])
        np.testing.assert_allclose(ansatz.gr_distribution(ansatz.angles_from_distribution(p)), p, atol=1e-15)

    def test_invalid_distributions(self):
        for p in ([1.0], [0.5, 0.25, 0.25], [1.2, -0.2], [0.5, 0.4], [math.nan, 1.0]):
            with self.assertRaises(DomainError):
                ansatz.angles_from_distribution(p)


class ReducedAnsatzTestCase(SimpleTestCase):

    def test_zero_beta_tail(self):
        angles = ansatz.expand_reduced(ReducedXYAngles(0.0, np.full(7, math.pi / 2)))
        self.assertAlmostEqual(angles.thetas[11], math.pi / 2, places=15)
        self.assertAlmostEqual(angles.thetas[14], math.pi / 2, places=15)

    def test_unit_beta_tail(self):
        angles = ansatz.expand_reduced(ReducedXYAngles(1.0, np.full(7, math.pi / 2)))
        expected = 2 * math.atan(math.exp(-1))
        self.assertAlmostEqual(angles.thetas[11], expected, places=15)
        self.assertAlmostEqual(angles.thetas[14], expected, places=15)
        self.assertAlmostEqual(expected, 0.705028, places=6)

    def test_pinned_and_tied_angles(self):
        free = np.array([0.1, 2.0, 0.3, 0.4, 0.5, 0.6, 0.7])
        angles = ansatz.expand_reduced(ReducedXYAngles(2.0, free))
        np.testing.assert_allclose(angles.thetas[[8, 9, 12, 13]], math.pi / 2)
        np.testing.assert_allclose(angles.thetas[[0, 1, 2, 3, 5, 6, 7]], free)
        self.assertEqual(angles.thetas[10], angles.thetas[7])

    def test_theta4_at_quarter_turns(self):
        angles = ansatz.expand_reduced(ReducedXYAngles(1.0, np.full(7, math.pi / 2)))
        self.assertAlmostEqual(angles.thetas[4], math.pi / 2, places=14)

    def test_theta4_outside_domain(self):
        free = np.full(7, math.pi / 2)
        free[1], free[3] = 0.2, math.pi
        with self.assertRaises(DomainError):
            ansatz.expand_reduced(ReducedXYAngles(1.0, free))
        clipped = ansatz.expand_reduced(ReducedXYAngles(1.0, free), clip=True)
        self.assertEqual(clipped.thetas[4], 0.0)

    def test_theta4_at_zero_theta1(self):
        free = np.full(7, math.pi / 2)
        free[1] = 0.0
        with self.assertRaises(DomainError):
            ansatz.expand_reduced(ReducedXYAngles(1.0, free))
        self.assertTrue(math.isfinite(ansatz.expand_reduced(ReducedXYAngles(1.0, free), clip=True).thetas[4]))

    def test_seven_free_angles(self):
        with self.assertRaises(GateError):
            ReducedXYAngles(1.0, np.zeros(8))

    def test_identities_on_grid(self):
        """The eight identities hold for the exact distribution across the phase diagram."""
        for gamma in (0.0, 0.5, 1.0):
            for h in (0.5, 1.0, 1.5):
                for beta in (0.2, 1.0, 5.0):
                    report = ansatz.fit_check_reduced(ModelParams(4, gamma, h), beta)
                    self.assertLess(report.max_residual, 1e-9, (gamma, h, beta, report.residuals))
                    self.assertTrue(all(report.holds(1e-9).values()))
                    self.assertIsNotNone(report.reduced, (gamma, h, beta))
                    self.assertLess(report.reconstruction_error, 1e-9, (gamma, h, beta))

    def test_named_points(self):
        for gamma, h, beta in ((0.5, 0.5, 1.0), (1.0, 1.0, 0.2)):
            report = ansatz.fit_check_reduced(ModelParams(4, gamma, h), beta)
            self.assertEqual(len(report.residuals), 8)
            self.assertLess(report.max_residual, 1e-9)

    def test_infinite_temperature(self):
        report = ansatz.fit_check_reduced(ModelParams(4, 0.3, 0.8), 0.0)
        np.testing.assert_allclose(report.angles.thetas, math.pi / 2, atol=1e-15)
        self.assertLess(report.max_residual, 1e-12)

    def test_exact_distribution_is_contained(self):
        params, beta = ModelParams(4, 1.0, 0.5), 1.0
        report = ansatz.fit_check_reduced(params, beta)
        self.assertIsNotNone(report.reduced)
        self.assertLess(report.reconstruction_error, 1e-12)
        expanded = ansatz.expand_reduced(report.reduced)
        np.testing.assert_allclose(
            ansatz.gr_distribution(expanded), exactsolver.boltzmann_distribution(params, beta), atol=1e-12,
        )

    def test_other_chain_lengths_rejected(self):
        with self.assertRaises(InvalidModelError):
            ansatz.fit_check_reduced(ModelParams(6, 0.5, 0.5), 1.0)
        with self.assertRaises(InvalidModelError):
            ansatz.reduce_angles(GRAngles(3, np.zeros(7)), 1.0)


class ParityPreservingGateTestCase(SimpleTestCase):

    def test_zero_angles(self):
        np.testing.assert_array_equal(ansatz.rp_matrix(0.0, 0.0), np.eye(4))

    def test_pi_pi(self):
        matrix = ansatz.rp_matrix(math.pi, math.pi)
        np.testing.assert_allclose(matrix[np.ix_([0, 3], [0, 3])], [[-1, 0], [0, -1]], atol=1e-15)
        np.testing.assert_allclose(matrix[np.ix_([1, 2], [1, 2])], np.eye(2), atol=1e-15)

    @given(
        phi_i=st.floats(min_value=-10, max_value=10),
        phi_j=st.floats(min_value=-10, max_value=10),
    )
    def test_orthogonal_and_block_diagonal(self, phi_i, phi_j):
        matrix = ansatz.rp_matrix(phi_i, phi_j)
        np.testing.assert_allclose(matrix.T @ matrix, np.eye(4), atol=1e-14)
        image = matrix @ np.array([0.0, 1.0, 0.0, 0.0])
        self.assertEqual(image[0], 0.0)
        self.assertEqual(image[3], 0.0)


class BrickwallTestCase(SimpleTestCase):

    def test_pairs(self):
        self.assertEqual(ansatz.brickwall_pairs(4), [(0, 1), (2, 3), (1, 2), (3, 0)])
        self.assertEqual(ansatz.brickwall_pairs(2), [(0, 1), (1, 0)])
        self.assertEqual(len(ansatz.brickwall_pairs(8)), 8)

    def test_parameter_counts(self):
        self.assertEqual(ansatz.brickwall_parameter_count(4, 1), 8)
        self.assertEqual(ansatz.brickwall_parameter_count(4, 3), 24)
        circuit = ansatz.brickwall_circuit(BrickwallParams(4, 1, np.arange(8.0)))
        self.assertEqual([gate.targets for gate in circuit], [(0, 1), (2, 3), (1, 2), (3, 0)])
        self.assertEqual([gate.param_index for gate in circuit], [0, 2, 4, 6])

    def test_zero_parameters_are_identity(self):
        rng = np.random.default_rng(6)
        psi = rng.normal(size=16)
        state = Statevector(4, psi / np.linalg.norm(psi))
        before = state.amplitudes.copy()
        simulator.run_circuit(state, ansatz.brickwall_circuit(BrickwallParams(4, 3, np.zeros(24))))
        np.testing.assert_allclose(state.amplitudes, before, atol=1e-15)

    def test_parameter_validation(self):
        with self.assertRaises(GateError):
            BrickwallParams(3, 1, np.zeros(6))
        with self.assertRaises(GateError):
            BrickwallParams(4, 0, np.zeros(0))
        with self.assertRaises(GateError):
            BrickwallParams(4, 2, np.zeros(8))

    @given(seed=st.integers(min_value=0, max_value=2 ** 16), layers=st.integers(min_value=1, max_value=3))
    def test_parity_preserved(self, seed, layers):
        rng = np.random.default_rng(seed)
        n = 4
        even = even_parity_mask(n)
        circuit = ansatz.brickwall_circuit(BrickwallParams(n, layers, rng.uniform(-math.pi, math.pi, 2 * n * layers)))
        for mask in (even, ~even):
            psi = np.where(mask, rng.normal(size=1 << n), 0.0)
            state = simulator.run_circuit(Statevector(n, psi / np.linalg.norm(psi)), circuit)
            self.assertLess(np.linalg.norm(state.amplitudes[~mask]), 1e-12)
            self.assertAlmostEqual(np.linalg.norm(state.amplitudes), 1.0, places=12)


class DiagramTestCase(SimpleTestCase):

    def test_grover_rudolph_golden(self):
        diagram = ansatz.circuit_diagram(ansatz.gr_circuit(GRAngles(2, [0.1, 0.2, 0.3])))
        self.assertEqual(diagram.splitlines(), [
            '   0  ry' + ' ' * 16 + '[-] -> q0  theta[0]',
            '   1  controlled_ry' + ' ' * 5 + '[q0=0] -> q1  theta[1]',
            '   2  controlled_ry' + ' ' * 5 + '[q0=1] -> q1  theta[2]',
        ])

    def test_brickwall_golden(self):
        diagram = ansatz.circuit_diagram(ansatz.brickwall_circuit(BrickwallParams(2, 1, np.zeros(4))))
        self.assertEqual(diagram.splitlines(), [
            '   0  two_qubit_matrix  [-] -> q0,q1  phi[0],phi[1]',
            '   1  two_qubit_matrix  [-] -> q1,q0  phi[2],phi[3]',
        ])

    def test_three_controls(self):
        lines = ansatz.circuit_diagram(ansatz.gr_circuit(GRAngles(4, np.zeros(15)))).splitlines()
        self.assertEqual(len(lines), 15)
        self.assertIn('[q0=0 q1=1 q2=0] -> q3  theta[9]', lines[9])
