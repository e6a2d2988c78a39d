import math
import os
from unittest import mock

import numpy as np
from django.test import SimpleTestCase, override_settings
from hypothesis import given, strategies as st

from xy_gibbs.exceptions import (
    DomainError, InvalidModelError, ResourceLimitError, UnsupportedSectorError,
)
from xy_gibbs.models import ModelParams, Parity
from xy_gibbs.utils import exactsolver


def closed_form_levels(gamma, h):
    """The sixteen N = 4 eigenenergies written out by hand, positive then negative sector."""
    a = math.sqrt(h * h - math.sqrt(2) * h + (1 + gamma * gamma) / 2)
    b = math.sqrt(h * h + math.sqrt(2) * h + (1 + gamma * gamma) / 2)
    c = math.sqrt(gamma * gamma + h * h)
    positive = [-a - b, a - b, 0.0, 0.0, 0.0, 0.0, b - a, a + b]
    negative = [-1 - c, 1 - c, -h, -h, h, h, -1 + c, 1 + c]
    return positive, negative


class MomentaTestCase(SimpleTestCase):

    def test_positive_sector_n4(self):
        """Antiperiodic momenta for N = 4."""
        ks = exactsolver.momenta(Parity.POSITIVE, 4).momenta
        np.testing.assert_allclose(ks, [-3 * math.pi / 4, -math.pi / 4, math.pi / 4, 3 * math.pi / 4], atol=1e-15)

    def test_negative_sector_n4(self):
        """Periodic momenta for N = 4 contain 0 and pi."""
        ks = exactsolver.momenta(Parity.NEGATIVE, 4).momenta
        np.testing.assert_allclose(ks, [-math.pi / 2, 0.0, math.pi / 2, math.pi], atol=1e-15)
        self.assertEqual(ks[1], 0.0)
        self.assertEqual(ks[3], math.pi)

    def test_positive_sector_n2(self):
        ks = exactsolver.momenta('positive', 2).momenta
        np.testing.assert_allclose(ks, [-math.pi / 2, math.pi / 2], atol=1e-15)

    def test_positive_sector_is_symmetric_and_avoids_zero_and_pi(self):
        for n in (2, 4, 6, 8, 10):
            ks = exactsolver.momenta(Parity.POSITIVE, n).momenta
            self.assertEqual(sorted(ks), sorted(-k for k in ks))
            self.assertFalse(any(exactsolver.is_unpaired(k) for k in ks))

    def test_odd_or_small_chain_rejected(self):
        for n in (3, 0, -2, 1):
            with self.assertRaises(InvalidModelError):
                exactsolver.momenta(Parity.POSITIVE, n)

    def test_canonical_order_puts_unpaired_modes_first(self):
        order = exactsolver.canonical_mode_order(exactsolver.momenta(Parity.NEGATIVE, 4))
        np.testing.assert_allclose(order, [0.0, math.pi, -math.pi / 2, math.pi / 2], atol=1e-15)


class SingleParticleEnergyTestCase(SimpleTestCase):

    def test_gapless_point(self):
        self.assertAlmostEqual(exactsolver.single_particle_energy(0.0, ModelParams(4, 0.3, 1.0)), 0.0, places=15)

    def test_isotropic_zero_field(self):
        self.assertAlmostEqual(exactsolver.single_particle_energy(math.pi / 2, ModelParams(4, 1.0, 0.0)), 1.0, places=15)

    def test_generic_point(self):
        """Checked against the dispersion written out independently."""
        expected = math.sqrt((0.5 - math.sqrt(2) / 2) ** 2 + 0.25 * 0.5)
        value = exactsolver.single_particle_energy(math.pi / 4, ModelParams(4, 0.5, 0.5))
        self.assertAlmostEqual(value, expected, places=14)
        self.assertAlmostEqual(value, 0.409748, places=6)

    @given(
        k=st.floats(min_value=-math.pi, max_value=math.pi),
        gamma=st.floats(min_value=-2, max_value=2),
        h=st.floats(min_value=-3, max_value=3),
    )
    def test_even_in_k_and_non_negative(self, k, gamma, h):
        params = ModelParams(2, gamma, h)
        value = exactsolver.single_particle_energy(k, params)
        self.assertEqual(value, exactsolver.single_particle_energy(-k, params))
        self.assertGreaterEqual(value, 0.0)


class SectorSpectrumTestCase(SimpleTestCase):

    def test_ground_energies_isotropic_zero_field(self):
        params = ModelParams(4, 1.0, 0.0)
        self.assertAlmostEqual(exactsolver.sector_spectrum(Parity.NEGATIVE, params).ground_energy, -2.0, places=12)
        self.assertAlmostEqual(exactsolver.sector_spectrum(Parity.POSITIVE, params).ground_energy, -2.0, places=12)

    def test_four_zero_levels_in_positive_sector(self):
        for gamma, h in ((0.3, 0.7), (1.0, 1.5), (0.0, 0.2)):
            energies = exactsolver.sector_spectrum(Parity.POSITIVE, ModelParams(4, gamma, h)).energies
            np.testing.assert_allclose(energies[2:6], 0.0, atol=1e-12)

    def test_levels_match_closed_forms_in_order(self):
        """Enumeration order is the basis assignment used by the ancilla ansatz."""
        for gamma, h in ((0.5, 0.5), (1.0, 1.0), (0.2, 1.7), (0.0, 0.4)):
            params = ModelParams(4, gamma, h)
            positive, negative = closed_form_levels(gamma, h)
            np.testing.assert_allclose(exactsolver.sector_spectrum(Parity.POSITIVE, params).energies, positive, atol=1e-12)
            np.testing.assert_allclose(exactsolver.sector_spectrum(Parity.NEGATIVE, params).energies, negative, atol=1e-12)

    def test_level_structure(self):
        for n in (2, 4, 6):
            for parity in Parity.values:
                spectrum = exactsolver.sector_spectrum(parity, ModelParams(n, 0.6, 0.8))
                self.assertEqual(len(spectrum.levels), 2 ** (n - 1))
                self.assertTrue(all(level.n_excited % 2 == 0 for level in spectrum.levels))
                self.assertEqual(spectrum.ground_energy, min(spectrum.energies))

    def test_occupation_mask_indexes_sorted_momenta(self):
        spectrum = exactsolver.sector_spectrum(Parity.NEGATIVE, ModelParams(4, 0.5, 0.5))
        ks = spectrum.momenta.momenta
        for level in spectrum.levels:
            from_mask = tuple(k for i, k in enumerate(ks) if level.occupation_mask >> i & 1)
            self.assertEqual(from_mask, level.occupied_modes)

    @override_settings(XY_GIBBS={'analytic_site_cap': 6})
    def test_analytic_cap(self):
        with self.assertRaises(ResourceLimitError):
            exactsolver.sector_spectrum(Parity.POSITIVE, ModelParams(8, 0.5, 0.5))


class DenseHamiltonianTestCase(SimpleTestCase):

    def test_two_site_xx_model(self):
        """-1/2 (XX + YY) on two sites (the periodic bond counts twice)."""
        eigenvalues, _ = exactsolver.dense_spectrum(ModelParams(2, 0.0, 0.0))
        np.testing.assert_allclose(eigenvalues, [-1.0, 0.0, 0.0, 1.0], atol=1e-12)

    def test_isotropic_ground_energy(self):
        eigenvalues, _ = exactsolver.dense_spectrum(ModelParams(4, 1.0, 0.0))
        self.assertAlmostEqual(eigenvalues[0], -2.0, places=10)

    def test_real_symmetric_and_traceless(self):
        for params in (ModelParams(4, 0.3, 1.2), ModelParams(6, 1.0, 0.5)):
            hamiltonian = exactsolver.build_dense_hamiltonian(params)
            self.assertTrue(np.isrealobj(hamiltonian))
            np.testing.assert_array_equal(hamiltonian, hamiltonian.T)
            self.assertAlmostEqual(np.trace(hamiltonian), 0.0, places=10)

    def test_eigenvectors_orthonormal(self):
        _, vectors = exactsolver.dense_spectrum(ModelParams(4, 0.7, 0.3))
        np.testing.assert_allclose(vectors.T @ vectors, np.eye(16), atol=1e-10)

    def test_commutes_with_parity(self):
        n = 6
        hamiltonian = exactsolver.build_dense_hamiltonian(ModelParams(n, 0.4, 0.9))
        signs = np.array([1.0 if exactsolver.parity_of_basis_state(i, n) == Parity.POSITIVE else -1.0
                          for i in range(2 ** n)])
        parity = np.diag(signs)
        np.testing.assert_allclose(hamiltonian @ parity, parity @ hamiltonian, atol=1e-14)

    @override_settings(XY_GIBBS={'dense_site_cap': 4})
    def test_dense_cap_from_settings(self):
        with self.assertRaises(ResourceLimitError):
            exactsolver.build_dense_hamiltonian(ModelParams(6, 0.5, 0.5))

    def test_dense_cap_from_environment(self):
        with mock.patch.dict(os.environ, {'XY_GIBBS_DENSE_SITE_CAP': '2'}):
            with self.assertRaises(ResourceLimitError):
                exactsolver.build_dense_hamiltonian(ModelParams(4, 0.5, 0.5))


class SpectrumOracleTestCase(SimpleTestCase):

    def test_analytic_union_matches_dense(self):
        for n in (2, 4, 6, 8):
            for gamma in (0.0, 0.5, 1.0):
                for h in (0.0, 0.5, 1.0, 1.5):
                    with self.subTest(n=n, gamma=gamma, h=h):
                        self.assertLess(exactsolver.spectrum_residual(ModelParams(n, gamma, h)), 1e-9)

    def test_sector_blocks_match_dense_blocks(self):
        params = ModelParams(6, 0.35, 0.8)
        for parity in Parity.values:
            analytic = np.sort(exactsolver.sector_spectrum(parity, params).energies)
            np.testing.assert_allclose(analytic, exactsolver.dense_sector_spectrum(params, parity), atol=1e-9)

    def test_closed_forms_are_dense_eigenvalues(self):
        rng = np.random.default_rng(4)
        for gamma, h in rng.uniform([0.0, 0.0], [1.0, 2.0], size=(5, 2)):
            dense, _ = exactsolver.dense_spectrum(ModelParams(4, gamma, h))
            positive, negative = closed_form_levels(gamma, h)
            for value in positive + negative:
                self.assertLess(np.min(np.abs(dense - value)), 1e-10)
            np.testing.assert_allclose(np.sort(positive + negative), dense, atol=1e-10)


class GibbsTargetTestCase(SimpleTestCase):

    def test_infinite_temperature(self):
        target = exactsolver.gibbs_target(ModelParams(4, 0.5, 1.0), 0.0)
        np.testing.assert_allclose(target.probabilities, 1 / 16, atol=1e-15)
        np.testing.assert_allclose(target.density_matrix.matrix, np.eye(16) / 16, atol=1e-12)
        self.assertAlmostEqual(target.partition_function, 16.0, places=10)

    def test_low_temperature_approaches_ground_projector(self):
        params = ModelParams(4, 1.0, 0.5)
        beta = 2000.0
        energies, vectors = exactsolver.dense_spectrum(params)
        ground = np.abs(energies - energies[0]) < 1e-8
        projector = vectors[:, ground] @ vectors[:, ground].T / ground.sum()
        gap = energies[~ground][0] - energies[0]
        target = exactsolver.gibbs_target(params, beta)
        bound = 16 * math.exp(-beta * gap) + 1e-10
        self.assertLess(np.max(np.abs(target.density_matrix.matrix - projector)), bound)

    def test_probabilities_are_boltzmann_weights(self):
        params = ModelParams(4, 0.5, 1.0)
        target = exactsolver.gibbs_target(params, 1.0)
        energies, _ = exactsolver.dense_spectrum(params)
        weights = np.exp(-energies)
        np.testing.assert_allclose(target.probabilities, weights / weights.sum(), rtol=0, atol=1e-12)

    def test_density_matrix_invariants(self):
        target = exactsolver.gibbs_target(ModelParams(6, 0.8, 0.6), 2.0)
        rho = target.density_matrix.matrix
        self.assertAlmostEqual(np.trace(rho), 1.0, places=12)
        np.testing.assert_allclose(rho, rho.T, atol=1e-14)
        eigenvalues = np.linalg.eigvalsh(rho)
        self.assertGreaterEqual(eigenvalues.min(), -1e-12)
        np.testing.assert_allclose(np.sort(eigenvalues), np.sort(target.probabilities), atol=1e-10)
        self.assertAlmostEqual(target.probabilities.sum(), 1.0, places=12)

    def test_free_energy_identity(self):
        for beta in (0.2, 1.0, 5.0):
            params = ModelParams(4, 0.5, 0.5)
            target = exactsolver.gibbs_target(params, beta)
            hamiltonian = exactsolver.build_dense_hamiltonian(params)
            energy = np.trace(hamiltonian @ target.density_matrix.matrix)
            self.assertAlmostEqual(energy - target.entropy / beta, target.free_energy, delta=1e-10)
            self.assertAlmostEqual(target.free_energy, -math.log(target.partition_function) / beta, delta=1e-10)

    def test_large_beta_stays_finite(self):
        target = exactsolver.gibbs_target(ModelParams(4, 0.5, 1.5), 500.0)
        self.assertTrue(np.all(np.isfinite(target.probabilities)))
        self.assertTrue(math.isfinite(target.free_energy))

    def test_partition_function_overflows_while_log_stays_finite(self):
        # Ground energy -1 for N = 2, gamma = h = 0.5, so log Z is about beta.
        target = exactsolver.gibbs_target(ModelParams(2, 0.5, 0.5), 1000.0)
        self.assertAlmostEqual(target.log_partition_function, 1000.0, places=8)
        self.assertEqual(target.partition_function, float('inf'))
        self.assertAlmostEqual(target.free_energy, -1.0, places=10)

    def test_negative_beta_rejected(self):
        with self.assertRaises(DomainError):
            exactsolver.gibbs_target(ModelParams(4, 0.5, 0.5), -1.0)

    def test_boltzmann_distribution_layout(self):
        params = ModelParams(4, 0.5, 0.5)
        p = exactsolver.boltzmann_distribution(params, 1.0)
        positive, negative = closed_form_levels(0.5, 0.5)
        weights = np.exp(-np.array(positive + negative))
        np.testing.assert_allclose(p, weights / weights.sum(), atol=1e-14)


class DegeneracyTestCase(SimpleTestCase):

    def test_two_fermions_in_four_sites(self):
        self.assertEqual(exactsolver.degeneracy_profile(4, 2).counts, {1: 2, 4: 1})

    def test_four_fermions_in_eight_sites(self):
        profile = exactsolver.degeneracy_profile(8, 4)
        self.assertEqual(profile.counts, {1: 6, 4: 12, 16: 1})
        self.assertEqual(profile.total_levels, 70)

    def test_vacuum_is_non_degenerate(self):
        for n in (2, 4, 8, 12):
            self.assertEqual(exactsolver.degeneracy_profile(n, 0).counts, {1: 1})

    def test_sum_rule(self):
        for n_sites in range(2, 13, 2):
            for n_fermions in range(0, n_sites + 1, 2):
                profile = exactsolver.degeneracy_profile(n_sites, n_fermions)
                self.assertEqual(profile.total_levels, math.comb(n_sites, n_fermions))
                for degree in profile.counts:
                    self.assertEqual(4 ** round(math.log(degree, 4)), degree)
                    self.assertLessEqual(degree, math.comb(n_sites, n_fermions))

    def test_odd_fermion_number_rejected(self):
        with self.assertRaises(UnsupportedSectorError):
            exactsolver.degeneracy_profile(4, 1)

    def test_dense_grouping_matches_profiles(self):
        for n in (4, 6):
            params = ModelParams(n, 0.73, 0.41)
            energies = exactsolver.dense_sector_spectrum(params, Parity.POSITIVE)
            self.assertEqual(
                exactsolver.group_degenerate_levels(energies, 1e-8),
                exactsolver.sector_degeneracy_histogram(n),
            )


class ModelParamsTestCase(SimpleTestCase):

    def test_out_of_range_gamma_is_flagged(self):
        with self.assertLogs('xy_gibbs.models', level='WARNING'):
            params = ModelParams(4, 1.5, 0.5)
        self.assertTrue(params.gamma_out_of_range)

    def test_invalid_sites(self):
        for n in (3, 0, 2.0, True):
            with self.assertRaises(InvalidModelError):
                ModelParams(n, 0.5, 0.5)
