# xy_gibbs/utils/vqa.py
"""
Variational Gibbs-state preparation.

The 2N-qubit register starts in |0...0>. U_A (Grover-Rudolph blocks) loads a
distribution on the ancillas 0..N-1, CNOT(i, N+i) copies it onto the system,
and U_S (brick-wall of R_P gates) rotates the system basis. The reduced
system state is then sum_i p_i U_S|i><i|U_S^dagger and the objective is the
free energy F = Tr(H rho_S) - S(p) / beta.
"""
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from typing import List

import numpy as np
from scipy.optimize import minimize

from xy_gibbs.exceptions import DomainError, GateError, OptimizationFailedError, XYGibbsError
from xy_gibbs.models import (
    REDUCED_FREE_INDICES, AncillaMode, BrickwallParams, Circuit, EvaluationReport, GRAngles,
    OptimizerKind, ReducedXYAngles, RestartRecord, Statevector, VqaConfig, VqaResult,
)
from xy_gibbs.utils import ansatz, exactsolver, simulator

logger = logging.getLogger('xy_gibbs.vqa')

# Attempts at drawing reduced angles inside the arccos domain before
# falling back to the clipped expansion.
MAX_RESAMPLES = 1000

# Simplex size (in radians) below which direct search stops.
DIRECT_SEARCH_XATOL = 1e-8


def ancilla_parameter_count(config: VqaConfig) -> int:
    if config.ancilla_mode == AncillaMode.REDUCED_XY:
        per_block = len(REDUCED_FREE_INDICES)
    else:
        per_block = ansatz.gr_parameter_count(config.n_sites)
    return per_block * config.ancilla_layers


def system_parameter_count(config: VqaConfig) -> int:
    return ansatz.brickwall_parameter_count(config.n_sites, config.system_layers)


def ancilla_qubits(n_sites: int) -> List[int]:
    return list(range(n_sites))


def system_qubits(n_sites: int) -> List[int]:
    return list(range(n_sites, 2 * n_sites))


class GibbsVqa:
    """
    Free-energy minimisation for one VqaConfig. Holds the dense Hamiltonian
    and the exact Gibbs target so repeated evaluations only simulate.
    """

    def __init__(self, config: VqaConfig):
        self.config = config
        self.logger = logger
        self.n_sites = config.n_sites
        self.hamiltonian = exactsolver.build_dense_hamiltonian(config.model)
        self.target = exactsolver.gibbs_target(config.model, config.beta)
        self.n_thetas = ancilla_parameter_count(config)
        self.n_phis = system_parameter_count(config)

    # -- circuit -----------------------------------------------------------

    def _check_sizes(self, thetas, phis):
        thetas = np.asarray(thetas, dtype=float).reshape(-1)
        phis = np.asarray(phis, dtype=float).reshape(-1)
        if thetas.size != self.n_thetas:
            raise GateError(f"expected {self.n_thetas} ancilla angles, got {thetas.size}")
        if phis.size != self.n_phis:
            raise GateError(f"expected {self.n_phis} system angles, got {phis.size}")
        return thetas, phis

    def ancilla_angles(self, thetas: np.ndarray, clip: bool = False) -> List[GRAngles]:
        """Full GR angle vectors, one per ancilla block."""
        blocks = np.split(thetas, self.config.ancilla_layers)
        if self.config.ancilla_mode == AncillaMode.REDUCED_XY:
            return [
                ansatz.expand_reduced(ReducedXYAngles(beta=self.config.beta, free=block), clip=clip)
                for block in blocks
            ]
        return [GRAngles(n_qubits=self.n_sites, thetas=block) for block in blocks]

    def circuit(self, thetas, phis, clip: bool = False) -> Circuit:
        thetas, phis = self._check_sizes(thetas, phis)
        n = self.n_sites
        gates = []
        for angles in self.ancilla_angles(thetas, clip=clip):
            gates.extend(ansatz.gr_circuit(angles).gates)
        gates.extend(
            ansatz.cnot_gate(ancilla, n + ancilla) for ancilla in range(n)
        )
        system = ansatz.brickwall_circuit(
            BrickwallParams(n_qubits=n, n_layers=self.config.system_layers, phis=phis),
            qubit_offset=n,
        )
        gates.extend(system.gates)
        return Circuit(n_qubits=2 * n, gates=tuple(gates))

    def prepare(self, thetas, phis, clip: bool = False) -> Statevector:
        state = simulator.zero_state(2 * self.n_sites)
        return simulator.run_circuit(state, self.circuit(thetas, phis, clip=clip), validate=False)

    # -- objective ---------------------------------------------------------

    def _terms(self, state):
        rho_system = simulator.partial_trace(state, system_qubits(self.n_sites))
        energy = float(np.real(np.trace(self.hamiltonian @ rho_system.matrix)))
        probabilities = simulator.measurement_distribution(state, ancilla_qubits(self.n_sites))
        entropy = simulator.von_neumann_entropy(probabilities)
        return rho_system, energy, entropy, probabilities

    def free_energy(self, thetas, phis, clip: bool = False) -> float:
        _, energy, entropy, _ = self._terms(self.prepare(thetas, phis, clip=clip))
        return energy - entropy / self.config.beta

    def evaluate(self, thetas, phis, clip: bool = False) -> EvaluationReport:
        rho_system, energy, entropy, probabilities = self._terms(self.prepare(thetas, phis, clip=clip))
        gibbs = self.target.density_matrix
        return EvaluationReport(
            density_matrix=rho_system,
            fidelity=simulator.uhlmann_fidelity(rho_system, gibbs),
            free_energy=energy - entropy / self.config.beta,
            entropy=entropy,
            energy=energy,
            trace_distance=simulator.trace_distance(rho_system, gibbs),
            relative_entropy=simulator.relative_entropy(rho_system, gibbs),
            ancilla_probabilities=probabilities,
        )

    # -- optimisation ------------------------------------------------------

    def _objective(self, x):
        return self.free_energy(x[:self.n_thetas], x[self.n_thetas:], clip=True)

    def _gradient(self, x):
        step = self.config.gradient_step
        gradient = np.empty_like(x)
        shifted = x.copy()
        for i in range(x.size):
            shifted[i] = x[i] + step
            forward = self._objective(shifted)
            shifted[i] = x[i] - step
            backward = self._objective(shifted)
            shifted[i] = x[i]
            gradient[i] = (forward - backward) / (2.0 * step)
        return gradient

    def initial_point(self, rng: np.random.Generator) -> np.ndarray:
        """
        Uniform draw: [0, 2 pi) for phi and full GR angles; (0, pi) for the
        reduced free angles, redrawn until the theta_4 expansion is defined.
        """
        phis = rng.uniform(0.0, 2.0 * np.pi, self.n_phis)
        if self.config.ancilla_mode != AncillaMode.REDUCED_XY:
            return np.concatenate([rng.uniform(0.0, 2.0 * np.pi, self.n_thetas), phis])

        blocks = []
        for _ in range(self.config.ancilla_layers):
            for _ in range(MAX_RESAMPLES):
                free = rng.uniform(0.0, np.pi, len(REDUCED_FREE_INDICES))
                try:
                    ansatz.expand_reduced(ReducedXYAngles(beta=self.config.beta, free=free))
                    break
                except DomainError:
                    continue
            else:
                self.logger.warning("no in-domain reduced angles found; using the clipped expansion")
            blocks.append(free)
        return np.concatenate(blocks + [phis])

    def run_restart(self, index: int) -> RestartRecord:
        rng = np.random.default_rng([self.config.seed, index])
        x0 = self.initial_point(rng)
        previous = {'fun': None, 'stalled': False}
        tolerance = self.config.energy_tolerance

        def callback(intermediate_result):
            fun = intermediate_result.fun
            if previous['fun'] is not None and abs(previous['fun'] - fun) < tolerance:
                previous['stalled'] = True
                raise StopIteration
            previous['fun'] = fun

        try:
            if self.config.optimizer == OptimizerKind.QUASI_NEWTON:
                result = minimize(
                    self._objective, x0, jac=self._gradient, method='BFGS', callback=callback,
                    options={
                        'gtol': self.config.gradient_tolerance,
                        'norm': np.inf,
                        'maxiter': self.config.max_iterations,
                    },
                )
            else:
                # The best vertex often survives a simplex step unchanged, so
                # convergence is left to the simplex spread tests.
                result = minimize(
                    self._objective, x0, method='Nelder-Mead',
                    options={
                        'maxiter': self.config.max_iterations,
                        'maxfev': 200 * self.config.max_iterations,
                        'fatol': tolerance,
                        'xatol': DIRECT_SEARCH_XATOL,
                    },
                )
        except (XYGibbsError, FloatingPointError, np.linalg.LinAlgError) as e:
            self.logger.warning(f"restart {index} diverged: {e}")
            return RestartRecord(
                index=index, free_energy=float('inf'), fidelity=0.0, iterations=0,
                converged=False, diverged=True, message=str(e), thetas=x0[:self.n_thetas],
                phis=x0[self.n_thetas:],
            )

        thetas, phis = result.x[:self.n_thetas], result.x[self.n_thetas:]
        if not np.isfinite(result.fun):
            self.logger.warning(f"restart {index} diverged: non-finite free energy")
            return RestartRecord(
                index=index, free_energy=float('inf'), fidelity=0.0, iterations=int(result.nit),
                converged=False, diverged=True, message='non-finite free energy',
                thetas=thetas, phis=phis,
            )

        report = self.evaluate(thetas, phis, clip=True)
        converged = bool(result.success or previous['stalled'])
        message = 'free energy change below tolerance' if previous['stalled'] else str(result.message)
        self.logger.info(
            f"restart {index}: F = {report.free_energy:.10f}, fidelity = {report.fidelity:.6f}, "
            f"{result.nit} iterations, converged = {converged}"
        )
        return RestartRecord(
            index=index,
            free_energy=report.free_energy,
            fidelity=report.fidelity,
            iterations=int(result.nit),
            converged=converged,
            diverged=False,
            message=message,
            thetas=thetas,
            phis=phis,
        )

    def optimize(self, jobs: int = 1) -> VqaResult:
        started = time.perf_counter()
        indices = range(self.config.restarts)
        if jobs > 1 and self.config.restarts > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                records = list(pool.map(_run_restart, [self.config] * len(indices), indices))
        else:
            records = [self.run_restart(index) for index in indices]

        finished = [record for record in records if not record.diverged]
        if not finished:
            raise OptimizationFailedError(
                f"all {len(records)} restarts diverged", restart_log=records,
            )

        best = min(finished, key=lambda record: (record.free_energy, record.index))
        closest = max(finished, key=lambda record: (record.fidelity, -record.index))
        report = self.evaluate(best.thetas, best.phis, clip=True)
        self.logger.info(
            f"best of {len(records)} restarts: F = {best.free_energy:.10f} (exact {self.target.free_energy:.10f}), "
            f"max fidelity {closest.fidelity:.6f} at restart {closest.index}"
        )
        return VqaResult(
            config=self.config,
            best_free_energy=best.free_energy,
            exact_free_energy=self.target.free_energy,
            fidelity=best.fidelity,
            optimal_thetas=best.thetas,
            optimal_phis=best.phis,
            prepared_state=report.density_matrix,
            per_restart_log=tuple(records),
            best_restart=best.index,
            max_fidelity=closest.fidelity,
            max_fidelity_restart=closest.index,
            wall_time=time.perf_counter() - started,
        )


def _run_restart(config: VqaConfig, index: int) -> RestartRecord:
    return GibbsVqa(config).run_restart(index)


def compose_pqc(thetas, phis, config: VqaConfig) -> Statevector:
    return GibbsVqa(config).prepare(thetas, phis)


def free_energy(thetas, phis, config: VqaConfig) -> float:
    return GibbsVqa(config).free_energy(thetas, phis)


def evaluate(thetas, phis, config: VqaConfig) -> EvaluationReport:
    return GibbsVqa(config).evaluate(thetas, phis)


def optimize(config: VqaConfig, jobs: int = 1) -> VqaResult:
    return GibbsVqa(config).optimize(jobs=jobs)
