"""
Domain types for the XY chain, its Gibbs states and the variational circuits.

Nothing here is persisted: the app has no database, so the "models" are
frozen dataclasses plus the choice enumerations the serializers and the
management commands share.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from django.db import models

from xy_gibbs.config import vqa_defaults
from xy_gibbs.exceptions import DomainError, GateError, InvalidModelError

logger = logging.getLogger('xy_gibbs.models')


class Parity(models.TextChoices):
    POSITIVE = 'positive', 'Positive (antiperiodic fermions)'
    NEGATIVE = 'negative', 'Negative (periodic fermions)'


class AncillaMode(models.TextChoices):
    FULL_GR = 'full_gr', 'Full Grover-Rudolph'
    REDUCED_XY = 'reduced_xy', 'Symmetry-reduced XY (N=4)'


class OptimizerKind(models.TextChoices):
    QUASI_NEWTON = 'quasi-newton', 'BFGS with finite differences'
    DIRECT_SEARCH = 'direct-search', 'Nelder-Mead simplex'


class SelectionRule(models.TextChoices):
    FIDELITY = 'fidelity', 'Maximal fidelity restart'
    FREE_ENERGY = 'free-energy', 'Minimal free-energy restart'


class GateKind(models.TextChoices):
    RY = 'ry', 'Ry'
    CONTROLLED_RY = 'controlled_ry', 'Controlled Ry'
    CNOT = 'cnot', 'CNOT'
    TWO_QUBIT_MATRIX = 'two_qubit_matrix', 'Two-qubit matrix'


class ControlPolarity(models.IntegerChoices):
    ON_ZERO = 0, 'activate on |0>'
    ON_ONE = 1, 'activate on |1>'


class OutputFormat(models.TextChoices):
    TABLE = 'table', 'Table'
    JSON = 'json', 'JSON'
    CSV = 'csv', 'CSV'


# ---------------------------------------------------------------------------
# Exact solver
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModelParams:
    """
    A periodic XY chain with coupling J = 1.

    ``n_sites`` must be even and at least 2. Anisotropies outside [0, 1] are
    accepted, flagged through ``gamma_out_of_range`` and logged.
    """
    n_sites: int
    gamma: float
    field_h: float

    def __post_init__(self):
        if isinstance(self.n_sites, bool) or not isinstance(self.n_sites, (int, np.integer)):
            raise InvalidModelError(f"n_sites must be an integer, got {self.n_sites!r}")
        if self.n_sites < 2 or self.n_sites % 2:
            raise InvalidModelError(f"N must be even and >= 2, got {self.n_sites}")
        for name in ('gamma', 'field_h'):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise InvalidModelError(f"{name} must be finite, got {value!r}")
        object.__setattr__(self, 'n_sites', int(self.n_sites))
        object.__setattr__(self, 'gamma', float(self.gamma))
        object.__setattr__(self, 'field_h', float(self.field_h))
        if self.gamma_out_of_range:
            logger.warning(f"gamma={self.gamma} lies outside [0, 1]")

    @property
    def gamma_out_of_range(self):
        return not 0.0 <= self.gamma <= 1.0


@dataclass(frozen=True)
class MomentumSet:
    parity: str
    momenta: tuple

    def __len__(self):
        return len(self.momenta)

    def __iter__(self):
        return iter(self.momenta)


@dataclass(frozen=True)
class SectorLevel:
    """One many-body level: its energy and the momenta of the excited modes."""
    energy: float
    occupied_modes: tuple
    occupation_mask: int

    @property
    def n_excited(self):
        return len(self.occupied_modes)


@dataclass(frozen=True)
class SectorSpectrum:
    parity: str
    n_sites: int
    momenta: MomentumSet
    levels: tuple

    @property
    def ground_energy(self):
        return min(level.energy for level in self.levels)

    @property
    def energies(self):
        return np.array([level.energy for level in self.levels])


@dataclass(frozen=True, eq=False)
class GibbsTarget:
    """
    exp(-beta H)/Z for a dense Hamiltonian.

    ``energies`` are the ascending dense eigenvalues, ``probabilities`` the
    matching Boltzmann weights. Z is stored as its logarithm so that large
    beta stays finite.
    """
    params: ModelParams
    beta: float
    energies: np.ndarray
    probabilities: np.ndarray
    density_matrix: 'DensityMatrix'
    log_partition_function: float

    @property
    def partition_function(self):
        """Z itself; overflows to inf once log Z exceeds about 709."""
        with np.errstate(over='ignore'):
            return float(np.exp(self.log_partition_function))

    @property
    def free_energy(self):
        if self.beta == 0:
            raise DomainError("free energy is undefined at beta = 0")
        return -self.log_partition_function / self.beta

    @property
    def energy(self):
        return float(np.dot(self.probabilities, self.energies))

    @property
    def entropy(self):
        p = self.probabilities[self.probabilities > 0]
        return float(-np.sum(p * np.log(p)))


@dataclass(frozen=True)
class DegeneracyProfile:
    n_sites: int
    n_fermions: int
    counts: dict

    @property
    def total_levels(self):
        return sum(degree * count for degree, count in self.counts.items())

    @property
    def expected_total(self):
        return math.comb(self.n_sites, self.n_fermions)


# ---------------------------------------------------------------------------
# Simulator
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class Statevector:
    """
    A register of ``n_qubits`` qubits. Qubit 0 is the most significant bit
    of the basis label. Gates mutate ``amplitudes`` in place.
    """
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.ascontiguousarray(self.amplitudes, dtype=complex).reshape(-1)
        if self.amplitudes.size != 1 << self.n_qubits:
            raise GateError(
                f"{self.n_qubits} qubits need {1 << self.n_qubits} amplitudes, got {self.amplitudes.size}"
            )

    @property
    def dimension(self):
        return 1 << self.n_qubits

    def tensor(self):
        """View of the amplitudes with one axis per qubit."""
        return self.amplitudes.reshape((2,) * self.n_qubits)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    n_qubits: int
    matrix: np.ndarray

    @property
    def dimension(self):
        return 1 << self.n_qubits

    def eigenvalues(self):
        return np.linalg.eigvalsh(self.matrix)


@dataclass(frozen=True, eq=False)
class GateOp:
    """
    A single gate. ``targets`` holds one qubit, or two for the matrix gate
    (the first being the more significant). ``param_index`` records which
    entry of the owning parameter vector fed the angle, for diagrams.
    """
    kind: str
    targets: tuple
    controls: tuple = ()
    angle: Optional[float] = None
    matrix: Optional[np.ndarray] = None
    param_index: Optional[int] = None

    def qubits(self):
        return tuple(q for q, _ in self.controls) + tuple(self.targets)


@dataclass(frozen=True, eq=False)
class Circuit:
    n_qubits: int
    gates: tuple

    def __iter__(self):
        return iter(self.gates)

    def __len__(self):
        return len(self.gates)


# ---------------------------------------------------------------------------
# Ansatz
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GRAngles:
    """Grover-Rudolph angles, theta_0 at the root, level k at 2^k - 1 ... 2^(k+1) - 2."""
    n_qubits: int
    thetas: np.ndarray

    def __post_init__(self):
        thetas = np.asarray(self.thetas, dtype=float).reshape(-1)
        expected = (1 << self.n_qubits) - 1
        if self.n_qubits < 1 or thetas.size != expected:
            raise GateError(
                f"a {self.n_qubits}-qubit Grover-Rudolph circuit needs {expected} angles, got {thetas.size}"
            )
        if not np.all(np.isfinite(thetas)):
            raise DomainError("Grover-Rudolph angles must be finite")
        object.__setattr__(self, 'thetas', thetas)

    def __len__(self):
        return self.thetas.size


# Positions of the seven free parameters inside the 15-angle N=4 vector.
REDUCED_FREE_INDICES = (0, 1, 2, 3, 5, 6, 7)


@dataclass(frozen=True, eq=False)
class ReducedXYAngles:
    beta: float
    free: np.ndarray

    def __post_init__(self):
        free = np.asarray(self.free, dtype=float).reshape(-1)
        if free.size != len(REDUCED_FREE_INDICES):
            raise GateError(f"the reduced ansatz has 7 free angles, got {free.size}")
        object.__setattr__(self, 'free', free)


@dataclass(frozen=True, eq=False)
class BrickwallParams:
    n_qubits: int
    n_layers: int
    phis: np.ndarray

    def __post_init__(self):
        if self.n_qubits < 2 or self.n_qubits % 2:
            raise GateError(f"the brick-wall circuit needs an even qubit count, got {self.n_qubits}")
        if self.n_layers < 1:
            raise GateError(f"n_layers must be >= 1, got {self.n_layers}")
        phis = np.asarray(self.phis, dtype=float).reshape(-1)
        expected = 2 * self.n_qubits * self.n_layers
        if phis.size != expected:
            raise GateError(
                f"{self.n_layers} brick-wall layer(s) on {self.n_qubits} qubits take {expected} angles, got {phis.size}"
            )
        object.__setattr__(self, 'phis', phis)


@dataclass(frozen=True, eq=False)
class ReducedFitReport:
    """Residuals of the N=4 parameter identities against an exact distribution."""
    params: ModelParams
    beta: float
    angles: GRAngles
    residuals: dict
    reduced: Optional[ReducedXYAngles]
    reconstruction_error: float

    @property
    def max_residual(self):
        return max(self.residuals.values())

    def holds(self, tolerance=1e-9):
        return {name: value < tolerance for name, value in self.residuals.items()}


# ---------------------------------------------------------------------------
# VQA
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VqaConfig:
    """
    One variational run. Fields left as ``None`` take their value from
    ``vqa_defaults`` at construction time.
    """
    model: ModelParams
    beta: float
    ancilla_mode: str = AncillaMode.FULL_GR
    system_layers: Optional[int] = None
    ancilla_layers: Optional[int] = None
    restarts: Optional[int] = None
    optimizer: str = OptimizerKind.QUASI_NEWTON
    max_iterations: Optional[int] = None
    gradient_step: Optional[float] = None
    energy_tolerance: Optional[float] = None
    gradient_tolerance: Optional[float] = None
    seed: int = 0

    def __post_init__(self):
        for name, default in (
            ('system_layers', vqa_defaults.SYSTEM_LAYERS),
            ('ancilla_layers', vqa_defaults.ANCILLA_LAYERS),
            ('restarts', vqa_defaults.RESTARTS),
            ('max_iterations', vqa_defaults.MAX_ITERATIONS),
            ('gradient_step', vqa_defaults.GRADIENT_STEP),
            ('energy_tolerance', vqa_defaults.ENERGY_TOLERANCE),
            ('gradient_tolerance', vqa_defaults.GRADIENT_TOLERANCE),
        ):
            if getattr(self, name) is None:
                object.__setattr__(self, name, default)

        if not (math.isfinite(self.beta) and self.beta > 0):
            raise DomainError(f"beta must be a finite positive number, got {self.beta}")
        if self.ancilla_mode not in AncillaMode.values:
            raise DomainError(f"unknown ancilla mode {self.ancilla_mode!r}")
        if self.optimizer not in OptimizerKind.values:
            raise DomainError(f"unknown optimizer {self.optimizer!r}")
        if self.ancilla_mode == AncillaMode.REDUCED_XY and self.model.n_sites != 4:
            raise InvalidModelError("the reduced_xy ancilla ansatz exists only for N = 4")
        for name in ('system_layers', 'ancilla_layers', 'restarts', 'max_iterations'):
            if getattr(self, name) < 1:
                raise DomainError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.gradient_step <= 0:
            raise DomainError(f"gradient_step must be positive, got {self.gradient_step}")

    @property
    def n_sites(self):
        return self.model.n_sites


@dataclass(frozen=True, eq=False)
class RestartRecord:
    index: int
    free_energy: float
    fidelity: float
    iterations: int
    converged: bool
    diverged: bool
    message: str
    thetas: np.ndarray
    phis: np.ndarray


@dataclass(frozen=True, eq=False)
class EvaluationReport:
    density_matrix: DensityMatrix
    fidelity: float
    free_energy: float
    entropy: float
    energy: float
    trace_distance: float
    relative_entropy: float
    ancilla_probabilities: np.ndarray


@dataclass(frozen=True, eq=False)
class VqaResult:
    """
    Outcome of a multi-start run. ``best_*`` belongs to the restart with the
    lowest free energy, ``max_fidelity_*`` to the restart closest to the
    exact Gibbs state.
    """
    config: VqaConfig
    best_free_energy: float
    exact_free_energy: float
    fidelity: float
    optimal_thetas: np.ndarray
    optimal_phis: np.ndarray
    prepared_state: DensityMatrix
    per_restart_log: tuple
    best_restart: int
    max_fidelity: float
    max_fidelity_restart: int
    wall_time: float = 0.0

    def selected_fidelity(self, rule=SelectionRule.FIDELITY):
        return self.max_fidelity if rule == SelectionRule.FIDELITY else self.fidelity

    @property
    def converged_restarts(self):
        return sum(1 for record in self.per_restart_log if record.converged)


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepSpec:
    """A (gamma, h, beta) grid swept with a common VQA template."""
    betas: tuple
    gammas: tuple
    hs: tuple
    template: VqaConfig
    output_path: Optional[str] = None
    format: str = OutputFormat.CSV
    jobs: int = 1

    def __post_init__(self):
        for name in ('betas', 'gammas', 'hs'):
            values = tuple(float(v) for v in getattr(self, name))
            if not values:
                raise DomainError(f"the {name} grid is empty")
            object.__setattr__(self, name, values)
        if any(not (math.isfinite(b) and b > 0) for b in self.betas):
            raise DomainError("all beta values must be finite and positive")
        if self.format not in (OutputFormat.CSV, OutputFormat.JSON):
            raise DomainError(f"sweeps write csv or json, not {self.format!r}")
        if self.jobs < 1:
            raise DomainError(f"jobs must be >= 1, got {self.jobs}")

    def points(self):
        """Grid points as (gamma, h, beta), gamma outermost and beta innermost."""
        return [(g, h, b) for g in self.gammas for h in self.hs for b in self.betas]
