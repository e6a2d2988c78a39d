# xy_gibbs/utils/ansatz.py
"""
Parametrised circuits of the Gibbs-state preparation.

* the Grover-Rudolph (GR) tree of controlled Ry gates that loads a
  probability distribution on the ancilla register,
* its seven-parameter reduction for the N = 4 XY chain,
* the parity-preserving brick-wall of R_P gates on the system register.
"""
import logging
import math
from typing import Dict, List, Tuple

import numpy as np

from xy_gibbs.exceptions import DomainError, GateError, InvalidModelError
from xy_gibbs.models import (
    REDUCED_FREE_INDICES, BrickwallParams, Circuit, GateKind, GateOp, GRAngles,
    ModelParams, ReducedFitReport, ReducedXYAngles,
)
from xy_gibbs.utils import exactsolver

logger = logging.getLogger('xy_gibbs.ansatz')

NORMALIZATION_TOLERANCE = 1e-10
REDUCED_N_SITES = 4
# Angles of the full N = 4 vector pinned to pi/2 by the pairwise degeneracies.
PINNED_HALF_PI = (8, 9, 12, 13)


def gr_parameter_count(n_qubits: int) -> int:
    return (1 << n_qubits) - 1


# ---------------------------------------------------------------------------
# Grover-Rudolph loader
# ---------------------------------------------------------------------------

def gr_circuit(angles: GRAngles, qubit_offset: int = 0) -> Circuit:
    """
    Ry(theta_0) on the first qubit, then for each level k the 2^k Ry gates on
    qubit k controlled by every bitstring of qubits 0..k-1. The gate for
    control value v uses theta_(2^k - 1 + v); control polarity 0 is a white
    dot, 1 a black dot.
    """
    if not isinstance(angles, GRAngles):
        raise GateError(f"gr_circuit expects GRAngles, got {type(angles).__name__}")
    n = angles.n_qubits
    gates = [GateOp(kind=GateKind.RY, targets=(qubit_offset,), angle=float(angles.thetas[0]), param_index=0)]
    for level in range(1, n):
        for value in range(1 << level):
            index = (1 << level) - 1 + value
            controls = tuple(
                (qubit_offset + q, (value >> (level - 1 - q)) & 1) for q in range(level)
            )
            gates.append(GateOp(
                kind=GateKind.CONTROLLED_RY,
                targets=(qubit_offset + level,),
                controls=controls,
                angle=float(angles.thetas[index]),
                param_index=index,
            ))
    return Circuit(n_qubits=qubit_offset + n, gates=tuple(gates))


def _validate_distribution(p):
    p = np.asarray(p, dtype=float).reshape(-1)
    n = int(round(math.log2(p.size))) if p.size else 0
    if p.size < 2 or (1 << n) != p.size:
        raise DomainError(f"distribution length must be a power of two >= 2, got {p.size}")
    if np.any(~np.isfinite(p)) or np.any(p < 0):
        raise DomainError("distribution entries must be finite and non-negative")
    if abs(p.sum() - 1.0) > NORMALIZATION_TOLERANCE:
        raise DomainError(f"distribution must sum to 1 within {NORMALIZATION_TOLERANCE}, got {p.sum():.15g}")
    return p, n


def angles_from_distribution(p) -> GRAngles:
    """
    Binary-tree split: each node gets theta = 2 arctan sqrt(P_right / P_left)
    over the two halves of its index range. A node without mass gets 0.
    """
    p, n = _validate_distribution(p)
    thetas = np.zeros(gr_parameter_count(n))
    for level in range(n):
        halves = p.reshape(1 << level, 2, -1).sum(axis=2)
        start = (1 << level) - 1
        thetas[start:start + (1 << level)] = 2.0 * np.arctan2(np.sqrt(halves[:, 1]), np.sqrt(halves[:, 0]))
    return GRAngles(n_qubits=n, thetas=thetas)


def gr_distribution(angles: GRAngles) -> np.ndarray:
    """Closed-form output distribution of gr_circuit: products of cos^2 / sin^2 of half-angles."""
    n = angles.n_qubits
    basis = np.arange(1 << n)
    p = np.ones(1 << n)
    for level in range(n):
        node = (1 << level) - 1 + (basis >> (n - level))
        bit = (basis >> (n - 1 - level)) & 1
        half = angles.thetas[node] / 2.0
        p *= np.where(bit == 1, np.sin(half) ** 2, np.cos(half) ** 2)
    return p


# ---------------------------------------------------------------------------
# N = 4 reduction
# ---------------------------------------------------------------------------

def _clipped_theta4_argument(theta1, theta3):
    with np.errstate(divide='ignore', invalid='ignore'):
        argument = np.sin(theta3 / 2.0) / np.tan(theta1 / 2.0)
    return float(np.clip(np.nan_to_num(argument, nan=1.0, posinf=1.0, neginf=-1.0), -1.0, 1.0))


def expand_reduced(reduced: ReducedXYAngles, clip: bool = False) -> GRAngles:
    """
    Full 15-angle vector from the seven free angles:

        theta_8 = theta_9 = theta_12 = theta_13 = pi/2
        theta_10 = theta_7
        theta_11 = theta_14 = 2 arctan(exp(-beta))
        theta_4 = 2 arccos(sin(theta_3/2) / tan(theta_1/2))

    With ``clip`` the arccos argument is clipped into [-1, 1] so the map is
    defined everywhere; otherwise leaving the domain raises DomainError.
    """
    thetas = np.zeros(gr_parameter_count(REDUCED_N_SITES))
    thetas[list(REDUCED_FREE_INDICES)] = reduced.free
    theta1, theta3 = thetas[1], thetas[3]

    thetas[list(PINNED_HALF_PI)] = math.pi / 2.0
    thetas[10] = thetas[7]
    thetas[11] = thetas[14] = 2.0 * math.atan(math.exp(-reduced.beta))

    if clip:
        argument = _clipped_theta4_argument(theta1, theta3)
    else:
        if math.tan(theta1 / 2.0) == 0.0:
            raise DomainError(f"theta_4 is undefined at theta_1 = {theta1} (theta_3 = {theta3})")
        argument = math.sin(theta3 / 2.0) / math.tan(theta1 / 2.0)
        if abs(argument) > 1.0 + 1e-12:
            raise DomainError(
                f"arccos argument sin(theta_3/2)/tan(theta_1/2) = {argument:.6g} is outside [-1, 1] "
                f"for theta_1 = {theta1}, theta_3 = {theta3}"
            )
        argument = min(1.0, max(-1.0, argument))
    thetas[4] = 2.0 * math.acos(argument)
    return GRAngles(n_qubits=REDUCED_N_SITES, thetas=thetas)


def reduce_angles(angles: GRAngles, beta: float) -> ReducedXYAngles:
    if angles.n_qubits != REDUCED_N_SITES:
        raise InvalidModelError(f"the reduced ansatz exists only for N = 4, got {angles.n_qubits} qubits")
    return ReducedXYAngles(beta=beta, free=angles.thetas[list(REDUCED_FREE_INDICES)])


def reduced_identity_residuals(angles: GRAngles, beta: float) -> Dict[str, float]:
    """Residual of each of the eight N = 4 identities for a full angle vector."""
    t = angles.thetas
    tail = 2.0 * math.atan(math.exp(-beta))
    argument = _clipped_theta4_argument(t[1], t[3])
    residuals = {f'theta_{i}': abs(t[i] - math.pi / 2.0) for i in PINNED_HALF_PI}
    residuals['theta_10'] = abs(t[10] - t[7])
    residuals['theta_11'] = abs(t[11] - tail)
    residuals['theta_14'] = abs(t[14] - tail)
    residuals['theta_4'] = abs(t[4] - 2.0 * math.acos(argument))
    return dict(sorted(residuals.items(), key=lambda item: int(item[0].split('_')[1])))


def fit_check_reduced(params: ModelParams, beta: float) -> ReducedFitReport:
    """
    Load the exact N = 4 Boltzmann distribution into GR angles and report how
    well the reduced parametrisation describes it.
    """
    if params.n_sites != REDUCED_N_SITES:
        raise InvalidModelError(f"the reduced ansatz exists only for N = 4, got N = {params.n_sites}")
    target = exactsolver.boltzmann_distribution(params, beta)
    angles = angles_from_distribution(target)
    residuals = reduced_identity_residuals(angles, beta)

    reduced = reduce_angles(angles, beta)
    try:
        expanded = expand_reduced(reduced)
        reconstruction_error = float(np.max(np.abs(gr_distribution(expanded) - target)))
    except DomainError as e:
        logger.warning(f"reduced expansion failed at gamma={params.gamma}, h={params.field_h}, beta={beta}: {e}")
        reduced, reconstruction_error = None, float('inf')

    return ReducedFitReport(
        params=params,
        beta=float(beta),
        angles=angles,
        residuals=residuals,
        reduced=reduced,
        reconstruction_error=reconstruction_error,
    )


# ---------------------------------------------------------------------------
# Parity-preserving system circuit
# ---------------------------------------------------------------------------

def rp_matrix(phi_i: float, phi_j: float) -> np.ndarray:
    """
    The R_P gate: a rotation by (phi_i + phi_j)/2 on span{|00>, |11>} and by
    (phi_i - phi_j)/2 on span{|01>, |10>}.
    """
    cp, sp = math.cos((phi_i + phi_j) / 2.0), math.sin((phi_i + phi_j) / 2.0)
    cm, sm = math.cos((phi_i - phi_j) / 2.0), math.sin((phi_i - phi_j) / 2.0)
    return np.array([
        [cp, 0.0, 0.0, sp],
        [0.0, cm, -sm, 0.0],
        [0.0, sm, cm, 0.0],
        [-sp, 0.0, 0.0, cp],
    ])


def cnot_gate(control: int, target: int) -> GateOp:
    return GateOp(kind=GateKind.CNOT, targets=(target,), controls=((control, 1),))


def brickwall_pairs(n_qubits: int) -> List[Tuple[int, int]]:
    """Bonds of one layer: (0,1), (2,3), ... then (1,2), (3,4), ..., (N-1, 0)."""
    if n_qubits < 2 or n_qubits % 2:
        raise GateError(f"the brick-wall circuit needs an even qubit count, got {n_qubits}")
    even = [(q, q + 1) for q in range(0, n_qubits, 2)]
    odd = [(q, (q + 1) % n_qubits) for q in range(1, n_qubits, 2)]
    return even + odd


def brickwall_parameter_count(n_qubits: int, n_layers: int) -> int:
    return 2 * n_qubits * n_layers


def brickwall_circuit(params: BrickwallParams, qubit_offset: int = 0) -> Circuit:
    if not isinstance(params, BrickwallParams):
        raise GateError(f"brickwall_circuit expects BrickwallParams, got {type(params).__name__}")
    gates = []
    cursor = 0
    for _ in range(params.n_layers):
        for a, b in brickwall_pairs(params.n_qubits):
            gates.append(GateOp(
                kind=GateKind.TWO_QUBIT_MATRIX,
                targets=(qubit_offset + a, qubit_offset + b),
                matrix=rp_matrix(params.phis[cursor], params.phis[cursor + 1]),
                param_index=cursor,
            ))
            cursor += 2
    return Circuit(n_qubits=qubit_offset + params.n_qubits, gates=tuple(gates))


def circuit_diagram(circuit: Circuit) -> str:
    """
    One line per gate: position, kind, controls with polarity, target(s),
    parameter index. Stable across runs; used for golden comparisons.
    """
    lines = []
    for position, gate in enumerate(circuit):
        controls = ' '.join(f"q{q}={int(polarity)}" for q, polarity in gate.controls) or '-'
        targets = ','.join(f"q{q}" for q in gate.targets)
        if gate.kind == GateKind.TWO_QUBIT_MATRIX:
            parameter = f"phi[{gate.param_index}],phi[{gate.param_index + 1}]"
        elif gate.param_index is not None:
            parameter = f"theta[{gate.param_index}]"
        else:
            parameter = '-'
        lines.append(f"{position:4d}  {str(gate.kind):<16}  [{controls}] -> {targets}  {parameter}")
    return '\n'.join(lines)
