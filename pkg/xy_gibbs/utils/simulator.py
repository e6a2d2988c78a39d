# xy_gibbs/utils/simulator.py
"""
Dense statevector / density-matrix engine.

Qubit 0 is the most significant bit of a basis label, so in the
``(2,) * n`` tensor view of a state qubit q is axis q. Gates write into the
state buffer in place and return the same Statevector.
"""
import logging
from typing import Dict, Iterable, List, Optional, Sequence, Union

import numpy as np
import scipy.linalg as la
from scipy.special import entr

from xy_gibbs.config import solver_config
from xy_gibbs.exceptions import (
    DegenerateRequestError, DomainError, GateError, ResourceLimitError,
)
from xy_gibbs.models import Circuit, ControlPolarity, DensityMatrix, GateKind, GateOp, Statevector

logger = logging.getLogger('xy_gibbs.simulator')

UNITARITY_TOLERANCE = 1e-12


def ry_matrix(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    return np.array([[c, -s], [s, c]])


def zero_state(n_qubits: int) -> Statevector:
    if n_qubits < 1:
        raise GateError(f"a register needs at least one qubit, got {n_qubits}")
    cap = solver_config.QUBIT_CAP
    if n_qubits > cap:
        raise ResourceLimitError('n_qubits', n_qubits, cap)
    amplitudes = np.zeros(1 << n_qubits, dtype=complex)
    amplitudes[0] = 1.0
    return Statevector(n_qubits=n_qubits, amplitudes=amplitudes)


def copy_state(state: Statevector) -> Statevector:
    return Statevector(n_qubits=state.n_qubits, amplitudes=state.amplitudes.copy())


def _check_qubits(state, qubits):
    for q in qubits:
        if not 0 <= q < state.n_qubits:
            raise GateError(f"qubit {q} is out of range for a {state.n_qubits}-qubit register")
    if len(set(qubits)) != len(qubits):
        raise GateError(f"gate qubits must be distinct, got {tuple(qubits)}")


def _slice(n_qubits, fixed):
    index = [slice(None)] * n_qubits
    for qubit, bit in fixed.items():
        index[qubit] = bit
    return tuple(index)


def apply_controlled_ry(state: Statevector, controls: Sequence, target: int, theta: float) -> Statevector:
    """
    Ry(theta) on ``target`` for the basis states whose control bits match the
    polarities; ``controls`` is a sequence of (qubit, polarity) pairs.
    """
    controls = [(int(q), int(p)) for q, p in controls]
    _check_qubits(state, [q for q, _ in controls] + [target])
    for _, polarity in controls:
        if polarity not in ControlPolarity.values:
            raise GateError(f"control polarity must be 0 or 1, got {polarity}")

    tensor = state.tensor()
    fixed = dict(controls)
    low = _slice(state.n_qubits, {**fixed, target: 0})
    high = _slice(state.n_qubits, {**fixed, target: 1})
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    a0 = tensor[low].copy()
    a1 = tensor[high]
    tensor[low] = c * a0 - s * a1
    tensor[high] = s * a0 + c * a1
    return state


def apply_ry(state: Statevector, target: int, theta: float) -> Statevector:
    return apply_controlled_ry(state, (), target, theta)


def apply_cnot(state: Statevector, control: int, target: int) -> Statevector:
    _check_qubits(state, [control, target])
    tensor = state.tensor()
    low = _slice(state.n_qubits, {control: 1, target: 0})
    high = _slice(state.n_qubits, {control: 1, target: 1})
    swapped = tensor[low].copy()
    tensor[low] = tensor[high]
    tensor[high] = swapped
    return state


def check_unitary(matrix, tolerance: float = UNITARITY_TOLERANCE) -> np.ndarray:
    matrix = np.asarray(matrix)
    if matrix.shape != (4, 4):
        raise GateError(f"two-qubit gates take a 4x4 matrix, got shape {matrix.shape}")
    if not np.allclose(matrix.conj().T @ matrix, np.eye(4), atol=tolerance, rtol=0):
        raise GateError("two-qubit gate matrix is not unitary")
    return matrix


def apply_two_qubit(state: Statevector, q_a: int, q_b: int, matrix, validate: bool = True) -> Statevector:
    """``matrix`` acts on (q_a, q_b) with q_a as the more significant bit."""
    _check_qubits(state, [q_a, q_b])
    if validate:
        matrix = check_unitary(matrix)
    tensor = state.tensor()
    pair = np.moveaxis(tensor, (q_a, q_b), (0, 1))
    updated = (matrix @ pair.reshape(4, -1)).reshape(pair.shape)
    pair[...] = updated
    return state


def apply_gate(state: Statevector, gate: GateOp, validate: bool = True) -> Statevector:
    if gate.kind == GateKind.RY:
        return apply_ry(state, gate.targets[0], gate.angle)
    if gate.kind == GateKind.CONTROLLED_RY:
        return apply_controlled_ry(state, gate.controls, gate.targets[0], gate.angle)
    if gate.kind == GateKind.CNOT:
        return apply_cnot(state, gate.controls[0][0], gate.targets[0])
    if gate.kind == GateKind.TWO_QUBIT_MATRIX:
        return apply_two_qubit(state, gate.targets[0], gate.targets[1], gate.matrix, validate=validate)
    raise GateError(f"unknown gate kind {gate.kind!r}")


def run_circuit(
    state: Statevector, circuit: Union[Circuit, Iterable[GateOp]], validate: bool = True,
) -> Statevector:
    """Apply every gate of ``circuit`` (a Circuit or any iterable of GateOp)."""
    for gate in circuit:
        apply_gate(state, gate, validate=validate)
    return state


def statevector_to_density(state: Statevector) -> DensityMatrix:
    psi = state.amplitudes
    return DensityMatrix(n_qubits=state.n_qubits, matrix=np.outer(psi, psi.conj()))


def measurement_distribution(state: Statevector, qubits: Optional[Sequence[int]] = None) -> np.ndarray:
    """
    Computational-basis probabilities, optionally marginalised onto
    ``qubits`` (kept in ascending order).
    """
    probabilities = np.abs(state.amplitudes) ** 2
    if qubits is None:
        return probabilities
    keep = sorted(qubits)
    _check_qubits(state, keep)
    traced = tuple(q for q in range(state.n_qubits) if q not in keep)
    marginal = probabilities.reshape((2,) * state.n_qubits).sum(axis=traced)
    return marginal.reshape(-1)


def _keep_set(n_qubits, keep):
    keep = sorted(int(q) for q in keep)
    if not keep or len(keep) >= n_qubits:
        raise DegenerateRequestError(
            f"partial trace must keep some but not all of {n_qubits} qubits, got {keep}"
        )
    if len(set(keep)) != len(keep) or keep[0] < 0 or keep[-1] >= n_qubits:
        raise GateError(f"invalid keep-set {keep} for {n_qubits} qubits")
    return keep


def partial_trace(rho_or_state: Union[Statevector, DensityMatrix], keep: Sequence[int]) -> DensityMatrix:
    """Reduced density matrix over the ``keep`` qubits, in ascending qubit order."""
    n = rho_or_state.n_qubits
    keep = _keep_set(n, keep)
    traced = [q for q in range(n) if q not in keep]
    kept_dim = 1 << len(keep)

    if isinstance(rho_or_state, Statevector):
        block = np.transpose(rho_or_state.tensor(), keep + traced).reshape(kept_dim, -1)
        reduced = block @ block.conj().T
    else:
        tensor = rho_or_state.matrix.reshape((2,) * (2 * n))
        rows = list(range(n))
        cols = [n + q if q in keep else q for q in range(n)]
        output = keep + [n + q for q in keep]
        reduced = np.einsum(tensor, rows + cols, output).reshape(kept_dim, kept_dim)
    return DensityMatrix(n_qubits=len(keep), matrix=reduced)


def _clamped(values, what):
    clamp = solver_config.EIGENVALUE_CLAMP
    values = np.asarray(values, dtype=float)
    if np.any(values < -clamp):
        raise DomainError(f"{what} has entries below -{clamp}: min {values.min():.3g}")
    return np.clip(values, 0.0, None)


def von_neumann_entropy(probabilities_or_rho) -> float:
    """S = -sum p ln p in nats, 0 ln 0 = 0; accepts a probability vector or a DensityMatrix."""
    if isinstance(probabilities_or_rho, DensityMatrix):
        values = la.eigvalsh(probabilities_or_rho.matrix)
    else:
        values = np.asarray(probabilities_or_rho, dtype=float).reshape(-1)
    p = _clamped(values, 'probability vector')
    if abs(p.sum() - 1.0) > 1e-8:
        raise DomainError(f"probabilities must sum to 1, got {p.sum():.12g}")
    return float(np.sum(entr(p)))


def _matrix(rho):
    return rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)


def _psd_sqrt(matrix):
    values, vectors = la.eigh(matrix)
    values = _clamped(values, 'density matrix spectrum')
    return (vectors * np.sqrt(values)) @ vectors.conj().T


def uhlmann_fidelity(rho, sigma) -> float:
    """(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, clipped to [0, 1]."""
    a, b = _matrix(rho), _matrix(sigma)
    if a.shape != b.shape:
        raise DomainError(f"fidelity needs equal dimensions, got {a.shape} and {b.shape}")
    root = _psd_sqrt(a)
    inner = root @ b @ root
    inner = 0.5 * (inner + inner.conj().T)
    values = np.clip(la.eigvalsh(inner), 0.0, None)
    return float(np.clip(np.sum(np.sqrt(values)) ** 2, 0.0, 1.0))


def trace_distance(rho, sigma) -> float:
    a, b = _matrix(rho), _matrix(sigma)
    if a.shape != b.shape:
        raise DomainError(f"trace distance needs equal dimensions, got {a.shape} and {b.shape}")
    return float(0.5 * np.sum(np.abs(la.eigvalsh(a - b))))


def relative_entropy(rho, sigma) -> float:
    """S(rho || sigma) in nats; infinite when rho has support outside sigma's."""
    a, b = _matrix(rho), _matrix(sigma)
    if a.shape != b.shape:
        raise DomainError(f"relative entropy needs equal dimensions, got {a.shape} and {b.shape}")
    clamp = solver_config.EIGENVALUE_CLAMP
    p, u = la.eigh(a)
    q, v = la.eigh(b)
    p = np.clip(p, 0.0, None)
    q = np.clip(q, 0.0, None)
    overlaps = np.abs(u.conj().T @ v) ** 2
    weights = p @ overlaps
    if np.any((q <= clamp) & (weights > clamp)):
        return float('inf')
    log_q = np.log(np.where(q > clamp, q, 1.0))
    return float(-np.sum(entr(p)) - np.dot(weights, log_q))


def dump_statevector(state: Statevector, tolerance: float = 0.0) -> List[Dict]:
    """Debug rows (index, re, im), skipping amplitudes with modulus <= tolerance."""
    return [
        {'index': int(i), 're': float(a.real), 'im': float(a.imag)}
        for i, a in enumerate(state.amplitudes)
        if abs(a) > tolerance or tolerance == 0.0
    ]
