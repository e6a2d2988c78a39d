# xy_gibbs/utils/exactsolver.py
"""
Exact solution of the periodic spin-1/2 XY chain

    H = -1/4 sum_n [(1 + gamma) X_n X_{n+1} + (1 - gamma) Y_n Y_{n+1}] - h/2 sum_n Z_n

with J = 1. The free-fermion spectra of the two parity sectors give fast
energies and the level labelling used by the ancilla ansatz; the dense
matrix is the source of eigenvectors and of the Gibbs density matrix.
"""
import itertools
import logging
import math
from functools import reduce
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
import scipy.linalg as la
import scipy.sparse as sps

from xy_gibbs.config import solver_config
from xy_gibbs.exceptions import (
    DomainError, InvalidModelError, ResourceLimitError, UnsupportedSectorError,
)
from xy_gibbs.models import (
    DegeneracyProfile, DensityMatrix, GibbsTarget, ModelParams, MomentumSet,
    Parity, SectorLevel, SectorSpectrum,
)

logger = logging.getLogger('xy_gibbs.exactsolver')

# |sin k| below this marks the unpaired momenta k = 0 and k = pi.
UNPAIRED_TOLERANCE = 1e-12

_IDENTITY = sps.identity(2, format='csr', dtype=float)
_X = sps.csr_matrix(np.array([[0.0, 1.0], [1.0, 0.0]]))
# i*Y, kept real: Y (x) Y = -(iY) (x) (iY)
_IY = sps.csr_matrix(np.array([[0.0, 1.0], [-1.0, 0.0]]))
_Z = sps.csr_matrix(np.array([[1.0, 0.0], [0.0, -1.0]]))


def _check_sites(n_sites):
    if isinstance(n_sites, bool) or not isinstance(n_sites, (int, np.integer)):
        raise InvalidModelError(f"N must be an integer, got {n_sites!r}")
    if n_sites < 2 or n_sites % 2:
        raise InvalidModelError(f"N must be even and >= 2, got {n_sites}")


def _check_cap(n_sites, cap, what):
    if n_sites > cap:
        raise ResourceLimitError(what, n_sites, cap)


def _parity(value):
    try:
        return Parity(value)
    except ValueError:
        raise DomainError(f"parity must be one of {Parity.values}, got {value!r}")


# ---------------------------------------------------------------------------
# Free-fermion picture
# ---------------------------------------------------------------------------

def momenta(parity: Union[Parity, str], n_sites: int) -> MomentumSet:
    """
    Allowed quasi-momenta of one parity sector, ascending.

    The positive sector has antiperiodic fermions, k = (2m - (N-1)) pi / N,
    and never contains 0 or pi. The negative sector has periodic fermions,
    k = (2(m+1) - N) pi / N, and contains both.
    """
    _check_sites(n_sites)
    parity = _parity(parity)
    if parity == Parity.POSITIVE:
        ks = [math.pi * (2 * m - (n_sites - 1)) / n_sites for m in range(n_sites)]
    else:
        ks = [math.pi * (2 * (m + 1) - n_sites) / n_sites for m in range(n_sites)]
    return MomentumSet(parity=parity.value, momenta=tuple(sorted(ks)))


def single_particle_energy(k, params: ModelParams) -> Union[float, np.ndarray]:
    """eps_k = sqrt((h - cos k)^2 + gamma^2 sin^2 k); accepts scalars or arrays."""
    k = np.asarray(k, dtype=float)
    eps = np.sqrt((params.field_h - np.cos(k)) ** 2 + (params.gamma * np.sin(k)) ** 2)
    return float(eps) if eps.ndim == 0 else eps


def is_unpaired(k: float) -> bool:
    return abs(math.sin(k)) < UNPAIRED_TOLERANCE


def canonical_mode_order(momentum_set: MomentumSet) -> List[float]:
    """
    Order in which modes are switched on when enumerating levels: the
    unpaired momenta first (0 before pi), then the +-k pairs by increasing
    |k|, -|k| before +|k|.
    """
    return sorted(
        momentum_set.momenta,
        key=lambda k: (0 if is_unpaired(k) else 1, abs(k), k),
    )


def mode_weights(parity: Parity, params: ModelParams, modes: List[float]) -> List[float]:
    """
    Energy added by exciting each mode.

    Paired modes cost eps_k. In the negative sector the unpaired modes enter
    with the signed dispersion s(k)(h - cos k), s(0) = -1 and s(pi) = +1;
    the modulus eps_k would put the h < 1 levels in the wrong place.
    """
    weights = []
    for k in modes:
        if parity == Parity.NEGATIVE and is_unpaired(k):
            sign = -1.0 if math.cos(k) > 0 else 1.0
            weights.append(sign * (params.field_h - math.cos(k)))
        else:
            weights.append(single_particle_energy(k, params))
    return weights


def sector_spectrum(parity: Union[Parity, str], params: ModelParams) -> SectorSpectrum:
    """
    All 2^(N-1) levels of one parity sector.

    A level excites an even number of modes on top of the sector vacuum
    E_0 = -1/2 sum_k w_k. Levels are enumerated by number of excited modes,
    then lexicographically in the canonical mode order; this ordering is the
    basis assignment used by the ancilla ansatz.
    """
    parity = _parity(parity)
    _check_sites(params.n_sites)
    _check_cap(params.n_sites, solver_config.ANALYTIC_SITE_CAP, 'n_sites')

    momentum_set = momenta(parity, params.n_sites)
    modes = canonical_mode_order(momentum_set)
    weights = mode_weights(parity, params, modes)
    bit_of = {k: momentum_set.momenta.index(k) for k in modes}
    vacuum = -0.5 * math.fsum(weights)

    levels = []
    for n_excited in range(0, params.n_sites + 1, 2):
        for subset in itertools.combinations(range(len(modes)), n_excited):
            energy = vacuum + math.fsum(weights[i] for i in subset)
            occupied = tuple(sorted(modes[i] for i in subset))
            mask = sum(1 << bit_of[modes[i]] for i in subset)
            levels.append(SectorLevel(energy=energy, occupied_modes=occupied, occupation_mask=mask))

    logger.debug(f"{parity.value} sector N={params.n_sites}: {len(levels)} levels, vacuum {vacuum:.12g}")
    return SectorSpectrum(
        parity=parity.value,
        n_sites=params.n_sites,
        momenta=momentum_set,
        levels=tuple(levels),
    )


def boltzmann_distribution(params: ModelParams, beta: float) -> np.ndarray:
    """
    Boltzmann weights of all 2^N levels in ancilla-basis order: the positive
    sector on the first half of the computational basis, the negative sector
    on the second half, each in sector_spectrum enumeration order.
    """
    if not (math.isfinite(beta) and beta >= 0):
        raise DomainError(f"beta must be a finite non-negative number, got {beta}")
    energies = np.concatenate([
        sector_spectrum(Parity.POSITIVE, params).energies,
        sector_spectrum(Parity.NEGATIVE, params).energies,
    ])
    weights = np.exp(-beta * (energies - energies.min()))
    return weights / weights.sum()


# ---------------------------------------------------------------------------
# Dense picture
# ---------------------------------------------------------------------------

def _pauli_string(n_sites, ops):
    factors = [ops.get(site, _IDENTITY) for site in range(n_sites)]
    return reduce(lambda a, b: sps.kron(a, b, format='csr'), factors)


def build_dense_hamiltonian(params: ModelParams) -> np.ndarray:
    """
    The 2^N x 2^N real symmetric Hamiltonian with periodic bonds; site 0 is
    the most significant bit. The ladder-operator constant N h / 2 is kept,
    so H is traceless and its eigenvalues coincide with the sector spectra.
    """
    n = params.n_sites
    _check_sites(n)
    _check_cap(n, solver_config.DENSE_SITE_CAP, 'n_sites')

    dim = 1 << n
    hamiltonian = sps.csr_matrix((dim, dim), dtype=float)
    xx = -0.25 * (1.0 + params.gamma)
    yy = 0.25 * (1.0 - params.gamma)
    for site in range(n):
        right = (site + 1) % n
        hamiltonian = hamiltonian + xx * _pauli_string(n, {site: _X, right: _X})
        hamiltonian = hamiltonian + yy * _pauli_string(n, {site: _IY, right: _IY})
        hamiltonian = hamiltonian - 0.5 * params.field_h * _pauli_string(n, {site: _Z})
    return hamiltonian.toarray()


def dense_spectrum(params: ModelParams) -> Tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and orthonormal eigenvectors (columns) of H."""
    eigenvalues, eigenvectors = la.eigh(build_dense_hamiltonian(params))
    return eigenvalues, eigenvectors


def parity_of_basis_state(index: int, n_sites: int) -> Parity:
    """
    Sector of a computational basis state. Pi(-Z_n) = (-1)^(number of 0 bits),
    which for even N is the parity of the number of 1 bits.
    """
    zeros = n_sites - bin(index).count('1')
    return Parity.POSITIVE if zeros % 2 == 0 else Parity.NEGATIVE


def sector_basis_indices(n_sites: int, parity: Union[Parity, str]) -> np.ndarray:
    parity = _parity(parity)
    return np.array([i for i in range(1 << n_sites) if parity_of_basis_state(i, n_sites) == parity])


def dense_sector_spectrum(params: ModelParams, parity: Union[Parity, str]) -> np.ndarray:
    """Ascending eigenvalues of the dense Hamiltonian restricted to one parity block."""
    indices = sector_basis_indices(params.n_sites, parity)
    block = build_dense_hamiltonian(params)[np.ix_(indices, indices)]
    return la.eigvalsh(block)


def spectrum_residual(params: ModelParams) -> float:
    """max |analytic - dense| after sorting both multisets."""
    analytic = np.sort(np.concatenate([
        sector_spectrum(Parity.POSITIVE, params).energies,
        sector_spectrum(Parity.NEGATIVE, params).energies,
    ]))
    dense, _ = dense_spectrum(params)
    return float(np.max(np.abs(analytic - dense)))


def gibbs_target(params: ModelParams, beta: float) -> GibbsTarget:
    """
    exp(-beta H)/Z from the dense eigendecomposition. Energies are shifted by
    the ground energy before exponentiation; log Z restores the shift.
    """
    if not (math.isfinite(beta) and beta >= 0):
        raise DomainError(f"beta must be a finite non-negative number, got {beta}")
    energies, vectors = dense_spectrum(params)
    ground = energies[0]
    weights = np.exp(-beta * (energies - ground))
    shifted_z = weights.sum()
    probabilities = weights / shifted_z
    rho = (vectors * probabilities) @ vectors.T
    rho = 0.5 * (rho + rho.T)
    log_z = float(-beta * ground + np.log(shifted_z))
    logger.debug(f"Gibbs target N={params.n_sites} beta={beta}: log Z = {log_z:.12g}")
    return GibbsTarget(
        params=params,
        beta=float(beta),
        energies=energies,
        probabilities=probabilities,
        density_matrix=DensityMatrix(n_qubits=params.n_sites, matrix=rho),
        log_partition_function=log_z,
    )


# ---------------------------------------------------------------------------
# Degeneracies
# ---------------------------------------------------------------------------

def degeneracy_profile(n_sites: int, n_fermions: int) -> DegeneracyProfile:
    """
    Number of 4^j-fold degenerate levels among the n-fermion levels of a
    parity sector: C(N/2, n/2 - j) * C(N/2 - (n/2 - j), 2j).
    """
    _check_sites(n_sites)
    if isinstance(n_fermions, bool) or not isinstance(n_fermions, (int, np.integer)):
        raise DomainError(f"n must be an integer, got {n_fermions!r}")
    if not 0 <= n_fermions <= n_sites:
        raise DomainError(f"n must lie in [0, {n_sites}], got {n_fermions}")
    if n_fermions % 2:
        raise UnsupportedSectorError(f"degeneracy profiles cover even fermion numbers only, got n = {n_fermions}")

    half_sites, half_fermions = n_sites // 2, n_fermions // 2
    counts = {}
    for j in range(half_fermions + 1):
        paired = half_fermions - j
        remaining = half_sites - paired
        if 2 * j > remaining:
            continue
        count = math.comb(half_sites, paired) * math.comb(remaining, 2 * j)
        if count:
            counts[4 ** j] = count
    return DegeneracyProfile(n_sites=int(n_sites), n_fermions=int(n_fermions), counts=counts)


def group_degenerate_levels(energies, tolerance: Optional[float] = None) -> Dict[int, int]:
    """Histogram {multiplicity: number of distinct levels} of a spectrum."""
    tolerance = solver_config.DEGENERACY_TOLERANCE if tolerance is None else tolerance
    ordered = np.sort(np.asarray(energies, dtype=float))
    if ordered.size == 0:
        return {}
    histogram = {}
    run = 1
    for previous, current in zip(ordered[:-1], ordered[1:]):
        if current - previous <= tolerance:
            run += 1
        else:
            histogram[run] = histogram.get(run, 0) + 1
            run = 1
    histogram[run] = histogram.get(run, 0) + 1
    return histogram


def sector_degeneracy_histogram(n_sites: int) -> Dict[int, int]:
    """Multiplicity histogram of the positive sector: profiles summed over even n."""
    histogram = {}
    for n_fermions in range(0, n_sites + 1, 2):
        for degree, count in degeneracy_profile(n_sites, n_fermions).counts.items():
            histogram[degree] = histogram.get(degree, 0) + count
    return histogram
