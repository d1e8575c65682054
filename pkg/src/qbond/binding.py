"""Binding energy via optimal passive-state construction.

The internal energy of a state rho under H is U = Tr[H rho]. Among all
unitaries applied to rho, the lowest reachable final energy under the
uncoupled Hamiltonian H_free is obtained by placing the populations of
rho, sorted nonincreasing, on the eigenstates of H_free sorted by
nondecreasing energy (the passive state). The binding energy is

    delta_u_be = final_energy - initial_energy,

negative when energy is released by unbinding. The rearrangement
inequality gives the sandwich

    sum p_down * e_up  <=  sum p * e  <=  sum p_down * e_down

for any simultaneous ordering, which energy_bounds exposes directly.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .errors import ValidationError
from .operators import (
    HERMITIAN_ATOL,
    SpectralDecomposition,
    average_energy,
    hermitian_eigendecomposition,
    validate_density_matrix,
    validate_hermitian,
    validate_probability_vector,
)

# absolute tie tolerance when grouping degenerate energies
DEGENERACY_ATOL = 1e-12


@dataclass(frozen=True)
class BindingEnergyReport:
    """Result bundle for one binding-energy computation.

    assignment[k] is the index into the initial state's spectral list
    (eigenvalues ascending) whose population is placed on free level k,
    levels ordered by nondecreasing energy. The optimal unitary maps the
    corresponding eigenvectors onto the free eigenstates, so that
    optimal_unitary rho0 optimal_unitary^dag equals passive_state.
    """

    delta_u_be: float
    initial_energy: float
    final_energy: float
    passive_state: np.ndarray
    assignment: tuple[int, ...]
    optimal_unitary: np.ndarray


def descending_order(values: np.ndarray) -> np.ndarray:
    """Indices sorting values nonincreasing, ties kept in original order."""
    return np.argsort(-np.asarray(values), kind="stable")


def energy_bounds(populations, energies) -> tuple[float, float]:
    """Extremal average energies over all population-to-level assignments.

    Returns (lowest, highest): populations sorted nonincreasing paired
    with energies nondecreasing, respectively nonincreasing.
    """
    p = validate_probability_vector(populations)
    e = np.asarray(energies, dtype=float)
    if p.shape != e.shape:
        raise ValidationError(f"shape mismatch: populations {p.shape} vs energies {e.shape}")
    p_down = np.sort(p)[::-1]
    e_up = np.sort(e)
    lo = float(np.dot(p_down, e_up))
    hi = float(np.dot(p_down, e_up[::-1]))
    return lo, hi


def passive_state(populations, free_spectrum: SpectralDecomposition) -> np.ndarray:
    """State with the given populations arranged passively on the free spectrum.

    Populations sorted nonincreasing occupy eigenstates of nondecreasing
    energy. The result commutes with the free Hamiltonian and is the
    energy minimizer among all unitary rearrangements of the populations.
    """
    p = validate_probability_vector(populations)
    if len(p) != free_spectrum.dim:
        raise ValidationError(
            f"population count {len(p)} does not match spectrum dimension {free_spectrum.dim}"
        )
    p_down = p[descending_order(p)]
    v = free_spectrum.eigenvectors
    return (v * p_down) @ v.conj().T


def binding_energy(rho0, h_free, h_int, atol: float = HERMITIAN_ATOL) -> BindingEnergyReport:
    """Binding energy of rho0 for total Hamiltonian h_free + h_int.

    Parameters
    ----------
    rho0 : initial density matrix (dressed state of the coupled system)
    h_free : uncoupled Hamiltonian governing the separated fragments
    h_int : coupling term; h_free + h_int is the Hamiltonian that sets
        the initial energy

    Returns a BindingEnergyReport. The final energy is the brute-force
    minimum over all population-to-level assignments (rearrangement
    optimum), reached by the reported unitary.
    """
    rho = validate_density_matrix(rho0, hermitian_atol=atol)
    free = hermitian_eigendecomposition(h_free, atol=atol)
    coupling = np.asarray(h_int, dtype=complex)
    if coupling.shape != rho.shape or free.eigenvectors.shape != rho.shape:
        raise ValidationError(
            f"dimension mismatch: rho {rho.shape}, h_free {np.shape(h_free)}, h_int {coupling.shape}"
        )
    h_total = validate_hermitian(h_free, atol=atol) + validate_hermitian(coupling, atol=atol)

    initial = average_energy(rho, h_total)

    state = hermitian_eigendecomposition(rho, atol=atol)
    populations = np.clip(state.eigenvalues, 0.0, None)
    order = descending_order(populations)

    final = float(np.dot(populations[order], free.eigenvalues))
    # unitary sending the k-th most populated eigenvector to the k-th free level
    u_opt = free.eigenvectors @ state.eigenvectors[:, order].conj().T

    v = free.eigenvectors
    passive = (v * populations[order]) @ v.conj().T

    return BindingEnergyReport(
        delta_u_be=final - initial,
        initial_energy=initial,
        final_energy=final,
        passive_state=passive,
        assignment=tuple(int(k) for k in order),
        optimal_unitary=u_opt,
    )


def optimal_unitary_pure(psi0, free_spectrum: SpectralDecomposition, atol: float = 1e-10) -> np.ndarray:
    """Unitary taking a pure state to the free ground state.

    The first column pair sends psi0 to the lowest-energy eigenstate; the
    rest of the basis is completed deterministically by Gram-Schmidt over
    the standard basis in index order, with phases left untouched.
    """
    psi = np.asarray(psi0, dtype=complex).reshape(-1)
    if len(psi) != free_spectrum.dim:
        raise ValidationError(
            f"state dimension {len(psi)} does not match spectrum dimension {free_spectrum.dim}"
        )
    norm = float(np.linalg.norm(psi))
    if abs(norm - 1.0) > atol:
        raise ValidationError(f"pure state norm is {norm!r}, expected 1 within {atol:.1e}")

    d = len(psi)
    basis = [psi / norm]
    for i in range(d):
        if len(basis) == d:
            break
        v = np.zeros(d, dtype=complex)
        v[i] = 1.0
        for b in basis:
            v -= b * np.vdot(b, v)
        vn = float(np.linalg.norm(v))
        if vn > 1e-8:    # skip directions already spanned
            basis.append(v / vn)
    if len(basis) != d:
        raise ValidationError("failed to complete an orthonormal basis from the standard vectors")
    source = np.column_stack(basis)
    return free_spectrum.eigenvectors @ source.conj().T


def gibbs_weights(energies, beta: float, degeneracy_atol: float = DEGENERACY_ATOL) -> np.ndarray:
    """Normalized Boltzmann weights for energies at inverse temperature beta.

    beta = +inf is accepted as the ground-state limit; a degenerate
    ground space gets equal weights.
    """
    e = np.asarray(energies, dtype=float)
    if beta < 0:
        raise ValidationError(f"inverse temperature must be nonnegative, got {beta}")
    if math.isinf(beta):
        ground = e <= e.min() + degeneracy_atol
        w = ground.astype(float)
        return w / w.sum()
    w = np.exp(-beta * (e - e.min()))    # shift guards against overflow
    return w / w.sum()


def thermal_state(hamiltonian, beta: float, atol: float = HERMITIAN_ATOL) -> np.ndarray:
    """Gibbs state exp(-beta H) / Z, with beta = +inf handled as a limit."""
    spec = hermitian_eigendecomposition(hamiltonian, atol=atol)
    w = gibbs_weights(spec.eigenvalues, beta)
    v = spec.eigenvectors
    return (v * w) @ v.conj().T


def thermal_final_state(h_total, h_free, beta: float, atol: float = HERMITIAN_ATOL):
    """Optimal unbinding endpoint for a thermal state of the coupled system.

    The dressed Gibbs weights, which are nonincreasing along the dressed
    spectrum, are placed on the bare levels in nondecreasing energy
    order. Returns (final_state, unitary) with
    unitary thermal_state(h_total, beta) unitary^dag = final_state.
    """
    dressed = hermitian_eigendecomposition(h_total, atol=atol)
    bare = hermitian_eigendecomposition(h_free, atol=atol)
    if dressed.dim != bare.dim:
        raise ValidationError("dressed and bare Hamiltonians differ in dimension")
    w = gibbs_weights(dressed.eigenvalues, beta)
    # both spectra ascend, so the weights already pair passively
    v = bare.eigenvectors
    final = (v * w) @ v.conj().T
    unitary = bare.eigenvectors @ dressed.eigenvectors.conj().T
    return final, unitary
