"""Spin-1/2 operators on tensor-product spaces of a ring plus a central spin.

Tensor-factor convention: the ``N - 1`` ring spins occupy factors ``1 .. N-1``
(leftmost), the central spin is factor ``N``. Sites are 1-based throughout so
that site labels match the physical labelling of the ring.

Operators are plain complex ``numpy`` arrays of shape ``(2**k, 2**k)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache, reduce
from math import comb
from typing import Callable, Iterable

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .errors import DomainError

MAX_SPINS = 14

SPIN_MATRICES = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex) / 2,
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex) / 2,
    "z": np.array([[1, 0], [0, -1]], dtype=complex) / 2,
}
_RAISE = np.array([[0, 1], [0, 0]], dtype=complex)


class SubsystemLabel(enum.Enum):
    RING_A = "A"
    CENTRAL_B = "B"


def _check_axis(axis: str) -> str:
    if axis not in SPIN_MATRICES:
        raise DomainError(f"axis must be one of 'x', 'y', 'z', got {axis!r}")
    return axis


def _check_num_spins(num_spins: int) -> int:
    if num_spins < 1 or num_spins > MAX_SPINS:
        raise DomainError(f"num_spins must be in 1..{MAX_SPINS}, got {num_spins}")
    return num_spins


def num_spins_of(op: np.ndarray) -> int:
    """Number of qubit factors of a square ``2**k`` operator."""
    dim = op.shape[0]
    if op.ndim != 2 or op.shape[1] != dim or dim < 2 or dim & (dim - 1):
        raise DomainError(f"operator must be square with dimension 2**k, got shape {op.shape}")
    return dim.bit_length() - 1


def single_spin_operator(site: int, axis: str, num_spins: int) -> np.ndarray:
    """Return ``sigma_axis / 2`` on ``site`` (1-based), identity on other factors."""
    _check_axis(axis)
    _check_num_spins(num_spins)
    if not 1 <= site <= num_spins:
        raise DomainError(f"site must be in 1..{num_spins}, got {site}")
    left = np.eye(2 ** (site - 1))
    right = np.eye(2 ** (num_spins - site))
    return np.kron(np.kron(left, SPIN_MATRICES[axis]), right)


def collective_operator(axis: str, sites: Iterable[int], num_spins: int) -> np.ndarray:
    """Sum of single-spin operators along ``axis`` over ``sites``."""
    sites = sorted(set(sites))
    if not sites:
        raise DomainError("collective operator needs at least one site")
    _check_axis(axis)
    _check_num_spins(num_spins)
    if axis == "z":
        # diagonal: accumulate the z-projection of each basis state directly
        diag = np.zeros(2**num_spins)
        for site in sites:
            if not 1 <= site <= num_spins:
                raise DomainError(f"site must be in 1..{num_spins}, got {site}")
            diag += _site_z_projection(site, num_spins)
        return np.diag(diag).astype(complex)
    return sum(single_spin_operator(site, axis, num_spins) for site in sites)


def _site_z_projection(site: int, num_spins: int) -> np.ndarray:
    bits = (np.arange(2**num_spins) >> (num_spins - site)) & 1
    return 0.5 - bits


def ring_z_projection(num_ring: int) -> np.ndarray:
    """Eigenvalues of the collective ``I_z`` of ``num_ring`` spins, in basis order."""
    _check_num_spins(num_ring)
    return sum(_site_z_projection(site, num_ring) for site in range(1, num_ring + 1))


def diagonal_function(op: np.ndarray, func: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Apply ``func`` to a diagonal operator through its diagonal.

    Raises:
        DomainError: if ``op`` has non-zero off-diagonal entries.
    """
    diag = np.diag(op)
    if np.max(np.abs(op - np.diag(diag)), initial=0.0) > 0:
        raise DomainError("diagonal_function requires a diagonal operator")
    return np.diag(func(diag))


def is_hermitian(op: np.ndarray, atol: float = 1e-12) -> bool:
    return bool(np.max(np.abs(op - op.conj().T), initial=0.0) < atol)


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def partial_trace(op: np.ndarray, keep: SubsystemLabel, num_spins: int) -> np.ndarray:
    """Trace out the complementary subsystem.

    Args:
        op: operator on the full ``2**num_spins`` space.
        keep: ``RING_A`` keeps the ring (factors 1..N-1), ``CENTRAL_B`` keeps the
            central spin.
        num_spins: total number of spins ``N``.

    Returns:
        Operator of dimension ``2**(N-1)`` or ``2``.
    """
    if num_spins < 2:
        raise DomainError(f"partial trace needs at least two spins, got {num_spins}")
    if op.shape != (2**num_spins, 2**num_spins):
        raise DomainError(
            f"operator shape {op.shape} does not match {num_spins} spins"
        )
    dim_a = 2 ** (num_spins - 1)
    blocks = op.reshape(dim_a, 2, dim_a, 2)
    if keep is SubsystemLabel.RING_A:
        return np.einsum("ajbj->ab", blocks)
    if keep is SubsystemLabel.CENTRAL_B:
        return np.einsum("iaib->ab", blocks)
    raise DomainError(f"unknown subsystem {keep!r}")


def trace_cos_sin_identities(num_ring: int, tau: float) -> tuple[float, float]:
    """Return ``(Tr cos(2 tau I_z), Tr sin(2 tau I_z))`` over the ring space.

    ``I_z`` is diagonal, so both functions are evaluated on its diagonal. The
    first value equals ``2**n cos(tau)**n`` and the second vanishes.
    """
    if num_ring < 1:
        raise DomainError(f"ring needs at least one spin, got {num_ring}")
    iz = np.diag(ring_z_projection(num_ring))
    cos_op = diagonal_function(iz, lambda d: np.cos(2 * tau * d))
    sin_op = diagonal_function(iz, lambda d: np.sin(2 * tau * d))
    return float(np.trace(cos_op).real), float(np.trace(sin_op).real)


def conjugate_by_product(rho: np.ndarray, factors: list[np.ndarray]) -> np.ndarray:
    """Return ``U rho U^dagger`` for ``U = factors[0] (x) factors[1] (x) ...``.

    Each 2x2 factor is contracted on its own tensor leg, avoiding the dense
    ``2**N`` unitary.
    """
    n = len(factors)
    if rho.shape != (2**n, 2**n):
        raise DomainError(f"state shape {rho.shape} does not match {n} factors")
    t = rho.reshape((2,) * (2 * n))
    for k, u in enumerate(factors):
        t = np.moveaxis(np.tensordot(u, t, axes=([1], [k])), 0, k)
        t = np.moveaxis(np.tensordot(u.conj(), t, axes=([1], [n + k])), 0, n + k)
    return t.reshape(2**n, 2**n)


def is_permutation_symmetric(op: np.ndarray, num_factors: int, atol: float = 1e-13) -> bool:
    """True if ``op`` commutes with every permutation of its qubit factors.

    Adjacent transpositions generate the symmetric group, so they are the only
    ones checked.
    """
    if num_factors < 2:
        return True
    t = op.reshape((2,) * (2 * num_factors))
    for k in range(num_factors - 1):
        axes = list(range(2 * num_factors))
        axes[k], axes[k + 1] = axes[k + 1], axes[k]
        j = num_factors + k
        axes[j], axes[j + 1] = axes[j + 1], axes[j]
        if np.max(np.abs(t.transpose(axes) - t)) > atol:
            return False
    return True


@dataclass(frozen=True)
class SpinSector:
    """One total-spin sector ``J`` of ``n`` qubits.

    ``basis`` holds ``2J + 1`` orthonormal columns spanning one copy of the
    spin-``J`` irrep, ordered ``M = J, J-1, ..., -J``. The sector occurs
    ``multiplicity`` times in the ``2**n`` space.
    """

    j: float
    multiplicity: int
    basis: np.ndarray


def _collective_lowering(n: int) -> sp.csr_matrix:
    lower = sp.csr_matrix(_RAISE.T)
    ops = []
    for site in range(n):
        ops.append(sp.kron(sp.kron(sp.identity(2**site), lower), sp.identity(2 ** (n - site - 1))))
    return reduce(lambda a, b: a + b, ops).tocsr()


@lru_cache(maxsize=16)
def collective_spin_sectors(n: int) -> tuple[SpinSector, ...]:
    """Decompose ``n`` qubits into total-spin sectors of the collective spin.

    By Schur-Weyl duality every operator commuting with all qubit permutations
    acts as ``F_J (x) 1`` on sector ``J``; its spectrum is the union of the
    spectra of ``F_J = W_J^dagger F W_J`` repeated ``multiplicity`` times.
    """
    _check_num_spins(n)
    lowering = _collective_lowering(n)
    raising = lowering.T.tocsr()
    m_of_state = ring_z_projection(n)
    sectors = []
    for num_down in range(n // 2 + 1):
        j = n / 2 - num_down
        mult = comb(n, num_down) - (comb(n, num_down - 1) if num_down else 0)
        cols = np.flatnonzero(np.isclose(m_of_state, j))
        if num_down == 0:
            top = np.zeros(2**n, dtype=complex)
            top[cols[0]] = 1.0
        else:
            rows = np.flatnonzero(np.isclose(m_of_state, j + 1))
            block = raising[rows][:, cols].toarray()
            kernel = scipy.linalg.null_space(block)
            top = np.zeros(2**n, dtype=complex)
            top[cols] = kernel[:, 0]
        basis = [top]
        m = j
        while m > -j + 0.5:
            nxt = lowering @ basis[-1]
            basis.append(nxt / np.sqrt(j * (j + 1) - m * (m - 1)))
            m -= 1
        sectors.append(SpinSector(j=j, multiplicity=mult, basis=np.column_stack(basis)))
    return tuple(sectors)
