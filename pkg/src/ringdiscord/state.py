"""Physical configuration, thermal state, pulse and unitary evolution.

Units: hbar = 1 and every frequency is an angular frequency. The only time
variable exposed is the dimensionless ``tau = g t / 2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg

from .errors import DomainError, StateValidityError
from .operators import (
    MAX_SPINS,
    SPIN_MATRICES,
    SubsystemLabel,
    collective_operator,
    conjugate_by_product,
    partial_trace,
    ring_z_projection,
    single_spin_operator,
)


@dataclass(frozen=True)
class SystemConfig:
    """Parameters of the ``(N-1) x 1`` ring + central spin model.

    Attributes:
        num_spins: total number of spins ``N`` (ring has ``N - 1``).
        beta: inverse temperature.
        omega_a: Larmor frequency of the ring spins.
        omega_b: Larmor frequency of the central spin.
        g: ring-center zz coupling constant.
        checked: when True (default) the high-temperature validity
            ``(N-1) beta omega < 1`` is enforced for both frequencies.
    """

    num_spins: int
    beta: float
    omega_a: float
    omega_b: float
    g: float = 1.0
    checked: bool = field(default=True, compare=False)

    def __post_init__(self):
        if int(self.num_spins) != self.num_spins or not 2 <= self.num_spins <= MAX_SPINS:
            raise DomainError(f"num_spins must be an integer in 2..{MAX_SPINS}, got {self.num_spins}")
        for name in ("beta", "omega_a", "omega_b"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive, got {getattr(self, name)}")
        if self.g == 0:
            raise DomainError("g must be non-zero")
        if self.checked:
            n = self.num_spins - 1
            if n * self.beta * self.omega_a >= 1:
                raise DomainError(
                    f"omega_a violates high-temperature validity: (N-1) beta omega_a = "
                    f"{n * self.beta * self.omega_a:g} >= 1"
                )
            if n * self.beta * self.omega_b >= 1:
                raise DomainError(
                    f"omega_b violates high-temperature validity: (N-1) beta omega_b = "
                    f"{n * self.beta * self.omega_b:g} >= 1"
                )

    @classmethod
    def unchecked(cls, num_spins: int, beta: float, omega_a: float, omega_b: float, g: float = 1.0):
        """Build a config without the high-temperature validity check."""
        return cls(num_spins, beta, omega_a, omega_b, g, checked=False)

    @classmethod
    def from_ht_parameters(cls, num_spins: int, u: float, v: float, beta: float = 1.0, g: float = 1.0):
        """Build a config with prescribed ``u`` and ``v`` at the given ``beta``."""
        n = num_spins - 1
        return cls(num_spins, beta, 2 * v / (n * beta), 2 * u / (n * beta), g)

    @property
    def num_ring(self) -> int:
        return self.num_spins - 1

    @property
    def u(self) -> float:
        return self.num_ring * self.beta * self.omega_b / 2

    @property
    def v(self) -> float:
        return self.num_ring * self.beta * self.omega_a / 2

    @property
    def gamma(self) -> float:
        return self.omega_a / self.omega_b


@dataclass(frozen=True)
class RingGeometry:
    """Ring site positions and the secular dipolar couplings between them."""

    radius: float
    couplings: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.couplings, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise DomainError(f"couplings must be a square matrix, got shape {d.shape}")
        if not np.allclose(d, d.T, rtol=0, atol=1e-14) or np.any(np.diag(d) != 0):
            raise DomainError("couplings must be symmetric with zero diagonal")
        object.__setattr__(self, "couplings", d)

    @property
    def num_sites(self) -> int:
        return self.couplings.shape[0]

    @classmethod
    def from_angles(cls, angles, d0: float, radius: float = 1.0):
        """Sites at polar ``angles`` on a circle, field normal to the ring plane.

        ``d_ij = d0 / r_ij**3`` with ``r_ij`` the chord distance.
        """
        angles = np.asarray(angles, dtype=float)
        diff = angles[:, None] - angles[None, :]
        chord = 2 * radius * np.abs(np.sin(diff / 2))
        with np.errstate(divide="ignore"):
            d = np.where(chord > 0, d0 / chord**3, 0.0)
        np.fill_diagonal(d, 0.0)
        return cls(radius, d)

    @classmethod
    def regular(cls, num_sites: int, d0: float, radius: float = 1.0):
        return cls.from_angles(2 * np.pi * np.arange(num_sites) / num_sites, d0, radius)

    @classmethod
    def random(cls, num_sites: int, d0: float, rng: np.random.Generator, jitter: float = 0.3):
        """Regular ring with each site displaced by up to ``jitter`` of the spacing."""
        spacing = 2 * np.pi / num_sites
        angles = spacing * (np.arange(num_sites) + rng.uniform(-jitter, jitter, num_sites))
        return cls.from_angles(angles, d0)


def _spin_ops(config: SystemConfig):
    n_tot = config.num_spins
    ring = range(1, n_tot)
    return {
        "Ix": collective_operator("x", ring, n_tot),
        "Iy": collective_operator("y", ring, n_tot),
        "Iz": collective_operator("z", ring, n_tot),
        "Sx": single_spin_operator(n_tot, "x", n_tot),
        "Sy": single_spin_operator(n_tot, "y", n_tot),
        "Sz": single_spin_operator(n_tot, "z", n_tot),
    }


def initial_state(config: SystemConfig) -> np.ndarray:
    """High-temperature equilibrium state ``2**-N (1 + b_A I_z + b_B S_z)``.

    Raises:
        StateValidityError: if some eigenvalue is not positive (reachable only
            through an unchecked config).
    """
    n_tot = config.num_spins
    diag = (
        1
        + config.beta * config.omega_a * np.repeat(ring_z_projection(config.num_ring), 2)
        + config.beta * config.omega_b * np.tile([0.5, -0.5], 2 ** config.num_ring)
    ) / 2**n_tot
    if diag.min() <= 0:
        raise StateValidityError(
            f"initial state has non-positive eigenvalue {diag.min():g}; "
            "parameters are far outside the high-temperature regime"
        )
    return np.diag(diag).astype(complex)


def apply_pulse(rho: np.ndarray) -> np.ndarray:
    """Conjugate by ``exp(-i pi/2 (I_y + S_y))``, a 90 degree y-pulse on every spin."""
    num = rho.shape[0].bit_length() - 1
    rot = scipy.linalg.expm(-1j * np.pi / 2 * SPIN_MATRICES["y"])
    return conjugate_by_product(rho, [rot] * num)


def hamiltonian_zz(config: SystemConfig) -> np.ndarray:
    """``g sum_i I_iz S_z``; diagonal in the computational basis."""
    iz = np.repeat(ring_z_projection(config.num_ring), 2)
    sz = np.tile([0.5, -0.5], 2 ** config.num_ring)
    return np.diag(config.g * iz * sz).astype(complex)


def hamiltonian_dz(geometry: RingGeometry, config: SystemConfig) -> np.ndarray:
    """Secular dipolar ring Hamiltonian ``sum_{i<j} d_ij (3 I_iz I_jz - I_i . I_j)``."""
    n_ring = config.num_ring
    if geometry.num_sites != n_ring:
        raise DomainError(
            f"geometry has {geometry.num_sites} sites but the ring has {n_ring} spins"
        )
    n_tot = config.num_spins
    ops = {a: [single_spin_operator(i, a, n_tot) for i in range(1, n_tot)] for a in "xyz"}
    h = np.zeros((2**n_tot, 2**n_tot), dtype=complex)
    for i in range(n_ring):
        for j in range(i + 1, n_ring):
            d = geometry.couplings[i, j]
            if d == 0:
                continue
            zz = ops["z"][i] @ ops["z"][j]
            dot = ops["x"][i] @ ops["x"][j] + ops["y"][i] @ ops["y"][j] + zz
            h += d * (3 * zz - dot)
    return h


def evolve_exact(
    rho0: np.ndarray,
    config: SystemConfig,
    tau: float,
    include_dipolar: bool = False,
    geometry: Optional[RingGeometry] = None,
) -> np.ndarray:
    """Propagate ``rho0`` for dimensionless time ``tau`` (``t = 2 tau / g``).

    Without the dipolar term the propagator is a diagonal phase; with it the
    total Hamiltonian is diagonalized.
    """
    if include_dipolar and geometry is None:
        raise DomainError("include_dipolar requires a ring geometry")
    t = 2 * tau / config.g
    h = hamiltonian_zz(config)
    if not include_dipolar:
        phase = np.exp(-1j * np.diag(h).real * t)
        return phase[:, None] * rho0 * phase.conj()[None, :]
    h = h + hamiltonian_dz(geometry, config)
    evals, evecs = np.linalg.eigh(h)
    u = (evecs * np.exp(-1j * evals * t)) @ evecs.conj().T
    return u @ rho0 @ u.conj().T


def closed_form_state(config: SystemConfig, tau: float) -> np.ndarray:
    """Assemble the evolved state directly from its operator expression.

    ``2**-N {1 + b_A [I_x cos tau + 2 I_y S_z sin tau]
    + b_B [S_x cos(2 tau I_z) + S_y sin(2 tau I_z)]}``
    """
    ops = _spin_ops(config)
    iz_ring = ring_z_projection(config.num_ring)
    cos_iz = np.kron(np.diag(np.cos(2 * tau * iz_ring)), np.eye(2))
    sin_iz = np.kron(np.diag(np.sin(2 * tau * iz_ring)), np.eye(2))
    b_a = config.beta * config.omega_a
    b_b = config.beta * config.omega_b
    dim = 2**config.num_spins
    rho = (
        np.eye(dim)
        + b_a * (ops["Ix"] * np.cos(tau) + 2 * ops["Iy"] @ ops["Sz"] * np.sin(tau))
        + b_b * (ops["Sx"] @ cos_iz + ops["Sy"] @ sin_iz)
    )
    return rho / dim


def reduced_state_a(config: SystemConfig, tau: float) -> np.ndarray:
    """Ring state ``2**-(N-1) [1 + b_A I_x cos tau]``."""
    n_ring = config.num_ring
    ix = collective_operator("x", range(1, n_ring + 1), n_ring)
    return (np.eye(2**n_ring) + config.beta * config.omega_a * ix * np.cos(tau)) / 2**n_ring


def reduced_state_b(config: SystemConfig, tau: float) -> np.ndarray:
    """Central spin state ``[1 + b_B S_x cos(tau)**(N-1)] / 2``."""
    sx = SPIN_MATRICES["x"]
    return (np.eye(2) + config.beta * config.omega_b * sx * np.cos(tau) ** config.num_ring) / 2


def evolved_state(config: SystemConfig, tau: float, geometry: Optional[RingGeometry] = None) -> np.ndarray:
    """Thermal state, pulse, then exact evolution (with dipolar ring if ``geometry``)."""
    rho = apply_pulse(initial_state(config))
    return evolve_exact(rho, config, tau, include_dipolar=geometry is not None, geometry=geometry)


def reduced_states(rho: np.ndarray, config: SystemConfig) -> tuple[np.ndarray, np.ndarray]:
    """Partial traces ``(rho_A, rho_B)`` of a full-space state."""
    return (
        partial_trace(rho, SubsystemLabel.RING_A, config.num_spins),
        partial_trace(rho, SubsystemLabel.CENTRAL_B, config.num_spins),
    )
