"""Exact quantum-information quantities for the ring / central-spin bipartition.

Everything here works on the full density matrix without any high-temperature
expansion: von Neumann entropies from eigenvalues, projective measurements of
the central spin, and a global search of the conditional entropy over the
Bloch sphere. Entropies are in bits.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from .errors import DomainError, NotAStateError
from .operators import (
    SPIN_MATRICES,
    SubsystemLabel,
    collective_spin_sectors,
    is_permutation_symmetric,
    num_spins_of,
    partial_trace,
)
from .state import RingGeometry, SystemConfig, evolved_state

NEGATIVE_EIGENVALUE_TOL = 1e-10
DEGENERATE_BRANCH_TOL = 1e-14
TIE_TOL = 1e-12


@dataclass(frozen=True)
class MeasurementDirection:
    """Unit vector on the Bloch sphere fixing the projectors ``1/2 +- n.S``."""

    nx: float
    ny: float
    nz: float

    def __post_init__(self):
        norm2 = self.nx**2 + self.ny**2 + self.nz**2
        if abs(norm2 - 1) > 1e-12:
            raise DomainError(f"measurement direction must be a unit vector, |n|^2 = {norm2!r}")

    @classmethod
    def from_vector(cls, vec) -> "MeasurementDirection":
        vec = np.asarray(vec, dtype=float)
        vec = vec / np.linalg.norm(vec)
        return cls(*(float(c) for c in vec))

    @classmethod
    def from_angles(cls, theta: float, phi: float) -> "MeasurementDirection":
        return cls(np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta))

    def as_array(self) -> np.ndarray:
        return np.array([self.nx, self.ny, self.nz])

    def canonical(self) -> "MeasurementDirection":
        """Representative of ``{n, -n}`` whose first non-zero of (nz, ny, nx) is positive."""
        for c in (self.nz, self.ny, self.nx):
            if c != 0:
                return self if c > 0 else MeasurementDirection(-self.nx, -self.ny, -self.nz)
        return self

    def dominant_axis(self) -> str:
        return "xyz"[int(np.argmax(np.abs(self.as_array())))]


@dataclass(frozen=True)
class MeasurementEnsemble:
    """Outcome probabilities and post-measurement ring states."""

    p0: float
    p1: float
    rho0: Optional[np.ndarray]
    rho1: Optional[np.ndarray]


class Method(enum.Enum):
    NUMERIC = "Numeric"
    ANALYTIC_HT = "AnalyticHT"


@dataclass(frozen=True)
class CorrelationReport:
    tau: float
    discord: float
    classical: float
    mutual_information: float
    optimal_direction: Optional[MeasurementDirection]
    conditional_entropy_min: float
    method: Method


def entropy_from_eigenvalues(evals: np.ndarray) -> float:
    """``-sum l log2 l`` with ``0 log 0 = 0``; tiny negative values are clamped."""
    evals = np.clip(np.asarray(evals, dtype=float), 0.0, None)
    nz = evals[evals > 0]
    return float(-np.sum(nz * np.log2(nz)))


def von_neumann_entropy(rho: np.ndarray) -> float:
    """Von Neumann entropy in bits.

    Raises:
        NotAStateError: if an eigenvalue is below ``-1e-10``.
    """
    evals = np.linalg.eigvalsh(rho)
    if evals.min() < -NEGATIVE_EIGENVALUE_TOL:
        raise NotAStateError(f"matrix has eigenvalue {evals.min():g} < 0")
    return entropy_from_eigenvalues(evals)


def projectors(n: MeasurementDirection) -> tuple[np.ndarray, np.ndarray]:
    """``(1/2 + n.S, 1/2 - n.S)`` on the central spin."""
    if not isinstance(n, MeasurementDirection):
        n = MeasurementDirection(*n)
    ns = n.nx * SPIN_MATRICES["x"] + n.ny * SPIN_MATRICES["y"] + n.nz * SPIN_MATRICES["z"]
    half = np.eye(2) / 2
    return half + ns, half - ns


def _branch_operators(rho: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split ``Tr_B[(1 (x) P) rho (1 (x) P)]`` into parts constant and linear in n.

    For ``P = (1 + n.sigma) / 2`` the unnormalized ring operator is
    ``const + sum_a n_a lin[a]``.
    """
    num = num_spins_of(rho)
    if num < 2:
        raise DomainError("state must span at least two spins")
    dim_a = 2 ** (num - 1)
    blk = rho.reshape(dim_a, 2, dim_a, 2)
    r00, r01, r10, r11 = blk[:, 0, :, 0], blk[:, 0, :, 1], blk[:, 1, :, 0], blk[:, 1, :, 1]
    const = (r00 + r11) / 2
    lin = np.stack([(r01 + r10) / 2, 1j * (r01 - r10) / 2, (r00 - r11) / 2])
    return const, lin


def measure_b(rho: np.ndarray, n: MeasurementDirection) -> MeasurementEnsemble:
    """Projectively measure the central spin along ``n``.

    Returns the outcome probabilities and normalized ring states. A branch with
    probability below ``1e-14`` carries ``None`` for its state.
    """
    num = num_spins_of(rho)
    dim_a = 2 ** (num - 1)
    probs, states = [], []
    for proj in projectors(n):
        full = np.kron(np.eye(dim_a), proj)
        projected = full @ rho @ full
        p = float(np.trace(projected).real)
        probs.append(p)
        if p < DEGENERATE_BRANCH_TOL:
            states.append(None)
        else:
            states.append(partial_trace(projected, SubsystemLabel.RING_A, num) / p)
    return MeasurementEnsemble(probs[0], probs[1], states[0], states[1])


def conditional_entropy(rho: np.ndarray, n: MeasurementDirection) -> float:
    """``p0 S(rho_0) + p1 S(rho_1)`` after measuring the central spin along ``n``."""
    ens = measure_b(rho, n)
    total = 0.0
    for p, state in ((ens.p0, ens.rho0), (ens.p1, ens.rho1)):
        if state is not None:
            total += p * von_neumann_entropy(state)
    return total


def mutual_information(rho: np.ndarray, config: Optional[SystemConfig] = None) -> float:
    """``S(rho_A) + S(rho_B) - S(rho)`` with exact entropies."""
    num = config.num_spins if config is not None else num_spins_of(rho)
    return (
        von_neumann_entropy(partial_trace(rho, SubsystemLabel.RING_A, num))
        + von_neumann_entropy(partial_trace(rho, SubsystemLabel.CENTRAL_B, num))
        - von_neumann_entropy(rho)
    )


def _spectrum_terms(evals: np.ndarray, mult: float) -> tuple[np.ndarray, np.ndarray]:
    """Per-row ``(sum l log2 l, sum l)`` of stacked spectra, each counted ``mult`` times."""
    evals = np.clip(evals, 0.0, None)
    with np.errstate(divide="ignore", invalid="ignore"):
        xlogx = np.where(evals > 0, evals * np.log2(evals), 0.0)
    return mult * xlogx.sum(axis=-1), mult * evals.sum(axis=-1)


class ConditionalEntropyObjective:
    """Fast evaluator of the conditional entropy as a function of direction.

    The unnormalized post-measurement ring operator is affine in ``n``, so the
    four ring-space blocks are extracted once. When they commute with every
    permutation of the ring spins (true for the model without dipolar
    couplings) spectra are taken on the collective-spin sectors, which is
    exact and reduces a ``2**(N-1)`` diagonalization to a few of size at most
    ``N``. Otherwise the dense ring-space blocks are diagonalized.
    """

    _CHUNK_ELEMENTS = 2**24

    def __init__(self, rho: np.ndarray, reduce: bool = True):
        const, lin = _branch_operators(rho)
        self.num_ring = num_spins_of(rho) - 1
        blocks = [const, *lin]
        self.reduced = bool(
            reduce
            and self.num_ring >= 2
            and all(is_permutation_symmetric(b, self.num_ring) for b in blocks)
        )
        if self.reduced:
            self._sectors = []
            for sector in collective_spin_sectors(self.num_ring):
                w = sector.basis
                mats = np.stack([w.conj().T @ b @ w for b in blocks])
                self._sectors.append((mats, float(sector.multiplicity)))
        else:
            self._sectors = [(np.stack(blocks), 1.0)]

    def __call__(self, n) -> float:
        return float(self.batch(np.asarray(n, dtype=float)[None, :])[0])

    def batch(self, directions: np.ndarray) -> np.ndarray:
        """Conditional entropies for an ``(K, 3)`` array of unit vectors.

        Each branch contributes ``p S(M/p) = -sum l log2 l + p log2 p`` where
        ``l`` runs over the unnormalized spectrum of all sectors together.
        """
        directions = np.atleast_2d(directions)
        k = len(directions)
        # rows 0..k-1: outcome 0 (direction n); rows k..2k-1: outcome 1 (direction -n)
        signed = np.concatenate([directions, -directions])
        xlogx = np.zeros(2 * k)
        prob = np.zeros(2 * k)
        for mats, mult in self._sectors:
            dim = mats.shape[-1]
            step = max(1, self._CHUNK_ELEMENTS // (dim * dim))
            for start in range(0, 2 * k, step):
                d = signed[start : start + step]
                ops = mats[0][None] + np.einsum("ka,aij->kij", d, mats[1:])
                a, b = _spectrum_terms(np.linalg.eigvalsh(ops), mult)
                xlogx[start : start + step] += a
                prob[start : start + step] += b
        live = prob > DEGENERATE_BRANCH_TOL
        branch = np.where(live, -xlogx + prob * np.log2(np.where(live, prob, 1.0)), 0.0)
        return branch[:k] + branch[k:]


def _tangent_basis(c: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    helper = np.array([1.0, 0.0, 0.0]) if abs(c[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(c, helper)
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(c, e1)


def _tie_key(n: np.ndarray) -> tuple[float, float, float]:
    a = np.abs(n)
    return (a[2], a[1], a[0])


def sphere_grid(n_theta: int, n_phi: int) -> np.ndarray:
    """Half-sphere grid; ``n`` and ``-n`` give the same measurement."""
    theta = np.linspace(0.0, np.pi / 2, n_theta)
    phi = np.linspace(0.0, 2 * np.pi, n_phi, endpoint=False)
    t, p = np.meshgrid(theta, phi, indexing="ij")
    return np.stack([np.sin(t) * np.cos(p), np.sin(t) * np.sin(p), np.cos(t)], axis=-1).reshape(-1, 3)


def minimize_conditional_entropy(
    rho: np.ndarray,
    grid: tuple[int, int] = (64, 128),
    n_starts: int = 5,
    reduce: bool = True,
    objective: Optional[ConditionalEntropyObjective] = None,
) -> tuple[MeasurementDirection, float]:
    """Global minimum of the conditional entropy over projective measurements.

    A coarse ``(theta, phi)`` grid over the half sphere is followed by
    Nelder-Mead polishing from the ``n_starts`` best grid points, each in a
    tangent-plane chart so the poles are not singular. The coordinate axes
    are always scored as candidates. Among candidates within ``1e-12`` of the
    best value, the one with the largest ``(|nz|, |ny|, |nx|)`` wins.
    """
    f = objective if objective is not None else ConditionalEntropyObjective(rho, reduce=reduce)
    points = sphere_grid(*grid)
    values = f.batch(points)
    order = np.lexsort((np.arange(len(values)), values))
    step = np.pi / (2 * max(grid[0] - 1, 1))

    candidates: list[tuple[float, np.ndarray]] = []
    for idx in order[:n_starts]:
        c = points[idx]
        e1, e2 = _tangent_basis(c)

        def chart(x, c=c, e1=e1, e2=e2):
            v = c + x[0] * e1 + x[1] * e2
            return v / np.linalg.norm(v)

        res = minimize(
            lambda x: f(chart(x)),
            np.zeros(2),
            method="Nelder-Mead",
            options={
                "xatol": 1e-8,
                "fatol": 1e-12,
                "maxiter": 4000,
                "initial_simplex": np.array([[0.0, 0.0], [step, 0.0], [0.0, step]]),
            },
        )
        candidates.append((float(res.fun), chart(res.x)))
        candidates.append((float(values[idx]), c))
    axes = np.eye(3)
    for a, val in zip(axes, f.batch(axes)):
        candidates.append((float(val), a))

    best = min(val for val, _ in candidates)
    tied = [n for val, n in candidates if val <= best + TIE_TOL]
    winner = max(tied, key=_tie_key)
    return MeasurementDirection.from_vector(winner).canonical(), best


def numeric_correlations(
    config: SystemConfig,
    tau: float,
    geometry: Optional[RingGeometry] = None,
    grid: tuple[int, int] = (64, 128),
    n_starts: int = 5,
    reduce: bool = True,
) -> CorrelationReport:
    """Brute-force discord, classical correlations and mutual information.

    The state is built by exact unitary evolution (including the dipolar ring
    Hamiltonian when ``geometry`` is given); nothing is expanded in ``beta``.
    """
    rho = evolved_state(config, tau, geometry)
    num = config.num_spins
    s_a = von_neumann_entropy(partial_trace(rho, SubsystemLabel.RING_A, num))
    s_b = von_neumann_entropy(partial_trace(rho, SubsystemLabel.CENTRAL_B, num))
    s_ab = von_neumann_entropy(rho)
    mi = s_a + s_b - s_ab
    direction, s_min = minimize_conditional_entropy(rho, grid=grid, n_starts=n_starts, reduce=reduce)
    classical = s_a - s_min
    return CorrelationReport(
        tau=tau,
        discord=mi - classical,
        classical=classical,
        mutual_information=mi,
        optimal_direction=direction,
        conditional_entropy_min=s_min,
        method=Method.NUMERIC,
    )
