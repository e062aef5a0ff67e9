"""Closed-form high-temperature correlations of the ring / central-spin model.

All expressions are second order in ``u = (N-1) beta omega_B / 2`` and
``v = (N-1) beta omega_A / 2``. The conditional entropy after measuring the
central spin along ``n`` reads

    S_cond = -[n_x^2 X + n_y^2 Y + a(u, v)] / (2 ln2 (N-1)^2)

with direction-independent ``a(u, v) = (N-1) v^2 - 2 (N-1)^3 ln 2`` and the
bracket coefficients ``X``, ``Y`` returned by :func:`conditional_coefficients`.
Which axis minimizes it decides the regime: the interaction component
(``I_y S_z``, ``I_z S_y`` or ``I_z S_x``) that carries the quantum
correlations.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from math import atan, cos, log, pi, sin, sqrt

import numpy as np

from .errors import DomainError, RegimeError
from .qinfo import MeasurementDirection
from .state import SystemConfig

LN2 = log(2)
ARCTAN_SQRT2 = atan(sqrt(2))
BOUNDARY_GUARD = 1e-12


class Regime(enum.Enum):
    IY_SZ = "IySz"
    IZ_SY = "IzSy"
    IZ_SX = "IzSx"
    UNCLASSIFIED = "Unclassified"

    @property
    def axis(self) -> str | None:
        return {"IySz": "z", "IzSy": "y", "IzSx": "x"}.get(self.value)


@dataclass(frozen=True)
class RegimeTag:
    """Regime plus the condition that selected it.

    ``near_boundary`` is set when some deciding inequality holds (or fails) by
    less than ``1e-12`` in relative terms.
    """

    regime: Regime
    condition: str
    near_boundary: bool = False


@dataclass(frozen=True)
class HTParameters:
    num_spins: int
    u: float
    v: float

    @property
    def a_uv(self) -> float:
        n = self.num_spins - 1
        return n * self.v**2 - 2 * n**3 * LN2

    @classmethod
    def of(cls, config: SystemConfig) -> "HTParameters":
        return cls(config.num_spins, config.u, config.v)


def _bb(config: SystemConfig) -> tuple[float, float, int]:
    return config.beta * config.omega_a, config.beta * config.omega_b, config.num_ring


def ht_entropy_total(config: SystemConfig) -> float:
    b_a, b_b, n = _bb(config)
    return config.num_spins - (n * b_a**2 + b_b**2) / (8 * LN2)


def ht_entropy_a(config: SystemConfig, tau: float) -> float:
    b_a, _, n = _bb(config)
    return n - n * b_a**2 * cos(tau) ** 2 / (8 * LN2)


def ht_entropy_b(config: SystemConfig, tau: float) -> float:
    _, b_b, n = _bb(config)
    return 1 - b_b**2 * cos(tau) ** (2 * n) / (8 * LN2)


def ht_mutual_information(config: SystemConfig, tau: float) -> float:
    return ht_entropy_a(config, tau) + ht_entropy_b(config, tau) - ht_entropy_total(config)


def _shape_terms(n: int, tau: float) -> tuple[float, float]:
    """``(1 + cos^n 2t - 2 cos^2n t, 1 - cos^n 2t)``: the u^2 brackets for n_x, n_y."""
    c2n = cos(2 * tau) ** n
    return 1 + c2n - 2 * cos(tau) ** (2 * n), 1 - c2n


def conditional_coefficients(config: SystemConfig, tau: float) -> tuple[float, float]:
    """Bracket coefficients ``(X, Y)`` multiplying ``n_x^2`` and ``n_y^2``."""
    return _coefficients(config.u, config.v, config.num_ring, tau)


def _coefficients(u: float, v: float, n: int, tau: float) -> tuple[float, float]:
    shape_x, shape_y = _shape_terms(n, tau)
    ring = n * v**2 * sin(tau) ** 2
    return u**2 * shape_x / 2 - ring, u**2 * shape_y / 2 - ring


def ht_conditional_entropy(config: SystemConfig, tau: float, n: MeasurementDirection) -> float:
    """Second-order conditional entropy (bits) after measuring along ``n``."""
    if not isinstance(n, MeasurementDirection):
        n = MeasurementDirection(*n)
    x, y = conditional_coefficients(config, tau)
    params = HTParameters.of(config)
    k = config.num_ring
    return -(n.nx**2 * x + n.ny**2 * y + params.a_uv) / (2 * LN2 * k**2)


def _check_window(tau: float) -> None:
    if not 0 <= tau <= pi / 2:
        raise DomainError(f"regime classification is defined for 0 <= tau <= pi/2, got {tau}")


def _strict(lhs: float, rhs: float) -> tuple[bool, bool]:
    """``(lhs > rhs, |lhs - rhs|`` within the guard band``)``."""
    scale = max(abs(lhs), abs(rhs), 1e-300)
    return lhs > rhs, abs(lhs - rhs) <= BOUNDARY_GUARD * scale


def iz_sy_late_factor(num_spins: int) -> float:
    """Ratio ``u^2/v^2`` needed for ``I_z S_y`` on ``pi/4 <= tau < arctan sqrt 2``."""
    n = num_spins - 1
    return 4 / 3 * n / (1 - 3.0 ** (-n))


def gamma_boundaries(num_spins: int) -> dict[str, float]:
    """Critical ``gamma = v/u`` values at which a regime condition switches."""
    n = num_spins - 1
    return {
        "iy_sz": 1.0,
        "iz_sy_early": 1 / sqrt(n),
        "iz_sy_late": 1 / sqrt(iz_sy_late_factor(num_spins)),
        "iz_sx": 1 / sqrt(2 * n),
    }


def classify_regime(config: SystemConfig, tau: float) -> RegimeTag:
    """Sufficient condition for the minimizing measurement axis.

    The conditions are checked in order with strict inequalities; equality
    at a boundary yields ``UNCLASSIFIED``. ``tau`` must lie in ``[0, pi/2]``.
    """
    _check_window(tau)
    return _classify(config.num_spins, config.u, config.v, tau)


def _classify(num_spins: int, u: float, v: float, tau: float) -> RegimeTag:
    n = num_spins - 1
    near = False

    ok, edge = _strict(v, u)
    near |= edge
    if ok:
        return RegimeTag(Regime.IY_SZ, "v > u (gamma > 1)", near)

    if 0 < tau < pi / 4 and n >= 2:
        ok, edge = _strict(u**2, n * v**2)
        near |= edge
        if ok:
            return RegimeTag(Regime.IZ_SY, "u^2 > (N-1) v^2, 0 < tau < pi/4", near)

    if pi / 4 <= tau < ARCTAN_SQRT2:
        ok, edge = _strict(u**2, iz_sy_late_factor(num_spins) * v**2)
        near |= edge
        if ok:
            return RegimeTag(
                Regime.IZ_SY, "u^2 > 4(N-1) v^2 / (3 (1 - 3^-(N-1))), pi/4 <= tau < arctan sqrt 2", near
            )

    if ARCTAN_SQRT2 < tau < pi / 2 and num_spins >= 3 and num_spins % 2 == 1:
        ok, edge = _strict(u**2, 2 * n * v**2)
        near |= edge
        if ok:
            return RegimeTag(Regime.IZ_SX, "u^2 > 2(N-1) v^2, N odd, arctan sqrt 2 < tau < pi/2", near)

    return RegimeTag(Regime.UNCLASSIFIED, "no sufficient condition holds", near)


def _prefactor(config: SystemConfig) -> float:
    return 1 / (2 * LN2 * config.num_ring**2)


def discord_iy_sz(config: SystemConfig, tau: float) -> float:
    """Discord when ``|n_z| = 1`` minimizes the conditional entropy."""
    return _prefactor(config) * config.u**2 * (1 - cos(tau) ** (2 * config.num_ring))


def discord_iz_sy(config: SystemConfig, tau: float) -> float:
    """Discord when ``|n_y| = 1`` minimizes the conditional entropy."""
    n = config.num_ring
    shape_x, _ = _shape_terms(n, tau)
    return _prefactor(config) * (n * config.v**2 * sin(tau) ** 2 + config.u**2 * shape_x / 2)


def discord_iz_sx(config: SystemConfig, tau: float) -> float:
    """Discord when ``|n_x| = 1`` minimizes the conditional entropy."""
    n = config.num_ring
    _, shape_y = _shape_terms(n, tau)
    return _prefactor(config) * (n * config.v**2 * sin(tau) ** 2 + config.u**2 * shape_y / 2)


def classical_iy_sz(config: SystemConfig, tau: float) -> float:
    return config.v**2 * sin(tau) ** 2 / (2 * LN2 * config.num_ring)


def classical_iz_sx(config: SystemConfig, tau: float) -> float:
    shape_x, _ = _shape_terms(config.num_ring, tau)
    return _prefactor(config) * config.u**2 * shape_x / 2


def classical_iz_sy(config: SystemConfig, tau: float) -> float:
    _, shape_y = _shape_terms(config.num_ring, tau)
    return _prefactor(config) * config.u**2 * shape_y / 2


DISCORD_FORMULAS = {
    Regime.IY_SZ: discord_iy_sz,
    Regime.IZ_SY: discord_iz_sy,
    Regime.IZ_SX: discord_iz_sx,
}
CLASSICAL_FORMULAS = {
    Regime.IY_SZ: classical_iy_sz,
    Regime.IZ_SY: classical_iz_sy,
    Regime.IZ_SX: classical_iz_sx,
}


def _tagged(config: SystemConfig, tau: float) -> RegimeTag:
    tag = classify_regime(config, tau)
    if tag.regime is Regime.UNCLASSIFIED:
        raise RegimeError(
            f"no closed-form regime at N={config.num_spins}, gamma={config.gamma:g}, "
            f"tau={tau:g}; use the numeric path"
        )
    return tag


def ht_discord(config: SystemConfig, tau: float) -> tuple[float, RegimeTag]:
    tag = _tagged(config, tau)
    return DISCORD_FORMULAS[tag.regime](config, tau), tag


def ht_classical(config: SystemConfig, tau: float) -> tuple[float, RegimeTag]:
    tag = _tagged(config, tau)
    return CLASSICAL_FORMULAS[tag.regime](config, tau), tag


@dataclass
class AppendixReport:
    """Outcome of the coefficient-inequality checks over a grid.

    ``worst_margin`` maps each inequality to its smallest ``rhs - lhs`` (for
    the bounds) or smallest strict-inequality slack; negative or zero slack
    of a strict inequality is a violation.
    """

    num_spins: int
    checked: dict[str, int] = field(default_factory=dict)
    worst_margin: dict[str, float] = field(default_factory=dict)
    violations: list[tuple[str, float, float, float]] = field(default_factory=list)
    x_coefficient_negative_in_iz_sy: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    def _record(self, name: str, margins: np.ndarray, strict: bool, gammas, taus) -> None:
        margins = np.asarray(margins, dtype=float)
        self.checked[name] = self.checked.get(name, 0) + margins.size
        if margins.size == 0:
            return
        worst = float(margins.min())
        self.worst_margin[name] = min(self.worst_margin.get(name, np.inf), worst)
        bad = margins <= 0 if strict else margins < -BOUNDARY_GUARD
        for idx in np.flatnonzero(bad):
            self.violations.append((name, float(gammas[idx]), float(taus[idx]), float(margins[idx])))


def verify_appendix_inequalities(num_spins: int, tau_grid, gamma_grid) -> AppendixReport:
    """Check the coefficient inequalities behind the regime conditions.

    * ``1 + cos^n 2t - 2 cos^2n t <= 2 n sin^2 t`` and
      ``1 - cos^n 2t <= 2 n sin^2 t`` for every ``tau`` (``n = N - 1``); with
      ``v > u`` these make both coefficients negative so ``|n_z| = 1`` wins.
    * Inside each ``I_z S_y`` window: ``Y > X`` and ``Y > 0``.
    * Inside the ``I_z S_x`` window (``N`` odd): ``X > Y`` and ``X > 0``.

    Coefficients are homogeneous in ``(u, v)`` so ``u = 1, v = gamma``.
    The report also counts grid points of the early ``I_z S_y`` window where
    ``X < 0``; that is allowed (only ``Y`` must be positive) and is
    informational.
    """
    if num_spins < 2:
        raise DomainError(f"num_spins must be >= 2, got {num_spins}")
    n = num_spins - 1
    taus = np.asarray(tau_grid, dtype=float)
    gammas = np.asarray(gamma_grid, dtype=float)
    report = AppendixReport(num_spins)

    c2n = np.cos(2 * taus) ** n
    c_2n = np.cos(taus) ** (2 * n)
    bound = 2 * n * np.sin(taus) ** 2
    nan = np.full_like(taus, np.nan)
    report._record("bound.x", bound - (1 + c2n - 2 * c_2n), False, nan, taus)
    report._record("bound.y", bound - (1 - c2n), False, nan, taus)

    g, t = np.meshgrid(gammas, taus, indexing="ij")
    g, t = g.ravel(), t.ravel()
    coef = np.array([_coefficients(1.0, gi, n, ti) for gi, ti in zip(g, t)]).reshape(-1, 2)
    x, y = coef[:, 0], coef[:, 1]

    sy_early = (n >= 2) & (1.0 > n * g**2) & (t > 0) & (t < pi / 4)
    sy_late = (1.0 > iz_sy_late_factor(num_spins) * g**2) & (t >= pi / 4) & (t < ARCTAN_SQRT2)
    for name, mask in (("iz_sy_early", sy_early), ("iz_sy_late", sy_late)):
        report._record(f"{name}.y_exceeds_x", (y - x)[mask], True, g[mask], t[mask])
        report._record(f"{name}.y_positive", y[mask], True, g[mask], t[mask])
    report.x_coefficient_negative_in_iz_sy = int(np.sum(x[sy_early] < 0))

    if num_spins >= 3 and num_spins % 2 == 1:
        sx = (1.0 > 2 * n * g**2) & (t > ARCTAN_SQRT2) & (t < pi / 2)
        report._record("iz_sx.x_exceeds_y", (x - y)[sx], True, g[sx], t[sx])
        report._record("iz_sx.x_positive", x[sx], True, g[sx], t[sx])
    return report


def correlation_crossings(
    config: SystemConfig, regime: Regime, lo: float, hi: float, resolution: int = 400
) -> list[float]:
    """Times in ``(lo, hi)`` where the closed-form discord and classical part cross.

    Sign changes of ``D - C`` are bracketed on a uniform grid of
    ``resolution`` interior points and polished with Brent's method.
    """
    from scipy.optimize import brentq

    disc, clas = DISCORD_FORMULAS[regime], CLASSICAL_FORMULAS[regime]

    def gap(t):
        return disc(config, t) - clas(config, t)

    taus = np.linspace(lo, hi, resolution + 2)[1:-1]
    vals = np.array([gap(t) for t in taus])
    roots = []
    for i in np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0):
        roots.append(float(brentq(gap, taus[i], taus[i + 1], xtol=1e-14, rtol=1e-14)))
    return roots


def crossing_gamma(num_spins: int, tau: float, u: float = 0.1, tol: float = 1e-13) -> float:
    """``gamma = v/u`` for which ``D = C`` at ``tau`` in the ``I_z S_y`` regime.

    Found by bisection over ``(0, 1/sqrt(N-1))``, the range where the early
    ``I_z S_y`` condition holds. ``D - C`` grows monotonically with ``gamma``.
    """
    if not 0 < tau < pi / 4:
        raise DomainError(f"crossing time must lie in (0, pi/4), got {tau}")

    def gap(gamma):
        config = SystemConfig.from_ht_parameters(num_spins, u, gamma * u)
        return discord_iz_sy(config, tau) - classical_iz_sy(config, tau)

    lo, hi = 0.0, gamma_boundaries(num_spins)["iz_sy_early"]
    if gap(lo + 1e-12) > 0 or gap(hi) < 0:
        raise DomainError(f"no crossing at tau={tau} inside the I_z S_y window")
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if gap(mid) < 0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2
