import math

import numpy as np
import pytest

from ringdiscord import analytic
from ringdiscord.analytic import (
    ARCTAN_SQRT2,
    CLASSICAL_FORMULAS,
    DISCORD_FORMULAS,
    LN2,
    Regime,
    classify_regime,
    conditional_coefficients,
    gamma_boundaries,
    ht_classical,
    ht_conditional_entropy,
    ht_discord,
    ht_entropy_a,
    ht_entropy_b,
    ht_entropy_total,
    ht_mutual_information,
    verify_appendix_inequalities,
)
from ringdiscord.errors import DomainError, RegimeError
from ringdiscord.operators import SubsystemLabel, partial_trace
from ringdiscord.qinfo import MeasurementDirection, conditional_entropy, numeric_correlations, von_neumann_entropy
from ringdiscord.state import SystemConfig, evolved_state


def ht_config(num_spins, gamma, u=0.03):
    return SystemConfig.from_ht_parameters(num_spins, u, gamma * u)


class TestEntropies:
    def test_infinite_temperature(self):
        config = SystemConfig(4, 1e-9, 1.0, 1.0)
        assert ht_entropy_total(config) == pytest.approx(4.0, abs=1e-15)

    @pytest.mark.parametrize("num_spins", [2, 3, 6])
    def test_central_fully_mixed_at_quarter_period(self, num_spins):
        assert ht_entropy_b(SystemConfig(num_spins, 1.0, 0.1, 0.1), math.pi / 2) == 1.0

    def test_worked_total(self):
        value = ht_entropy_total(SystemConfig(3, 1.0, 0.1, 0.1))
        assert value == pytest.approx(3 - 0.03 / (8 * LN2), abs=1e-15)
        assert value == pytest.approx(2.99459, abs=1e-5)

    def test_against_exact(self):
        config = SystemConfig(4, 0.5, 0.1, 0.1)
        rho = evolved_state(config, 0.4)
        assert abs(von_neumann_entropy(rho) - ht_entropy_total(config)) < 1e-5

    @pytest.mark.parametrize("num_spins", [3, 5])
    def test_fourth_order_residuals(self, num_spins):
        def residuals(beta):
            config = SystemConfig(num_spins, beta, 0.1, 0.1)
            rho = evolved_state(config, 0.5)
            return np.array([
                abs(von_neumann_entropy(rho) - ht_entropy_total(config)),
                abs(von_neumann_entropy(partial_trace(rho, SubsystemLabel.RING_A, num_spins)) - ht_entropy_a(config, 0.5)),
                abs(von_neumann_entropy(partial_trace(rho, SubsystemLabel.CENTRAL_B, num_spins)) - ht_entropy_b(config, 0.5)),
            ])

        ratios = residuals(1.0) / residuals(0.5)
        assert np.all((ratios > 14) & (ratios < 18))


class TestConditionalEntropy:
    def test_independent_of_nz_sign(self):
        config = ht_config(5, 0.4)
        a = ht_conditional_entropy(config, 0.7, MeasurementDirection.from_vector([0.3, 0.4, 0.5]))
        b = ht_conditional_entropy(config, 0.7, MeasurementDirection.from_vector([0.3, 0.4, -0.5]))
        assert a == b

    @pytest.mark.parametrize("num_spins", [2, 3, 7])
    def test_brackets_vanish_at_zero_time(self, num_spins):
        config = ht_config(num_spins, 0.4)
        assert conditional_coefficients(config, 0.0) == (0.0, 0.0)

    def test_close_to_exact(self):
        config = SystemConfig(5, 1.0, 0.02, 0.05)
        n = MeasurementDirection.from_vector([0.2, 0.7, 0.3])
        exact = conditional_entropy(evolved_state(config, 0.5), n)
        assert abs(exact - ht_conditional_entropy(config, 0.5, n)) < 1e-6

    def test_fourth_order_residual(self):
        n = MeasurementDirection.from_vector([0.5, 0.5, 0.7])
        res = []
        for beta in (1.0, 0.5):
            config = SystemConfig(3, beta, 0.1, 0.1)
            res.append(abs(conditional_entropy(evolved_state(config, 0.9), n) - ht_conditional_entropy(config, 0.9, n)))
        assert 14 <= res[0] / res[1] <= 18

    def test_accepts_tuple(self):
        config = ht_config(3, 2.0)
        assert ht_conditional_entropy(config, 0.5, (0.0, 0.0, 1.0)) == ht_conditional_entropy(
            config, 0.5, MeasurementDirection(0.0, 0.0, 1.0)
        )


class TestClassifyRegime:
    @pytest.mark.parametrize(
        "gamma, tau, expected",
        [(2.0, 0.3, Regime.IY_SZ), (0.4, 0.5, Regime.IZ_SY), (0.3, 1.1, Regime.IZ_SX)],
    )
    def test_worked_examples(self, gamma, tau, expected):
        assert classify_regime(ht_config(5, gamma), tau).regime is expected

    def test_boundary_is_unclassified(self):
        # u^2 = (N-1) v^2 exactly: gamma = 1/2 for N = 5
        tag = classify_regime(ht_config(5, 0.5, u=0.04), 0.3)
        assert tag.regime is Regime.UNCLASSIFIED
        assert tag.near_boundary

    def test_equal_frequencies_unclassified(self):
        assert classify_regime(ht_config(5, 1.0), 0.3).regime is Regime.UNCLASSIFIED

    def test_quarter_period_uses_late_condition(self):
        gamma = 0.45  # between the late (0.430) and early (0.5) thresholds for N = 5
        config = ht_config(5, gamma)
        assert classify_regime(config, math.pi / 4 - 1e-9).regime is Regime.IZ_SY
        assert classify_regime(config, math.pi / 4).regime is Regime.UNCLASSIFIED

    def test_even_ring_has_no_iz_sx(self):
        assert classify_regime(ht_config(4, 0.1), 1.2).regime is Regime.UNCLASSIFIED

    def test_two_spins_early_window(self):
        assert classify_regime(ht_config(2, 0.1), 0.3).regime is Regime.UNCLASSIFIED

    @pytest.mark.parametrize("tau", [-0.1, 1.6])
    def test_outside_window(self, tau):
        with pytest.raises(DomainError):
            classify_regime(ht_config(3, 2.0), tau)

    def test_gamma_boundaries(self):
        b = gamma_boundaries(5)
        assert b["iz_sy_early"] == pytest.approx(0.5)
        assert b["iz_sx"] == pytest.approx(1 / math.sqrt(8))
        assert b["iz_sy_late"] == pytest.approx(math.sqrt(3 * (1 - 3**-4) / 16))

    def test_arctan_constant(self):
        assert ARCTAN_SQRT2 == pytest.approx(0.9553, abs=1e-4)


class TestDiscord:
    def test_iy_sz_quarter_period(self):
        d, tag = ht_discord(ht_config(3, 2.0), math.pi / 2)
        assert tag.regime is Regime.IY_SZ
        assert d == pytest.approx(0.03**2 / (8 * LN2), rel=1e-14)
        assert d == pytest.approx(1.6231e-4, rel=1e-4)

    @pytest.mark.parametrize("regime", [Regime.IY_SZ, Regime.IZ_SY, Regime.IZ_SX])
    def test_zero_time(self, regime):
        config = ht_config(5, 0.3)
        assert DISCORD_FORMULAS[regime](config, 0.0) == 0.0
        assert CLASSICAL_FORMULAS[regime](config, 0.0) == 0.0

    def test_iz_sy_term_by_term(self):
        config = ht_config(3, 0.4)
        u, v = config.u, config.v
        bracket = math.cos(math.pi / 2) ** 2 + 1 - 2 * math.cos(math.pi / 4) ** 4
        expected = (2 * v**2 * 0.5 + u**2 * bracket / 2) / (2 * LN2 * 4)
        assert DISCORD_FORMULAS[Regime.IZ_SY](config, math.pi / 4) == pytest.approx(expected, rel=1e-14)

    def test_unclassified_raises(self):
        with pytest.raises(RegimeError):
            ht_discord(ht_config(4, 0.1), 1.2)
        with pytest.raises(RegimeError):
            ht_classical(ht_config(4, 0.1), 1.2)

    def test_iy_sz_monotone(self):
        config = ht_config(7, 2.0)
        values = [ht_discord(config, t)[0] for t in np.linspace(0, math.pi / 2, 200)]
        assert np.all(np.diff(values) >= 0)

    def test_iz_sy_iz_sx_differ_by_bracket_difference(self, rng):
        for _ in range(20):
            config = ht_config(int(rng.integers(3, 10)), float(rng.uniform(0.05, 0.3)))
            tau = float(rng.uniform(0, math.pi / 2))
            x, y = conditional_coefficients(config, tau)
            diff = DISCORD_FORMULAS[Regime.IZ_SY](config, tau) - DISCORD_FORMULAS[Regime.IZ_SX](config, tau)
            assert abs(diff - (x - y) / (2 * LN2 * config.num_ring**2)) < 1e-14


class TestClassical:
    def test_iy_sz_quarter_period(self):
        config = ht_config(6, 2.0)
        c, _ = ht_classical(config, math.pi / 2)
        assert c == pytest.approx(config.v**2 / (2 * LN2 * 5), rel=1e-14)

    @pytest.mark.parametrize("num_spins, gamma, tau", [(3, 2.0, 0.4), (5, 0.4, 0.3), (5, 0.4, 0.9), (7, 0.2, 1.2)])
    def test_sum_is_mutual_information(self, num_spins, gamma, tau):
        config = ht_config(num_spins, gamma)
        d, tag = ht_discord(config, tau)
        c, _ = ht_classical(config, tau)
        assert tag.regime is not Regime.UNCLASSIFIED
        assert abs(d + c - ht_mutual_information(config, tau)) < 1e-14

    def test_classical_is_conditional_entropy_gap(self):
        config = ht_config(5, 0.3)
        tau = 1.2
        axis = MeasurementDirection(1.0, 0.0, 0.0)
        expected = ht_entropy_a(config, tau) - ht_conditional_entropy(config, tau, axis)
        assert ht_classical(config, tau)[0] == pytest.approx(expected, abs=1e-14)


class TestAppendixInequalities:
    def test_bound_worked_value(self):
        n, tau = 2, math.pi / 4
        assert 1 - math.cos(2 * tau) ** n == pytest.approx(1.0)
        assert 2 * n * math.sin(tau) ** 2 == pytest.approx(2.0)
        report = verify_appendix_inequalities(3, [tau], [0.5])
        assert report.worst_margin["bound.y"] == pytest.approx(1.0)

    def test_bounds_tight_at_zero(self):
        report = verify_appendix_inequalities(4, [0.0], [0.5])
        assert report.worst_margin["bound.x"] == 0.0
        assert report.worst_margin["bound.y"] == 0.0
        assert report.ok

    def test_iz_sx_scalar_condition(self):
        assert (1 - math.tan(1.2) ** 2) ** 2 > 1
        assert math.tan(1.2) ** 2 == pytest.approx(6.62, abs=0.01)
        report = verify_appendix_inequalities(5, [1.2], [0.3])
        assert report.checked["iz_sx.x_exceeds_y"] == 1
        assert report.ok

    @pytest.mark.parametrize("num_spins", [2, 3, 4, 5, 6, 7, 8, 9])
    def test_coarse_grid(self, num_spins):
        taus = np.linspace(0, math.pi / 2, 62)[1:-1]
        report = verify_appendix_inequalities(num_spins, taus, np.linspace(0.01, 3, 60))
        assert report.ok

    def test_negative_x_is_informational(self):
        report = verify_appendix_inequalities(3, np.linspace(0.01, 0.78, 50), np.linspace(0.01, 0.7, 50))
        assert report.x_coefficient_negative_in_iz_sy > 0
        assert report.ok

    def test_detects_violation(self):
        # the real inequalities never fail, so feed a margin by hand
        report = analytic.AppendixReport(5)
        report._record("demo", np.array([0.1, -0.2]), True, [1, 2], [0.3, 0.4])
        assert not report.ok

    def test_rejects_single_spin(self):
        with pytest.raises(DomainError):
            verify_appendix_inequalities(1, [0.1], [0.1])


class TestCrossings:
    def test_crossing_gamma_hits_target(self):
        gamma = analytic.crossing_gamma(9, 0.521)
        config = ht_config(9, gamma, u=0.1)
        d = DISCORD_FORMULAS[Regime.IZ_SY](config, 0.521)
        c = CLASSICAL_FORMULAS[Regime.IZ_SY](config, 0.521)
        assert abs(d - c) < 1e-14
        assert gamma == pytest.approx(0.2227485380351615, abs=1e-12)

    def test_crossing_gamma_domain(self):
        with pytest.raises(DomainError):
            analytic.crossing_gamma(9, 1.0)

    def test_iy_sz_crossings(self):
        # D and C from the IySz formulas cross when v^2 sin^2 n = u^2 (1 - cos^2n)
        config = ht_config(3, 1.2)
        roots = analytic.correlation_crossings(config, Regime.IY_SZ, 0, math.pi / 2)
        for r in roots:
            assert abs(DISCORD_FORMULAS[Regime.IY_SZ](config, r) - CLASSICAL_FORMULAS[Regime.IY_SZ](config, r)) < 1e-14


@pytest.mark.parametrize("tau", [math.pi / 40, math.pi / 20])
def test_small_time_relative_deviation(tau):
    # the second-order discord is not uniform in tau: its relative error
    # grows like (beta omega_B / tau)^2 as tau -> 0
    config = SystemConfig(3, 1.0, 0.06, 0.03)
    d_ht, _ = ht_discord(config, tau)
    rel = (numeric_correlations(config, tau).discord - d_ht) / d_ht
    assert rel * (tau / 0.03) ** 2 == pytest.approx(1.0, abs=0.05)
