"""Quantum discord and classical correlations in a spin ring with a central spin.

Two independent routes are provided: exact numerics over projective
measurements (:mod:`ringdiscord.qinfo`) and closed-form high-temperature
expressions (:mod:`ringdiscord.analytic`).
"""

from .analytic import (
    Regime,
    RegimeTag,
    classify_regime,
    ht_classical,
    ht_conditional_entropy,
    ht_discord,
    verify_appendix_inequalities,
)
from .errors import DomainError, NotAStateError, RegimeError, StateValidityError
from .operators import SubsystemLabel, partial_trace
from .qinfo import (
    CorrelationReport,
    MeasurementDirection,
    conditional_entropy,
    minimize_conditional_entropy,
    mutual_information,
    numeric_correlations,
    von_neumann_entropy,
)
from .state import RingGeometry, SystemConfig, closed_form_state, evolved_state

__all__ = [
    "CorrelationReport",
    "DomainError",
    "MeasurementDirection",
    "NotAStateError",
    "Regime",
    "RegimeError",
    "RegimeTag",
    "RingGeometry",
    "StateValidityError",
    "SubsystemLabel",
    "SystemConfig",
    "classify_regime",
    "closed_form_state",
    "conditional_entropy",
    "evolved_state",
    "ht_classical",
    "ht_conditional_entropy",
    "ht_discord",
    "minimize_conditional_entropy",
    "mutual_information",
    "numeric_correlations",
    "partial_trace",
    "verify_appendix_inequalities",
    "von_neumann_entropy",
]
