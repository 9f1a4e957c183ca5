"""Perturbation engine combining hypervirial relations with the Hellmann-Feynman theorem."""

from .engine import (
    EnergySeries,
    MomentTable,
    bootstrap_moments,
    energy_from_hf,
    evaluate_series,
    perturbation_series,
    recurrence_step_1d,
    recurrence_step_2d,
    relation_residuals,
    relation_terms,
    required_moments,
)
from .closed_forms import (
    OSCILLATOR_FORMS,
    coulomb_e1_legacy,
    oscillator_e2,
    oscillator_q00,
    oscillator_q02,
)
from .jet import Jet, as_jet
from .systems import (
    COULOMB_VARIANTS,
    CoulombSpec,
    OscillatorSpec,
    zeroth_energy_coulomb,
    zeroth_energy_oscillator,
)

__all__ = [
    "Jet",
    "as_jet",
    "OscillatorSpec",
    "CoulombSpec",
    "COULOMB_VARIANTS",
    "zeroth_energy_oscillator",
    "zeroth_energy_coulomb",
    "MomentTable",
    "EnergySeries",
    "relation_terms",
    "recurrence_step_1d",
    "recurrence_step_2d",
    "bootstrap_moments",
    "energy_from_hf",
    "required_moments",
    "perturbation_series",
    "evaluate_series",
    "relation_residuals",
    "OSCILLATOR_FORMS",
    "oscillator_q00",
    "oscillator_q02",
    "oscillator_e2",
    "coulomb_e1_legacy",
]
