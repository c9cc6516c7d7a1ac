"""Aggregate interference from cognitive-radio transmitter fields.

Models a Poisson field of secondary transmitters around a protected
receiver, applies distance-based power control, hard-core contention
control, or a hybrid of the two, and produces the distribution of the
aggregate interference three ways: characteristic-function inversion,
closed-form cumulants with a log-normal fit, and direct Monte Carlo.
"""

from .analytic import (
    charfn_for,
    closed_form_cumulants,
    cumulant_for,
    cumulants_from_charfn,
    lognormal_fit,
    stable_density_for,
)
from .channel import CompositeChannelParams, composite_lognormal_moments, sample_gain
from .control import ContentionConfig, HybridConfig, PowerControlConfig
from .inversion import DistributionEstimate, pdf_for_scenario, pdf_from_charfn
from .montecarlo import (
    EmpiricalDistribution,
    compare_distributions,
    coverage_experiment,
    simulate_aggregate,
    simulate_hidden,
    trial_rng,
)
from .pointproc import (
    AnnulusRegion,
    matern_hardcore_thin,
    retaining_probability,
    sample_poisson_annulus,
)
from .scenario import ScenarioConfig

__version__ = "0.1.0"

__all__ = [
    "AnnulusRegion",
    "CompositeChannelParams",
    "ContentionConfig",
    "DistributionEstimate",
    "EmpiricalDistribution",
    "HybridConfig",
    "PowerControlConfig",
    "ScenarioConfig",
    "charfn_for",
    "closed_form_cumulants",
    "compare_distributions",
    "composite_lognormal_moments",
    "coverage_experiment",
    "cumulant_for",
    "cumulants_from_charfn",
    "lognormal_fit",
    "matern_hardcore_thin",
    "pdf_for_scenario",
    "pdf_from_charfn",
    "retaining_probability",
    "sample_gain",
    "sample_poisson_annulus",
    "simulate_aggregate",
    "simulate_hidden",
    "stable_density_for",
    "trial_rng",
]
