"""Simulation and analysis of pre- and post-selected quantum ensembles.

The package computes conditional probabilities for systems selected at both
ends of a time interval, cross-checks them against seeded Monte Carlo
ensembles, and mechanically judges counterfactual claims about measurements
that were never performed.
"""
from __future__ import annotations

from .abl import (
    ImpossiblePostSelection,
    SelectionContext,
    abl_distribution,
    post_outcome_distribution,
    sequence_probability,
)
from .core import (
    EPS_NORM,
    EPS_PROB,
    BipartiteState,
    DensityMatrix,
    DimensionMismatch,
    Distribution,
    FilterStage,
    MeasureStage,
    ProjectiveMeasurement,
    PureState,
    UnitaryOp,
    UnitaryStage,
    ZeroProbabilityOutcome,
    axis_pvm,
    born_distribution,
    collapse,
    embed_pvm,
    evolve,
    measure_subsystem,
    reduced_density,
    tensor,
    total_variation,
)
from .counterfactual import (
    EPS_COTEN,
    Classification,
    CotenabilityReport,
    CounterfactualStatement,
    Flavor,
    Verdict,
    cotenability_report,
    counterfactual_distribution,
    evaluate,
)
from .ensemble import (
    AgreementReport,
    EmpiricalDistribution,
    EmptySelection,
    EnsembleStats,
    Protocol,
    agreement_check,
    conditional_frequencies,
    run_ensemble,
    trial_outcome_labels,
    trial_records,
)
from .scenarios import (
    ScenarioInfo,
    ScenarioReport,
    UnknownScenario,
    available_scenarios,
    run_scenario,
)
from .verify import SuiteResult, VerificationReport, run_verification

__version__ = "0.1.0"

__all__ = [
    "EPS_COTEN",
    "EPS_NORM",
    "EPS_PROB",
    "AgreementReport",
    "BipartiteState",
    "Classification",
    "CotenabilityReport",
    "CounterfactualStatement",
    "DensityMatrix",
    "DimensionMismatch",
    "Distribution",
    "EmpiricalDistribution",
    "EmptySelection",
    "EnsembleStats",
    "FilterStage",
    "Flavor",
    "ImpossiblePostSelection",
    "MeasureStage",
    "ProjectiveMeasurement",
    "Protocol",
    "PureState",
    "ScenarioInfo",
    "ScenarioReport",
    "SelectionContext",
    "SuiteResult",
    "UnitaryOp",
    "UnitaryStage",
    "UnknownScenario",
    "Verdict",
    "VerificationReport",
    "ZeroProbabilityOutcome",
    "abl_distribution",
    "agreement_check",
    "available_scenarios",
    "axis_pvm",
    "born_distribution",
    "collapse",
    "conditional_frequencies",
    "cotenability_report",
    "counterfactual_distribution",
    "embed_pvm",
    "evaluate",
    "evolve",
    "measure_subsystem",
    "post_outcome_distribution",
    "reduced_density",
    "run_ensemble",
    "run_scenario",
    "run_verification",
    "sequence_probability",
    "tensor",
    "total_variation",
    "trial_outcome_labels",
    "trial_records",
]
