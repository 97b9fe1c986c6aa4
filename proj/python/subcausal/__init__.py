"""Subgroup causal effects from randomized experiments with a nonignorably
missing binary covariate: closed-form identification, EM maximum likelihood,
Gibbs posterior sampling, partial-identification bounds, and goodness-of-fit
and sensitivity analysis."""

from subcausal._core import (
    BoundsResult,
    CausalEstimate,
    ConditionReport,
    ConvergenceError,
    DataError,
    EmFit,
    GofResult,
    JointDistribution,
    MechanismSpec,
    ModelError,
    ObservedTable,
    PosteriorDraws,
    PosteriorSummary,
    __version__,
    bounds_m5,
    check_expert_assumptions,
    check_m2_rank,
    check_m3_condition,
    check_m4_condition,
    effect_modification_test,
    effects_from_joint,
    em_fit,
    eval_measure,
    fixture,
    generate_custom,
    generate_dataset,
    gibbs_run,
    identify_m1,
    identify_m2,
    identify_m3_cor,
    identify_m3_joint,
    identify_m4,
    identify_mx,
    ingest_csv,
    ingest_json,
    load_table,
    lrt_gof,
    mask_and_recover,
    observed_loglik,
    population_log_or,
    posterior_summary,
    profile_sensitivity,
    saturated_loglik,
    select_mechanism,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
