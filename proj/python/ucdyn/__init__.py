"""User-creator feature dynamics on the unit sphere."""

from ._core import (
    CreatorImpact,
    Policy,
    RunConfig,
    State,
    UcdynError,
    UserImpact,
    check_absorbing_bipolar,
    check_absorbing_clusters,
    detect_bipolarization,
    detect_clusters,
    detect_consensus,
    load_embeddings,
    measure,
    oracle_convex_cone,
    oracle_single_creator_bound,
    oracle_update_bounds,
    parse_config,
    policy_rows,
    project,
    run,
    run_reps,
    run_sweep,
    sample_assignment,
    single_creator_steps,
    step,
)

__all__ = [
    "CreatorImpact",
    "Policy",
    "RunConfig",
    "State",
    "UcdynError",
    "UserImpact",
    "check_absorbing_bipolar",
    "check_absorbing_clusters",
    "detect_bipolarization",
    "detect_clusters",
    "detect_consensus",
    "load_embeddings",
    "measure",
    "oracle_convex_cone",
    "oracle_single_creator_bound",
    "oracle_update_bounds",
    "parse_config",
    "policy_rows",
    "project",
    "run",
    "run_reps",
    "run_sweep",
    "sample_assignment",
    "single_creator_steps",
    "step",
]
