"""Python interface to the spectral truncation diagnostics core."""

from ._dgns import (  # noqa: F401
    EnergyLedger,
    GridSpec,
    abc_flow,
    build_ledger,
    capital_psi,
    curl,
    dissipation,
    divergence,
    estimate_threshold,
    iterate_log,
    leray_project,
    log_ps_density,
    log_ps_integral,
    pointwise_suite,
    psi,
    random_divergence_free,
    read_checkpoint,
    riesz_apply,
    run_experiment_file,
    simulate,
    smallness_gate,
    solve_pressure,
    space_norm,
    space_norm_inf,
    split_pressure,
    step,
    taylor_green,
    truncate,
    write_checkpoint,
)

__all__ = [
    "EnergyLedger",
    "GridSpec",
    "abc_flow",
    "build_ledger",
    "capital_psi",
    "curl",
    "dissipation",
    "divergence",
    "estimate_threshold",
    "iterate_log",
    "leray_project",
    "log_ps_density",
    "log_ps_integral",
    "pointwise_suite",
    "psi",
    "random_divergence_free",
    "read_checkpoint",
    "riesz_apply",
    "run_experiment_file",
    "simulate",
    "smallness_gate",
    "solve_pressure",
    "space_norm",
    "space_norm_inf",
    "split_pressure",
    "step",
    "taylor_green",
    "truncate",
    "write_checkpoint",
]
