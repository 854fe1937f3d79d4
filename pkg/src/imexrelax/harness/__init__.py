from .config import ExperimentConfig, load_config
from .experiments import (
    convergence_rate_log3,
    error_norm,
    oscillation_indicator,
    run_convergence_study,
    run_klf_demo,
    run_steady_state_study,
    self_convergence_errors,
)
from .report import CSV_HEADER, ExperimentReport, ReportRow

__all__ = [
    "ExperimentConfig",
    "load_config",
    "convergence_rate_log3",
    "error_norm",
    "oscillation_indicator",
    "run_convergence_study",
    "run_klf_demo",
    "run_steady_state_study",
    "self_convergence_errors",
    "CSV_HEADER",
    "ExperimentReport",
    "ReportRow",
]
