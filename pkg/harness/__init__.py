from harness.rates import fit_rate
from harness.runner import check_experiment, load_config, reference_optimum, run_cell, run_experiment, write_results

__all__ = [
    "check_experiment",
    "fit_rate",
    "load_config",
    "reference_optimum",
    "run_cell",
    "run_experiment",
    "write_results",
]
