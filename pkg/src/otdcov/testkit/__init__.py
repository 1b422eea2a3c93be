"""Rank distance covariance tests: statistics, null laws, samplers and power studies."""
from .config import TestConfig, TestReport
from .null import (NullTableCache, critical_value, exact_permutation_law, null_distribution,
                   p_value, permutation_draws, read_null_table, write_null_table)
from .power import power_study
from .run import run_test
from .samplers import (SCENARIOS, generate_scenario, random_rotation, sample_uniform_sphere,
                       sample_vmf)
from .statistics import compute_statistic, directional_dcov, rank_dcov_euclidean

__all__ = [
    "TestConfig", "TestReport", "NullTableCache", "critical_value", "exact_permutation_law",
    "null_distribution", "p_value", "permutation_draws", "read_null_table", "write_null_table",
    "power_study", "run_test", "SCENARIOS", "generate_scenario", "random_rotation",
    "sample_uniform_sphere", "sample_vmf", "compute_statistic", "directional_dcov",
    "rank_dcov_euclidean",
]
