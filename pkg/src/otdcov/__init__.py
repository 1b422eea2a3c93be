"""Distribution-free tests of independence built on optimal-transport ranks.

Submodules
----------
geometry
    Hypersphere primitives: geodesics, log/exp maps, Fréchet mean, cap law.
dcov
    Distance covariance and correlation.
assignment
    Exact optimal assignment between a sample and a grid.
ranks_rd
    Center-outward ranks, signs and scores in R^d.
ranks_sphere
    Directional ranks and signs on S^{d-1}.
testkit
    Test statistics, permutation null laws, samplers and power studies.
cli
    Command-line entry point ``otdcov``.
"""
from . import assignment, dcov, geometry, ranks_rd, ranks_sphere, testkit
from .exceptions import DomainError, PoleCollisionError
from .testkit import TestConfig, TestReport, run_test

__version__ = "0.1.0"

__all__ = ["assignment", "dcov", "geometry", "ranks_rd", "ranks_sphere", "testkit",
           "DomainError", "PoleCollisionError", "TestConfig", "TestReport", "run_test"]
