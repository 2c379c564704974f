"""Exact and Monte Carlo counting of solutions to integer linear systems
inside ``[n]`` and inside the binomial random set ``[n]_p``."""

__version__ = "0.1.0"

from .census import SolutionList, enumerate_solutions, solve_box
from .exact_linalg import IntMatrix
from .partitions import Partition, PartitionFamily
from .system_properties import SystemSpec

__all__ = [
    "IntMatrix",
    "Partition",
    "PartitionFamily",
    "SolutionList",
    "SystemSpec",
    "enumerate_solutions",
    "solve_box",
]
