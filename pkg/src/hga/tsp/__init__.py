"""Open-path TSP on Euclidean instances: permutation GA, greedy
2-approximation, and instance utilities."""

from .greedy import greedy_two_approx
from .instance import EuclideanInstance, path_cost, random_instance, tsp_fitness
from .operators import ordered_crossover, swap_mutation
from .solver import default_tsp_config, run_tsp_solver

__all__ = [
    "EuclideanInstance",
    "default_tsp_config",
    "greedy_two_approx",
    "ordered_crossover",
    "path_cost",
    "random_instance",
    "run_tsp_solver",
    "swap_mutation",
    "tsp_fitness",
]
