"""Hierarchical genetic algorithms: a general GA engine, a soft-TSP
meta-solver whose individuals are vertex subsets, and a regression
meta-solver that evolves objective hyperparameters against a hidden
oracle, plus exact reference solvers and an experiment harness."""

from .exact import exact_soft_tsp, exact_tsp_path, least_squares_fit
from .ga.config import GaConfig, HierConfig, SelectionSpec
from .history import MetaHistory
from .regression.dataset import Dataset, generate_dataset
from .regression.hierarchy import run_regression_hierarchy
from .regression.hyper import HyperGenome
from .regression.oracle import OracleSpec, oracle_cost
from .regression.solver import run_regression_solver
from .soft_tsp.adaptive import constraint_switch_experiment, run_adaptive
from .soft_tsp.hierarchy import run_hierarchical
from .tsp.greedy import greedy_two_approx
from .tsp.instance import EuclideanInstance, path_cost, random_instance
from .tsp.solver import run_tsp_solver

__all__ = [
    "Dataset",
    "EuclideanInstance",
    "GaConfig",
    "HierConfig",
    "HyperGenome",
    "MetaHistory",
    "OracleSpec",
    "SelectionSpec",
    "constraint_switch_experiment",
    "exact_soft_tsp",
    "exact_tsp_path",
    "generate_dataset",
    "greedy_two_approx",
    "least_squares_fit",
    "oracle_cost",
    "path_cost",
    "random_instance",
    "run_adaptive",
    "run_hierarchical",
    "run_regression_hierarchy",
    "run_regression_solver",
    "run_tsp_solver",
]

__version__ = "0.1.0"
