"""Polynomial regression with an evolved objective: a coefficient GA per
hyperparameter genome, scored by a hidden oracle."""

from .dataset import Dataset, generate_dataset
from .hierarchy import default_regression_hier_config, run_regression_hierarchy
from .hyper import HyperGenome
from .losses import LossParams, RegionWeight, composite_objective, weighted_loss
from .oracle import OracleSpec, oracle_cost
from .polynomial import eval_poly
from .solver import default_regression_config, run_regression_solver

__all__ = [
    "Dataset",
    "HyperGenome",
    "LossParams",
    "OracleSpec",
    "RegionWeight",
    "composite_objective",
    "default_regression_config",
    "default_regression_hier_config",
    "eval_poly",
    "generate_dataset",
    "oracle_cost",
    "run_regression_hierarchy",
    "run_regression_solver",
    "weighted_loss",
]
