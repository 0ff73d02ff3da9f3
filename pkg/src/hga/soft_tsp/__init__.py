"""Prize-collecting open-path TSP solved hierarchically: a meta GA over
vertex subsets, each carrying its own TSP sub-solver."""

from .adaptive import adaptive_penalty_schedule, constraint_switch_experiment, run_adaptive, switch_penalties
from .core import repair_subpopulation, soft_cost, subset_crossover, subset_mutation
from .hierarchy import default_hier_config, run_hierarchical

__all__ = [
    "adaptive_penalty_schedule",
    "constraint_switch_experiment",
    "default_hier_config",
    "repair_subpopulation",
    "run_adaptive",
    "run_hierarchical",
    "soft_cost",
    "subset_crossover",
    "subset_mutation",
    "switch_penalties",
]
