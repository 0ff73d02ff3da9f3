"""Domain-agnostic GA engine: populations, selection strategies, and the
per-generation step shared by every solver in the package."""

from .config import GaConfig, HierConfig, SelectionSpec, frac_count
from .engine import GaResult, History, run, step_generation
from .population import Individual, Population
from .selection import select

__all__ = [
    "GaConfig",
    "GaResult",
    "HierConfig",
    "History",
    "Individual",
    "Population",
    "SelectionSpec",
    "frac_count",
    "run",
    "select",
    "step_generation",
]
