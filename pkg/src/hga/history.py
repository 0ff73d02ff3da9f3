"""Per-generation records for the top-level (meta) runs.

Rows match the CSV layout the harness writes:
generation, best_cost, mean_cost, population_size, phase, wall_ms.
wall_ms is informative only; everything else is deterministic for a
fixed seed.
"""

from __future__ import annotations


class MetaHistory:
    columns = ("generation", "best_cost", "mean_cost", "population_size", "phase", "wall_ms")

    def __init__(self, baseline_cost: float | None = None):
        self.rows: list[tuple] = []
        self.baseline_cost = baseline_cost

    def record(
        self,
        generation: int,
        best_cost: float,
        mean_cost: float,
        population_size: int,
        phase: str,
        wall_ms: float,
    ) -> None:
        self.rows.append((generation, best_cost, mean_cost, population_size, phase, wall_ms))

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]

    def __len__(self) -> int:
        return len(self.rows)
