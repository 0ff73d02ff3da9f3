"""Adaptive penalty scheduling and the constraint-switch experiment.

The schedule starts every vertex at the maximum penalty and walks each
one linearly toward its true value, crossing it at the midpoint and
overshooting below it in the second half.  The adaptive run trains two
meta generations per schedule entry (entries clamped at zero when
applied, since penalties are non-negative), then switches to the true
penalties until convergence or budget exhaustion.

The constraint-switch experiment trains under one random high/low
penalty assignment for t generations, redraws the high-penalty set, and
keeps training, to measure whether early training helps after the
constraints move.
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from ..ga.config import HierConfig
from ..history import MetaHistory
from ..rng import SWITCH, stream
from ..tsp.greedy import greedy_two_approx
from ..tsp.instance import EuclideanInstance, path_cost
from .hierarchy import (
    BestTracker,
    SoftTspState,
    check_penalties,
    default_hier_config,
    run_phase,
)

CONVERGENCE_PATIENCE = 10  # meta generations without improvement
GENS_PER_SCHEDULE_ENTRY = 2


def adaptive_penalty_schedule(penalties, n_steps: int) -> list[np.ndarray]:
    """n_steps+1 penalty maps interpolating from uniform-max down past the
    true values.

    Entry 0 sets every vertex to max(penalties); each later entry
    subtracts (max - p[i]) / (n_steps/2) per vertex, so entry n_steps/2
    equals the true map and later entries overshoot below it (possibly
    negative -- callers clamp at application time).
    """
    pen = np.asarray(penalties, dtype=float)
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    if n_steps % 2:
        raise ValueError("n_steps must be even")
    start = np.full_like(pen, pen.max())
    diff = (start - pen) / (n_steps / 2)
    return [start - t * diff for t in range(n_steps + 1)]


def run_adaptive(
    inst: EuclideanInstance,
    penalties,
    cfg: HierConfig | None = None,
    n_steps: int = 10,
) -> tuple[np.ndarray, float, MetaHistory]:
    """Scheduled-penalty run; cfg.meta_generations is the total budget.

    History rows are tagged "schedule:<entry>" while the schedule is
    active and "final" afterwards.  The returned best tour/cost are
    always scored under the true penalties.
    """
    if cfg is None:
        cfg = default_hier_config()
    pen = check_penalties(inst, penalties)
    schedule = adaptive_penalty_schedule(pen, n_steps)
    total = cfg.meta_generations

    state = SoftTspState(inst, cfg)
    history = MetaHistory(baseline_cost=path_cost(inst, greedy_two_approx(inst)))
    tracker = BestTracker(pen)

    schedule_gens = min(GENS_PER_SCHEDULE_ENTRY * len(schedule), total)

    def scheduled(g: int):
        entry = g // GENS_PER_SCHEDULE_ENTRY
        return np.clip(schedule[entry], 0.0, None), f"schedule:{entry}"

    done = run_phase(
        state, history, schedule_gens, scheduled, final=schedule_gens == total, tracker=tracker
    )
    remaining = total - done
    if remaining > 0:
        run_phase(
            state,
            history,
            remaining,
            lambda g: (pen, "final"),
            final=True,
            tracker=tracker,
            stop_unimproved=CONVERGENCE_PATIENCE,
        )
    return tracker.tour, tracker.cost, history


def switch_penalties(
    n: int, seed: int, phase: int, n_high: int = 20, high: float = 10.0, low: float = 0.1
) -> np.ndarray:
    """Penalty map with `n_high` random high-penalty vertices; the draw is
    keyed by (seed, phase) so the post-switch redraw is independent."""
    rng = stream(seed, SWITCH, phase)
    pen = np.full(n, low)
    pen[rng.choice(n, size=n_high, replace=False)] = high
    return pen


def constraint_switch_experiment(
    inst: EuclideanInstance,
    t,
    total_gens: int,
    seeds,
    cfg: HierConfig | None = None,
    n_high: int = 20,
    high: float = 10.0,
    low: float = 0.1,
) -> dict:
    """Train t generations under one penalty assignment, redraw the
    high-penalty vertex set, and train the remaining total_gens - t.

    `t` may be a single switch point or a list of them.  The report maps
    each t and seed to the post-switch best-cost curve (one point per
    post-switch generation) and keeps the full histories, whose rows are
    tagged "pre-switch"/"post-switch".
    """
    if inst.n < n_high:
        raise ValueError(f"instance must have at least {n_high} vertices")
    t_values = [int(t)] if np.isscalar(t) else [int(v) for v in t]
    for tv in t_values:
        if not 0 <= tv <= total_gens:
            raise ValueError("switch generation t must be in [0, total_gens]")
    seeds = [int(s) for s in seeds]
    if cfg is None:
        cfg = default_hier_config()

    baseline = path_cost(inst, greedy_two_approx(inst))
    curves: dict[int, dict[int, list[float]]] = {}
    histories: dict[tuple[int, int], MetaHistory] = {}
    for tv in t_values:
        curves[tv] = {}
        for seed in seeds:
            run_cfg = HierConfig(
                meta=replace(cfg.meta, seed=seed),
                sub=cfg.sub,
                k_subgens=cfg.k_subgens,
                meta_generations=total_gens,
            )
            state = SoftTspState(inst, run_cfg)
            history = MetaHistory(baseline_cost=baseline)
            pen_pre = switch_penalties(inst.n, seed, 0, n_high, high, low)
            if tv > 0:
                run_phase(state, history, tv, lambda g: (pen_pre, "pre-switch"), final=False)
            pen_post = switch_penalties(inst.n, seed, 1, n_high, high, low)
            run_phase(
                state, history, total_gens - tv, lambda g: (pen_post, "post-switch"), final=True
            )
            histories[(tv, seed)] = history
            curves[tv][seed] = [
                row[1] for row in history.rows if row[4] == "post-switch"
            ]
    return {
        "penalty_values": (high, low),
        "total_generations": total_gens,
        "t_values": t_values,
        "seeds": seeds,
        "baseline_cost": baseline,
        "curves": curves,
        "histories": histories,
    }
