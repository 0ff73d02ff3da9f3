"""Experiment configuration, batch execution, and result persistence.

One ExperimentConfig fully describes a batch run: instance/dataset
parameters, GA overrides for both levels, solver seeds, and the output
directory.  run_experiment writes, per run, a CSV of generation rows, a
JSON summary with baselines, the exact config snapshot for replay, and
an SVG learning-curve plot.  Everything except the wall_ms column is a
pure function of the config.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .exact import MAX_EXACT, exact_soft_tsp, exact_tsp_path, least_squares_fit
from .ga.config import GaConfig, HierConfig
from .history import MetaHistory
from .plotting import Series, emit_plot
from .regression.dataset import generate_dataset
from .regression.hierarchy import default_regression_hier_config, run_regression_hierarchy
from .regression.losses import RegionWeight
from .regression.oracle import HUBER, WEIGHTED_HUBER, OracleSpec, oracle_cost
from .regression.polynomial import eval_poly
from .rng import PENALTY, stream
from .soft_tsp.adaptive import constraint_switch_experiment, run_adaptive
from .soft_tsp.hierarchy import default_hier_config, run_hierarchical
from .tsp.greedy import greedy_two_approx
from .tsp.instance import path_cost, random_instance

TSP_EXPERIMENTS = ("soft_tsp", "adaptive_tsp", "constraint_switch", "oracle")
REGRESSION_EXPERIMENTS = ("regression", "weighted_regression")
EXPERIMENTS = TSP_EXPERIMENTS + REGRESSION_EXPERIMENTS

GA_FIELDS = (
    "initial_population",
    "min_population",
    "mutation_rate",
    "crossover_rate",
    "point_crossover_prob",
    "max_population",
)
SELECTION_FIELDS = ("kind", "percentile", "sample_fraction", "keep_fraction")


class ConfigError(ValueError):
    """Bad experiment configuration; the CLI maps this to exit code 1."""


@dataclass
class ExperimentConfig:
    experiment: str
    # vertex-set instances (TSP families)
    n: int = 30
    instance_seed: int = 0
    penalty: float = 0.4
    penalty_range: tuple[float, float] | None = None
    n_steps: int = 10  # adaptive_tsp schedule length
    t_values: tuple[int, ...] = (0, 5, 10, 20)  # constraint_switch points
    n_high: int = 20
    high_penalty: float = 10.0
    low_penalty: float = 0.1
    # datasets (regression families)
    coeffs: tuple[float, ...] = (4.0, 3.0, 4.0)
    x_lo: float = 0.0
    x_hi: float = 5.0
    n_points: int = 100
    noise_sigma: float = 0.2
    delta: float = 0.2
    # solver
    seeds: tuple[int, ...] = (0,)
    meta_generations: int = 30
    k_subgens: int | None = None  # None -> family default
    meta: dict = field(default_factory=dict)  # GaConfig overrides, dotted keys
    sub: dict = field(default_factory=dict)
    output_dir: str = "runs"


def default_config(experiment: str) -> ExperimentConfig:
    """Family defaults: TSP tables for the vertex experiments, the
    curve-fitting tables and datasets for the regression ones."""
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment: {experiment!r}")
    cfg = ExperimentConfig(experiment=experiment)
    if experiment == "oracle":
        cfg.n = 7
    elif experiment == "weighted_regression":
        cfg.coeffs = (4.0, 3.0, 4.0, 0.0, -5.0, 0.0, 1.0)
        cfg.x_lo, cfg.x_hi = -2.0, 2.0
    return cfg


_FIELD_NAMES = tuple(f.name for f in fields(ExperimentConfig))


def _flatten(mapping: dict, prefix: str = "") -> dict:
    out: dict = {}
    for k, v in mapping.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        else:
            out[key] = v
    return out


def _assign(data: dict, key: str, value) -> None:
    root, _, rest = str(key).partition(".")
    if root not in _FIELD_NAMES:
        raise ConfigError(f"unknown config key: {key!r}")
    if root in ("meta", "sub"):
        if rest:
            data[root][rest] = value
        elif isinstance(value, dict):
            data[root].update(_flatten(value))
        else:
            raise ConfigError(f"{root}: must be a mapping of GA overrides")
    elif rest:
        raise ConfigError(f"unknown config key: {key!r}")
    else:
        data[root] = value


def _is_int(v) -> bool:
    return isinstance(v, (int, np.integer)) and not isinstance(v, bool)


def _check_int(name: str, v, lo: int | None = None, hi: int | None = None) -> int:
    if not _is_int(v):
        raise ConfigError(f"{name}: must be an integer, got {v!r}")
    if lo is not None and v < lo:
        raise ConfigError(f"{name}: must be >= {lo}, got {v}")
    if hi is not None and v > hi:
        raise ConfigError(f"{name}: must be <= {hi}, got {v}")
    return int(v)


def _check_float(name: str, v, lo: float | None = None) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float, np.floating, np.integer)):
        raise ConfigError(f"{name}: must be a number, got {v!r}")
    v = float(v)
    if not np.isfinite(v):
        raise ConfigError(f"{name}: must be finite")
    if lo is not None and v < lo:
        raise ConfigError(f"{name}: must be >= {lo}, got {v}")
    return v


def _validate(cfg: ExperimentConfig) -> ExperimentConfig:
    if cfg.experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment: {cfg.experiment!r}")
    cfg.instance_seed = _check_int("instance_seed", cfg.instance_seed, lo=0)
    cfg.meta_generations = _check_int("meta_generations", cfg.meta_generations, lo=1)
    if cfg.k_subgens is not None:
        cfg.k_subgens = _check_int("k_subgens", cfg.k_subgens, lo=1)

    seeds = tuple(cfg.seeds) if isinstance(cfg.seeds, (list, tuple)) else (cfg.seeds,)
    if not seeds:
        raise ConfigError("seeds: must not be empty")
    cfg.seeds = tuple(_check_int("seeds", s, lo=0) for s in seeds)
    if len(set(cfg.seeds)) != len(cfg.seeds):
        raise ConfigError("seeds: must be unique")

    if cfg.experiment in TSP_EXPERIMENTS:
        cfg.n = _check_int("n", cfg.n, lo=1)
        if cfg.experiment == "oracle":
            _check_int("n", cfg.n, hi=MAX_EXACT)
        cfg.penalty = _check_float("penalty", cfg.penalty, lo=0.0)
        if cfg.penalty_range is not None:
            pr = tuple(cfg.penalty_range)
            if len(pr) != 2:
                raise ConfigError("penalty_range: must be [low, high]")
            lo = _check_float("penalty_range", pr[0], lo=0.0)
            hi = _check_float("penalty_range", pr[1], lo=0.0)
            if hi < lo:
                raise ConfigError("penalty_range: high must be >= low")
            cfg.penalty_range = (lo, hi)
        cfg.n_steps = _check_int("n_steps", cfg.n_steps, lo=2)
        if cfg.n_steps % 2:
            raise ConfigError(f"n_steps: must be even, got {cfg.n_steps}")
        if cfg.experiment == "constraint_switch":
            tv = tuple(
                _check_int("t_values", t, lo=0, hi=cfg.meta_generations) for t in cfg.t_values
            )
            if not tv:
                raise ConfigError("t_values: must not be empty")
            if len(set(tv)) != len(tv):
                raise ConfigError("t_values: must be unique")
            cfg.t_values = tv
            cfg.n_high = _check_int("n_high", cfg.n_high, lo=1, hi=cfg.n)
            cfg.high_penalty = _check_float("high_penalty", cfg.high_penalty, lo=0.0)
            cfg.low_penalty = _check_float("low_penalty", cfg.low_penalty, lo=0.0)
    else:
        coeffs = tuple(cfg.coeffs) if isinstance(cfg.coeffs, (list, tuple)) else ()
        if not coeffs:
            raise ConfigError("coeffs: must be a non-empty list")
        cfg.coeffs = tuple(_check_float("coeffs", c) for c in coeffs)
        cfg.x_lo = _check_float("x_lo", cfg.x_lo)
        cfg.x_hi = _check_float("x_hi", cfg.x_hi)
        if not cfg.x_lo < cfg.x_hi:
            raise ConfigError("x_lo: must be < x_hi")
        cfg.n_points = _check_int("n_points", cfg.n_points, lo=2)
        cfg.noise_sigma = _check_float("noise_sigma", cfg.noise_sigma, lo=0.0)
        cfg.delta = _check_float("delta", cfg.delta)
        if cfg.delta <= 0:
            raise ConfigError(f"delta: must be > 0, got {cfg.delta}")

    if not isinstance(cfg.output_dir, (str, Path)):
        raise ConfigError("output_dir: must be a path")
    # surfaces bad meta/sub override keys or values now, at exit-code-1 time
    _hier_config(cfg, cfg.seeds[0])
    return cfg


def parse_config(experiment: str, config_path=None, overrides=()) -> ExperimentConfig:
    """Merged config: family defaults <- JSON file <- override pairs
    (rightmost wins).  Raises ConfigError naming the offending key."""
    data = asdict(default_config(experiment))
    if config_path is not None:
        try:
            text = Path(config_path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        try:
            loaded = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {config_path}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        for key, value in loaded.items():
            _assign(data, key, value)
    for key, value in overrides:
        _assign(data, key, value)
    if data["experiment"] != experiment:
        raise ConfigError(
            f"experiment: config says {data['experiment']!r}, subcommand says {experiment!r}"
        )
    if data["penalty_range"] is not None:
        data["penalty_range"] = tuple(data["penalty_range"])
    for name in ("t_values", "coeffs", "seeds"):
        if isinstance(data[name], list):
            data[name] = tuple(data[name])
    return _validate(ExperimentConfig(**data))


def _apply_ga(base: GaConfig, overrides: dict, where: str) -> GaConfig:
    ga_kwargs: dict = {}
    sel_kwargs: dict = {}
    for key, value in overrides.items():
        root, _, rest = str(key).partition(".")
        if root == "selection" and rest in SELECTION_FIELDS:
            sel_kwargs[rest] = value
        elif key in GA_FIELDS:
            ga_kwargs[key] = value
        elif key == "seed":
            raise ConfigError(f"{where}.seed: use --seed/--seeds to pick solver seeds")
        else:
            raise ConfigError(f"unknown config key: {where}.{key}")
    try:
        if sel_kwargs:
            ga_kwargs["selection"] = replace(base.selection, **sel_kwargs)
        return replace(base, **ga_kwargs) if ga_kwargs else base
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _hier_config(cfg: ExperimentConfig, seed: int) -> HierConfig:
    if cfg.experiment in REGRESSION_EXPERIMENTS:
        base = default_regression_hier_config(seed)
    else:
        base = default_hier_config(seed)
    return HierConfig(
        meta=replace(_apply_ga(base.meta, cfg.meta, "meta"), seed=seed),
        sub=_apply_ga(base.sub, cfg.sub, "sub"),
        k_subgens=base.k_subgens if cfg.k_subgens is None else cfg.k_subgens,
        meta_generations=cfg.meta_generations,
    )


def _penalties(cfg: ExperimentConfig, n: int) -> np.ndarray:
    if cfg.penalty_range is not None:
        lo, hi = cfg.penalty_range
        return stream(cfg.instance_seed, PENALTY).uniform(lo, hi, n)
    return np.full(n, float(cfg.penalty))


def write_history_csv(path, history: MetaHistory) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(MetaHistory.columns)
        for gen, best, mean, size, phase, wall in history.rows:
            writer.writerow(
                [
                    str(int(gen)),
                    repr(float(best)),
                    repr(float(mean)),
                    str(int(size)),
                    str(phase),
                    format(float(wall), ".3f"),
                ]
            )
    return path


def load_history_csv(path) -> MetaHistory:
    history = MetaHistory()
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != MetaHistory.columns:
            raise ValueError(f"malformed CSV: {path}")
        for row in reader:
            if len(row) != len(MetaHistory.columns):
                raise ValueError(f"malformed CSV: {path}")
            try:
                history.record(
                    int(row[0]), float(row[1]), float(row[2]), int(row[3]), row[4], float(row[5])
                )
            except ValueError as exc:
                raise ValueError(f"malformed CSV: {path}") from exc
    if not history.rows:
        raise ValueError(f"malformed CSV: {path}")
    return history


def _write_json(path, data) -> Path:
    path = Path(path)
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    return path


def _run_tsp_curves(cfg: ExperimentConfig, out_dir: Path) -> list[Path]:
    """soft_tsp and adaptive_tsp: one hierarchical run per seed."""
    name = cfg.experiment
    inst = random_instance(cfg.n, cfg.instance_seed)
    pens = _penalties(cfg, inst.n)
    greedy_cost = path_cost(inst, greedy_two_approx(inst))

    files: list[Path] = []
    runs: dict = {}
    series: list[Series] = []
    best_seed, best_cost = None, np.inf
    for seed in cfg.seeds:
        hier = _hier_config(cfg, seed)
        if name == "adaptive_tsp":
            tour, cost, history = run_adaptive(inst, pens, hier, n_steps=cfg.n_steps)
        else:
            tour, cost, history = run_hierarchical(inst, pens, hier)
        files.append(write_history_csv(out_dir / f"{name}_seed{seed}.csv", history))
        visited = {int(v) for v in tour}
        runs[str(seed)] = {
            "best_cost": float(cost),
            "tour": [int(v) for v in tour],
            "skipped": sorted(set(range(inst.n)) - visited),
        }
        series.append(Series(f"seed {seed}", history.column("generation"), history.column("best_cost")))
        if cost < best_cost:
            best_seed, best_cost = seed, float(cost)

    summary = {
        "experiment": name,
        "baselines": {"greedy_full_cost": float(greedy_cost)},
        "penalties": [float(p) for p in pens],
        "runs": runs,
        "best": {"seed": best_seed, "cost": best_cost},
    }
    files.append(_write_json(out_dir / f"{name}_summary.json", summary))
    files.append(emit_plot(series, out_dir / f"{name}.svg", baseline=greedy_cost, title=name))
    return files


def _run_switch(cfg: ExperimentConfig, out_dir: Path) -> list[Path]:
    inst = random_instance(cfg.n, cfg.instance_seed)
    report = constraint_switch_experiment(
        inst,
        list(cfg.t_values),
        cfg.meta_generations,
        list(cfg.seeds),
        _hier_config(cfg, cfg.seeds[0]),
        n_high=cfg.n_high,
        high=cfg.high_penalty,
        low=cfg.low_penalty,
    )
    files: list[Path] = []
    for (tv, seed), history in sorted(report["histories"].items()):
        files.append(write_history_csv(out_dir / f"switch_t{tv}_seed{seed}.csv", history))

    series: list[Series] = []
    final_best: dict = {}
    for tv in cfg.t_values:
        curves = report["curves"][tv]
        final_best[f"t={tv}"] = {
            str(seed): (float(c[-1]) if c else None) for seed, c in curves.items()
        }
        lengths = {len(c) for c in curves.values()}
        if lengths == {0}:
            continue
        mean = np.mean([curves[s] for s in cfg.seeds], axis=0)
        series.append(Series(f"t={tv}", list(range(tv, cfg.meta_generations)), mean.tolist()))

    summary = {
        "experiment": "constraint_switch",
        "penalty_values": {"high": float(cfg.high_penalty), "low": float(cfg.low_penalty)},
        "total_generations": cfg.meta_generations,
        "t_values": list(cfg.t_values),
        "seeds": list(cfg.seeds),
        "baselines": {"greedy_full_cost": float(report["baseline_cost"])},
        "final_best": final_best,
    }
    files.append(_write_json(out_dir / "constraint_switch_summary.json", summary))
    if series:
        files.append(
            emit_plot(
                series,
                out_dir / "constraint_switch.svg",
                baseline=report["baseline_cost"],
                title="constraint_switch",
            )
        )
    return files


def _run_regression(cfg: ExperimentConfig, out_dir: Path) -> list[Path]:
    name = cfg.experiment
    truth = np.asarray(cfg.coeffs, dtype=float)
    ds = generate_dataset(truth, cfg.noise_sigma, cfg.x_lo, cfg.x_hi, cfg.n_points, cfg.instance_seed)
    if name == "weighted_regression":
        spec = OracleSpec(ds, WEIGHTED_HUBER, cfg.delta, RegionWeight(((0.0, np.inf, 10.0),)))
    else:
        spec = OracleSpec(ds, HUBER, cfg.delta)

    true_cost = oracle_cost(spec, eval_poly(truth, ds.xs))
    lsq_coeffs = least_squares_fit(ds, truth.size - 1)
    lsq_cost = oracle_cost(spec, eval_poly(lsq_coeffs, ds.xs))

    files: list[Path] = []
    runs: dict = {}
    series: list[Series] = []
    best_seed, best_cost = None, np.inf
    for seed in cfg.seeds:
        coeffs, genome, history = run_regression_hierarchy(ds, spec, _hier_config(cfg, seed))
        files.append(write_history_csv(out_dir / f"{name}_seed{seed}.csv", history))
        cost = float(min(history.column("best_cost")))
        runs[str(seed)] = {
            "best_oracle_cost": cost,
            "coeffs": [float(c) for c in coeffs],
            "hypers": {
                "lam1": float(genome.lam1),
                "lam2": float(genome.lam2),
                "d": int(genome.d),
                "gamma": float(genome.gamma),
            },
        }
        series.append(Series(f"seed {seed}", history.column("generation"), history.column("best_cost")))
        if cost < best_cost:
            best_seed, best_cost = seed, cost

    summary = {
        "experiment": name,
        "baselines": {
            "true_poly_oracle_cost": float(true_cost),
            "least_squares": {
                "coeffs": [float(c) for c in lsq_coeffs],
                "oracle_cost": float(lsq_cost),
            },
        },
        "runs": runs,
        "best": {"seed": best_seed, "cost": best_cost},
    }
    files.append(_write_json(out_dir / f"{name}_summary.json", summary))
    files.append(
        emit_plot(
            series,
            out_dir / f"{name}.svg",
            baseline=true_cost,
            title=name,
            y_label="best oracle cost",
        )
    )
    return files


def _run_oracle(cfg: ExperimentConfig, out_dir: Path) -> list[Path]:
    inst = random_instance(cfg.n, cfg.instance_seed)
    pens = _penalties(cfg, inst.n)
    path_tour, path_weight = exact_tsp_path(inst)
    soft_tour, soft_cost = exact_soft_tsp(inst, pens)
    greedy_tour = greedy_two_approx(inst)
    summary = {
        "experiment": "oracle",
        "n": cfg.n,
        "penalties": [float(p) for p in pens],
        "exact_path": {"tour": [int(v) for v in path_tour], "cost": float(path_weight)},
        "exact_soft_tsp": {"tour": [int(v) for v in soft_tour], "cost": float(soft_cost)},
        "greedy": {
            "tour": [int(v) for v in greedy_tour],
            "cost": float(path_cost(inst, greedy_tour)),
        },
    }
    return [_write_json(out_dir / "oracle_summary.json", summary)]


def run_experiment(cfg: ExperimentConfig) -> list[Path]:
    """Execute the configured experiment; returns all files written
    (config snapshot, CSVs, summary JSON, SVG plot)."""
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    snapshot = asdict(cfg)
    files = [_write_json(out_dir / f"{cfg.experiment}_config.json", snapshot)]
    if cfg.experiment == "constraint_switch":
        files += _run_switch(cfg, out_dir)
    elif cfg.experiment == "oracle":
        files += _run_oracle(cfg, out_dir)
    elif cfg.experiment in REGRESSION_EXPERIMENTS:
        files += _run_regression(cfg, out_dir)
    else:
        files += _run_tsp_curves(cfg, out_dir)
    return files
