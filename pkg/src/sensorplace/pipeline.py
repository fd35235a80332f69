"""End-to-end orchestration: configuration, per-side solving, reporting.

A run resolves its cloud (file or synthetic), partitions it into the
four side sub-problems, precomputes coverage per side, applies the
selected approach and solvers, and aggregates per-side winners into
whole-vehicle reports.  Everything is seeded: per-task seeds derive
from the base seed and the task coordinates by hashing, so repeated
runs with the same configuration produce byte-identical CSV output.

Sides are independent sub-problems; they are solved sequentially here
but share nothing except immutable inputs.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import __version__
from .annealer import anneal, best_selection, scaled_schedule
from .coverage import build_coverage, cached_coverage
from .errors import ConfigError
from .fixed_count import (
    SelectionResult,
    make_problem,
    solve_exhaustive,
    solve_greedy,
    sweep_num_sensors,
)
from .geometry import (
    DEFAULT_CATALOG,
    PlacementGrid,
    RoiCloud,
    SensorConfig,
    Side,
    SIDE_ORDER,
    VehicleModel,
    enumerate_configs,
    partition_roi,
)
from .reporting import (
    AggregateReport,
    SweepRow,
    aggregate,
    best_run,
    drop_worst_and_summarize,
    write_adherence_csv,
    write_aggregate_csv,
    write_sweep_csv,
)
from .roi import SyntheticRoiSpec, generate_synthetic_roi, load_catalog, load_roi
from .setcover import build_iqp, solve_exhaustive_qubo, to_ising
from .vqe import EncodingMap, OptimizerConfig, vqe_fixed_count, vqe_ising

#: Orientation sets tilted toward the region each side actually faces
#: (negative = clockwise from above).
DEFAULT_FREE_ORIENTATIONS: dict[Side, tuple[float, ...]] = {
    Side.FRONT: (-30.0, 0.0, 30.0, 45.0),
    Side.BACK: (30.0, 0.0, -30.0, -45.0),
    Side.LEFT: (-60.0, -40.0, -20.0, 0.0),
    Side.RIGHT: (0.0, 20.0, 40.0, 60.0),
}

APPROACH_SOLVERS = {
    "fixed_count": ("exhaustive", "greedy", "vqe"),
    "setcover": ("exhaustive", "anneal", "vqe"),
}


@dataclass(frozen=True)
class RunConfig:
    """Everything a run needs; file-based configs map 1:1 onto these fields."""

    approach: str = "fixed_count"
    solvers: tuple[str, ...] = ("exhaustive",)
    catalog_path: str | None = None
    roi_path: str | None = None
    synthetic: SyntheticRoiSpec | None = SyntheticRoiSpec()
    vehicle: VehicleModel = VehicleModel()
    grid: tuple[int, int] = (4, 4)
    orientation_mode: str = "fixed"          # "fixed", "free", or explicit below
    orientations: dict[Side, tuple[float, ...]] | None = None
    sensor_counts: tuple[int, ...] = tuple(range(1, 9))
    coverage_weight: float = 1.0
    cost_weight: float = 1e-4
    seed: int = 0
    num_stochastic_runs: int = 10
    shots: int = 1000
    anneal_reads: int = 1000
    anneal_sweeps: int = 1000
    vqe_layers: int = 3
    vqe_max_evals: int = 500
    fov_model: str = "elliptical"
    output_dir: str = "runs/out"
    cache_dir: str | None = None
    dump_samples: bool = False
    dump_traces: bool = False

    def side_orientations(self, side: Side) -> tuple[float, ...]:
        if self.orientations is not None:
            return self.orientations[side]
        if self.orientation_mode == "fixed":
            return (0.0,)
        if self.orientation_mode == "free":
            return DEFAULT_FREE_ORIENTATIONS[side]
        raise ConfigError(f"unknown orientation mode {self.orientation_mode!r}")


def validate_config(config: RunConfig) -> None:
    """Reject invalid approach/solver pairings before any compute."""
    if config.approach not in APPROACH_SOLVERS:
        raise ConfigError(f"unknown approach {config.approach!r}")
    if not config.solvers:
        raise ConfigError("at least one solver must be selected")
    allowed = APPROACH_SOLVERS[config.approach]
    for solver in config.solvers:
        if solver not in allowed:
            raise ConfigError(
                f"solver {solver!r} is not valid for approach {config.approach!r} "
                f"(choose from {', '.join(allowed)})"
            )
    if (config.roi_path is None) == (config.synthetic is None):
        raise ConfigError("exactly one of roi_path and synthetic must be given")
    if config.approach == "fixed_count" and not config.sensor_counts:
        raise ConfigError("fixed_count needs a nonempty sensor_counts sweep")
    config.side_orientations(Side.FRONT)  # validates the orientation mode


def derive_seed(base: int, *parts) -> int:
    """Stable 63-bit seed from the base seed and task coordinates."""
    h = hashlib.sha256(repr((base,) + parts).encode()).digest()
    return int.from_bytes(h[:8], "big") >> 1


def config_to_dict(config: RunConfig) -> dict:
    d = {
        "approach": config.approach,
        "solvers": list(config.solvers),
        "catalog_path": config.catalog_path,
        "roi_path": config.roi_path,
        "synthetic": None
        if config.synthetic is None
        else {
            "extent": config.synthetic.extent,
            "spacing": config.synthetic.spacing,
            "profile": config.synthetic.profile,
            "seed": config.synthetic.seed,
            "z_levels": list(config.synthetic.z_levels),
        },
        "vehicle": {
            "length": config.vehicle.length,
            "width": config.vehicle.width,
            "height": config.vehicle.height,
            "origin": list(config.vehicle.origin),
        },
        "grid": list(config.grid),
        "orientation_mode": config.orientation_mode,
        "orientations": None
        if config.orientations is None
        else {s.value: list(v) for s, v in config.orientations.items()},
        "sensor_counts": list(config.sensor_counts),
        "coverage_weight": config.coverage_weight,
        "cost_weight": config.cost_weight,
        "seed": config.seed,
        "num_stochastic_runs": config.num_stochastic_runs,
        "shots": config.shots,
        "anneal_reads": config.anneal_reads,
        "anneal_sweeps": config.anneal_sweeps,
        "vqe_layers": config.vqe_layers,
        "vqe_max_evals": config.vqe_max_evals,
        "fov_model": config.fov_model,
        "output_dir": config.output_dir,
        "cache_dir": config.cache_dir,
        "dump_samples": config.dump_samples,
        "dump_traces": config.dump_traces,
    }
    return d


def config_from_dict(d: dict) -> RunConfig:
    kwargs = dict(d)
    if kwargs.get("synthetic") is not None:
        s = kwargs["synthetic"]
        kwargs["synthetic"] = SyntheticRoiSpec(
            extent=float(s.get("extent", 10.0)),
            spacing=float(s.get("spacing", 0.5)),
            profile=str(s.get("profile", "inverse_distance(4.0)")),
            seed=int(s.get("seed", 0)),
            z_levels=tuple(float(z) for z in s.get("z_levels", (1.0,))),
        )
    if kwargs.get("vehicle") is not None and isinstance(kwargs.get("vehicle"), dict):
        v = kwargs["vehicle"]
        kwargs["vehicle"] = VehicleModel(
            length=float(v.get("length", 4.5)),
            width=float(v.get("width", 1.8)),
            height=float(v.get("height", 1.5)),
            origin=tuple(float(x) for x in v.get("origin", (0.0, 0.0, 0.0))),
        )
    if kwargs.get("orientations") is not None:
        kwargs["orientations"] = {
            Side(k): tuple(float(a) for a in v) for k, v in kwargs["orientations"].items()
        }
    for key in ("solvers", "sensor_counts", "grid"):
        if key in kwargs and kwargs[key] is not None:
            kwargs[key] = tuple(kwargs[key])
    known = set(RunConfig.__dataclass_fields__)
    unknown = set(kwargs) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return RunConfig(**kwargs)


@dataclass
class SideArtifacts:
    side: Side
    cloud: RoiCloud
    configs: list[SensorConfig]
    data: object


@dataclass
class RunOutputs:
    reports: dict[str, AggregateReport]
    sweep_rows: list[SweepRow]
    output_dir: Path
    manifest_path: Path


def _resolve_cloud(config: RunConfig) -> RoiCloud:
    if config.roi_path is not None:
        cloud = load_roi(config.roi_path)
    else:
        cloud = generate_synthetic_roi(config.synthetic, config.vehicle)
    return partition_roi(cloud, config.vehicle)


def _resolve_catalog(config: RunConfig):
    return load_catalog(config.catalog_path) if config.catalog_path else DEFAULT_CATALOG


def _prepare_sides(config: RunConfig, cloud: RoiCloud, catalog) -> dict[Side, SideArtifacts]:
    sides: dict[Side, SideArtifacts] = {}
    for side in SIDE_ORDER:
        grid = PlacementGrid(
            side, config.grid[0], config.grid[1], config.side_orientations(side)
        )
        configs = enumerate_configs(catalog, config.vehicle, grid)
        side_cloud = cloud.side_cloud(side)
        if config.cache_dir:
            data = cached_coverage(side_cloud, configs, catalog, config.cache_dir, config.fov_model)
        else:
            data = build_coverage(side_cloud, configs, catalog, config.fov_model)
        sides[side] = SideArtifacts(side, side_cloud, configs, data)
    return sides


def _solve_fixed_count(
    config: RunConfig, solver: str, sides: dict[Side, SideArtifacts], catalog, out: Path
) -> tuple[dict[Side, SelectionResult], list[SweepRow]]:
    per_side: dict[Side, SelectionResult] = {}
    rows: list[SweepRow] = []
    for side, art in sides.items():
        problem = make_problem(
            art.data, catalog, num_sensors=1,
            coverage_weight=config.coverage_weight, cost_weight=config.cost_weight,
        )
        side_best: SelectionResult | None = None
        if solver in ("exhaustive", "greedy"):
            fn = solve_exhaustive if solver == "exhaustive" else solve_greedy
            outcome = sweep_num_sensors(problem, config.sensor_counts, solver=fn)
            for entry in outcome.entries:
                rows.append(SweepRow(side, entry.num_sensors, solver, entry.result, None, entry.error))
            side_best = outcome.best
        else:  # vqe
            encoding = EncodingMap(
                config.grid[0], config.grid[1], len(catalog),
                len(config.side_orientations(side)),
            )
            for k in config.sensor_counts:
                try:
                    prob_k = replace(problem, num_sensors=int(k))
                except ValueError as exc:
                    rows.append(SweepRow(side, int(k), solver, None, None, str(exc)))
                    continue
                runs = []
                for run_index in range(config.num_stochastic_runs):
                    run = vqe_fixed_count(
                        prob_k,
                        encoding,
                        num_layers=config.vqe_layers,
                        optimizer=OptimizerConfig(max_evals=config.vqe_max_evals),
                        shots=config.shots,
                        seed=derive_seed(config.seed, "vqe_fc", side.value, int(k), run_index),
                    )
                    runs.append(replace(run.result, run_index=run_index))
                    if config.dump_traces:
                        run.write_trace_csv(out / f"trace_{solver}_{side.value}_k{k}_r{run_index}.csv")
                _, stats = drop_worst_and_summarize(runs)
                best = best_run(runs)
                rows.append(SweepRow(side, int(k), solver, best, stats))
                if side_best is None or best.objective < side_best.objective:
                    side_best = best
        if side_best is None:
            raise ConfigError(f"no feasible result for side {side.value} with solver {solver}")
        per_side[side] = side_best
    return per_side, rows


def _solve_setcover(
    config: RunConfig, solver: str, sides: dict[Side, SideArtifacts], catalog, out: Path
) -> tuple[dict[Side, SelectionResult], list[SweepRow]]:
    from .fixed_count import evaluate_selection
    from .geometry import config_costs

    per_side: dict[Side, SelectionResult] = {}
    rows: list[SweepRow] = []
    for side, art in sides.items():
        model = build_iqp(
            art.data, catalog,
            coverage_weight=config.coverage_weight, cost_weight=config.cost_weight,
        )
        if solver == "exhaustive":
            bits, _energy = solve_exhaustive_qubo(model)
            selection = tuple(int(i) for i in np.flatnonzero(bits))
            result = evaluate_selection(
                selection, art.data, config_costs(art.configs, catalog),
                config.coverage_weight, config.cost_weight, solver_tag="exhaustive_qubo",
            )
            rows.append(SweepRow(side, len(selection), solver, result))
        elif solver == "anneal":
            ising = to_ising(model)
            schedule = scaled_schedule(
                ising,
                num_reads=config.anneal_reads,
                sweeps_per_read=config.anneal_sweeps,
                seed=derive_seed(config.seed, "anneal", side.value),
            )
            samples = anneal(ising, schedule)
            if config.dump_samples:
                samples.to_csv(out / f"samples_{side.value}.csv")
            result = best_selection(
                samples, art.data, catalog,
                config.coverage_weight, config.cost_weight, seed=schedule.seed,
            )
            rows.append(SweepRow(side, len(result.selected), solver, result))
        else:  # vqe
            ising = to_ising(model)
            runs = []
            for run_index in range(config.num_stochastic_runs):
                run = vqe_ising(
                    ising, art.data, catalog,
                    coverage_weight=config.coverage_weight, cost_weight=config.cost_weight,
                    num_layers=config.vqe_layers,
                    optimizer=OptimizerConfig(max_evals=config.vqe_max_evals),
                    seed=derive_seed(config.seed, "vqe_ising", side.value, run_index),
                )
                runs.append(replace(run.result, run_index=run_index))
                if config.dump_traces:
                    run.write_trace_csv(out / f"trace_{solver}_{side.value}_r{run_index}.csv")
            _, stats = drop_worst_and_summarize(runs)
            result = best_run(runs)
            rows.append(SweepRow(side, len(result.selected), solver, result, stats))
        per_side[side] = result
    return per_side, rows


def _write_selections(path: Path, reports: dict[str, AggregateReport]) -> None:
    doc = {}
    for solver, report in sorted(reports.items()):
        doc[solver] = {
            side.value: {
                "selected": list(r.selected),
                "coverage": r.coverage,
                "cost": r.cost,
                "objective": r.objective,
                "solver_tag": r.solver_tag,
                "feasible": r.feasible,
                "seed": r.seed,
                "configs": [
                    {
                        "type_index": c.type_index,
                        "position": list(c.position),
                        "orientation": c.orientation,
                        "side": c.side.value,
                    }
                    for c in r.configs
                ],
            }
            for side, r in report.per_side.items()
        }
    path.write_text(json.dumps(doc, indent=2, sort_keys=True))


def load_selections(path) -> dict[str, dict[Side, SelectionResult]]:
    doc = json.loads(Path(path).read_text())
    out: dict[str, dict[Side, SelectionResult]] = {}
    for solver, sides in doc.items():
        out[solver] = {}
        for side_name, r in sides.items():
            configs = tuple(
                SensorConfig(
                    type_index=int(c["type_index"]),
                    position=tuple(float(x) for x in c["position"]),
                    orientation=float(c["orientation"]),
                    side=Side(c["side"]),
                )
                for c in r["configs"]
            )
            out[solver][Side(side_name)] = SelectionResult(
                selected=tuple(int(i) for i in r["selected"]),
                coverage=float(r["coverage"]),
                cost=float(r["cost"]),
                objective=float(r["objective"]),
                solver_tag=str(r["solver_tag"]),
                feasible=bool(r["feasible"]),
                configs=configs,
                seed=r.get("seed"),
            )
    return out


def run(config: RunConfig) -> RunOutputs:
    """Execute the full pipeline and write the report files.

    Emits ``sweep.csv``, ``aggregate.csv``, ``adherence.csv``,
    ``selections.json`` and ``manifest.json`` into ``output_dir``.
    Deterministic: identical configurations yield byte-identical CSVs.
    """
    validate_config(config)
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    catalog = _resolve_catalog(config)
    cloud = _resolve_cloud(config)
    sides = _prepare_sides(config, cloud, catalog)

    reports: dict[str, AggregateReport] = {}
    sweep_rows: list[SweepRow] = []
    for solver in config.solvers:
        if config.approach == "fixed_count":
            per_side, rows = _solve_fixed_count(config, solver, sides, catalog, out)
        else:
            per_side, rows = _solve_setcover(config, solver, sides, catalog, out)
        sweep_rows.extend(rows)
        reports[solver] = aggregate(per_side, cloud, catalog)

    write_sweep_csv(out / "sweep.csv", sweep_rows)
    write_aggregate_csv(out / "aggregate.csv", reports)
    write_adherence_csv(out / "adherence.csv", reports)
    _write_selections(out / "selections.json", reports)

    resolved = config_to_dict(config)
    resolved.pop("output_dir")  # not semantic: it is where this manifest lives
    manifest = {
        "config": resolved,
        "config_hash": hashlib.sha256(
            json.dumps(resolved, sort_keys=True).encode()
        ).hexdigest(),
        "package_version": __version__,
        "numpy_version": np.__version__,
    }
    manifest_path = out / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True))

    return RunOutputs(reports=reports, sweep_rows=sweep_rows, output_dir=out, manifest_path=manifest_path)
