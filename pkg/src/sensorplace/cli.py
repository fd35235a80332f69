"""Command-line entry point.

Subcommands: ``gen-roi`` (synthetic cloud to CSV), ``precompute``
(coverage cache for one side), ``solve`` (full pipeline), ``report``
(re-aggregate stored selections), ``export-lp`` and ``export-qubo``
(model files for external solvers).  Flags mirror the run-config
fields; when ``--config`` names a YAML file its values override the
flags.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import yaml

from .coverage import build_coverage, coverage_cache_key, save_coverage
from .errors import SensorPlaceError
from .exports import write_fixed_count_lp, write_iqp_lp, write_qubo_coo
from .fixed_count import make_problem
from .geometry import (
    DEFAULT_CATALOG,
    PlacementGrid,
    Side,
    SIDE_ORDER,
    VehicleModel,
    enumerate_configs,
    partition_roi,
)
from .pipeline import RunConfig, config_from_dict, config_to_dict, load_selections, run
from .reporting import aggregate, write_adherence_csv, write_aggregate_csv
from .roi import SyntheticRoiSpec, generate_synthetic_roi, load_catalog, load_roi, save_roi
from .setcover import build_iqp


def _add_vehicle_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--vehicle-length", type=float, default=4.5)
    p.add_argument("--vehicle-width", type=float, default=1.8)
    p.add_argument("--vehicle-height", type=float, default=1.5)


def _vehicle(args) -> VehicleModel:
    return VehicleModel(args.vehicle_length, args.vehicle_width, args.vehicle_height)


def _add_instance_args(p: argparse.ArgumentParser) -> None:
    _add_vehicle_args(p)
    p.add_argument("--roi", help="cloud CSV (x,y,z,criticality)")
    p.add_argument("--synthetic-extent", type=float, default=10.0)
    p.add_argument("--synthetic-spacing", type=float, default=0.5)
    p.add_argument("--synthetic-profile", default="inverse_distance(4.0)")
    p.add_argument("--synthetic-seed", type=int, default=0)
    p.add_argument("--catalog", help="sensor catalog YAML (default: built-in four types)")
    p.add_argument("--grid", default="4x4", help="per-side grid as HxV, e.g. 4x4")
    p.add_argument(
        "--orientations",
        default="fixed",
        help="'fixed' (perpendicular only), 'free' (per-side angle sets), or comma-separated degrees",
    )
    p.add_argument("--side", default="front", choices=[s.value for s in SIDE_ORDER])
    p.add_argument("--coverage-weight", type=float, default=1.0)
    p.add_argument("--cost-weight", type=float, default=1e-4)
    p.add_argument("--fov-model", default="elliptical", choices=["elliptical", "independent"])


def _parse_grid(text: str) -> tuple[int, int]:
    h, _, v = text.lower().partition("x")
    return int(h), int(v)


def _side_instance(args):
    """(cloud, catalog, side grid, candidates, coverage data) for one side."""
    vehicle = _vehicle(args)
    catalog = load_catalog(args.catalog) if args.catalog else DEFAULT_CATALOG
    if args.roi:
        cloud = load_roi(args.roi)
    else:
        cloud = generate_synthetic_roi(
            SyntheticRoiSpec(
                extent=args.synthetic_extent,
                spacing=args.synthetic_spacing,
                profile=args.synthetic_profile,
                seed=args.synthetic_seed,
            ),
            vehicle,
        )
    cloud = partition_roi(cloud, vehicle)
    side = Side(args.side)
    h, v = _parse_grid(args.grid)
    if args.orientations == "fixed":
        orients: tuple[float, ...] = (0.0,)
    elif args.orientations == "free":
        from .pipeline import DEFAULT_FREE_ORIENTATIONS

        orients = DEFAULT_FREE_ORIENTATIONS[side]
    else:
        orients = tuple(float(a) for a in args.orientations.split(","))
    grid = PlacementGrid(side, h, v, orients)
    configs = enumerate_configs(catalog, vehicle, grid)
    data = build_coverage(cloud.side_cloud(side), configs, catalog, args.fov_model)
    return cloud, catalog, grid, configs, data


def _cmd_gen_roi(args) -> int:
    spec = SyntheticRoiSpec(
        extent=args.extent,
        spacing=args.spacing,
        profile=args.profile,
        seed=args.seed,
        z_levels=tuple(float(z) for z in args.z_levels.split(",")),
    )
    cloud = generate_synthetic_roi(spec, _vehicle(args))
    save_roi(cloud, args.out)
    print(f"wrote {len(cloud)} points to {args.out}")
    return 0


def _cmd_precompute(args) -> int:
    cloud, catalog, grid, configs, data = _side_instance(args)
    side_cloud = cloud.side_cloud(grid.side)
    key = coverage_cache_key(side_cloud, configs, catalog, args.fov_model)
    out_dir = Path(args.cache_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"coverage_{key}.npz"
    save_coverage(data, path)
    print(f"cached {data.num_configs} x {data.num_points} coverage to {path}")
    return 0


def _cmd_solve(args) -> int:
    base = RunConfig(
        approach=args.approach,
        solvers=tuple(args.solver),
        catalog_path=args.catalog,
        roi_path=args.roi,
        synthetic=None
        if args.roi
        else SyntheticRoiSpec(
            extent=args.synthetic_extent,
            spacing=args.synthetic_spacing,
            profile=args.synthetic_profile,
            seed=args.synthetic_seed,
        ),
        vehicle=_vehicle(args),
        grid=_parse_grid(args.grid),
        orientation_mode=args.orientations if args.orientations in ("fixed", "free") else "fixed",
        sensor_counts=tuple(range(args.min_sensors, args.max_sensors + 1)),
        coverage_weight=args.coverage_weight,
        cost_weight=args.cost_weight,
        seed=args.seed,
        num_stochastic_runs=args.runs,
        shots=args.shots,
        anneal_reads=args.anneal_reads,
        anneal_sweeps=args.anneal_sweeps,
        vqe_layers=args.vqe_layers,
        vqe_max_evals=args.vqe_max_evals,
        fov_model=args.fov_model,
        output_dir=args.outdir,
        cache_dir=args.cache_dir,
        dump_samples=args.dump_samples,
        dump_traces=args.dump_traces,
    )
    if args.config:
        doc = yaml.safe_load(Path(args.config).read_text()) or {}
        merged = config_to_dict(base)
        merged.update(doc)  # file values override flags
        config = config_from_dict(merged)
    else:
        config = base
    outputs = run(config)
    for solver, report in sorted(outputs.reports.items()):
        print(
            f"{solver}: aggregate coverage {report.aggregate_coverage:.4f}, "
            f"total cost {report.total_cost:g}"
        )
    print(f"reports written to {outputs.output_dir}")
    return 0


def _cmd_report(args) -> int:
    vehicle = _vehicle(args)
    catalog = load_catalog(args.catalog) if args.catalog else DEFAULT_CATALOG
    cloud = partition_roi(load_roi(args.roi), vehicle)
    selections = load_selections(args.selections)
    reports = {solver: aggregate(per_side, cloud, catalog) for solver, per_side in selections.items()}
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    write_aggregate_csv(out / "aggregate.csv", reports)
    write_adherence_csv(out / "adherence.csv", reports)
    print(f"re-aggregated {len(reports)} solver reports into {out}")
    return 0


def _cmd_export_lp(args) -> int:
    _cloud, catalog, _grid, _configs, data = _side_instance(args)
    with open(args.out, "w") as fh:
        if args.approach == "fixed_count":
            problem = make_problem(
                data, catalog, num_sensors=args.num_sensors,
                coverage_weight=args.coverage_weight, cost_weight=args.cost_weight,
            )
            write_fixed_count_lp(fh, problem)
        else:
            model = build_iqp(
                data, catalog,
                coverage_weight=args.coverage_weight, cost_weight=args.cost_weight,
            )
            write_iqp_lp(fh, model, data)
    print(f"wrote {args.approach} LP model to {args.out}")
    return 0


def _cmd_export_qubo(args) -> int:
    _cloud, catalog, _grid, _configs, data = _side_instance(args)
    model = build_iqp(
        data, catalog, coverage_weight=args.coverage_weight, cost_weight=args.cost_weight
    )
    with open(args.out, "w") as fh:
        write_qubo_coo(fh, model)
    print(f"wrote QUBO ({model.num_variables} variables) to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sensorplace",
        description="Optimize sensor placement on a vehicle surface.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-roi", help="generate a synthetic region-of-interest CSV")
    _add_vehicle_args(p)
    p.add_argument("--out", required=True)
    p.add_argument("--extent", type=float, default=10.0)
    p.add_argument("--spacing", type=float, default=0.5)
    p.add_argument("--profile", default="inverse_distance(4.0)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--z-levels", default="1.0")
    p.set_defaults(fn=_cmd_gen_roi)

    p = sub.add_parser("precompute", help="build and cache coverage for one side")
    _add_instance_args(p)
    p.add_argument("--cache-dir", required=True)
    p.set_defaults(fn=_cmd_precompute)

    p = sub.add_parser("solve", help="run the full pipeline over all sides")
    _add_instance_args(p)
    p.add_argument("--config", help="YAML run config; file values override flags")
    p.add_argument("--approach", default="fixed_count", choices=["fixed_count", "setcover"])
    p.add_argument(
        "--solver", action="append", default=None,
        help="repeatable; fixed_count: exhaustive/greedy/vqe, setcover: exhaustive/anneal/vqe",
    )
    p.add_argument("--min-sensors", type=int, default=1)
    p.add_argument("--max-sensors", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--runs", type=int, default=10, help="stochastic-solver repetitions")
    p.add_argument("--shots", type=int, default=1000)
    p.add_argument("--anneal-reads", type=int, default=1000)
    p.add_argument("--anneal-sweeps", type=int, default=1000)
    p.add_argument("--vqe-layers", type=int, default=3)
    p.add_argument("--vqe-max-evals", type=int, default=500)
    p.add_argument("--outdir", default="runs/out")
    p.add_argument("--cache-dir")
    p.add_argument("--dump-samples", action="store_true")
    p.add_argument("--dump-traces", action="store_true")
    p.set_defaults(fn=_cmd_solve)

    p = sub.add_parser("report", help="recompute aggregate and adherence from stored selections")
    _add_vehicle_args(p)
    p.add_argument("--selections", required=True, help="selections.json written by solve")
    p.add_argument("--roi", required=True)
    p.add_argument("--catalog")
    p.add_argument("--outdir", default="runs/report")
    p.set_defaults(fn=_cmd_report)

    p = sub.add_parser("export-lp", help="write an LP model file")
    _add_instance_args(p)
    p.add_argument("--approach", default="fixed_count", choices=["fixed_count", "setcover"])
    p.add_argument("--num-sensors", type=int, default=2)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_export_lp)

    p = sub.add_parser("export-qubo", help="write the QUBO in coordinate text format")
    _add_instance_args(p)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_export_qubo)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "solve" and not args.solver:
        args.solver = ["exhaustive"]
    try:
        return args.fn(args)
    except SensorPlaceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
