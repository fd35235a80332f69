"""Region-of-interest ingestion, persistence, and synthetic generation.

The on-disk cloud format is CSV with the exact header
``x,y,z,criticality``.  Criticalities outside [0, 1] are rejected with
their 1-based line number.  The sensor catalog is a small YAML file::

    sensors:
      - {name: lidar, alpha_h: 80, alpha_v: 40, range: 120, cost: 200}

The synthetic generator lays a regular grid around the vehicle at a
fixed spacing and assigns criticalities from a named profile, so every
acceptance check can run without any external dataset.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass

import numpy as np
import yaml

from .errors import EmptyFileError, RoiParseError
from .geometry import RoiCloud, SensorSpec, VehicleModel

ROI_HEADER = ["x", "y", "z", "criticality"]


def load_roi(path) -> RoiCloud:
    """Parse a cloud CSV; rejects malformed rows with their line number."""
    rows: list[tuple[float, float, float, float]] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyFileError(f"{path}: empty file") from None
        if [h.strip() for h in header] != ROI_HEADER:
            raise RoiParseError(1, f"expected header {','.join(ROI_HEADER)!r}, got {','.join(header)!r}")
        for line, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise RoiParseError(line, f"expected 4 fields, got {len(row)}")
            try:
                x, y, z, c = (float(v) for v in row)
            except ValueError:
                raise RoiParseError(line, f"non-numeric field in {row!r}") from None
            if not 0.0 <= c <= 1.0:
                raise RoiParseError(line, f"criticality {c} outside [0, 1]")
            rows.append((x, y, z, c))
    if not rows:
        raise EmptyFileError(f"{path}: no data rows")
    arr = np.array(rows)
    return RoiCloud(arr[:, :3], arr[:, 3])


def save_roi(cloud: RoiCloud, path) -> None:
    """Write a cloud CSV that loads back to bit-identical values."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(ROI_HEADER)
        for p, c in zip(cloud.points, cloud.criticality):
            writer.writerow([repr(float(p[0])), repr(float(p[1])), repr(float(p[2])), repr(float(c))])


def load_catalog(path) -> tuple[SensorSpec, ...]:
    with open(path) as fh:
        doc = yaml.safe_load(fh)
    if not isinstance(doc, dict) or "sensors" not in doc or not doc["sensors"]:
        raise ValueError(f"{path}: expected a mapping with a nonempty 'sensors' list")
    specs = []
    for entry in doc["sensors"]:
        specs.append(
            SensorSpec(
                name=str(entry["name"]),
                alpha_h=float(entry["alpha_h"]),
                alpha_v=float(entry["alpha_v"]),
                range=float(entry["range"]),
                cost=float(entry["cost"]),
            )
        )
    return tuple(specs)


def save_catalog(catalog, path) -> None:
    doc = {
        "sensors": [
            {
                "name": s.name,
                "alpha_h": s.alpha_h,
                "alpha_v": s.alpha_v,
                "range": s.range,
                "cost": s.cost,
            }
            for s in catalog
        ]
    }
    with open(path, "w") as fh:
        yaml.safe_dump(doc, fh, sort_keys=False)


# ---------------------------------------------------------------------------
# Synthetic clouds

_PROFILE_RE = re.compile(r"^\s*([a-z_]+)\s*\(([^)]*)\)\s*$")


@dataclass(frozen=True)
class SyntheticRoiSpec:
    """Deterministic synthetic cloud: a grid ring around the vehicle.

    ``extent`` is how far the grid reaches beyond each face, ``spacing``
    the grid pitch, ``z_levels`` the sampled heights.  ``profile`` names
    the criticality function:

    * ``uniform(v)`` - constant criticality ``v``;
    * ``inverse_distance(d0)`` - ``1 / (1 + d / d0)`` of the horizontal
      distance ``d`` to the vehicle footprint;
    * ``inverse_distance(d0, jitter)`` - the same with multiplicative
      jitter of up to the given fraction, drawn from ``seed``.
    """

    extent: float = 10.0
    spacing: float = 0.5
    profile: str = "inverse_distance(4.0)"
    seed: int = 0
    z_levels: tuple[float, ...] = (1.0,)

    def __post_init__(self):
        if self.spacing <= 0.0:
            raise ValueError("spacing must be positive")
        if self.extent <= 0.0:
            raise ValueError("extent must be positive")
        if not self.z_levels:
            raise ValueError("at least one z level required")
        parse_profile(self.profile)  # fail fast on typos


def parse_profile(profile: str):
    m = _PROFILE_RE.match(profile)
    if not m:
        raise ValueError(f"malformed criticality profile {profile!r}")
    name, argstr = m.group(1), m.group(2)
    args = [float(a) for a in argstr.split(",") if a.strip()] if argstr.strip() else []
    if name == "uniform":
        if len(args) != 1 or not 0.0 <= args[0] <= 1.0:
            raise ValueError("uniform profile takes one value in [0, 1]")
    elif name == "inverse_distance":
        if len(args) not in (1, 2) or args[0] <= 0.0:
            raise ValueError("inverse_distance takes a positive scale and an optional jitter fraction")
        if len(args) == 2 and not 0.0 <= args[1] <= 1.0:
            raise ValueError("jitter fraction must lie in [0, 1]")
    else:
        raise ValueError(f"unknown criticality profile {name!r}")
    return name, args


def generate_synthetic_roi(spec: SyntheticRoiSpec, vehicle: VehicleModel = VehicleModel()) -> RoiCloud:
    """Grid the region around the vehicle and weight it with the profile.

    Deterministic for a fixed spec; the vehicle box interior is
    excluded.
    """
    ox, oy, oz = vehicle.origin
    half_x = vehicle.length / 2.0 + spec.extent
    half_y = vehicle.width / 2.0 + spec.extent
    nx = int(round(2.0 * half_x / spec.spacing))
    ny = int(round(2.0 * half_y / spec.spacing))
    xs = ox - half_x + (np.arange(nx) + 0.5) * spec.spacing
    ys = oy - half_y + (np.arange(ny) + 0.5) * spec.spacing

    xx, yy = np.meshgrid(xs, ys, indexing="ij")
    level_pts = np.column_stack([xx.reshape(-1), yy.reshape(-1)])
    pts = np.concatenate(
        [np.column_stack([level_pts, np.full(len(level_pts), oz + z)]) for z in spec.z_levels]
    )
    pts = pts[~vehicle.contains(pts)]

    name, args = parse_profile(spec.profile)
    if name == "uniform":
        crit = np.full(len(pts), args[0])
    else:
        dx = np.maximum(np.abs(pts[:, 0] - ox) - vehicle.length / 2.0, 0.0)
        dy = np.maximum(np.abs(pts[:, 1] - oy) - vehicle.width / 2.0, 0.0)
        dist = np.hypot(dx, dy)
        crit = 1.0 / (1.0 + dist / args[0])
        if len(args) == 2 and args[1] > 0.0:
            rng = np.random.default_rng(spec.seed)
            crit = crit * (1.0 - args[1] * rng.random(len(pts)))
    return RoiCloud(pts, np.clip(crit, 0.0, 1.0))
