"""Fields of view, side partition, and the coverage precompute.

Builds a synthetic criticality-weighted cloud around the default
vehicle, partitions it into the four side sectors, enumerates candidate
placements on the front face, and inspects the resulting coverage data:
per-candidate coverage fractions and the pairwise-overlap matrix whose
diagonal reproduces them.
"""

import numpy as np

from sensorplace import (
    DEFAULT_CATALOG,
    PlacementGrid,
    Side,
    SIDE_ORDER,
    VehicleModel,
    build_coverage,
    enumerate_configs,
    exact_union_coverage,
    fov_contains,
    partition_roi,
)
from sensorplace.roi import SyntheticRoiSpec, generate_synthetic_roi

vehicle = VehicleModel()  # 4.5 x 1.8 x 1.5 m box, front toward +x
print(f"vehicle: {vehicle.length} x {vehicle.width} x {vehicle.height} m")

# A quick look at a single sensor cone: a camera on the front face.
camera = DEFAULT_CATALOG[2]
config = enumerate_configs((camera,), vehicle, PlacementGrid(Side.FRONT, 1, 1))[0]
for point in [(10.0, 0.0, 1.0), (10.0, 9.0, 1.0), (25.0, 0.0, 1.0)]:
    inside = fov_contains(config, camera, point)
    print(f"  camera sees {point}: {inside}")

# Synthetic region of interest: a 0.5 m grid ring, criticality decaying
# with distance from the vehicle footprint.
spec = SyntheticRoiSpec(extent=12.0, spacing=0.5, profile="inverse_distance(5.0)")
cloud = partition_roi(generate_synthetic_roi(spec, vehicle), vehicle)
print(f"\ncloud: {len(cloud)} points, total criticality {cloud.total_criticality:.1f}")
for side in SIDE_ORDER:
    sub = cloud.side_cloud(side)
    share = sub.total_criticality / cloud.total_criticality
    print(f"  {side.value:>5}: {len(sub):5d} points, criticality share {share:.2f}")

# Coverage precompute for the front face: 4 types x 2x2 grid = 16 candidates.
front = cloud.side_cloud(Side.FRONT)
configs = enumerate_configs(DEFAULT_CATALOG, vehicle, PlacementGrid(Side.FRONT, 2, 2))
data = build_coverage(front, configs, DEFAULT_CATALOG)
print(f"\nfront candidates: {data.num_configs}, points: {data.num_points}")
print("per-candidate coverage fraction (grouped by type):")
for t, sensor in enumerate(DEFAULT_CATALOG):
    singles = data.singles[4 * t : 4 * (t + 1)]
    print(f"  {sensor.name:>10}: " + " ".join(f"{v:.3f}" for v in singles))

print("\noverlap of the two best candidates vs their union coverage:")
order = np.argsort(-data.singles)
i, j = int(order[0]), int(order[1])
union = exact_union_coverage([i, j], data)
print(f"  singles {data.singles[i]:.3f} + {data.singles[j]:.3f}"
      f" - overlap {data.overlaps[i, j]:.3f} = {data.singles[i] + data.singles[j] - data.overlaps[i, j]:.3f}"
      f" (exact union {union:.3f})")
