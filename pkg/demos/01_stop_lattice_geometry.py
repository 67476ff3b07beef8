"""Tour of the grid world: stop lattices, nearest-stop lookup, travel times.

Run with:  python demos/01_stop_lattice_geometry.py
"""

import numpy as np

from stopsim.geometry import (
    GridWorld,
    Point,
    build_stop_lattice,
    nearest_stop,
    nearest_stop_indices,
    rect_distance,
    travel_time,
)
from stopsim.metrics import analytic_ingress

world = GridWorld()
print(f"service area: {world.area_width:.0f} m x {world.area_height:.0f} m "
      f"= {world.area_km2:.1f} km^2")
print(f"walk speed {world.walk_speed * 3.6:.1f} km/h, "
      f"cruise speed {world.cruise_speed * 3.6:.1f} km/h\n")

# A lattice per sweep spacing: coarser pitch = fewer admitted stops = more
# riders pooled per stop.
for spacing in (80, 200, 430, 640, 860):
    lattice = build_stop_lattice(world, spacing)
    walk = analytic_ingress(spacing, world.walk_speed)
    print(f"spacing {spacing:4d} m -> {lattice.cols:3d} x {lattice.rows:3d} "
          f"= {len(lattice):6d} stops, mean walk ~{walk.mean_time_s:6.0f} s, "
          f"worst ~{walk.max_time_s:6.0f} s")

# Nearest-stop lookup is analytic: snap each axis to its closest lattice
# line, ties to the lower index.
lattice = build_stop_lattice(world, 430)
rider = Point(1234.5, 6789.0)
stop = lattice.stop(nearest_stop(lattice, rider))
print(f"\nrider at ({rider.x:.0f}, {rider.y:.0f}) walks to stop "
      f"({stop.x:.0f}, {stop.y:.0f}): {rect_distance(rider, stop):.0f} m, "
      f"{travel_time(world, rider, stop, 'walk'):.0f} s")

# Empirical mean walk converges to spacing/2 when cells are full squares.
rng = np.random.default_rng(1)
xs = rng.uniform(0, world.area_width, 100_000)
ys = rng.uniform(0, world.area_height, 100_000)
idx = nearest_stop_indices(lattice, xs, ys)
walked = np.abs(xs - lattice.xs[idx]) + np.abs(ys - lattice.ys[idx])
print(f"empirical mean walk at spacing 430: {walked.mean():.1f} m "
      f"(closed form: {analytic_ingress(430, 1.0).mean_distance_m:.1f} m)")
