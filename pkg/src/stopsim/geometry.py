"""Rectilinear grid world: admitted-stop lattice, nearest-stop lookup, travel times.

All coordinates are meters east/north of the area's south-west corner, all
times are seconds.  Travel follows rectilinear (L1) shortest paths at a
constant speed per mode, so no explicit road graph is needed: on a uniform
grid with constant speeds the L1 metric is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Default service area: a 60 km^2 rectangle with a Manhattan-like aspect
# ratio.  The height is a multiple of the coarsest stop spacing in the
# default sweep (17 * 860 m) so that even the sparsest lattice covers the
# area with full cells: the worst-case walk to a stop then stays within one
# cell half-perimeter and the mean walk stays near spacing/2.
DEFAULT_AREA_M2 = 60e6
DEFAULT_AREA_HEIGHT_M = 14620.0
DEFAULT_AREA_WIDTH_M = DEFAULT_AREA_M2 / DEFAULT_AREA_HEIGHT_M

WALK_SPEED_MPS = 1.0           # 3.6 km/h
CRUISE_SPEED_MPS = 35.0 / 3.6  # 35 km/h


class ConfigError(ValueError):
    """Raised for invalid world, lattice or scenario parameters."""


@dataclass(frozen=True)
class Point:
    """A planar location, meters east (x) and north (y) of the origin."""

    x: float
    y: float


@dataclass(frozen=True)
class GridWorld:
    """Rectangular service area with rectilinear roads and constant speeds.

    The road spacings are descriptive only: with constant speeds the L1
    metric already equals the grid shortest path, so travel times never
    depend on them.
    """

    area_width: float = DEFAULT_AREA_WIDTH_M
    area_height: float = DEFAULT_AREA_HEIGHT_M
    ew_road_spacing: float = 80.0
    ns_road_spacing: float = 200.0
    walk_speed: float = WALK_SPEED_MPS
    cruise_speed: float = CRUISE_SPEED_MPS

    def __post_init__(self) -> None:
        for name in (
            "area_width",
            "area_height",
            "ew_road_spacing",
            "ns_road_spacing",
            "walk_speed",
            "cruise_speed",
        ):
            value = getattr(self, name)
            if not value > 0:
                raise ConfigError(f"GridWorld.{name} must be strictly positive, got {value!r}")

    @property
    def area_km2(self) -> float:
        return self.area_width * self.area_height / 1e6

    def contains(self, p: Point) -> bool:
        return 0.0 <= p.x <= self.area_width and 0.0 <= p.y <= self.area_height


@dataclass(frozen=True)
class StopLattice:
    """Regular square lattice of admitted stop locations.

    Stops sit at cell centers, ``(spacing/2 + i*spacing, spacing/2 + j*spacing)``,
    and are indexed row-major from the south-west: ``index = row * cols + col``.
    Instances are immutable after construction and safe to share across
    workers; the coordinate arrays are marked read-only.
    """

    spacing: float
    cols: int
    rows: int
    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self) -> None:
        self.xs.setflags(write=False)
        self.ys.setflags(write=False)

    def __len__(self) -> int:
        return self.cols * self.rows

    def stop(self, index: int) -> Point:
        return Point(float(self.xs[index]), float(self.ys[index]))

    def stops(self) -> list[Point]:
        return [Point(float(x), float(y)) for x, y in zip(self.xs, self.ys)]


def _axis_count(length: float, spacing: float) -> int:
    # Number of centers spacing/2 + i*spacing that fall inside [0, length].
    # The epsilon keeps exactly-divisible lengths from losing their last
    # center to float rounding.
    return int(math.floor((length - 0.5 * spacing) / spacing + 1e-9)) + 1


def build_stop_lattice(world: GridWorld, spacing: float) -> StopLattice:
    """Build the admitted-stop lattice of the given pitch covering the world.

    Every cell center that lies inside the area becomes a stop, so interior
    cells are full ``spacing x spacing`` squares and boundary cells may be
    clipped.  Raises :class:`ConfigError` if the spacing is non-positive or
    exceeds either area dimension.
    """
    if not spacing > 0:
        raise ConfigError(f"stop spacing must be strictly positive, got {spacing!r}")
    if spacing > min(world.area_width, world.area_height):
        raise ConfigError(
            f"stop spacing {spacing!r} exceeds the area dimensions "
            f"({world.area_width!r} x {world.area_height!r})"
        )
    cols = _axis_count(world.area_width, spacing)
    rows = _axis_count(world.area_height, spacing)
    cx = 0.5 * spacing + spacing * np.arange(cols, dtype=np.float64)
    cy = 0.5 * spacing + spacing * np.arange(rows, dtype=np.float64)
    xs = np.tile(cx, rows)
    ys = np.repeat(cy, cols)
    return StopLattice(spacing=float(spacing), cols=cols, rows=rows, xs=xs, ys=ys)


def _axis_index(u: float, spacing: float, count: int) -> int:
    # Index of the nearest center along one axis; exact midpoints resolve to
    # the lower index so that full L1 ties go to the lowest stop index.
    raw = (u - 0.5 * spacing) / spacing
    i = math.ceil(raw - 0.5)
    return min(max(i, 0), count - 1)


def nearest_stop(lattice: StopLattice, z: Point) -> int:
    """Index of the stop minimizing L1 distance to ``z``; ties take the lowest index.

    The L1 distance to a lattice separates per axis, so the nearest stop is
    found analytically; equidistant points resolve to the lower row, then the
    lower column, which is exactly the lowest row-major index.
    """
    if len(lattice) == 0:
        raise ConfigError("cannot look up the nearest stop of an empty lattice")
    col = _axis_index(z.x, lattice.spacing, lattice.cols)
    row = _axis_index(z.y, lattice.spacing, lattice.rows)
    return row * lattice.cols + col


def nearest_stop_indices(lattice: StopLattice, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Vectorized :func:`nearest_stop` for arrays of coordinates."""
    if len(lattice) == 0:
        raise ConfigError("cannot look up the nearest stop of an empty lattice")
    d = lattice.spacing
    cols = np.ceil((np.asarray(xs) - 0.5 * d) / d - 0.5).astype(np.int64)
    rows = np.ceil((np.asarray(ys) - 0.5 * d) / d - 0.5).astype(np.int64)
    np.clip(cols, 0, lattice.cols - 1, out=cols)
    np.clip(rows, 0, lattice.rows - 1, out=rows)
    return rows * lattice.cols + cols


def rect_distance(a: Point, b: Point) -> float:
    """Rectilinear (L1) distance in meters."""
    return abs(a.x - b.x) + abs(a.y - b.y)


def travel_time(world: GridWorld, a: Point, b: Point, mode: str) -> float:
    """Seconds to travel the L1 shortest path between two points.

    ``mode`` is ``"walk"`` or ``"drive"``.  This is pure movement time;
    boarding and acceleration losses are accounted for by the scheduling
    layer.
    """
    if mode == "walk":
        speed = world.walk_speed
    elif mode == "drive":
        speed = world.cruise_speed
    else:
        raise ValueError(f"unknown travel mode {mode!r}, expected 'walk' or 'drive'")
    return rect_distance(a, b) / speed
