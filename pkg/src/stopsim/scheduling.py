"""Vehicle schedules and the math the dispatcher needs: times, feasibility, cost.

A schedule is an ordered sequence of stop points.  Serving it from the
vehicle's current location accumulates, per stop, the drive time of the leg,
a fixed per-moving-leg stop loss for decelerating and accelerating, and the
boarding or alighting dwell.  When two consecutive stops share a location the
leg contributes nothing (no movement, no stop loss): the operations are
performed back to back.

Service times are completion times, dwell included, and the service window
of a stop point constrains that completion: ``preferred <= done < preferred
+ max_extra``.  Occupancy after each served stop must stay strictly below
the seat capacity and never go negative.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from stopsim.demand import PICKUP, StopPoint, occupancy_delta
from stopsim.geometry import GridWorld, Point, StopLattice

# The default stop loss approximates a full stop from cruising speed at
# |a| = 1.676 m/s^2: 2 * (35/3.6) / 1.676 = 11.6 s, rounded to the
# conventional 11.5 s.  Override via KinematicsConfig for other profiles.
DEFAULT_STOP_LOSS_S = 11.5


@dataclass(frozen=True)
class KinematicsConfig:
    """Per-stop dwell times, per-leg stop loss and seat capacity."""

    boarding_time: float = 5.0
    alighting_time: float = 10.0
    stop_loss: float = DEFAULT_STOP_LOSS_S
    capacity: int = 45

    def __post_init__(self) -> None:
        for name in ("boarding_time", "alighting_time", "stop_loss", "capacity"):
            if getattr(self, name) < 0:
                raise ValueError(f"KinematicsConfig.{name} must be non-negative")

    def dwell(self, sp: StopPoint) -> float:
        return self.boarding_time if sp.action == PICKUP else self.alighting_time


@dataclass(frozen=True)
class Schedule:
    """Ordered stop points a vehicle plans to serve.  Immutable."""

    stops: tuple[StopPoint, ...] = ()

    def __len__(self) -> int:
        return len(self.stops)

    def __iter__(self):
        return iter(self.stops)

    def __getitem__(self, i: int) -> StopPoint:
        return self.stops[i]


@dataclass
class VehicleState:
    """A vehicle's position, clock, passenger load and planned schedule.

    ``location`` is either a stop index or a free :class:`Point` (a vehicle
    re-routed mid-leg sits between stops).
    """

    vehicle_id: int
    location: int | Point
    clock: float = 0.0
    onboard: int = 0
    schedule: Schedule = field(default_factory=Schedule)


def stop_position(location: int | Point, lattice: StopLattice) -> Point:
    """Resolve a stop index or free point to coordinates."""
    if isinstance(location, Point):
        return location
    return lattice.stop(location)


def service_times(
    state: VehicleState,
    schedule: Schedule,
    kin: KinematicsConfig,
    world: GridWorld,
    lattice: StopLattice,
) -> list[float]:
    """Completion time of each stop of ``schedule`` served from ``state``."""
    times = []
    prev = stop_position(state.location, lattice)
    t = state.clock
    for sp in schedule:
        at = lattice.stop(sp.location)
        d = abs(at.x - prev.x) + abs(at.y - prev.y)
        if d > 0.0:
            t = t + d / world.cruise_speed + kin.stop_loss
        t = t + kin.dwell(sp)
        times.append(t)
        prev = at
    return times


def is_feasible(
    state: VehicleState,
    schedule: Schedule,
    kin: KinematicsConfig,
    world: GridWorld,
    lattice: StopLattice,
) -> bool:
    """True iff every stop completes inside its window and occupancy stays legal.

    Occupancy after each stop must satisfy ``0 <= onboard < capacity``; the
    capacity bound is deliberately strict.
    """
    prev = stop_position(state.location, lattice)
    t = state.clock
    onboard = state.onboard
    for sp in schedule:
        at = lattice.stop(sp.location)
        d = abs(at.x - prev.x) + abs(at.y - prev.y)
        if d > 0.0:
            t = t + d / world.cruise_speed + kin.stop_loss
        t = t + kin.dwell(sp)
        if not (sp.preferred_time <= t < sp.preferred_time + sp.max_extra_time):
            return False
        onboard += occupancy_delta(sp)
        if not (0 <= onboard < kin.capacity):
            return False
        prev = at
    return True


def schedule_cost(
    state: VehicleState,
    schedule: Schedule,
    kin: KinematicsConfig,
    world: GridWorld,
    lattice: StopLattice,
) -> float:
    """Seconds needed to execute the whole schedule from the vehicle's position.

    This is the dispatcher's objective; it depends only on the stop sequence
    and locations, never on the stop points' preferred times.
    """
    prev = stop_position(state.location, lattice)
    c = 0.0
    for sp in schedule:
        at = lattice.stop(sp.location)
        d = abs(at.x - prev.x) + abs(at.y - prev.y)
        if d > 0.0:
            c = c + d / world.cruise_speed + kin.stop_loss
        c = c + kin.dwell(sp)
        prev = at
    return c


def insert(schedule: Schedule, position: int, sp: StopPoint) -> Schedule:
    """New schedule with ``sp`` inserted at the 1-based ``position``.

    ``position`` ranges from 1 (front) to ``len(schedule) + 1`` (append); the
    input schedule is left untouched.
    """
    n = len(schedule)
    if not 1 <= position <= n + 1:
        raise IndexError(f"insert position {position} out of range 1..{n + 1}")
    k = position - 1
    return Schedule(schedule.stops[:k] + (sp,) + schedule.stops[k:])
