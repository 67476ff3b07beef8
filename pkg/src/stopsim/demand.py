"""Stochastic trip demand and its translation into pick-up/drop-off stop points.

Requests arrive as a homogeneous Poisson process over the whole area with
uniform i.i.d. origins and destinations.  Arrivals whose origin-destination
L1 distance is within walking range are discarded but still consume their
draws, so the kept/discarded split is a thinning of a single stream: changing
the walk threshold never reshuffles the remaining realization.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterable, Literal

import numpy as np

from stopsim.geometry import GridWorld, Point, StopLattice, nearest_stop, rect_distance

PICKUP: Literal["pickup"] = "pickup"
DROPOFF: Literal["dropoff"] = "dropoff"

DEMAND_EXPORT_HEADER = "id,appear_s,ox_m,oy_m,dx_m,dy_m,delta_t_s"


@dataclass(frozen=True)
class TripRequest:
    """One trip wish: from ``origin`` to ``destination``, appearing at ``appear_time``.

    ``max_extra_time`` is the rider's slack: the pick-up must happen within
    that many seconds of reaching the entry stop, and the drop-off within
    that many seconds of the earliest feasible car arrival at the exit stop.
    """

    id: int
    origin: Point
    destination: Point
    appear_time: float
    max_extra_time: float = 1200.0


@dataclass(frozen=True)
class StopPoint:
    """Atomic dispatch unit: serve one rider at one admitted stop in a time window.

    ``location`` is a stop index, ``action`` is ``"pickup"`` or ``"dropoff"``
    and the service window is ``[preferred_time, preferred_time + max_extra_time)``.
    """

    location: int
    preferred_time: float
    max_extra_time: float
    action: str
    request_id: int


def occupancy_delta(sp: StopPoint) -> int:
    """+1 for a pick-up, -1 for a drop-off."""
    return 1 if sp.action == PICKUP else -1


@dataclass(frozen=True)
class DemandConfig:
    """Demand process parameters.

    ``rate`` is in requests per hour per km^2, ``walk_threshold`` in meters
    (trips shorter than this never call the system), ``duration`` in seconds.
    """

    rate: float = 320.0
    walk_threshold: float = 1600.0
    duration: float = 4 * 3600.0
    seed: int = 0
    max_extra_time: float = 1200.0

    def __post_init__(self) -> None:
        if not self.rate > 0:
            raise ValueError(f"demand rate must be positive, got {self.rate!r}")
        if not self.duration > 0:
            raise ValueError(f"demand duration must be positive, got {self.duration!r}")


def _raw_arrivals(config: DemandConfig, world: GridWorld, rng: np.random.Generator):
    """Pre-filter arrival times and origin/destination draws, in draw order."""
    mean = config.rate * world.area_km2 * config.duration / 3600.0
    n = int(rng.poisson(mean))
    times = np.sort(rng.uniform(0.0, config.duration, n))
    ox = rng.uniform(0.0, world.area_width, n)
    oy = rng.uniform(0.0, world.area_height, n)
    dx = rng.uniform(0.0, world.area_width, n)
    dy = rng.uniform(0.0, world.area_height, n)
    return times, ox, oy, dx, dy


def poisson_arrival_times(config: DemandConfig, world: GridWorld) -> np.ndarray:
    """Arrival instants of the underlying (pre-filter) Poisson stream."""
    rng = np.random.default_rng(config.seed)
    return _raw_arrivals(config, world, rng)[0]


def generate_demand(config: DemandConfig, world: GridWorld) -> list[TripRequest]:
    """Generate the time-ordered trip requests of one scenario realization.

    Deterministic for a fixed seed.  Arrivals with an origin-destination L1
    distance at or below the walk threshold are dropped.
    """
    rng = np.random.default_rng(config.seed)
    times, ox, oy, dx, dy = _raw_arrivals(config, world, rng)
    keep = (np.abs(ox - dx) + np.abs(oy - dy)) > config.walk_threshold
    requests = []
    for rid, k in enumerate(np.flatnonzero(keep)):
        requests.append(
            TripRequest(
                id=rid,
                origin=Point(float(ox[k]), float(oy[k])),
                destination=Point(float(dx[k]), float(dy[k])),
                appear_time=float(times[k]),
                max_extra_time=config.max_extra_time,
            )
        )
    return requests


def to_stop_points(
    request: TripRequest, lattice: StopLattice, world: GridWorld
) -> tuple[StopPoint, StopPoint, float, float]:
    """Translate a trip into its pick-up and drop-off stop points.

    Returns ``(pickup, dropoff, ingress_time, egress_time)``.  The rider
    walks to the nearest stop, so the pick-up window opens at
    ``appear_time + ingress_time``; the drop-off window opens at the earliest
    instant a car could reach the exit stop from the entry stop, i.e. entry
    arrival plus the direct drive time between the two stops.
    """
    entry = nearest_stop(lattice, request.origin)
    exit_ = nearest_stop(lattice, request.destination)
    ingress = rect_distance(request.origin, lattice.stop(entry)) / world.walk_speed
    egress = rect_distance(lattice.stop(exit_), request.destination) / world.walk_speed
    t_entry = request.appear_time + ingress
    t_exit = t_entry + rect_distance(lattice.stop(entry), lattice.stop(exit_)) / world.cruise_speed
    pickup = StopPoint(entry, t_entry, request.max_extra_time, PICKUP, request.id)
    dropoff = StopPoint(exit_, t_exit, request.max_extra_time, DROPOFF, request.id)
    return pickup, dropoff, ingress, egress


def export_demand(requests: Iterable[TripRequest], path) -> None:
    """Write requests as delimited text for replay across implementations."""
    with open(path, "w", newline="") as fh:
        fh.write(DEMAND_EXPORT_HEADER + "\n")
        for r in requests:
            fh.write(
                f"{r.id},{r.appear_time!r},{r.origin.x!r},{r.origin.y!r},"
                f"{r.destination.x!r},{r.destination.y!r},{r.max_extra_time!r}\n"
            )


def load_demand(path) -> list[TripRequest]:
    """Read back a demand file written by :func:`export_demand`."""
    requests = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if ",".join(header) != DEMAND_EXPORT_HEADER:
            raise ValueError(
                f"unexpected demand file header {','.join(header)!r}, "
                f"expected {DEMAND_EXPORT_HEADER!r}"
            )
        for row in reader:
            rid, appear, ox, oy, dx, dy, dt = row
            requests.append(
                TripRequest(
                    id=int(rid),
                    origin=Point(float(ox), float(oy)),
                    destination=Point(float(dx), float(dy)),
                    appear_time=float(appear),
                    max_extra_time=float(dt),
                )
            )
    return requests
