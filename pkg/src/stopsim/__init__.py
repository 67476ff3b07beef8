"""Ride-pooling fleet simulator with demand consolidated onto a stop lattice.

The package simulates a fleet of shared vehicles serving trip requests whose
pick-ups and drop-offs are restricted to a configurable square lattice of
admitted stop locations.  The lattice pitch is the consolidation knob: a
coarser lattice pools more riders per stop at the price of longer walks.

Modules
-------
geometry    world rectangle, stop lattice, L1 travel times
demand      Poisson trip generation and conversion to stop points
scheduling  vehicle schedules: service times, feasibility, cost
dispatch    two-phase best-insertion assignment over the fleet
engine      deterministic discrete-event simulation loop
metrics     capacity, distance, tortuosity, sharing and travel-time analytics
experiment  scenario configuration, parameter sweeps and the CLI
"""

from stopsim.geometry import (
    GridWorld,
    Point,
    StopLattice,
    build_stop_lattice,
    nearest_stop,
    rect_distance,
    travel_time,
)

__all__ = [
    "GridWorld",
    "Point",
    "StopLattice",
    "build_stop_lattice",
    "nearest_stop",
    "rect_distance",
    "travel_time",
]

__version__ = "0.1.0"
