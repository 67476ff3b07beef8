"""Per-request dispatch: two-phase best-insertion over the fleet.

For every incoming request the dispatcher tries, vehicle by vehicle, to place
the pick-up stop point at each position of the current schedule (appending
allowed), keeps the cheapest feasible placement, then tries every later
position for the drop-off.  The vehicle whose final tentative schedule is
cheapest to execute wins; if no vehicle admits a feasible placement the
request is rejected.  All ties break deterministically: smallest pick-up
position, then smallest drop-off position, then lowest vehicle id.

The vehicle scan may be parallelized freely since each evaluation is pure;
the reduction used here is a sequential argmin, which the tie rules make
order-independent.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from stopsim import _kernels
from stopsim.demand import DROPOFF, PICKUP, StopPoint
from stopsim.geometry import GridWorld, StopLattice
from stopsim.scheduling import (
    KinematicsConfig,
    Schedule,
    VehicleState,
    insert,
    stop_position,
)


class InsertionPlan(NamedTuple):
    """Result of evaluating one vehicle: execution cost and 1-based positions."""

    cost: float
    pickup_position: int
    dropoff_position: int


@dataclass(frozen=True)
class Assignment:
    """A request accepted by ``vehicle_id`` with its updated schedule."""

    vehicle_id: int
    pickup_position: int
    dropoff_position: int
    cost: float
    new_schedule: Schedule


@dataclass(frozen=True)
class Rejection:
    """No vehicle could serve the request within its windows."""

    request_id: int
    reason: str = "all-vehicles-infeasible"


def _validate_pair(pickup: StopPoint, dropoff: StopPoint) -> None:
    if pickup.action != PICKUP or dropoff.action != DROPOFF:
        raise ValueError(
            f"malformed stop-point pair: actions are {pickup.action!r}/{dropoff.action!r}"
        )
    if pickup.request_id != dropoff.request_id:
        raise ValueError(
            f"malformed stop-point pair: request ids differ "
            f"({pickup.request_id} vs {dropoff.request_id})"
        )


def _schedule_arrays(schedule: Schedule, lattice: StopLattice):
    n = len(schedule)
    sx = np.empty(n)
    sy = np.empty(n)
    st = np.empty(n)
    sd = np.empty(n)
    sr = np.empty(n, np.int8)
    for k, sp in enumerate(schedule):
        sx[k] = lattice.xs[sp.location]
        sy[k] = lattice.ys[sp.location]
        st[k] = sp.preferred_time
        sd[k] = sp.max_extra_time
        sr[k] = 1 if sp.action == PICKUP else -1
    return sx, sy, st, sd, sr


def insertion_cost(
    state: VehicleState,
    pickup: StopPoint,
    dropoff: StopPoint,
    kin: KinematicsConfig,
    world: GridWorld,
    lattice: StopLattice,
) -> InsertionPlan | None:
    """Cheapest feasible two-phase insertion into one vehicle, or ``None``.

    The reported cost is the execution time of the full tentative schedule
    from the vehicle's current position, not the increment over the current
    schedule.
    """
    _validate_pair(pickup, dropoff)
    pos = stop_position(state.location, lattice)
    sx, sy, st, sd, sr = _schedule_arrays(state.schedule, lattice)
    cost, i, j = _kernels.eval_vehicle(
        pos.x,
        pos.y,
        state.clock,
        state.onboard,
        sx,
        sy,
        st,
        sd,
        sr,
        lattice.xs[pickup.location],
        lattice.ys[pickup.location],
        pickup.preferred_time,
        pickup.max_extra_time,
        lattice.xs[dropoff.location],
        lattice.ys[dropoff.location],
        dropoff.preferred_time,
        dropoff.max_extra_time,
        world.cruise_speed,
        kin.boarding_time,
        kin.alighting_time,
        kin.stop_loss,
        kin.capacity,
    )
    if i < 0:
        return None
    return InsertionPlan(cost=float(cost), pickup_position=i + 1, dropoff_position=j + 1)


def assign_request(
    fleet: Sequence[VehicleState],
    pickup: StopPoint,
    dropoff: StopPoint,
    kin: KinematicsConfig,
    world: GridWorld,
    lattice: StopLattice,
) -> Assignment | Rejection:
    """Evaluate every vehicle and commit the request to the cheapest one.

    Returns an :class:`Assignment` carrying the winning vehicle's new
    schedule, or a :class:`Rejection` when every vehicle is infeasible.
    """
    if not fleet:
        raise ValueError("assign_request requires a non-empty fleet")
    best_key = None
    best_state = None
    best_plan = None
    for state in fleet:
        plan = insertion_cost(state, pickup, dropoff, kin, world, lattice)
        if plan is None:
            continue
        key = (plan.cost, state.vehicle_id)
        if best_key is None or key < best_key:
            best_key = key
            best_state = state
            best_plan = plan
    if best_plan is None:
        return Rejection(request_id=pickup.request_id)
    tentative = insert(best_state.schedule, best_plan.pickup_position, pickup)
    new_schedule = insert(tentative, best_plan.dropoff_position, dropoff)
    return Assignment(
        vehicle_id=best_state.vehicle_id,
        pickup_position=best_plan.pickup_position,
        dropoff_position=best_plan.dropoff_position,
        cost=best_plan.cost,
        new_schedule=new_schedule,
    )
