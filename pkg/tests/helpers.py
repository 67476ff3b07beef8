"""Shared test fixtures: independent oracles and random instance generators.

The oracles deliberately re-derive everything through the reference schedule
math (`insert` + `is_feasible` + `schedule_cost`), never through the search
kernels they are checking.  Instance generators draw all quantities from a
dyadic grid (quarter-second times, integer-meter stops, power-of-two speed)
so both evaluation paths compute exact binary fractions and must agree to
the bit, ties included.
"""

from __future__ import annotations

import numpy as np

from stopsim.demand import DROPOFF, PICKUP, StopPoint
from stopsim.geometry import GridWorld, build_stop_lattice
from stopsim.scheduling import (
    KinematicsConfig,
    Schedule,
    VehicleState,
    insert,
    is_feasible,
    schedule_cost,
)


def oracle_insertion(state, pickup, dropoff, kin, world, lattice):
    """Exhaustive two-phase insertion: best pick-up slot, then best drop-off slot."""
    n = len(state.schedule)
    best = None
    for i in range(1, n + 2):
        tentative = insert(state.schedule, i, pickup)
        if not is_feasible(state, tentative, kin, world, lattice):
            continue
        c = schedule_cost(state, tentative, kin, world, lattice)
        if best is None or c < best[0]:
            best = (c, i, tentative)
    if best is None:
        return None
    _, i_star, with_pickup = best
    best2 = None
    for j in range(i_star + 1, n + 3):
        tentative = insert(with_pickup, j, dropoff)
        if not is_feasible(state, tentative, kin, world, lattice):
            continue
        c = schedule_cost(state, tentative, kin, world, lattice)
        if best2 is None or c < best2[0]:
            best2 = (c, j)
    if best2 is None:
        return None
    return best2[0], i_star, best2[1]


def oracle_assign(fleet, pickup, dropoff, kin, world, lattice):
    """Fleet-level oracle: min cost, ties to the lowest vehicle id."""
    best = None
    for state in fleet:
        got = oracle_insertion(state, pickup, dropoff, kin, world, lattice)
        if got is None:
            continue
        cost, i, j = got
        key = (cost, state.vehicle_id)
        if best is None or key < best[0]:
            best = (key, state.vehicle_id, i, j, cost)
    return best


def dyadic_setting():
    world = GridWorld(area_width=1600, area_height=1600, cruise_speed=8.0)
    lattice = build_stop_lattice(world, 200)
    kin = KinematicsConfig(capacity=4)
    return world, lattice, kin


def random_stop_point(rng, lattice, rid, action=None):
    if action is None:
        action = PICKUP if rng.integers(0, 2) else DROPOFF
    return StopPoint(
        location=int(rng.integers(0, len(lattice))),
        preferred_time=float(rng.integers(0, 8000)) / 4.0,
        max_extra_time=float(rng.integers(200, 4000)) / 4.0,
        action=action,
        request_id=rid,
    )


def random_vehicle(rng, lattice, kin, world, vid, max_stops):
    """A vehicle whose schedule is feasible by construction.

    Preferred times are anchored at the actual completion times (dyadic
    offsets), actions keep the running occupancy inside bounds.
    """
    loc = int(rng.integers(0, len(lattice)))
    clock = float(rng.integers(0, 2000)) / 4.0
    onboard = int(rng.integers(0, 3))
    n = int(rng.integers(0, max_stops + 1))
    px, py = float(lattice.xs[loc]), float(lattice.ys[loc])
    t = clock
    occ = onboard
    stops = []
    for k in range(n):
        s = int(rng.integers(0, len(lattice)))
        sx, sy = float(lattice.xs[s]), float(lattice.ys[s])
        d = abs(sx - px) + abs(sy - py)
        if occ <= 0:
            action = PICKUP
        elif occ >= kin.capacity - 1:
            action = DROPOFF
        else:
            action = PICKUP if rng.integers(0, 2) else DROPOFF
        if d > 0.0:
            t = t + d / world.cruise_speed + kin.stop_loss
        t = t + (kin.boarding_time if action == PICKUP else kin.alighting_time)
        pref = t - float(rng.integers(0, 1200)) / 4.0
        extra = (t - pref) + float(rng.integers(1, 2400)) / 4.0
        stops.append(StopPoint(s, pref, extra, action, 100 + k))
        occ += 1 if action == PICKUP else -1
        px, py = sx, sy
    return VehicleState(
        vid, location=loc, clock=clock, onboard=onboard, schedule=Schedule(tuple(stops))
    )


def random_instance(rng, lattice, kin, world, max_vehicles=5, max_stops=8):
    fleet = []
    for vid in range(int(rng.integers(1, max_vehicles + 1))):
        if rng.integers(0, 5) == 0:
            # occasional arbitrary (typically infeasible) schedule: the
            # search must treat it exactly like the oracle does
            n = int(rng.integers(0, max_stops + 1))
            stops = tuple(random_stop_point(rng, lattice, rid=100 + k) for k in range(n))
            fleet.append(
                VehicleState(
                    vehicle_id=vid,
                    location=int(rng.integers(0, len(lattice))),
                    clock=float(rng.integers(0, 2000)) / 4.0,
                    onboard=int(rng.integers(0, 3)),
                    schedule=Schedule(stops),
                )
            )
        else:
            fleet.append(random_vehicle(rng, lattice, kin, world, vid, max_stops))
    now = max(v.clock for v in fleet)
    pickup = StopPoint(
        location=int(rng.integers(0, len(lattice))),
        preferred_time=now + float(rng.integers(0, 800)) / 4.0,
        max_extra_time=float(rng.integers(200, 6000)) / 4.0,
        action=PICKUP,
        request_id=7,
    )
    dropoff = StopPoint(
        location=int(rng.integers(0, len(lattice))),
        preferred_time=pickup.preferred_time + float(rng.integers(0, 1600)) / 4.0,
        max_extra_time=pickup.max_extra_time,
        action=DROPOFF,
        request_id=7,
    )
    return fleet, pickup, dropoff
