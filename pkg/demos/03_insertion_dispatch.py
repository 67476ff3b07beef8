"""The two-phase insertion search, step by step on a toy fleet.

For each incoming request the dispatcher tentatively places the pick-up at
every slot of every vehicle's schedule, keeps the cheapest feasible slot,
then does the same for the drop-off at later slots.  The vehicle whose final
tentative schedule executes fastest wins the request.

Run with:  python demos/03_insertion_dispatch.py
"""

from stopsim.demand import DROPOFF, PICKUP, StopPoint
from stopsim.dispatch import Rejection, assign_request, insertion_cost
from stopsim.geometry import GridWorld, build_stop_lattice
from stopsim.scheduling import (
    KinematicsConfig,
    Schedule,
    VehicleState,
    schedule_cost,
    service_times,
)

world = GridWorld(area_width=4000.0, area_height=4000.0)
lattice = build_stop_lattice(world, 500.0)
kin = KinematicsConfig()


def describe(state):
    cost = schedule_cost(state, state.schedule, kin, world, lattice)
    stops = " -> ".join(
        f"{'P' if sp.action == PICKUP else 'D'}{sp.request_id}@{sp.location}"
        for sp in state.schedule
    )
    print(f"  vehicle {state.vehicle_id}: cost {cost:7.1f} s  [{stops or 'idle'}]")


# Vehicle 0 is idle near the south-west corner; vehicle 1 is already busy.
busy_schedule = Schedule(
    (
        StopPoint(12, 0.0, 1200.0, PICKUP, 100),
        StopPoint(45, 0.0, 2400.0, DROPOFF, 100),
    )
)
fleet = [
    VehicleState(0, location=0, clock=0.0),
    VehicleState(1, location=10, clock=0.0, schedule=busy_schedule),
]

request_pickup = StopPoint(11, 0.0, 1200.0, PICKUP, 7)
request_dropoff = StopPoint(44, 0.0, 2400.0, DROPOFF, 7)

print("fleet before the request:")
for state in fleet:
    describe(state)

print("\nper-vehicle evaluation:")
for state in fleet:
    plan = insertion_cost(state, request_pickup, request_dropoff, kin, world, lattice)
    if plan is None:
        print(f"  vehicle {state.vehicle_id}: infeasible")
    else:
        print(
            f"  vehicle {state.vehicle_id}: cost {plan.cost:7.1f} s with pick-up at "
            f"slot {plan.pickup_position}, drop-off at slot {plan.dropoff_position}"
        )

result = assign_request(fleet, request_pickup, request_dropoff, kin, world, lattice)
if isinstance(result, Rejection):
    print("\nrequest rejected: no vehicle can meet the windows")
else:
    print(f"\nwinner: vehicle {result.vehicle_id} at cost {result.cost:.1f} s")
    winner = fleet[result.vehicle_id]
    times = service_times(winner, result.new_schedule, kin, world, lattice)
    for sp, t in zip(result.new_schedule, times):
        kind = "pick-up " if sp.action == PICKUP else "drop-off"
        print(f"  t={t:7.1f} s  {kind} request {sp.request_id} at stop {sp.location}")
