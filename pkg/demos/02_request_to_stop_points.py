"""From a trip wish to dispatchable stop points.

A rider appears somewhere, walks to the nearest admitted stop, and requests
a ride from there.  The trip becomes two stop points: a pick-up whose window
opens when the rider reaches the entry stop, and a drop-off whose window
opens at the earliest instant a car could reach the exit stop.

Run with:  python demos/02_request_to_stop_points.py
"""

from stopsim.demand import DemandConfig, TripRequest, generate_demand, to_stop_points
from stopsim.geometry import GridWorld, Point, build_stop_lattice

world = GridWorld()
lattice = build_stop_lattice(world, 430)

trip = TripRequest(
    id=0,
    origin=Point(1000.0, 2000.0),
    destination=Point(3500.0, 9000.0),
    appear_time=600.0,
)
pickup, dropoff, ingress, egress = to_stop_points(trip, lattice, world)

entry = lattice.stop(pickup.location)
exit_ = lattice.stop(dropoff.location)
print(f"origin ({trip.origin.x:.0f}, {trip.origin.y:.0f}) "
      f"-> entry stop ({entry.x:.0f}, {entry.y:.0f}), walk {ingress:.0f} s")
print(f"destination ({trip.destination.x:.0f}, {trip.destination.y:.0f}) "
      f"<- exit stop ({exit_.x:.0f}, {exit_.y:.0f}), walk {egress:.0f} s")
print(f"pick-up window  [{pickup.preferred_time:7.1f}, "
      f"{pickup.preferred_time + pickup.max_extra_time:7.1f}) s")
print(f"drop-off window [{dropoff.preferred_time:7.1f}, "
      f"{dropoff.preferred_time + dropoff.max_extra_time:7.1f}) s")

# Stochastic demand: Poisson arrivals, uniform endpoints, short trips walk.
config = DemandConfig(rate=320.0, duration=600.0, seed=42)
requests = generate_demand(config, world)
print(f"\n10 minutes of demand at 320 req/h/km^2: {len(requests)} trips kept")
mean_len = sum(
    abs(r.origin.x - r.destination.x) + abs(r.origin.y - r.destination.y)
    for r in requests
) / len(requests)
print(f"mean kept trip length {mean_len / 1000:.2f} km "
      f"(trips within {config.walk_threshold:.0f} m are walked, not requested)")
