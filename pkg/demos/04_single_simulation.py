"""One small simulation end to end, with every analytics view.

Run with:  python demos/04_single_simulation.py
"""

from stopsim.config import ScenarioConfig
from stopsim.engine import run_simulation, snapshot_counts, verify_output
from stopsim.metrics import qos_summary, sharing_histogram, tortuosity_report

scenario = ScenarioConfig(
    area_width_m=3000.0,
    area_height_m=6000.0,
    rate_per_h_km2=160.0,
    duration_s=3600.0,
    fleet_size=40,
    stop_spacing_m=430.0,
    seed=11,
)

output = run_simulation(scenario)
submitted, assigned, picked, dropped = snapshot_counts(output, output.horizon)

print(f"{len(output.requests)} requests over {output.horizon / 3600:.0f} h, "
      f"fleet of {output.fleet_size}")
print(f"by the horizon: {assigned} assigned, {picked} picked up, {dropped} dropped off")
print(f"consistency recheck: {verify_output(output)}")

qos = qos_summary(output)
print(f"\nrider times (means over {qos.served} served requests):")
print(f"  ingress {qos.mean_ingress:6.1f} s   waiting {qos.mean_waiting:6.1f} s")
print(f"  onboard {qos.mean_onboard:6.1f} s   egress  {qos.mean_egress:6.1f} s")
print(f"  total   {qos.mean_total:6.1f} s   rejected {qos.rejection_fraction:.1%}")

print(f"\nfleet: {output.vehicle_distance_m.mean() / 1000:.1f} km per vehicle, "
      f"route tortuosity {tortuosity_report(output).fleet_mean:.3f}")

hist = sharing_histogram(output)
print("\ntime share by passengers on board (-1 = idle):")
for level, frac in zip(hist.levels, hist.fractions):
    if frac > 0.002:
        print(f"  {level:3d}: {'#' * int(round(frac * 60)):<60} {frac:6.1%}")
