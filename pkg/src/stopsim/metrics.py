"""Post-run analytics: capacity, distance, route tortuosity, sharing, QoS.

All functions are pure post-processing over the immutable records of a
:class:`~stopsim.engine.SimulationOutput`; per-vehicle computations are
independent of each other.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from stopsim.engine import ASSIGNED, REJECTED, SimulationOutput, snapshot_counts
from stopsim.geometry import Point

TORTUOSITY_HORIZON = 4

METRICS_HEADER = (
    "spacing_m,fleet,rate,submitted,assigned_3h,picked_3h,dropped_3h,rejected,"
    "km_per_vehicle,tortuosity,ingress_s,wait_s,onboard_s,egress_s,total_s,idle_frac"
)
SNAPSHOT_AT_S = 3 * 3600.0


def _as_xy(p) -> tuple[float, float]:
    if isinstance(p, Point):
        return p.x, p.y
    return float(p[0]), float(p[1])


def _path_length(sx: float, sy: float, pts) -> float:
    length = 0.0
    x, y = sx, sy
    for px, py in pts:
        length += abs(px - x) + abs(py - y)
        x, y = px, py
    return length


def min_visit_length(start, others: Sequence) -> float:
    """Shortest L1 length of any open path from ``start`` through all ``others``.

    Brute force over every visiting order; ``others`` may contain duplicate
    locations (they add nothing to the optimum).  Intended for small sets,
    a handful of points at most.
    """
    pts = [_as_xy(p) for p in others]
    if not pts:
        raise ValueError("min_visit_length needs at least one point to visit")
    sx, sy = _as_xy(start)
    best = math.inf
    for perm in itertools.permutations(pts):
        length = _path_length(sx, sy, perm)
        if length < best:
            best = length
    return best


def tortuosity_at(trajectory, i: int, horizon: int = TORTUOSITY_HORIZON) -> float:
    """Realized length over optimal length of the window starting at index ``i``.

    The window spans the ``horizon + 1`` served locations ``i .. i + horizon``
    (0-based).  A window whose points all coincide is perfectly efficient by
    convention (ratio 1).
    """
    traj = np.asarray(trajectory, dtype=float)
    n = len(traj)
    if not 0 <= i <= n - 1 - horizon:
        raise ValueError(
            f"window [{i}, {i + horizon}] exceeds trajectory of length {n}"
        )
    window = traj[i : i + horizon + 1]
    pts = [(float(p[0]), float(p[1])) for p in window]
    # realized length uses the same accumulation as the enumerator, so the
    # realized order is one of the candidates and the ratio is never below 1
    realized = _path_length(pts[0][0], pts[0][1], pts[1:])
    optimal = min_visit_length(pts[0], pts[1:])
    if optimal == 0.0:
        return 1.0
    return realized / optimal


def vehicle_tortuosity(trajectory, horizon: int = TORTUOSITY_HORIZON) -> float:
    """Mean window tortuosity over a vehicle's served-stop trajectory.

    Returns NaN for trajectories too short to hold a single window (such
    vehicles are excluded from fleet means).
    """
    n = len(trajectory)
    if n <= horizon:
        return math.nan
    return float(
        np.mean([tortuosity_at(trajectory, i, horizon) for i in range(n - horizon)])
    )


@dataclass(frozen=True)
class TortuosityReport:
    """Per-vehicle mean window tortuosity (NaN where undefined) and fleet mean."""

    horizon: int
    per_vehicle: np.ndarray
    fleet_mean: float


def tortuosity_report(output: SimulationOutput, horizon: int = TORTUOSITY_HORIZON) -> TortuosityReport:
    per_vehicle = np.array(
        [vehicle_tortuosity(traj, horizon) for traj in output.trajectories]
    )
    defined = per_vehicle[~np.isnan(per_vehicle)]
    fleet_mean = float(defined.mean()) if defined.size else math.nan
    return TortuosityReport(horizon=horizon, per_vehicle=per_vehicle, fleet_mean=fleet_mean)


@dataclass(frozen=True)
class SharingHistogram:
    """Time-weighted distribution of vehicle occupancy over the measurement window.

    Level -1 means idle (no passengers and nothing scheduled); level 0 means
    moving or dwelling with an empty cabin.  ``per_vehicle[v, k]`` is the
    fraction of the window vehicle ``v`` spent at ``levels[k]``; ``fractions``
    is the fleet mean, summing to 1.
    """

    levels: np.ndarray
    fractions: np.ndarray
    per_vehicle: np.ndarray

    def fraction_at_or_above(self, level: int) -> float:
        return float(self.fractions[self.levels >= level].sum())


def sharing_histogram(output: SimulationOutput, horizon: float | None = None) -> SharingHistogram:
    """Occupancy distribution of each vehicle over ``[0, horizon]``."""
    if horizon is None:
        horizon = output.horizon
    if horizon <= 0:
        raise ValueError(f"histogram window must be positive, got {horizon}")
    max_level = max((int(levels.max(initial=-1)) for _, levels in output.timelines), default=-1)
    levels = np.arange(-1, max(max_level, 0) + 1)
    per_vehicle = np.zeros((output.fleet_size, len(levels)))
    for v, (times, lv) in enumerate(output.timelines):
        bounded = np.append(np.clip(times, 0.0, horizon), horizon)
        durations = np.diff(bounded)
        for level, dur in zip(lv, durations):
            if dur > 0:
                per_vehicle[v, level + 1] += dur
    per_vehicle /= horizon
    return SharingHistogram(
        levels=levels, fractions=per_vehicle.mean(axis=0), per_vehicle=per_vehicle
    )


@dataclass(frozen=True)
class QoSSummary:
    """Mean rider-side times of served requests, and the rejection fraction.

    The total is walking to the entry stop, waiting there, riding, and
    walking from the exit stop; rejected requests are excluded from the time
    means and counted in ``rejection_fraction``.
    """

    mean_ingress: float
    mean_waiting: float
    mean_onboard: float
    mean_egress: float
    mean_total: float
    served: int
    rejected: int
    rejection_fraction: float


def qos_summary(output: SimulationOutput) -> QoSSummary:
    req = output.requests
    submitted = len(req)
    rejected = int(np.count_nonzero(req.status == REJECTED))
    done = (req.status == ASSIGNED) & ~np.isnan(req.dropoff_time)
    served = int(np.count_nonzero(done))
    if served == 0:
        return QoSSummary(
            mean_ingress=math.nan,
            mean_waiting=math.nan,
            mean_onboard=math.nan,
            mean_egress=math.nan,
            mean_total=math.nan,
            served=0,
            rejected=rejected,
            rejection_fraction=rejected / submitted if submitted else 0.0,
        )
    ingress = req.ingress[done]
    waiting = req.pickup_time[done] - req.entry_time[done]
    onboard = req.dropoff_time[done] - req.pickup_time[done]
    egress = req.egress[done]
    total = ingress + waiting + onboard + egress
    return QoSSummary(
        mean_ingress=float(ingress.mean()),
        mean_waiting=float(waiting.mean()),
        mean_onboard=float(onboard.mean()),
        mean_egress=float(egress.mean()),
        mean_total=float(total.mean()),
        served=served,
        rejected=rejected,
        rejection_fraction=rejected / submitted if submitted else 0.0,
    )


class AnalyticIngress(NamedTuple):
    """Closed-form walk burden of a lattice with full square cells."""

    mean_distance_m: float
    mean_time_s: float
    max_time_s: float


def analytic_ingress(spacing: float, walk_speed: float) -> AnalyticIngress:
    """Expected and worst-case walk to the nearest stop of a pitch-``spacing`` lattice.

    Inside a full square cell each axis offset is uniform on [0, spacing/2],
    so the mean L1 walk is spacing/2 and the worst corner walk is spacing.
    Boundary-clipped cells shift these slightly; see the lattice docs.
    """
    if not spacing > 0:
        raise ValueError(f"spacing must be positive, got {spacing}")
    if not walk_speed > 0:
        raise ValueError(f"walk speed must be positive, got {walk_speed}")
    mean_distance = spacing / 2.0
    return AnalyticIngress(
        mean_distance_m=mean_distance,
        mean_time_s=mean_distance / walk_speed,
        max_time_s=spacing / walk_speed,
    )


def idle_fraction(output: SimulationOutput, horizon: float | None = None) -> float:
    """Fleet-mean fraction of the window spent idle (level -1)."""
    hist = sharing_histogram(output, horizon)
    return float(hist.fractions[hist.levels == -1].sum())


def metrics_row(output: SimulationOutput) -> dict:
    """One result row of a sweep, keyed by the documented column names."""
    scenario = output.scenario
    at = min(SNAPSHOT_AT_S, output.horizon)
    submitted, assigned, picked, dropped = snapshot_counts(output, at)
    total_submitted = len(output.requests)
    rejected = int(np.count_nonzero(output.requests.status == REJECTED))
    qos = qos_summary(output)
    tort = tortuosity_report(output)
    return {
        "spacing_m": scenario.stop_spacing_m,
        "fleet": scenario.fleet_size,
        "rate": scenario.rate_per_h_km2,
        "submitted": total_submitted,
        "assigned_3h": assigned,
        "picked_3h": picked,
        "dropped_3h": dropped,
        "rejected": rejected,
        "km_per_vehicle": float(output.vehicle_distance_m.mean()) / 1000.0,
        "tortuosity": tort.fleet_mean,
        "ingress_s": qos.mean_ingress,
        "wait_s": qos.mean_waiting,
        "onboard_s": qos.mean_onboard,
        "egress_s": qos.mean_egress,
        "total_s": qos.mean_total,
        "idle_frac": idle_fraction(output),
    }


METRICS_COLUMNS = METRICS_HEADER.split(",")


def format_metrics_row(row: dict) -> str:
    parts = []
    for col in METRICS_COLUMNS:
        value = row[col]
        if isinstance(value, float):
            parts.append(repr(value))
        else:
            parts.append(str(value))
    return ",".join(parts)


def write_metrics(rows: Iterable[dict], path) -> None:
    """Write result rows as delimited text with the documented column order."""
    with open(path, "w") as fh:
        fh.write(METRICS_HEADER + "\n")
        for row in rows:
            fh.write(format_metrics_row(row) + "\n")
