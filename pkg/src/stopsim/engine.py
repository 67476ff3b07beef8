"""Deterministic discrete-event loop tying demand, dispatch and vehicle motion.

Each trip request surfaces the moment its rider reaches the entry stop and is
dispatched immediately against the whole fleet.  Vehicles execute their
schedules under the service-time model; when an assignment reroutes a moving
vehicle, its position is interpolated along the current leg (x segment first,
then y, uniformly over the leg's movement time) and that point becomes the
new reference from which the updated schedule is timed and costed.  Only the
winning vehicle is re-anchored; every other vehicle keeps executing its
promised times.

The loop is sequential and, for a fixed scenario, fully deterministic: ties
in event time resolve request arrivals first, then completions by vehicle
index, and all randomness comes from seeded generators.
"""

from __future__ import annotations

import heapq
from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from stopsim import _kernels
from stopsim.config import ScenarioConfig
from stopsim.demand import DROPOFF, PICKUP, StopPoint, generate_demand
from stopsim.geometry import Point, nearest_stop_indices
from stopsim.scheduling import Schedule, VehicleState, is_feasible

# event kinds, in tie-break priority order at equal timestamps
ARRIVAL, ASSIGN, REJECT, PICKUP_EV, DROPOFF_EV, PARK, END = range(7)
KIND_NAMES = ("arrival", "assign", "reject", "pickup", "dropoff", "park", "end")

EVENT_LOG_HEADER = "time_s,kind,request_id,vehicle_id,stop_x_m,stop_y_m,occupancy_after"

# request statuses
REJECTED = 0
ASSIGNED = 1


@dataclass
class EventLog:
    """Column arrays of every logged event, nondecreasing in time."""

    time: np.ndarray
    kind: np.ndarray
    request: np.ndarray
    vehicle: np.ndarray
    x: np.ndarray
    y: np.ndarray
    occupancy: np.ndarray

    def __len__(self) -> int:
        return len(self.time)


@dataclass
class RequestLog:
    """Per-request timing and outcome records (NaN where an event never happened)."""

    appear: np.ndarray
    entry_time: np.ndarray  # arrival at the entry stop; dispatch instant
    exit_earliest: np.ndarray  # earliest feasible car arrival at the exit stop
    ingress: np.ndarray
    egress: np.ndarray
    max_extra: np.ndarray
    pickup_stop: np.ndarray
    dropoff_stop: np.ndarray
    status: np.ndarray
    vehicle: np.ndarray
    pickup_time: np.ndarray
    dropoff_time: np.ndarray

    def __len__(self) -> int:
        return len(self.appear)


@dataclass
class SimulationOutput:
    """Everything one run produces; all metrics derive from these records."""

    scenario: ScenarioConfig
    horizon: float
    fleet_size: int
    events: EventLog
    requests: RequestLog
    trajectories: list[np.ndarray]
    timelines: list[tuple[np.ndarray, np.ndarray]]
    vehicle_distance_m: np.ndarray


class _Fleet:
    """Padded row-array fleet state consumed directly by the search kernel."""

    def __init__(self, positions_x, positions_y, capacity_hint=16):
        n = len(positions_x)
        self.ax = np.array(positions_x, dtype=np.float64)
        self.ay = np.array(positions_y, dtype=np.float64)
        self.at = np.zeros(n)
        self.onboard = np.zeros(n, np.int64)
        self.nlen = np.zeros(n, np.int64)
        self.hoff = np.zeros(n, np.int64)
        self.version = np.zeros(n, np.int64)
        # maintained cost of each current schedule from its anchor; used only
        # as a pruning lower bound after subtracting time already elapsed
        self.base = np.zeros(n)
        self.cap = capacity_hint
        self.sx = np.zeros((n, self.cap))
        self.sy = np.zeros((n, self.cap))
        self.st = np.zeros((n, self.cap))
        self.sd = np.zeros((n, self.cap))
        self.sr = np.zeros((n, self.cap), np.int8)
        self.sreq = np.zeros((n, self.cap), np.int64)
        self.sidx = np.zeros((n, self.cap), np.int64)

    def grow(self, need: int) -> None:
        cap = self.cap
        while cap < need:
            cap *= 2
        for name in ("sx", "sy", "st", "sd", "sr", "sreq", "sidx"):
            old = getattr(self, name)
            new = np.zeros((old.shape[0], cap), old.dtype)
            new[:, : old.shape[1]] = old
            setattr(self, name, new)
        self.cap = cap

    def advanced_positions(self, now: float, speed: float, stop_loss: float):
        """Where each vehicle would be at ``now``, interpolating the current leg."""
        px = self.ax.copy()
        py = self.ay.copy()
        busy = np.flatnonzero(self.nlen > 0)
        if busy.size == 0:
            return px, py
        h = self.hoff[busy]
        hx = self.sx[busy, h]
        hy = self.sy[busy, h]
        ddx = hx - self.ax[busy]
        ddy = hy - self.ay[busy]
        d = np.abs(ddx) + np.abs(ddy)
        with np.errstate(divide="ignore", invalid="ignore"):
            m = np.where(d > 0.0, d / speed + stop_loss, 0.0)
            frac = np.where(m > 0.0, np.clip((now - self.at[busy]) / m, 0.0, 1.0), 1.0)
        trav = frac * d
        adx = np.abs(ddx)
        gx = np.minimum(trav, adx)
        gy = np.minimum(np.maximum(trav - adx, 0.0), np.abs(ddy))
        px[busy] = self.ax[busy] + np.sign(ddx) * gx
        py[busy] = self.ay[busy] + np.sign(ddy) * gy
        return px, py

    def insert_pair(self, v: int, i0: int, j0: int, pick_vals, drop_vals) -> None:
        """Rewrite row ``v`` with the pick-up at ``i0`` and drop-off at ``j0``.

        Positions are 0-based; ``j0`` indexes the schedule after the pick-up
        insertion, so ``j0 > i0`` always.
        """
        n = int(self.nlen[v])
        h = int(self.hoff[v])
        if n + 2 > self.cap:
            self.grow(n + 2)
        old = np.arange(n)
        dst = old + (old >= i0)
        dst += dst >= j0
        arrays = (self.sx, self.sy, self.st, self.sd, self.sr, self.sreq, self.sidx)
        for arr, a_val, b_val in zip(arrays, pick_vals, drop_vals):
            buf = np.empty(n + 2, arr.dtype)
            buf[dst] = arr[v, h : h + n]
            buf[i0] = a_val
            buf[j0] = b_val
            arr[v, : n + 2] = buf
        self.hoff[v] = 0
        self.nlen[v] = n + 2
        self.version[v] += 1

    def head_completion(self, v: int, speed: float, stop_loss: float, board: float, alight: float) -> float:
        # same accumulation order as the kernels and the reference math
        h = self.hoff[v]
        d = abs(self.sx[v, h] - self.ax[v]) + abs(self.sy[v, h] - self.ay[v])
        t = self.at[v]
        if d > 0.0:
            t = t + d / speed + stop_loss
        t = t + (board if self.sr[v, h] > 0 else alight)
        return float(t)

    def schedule_of(self, v: int) -> Schedule:
        h = int(self.hoff[v])
        n = int(self.nlen[v])
        stops = tuple(
            StopPoint(
                location=int(self.sidx[v, k]),
                preferred_time=float(self.st[v, k]),
                max_extra_time=float(self.sd[v, k]),
                action=PICKUP if self.sr[v, k] > 0 else DROPOFF,
                request_id=int(self.sreq[v, k]),
            )
            for k in range(h, h + n)
        )
        return Schedule(stops)


def run_simulation(scenario: ScenarioConfig, requests=None) -> SimulationOutput:
    """Run one scenario to completion and collect its full record set.

    Bit-identical outputs for identical scenarios: the only random inputs are
    the seeded demand realization and the seeded initial vehicle placement.
    Pass ``requests`` (a time-ordered list of :class:`TripRequest`, e.g. one
    loaded from an exported demand file) to replay a fixed demand instead of
    generating it; replayed requests are taken as-is, without re-filtering.
    Requests are identified by their list position throughout the records,
    matching the sequential ids the generator and the demand file format use.
    """
    scenario.validate()
    world = scenario.world()
    lattice = scenario.lattice()
    kin = scenario.kinematics()
    speed = world.cruise_speed
    board, alight = kin.boarding_time, kin.alighting_time
    t_loss, cap = kin.stop_loss, kin.capacity
    fleet_size = scenario.fleet_size
    horizon = scenario.duration_s
    end_cap = horizon + scenario.drain_cap_s

    if requests is None:
        requests = generate_demand(scenario.demand_config(), world)
    nreq = len(requests)
    appear = np.array([r.appear_time for r in requests])
    orx = np.array([r.origin.x for r in requests])
    ory = np.array([r.origin.y for r in requests])
    dex = np.array([r.destination.x for r in requests])
    dey = np.array([r.destination.y for r in requests])
    extra = np.array([r.max_extra_time for r in requests])
    pickup_stop = (
        nearest_stop_indices(lattice, orx, ory) if nreq else np.empty(0, np.int64)
    )
    dropoff_stop = (
        nearest_stop_indices(lattice, dex, dey) if nreq else np.empty(0, np.int64)
    )
    if nreq:
        ingress = (np.abs(orx - lattice.xs[pickup_stop]) + np.abs(ory - lattice.ys[pickup_stop])) / world.walk_speed
        egress = (np.abs(lattice.xs[dropoff_stop] - dex) + np.abs(lattice.ys[dropoff_stop] - dey)) / world.walk_speed
        entry_time = appear + ingress
        drive = (
            np.abs(lattice.xs[pickup_stop] - lattice.xs[dropoff_stop])
            + np.abs(lattice.ys[pickup_stop] - lattice.ys[dropoff_stop])
        ) / world.cruise_speed
        exit_earliest = entry_time + drive
    else:
        ingress = egress = entry_time = exit_earliest = np.empty(0)

    req_log = RequestLog(
        appear=appear,
        entry_time=entry_time,
        exit_earliest=exit_earliest,
        ingress=ingress,
        egress=egress,
        max_extra=extra,
        pickup_stop=pickup_stop,
        dropoff_stop=dropoff_stop,
        status=np.full(nreq, REJECTED, np.int8),
        vehicle=np.full(nreq, -1, np.int64),
        pickup_time=np.full(nreq, np.nan),
        dropoff_time=np.full(nreq, np.nan),
    )

    placement_rng = np.random.default_rng([scenario.seed, 1])
    start_stops = placement_rng.integers(0, len(lattice), fleet_size)
    fleet = _Fleet(lattice.xs[start_stops], lattice.ys[start_stops])

    # event log columns
    ev_time: list[float] = []
    ev_kind: list[int] = []
    ev_req: list[int] = []
    ev_veh: list[int] = []
    ev_x: list[float] = []
    ev_y: list[float] = []
    ev_occ: list[int] = []

    def log(time, kind, req, veh, x, y, occ):
        ev_time.append(time)
        ev_kind.append(kind)
        ev_req.append(req)
        ev_veh.append(veh)
        ev_x.append(x)
        ev_y.append(y)
        ev_occ.append(occ)

    traj_x: list[list[float]] = [[] for _ in range(fleet_size)]
    traj_y: list[list[float]] = [[] for _ in range(fleet_size)]
    distance = np.zeros(fleet_size)
    tl_time: list[list[float]] = [[0.0] for _ in range(fleet_size)]
    tl_level: list[list[int]] = [[-1] for _ in range(fleet_size)]

    # arrival processing order: entry time, ties by request id
    order = np.lexsort((np.arange(nreq), entry_time)) if nreq else np.empty(0, np.int64)
    heap: list[tuple[float, int, int]] = []
    k = 0

    while True:
        ta = entry_time[order[k]] if k < nreq else np.inf
        while heap and (
            heap[0][2] != fleet.version[heap[0][1]] or fleet.nlen[heap[0][1]] == 0
        ):
            heapq.heappop(heap)
        ts = heap[0][0] if heap else np.inf
        if min(ta, ts) > end_cap or (ta == np.inf and ts == np.inf):
            break

        if ta <= ts:
            r = int(order[k])
            k += 1
            now = float(ta)
            axx = float(lattice.xs[pickup_stop[r]])
            ayy = float(lattice.ys[pickup_stop[r]])
            bxx = float(lattice.xs[dropoff_stop[r]])
            byy = float(lattice.ys[dropoff_stop[r]])
            log(now, ARRIVAL, r, -1, axx, ayy, -1)
            bounds = np.maximum(fleet.base - (now - fleet.at), 0.0)
            scan_order = np.argsort(bounds)
            v, i0, j0, cost, wx, wy = _kernels.best_assignment(
                fleet.ax, fleet.ay, fleet.at, fleet.onboard, fleet.nlen, fleet.hoff,
                fleet.sx, fleet.sy, fleet.st, fleet.sd, fleet.sr,
                scan_order, bounds, now,
                axx, ayy, float(entry_time[r]), float(extra[r]),
                bxx, byy, float(exit_earliest[r]), float(extra[r]),
                speed, board, alight, t_loss, cap,
            )
            if v < 0:
                log(now, REJECT, r, -1, axx, ayy, -1)
                req_log.status[r] = REJECTED
                continue
            was_idle = fleet.nlen[v] == 0 and fleet.onboard[v] == 0
            fleet.ax[v] = wx
            fleet.ay[v] = wy
            fleet.at[v] = now
            fleet.base[v] = cost
            fleet.insert_pair(
                v,
                i0,
                j0,
                (axx, ayy, float(entry_time[r]), float(extra[r]), 1, r, int(pickup_stop[r])),
                (bxx, byy, float(exit_earliest[r]), float(extra[r]), -1, r, int(dropoff_stop[r])),
            )
            if scenario.verify_assignments:
                state = VehicleState(
                    vehicle_id=v,
                    location=Point(float(wx), float(wy)),
                    clock=now,
                    onboard=int(fleet.onboard[v]),
                )
                if not is_feasible(state, fleet.schedule_of(v), kin, world, lattice):
                    raise AssertionError(
                        f"dispatch committed an infeasible schedule to vehicle {v} "
                        f"for request {r} at t={now}"
                    )
            if was_idle:
                tl_time[v].append(now)
                tl_level[v].append(0)
            req_log.status[r] = ASSIGNED
            req_log.vehicle[r] = v
            log(now, ASSIGN, r, v, axx, ayy, -1)
            heapq.heappush(
                heap,
                (fleet.head_completion(v, speed, t_loss, board, alight), v, int(fleet.version[v])),
            )
        else:
            t_hat, v, _ = heapq.heappop(heap)
            h = int(fleet.hoff[v])
            rho = int(fleet.sr[v, h])
            r = int(fleet.sreq[v, h])
            x = float(fleet.sx[v, h])
            y = float(fleet.sy[v, h])
            fleet.onboard[v] += rho
            consumed = t_hat - fleet.at[v]
            fleet.base[v] = max(fleet.base[v] - consumed, 0.0)
            fleet.ax[v] = x
            fleet.ay[v] = y
            fleet.at[v] = t_hat
            fleet.hoff[v] = h + 1
            fleet.nlen[v] -= 1
            occ_after = int(fleet.onboard[v])
            if rho > 0:
                log(t_hat, PICKUP_EV, r, v, x, y, occ_after)
                req_log.pickup_time[r] = t_hat
            else:
                log(t_hat, DROPOFF_EV, r, v, x, y, occ_after)
                req_log.dropoff_time[r] = t_hat
            if traj_x[v]:
                distance[v] += abs(x - traj_x[v][-1]) + abs(y - traj_y[v][-1])
            traj_x[v].append(x)
            traj_y[v].append(y)
            if fleet.nlen[v] == 0:
                fleet.base[v] = 0.0
                log(t_hat, PARK, -1, v, x, y, -1)
                tl_time[v].append(t_hat)
                tl_level[v].append(-1)
            else:
                tl_time[v].append(t_hat)
                tl_level[v].append(occ_after)
                heapq.heappush(
                    heap,
                    (fleet.head_completion(v, speed, t_loss, board, alight), v, int(fleet.version[v])),
                )

    # measurement-window marker, inserted in time order
    pos = bisect_right(ev_time, horizon)
    ev_time.insert(pos, horizon)
    ev_kind.insert(pos, END)
    ev_req.insert(pos, -1)
    ev_veh.insert(pos, -1)
    ev_x.insert(pos, 0.0)
    ev_y.insert(pos, 0.0)
    ev_occ.insert(pos, -1)

    events = EventLog(
        time=np.array(ev_time),
        kind=np.array(ev_kind, np.int8),
        request=np.array(ev_req, np.int64),
        vehicle=np.array(ev_veh, np.int64),
        x=np.array(ev_x),
        y=np.array(ev_y),
        occupancy=np.array(ev_occ, np.int64),
    )
    trajectories = [
        np.column_stack((np.array(traj_x[v]), np.array(traj_y[v]))) if traj_x[v] else np.empty((0, 2))
        for v in range(fleet_size)
    ]
    timelines = [
        (np.array(tl_time[v]), np.array(tl_level[v], np.int64)) for v in range(fleet_size)
    ]
    return SimulationOutput(
        scenario=scenario,
        horizon=horizon,
        fleet_size=fleet_size,
        events=events,
        requests=req_log,
        trajectories=trajectories,
        timelines=timelines,
        vehicle_distance_m=distance,
    )


def snapshot_counts(output: SimulationOutput, at: float) -> tuple[int, int, int, int]:
    """Cumulative (submitted, assigned, picked_up, dropped_off) up to ``at`` seconds."""
    if not 0 <= at:
        raise ValueError(f"snapshot instant must be non-negative, got {at}")
    ev = output.events
    within = ev.time <= at
    return (
        int(np.count_nonzero(within & (ev.kind == ARRIVAL))),
        int(np.count_nonzero(within & (ev.kind == ASSIGN))),
        int(np.count_nonzero(within & (ev.kind == PICKUP_EV))),
        int(np.count_nonzero(within & (ev.kind == DROPOFF_EV))),
    )


def export_event_log(output: SimulationOutput, path) -> None:
    """Write the event log as delimited text, one row per event."""
    ev = output.events
    with open(path, "w") as fh:
        fh.write(EVENT_LOG_HEADER + "\n")
        for i in range(len(ev)):
            fh.write(
                f"{float(ev.time[i])!r},{KIND_NAMES[ev.kind[i]]},{ev.request[i]},"
                f"{ev.vehicle[i]},{float(ev.x[i])!r},{float(ev.y[i])!r},{ev.occupancy[i]}\n"
            )


def verify_output(output: SimulationOutput) -> dict[str, int]:
    """Recheck the core guarantees against the run's own records.

    Returns violation counts (all zero for a correct run): service windows of
    every completed pick-up/drop-off, occupancy bounds, pick-up before
    drop-off, and conservation of request states.
    """
    req = output.requests
    ev = output.events
    capacity = output.scenario.capacity
    violations = {
        "pickup_window": 0,
        "dropoff_window": 0,
        "occupancy_bounds": 0,
        "ordering": 0,
        "conservation": 0,
    }
    served = ~np.isnan(req.pickup_time)
    early = req.pickup_time[served] < req.entry_time[served]
    late = req.pickup_time[served] >= req.entry_time[served] + req.max_extra[served]
    violations["pickup_window"] = int(np.count_nonzero(early | late))
    dropped = ~np.isnan(req.dropoff_time)
    early = req.dropoff_time[dropped] < req.exit_earliest[dropped]
    late = req.dropoff_time[dropped] >= req.exit_earliest[dropped] + req.max_extra[dropped]
    violations["dropoff_window"] = int(np.count_nonzero(early | late))
    serve_rows = (ev.kind == PICKUP_EV) | (ev.kind == DROPOFF_EV)
    occ = ev.occupancy[serve_rows]
    violations["occupancy_bounds"] = int(np.count_nonzero((occ < 0) | (occ >= capacity)))
    both = served & dropped
    violations["ordering"] = int(np.count_nonzero(req.pickup_time[both] > req.dropoff_time[both]))
    assigned = req.status == ASSIGNED
    violations["conservation"] = int(np.count_nonzero(dropped & ~assigned))
    return violations
