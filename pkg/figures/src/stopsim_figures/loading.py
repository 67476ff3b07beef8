"""Readers for the simulator's exported text files.

The figure package deliberately has no dependency on the simulator: these
readers parse the documented metrics and event-log schemas and validate them
column by column, so either side can be rebuilt independently.
"""

from __future__ import annotations

import re
from pathlib import Path

import pandas as pd

METRICS_COLUMNS = [
    "spacing_m",
    "fleet",
    "rate",
    "submitted",
    "assigned_3h",
    "picked_3h",
    "dropped_3h",
    "rejected",
    "km_per_vehicle",
    "tortuosity",
    "ingress_s",
    "wait_s",
    "onboard_s",
    "egress_s",
    "total_s",
    "idle_frac",
]

EVENT_COLUMNS = [
    "time_s",
    "kind",
    "request_id",
    "vehicle_id",
    "stop_x_m",
    "stop_y_m",
    "occupancy_after",
]

CELL_FILENAME = re.compile(
    r"spacing(?P<spacing>[0-9.]+)_fleet(?P<fleet>\d+)_rate(?P<rate>[0-9.]+)_seed(?P<seed>\d+)\.csv$"
)


class SchemaError(ValueError):
    """An input file does not match the documented schema."""


def _check_columns(frame: pd.DataFrame, expected: list[str], path) -> None:
    missing = [c for c in expected if c not in frame.columns]
    unexpected = [c for c in frame.columns if c not in expected]
    if missing or unexpected:
        parts = []
        if missing:
            parts.append(f"missing columns {missing}")
        if unexpected:
            parts.append(f"unexpected columns {unexpected}")
        raise SchemaError(f"{path}: {'; '.join(parts)}")


def load_metrics(path) -> pd.DataFrame:
    """Read a metrics file; one row per sweep cell and seed."""
    frame = pd.read_csv(path)
    _check_columns(frame, METRICS_COLUMNS, path)
    return frame


def load_events(path) -> pd.DataFrame:
    """Read one event log."""
    frame = pd.read_csv(path)
    _check_columns(frame, EVENT_COLUMNS, path)
    return frame


def list_event_logs(events_dir) -> pd.DataFrame:
    """Index the event logs of a sweep by their cell coordinates.

    Returns a frame with spacing/fleet/rate/seed/path columns, one row per
    recognized log file; unrecognized file names are ignored.
    """
    records = []
    events_dir = Path(events_dir)
    if events_dir.is_dir():
        for path in sorted(events_dir.iterdir()):
            match = CELL_FILENAME.search(path.name)
            if match:
                records.append(
                    {
                        "spacing_m": float(match["spacing"]),
                        "fleet": int(match["fleet"]),
                        "rate": float(match["rate"]),
                        "seed": int(match["seed"]),
                        "path": path,
                    }
                )
    return pd.DataFrame(records, columns=["spacing_m", "fleet", "rate", "seed", "path"])


def occupancy_time_shares(events: pd.DataFrame, fleet: int) -> pd.Series:
    """Fleet-mean fraction of the demand window spent at each occupancy level.

    Level -1 is idle (nothing scheduled), 0 is moving or dwelling empty.
    Vehicles that never appear in the log were idle throughout.  The window
    is ``[0, t_end]`` where ``t_end`` is the log's ``end`` marker.
    """
    end_rows = events.loc[events["kind"] == "end", "time_s"]
    if end_rows.empty:
        raise SchemaError("event log has no 'end' marker row")
    horizon = float(end_rows.iloc[0])
    if horizon <= 0:
        raise SchemaError(f"event log 'end' marker at non-positive time {horizon}")

    level_changes = events[events["kind"].isin(["assign", "pickup", "dropoff", "park"])]
    totals: dict[int, float] = {-1: 0.0}
    seen = 0
    for _, rows in level_changes.groupby("vehicle_id", sort=False):
        seen += 1
        t_prev = 0.0
        level = -1
        for kind, t, occ in zip(rows["kind"], rows["time_s"], rows["occupancy_after"]):
            t = min(float(t), horizon)
            if t > t_prev:
                totals[level] = totals.get(level, 0.0) + (t - t_prev)
                t_prev = t
            if kind == "assign":
                if level == -1:
                    level = 0
            elif kind == "park":
                level = -1
            else:
                level = int(occ)
        if horizon > t_prev:
            totals[level] = totals.get(level, 0.0) + (horizon - t_prev)
    totals[-1] += (fleet - seen) * horizon

    levels = range(-1, max(totals) + 1 if totals else 0)
    shares = pd.Series(
        {lvl: totals.get(lvl, 0.0) / (fleet * horizon) for lvl in levels}, name="share"
    )
    shares.index.name = "occupancy"
    return shares
