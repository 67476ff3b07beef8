"""The figure set: system load, distance, tortuosity, sharing and rider times.

Each builder consumes the loaded metrics frame (and, for the event-level
figures, the event-log index) and draws one figure.  Cells with several seeds
are drawn as the seed mean with a min-max band.  Rendering is read-only over
its inputs and deterministic for fixed inputs and library versions.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

from stopsim_figures.loading import load_events, occupancy_time_shares

GROUP_KEYS = ["spacing_m", "fleet", "rate"]


@dataclass(frozen=True)
class FigureSpec:
    figure_id: str
    title: str
    needs_events: bool
    build: Callable


def _placeholder(ax, message: str) -> None:
    warnings.warn(message, stacklevel=3)
    ax.text(0.5, 0.5, message, ha="center", va="center", transform=ax.transAxes)
    ax.set_xticks([])
    ax.set_yticks([])


def _band(ax, grouped: pd.DataFrame, label: str) -> None:
    x = grouped["spacing_m"].to_numpy()
    (line,) = ax.plot(x, grouped["mean"].to_numpy(), marker="o", label=label)
    ax.fill_between(
        x,
        grouped["min"].to_numpy(),
        grouped["max"].to_numpy(),
        alpha=0.2,
        color=line.get_color(),
    )


def _by_spacing(metrics: pd.DataFrame, value: str) -> pd.DataFrame:
    """Seed aggregation of one value per spacing: mean with a min-max band."""
    return (
        metrics.groupby("spacing_m")[value]
        .agg(["mean", "min", "max"])
        .reset_index()
        .sort_values("spacing_m")
    )


def _spacing_panels(metrics: pd.DataFrame, value: str, ylabel: str, title: str):
    """One panel per (fleet, rate) pair, value vs stop spacing."""
    pairs = sorted(set(zip(metrics["fleet"], metrics["rate"])))
    fig, axes = plt.subplots(
        1, max(len(pairs), 1), figsize=(4.2 * max(len(pairs), 1), 3.4), squeeze=False
    )
    if not pairs:
        _placeholder(axes[0][0], f"no rows for {title}")
        fig.suptitle(title)
        return fig
    for ax, (fleet, rate) in zip(axes[0], pairs):
        cell = metrics[(metrics["fleet"] == fleet) & (metrics["rate"] == rate)]
        grouped = _by_spacing(cell, value)
        _band(ax, grouped, f"{fleet} vehicles")
        ax.set_xlabel("stop spacing [m]")
        ax.set_ylabel(ylabel)
        ax.set_title(f"{rate:g} req/h/km$^2$, fleet {fleet}")
        ax.grid(alpha=0.3)
    fig.suptitle(title)
    fig.tight_layout()
    return fig


def build_load_over_time(metrics: pd.DataFrame, event_index: pd.DataFrame):
    """Cumulative submitted/assigned/picked/dropped curves per event log cell."""
    fig_cols = max(len(event_index), 1)
    fig, axes = plt.subplots(1, fig_cols, figsize=(4.2 * fig_cols, 3.4), squeeze=False)
    if event_index.empty:
        _placeholder(axes[0][0], "no event logs found: run the sweep with --emit-events")
        fig.suptitle("System load over time")
        return fig
    curve_kinds = [("arrival", "submitted"), ("assign", "assigned"), ("pickup", "picked up"), ("dropoff", "dropped off")]
    for ax, (_, cell) in zip(axes[0], event_index.iterrows()):
        events = load_events(cell["path"])
        for kind, label in curve_kinds:
            times = np.sort(events.loc[events["kind"] == kind, "time_s"].to_numpy())
            ax.step(
                np.append(times, events["time_s"].max()) / 3600.0,
                np.append(np.arange(1, len(times) + 1), len(times)),
                where="post",
                label=label,
            )
        ax.set_xlabel("time [h]")
        ax.set_ylabel("requests")
        ax.set_title(f"{cell['spacing_m']:g} m stops, seed {cell['seed']}")
        ax.grid(alpha=0.3)
        ax.legend(fontsize=7)
    fig.suptitle("System load over time")
    fig.tight_layout()
    return fig


def build_load_at_snapshot(metrics: pd.DataFrame, event_index):
    """Assigned/picked/dropped counts at the 3 h snapshot vs stop spacing."""
    pairs = sorted(set(zip(metrics["fleet"], metrics["rate"])))
    fig, axes = plt.subplots(
        1, max(len(pairs), 1), figsize=(4.2 * max(len(pairs), 1), 3.4), squeeze=False
    )
    if not pairs:
        _placeholder(axes[0][0], "metrics file has no rows")
        fig.suptitle("Load at the 3 h snapshot")
        return fig
    for ax, (fleet, rate) in zip(axes[0], pairs):
        cell = metrics[(metrics["fleet"] == fleet) & (metrics["rate"] == rate)]
        for value, label in (
            ("submitted", "submitted (total)"),
            ("assigned_3h", "assigned"),
            ("picked_3h", "picked up"),
            ("dropped_3h", "dropped off"),
        ):
            grouped = _by_spacing(cell, value)
            _band(ax, grouped, label)
        ax.set_xlabel("stop spacing [m]")
        ax.set_ylabel("requests")
        ax.set_title(f"{rate:g} req/h/km$^2$, fleet {fleet}")
        ax.grid(alpha=0.3)
        ax.legend(fontsize=7)
    fig.suptitle("Load at the 3 h snapshot")
    fig.tight_layout()
    return fig


def build_km_per_vehicle(metrics: pd.DataFrame, event_index):
    return _spacing_panels(
        metrics, "km_per_vehicle", "km per vehicle", "Mean distance traveled per vehicle"
    )


def build_tortuosity(metrics: pd.DataFrame, event_index):
    return _spacing_panels(metrics, "tortuosity", "tortuosity", "Mean route tortuosity")


def build_sharing_histogram(metrics: pd.DataFrame, event_index: pd.DataFrame):
    """Time share per occupancy level; -1 denotes an idle vehicle."""
    fig, ax = plt.subplots(figsize=(6.5, 3.6))
    if event_index.empty:
        _placeholder(ax, "no event logs found: run the sweep with --emit-events")
        fig.suptitle("Vehicle occupancy shares")
        return fig
    width = 0.8 / len(event_index)
    for k, (_, cell) in enumerate(event_index.iterrows()):
        events = load_events(cell["path"])
        row = metrics[
            (metrics["spacing_m"] == cell["spacing_m"])
            & (metrics["fleet"] == cell["fleet"])
            & (metrics["rate"] == cell["rate"])
        ]
        fleet = int(row["fleet"].iloc[0]) if len(row) else int(events["vehicle_id"].max()) + 1
        shares = occupancy_time_shares(events, fleet)
        ax.bar(
            shares.index.to_numpy() + (k - (len(event_index) - 1) / 2) * width,
            shares.to_numpy() * 100.0,
            width=width,
            label=f"{cell['spacing_m']:g} m stops",
        )
    ax.set_xlabel("passengers on board (-1 = idle)")
    ax.set_ylabel("% of vehicle time")
    ax.grid(alpha=0.3, axis="y")
    ax.legend(fontsize=8)
    fig.suptitle("Vehicle occupancy shares")
    fig.tight_layout()
    return fig


def build_qos_times(metrics: pd.DataFrame, event_index):
    """Waiting and onboard means vs stop spacing."""
    fig, axes = plt.subplots(1, 2, figsize=(8.4, 3.4))
    if metrics.empty:
        _placeholder(axes[0], "metrics file has no rows")
        _placeholder(axes[1], "metrics file has no rows")
        fig.suptitle("Rider waiting and onboard times")
        return fig
    for ax, value, label in ((axes[0], "wait_s", "waiting"), (axes[1], "onboard_s", "onboard")):
        for (fleet, rate), cell in metrics.groupby(["fleet", "rate"]):
            grouped = _by_spacing(cell, value)
            _band(ax, grouped, f"fleet {fleet}, {rate:g} req/h/km$^2$")
        ax.set_xlabel("stop spacing [m]")
        ax.set_ylabel(f"{label} time [s]")
        ax.grid(alpha=0.3)
        ax.legend(fontsize=7)
    fig.suptitle("Rider waiting and onboard times")
    fig.tight_layout()
    return fig


def build_total_travel_time(metrics: pd.DataFrame, event_index):
    """Door-to-door total (walks + wait + ride) vs stop spacing."""
    fig, ax = plt.subplots(figsize=(6.5, 3.6))
    if metrics.empty:
        _placeholder(ax, "metrics file has no rows")
        fig.suptitle("Total travel time")
        return fig
    for (fleet, rate), cell in metrics.groupby(["fleet", "rate"]):
        grouped = _by_spacing(cell, "total_s")
        _band(ax, grouped, f"fleet {fleet}, {rate:g} req/h/km$^2$")
    ax.set_xlabel("stop spacing [m]")
    ax.set_ylabel("total travel time [s]")
    ax.grid(alpha=0.3)
    ax.legend(fontsize=7)
    fig.suptitle("Total travel time")
    fig.tight_layout()
    return fig


FIGURES = [
    FigureSpec("load_over_time", "System load over time", True, build_load_over_time),
    FigureSpec("load_at_3h", "Load at the 3 h snapshot", False, build_load_at_snapshot),
    FigureSpec("km_per_vehicle", "Mean distance per vehicle", False, build_km_per_vehicle),
    FigureSpec("tortuosity", "Mean route tortuosity", False, build_tortuosity),
    FigureSpec("sharing", "Vehicle occupancy shares", True, build_sharing_histogram),
    FigureSpec("qos_times", "Waiting and onboard times", False, build_qos_times),
    FigureSpec("total_travel_time", "Total travel time", False, build_total_travel_time),
]
FIGURE_IDS = [spec.figure_id for spec in FIGURES]
