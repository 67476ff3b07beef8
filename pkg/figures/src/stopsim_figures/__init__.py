"""Figure rendering for stopsim sweep outputs.

Consumes only the exported text files (metrics rows and event logs), never
the simulator itself, so either package can be rebuilt independently.
"""

from stopsim_figures.cli import render_figures
from stopsim_figures.figures import FIGURE_IDS, FIGURES, FigureSpec
from stopsim_figures.loading import (
    SchemaError,
    list_event_logs,
    load_events,
    load_metrics,
    occupancy_time_shares,
)

__all__ = [
    "FIGURES",
    "FIGURE_IDS",
    "FigureSpec",
    "SchemaError",
    "render_figures",
    "list_event_logs",
    "load_events",
    "load_metrics",
    "occupancy_time_shares",
]

__version__ = "0.1.0"
