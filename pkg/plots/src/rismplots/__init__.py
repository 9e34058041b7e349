"""Chart generation for simulator sweep results.

Consumes only the sweep CSV produced by the simulator CLI; no simulator
internals are imported.
"""

from .aggregate import AggregatedSeries, PlotDataError, aggregate, read_rows

__all__ = ["AggregatedSeries", "PlotDataError", "aggregate", "read_rows"]

__version__ = "0.1.0"
