"""Offline figure generation for dsomrl experiment CSVs."""

from .io import SchemaError
from .plots import CurveSpec, plot_curves, plot_heatmaps, plot_units_sweep

__all__ = ["SchemaError", "CurveSpec", "plot_curves", "plot_heatmaps",
           "plot_units_sweep"]
