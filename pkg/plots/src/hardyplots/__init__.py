"""Figure rendering for hardylab CSV outputs."""

from .render import KINDS, PlotJob, SchemaError, render

__all__ = ["KINDS", "PlotJob", "SchemaError", "render"]
