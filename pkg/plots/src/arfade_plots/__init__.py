"""Figure rendering for arfade aggregate CSVs."""

from .render import (
    AGGREGATE_COLUMNS,
    EmptySelectionError,
    FigureSpec,
    MissingInputError,
    PRESETS,
    RenderError,
    SchemaError,
    preset_spec,
    read_aggregate,
    render,
    select_curves,
)

__all__ = [
    "AGGREGATE_COLUMNS", "EmptySelectionError", "FigureSpec",
    "MissingInputError", "PRESETS", "RenderError", "SchemaError",
    "preset_spec", "read_aggregate", "render", "select_curves",
]
