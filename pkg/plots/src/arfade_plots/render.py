"""Render NMSE figures from arfade aggregate CSVs.

The renderer is a pure view of the CSV: it selects rows, converts NMSE
medians to dB at plot time, and draws one curve per value of the grouping
column with legend labels taken verbatim from it.  No re-averaging happens
here.
"""

from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

AGGREGATE_COLUMNS = [
    "experiment", "n_rx", "horizon", "snr_db", "variant", "metric",
    "mean", "median", "q10", "q90", "n_trials", "n_failed",
]

_INSTANT_METRIC = re.compile(r"^nmse_t(\d+)$")


class RenderError(Exception):
    """Base class; exit_code distinguishes the failure families."""

    exit_code = 1


class SchemaError(RenderError):
    exit_code = 1


class MissingInputError(RenderError):
    exit_code = 2


class EmptySelectionError(RenderError):
    exit_code = 3


@dataclass(frozen=True)
class FigureSpec:
    """What to draw: which rows of which CSV, against which x-axis."""

    csv_path: str
    metric: str              # exact metric name, or "nmse_t*" for per-instant rows
    x_column: str            # aggregate column holding x values, or "t"
    x_label: str
    output_path: str
    group_column: str = "variant"
    log_x: bool = False
    title: str = ""


PRESETS = {
    "fig1": FigureSpec(
        csv_path="", metric="coeff_nmse", x_column="n_rx",
        x_label="T = N_r", output_path="", log_x=True,
        title="AR coefficient estimation NMSE vs array size",
    ),
    "fig2": FigureSpec(
        csv_path="", metric="nmse_t*", x_column="t",
        x_label="time instant t", output_path="",
        title="Instantaneous tracking NMSE",
    ),
    "fig3": FigureSpec(
        csv_path="", metric="track_nmse", x_column="snr_db",
        x_label="SNR (dB)", output_path="",
        title="Tracking NMSE vs SNR",
    ),
    "fig4": FigureSpec(
        csv_path="", metric="track_nmse", x_column="n_rx",
        x_label="T = N_r", output_path="", log_x=True,
        title="Tracking NMSE vs array size",
    ),
}


def preset_spec(name: str, csv_path: str, output_path: str) -> FigureSpec:
    if name not in PRESETS:
        raise SchemaError(f"unknown preset {name!r} (expected one of {sorted(PRESETS)})")
    base = PRESETS[name]
    return FigureSpec(
        csv_path=csv_path, metric=base.metric, x_column=base.x_column,
        x_label=base.x_label, output_path=output_path,
        group_column=base.group_column, log_x=base.log_x, title=base.title,
    )


def read_aggregate(csv_path) -> list[dict]:
    path = Path(csv_path)
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise SchemaError(f"{path}: empty file, expected the aggregate header") from None
            if header != AGGREGATE_COLUMNS:
                raise SchemaError(
                    f"{path}: header does not match the aggregate schema "
                    f"(got {header}, want {AGGREGATE_COLUMNS})"
                )
            return [dict(zip(AGGREGATE_COLUMNS, row)) for row in reader]
    except OSError as exc:
        raise MissingInputError(f"cannot read {path}: {exc}") from exc


def select_curves(rows: list[dict], spec: FigureSpec) -> dict[str, list[tuple[float, float]]]:
    """Group (x, median) points per curve label, in CSV order."""
    curves: dict[str, list[tuple[float, float]]] = {}
    for row in rows:
        metric = row["metric"]
        if spec.metric == "nmse_t*":
            match = _INSTANT_METRIC.match(metric)
            if not match:
                continue
            x = float(match.group(1))
        else:
            if metric != spec.metric:
                continue
            x = float(row[spec.x_column])
        median = float(row["median"])
        if not math.isfinite(median) or median <= 0.0:
            continue  # all-failed or degenerate cell: nothing to draw
        curves.setdefault(row[spec.group_column], []).append((x, median))
    if not any(curves.values()):
        raise EmptySelectionError(
            f"no rows with metric {spec.metric!r} and finite medians in {spec.csv_path}"
        )
    return curves


def render(spec: FigureSpec) -> Path:
    """Draw the figure and write it; deterministic for identical CSV input."""
    rows = read_aggregate(spec.csv_path)
    curves = select_curves(rows, spec)

    fig, ax = plt.subplots(figsize=(7.0, 4.6), dpi=130)
    for label, points in curves.items():
        points = sorted(points)
        xs = [p[0] for p in points]
        ys = [10.0 * math.log10(p[1]) for p in points]
        ax.plot(xs, ys, marker="o", linewidth=1.4, markersize=4, label=label)
    if spec.log_x:
        ax.set_xscale("log", base=2)
        ax.xaxis.set_major_formatter(matplotlib.ticker.ScalarFormatter())
    ax.set_xlabel(spec.x_label)
    ax.set_ylabel("NMSE (dB)")
    if spec.title:
        ax.set_title(spec.title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()

    out = Path(spec.output_path)
    try:
        if out.parent and not out.parent.exists():
            out.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(out, metadata={"Software": "arfade-plots"})
    except OSError as exc:
        raise MissingInputError(f"cannot write {out}: {exc}") from exc
    finally:
        plt.close(fig)
    return out
