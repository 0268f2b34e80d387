"""Drive the Monte Carlo harness from Python (the CLI wraps the same calls)
and read back the aggregate CSV it writes.

Run:  python demos/05_experiment_presets.py
"""

import csv
import tempfile
from pathlib import Path

from arfade import preset_config, run_experiment

# A scaled-down figure-1 run: coefficient NMSE vs the array/window size.
out = Path(tempfile.mkdtemp()) / "fig1_demo.csv"
config = preset_config("fig1", trials=50, master_seed=42, output_path=str(out))
trial_path, agg_path = run_experiment(config)

print("\naggregate rows (headline metric only):")
with open(agg_path) as fh:
    for row in csv.DictReader(fh):
        if row["metric"] == "coeff_nmse":
            print(
                f"N={row['n_rx']:>4} {row['variant']:<18}"
                f" median={float(row['median']):.4g} failed={row['n_failed']}"
            )

print(f"\ntrial-level rows: {trial_path}")
print(f"aggregates:       {agg_path}")
print("full runs:  arfade experiment --preset fig1|fig2|fig3|fig4 --seed 42")
