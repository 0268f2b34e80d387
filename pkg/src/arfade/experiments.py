"""Monte Carlo experiment runner: paired-trial evaluation of the coefficient
estimators and the tracking variants over (N_r, T, SNR) grids, with CSV output.

SNR convention
--------------
SNR is average channel power over observation-noise power,

    snr = sigma_x^2 * r(0) / sigma_w^2,

with r(0) the normalized lag-0 autocovariance of the configured model, so the
configured SNR fixes sigma_w^2 and 0 dB makes the raw-observation NMSE ~ 1.
All presets keep sigma_x^2 = 1; only the ratio matters.

Seeding
-------
Each (grid point, trial) gets a child seed stream derived from
(master_seed, grid_index, trial_index), so records do not depend on execution
order or thread count, and every variant inside a trial sees the identical
channel, noise, and pilot realization (paired comparison).

CSV schemas
-----------
trial level:  experiment,n_rx,horizon,snr_db,trial,variant,metric,value,failed
aggregate:    experiment,n_rx,horizon,snr_db,variant,metric,mean,median,q10,q90,n_trials,n_failed

Numbers carry 9 significant digits.  Estimator/tracking failures are data:
they appear as failed=1 rows with value nan on the headline metric
("coeff_nmse" or "track_nmse") and are excluded from the aggregate
statistics, which count them in n_failed instead.

Per-instant tracking NMSE (the instantaneous experiment) is encoded in the
metric name as nmse_t000, nmse_t001, ...; the schema has no time column.

Channel realizations can be dumped for debugging via
:func:`arfade.simulate.channel_to_csv`: one row per antenna, columns
re0,im0,re1,im1,... interleaved.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .acov import BIASED, UNBIASED
from .arest import IllConditionedError, estimate_ar, estimate_ar_time_based
from .metrics import nmse_channel, nmse_coeffs
from .model import ARParams, NonStationaryError, theoretical_acov
from .simulate import PilotSequence, derotate, generate_channel, observe, received_signal
from .tracking import TrackingError, track_channel, track_channel_reestimated

GENIE = "genie"
PROPOSED_BIASED = "proposed-biased"
PROPOSED_UNBIASED = "proposed-unbiased"
TIME_BASED = "time-based"

COEFF_VARIANTS = (PROPOSED_BIASED, PROPOSED_UNBIASED, TIME_BASED)
TRACK_VARIANTS = (GENIE, PROPOSED_BIASED, PROPOSED_UNBIASED, TIME_BASED)

KIND_COEFF = "coeff"
KIND_TRACK = "track"
PROTOCOL_REESTIMATED = "reestimated"
PROTOCOL_ONESHOT = "oneshot"

TRIAL_HEADER = "experiment,n_rx,horizon,snr_db,trial,variant,metric,value,failed"
AGG_HEADER = "experiment,n_rx,horizon,snr_db,variant,metric,mean,median,q10,q90,n_trials,n_failed"

JAKES_AR2 = (1.8, -0.9)


class ConfigError(ValueError):
    """Invalid experiment configuration (bad key, value, or combination)."""


class GridPoint(NamedTuple):
    n_rx: int
    horizon: int
    snr_db: float


class TrialRecord(NamedTuple):
    experiment: str
    n_rx: int
    horizon: int
    snr_db: float
    trial: int
    variant: str
    metric: str
    value: float
    failed: int


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    kind: str
    ar: ARParams
    grid: tuple[GridPoint, ...]
    trials: int
    master_seed: int
    variants: tuple[str, ...]
    output_path: str
    protocol: str = PROTOCOL_REESTIMATED
    per_instant: bool = False
    threads: int = 1

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not self.grid:
            raise ConfigError("grid must be non-empty")
        if self.kind not in (KIND_COEFF, KIND_TRACK):
            raise ConfigError(f"unknown experiment kind {self.kind!r}")
        if self.protocol not in (PROTOCOL_REESTIMATED, PROTOCOL_ONESHOT):
            raise ConfigError(f"unknown tracking protocol {self.protocol!r}")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        allowed = COEFF_VARIANTS if self.kind == KIND_COEFF else TRACK_VARIANTS
        for v in self.variants:
            if v not in allowed:
                raise ConfigError(f"variant {v!r} not valid for a {self.kind} experiment")
        if not self.variants:
            raise ConfigError("variants must be non-empty")


def noise_variance_for_snr(ar: ARParams, snr_db: float) -> float:
    """sigma_w^2 realizing the configured channel-power SNR."""
    r0 = theoretical_acov(ar, 0)[0]
    return ar.innovation_variance * r0 / (10.0 ** (snr_db / 10.0))


def preset_config(
    name: str,
    trials: int | None = None,
    master_seed: int = 42,
    output_path: str | None = None,
    threads: int = 1,
) -> ExperimentConfig:
    """The four shipped experiments on the AR(2) model (1.8, -0.9).

    fig1: coefficient NMSE vs T = N_r at 0 dB;
    fig2: instantaneous tracking NMSE at T = N_r = 64, 0 dB (growing window);
    fig3: tracking NMSE vs SNR at T = N_r = 64 (growing window);
    fig4: tracking NMSE vs T = N_r at -5 dB (coefficients from all T columns).

    The T = N_r tick values {16, 32, 64, 128} and the SNR ticks
    {-10, -5, 0, 5, 10} dB bracket the stated operating points and are
    artifact choices.
    """
    ar = ARParams(np.array(JAKES_AR2))
    sizes = (16, 32, 64, 128)
    if name == "fig1":
        cfg = ExperimentConfig(
            experiment="fig1",
            kind=KIND_COEFF,
            ar=ar,
            grid=tuple(GridPoint(n, n, 0.0) for n in sizes),
            trials=500,
            master_seed=master_seed,
            variants=COEFF_VARIANTS,
            output_path="fig1.csv",
        )
    elif name == "fig2":
        cfg = ExperimentConfig(
            experiment="fig2",
            kind=KIND_TRACK,
            ar=ar,
            grid=(GridPoint(64, 64, 0.0),),
            trials=200,
            master_seed=master_seed,
            variants=TRACK_VARIANTS,
            output_path="fig2.csv",
            protocol=PROTOCOL_REESTIMATED,
            per_instant=True,
        )
    elif name == "fig3":
        cfg = ExperimentConfig(
            experiment="fig3",
            kind=KIND_TRACK,
            ar=ar,
            grid=tuple(GridPoint(64, 64, s) for s in (-10.0, -5.0, 0.0, 5.0, 10.0)),
            trials=200,
            master_seed=master_seed,
            variants=TRACK_VARIANTS,
            output_path="fig3.csv",
            protocol=PROTOCOL_REESTIMATED,
        )
    elif name == "fig4":
        cfg = ExperimentConfig(
            experiment="fig4",
            kind=KIND_TRACK,
            ar=ar,
            grid=tuple(GridPoint(n, n, -5.0) for n in sizes),
            trials=200,
            master_seed=master_seed,
            variants=TRACK_VARIANTS,
            output_path="fig4.csv",
            protocol=PROTOCOL_ONESHOT,
        )
    else:
        raise ConfigError(f"unknown preset {name!r}")
    updates = {}
    if trials is not None:
        updates["trials"] = trials
    if output_path is not None:
        updates["output_path"] = output_path
    if threads != 1:
        updates["threads"] = threads
    if master_seed != cfg.master_seed:
        updates["master_seed"] = master_seed
    return replace(cfg, **updates) if updates else cfg


# ----------------------------------------------------------------------------
# config files: flat "key = value" documents, unknown keys are errors
# ----------------------------------------------------------------------------

_CONFIG_KEYS = {
    "experiment", "kind", "protocol", "ar_coeffs", "innovation_variance",
    "grid", "trials", "seed", "variants", "out", "threads", "per_instant",
}


def _parse_grid(text: str) -> tuple[GridPoint, ...]:
    points = []
    for chunk in text.split(","):
        parts = chunk.strip().split(":")
        if len(parts) != 3:
            raise ConfigError(f"grid entry {chunk.strip()!r} is not n_rx:horizon:snr_db")
        try:
            points.append(GridPoint(int(parts[0]), int(parts[1]), float(parts[2])))
        except ValueError as exc:
            raise ConfigError(f"bad grid entry {chunk.strip()!r}: {exc}") from exc
    return tuple(points)


def load_config(path) -> ExperimentConfig:
    """Parse a key-value experiment config file (see README for the schema)."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    pairs: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        if key in pairs:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        pairs[key] = value

    experiment = pairs.pop("experiment", "custom")
    try:
        if experiment in ("fig1", "fig2", "fig3", "fig4"):
            cfg = preset_config(experiment)
        else:
            if experiment != "custom":
                raise ConfigError(f"experiment must be fig1..fig4 or custom, got {experiment!r}")
            if "grid" not in pairs or "kind" not in pairs:
                raise ConfigError("custom experiments need at least 'kind' and 'grid'")
            coeffs = [float(c) for c in pairs.pop("ar_coeffs", "1.8,-0.9").split(",")]
            kind = pairs.pop("kind")
            default_variants = COEFF_VARIANTS if kind == KIND_COEFF else TRACK_VARIANTS
            cfg = ExperimentConfig(
                experiment="custom",
                kind=kind,
                ar=ARParams(coeffs, float(pairs.pop("innovation_variance", "1.0"))),
                grid=_parse_grid(pairs.pop("grid")),
                trials=int(pairs.pop("trials", "100")),
                master_seed=int(pairs.pop("seed", "42")),
                variants=tuple(v.strip() for v in pairs.pop("variants").split(","))
                if "variants" in pairs
                else default_variants,
                output_path=pairs.pop("out", "custom.csv"),
                protocol=pairs.pop("protocol", PROTOCOL_REESTIMATED),
                per_instant=pairs.pop("per_instant", "false").lower() in ("1", "true", "yes"),
                threads=int(pairs.pop("threads", "1")),
            )
            if pairs:
                raise ConfigError(f"keys {sorted(pairs)} not applicable to a custom experiment")
            return cfg
        # preset with overrides
        updates = {}
        if "kind" in pairs or "ar_coeffs" in pairs or "innovation_variance" in pairs:
            raise ConfigError("presets fix the model and kind; use experiment = custom")
        if "grid" in pairs:
            updates["grid"] = _parse_grid(pairs.pop("grid"))
        if "trials" in pairs:
            updates["trials"] = int(pairs.pop("trials"))
        if "seed" in pairs:
            updates["master_seed"] = int(pairs.pop("seed"))
        if "variants" in pairs:
            updates["variants"] = tuple(v.strip() for v in pairs.pop("variants").split(","))
        if "out" in pairs:
            updates["output_path"] = pairs.pop("out")
        if "protocol" in pairs:
            updates["protocol"] = pairs.pop("protocol")
        if "per_instant" in pairs:
            updates["per_instant"] = pairs.pop("per_instant").lower() in ("1", "true", "yes")
        if "threads" in pairs:
            updates["threads"] = int(pairs.pop("threads"))
        if pairs:
            raise ConfigError(f"unused keys {sorted(pairs)}")
        return replace(cfg, **updates) if updates else cfg
    except (ValueError, NonStationaryError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc


# ----------------------------------------------------------------------------
# trial execution
# ----------------------------------------------------------------------------


def _trial_seeds(master_seed: int, grid_index: int, trial_index: int) -> tuple[int, int, int]:
    ss = np.random.SeedSequence([master_seed, grid_index, trial_index])
    channel_seed, noise_seed, pilot_seed = ss.generate_state(3, np.uint64)
    return int(channel_seed), int(noise_seed), int(pilot_seed)


def run_trial(config: ExperimentConfig, grid_index: int, trial_index: int) -> list[TrialRecord]:
    """Evaluate every configured variant on one shared realization.

    Never raises on estimator failure; failed variants yield a failed=1
    record on the headline metric.
    """
    point = config.grid[grid_index]
    channel_seed, noise_seed, pilot_seed = _trial_seeds(config.master_seed, grid_index, trial_index)
    sw2 = noise_variance_for_snr(config.ar, point.snr_db)
    sx2 = config.ar.innovation_variance
    order = config.ar.order
    channel = generate_channel(config.ar, point.n_rx, point.horizon, channel_seed)

    def rec(variant: str, metric: str, value: float, failed: int = 0) -> TrialRecord:
        return TrialRecord(
            config.experiment, point.n_rx, point.horizon, point.snr_db,
            trial_index, variant, metric, value, failed,
        )

    records: list[TrialRecord] = []
    if config.kind == KIND_COEFF:
        obs = observe(channel, sw2, noise_seed)
        for variant in config.variants:
            try:
                if variant == PROPOSED_BIASED:
                    est = estimate_ar(obs, order, BIASED, sx2, sw2)
                elif variant == PROPOSED_UNBIASED:
                    est = estimate_ar(obs, order, UNBIASED, sx2, sw2)
                else:
                    est = estimate_ar_time_based(obs, order, UNBIASED, sx2, sw2)
            except IllConditionedError:
                records.append(rec(variant, "coeff_nmse", math.nan, failed=1))
                continue
            per_coeff, aggregate = nmse_coeffs(est, config.ar)
            records.append(rec(variant, "coeff_nmse", aggregate))
            for i, v in enumerate(per_coeff, start=1):
                records.append(rec(variant, f"coeff_nmse_a{i}", float(v)))
            records.append(rec(variant, "imag_norm", est.imag_norm))
        return records

    pilots = PilotSequence.qpsk(point.horizon, pilot_seed)
    y = received_signal(channel, pilots, sw2, noise_seed)
    for variant in config.variants:
        try:
            if variant == GENIE:
                result = track_channel(y, pilots, config.ar, sx2, sw2, truth=channel, coeff_source=GENIE)
            elif config.protocol == PROTOCOL_ONESHOT:
                window = derotate(y, pilots, sw2)
                if variant == TIME_BASED:
                    est = estimate_ar_time_based(window, order, UNBIASED, sx2, sw2)
                else:
                    acov_variant = BIASED if variant == PROPOSED_BIASED else UNBIASED
                    est = estimate_ar(window, order, acov_variant, sx2, sw2)
                result = track_channel(y, pilots, est, sx2, sw2, truth=channel, coeff_source=variant)
            else:
                result = track_channel_reestimated(
                    y, pilots, order,
                    BIASED if variant == PROPOSED_BIASED else UNBIASED,
                    sx2, sw2, truth=channel,
                    time_based=(variant == TIME_BASED),
                    coeff_source=variant,
                )
        except (TrackingError, IllConditionedError, NonStationaryError):
            records.append(rec(variant, "track_nmse", math.nan, failed=1))
            continue
        records.append(rec(variant, "track_nmse", nmse_channel(result.estimates, channel)))
        records.append(rec(variant, "track_nmse_final", float(result.per_instant_nmse[-1])))
        records.append(rec(variant, "psd_margin", result.psd_margin))
        if config.per_instant:
            for t, v in enumerate(result.per_instant_nmse):
                records.append(rec(variant, f"nmse_t{t:03d}", float(v)))
    return records


# ----------------------------------------------------------------------------
# experiment driver and CSV output
# ----------------------------------------------------------------------------


def _fmt(value: float) -> str:
    if math.isnan(value):
        return "nan"
    return f"{value:.9g}"


def aggregate_records(records: list[TrialRecord]):
    """Mean/median/q10/q90 per (grid point, variant, metric) over non-failed rows."""
    groups: dict[tuple, list[float]] = {}
    failures: dict[tuple, int] = {}
    order: list[tuple] = []
    for r in records:
        key = (r.experiment, r.n_rx, r.horizon, r.snr_db, r.variant, r.metric)
        if key not in groups:
            groups[key] = []
            failures[key] = 0
            order.append(key)
        if r.failed:
            failures[key] += 1
        else:
            groups[key].append(r.value)
    rows = []
    for key in order:
        values = np.asarray(groups[key])
        if values.size:
            stats = (
                float(values.mean()),
                float(np.median(values)),
                float(np.quantile(values, 0.1)),
                float(np.quantile(values, 0.9)),
            )
        else:
            stats = (math.nan, math.nan, math.nan, math.nan)
        rows.append((*key, *stats, values.size, failures[key]))
    return rows


def aggregate_path_for(trial_path) -> Path:
    trial_path = Path(trial_path)
    return trial_path.with_name(trial_path.stem + "_agg" + (trial_path.suffix or ".csv"))


def run_experiment(config: ExperimentConfig, quiet: bool = False) -> tuple[Path, Path]:
    """Run all trials, write the trial-level and aggregate CSVs, print a summary.

    Trials run on a thread pool (config.threads); output is byte-identical
    regardless of thread count because every record derives from per-trial
    seeds and rows are emitted in task order.
    """
    tasks = [(gi, ti) for gi in range(len(config.grid)) for ti in range(config.trials)]
    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            chunks = list(pool.map(lambda gt: run_trial(config, *gt), tasks))
    else:
        chunks = [run_trial(config, *gt) for gt in tasks]
    records = [r for chunk in chunks for r in chunk]

    trial_path = Path(config.output_path)
    agg_path = aggregate_path_for(trial_path)
    try:
        if trial_path.parent and not trial_path.parent.exists():
            trial_path.parent.mkdir(parents=True, exist_ok=True)
        with open(trial_path, "w", newline="") as fh:
            fh.write(TRIAL_HEADER + "\n")
            for r in records:
                fh.write(
                    f"{r.experiment},{r.n_rx},{r.horizon},{_fmt(r.snr_db)},{r.trial},"
                    f"{r.variant},{r.metric},{_fmt(r.value)},{r.failed}\n"
                )
        agg_rows = aggregate_records(records)
        with open(agg_path, "w", newline="") as fh:
            fh.write(AGG_HEADER + "\n")
            for row in agg_rows:
                exp, n_rx, horizon, snr_db, variant, metric, mean, med, q10, q90, n, n_failed = row
                fh.write(
                    f"{exp},{n_rx},{horizon},{_fmt(snr_db)},{variant},{metric},"
                    f"{_fmt(mean)},{_fmt(med)},{_fmt(q10)},{_fmt(q90)},{n},{n_failed}\n"
                )
    except OSError as exc:
        raise OSError(f"cannot write results near {trial_path}: {exc}") from exc

    if not quiet:
        _print_summary(config, agg_rows)
    return trial_path, agg_path


def _print_summary(config: ExperimentConfig, agg_rows) -> None:
    headline = "coeff_nmse" if config.kind == KIND_COEFF else "track_nmse"
    print(f"experiment {config.experiment}: {config.trials} trials/point, seed {config.master_seed}")
    print(f"{'n_rx':>6} {'T':>6} {'snr_db':>7}  {'variant':<18} {'mean':>12} {'median':>12} {'fails':>6}")
    for row in agg_rows:
        _, n_rx, horizon, snr_db, variant, metric, mean, med, _, _, n, n_failed = row
        if metric != headline:
            continue
        print(f"{n_rx:>6} {horizon:>6} {snr_db:>7.3g}  {variant:<18} {mean:>12.5g} {med:>12.5g} {n_failed:>6}")
