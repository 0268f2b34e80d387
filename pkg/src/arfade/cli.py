"""Command line front end: `arfade estimate|track|experiment`.

Exit codes: 0 success, 1 configuration/usage error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .acov import BIASED, UNBIASED
from .arest import IllConditionedError, estimate_ar, estimate_ar_time_based
from .experiments import (
    ConfigError,
    GridPoint,
    ExperimentConfig,
    KIND_TRACK,
    PROTOCOL_REESTIMATED,
    TRACK_VARIANTS,
    load_config,
    noise_variance_for_snr,
    preset_config,
    run_experiment,
    run_trial,
)
from .metrics import nmse_coeffs
from .model import ARParams, NonStationaryError
from .simulate import generate_channel, observe

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_IO = 2


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the spec for this tool reserves 2 for
    # I/O problems, so route usage errors to exit code 1
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _coeff_list(text: str) -> list[float]:
    try:
        return [float(c) for c in text.split(",") if c.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad coefficient list {text!r}") from exc


def _build_parser() -> _Parser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=42, help="master seed (default 42)")
    common.add_argument("--trials", type=int, default=None, help="override trial count")
    common.add_argument("--out", type=str, default=None, help="output CSV path")
    common.add_argument("--threads", type=int, default=1, help="worker threads (default 1)")

    parser = _Parser(prog="arfade", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", parents=[common], help="one-shot AR coefficient estimation demo")
    est.add_argument("--coeffs", type=_coeff_list, default=[1.8, -0.9], help="true AR coefficients")
    est.add_argument("--n-rx", type=int, default=64)
    est.add_argument("--horizon", type=int, default=64)
    est.add_argument("--snr-db", type=float, default=0.0)

    trk = sub.add_parser("track", parents=[common], help="one tracking trial, all variants")
    trk.add_argument("--coeffs", type=_coeff_list, default=[1.8, -0.9])
    trk.add_argument("--n-rx", type=int, default=64)
    trk.add_argument("--horizon", type=int, default=64)
    trk.add_argument("--snr-db", type=float, default=0.0)

    exp = sub.add_parser("experiment", parents=[common], help="run a preset or configured experiment")
    group = exp.add_mutually_exclusive_group(required=True)
    group.add_argument("--preset", choices=("fig1", "fig2", "fig3", "fig4"))
    group.add_argument("--config", type=str, help="path to a key-value config file")
    return parser


def _cmd_estimate(args) -> int:
    try:
        ar = ARParams(np.array(args.coeffs))
    except (ValueError, NonStationaryError) as exc:
        print(f"arfade: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    sw2 = noise_variance_for_snr(ar, args.snr_db)
    channel = generate_channel(ar, args.n_rx, args.horizon, args.seed)
    obs = observe(channel, sw2, args.seed + 1)
    print(f"true coefficients: {np.array2string(ar.coeffs, precision=6)}")
    print(f"N_r = {args.n_rx}, T = {args.horizon}, SNR = {args.snr_db:g} dB (sigma_w^2 = {sw2:.6g})")
    rows = [
        ("proposed-biased", lambda: estimate_ar(obs, ar.order, BIASED, 1.0, sw2)),
        ("proposed-unbiased", lambda: estimate_ar(obs, ar.order, UNBIASED, 1.0, sw2)),
        ("time-based", lambda: estimate_ar_time_based(obs, ar.order, UNBIASED, 1.0, sw2)),
    ]
    for label, run in rows:
        try:
            est = run()
        except IllConditionedError as exc:
            print(f"{label:<18} failed: {exc}")
            continue
        _, aggregate = nmse_coeffs(est, ar)
        print(
            f"{label:<18} coeffs {np.array2string(est.real_coeffs, precision=4)}"
            f"  nmse {aggregate:.4g}  (imag norm {est.imag_norm:.3g}, cond {est.condition_number:.3g})"
        )
    return EXIT_OK


def _cmd_track(args) -> int:
    try:
        ar = ARParams(np.array(args.coeffs))
        config = ExperimentConfig(
            experiment="cli-track",
            kind=KIND_TRACK,
            ar=ar,
            grid=(GridPoint(args.n_rx, args.horizon, args.snr_db),),
            trials=1,
            master_seed=args.seed,
            variants=TRACK_VARIANTS,
            output_path=args.out or "cli-track.csv",
            protocol=PROTOCOL_REESTIMATED,
        )
    except (ConfigError, ValueError, NonStationaryError) as exc:
        print(f"arfade: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    records = run_trial(config, 0, 0)
    print(f"one tracking trial: N_r = {args.n_rx}, T = {args.horizon}, SNR = {args.snr_db:g} dB")
    print(f"{'variant':<20} {'overall NMSE':>14} {'final NMSE':>14}")
    by_variant: dict[str, dict[str, float]] = {}
    for r in records:
        by_variant.setdefault(r.variant, {})[r.metric] = r.value
        if r.failed:
            by_variant[r.variant]["failed"] = 1.0
    for variant, metrics in by_variant.items():
        if "failed" in metrics:
            print(f"{variant:<20} {'failed':>14} {'failed':>14}")
        else:
            print(f"{variant:<20} {metrics['track_nmse']:>14.5g} {metrics['track_nmse_final']:>14.5g}")
    return EXIT_OK


def _cmd_experiment(args) -> int:
    try:
        if args.preset:
            config = preset_config(
                args.preset,
                trials=args.trials,
                master_seed=args.seed,
                output_path=args.out,
                threads=args.threads,
            )
        else:
            config = load_config(args.config)
            from dataclasses import replace

            updates = {}
            if args.trials is not None:
                updates["trials"] = args.trials
            if args.out is not None:
                updates["output_path"] = args.out
            if args.threads != 1:
                updates["threads"] = args.threads
            if "--seed" in sys.argv:
                updates["master_seed"] = args.seed
            if updates:
                config = replace(config, **updates)
    except ConfigError as exc:
        print(f"arfade: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        trial_path, agg_path = run_experiment(config)
    except OSError as exc:
        print(f"arfade: i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote {trial_path} and {agg_path}")
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "estimate":
        return _cmd_estimate(args)
    if args.command == "track":
        return _cmd_track(args)
    return _cmd_experiment(args)


if __name__ == "__main__":
    sys.exit(main())
