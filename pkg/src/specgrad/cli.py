"""Command-line front end.

Subcommands: gradcheck, sweep, track, joint, wav-info.  Flags may also be
supplied through ``--config FILE`` with one ``key value`` pair per line
(keys are the long flag names without the dashes); explicit flags win.
Exit codes: 0 success, 1 run failure (failed check, non-finite loss,
unreadable input file), 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from ._backend import active_backend
from .errors import NonFiniteLossError, SpecgradError
from .experiments import (
    ClassificationDataConfig,
    JointConfig,
    TrackingDataConfig,
    joint_train,
    make_classification_dataset,
    make_tracking_dataset,
    run_tracking,
    sweep_loss,
)
from .optim import OptimConfig, default_cases, gradcheck_report
from .signals import LawKind, read_wav_pcm16_mono
from .spectro import PipelineConfig
from .stft import Variant
from .window import WindowParams

USAGE_ERROR = 2
RUN_FAILURE = 1


def _fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _write_manifest(out_dir, command, config, artifacts, started):
    manifest = {
        "command": command,
        "config": {k: config[k] for k in sorted(config)},
        "seed": config.get("seed"),
        "artifacts": [str(p) for p in artifacts],
        "duration_s": round(time.monotonic() - started, 3),
        "backend": active_backend(),
        "version": __version__,
    }
    path = Path(out_dir) / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


# flag name -> (type, default, help); shared across subcommands that use them
_COMMON = {
    "seed": (int, 0, "base RNG seed"),
    "variant": (str, "fixed-size", "fixed-size or fixed-overlap"),
    "support-n": (int, 64, "frame support / FFT size (power of two)"),
    "theta0": (float, 48.0, "initial window length"),
    "alpha": (float, 0.5, "overlap ratio for the fixed-overlap variant"),
    "lr": (float, 2.0, "gradient-descent learning rate"),
    "iters": (int, 300, "gradient-descent iteration budget"),
    "out-dir": (str, ".", "directory for CSV artifacts"),
    "tolerance": (float, 1e-4, "stop when the theta step falls below this"),
    "theta-min": (float, 2.0, "lower window-length bound"),
    "theta-max": (float, None, "upper window-length bound (default support-n)"),
    "dataset-size": (int, 16, "number of signals in the synthetic batch"),
    "snr-db": (float, 10.0, "signal-to-noise ratio of the synthetic data"),
    "law": (str, "fm", "frequency law: constant, chirp, or fm"),
    "f-start": (float, 128.0, "law start/carrier frequency in Hz"),
    "f-end": (float, 200.0, "chirp end frequency in Hz"),
    "mod-rate": (float, 5.0, "fm modulation rate in Hz"),
    "mod-depth": (float, 48.0, "fm modulation depth in Hz"),
    "sample-rate": (float, 512.0, "sample rate of the synthetic data"),
    "n-samples": (int, 512, "length of each synthetic signal"),
    "grid-min": (float, 2.0, "sweep grid lower edge"),
    "grid-max": (float, 64.0, "sweep grid upper edge"),
    "grid-steps": (int, 32, "sweep grid size"),
    "epochs": (int, 150, "joint-training epochs"),
    "lr-theta": (float, 2.0, "joint-training learning rate for theta"),
    "classes": (int, 2, "number of classes in the joint experiment"),
    "train-size": (int, 16, "signals per class in the joint experiment"),
}

_FLAGS_BY_COMMAND = {
    "gradcheck": ["seed", "variant", "support-n", "out-dir"],
    "sweep": [
        "seed", "variant", "support-n", "alpha", "out-dir", "grid-min",
        "grid-max", "grid-steps", "theta-min", "theta-max", "dataset-size",
        "snr-db", "law", "f-start", "f-end", "mod-rate", "mod-depth",
        "sample-rate", "n-samples",
    ],
    "track": [
        "seed", "variant", "support-n", "alpha", "out-dir", "theta0", "lr",
        "iters", "tolerance", "theta-min", "theta-max", "grid-steps",
        "dataset-size", "snr-db", "law", "f-start", "f-end", "mod-rate",
        "mod-depth", "sample-rate", "n-samples",
    ],
    "joint": [
        "seed", "support-n", "out-dir", "theta0", "lr", "lr-theta", "epochs",
        "classes", "train-size", "snr-db", "sample-rate", "n-samples",
        "theta-min", "theta-max",
    ],
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="specgrad",
        description="differentiable-window STFT experiments",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for command, flags in _FLAGS_BY_COMMAND.items():
        p = sub.add_parser(command)
        p.add_argument("--config", type=str, default=None, help="key/value file")
        overrides = _DEFAULT_OVERRIDES.get(command, {})
        for name in flags:
            typ, default, help_text = _COMMON[name]
            default = overrides.get(name, default)
            p.add_argument(
                f"--{name}",
                type=typ,
                default=None,
                help=f"{help_text} (default {default})",
            )
        if command == "gradcheck":
            p.add_argument(
                "--corrupt",
                action="store_true",
                help="debug aid: scale analytic gradients by 1.1 to force failures",
            )
    wav = sub.add_parser("wav-info")
    wav.add_argument("path", type=str)
    return parser


class UsageError(Exception):
    pass


def _load_config_file(path, allowed):
    values = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line:
            key, _, value = line.partition("=")
        else:
            key, _, value = line.partition(" ")
        key = key.strip().replace("_", "-")
        value = value.strip()
        if key not in allowed or not value:
            raise UsageError(f"config line {lineno}: unknown or bare key {key!r}")
        typ = _COMMON[key][0]
        try:
            values[key] = (
                value.lower() in ("1", "true", "yes") if typ is bool else typ(value)
            )
        except ValueError as exc:
            raise UsageError(f"config line {lineno}: {exc}") from exc
    return values


# per-command deviations from the shared defaults
_DEFAULT_OVERRIDES = {
    "gradcheck": {"variant": "both"},
    "track": {"theta-min": 4.0},
    "joint": {
        "theta0": 6.0,
        "lr": 0.1,
        "lr-theta": 150.0,
        "epochs": 700,
        "theta-max": 32.0,
    },
}


def _resolve(args, command):
    """Defaults < config file < explicit flags."""
    flags = _FLAGS_BY_COMMAND[command]
    resolved = {name: _COMMON[name][1] for name in flags}
    resolved.update(_DEFAULT_OVERRIDES.get(command, {}))
    if args.config is not None:
        resolved.update(_load_config_file(args.config, set(flags)))
    for name in flags:
        value = getattr(args, name.replace("-", "_"))
        if value is not None:
            resolved[name] = value
    if "support-n" in resolved and resolved.get("theta-max") is None:
        resolved["theta-max"] = float(resolved["support-n"])
    return resolved


def _parse_variant(text):
    try:
        return Variant(text)
    except ValueError:
        raise UsageError(
            f"unknown variant {text!r}; use fixed-size or fixed-overlap"
        ) from None


def _parse_law(text):
    try:
        return LawKind(text)
    except ValueError:
        raise UsageError(f"unknown law {text!r}; use constant, chirp, or fm") from None


def _data_config(cfg):
    return TrackingDataConfig(
        n_signals=cfg["dataset-size"],
        law=_parse_law(cfg["law"]),
        f_start=cfg["f-start"],
        f_end=cfg["f-end"],
        mod_rate=cfg["mod-rate"],
        mod_depth=cfg["mod-depth"],
        snr_db=cfg["snr-db"],
        sample_rate=cfg["sample-rate"],
        n_samples=cfg["n-samples"],
        seed=cfg["seed"],
    )


def _pipeline(cfg):
    return PipelineConfig(variant=_parse_variant(cfg["variant"]), alpha=cfg["alpha"])


def cmd_gradcheck(cfg, corrupt=False):
    started = time.monotonic()
    out_dir = Path(cfg["out-dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    variant = _parse_variant(cfg["variant"]) if cfg["variant"] != "both" else None
    cases = default_cases(seed=cfg["seed"], support_n=cfg["support-n"], variant=variant)
    results = gradcheck_report(cases, corrupt=corrupt)
    csv_path = out_dir / "gradcheck.csv"
    _write_csv(
        csv_path,
        ["case", "variant", "theta", "analytic", "numeric", "rel_error", "pass"],
        [
            (r.name, r.variant, r.theta, r.analytic, r.numeric, r.rel_error, r.passed)
            for r in results
        ],
    )
    _write_manifest(out_dir, "gradcheck", cfg, [csv_path], started)
    failed = [r for r in results if not r.passed]
    for r in results:
        marker = "ok" if r.passed else "FAIL"
        print(f"{marker:4s} {r.name} rel={r.rel_error:.3e}")
    print(f"gradcheck: {len(results) - len(failed)}/{len(results)} passed")
    return 0 if not failed else RUN_FAILURE


def _sweep_params(cfg):
    if not (
        cfg["theta-min"] <= cfg["grid-min"] < cfg["grid-max"] <= cfg["theta-max"]
    ):
        raise UsageError(
            f"sweep grid [{cfg['grid-min']}, {cfg['grid-max']}] must sit inside "
            f"theta bounds [{cfg['theta-min']}, {cfg['theta-max']}]"
        )
    return WindowParams(
        cfg["support-n"],
        cfg["grid-min"],
        theta_min=cfg["theta-min"],
        theta_max=cfg["theta-max"],
    )


def cmd_sweep(cfg):
    started = time.monotonic()
    out_dir = Path(cfg["out-dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    params = _sweep_params(cfg)
    signals, truths = make_tracking_dataset(_data_config(cfg))
    grid = np.linspace(cfg["grid-min"], cfg["grid-max"], cfg["grid-steps"])
    result = sweep_loss(signals, truths, grid, params, _pipeline(cfg))
    csv_path = out_dir / "sweep.csv"
    _write_csv(
        csv_path,
        ["theta", "loss"],
        list(zip(result.thetas, result.losses)),
    )
    _write_manifest(out_dir, "sweep", cfg, [csv_path], started)
    print(f"sweep: argmin theta = {result.argmin_theta:.4f}")
    return 0


def _trace_rows(trace):
    return [
        (r.iteration, r.theta, r.loss, r.grad_theta) for r in trace.records
    ]


def cmd_track(cfg):
    started = time.monotonic()
    out_dir = Path(cfg["out-dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    if not (cfg["theta-min"] <= cfg["theta0"] <= cfg["theta-max"]):
        raise UsageError(
            f"theta0 {cfg['theta0']} outside [{cfg['theta-min']}, {cfg['theta-max']}]"
        )
    optim_config = OptimConfig(
        learning_rate=cfg["lr"],
        max_iters=cfg["iters"],
        theta_bounds=(cfg["theta-min"], cfg["theta-max"]),
        tolerance=cfg["tolerance"],
        seed=cfg["seed"],
    )
    trace_path = Path(out_dir) / "trace.csv"
    try:
        trace, track, sweep = run_tracking(
            _data_config(cfg),
            optim_config,
            cfg["theta0"],
            support_n=cfg["support-n"],
            pipeline=_pipeline(cfg),
            sweep_steps=cfg["grid-steps"],
        )
    except NonFiniteLossError as exc:
        _write_csv(
            trace_path, ["iter", "theta", "loss", "grad_theta"], _trace_rows(exc.trace)
        )
        print(f"track: aborted, {exc}", file=sys.stderr)
        return RUN_FAILURE
    _write_csv(trace_path, ["iter", "theta", "loss", "grad_theta"], _trace_rows(trace))
    scale = cfg["sample-rate"] / cfg["support-n"]
    track_path = Path(out_dir) / "track.csv"
    _write_csv(
        track_path,
        ["frame", "estimate_bin", "truth_bin", "estimate_hz", "truth_hz"],
        [
            (i, est, tru, est * scale, tru * scale)
            for i, (est, tru) in enumerate(zip(track.estimates, track.truth))
        ],
    )
    sweep_path = Path(out_dir) / "sweep.csv"
    _write_csv(sweep_path, ["theta", "loss"], list(zip(sweep.thetas, sweep.losses)))
    _write_manifest(
        out_dir, "track", cfg, [trace_path, track_path, sweep_path], started
    )
    final = trace.final
    print(
        f"track: theta {cfg['theta0']:.3f} -> {final.theta:.4f} in {len(trace) - 1} "
        f"steps, loss {trace.records[0].loss:.5f} -> {final.loss:.5f}, "
        f"sweep argmin {sweep.argmin_theta:.4f}"
    )
    return 0


def cmd_joint(cfg):
    started = time.monotonic()
    out_dir = Path(cfg["out-dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    if cfg["classes"] < 2:
        raise UsageError("joint training needs at least two classes")
    data_config = ClassificationDataConfig(
        n_per_class=cfg["train-size"],
        n_classes=cfg["classes"],
        snr_db=cfg["snr-db"],
        sample_rate=cfg["sample-rate"],
        n_samples=cfg["n-samples"],
        seed=cfg["seed"],
    )
    signals, labels = make_classification_dataset(data_config)
    joint_config = JointConfig(
        epochs=cfg["epochs"],
        lr_weights=cfg["lr"],
        lr_theta=cfg["lr-theta"],
        theta_bounds=(cfg["theta-min"], cfg["theta-max"]),
        seed=cfg["seed"],
    )
    trace, model = joint_train(signals, labels, cfg["support-n"], cfg["theta0"], joint_config)
    trace_path = Path(out_dir) / "trace.csv"
    _write_csv(
        trace_path,
        ["epoch", "theta", "loss", "grad_theta", "weight_norm", "grad_check_rel"],
        [
            (
                r.iteration,
                r.theta,
                r.loss,
                r.grad_theta,
                r.aux.get("weight_norm", 0.0),
                r.aux.get("grad_check_rel", ""),
            )
            for r in trace.records
        ],
    )
    _write_manifest(out_dir, "joint", cfg, [trace_path], started)
    first, last = trace.records[0], trace.final
    print(
        f"joint: theta {first.theta:.3f} -> {last.theta:.4f}, "
        f"cross-entropy {first.loss:.5f} -> {last.loss:.5f}, "
        f"|W| {last.aux['weight_norm']:.4f}"
    )
    return 0


def cmd_wav_info(path):
    try:
        signal = read_wav_pcm16_mono(path)
    except (OSError, SpecgradError) as exc:
        print(f"wav-info: {exc}", file=sys.stderr)
        return RUN_FAILURE
    peak = float(np.max(np.abs(signal.samples)))
    print(f"sample_rate: {signal.sample_rate:.0f} Hz")
    print(f"samples: {len(signal)}")
    print(f"duration: {signal.duration:.6f} s")
    print(f"peak: {peak:.6f}")
    return 0


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 0
    try:
        if args.command == "wav-info":
            return cmd_wav_info(args.path)
        cfg = _resolve(args, args.command)
        if args.command == "gradcheck":
            return cmd_gradcheck(cfg, corrupt=args.corrupt)
        if args.command == "sweep":
            return cmd_sweep(cfg)
        if args.command == "track":
            return cmd_track(cfg)
        return cmd_joint(cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except NonFiniteLossError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return RUN_FAILURE
    except SpecgradError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
