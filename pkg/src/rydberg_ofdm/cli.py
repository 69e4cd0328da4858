"""Command line front end.

Subcommands: spectrum, ber-sweep, transmit, probe. Exit codes: 0 success,
2 configuration error, 3 codec or environment failure, 4 numerical error.
Set RYDBERG_SIM_LOG=DEBUG (or INFO, WARNING, ERROR) to adjust logging.
"""

import argparse
import dataclasses
import itertools
import json
import logging
import multiprocessing
import os
import sys
from pathlib import Path

import numpy as np

from . import config as config_mod
from .atomic import at_separation, eit_spectrum, estimate_field
from .errors import (
    CodecError,
    ConfigError,
    RydbergSimError,
    UnsplitSpectrumError,
)
from .frameio import write_spectrum_csv
from .images import load_image, save_image, to_gray
from .link import (
    BASELINE_CODEC_ID,
    builtin_baseline_descriptor,
    handshake,
    probe_ber,
    read_mapping_table,
    run_image_link,
    select_codec,
)

__all__ = ["build_parser", "main"]

log = logging.getLogger("rydberg_ofdm.cli")

SWEEP_FILENAME = "ber_sweep.jsonl"


def _setup_logging():
    name = os.environ.get("RYDBERG_SIM_LOG", "WARNING").upper()
    level = getattr(logging, name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(
        level=level, format="%(levelname)s %(name)s: %(message)s"
    )


def _load_config(args):
    if args.config is None:
        raise ConfigError("--config is required for this command")
    return config_mod.read_experiment_config(args.config)


def _out_dir(args, config):
    out = Path(args.out if args.out else config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_spectrum(args):
    config = _load_config(args)
    request = config.spectrum
    if not request.rf_rabi_rad_s:
        raise ConfigError(
            "config.spectrum.rf_rabi_rad_s: no RF drive strengths configured"
        )
    out = _out_dir(args, config)
    readout = config.channel.effective_readout()
    scheme = readout.scheme
    half_span = request.half_span_rad_s
    if half_span <= 0:
        half_span = max(request.rf_rabi_rad_s) / 2 + 2 * scheme.gamma_intermediate
    step = request.step_rad_s
    if step <= 0:
        step = half_span / 2000
    grid = np.arange(-half_span, half_span + step / 2, step)
    for i, rf in enumerate(request.rf_rabi_rad_s):
        spectrum = eit_spectrum(scheme, readout, rf, grid)
        path = out / f"spectrum_{i:03d}.csv"
        write_spectrum_csv(path, spectrum)
        try:
            separation = at_separation(spectrum)
            field = estimate_field(spectrum, scheme.dipole_moment)
            print(
                f"spectrum[{i}] rf_rabi={rf!r} peaks=2 "
                f"separation_rad_s={separation!r} field_v_per_m={field!r} "
                f"csv={path}"
            )
        except UnsplitSpectrumError:
            print(
                f"spectrum[{i}] rf_rabi={rf!r} peaks=1 separation_rad_s=none "
                f"csv={path}"
            )
    return 0


def _sweep_tasks(config):
    """Deterministic task order: Cartesian product of axes, seeds innermost."""
    axes = config.sweep
    combos = itertools.product(*[axis.values for axis in axes]) \
        if axes else iter([()])
    tasks = []
    index = 0
    for combo in combos:
        point = {axis.param: value for axis, value in zip(axes, combo)}
        for seed in config.seeds:
            tasks.append((index, point, seed))
            index += 1
    return tasks


def _run_sweep_task(payload):
    index, point, seed, ofdm, model, n_bits = payload
    for param, value in point.items():
        ofdm, model = config_mod.apply_sweep_value(ofdm, model, param, value)
    report = probe_ber(ofdm, model, seed=seed, n_bits=n_bits)
    record = {"task_index": index, "point": point, "seed": seed}
    record.update(report.to_json_dict())
    return index, json.dumps(record, sort_keys=True)


def _read_completed(path):
    """Map task_index -> raw line for every finished line of a sweep file.

    A truncated final line (killed run) is dropped; any other damage is a
    hard error so silent corruption cannot propagate into results.
    """
    completed = {}
    if not path.exists():
        return completed
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    for lineno, line in enumerate(lines, start=1):
        try:
            record = json.loads(line)
            index = record["task_index"]
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            if lineno == len(lines):
                log.warning("dropping truncated final line of %s", path)
                break
            raise ConfigError(
                f"{path}:{lineno}: unreadable sweep line ({exc}); remove the "
                "file to restart the sweep"
            ) from exc
        completed[index] = line
    return completed


def cmd_ber_sweep(args):
    config = _load_config(args)
    out = _out_dir(args, config)
    sweep_path = out / SWEEP_FILENAME
    tasks = _sweep_tasks(config)
    completed = _read_completed(sweep_path)
    pending = [
        (index, point, seed, config.ofdm, config.channel, config.probe_bits)
        for index, point, seed in tasks
        if index not in completed
    ]
    log.info("sweep: %d tasks, %d already done", len(tasks), len(completed))
    jobs = max(1, args.jobs)
    if pending and jobs > 1:
        with multiprocessing.Pool(jobs) as pool:
            for index, line in pool.imap(_run_sweep_task, pending):
                completed[index] = line
    else:
        for payload in pending:
            index, line = _run_sweep_task(payload)
            completed[index] = line
    ordered = [completed[index] for index, _, _ in tasks]
    tmp_path = sweep_path.with_suffix(".jsonl.tmp")
    with open(tmp_path, "w", encoding="utf-8") as fh:
        for line in ordered:
            fh.write(line + "\n")
    os.replace(tmp_path, sweep_path)

    by_point = {}
    for line in ordered:
        record = json.loads(line)
        label = ",".join(
            f"{k}={record['point'][k]}" for k in sorted(record["point"])
        ) or "(default)"
        by_point.setdefault(label, []).append(record["ber"])
    print(f"wrote {len(ordered)} results to {sweep_path}")
    for label, bers in by_point.items():
        values = np.asarray(bers)
        std = values.std(ddof=1) if values.size > 1 else 0.0
        print(
            f"{label}: seeds={values.size} mean_ber={values.mean():.6g} "
            f"std_ber={std:.6g}"
        )
    return 0


def cmd_probe(args):
    config = _load_config(args)
    seed = args.seed if args.seed is not None else config.seeds[0]
    n_bits = args.bits if args.bits else config.probe_bits
    report = probe_ber(config.ofdm, config.channel, seed=seed, n_bits=n_bits)
    print(json.dumps(report.to_json_dict(), sort_keys=True, indent=2))
    return 0


def _resolve_descriptor(codec_id, config, image_shape):
    for descriptor in config.codecs:
        if descriptor.codec_id == codec_id:
            return descriptor
    if codec_id == BASELINE_CODEC_ID:
        height, width = image_shape
        return builtin_baseline_descriptor(width=width, height=height)
    raise CodecError(
        f"codec {codec_id!r} selected by the mapping table is not defined "
        "in config.codecs"
    )


def cmd_transmit(args):
    config = _load_config(args)
    out = _out_dir(args, config)
    seed = args.seed if args.seed is not None else config.seeds[0]
    table = read_mapping_table(args.table)
    image = load_image(args.image)
    if image.ndim == 3:
        image = np.rint(to_gray(image)).astype(np.uint8)
    report = probe_ber(config.ofdm, config.channel, seed=seed,
                       n_bits=config.probe_bits)
    codec_id = select_codec(report.ber, table)
    descriptor = _resolve_descriptor(codec_id, config, image.shape)
    log.info("probe ber=%.6g selected codec=%s", report.ber, codec_id)
    handshake(descriptor)
    model = dataclasses.replace(config.channel, seed=seed)
    reconstructed, metrics = run_image_link(
        image, descriptor, config.ofdm, model, seed=seed
    )
    image_path = out / "reconstructed.pgm"
    save_image(image_path, reconstructed)
    result = {
        "probe_ber": report.ber,
        "codec_id": codec_id,
        "seed": seed,
        "reconstructed": str(image_path),
    }
    result.update(metrics.to_json_dict())
    metrics_path = out / "metrics.json"
    with open(metrics_path, "w", encoding="ascii") as fh:
        json.dump(result, fh, sort_keys=True, indent=2)
        fh.write("\n")
    print(json.dumps(result, sort_keys=True, indent=2))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="rydberg-ofdm",
        description="OFDM-through-a-Rydberg-receiver link simulator",
    )
    parser.add_argument("--config", help="experiment config JSON")
    parser.add_argument("--out", help="output directory (default from config)")
    parser.add_argument("--jobs", type=int, default=1,
                        help="worker processes for sweeps")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the first configured seed")
    sub = parser.add_subparsers(dest="command", required=True)

    p_spectrum = sub.add_parser(
        "spectrum", help="write EIT spectra CSVs and report AT splitting")
    p_spectrum.set_defaults(func=cmd_spectrum)

    p_sweep = sub.add_parser(
        "ber-sweep", help="run the configured BER sweep grid")
    p_sweep.set_defaults(func=cmd_ber_sweep)

    p_probe = sub.add_parser(
        "probe", help="measure link BER with probe traffic")
    p_probe.add_argument("--bits", type=int, default=None,
                         help="probe payload size in bits")
    p_probe.set_defaults(func=cmd_probe)

    p_transmit = sub.add_parser(
        "transmit", help="carry an image across the link")
    p_transmit.add_argument("--image", required=True, help="input PGM/PPM")
    p_transmit.add_argument("--table", required=True,
                            help="codec mapping table JSON")
    p_transmit.set_defaults(func=cmd_transmit)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    _setup_logging()
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CodecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except RydbergSimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
