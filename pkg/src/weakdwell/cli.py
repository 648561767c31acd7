"""Batch command-line front end.

    weakdwell <experiment> --config <path> [--out <path>] [--format csv|json]
              [--workers N] [--no-metadata]

Exit codes: 0 success, 2 configuration error, 3 domain error, 4 I/O error.
"""
import argparse
import csv
import io
import json
import os
import sys
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .bath import BathModel, fit_decay, integrate_bath, trajectory_records
from .config import EXPERIMENTS, FORMATS, build_config, read_config_file
from .dwell import DwellRequest, dwell_time
from .errors import ConfigError, DomainError
from .pointer import PointerGrid, gaussian_pointer, weak_measure
from .qcore import NAMED_OPERATORS, NAMED_STATES, bloch_state, weak_value
from .weakvalue import (
    FINITE_TIME,
    PostSelectionSpec,
    survival_weak_value,
    survival_weak_value_finite,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DOMAIN = 3
EXIT_IO = 4

SWEEP_COLUMNS = ("T", "gamma", "tau_quadrature", "tau_tanh", "tau_coth_paper")


def format_value(value):
    """Render one cell; floats use 17 significant digits so they round-trip."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _metadata_lines(metadata):
    return [f"# {key}: {value}" for key, value in metadata.items()]


def render_csv(records, columns=None, metadata=None):
    if columns is None:
        columns = list(records[0]) if records else []
    buf = io.StringIO()
    if metadata:
        buf.write("\n".join(_metadata_lines(metadata)) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for record in records:
        if list(record) != list(columns):
            raise ValueError("records must share the same columns")
        writer.writerow([format_value(record[c]) for c in columns])
    return buf.getvalue()


def render_json(records, metadata=None):
    def plain(value):
        if isinstance(value, (bool, np.bool_)):
            return bool(value)
        if isinstance(value, (float, np.floating)):
            return float(value)
        if isinstance(value, (int, np.integer)):
            return int(value)
        return value

    rows = [{k: plain(v) for k, v in record.items()} for record in records]
    body = rows[0] if len(rows) == 1 else rows
    if metadata:
        body = {"metadata": metadata, "records": rows}
    return json.dumps(body, indent=2, allow_nan=False) + "\n"


def _write_atomic(text, path):
    if path == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".weakdwell-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit_csv(records, path, columns=None, metadata=None):
    """Write homogeneous ``records`` as CSV to ``path`` (``-`` for stdout)."""
    _write_atomic(render_csv(records, columns, metadata), path)


def emit_json(records, path, metadata=None):
    _write_atomic(render_json(records, metadata), path)


def read_csv_data(text):
    """Parse CSV text written by ``emit_csv``, skipping ``#`` metadata lines."""
    lines = [line for line in text.splitlines() if not line.startswith("#")]
    reader = csv.reader(lines)
    header = next(reader)
    return header, [row for row in reader]


def data_section(text):
    """The non-metadata part of a CSV artifact."""
    return "".join(line for line in text.splitlines(keepends=True) if not line.startswith("#"))


# experiment runners: each returns (records, columns, extra_metadata)


def _run_bath(p, workers):
    model = BathModel(p["n_levels"], p["delta_e"], p["coupling"])
    traj = integrate_bath(model, p["t_max"], p["dt"], stride=p["stride"], force=p["force"])
    extra = {}
    if p["coupling"] > 0 and p["t_max"] > 1.0:
        try:
            fit = fit_decay(traj, (0.05 * p["t_max"], 0.8 * p["t_max"]))
            extra = {"fitted_gamma": format_value(fit.gamma), "fit_residual": format_value(fit.residual)}
        except DomainError:
            pass
    return trajectory_records(traj), None, extra


def _state(spec):
    if isinstance(spec, str):
        return NAMED_STATES[spec]
    return bloch_state(*spec)


def _run_pointer(p, workers):
    pre, post = _state(p["pre"]), _state(p["post"])
    op = NAMED_OPERATORS[p["operator"]]
    grid = PointerGrid(p["q_min"], p["q_max"], p["n_points"])
    outcome = weak_measure(pre, post, op, p["coupling"], gaussian_pointer(grid, p["delta"]))
    a_w = weak_value(pre, post, op)
    summary = {
        "coupling": p["coupling"],
        "delta": p["delta"],
        "mean_q": outcome.mean_q,
        "mean_p": outcome.mean_p,
        "post_selection_probability": outcome.post_selection_probability,
        "re_weak_value": a_w.real,
        "im_weak_value": a_w.imag,
    }
    if p["output"] == "summary":
        return [summary], None, {}
    amplitudes = outcome.final_pointer.amplitudes
    records = [
        {"q": float(q), "re": float(a.real), "im": float(a.imag), "prob": float(abs(a) ** 2)}
        for q, a in zip(grid.q, amplitudes)
    ]
    return records, None, {k: format_value(v) for k, v in summary.items()}


def _run_survival(p, workers):
    spec = PostSelectionSpec(p["kind"], p["gamma"], p["t_i"], p["t_f"], p["k"], p["delta_e"])
    evaluate = survival_weak_value_finite if spec.kind == FINITE_TIME else survival_weak_value
    times = np.linspace(spec.t_i, spec.t_f, p["n_points"])
    times[-1] = spec.t_f
    records = []
    for t in times:
        value = evaluate(spec, float(t)).value
        records.append({"t": float(t), "re_pw": value.real, "im_pw": value.imag})
    return records, None, {}


def _dwell_record(report):
    record = report.as_record()
    record["T"] = record.pop("window")
    order = ("omega", "omega_prime", "T")
    return {**{k: record[k] for k in order}, **{k: v for k, v in record.items() if k not in order}}


def _run_dwell(p, workers):
    report = dwell_time(DwellRequest(p["omega"], p["omega_prime"], p["T"]))
    return [_dwell_record(report)], None, {}


def _sweep_point(args):
    omega, omega_prime, window = args
    return dwell_time(DwellRequest(omega, omega_prime, window))


def _run_sweep(p, workers):
    sweep = p["sweep"]
    points = []
    for value in sweep.values():
        point = {"omega": p.get("omega"), "omega_prime": p.get("omega_prime"), "T": p.get("T")}
        point[sweep.variable] = value
        points.append((point["omega"], point["omega_prime"], point["T"]))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(_sweep_point, points))
    else:
        reports = [_sweep_point(point) for point in points]

    columns = list(SWEEP_COLUMNS)
    if sweep.variable != "T":
        columns.insert(0, sweep.variable)
    records = []
    for report in reports:
        full = _dwell_record(report)
        records.append({c: full[c] for c in columns})
    return records, columns, {}


RUNNERS = {
    "bath-sim": _run_bath,
    "pointer-sim": _run_pointer,
    "survival": _run_survival,
    "dwell": _run_dwell,
    "sweep": _run_sweep,
}


def execute(config):
    """Run ``config`` and write its artifact. Errors propagate to the caller."""
    started = time.perf_counter()
    records, columns, extra = RUNNERS[config.experiment](config.parameters, config.workers)
    metadata = None
    if config.metadata:
        metadata = {
            "tool": f"weakdwell {__version__}",
            "experiment": config.experiment,
            "config": "; ".join(f"{k}={v}" for k, v in sorted(config.raw.items())),
            **extra,
            "wall_time_s": f"{time.perf_counter() - started:.3f}",
        }
    if config.format == "csv":
        emit_csv(records, config.output_path, columns, metadata)
    else:
        emit_json(records, config.output_path, metadata)
    return records


def run(config):
    """Execute ``config`` and map failures onto the exit-code contract."""
    try:
        execute(config)
    except ConfigError as exc:
        print(f"weakdwell: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DomainError, ArithmeticError) as exc:
        print(f"weakdwell: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"weakdwell: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="weakdwell",
        description="Weak values, finite-bath decay and weak-value dwell times.",
    )
    parser.add_argument("experiment", choices=EXPERIMENTS)
    parser.add_argument("--config", required=True, help="key = value configuration file")
    parser.add_argument("--out", help="output path ('-' for stdout)")
    parser.add_argument("--format", choices=FORMATS)
    parser.add_argument("--workers", type=int, help="sweep worker threads")
    parser.add_argument("--no-metadata", action="store_true", help="omit the metadata preamble")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        params = read_config_file(args.config)
        config = build_config(
            args.experiment,
            params,
            output_path=args.out,
            fmt=args.format,
            workers=args.workers,
            metadata=not args.no_metadata,
        )
    except ConfigError as exc:
        print(f"weakdwell: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
