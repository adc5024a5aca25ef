"""Batch command-line front end.

Subcommands mirror the analysis layers: ``tparams`` (tensor archive +
family report), ``sweep`` (scalar fields over the eigenvalue plane),
``boundary``, ``contours``, ``time-curves``.  Every flag mirrors a config
key (ini-style sections, flags win); transfer tensors are cached on disk
keyed by (N, coupling, time).  Exit codes: 0 ok, 1 runtime/IO failure,
2 usage error.
"""

from __future__ import annotations

import argparse
import configparser
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import kernels
from .analysis import (
    boundary_curve,
    determinant_stats,
    field_average,
    mean_determinant_fields,
    optimize_registration_time,
    preimage_contours,
    write_boundary,
    write_contours,
)
from .chain import ChainSpec
from .sweeps import (
    Axis,
    ScalarField,
    SweepGrid,
    concurrence_stats,
    lambda_averaged_concurrence,
    mean_probability,
    normalized_curves,
    transfer_fidelity,
    witness,
)
from .transfer import (
    classify_families,
    compute_transfer_tensor,
    read_archive,
    write_archive,
)


class UsageError(Exception):
    pass


SWEEP_QUANTITIES = (
    "concurrence_mean",
    "concurrence_dev:<angle>",
    "delta2_mean",
    "delta1_mean",
    "delta_dev:<k>:<angle>",
    "witness",
)

_CONFIG_SECTIONS = ("chain", "run", "grids", "sweep", "boundary", "contours",
                    "time_curves")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinline",
        description="spin-1/2 XY communication line analysis",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", type=Path, help="ini-style config file")
        p.add_argument("--n", type=int, help="number of chain nodes")
        p.add_argument("--coupling", type=float, help="coupling constant")
        p.add_argument(
            "--time",
            help="evolution time (dimensionless) or 'optimize'",
        )
        p.add_argument("--grid-step", type=float, help="angle grid step")
        p.add_argument(
            "--lambda-grid-step", type=float, help="eigenvalue grid step"
        )
        p.add_argument("--rule", choices=("trapezoid", "mean"),
                       help="quadrature rule for grid averages")
        p.add_argument("--output", type=Path, help="output file path")
        p.add_argument("--format", choices=("csv", "json"), dest="fmt",
                       help="output format")
        p.add_argument("--threads", type=int, help="worker thread cap")
        p.add_argument("--cache-dir", type=Path, help="tensor archive cache")

    p = sub.add_parser("tparams", help="transfer tensor archive + families")
    common(p)
    p.set_defaults(func=cmd_tparams)

    p = sub.add_parser("sweep", help="scalar field over the eigenvalue plane")
    common(p)
    p.add_argument("--quantity", help="one of: " + ", ".join(SWEEP_QUANTITIES))
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("boundary", help="zero-entanglement boundary")
    common(p)
    p.set_defaults(func=cmd_boundary)

    p = sub.add_parser("contours", help="entangled pre-image contours")
    common(p)
    p.add_argument(
        "--lambda-pairs",
        help="semicolon-separated lambda_r,lambda_s pairs, e.g. '0.5,1;1,1'",
    )
    p.set_defaults(func=cmd_contours)

    p = sub.add_parser("time-curves", help="normalized time series")
    common(p)
    p.add_argument("--t-start", type=float)
    p.add_argument("--t-stop", type=float)
    p.add_argument("--t-step", type=float)
    p.set_defaults(func=cmd_time_curves)
    return parser


_DEFAULTS = {
    "n": 40,
    "coupling": 1.0,
    "time": "optimize",
    "grid_step": 0.05,
    "lambda_grid_step": 0.05,
    "rule": "trapezoid",
    "output": None,
    "fmt": "csv",
    "threads": None,
    "cache_dir": Path(".spinline-cache"),
    "quantity": None,
    "lambda_pairs": None,
    "t_start": 0.0,
    "t_stop": 50.0,
    "t_step": 0.5,
}

_KEY_TYPES = {
    "n": int,
    "coupling": float,
    "grid_step": float,
    "lambda_grid_step": float,
    "threads": int,
    "t_start": float,
    "t_stop": float,
    "t_step": float,
    "output": Path,
    "cache_dir": Path,
}


def resolve_options(args: argparse.Namespace) -> dict:
    """Defaults, then config file, then explicit flags."""
    opts = dict(_DEFAULTS)
    if args.config is not None:
        cfg = configparser.ConfigParser()
        if not cfg.read(args.config):
            raise UsageError(f"cannot read config file {args.config}")
        for section in cfg.sections():
            if section not in _CONFIG_SECTIONS:
                raise UsageError(f"unknown config section [{section}]")
            for key, value in cfg.items(section):
                key = key.replace("-", "_")
                if key == "format":
                    key = "fmt"
                if key not in opts:
                    raise UsageError(f"unknown config key {key!r} in [{section}]")
                cast = _KEY_TYPES.get(key, str)
                opts[key] = cast(value)
    for key, value in vars(args).items():
        if key in opts and value is not None:
            opts[key] = value
    return opts


def resolve_tensor(opts: dict):
    spec = ChainSpec(opts["n"], opts["coupling"])
    raw = str(opts["time"])
    if raw == "optimize":
        t = optimize_registration_time(spec).t_star
    else:
        try:
            t = float(raw)
        except ValueError:
            raise UsageError(f"--time must be a number or 'optimize', got {raw!r}")
    cache_dir = Path(opts["cache_dir"])
    cache_dir.mkdir(parents=True, exist_ok=True)
    name = f"tparams_n{spec.n_nodes}_d{spec.coupling!r}_t{float(t)!r}.txt"
    path = cache_dir / name
    if path.exists():
        tensor = read_archive(path)
    else:
        tensor = compute_transfer_tensor(spec, t)
        write_archive(tensor, path)
    return spec, tensor


def _out_path(opts: dict, default_name: str) -> Path:
    return Path(opts["output"]) if opts["output"] else Path(default_name)


def cmd_tparams(opts: dict) -> int:
    _, tensor = resolve_tensor(opts)
    out = _out_path(opts, f"tparams_n{tensor.n_nodes}.txt")
    write_archive(tensor, out)
    report = classify_families(tensor)
    print(f"transfer tensor N={tensor.n_nodes} D={tensor.coupling} "
          f"t={tensor.time!r} -> {out}")
    for i, family in enumerate(report.families, start=1):
        print(f"family {i} ({len(family)} entries):")
        for name, value in family:
            print(f"  {name[:4]};{name[4:]}  {value.real: .6e} {value.imag:+.6e}i")
    if np.isfinite(report.gap_ratio):
        print(f"family 2/3 magnitude gap: {report.gap_ratio:.1f}x")
    return 0


def _field_to_json(field: ScalarField) -> dict:
    ax1, ax2 = field.grid.axes
    return {
        "metadata": {k: str(v) for k, v in field.metadata.items()},
        "axis1": ax1.name,
        "axis2": ax2.name,
        "nodes1": list(ax1.nodes()),
        "nodes2": list(ax2.nodes()),
        "values": field.values.tolist(),
    }


def _write_field(field: ScalarField, out: Path, fmt: str) -> None:
    if fmt == "json":
        with open(out, "w", encoding="ascii") as fh:
            json.dump(_field_to_json(field), fh, indent=1)
            fh.write("\n")
    else:
        field.write_csv(out)


def cmd_sweep(opts: dict) -> int:
    quantity = opts["quantity"]
    if not quantity:
        raise UsageError("sweep needs --quantity")
    _, tensor = resolve_tensor(opts)
    lam_axis_r = Axis("lambda_r", 0.0, 1.0, opts["lambda_grid_step"])
    lam_axis_s = Axis("lambda_s", 0.0, 1.0, opts["lambda_grid_step"])
    grid = SweepGrid((lam_axis_r, lam_axis_s))
    step, rule = opts["grid_step"], opts["rule"]
    r_nodes, s_nodes = lam_axis_r.nodes(), lam_axis_s.nodes()
    values = np.empty((len(r_nodes), len(s_nodes)))

    parts = quantity.split(":")
    for i, lam_r in enumerate(r_nodes):
        for j, lam_s in enumerate(s_nodes):
            lam_r, lam_s = float(lam_r), float(lam_s)
            if parts[0] == "concurrence_mean":
                values[i, j] = concurrence_stats(tensor, lam_s, lam_r, step, rule).mean
            elif parts[0] == "concurrence_dev" and len(parts) == 2:
                stats = concurrence_stats(tensor, lam_s, lam_r, step, rule)
                try:
                    values[i, j] = stats.deviations[parts[1]]
                except KeyError:
                    raise UsageError(f"unknown angle {parts[1]!r}")
            elif parts[0] in ("delta2_mean", "delta1_mean"):
                stats = determinant_stats(tensor, lam_s, lam_r, step, rule)
                values[i, j] = stats[parts[0]]
            elif parts[0] == "delta_dev" and len(parts) == 3:
                stats = determinant_stats(tensor, lam_s, lam_r, step, rule)
                key = f"delta{parts[1]}_dev"
                if key not in stats or parts[2] not in stats[key]:
                    raise UsageError(f"unknown deviation {quantity!r}")
                values[i, j] = stats[key][parts[2]]
            elif parts[0] == "witness":
                values[i, j] = witness(tensor, lam_s, lam_r, step, rule)
            else:
                raise UsageError(
                    f"unknown quantity {quantity!r}; expected one of "
                    + ", ".join(SWEEP_QUANTITIES)
                )
    field = ScalarField(
        grid,
        values,
        {
            "quantity": quantity,
            "n_nodes": tensor.n_nodes,
            "coupling": tensor.coupling,
            "time": repr(tensor.time),
            "grid_step": step,
            "rule": rule,
        },
    )
    out = _out_path(opts, f"sweep_{quantity.replace(':', '_')}.{opts['fmt']}")
    _write_field(field, out, opts["fmt"])
    print(f"{quantity} -> {out}")
    return 0


def cmd_boundary(opts: dict) -> int:
    _, tensor = resolve_tensor(opts)
    curve = boundary_curve(tensor, angle_step=opts["grid_step"])
    out = _out_path(opts, "boundary.csv")
    if opts["fmt"] == "json":
        payload = {
            "time": curve.time,
            "bisectrix_crossing": curve.bisectrix_crossing,
            "lambda_s_min": curve.lambda_s_min,
            "points": [list(p) for p in curve.points],
        }
        with open(out, "w", encoding="ascii") as fh:
            json.dump(payload, fh, indent=1)
            fh.write("\n")
    else:
        write_boundary(curve, out)
    print(f"boundary (crossing={curve.bisectrix_crossing}) -> {out}")
    return 0


def cmd_contours(opts: dict) -> int:
    raw = opts["lambda_pairs"]
    if not raw:
        raise UsageError("contours needs --lambda-pairs 'r1,s1;r2,s2;...'")
    try:
        pairs = [
            tuple(float(x) for x in chunk.split(","))
            for chunk in str(raw).split(";")
            if chunk.strip()
        ]
        if not all(len(p) == 2 for p in pairs):
            raise ValueError
    except ValueError:
        raise UsageError(f"cannot parse --lambda-pairs {raw!r}")
    _, tensor = resolve_tensor(opts)
    contours = preimage_contours(tensor, pairs, step=opts["grid_step"])
    out = _out_path(opts, "contours.csv")
    if opts["fmt"] == "json":
        payload = [
            {
                "lambda_r": c.lambda_r,
                "lambda_s": c.lambda_s,
                "area": c.area,
                "simply_connected": c.simply_connected,
                "polylines": [line.tolist() for line in c.polylines],
            }
            for c in contours
        ]
        with open(out, "w", encoding="ascii") as fh:
            json.dump(payload, fh, indent=1)
            fh.write("\n")
    else:
        write_contours(contours, out)
    print(f"{len(contours)} contours -> {out}")
    return 0


def cmd_time_curves(opts: dict) -> int:
    spec = ChainSpec(opts["n"], opts["coupling"])
    ts = np.arange(opts["t_start"], opts["t_stop"] + opts["t_step"] / 2,
                   opts["t_step"])
    if ts.size == 0:
        raise UsageError("empty time range")
    lam_step, angle_step, rule = (
        opts["lambda_grid_step"], opts["grid_step"], opts["rule"],
    )
    series = {"t": ts, "p_mean": [], "fidelity": [], "c_mean": [],
              "delta2_mean": [], "delta1_mean": []}
    for t in ts:
        tensor = compute_transfer_tensor(spec, float(t))
        series["p_mean"].append(mean_probability(tensor))
        series["fidelity"].append(transfer_fidelity(tensor))
        series["c_mean"].append(
            lambda_averaged_concurrence(tensor, lam_step, angle_step, rule)
        )
        d2f, d1f = mean_determinant_fields(
            tensor, lambda_step=lam_step,
            beta_step=angle_step, beta_rule=rule,
        )
        series["delta2_mean"].append(field_average(d2f, rule))
        series["delta1_mean"].append(field_average(d1f, rule))
    series = {k: np.asarray(v, dtype=float) for k, v in series.items()}
    normalized, maxima = normalized_curves(series)
    out = _out_path(opts, f"time_curves.{opts['fmt']}")
    if opts["fmt"] == "json":
        payload = {
            "series": {k: v.tolist() for k, v in series.items()},
            "normalized": {k: v.tolist() for k, v in normalized.items()},
            "maxima": maxima,
        }
        with open(out, "w", encoding="ascii") as fh:
            json.dump(payload, fh, indent=1)
            fh.write("\n")
    else:
        names = ["p_mean", "fidelity", "c_mean", "delta2_mean", "delta1_mean"]
        lines = [
            f"# maxima {name}: t={maxima[name][0]!r} value={maxima[name][1]!r}"
            for name in names
        ]
        lines.append("t," + ",".join(names) + ","
                     + ",".join(f"{n}_norm" for n in names))
        for i, t in enumerate(ts):
            row = [repr(float(t))]
            row += [repr(float(series[n][i])) for n in names]
            row += [repr(float(normalized[n][i])) for n in names]
            lines.append(",".join(row))
        with open(out, "w", encoding="ascii") as fh:
            fh.write("\n".join(lines) + "\n")
    print(f"time curves ({len(ts)} samples) -> {out}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        opts = resolve_options(args)
        if opts["threads"]:
            kernels.set_num_threads(opts["threads"])
        return args.func(opts)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
