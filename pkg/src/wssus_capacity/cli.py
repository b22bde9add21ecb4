"""Command-line interface: ``wssus-capacity {sweep,critical,plot,oracle,mi}``.

Exit codes: 0 success, 1 maximum at a range endpoint (``critical``),
2 configuration violation, 3 numerical failure, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from .bounds import (
    BoundCurve,
    BoundPoint,
    bandwidth_grid,
    coherent_term,
    critical_bandwidth,
    evaluate_point,
    sweep,
)
from .coherent_mi import awgn_cm_mi, get_constellation, mc_mi_oracle, rayleigh_cm_mi
from .config import RunConfig, load_config
from .errors import Boundary, ConfigError, NonConvergence, NumericalFailure, SizeExceeded
from .oracle import critical_lattice, szego_check
from .plotting import emit_plot

logger = logging.getLogger("wssus_capacity")

EXIT_OK = 0
EXIT_BOUNDARY = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4

_NUMERIC_ERRORS = (NonConvergence, NumericalFailure, FloatingPointError, ArithmeticError,
                   np.linalg.LinAlgError)


def unit_scale(unit) -> float:
    return 1.0 if unit == "nat" else 1.0 / math.log(2.0)


def _num(v) -> str:
    v = float(v)
    return "nan" if not math.isfinite(v) else format(v, ".17g")


def write_curve_csv(curve: BoundCurve, fh, unit="nat"):
    """CSV with header ``bandwidth_hz,ub1,ub2,lb_raw,lb,lb_approx,alpha_star,gamma_star``."""
    scale = unit_scale(unit)
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(BoundCurve.COLUMNS)
    for p in curve.points:
        rates = [p.ub1, p.ub2, p.lb_raw, p.lb, p.lb_approx]
        writer.writerow([_num(p.W)] + [_num(r * scale) for r in rates]
                        + [_num(p.alpha_star), _num(p.gamma_star)])


def read_curve_csv(path) -> BoundCurve:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != BoundCurve.COLUMNS:
            raise ValueError(f"{path}: unexpected CSV header {reader.fieldnames}")
        points = [
            BoundPoint(float(r["bandwidth_hz"]), float(r["ub1"]), float(r["ub2"]), float(r["lb_raw"]),
                       float(r["lb_approx"]), float(r["alpha_star"]), float(r["gamma_star"]))
            for r in reader
        ]
    return BoundCurve(points)


def _sidecar_path(out: Path) -> Path:
    return out.with_suffix(".json") if out.suffix != ".json" else out.with_name(out.name + ".config.json")


def run_sweep(cfg: RunConfig, out=None):
    """Sweep all bounds, write CSV + JSON sidecar (and SVG if ``cfg.plot``). Returns ``(curve, exit_code)``."""
    link = cfg.link_config()
    W = bandwidth_grid(cfg.W_min_hz, cfg.W_max_hz, cfg.points_per_decade)
    curve = sweep(link, W, coherent_term(cfg.constellation))
    out = Path(out or cfg.out or "bounds.csv")
    cfg.out = str(out)
    with open(out, "w", newline="") as fh:
        write_curve_csv(curve, fh, cfg.unit)
    _sidecar_path(out).write_text(cfg.to_json())
    if cfg.plot:
        emit_plot(curve, cfg.plot, cfg.unit, unit_scale(cfg.unit))
    for W_fail, message in curve.failures:
        print(f"numerical failure at W={W_fail:.6g} Hz: {message}", file=sys.stderr)
    return curve, (EXIT_NUMERIC if curve.failures else EXIT_OK)


def find_critical(cfg: RunConfig, bound=None) -> dict:
    """Critical bandwidth report; ``status`` is ``"ok"`` or ``"boundary"``."""
    bound = bound or cfg.bound
    link = cfg.link_config()
    mi = coherent_term(cfg.constellation)
    scale = unit_scale(cfg.unit)
    report = {"bound": bound, "unit": f"{cfg.unit}/s", "W_range_hz": [cfg.W_min_hz, cfg.W_max_hz]}
    try:
        W_star, value = critical_bandwidth(bound, link, (cfg.W_min_hz, cfg.W_max_hz),
                                           max(40, cfg.points_per_decade), mi=mi)
    except Boundary as exc:
        report.update(status="boundary", message=str(exc), edge=exc.edge,
                      bandwidth_hz=exc.bandwidth, value=exc.value * scale)
        return report
    point = evaluate_point(W_star, link, mi)
    report.update(
        status="ok",
        critical_bandwidth_hz=W_star,
        value=value * scale,
        bounds_at_critical={
            "ub1": point.ub1 * scale,
            "ub2": point.ub2 * scale,
            "lb_raw": point.lb_raw * scale,
            "lb": point.lb * scale,
            "lb_approx": point.lb_approx * scale,
            "alpha_star": point.alpha_star,
            "gamma_star": point.gamma_star,
        },
    )
    return report


def run_oracle(cfg: RunConfig, out=None):
    sf = cfg.scattering()
    grid = critical_lattice(sf, cfg.time_oversampling)
    report = szego_check(cfg.K_list, cfg.M, grid, sf, cfg.power(), cfg.gamma)
    out = Path(out or "szego.csv")
    with open(out, "w", newline="") as fh:
        report.to_csv(fh)
    return report


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="key = value or JSON configuration file")
    common.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                        help="override a configuration key (repeatable)")
    common.add_argument("--out", metavar="PATH", help="output file")
    common.add_argument("--unit", choices=("nat", "bit"), help="rate unit")
    common.add_argument("--seed", type=int, help="random seed (Monte-Carlo oracle)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="wssus-capacity", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("sweep", parents=[common], help="evaluate all bounds over a bandwidth sweep")
    p = sub.add_parser("critical", parents=[common], help="locate the capacity-maximizing bandwidth")
    p.add_argument("--bound", choices=("ub1", "ub2", "lb", "lb_approx"))
    p.add_argument("--json", action="store_true", help="print a JSON report")
    p = sub.add_parser("plot", parents=[common], help="render a sweep as SVG")
    p.add_argument("--csv", metavar="PATH", help="plot an existing sweep CSV instead of recomputing")
    sub.add_parser("oracle", parents=[common], help="finite log-det versus Szegő limit report")
    sub.add_parser("mi", parents=[common], help="coherent mutual information at snr (debugging)")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config, args.overrides)
        if args.unit:
            cfg.unit = args.unit
        if args.seed is not None:
            cfg.seed = args.seed
        cfg.validate()
    except (ConfigError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO

    try:
        return _dispatch(args, cfg)
    except SizeExceeded as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _NUMERIC_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


def _dispatch(args, cfg: RunConfig) -> int:
    if args.command == "sweep":
        _, code = run_sweep(cfg, args.out)
        return code

    if args.command == "critical":
        report = find_critical(cfg, args.bound)
        if args.json:
            text = json.dumps(report, indent=2, sort_keys=True)
        elif report["status"] == "boundary":
            text = f"{report['bound']}: {report['message']}"
        else:
            lines = [f"bound: {report['bound']}",
                     f"critical bandwidth: {report['critical_bandwidth_hz']:.6g} Hz",
                     f"value: {report['value']:.6g} {report['unit']}"]
            lines += [f"  {k} = {v:.6g}" for k, v in report["bounds_at_critical"].items()]
            text = "\n".join(lines)
        if args.out:
            Path(args.out).write_text(text + "\n")
        print(text)
        return EXIT_BOUNDARY if report["status"] == "boundary" else EXIT_OK

    if args.command == "plot":
        out = args.out or cfg.plot or "bounds.svg"
        code = EXIT_OK
        if args.csv:
            curve = read_curve_csv(args.csv)
            scale = 1.0
        else:
            link = cfg.link_config()
            curve = sweep(link, bandwidth_grid(cfg.W_min_hz, cfg.W_max_hz, cfg.points_per_decade),
                          coherent_term(cfg.constellation))
            scale = unit_scale(cfg.unit)
            code = EXIT_NUMERIC if curve.failures else EXIT_OK
        emit_plot(curve, out, cfg.unit, scale)
        return code

    if args.command == "oracle":
        report = run_oracle(cfg, args.out)
        sys.stdout.write(report.to_csv())
        return EXIT_OK

    if args.command == "mi":
        c = get_constellation(cfg.constellation)
        scale = unit_scale(cfg.unit)
        estimate, stderr = mc_mi_oracle(c, cfg.snr, cfg.mc_samples, cfg.seed)
        report = {
            "constellation": c.name,
            "snr": cfg.snr,
            "unit": f"{cfg.unit}/symbol",
            "awgn_quadrature": awgn_cm_mi(c, cfg.snr) * scale,
            "awgn_monte_carlo": estimate * scale,
            "awgn_monte_carlo_stderr": stderr * scale,
            "rayleigh_quadrature": rayleigh_cm_mi(c, cfg.snr) * scale,
            "seed": cfg.seed,
            "samples": cfg.mc_samples,
        }
        text = json.dumps(report, indent=2, sort_keys=True)
        if args.out:
            Path(args.out).write_text(text + "\n")
        print(text)
        return EXIT_OK

    raise AssertionError(args.command)


if __name__ == "__main__":
    sys.exit(main())
