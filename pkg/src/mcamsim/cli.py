"""Command-line front end tying the simulator modules together.

Exit codes: 0 success, 1 simulation failure, 2 configuration error,
3 acceptance-check failure (with --check).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from pathlib import Path

from .cam import CamArray, SearchReport, Topology
from .config import (
    CONFIG_ENV_VAR,
    ConfigError,
    RunConfig,
    load_config,
    load_default_or_env,
    save_config,
)
from .datasets import DATASET_FORMATS, load_dataset
from .energy import (
    CalibrationError,
    CalibrationTargets,
    calibrate,
    energy_per_bit,
    published_targets,
    search_cost,
    sweep,
    sweep_trend_violations,
    write_sweep_csv,
)
from .hdc import SIMILARITY_MODES, run_benchmark
from .montecarlo import SearchScenario, run_monte_carlo

EXIT_OK = 0
EXIT_SIMULATION = 1
EXIT_CONFIG = 2
EXIT_CHECK = 3


def _parse_symbols(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise ConfigError(f"expected comma-separated integers, got {text!r}") from None


def _parse_geometry(text: str) -> list[int]:
    """Geometry axis: 'a:b' doubles from a to b, 'a,b,c' lists, 'a' is one."""
    try:
        if ":" in text:
            lo_s, hi_s = text.split(":", 1)
            lo, hi = int(lo_s), int(hi_s)
            if lo < 1 or hi < lo:
                raise ValueError
            values = []
            v = lo
            while v <= hi:
                values.append(v)
                v *= 2
            return values
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise ConfigError(
            f"expected 'lo:hi' or comma-separated integers, got {text!r}"
        ) from None


def _emit_json(payload: dict, path: str) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _load_cfg(args: argparse.Namespace) -> RunConfig:
    if args.config:
        return load_config(args.config)
    return load_default_or_env()


def _report_payload(report: SearchReport) -> dict:
    return {
        "match": report.match,
        "match_count": report.match_count,
        "precharge_events": report.precharge_events,
        "discharge_events": report.discharge_events,
        "conducting_cells": report.conducting_cells,
        "energy_j": report.energy_j,
        "latency_s": report.latency_s,
    }


def cmd_search(args: argparse.Namespace) -> int:
    cfg = _load_cfg(args)
    if args.seed is not None:
        cfg.run.seed = args.seed
    if args.bits is not None:
        cfg.ladder.bits = args.bits
    if args.topology is not None:
        cfg.array.topology = args.topology
    word = _parse_symbols(args.word)
    query = _parse_symbols(args.query)
    if len(word) != len(query):
        raise ConfigError(f"word has {len(word)} symbols but query has {len(query)}")
    ladder = cfg.build_ladder()
    topology = cfg.topology()
    caps, timing = cfg.capacitance_set(), cfg.timing_set()
    try:
        array = CamArray.from_contents(topology, ladder, [word])
        report = array.search(query)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    report.energy_j, report.latency_s = search_cost(
        topology, report, len(word), caps, timing
    )
    e_bit = energy_per_bit(report.energy_j, len(word), ladder.bits) * 1e15
    verdict = "match" if report.match[0] else "mismatch"
    print(
        f"search topology={topology.value} bits={ladder.bits} cells={len(word)}: "
        f"{verdict} (match_count={report.match_count[0]}/{len(word)})"
    )
    print(
        f"  events: precharge={report.precharge_events} "
        f"discharge={report.discharge_events} conducting={report.conducting_cells}"
    )
    print(
        f"  cost: {e_bit:.6g} fJ/bit, {report.latency_s * 1e12:.6g} ps"
    )
    if args.emit_csv:
        with open(args.emit_csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                "topology,bits,cells,match,match_count,precharge_events,"
                "discharge_events,conducting_cells,energy_fj_per_bit,latency_ps".split(",")
            )
            writer.writerow(
                [
                    topology.value,
                    ladder.bits,
                    len(word),
                    int(report.match[0]),
                    report.match_count[0],
                    report.precharge_events,
                    report.discharge_events,
                    report.conducting_cells,
                    f"{e_bit:.9g}",
                    f"{report.latency_s * 1e12:.9g}",
                ]
            )
    if args.emit_json:
        payload = _report_payload(report)
        payload.update(
            topology=topology.value, bits=ladder.bits, cells=len(word),
            energy_fj_per_bit=e_bit, latency_ps=report.latency_s * 1e12,
        )
        _emit_json(payload, args.emit_json)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _load_cfg(args)
    if args.seed is not None:
        cfg.run.seed = args.seed
    if args.bits is not None:
        cfg.ladder.bits = args.bits
    if args.topology is not None:
        cfg.array.topology = args.topology
    if args.rows is not None:
        cfg.sweep.rows = args.rows
    if args.cols is not None:
        cfg.sweep.cols = args.cols
    if args.queries is not None:
        cfg.sweep.queries = args.queries
    rows_list = _parse_geometry(cfg.sweep.rows)
    cols_list = _parse_geometry(cfg.sweep.cols)
    if not rows_list or not cols_list:
        raise ConfigError("sweep axes must be non-empty")
    topology = cfg.topology()
    caps, timing = cfg.capacitance_set(), cfg.timing_set()
    if cfg.sweep.queries < 1:
        raise ConfigError(f"queries must be >= 1, got {cfg.sweep.queries}")
    points = sweep(
        topology,
        rows_list,
        cols_list,
        cfg.ladder.bits,
        caps,
        timing,
        queries=cfg.sweep.queries,
        seed=cfg.run.seed,
        ladder=cfg.build_ladder(),
    )
    for p in points:
        print(
            f"sweep {p.topology.value} rows={p.rows} cells={p.cols}: "
            f"{p.energy_fj_per_bit:.6g} fJ/bit, {p.latency_ps:.6g} ps"
        )
    if args.emit_csv:
        write_sweep_csv(points, args.emit_csv)
    if args.emit_json:
        _emit_json(
            {
                "topology": topology.value,
                "points": [
                    {
                        "rows": p.rows,
                        "cells": p.cols,
                        "bits": p.bits,
                        "energy_fj_per_bit": p.energy_fj_per_bit,
                        "latency_ps": p.latency_ps,
                        "precharge_events": p.precharge_events,
                        "sl_events": p.sl_events,
                    }
                    for p in points
                ],
            },
            args.emit_json,
        )
    if args.check:
        violations = sweep_trend_violations(points)
        for message in violations:
            print(f"CHECK FAIL: {message}", file=sys.stderr)
        if violations:
            return EXIT_CHECK
        print("sweep trend checks passed")
    return EXIT_OK


def cmd_montecarlo(args: argparse.Namespace) -> int:
    cfg = _load_cfg(args)
    if args.seed is not None:
        cfg.variation.seed = args.seed
    if args.bits is not None:
        cfg.ladder.bits = args.bits
    if args.sigma is not None:
        cfg.variation.sigma_vth = args.sigma
    if args.trials is not None:
        cfg.montecarlo.trials = args.trials
    if args.cols is not None:
        cfg.array.cols = args.cols
    ladder = cfg.build_ladder()
    var = cfg.variation_model()
    if cfg.montecarlo.trials < 1:
        raise ConfigError(f"trials must be >= 1, got {cfg.montecarlo.trials}")
    try:
        if cfg.montecarlo.stored:
            stored = tuple(_parse_symbols(cfg.montecarlo.stored))
            query = tuple(_parse_symbols(cfg.montecarlo.query))
            expect = cfg.montecarlo.expect
            expect_match = stored == query if expect == "auto" else expect == "match"
            scenario = SearchScenario(stored, query, expect_match)
        else:
            scenario = SearchScenario.worst_case(cfg.array.cols)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    try:
        summary = run_monte_carlo(ladder, scenario, var, cfg.montecarlo.trials)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    half_spacing = ladder.spacing / 2
    print(
        f"montecarlo sigma={var.sigma_vth} V, {summary.trials} trials, "
        f"cells={len(scenario.stored)}, bits={ladder.bits}"
    )
    print(
        f"  errors={summary.errors} (rate {summary.error_rate:.4g}), "
        f"min margin {summary.min_margin:.6g} V "
        f"(half level spacing {half_spacing:.6g} V)"
    )
    if args.emit_csv:
        with open(args.emit_csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["trial", "margin_v"])
            for t, margin in enumerate(summary.margins):
                writer.writerow([t, f"{margin:.9g}"])
    if args.emit_json:
        _emit_json(
            {
                "sigma_vth": summary.sigma_vth,
                "seed": summary.seed,
                "trials": summary.trials,
                "errors": summary.errors,
                "error_rate": summary.error_rate,
                "min_margin_v": summary.min_margin,
                "half_level_spacing_v": half_spacing,
            },
            args.emit_json,
        )
    if args.check and summary.errors > 0:
        print(f"CHECK FAIL: {summary.errors} decision errors", file=sys.stderr)
        return EXIT_CHECK
    return EXIT_OK


def cmd_calibrate(args: argparse.Namespace) -> int:
    cfg = _load_cfg(args)
    targets = published_targets()
    try:
        caps, timing = calibrate(targets)
    except CalibrationError as exc:
        print(f"calibration failed: {exc}", file=sys.stderr)
        return EXIT_SIMULATION
    print("calibrated constants (reference point: steady one-mismatch search):")
    for name, value in dataclasses.asdict(caps).items():
        print(f"  {name} = {value:.6g} F")
    units = {"r_discharge": "ohm", "e_sl_per_on_cell": "J", "v_dd": "V", "v_ref": "V"}
    for name, value in dataclasses.asdict(timing).items():
        print(f"  {name} = {value:.6g} {units.get(name, 's')}")

    achieved = _endpoint_errors(targets, caps, timing)
    for label, (got, want, rel) in achieved.items():
        print(f"  {label}: {got:.6g} vs target {want:.6g} (rel err {rel:.2e})")
    if args.emit_csv:
        from .reference import PUBLISHED_DESIGNS

        with open(args.emit_csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                "label,device,cell_structure,cam_type,energy_fj_per_bit,"
                "latency_ps,area_um2_per_bit,node_nm".split(",")
            )
            for row in PUBLISHED_DESIGNS:
                writer.writerow(
                    [
                        row.label,
                        row.device,
                        row.cell_structure,
                        row.cam_type,
                        "" if row.energy_fj_per_bit is None else f"{row.energy_fj_per_bit:.9g}",
                        "" if row.latency_ps is None else f"{row.latency_ps:.9g}",
                        "" if row.area_um2_per_bit is None else f"{row.area_um2_per_bit:.9g}",
                        row.node_nm,
                    ]
                )
    if args.emit_json:
        _emit_json(
            {
                "capacitance": dataclasses.asdict(caps),
                "timing": dataclasses.asdict(timing),
                "targets": dataclasses.asdict(targets),
                "relative_errors": {k: v[2] for k, v in achieved.items()},
            },
            args.emit_json,
        )
    if args.emit_config:
        out = cfg if args.config else RunConfig()
        out.capacitance = type(out.capacitance)(**dataclasses.asdict(caps))
        out.timing = type(out.timing)(**dataclasses.asdict(timing))
        save_config(out, args.emit_config)
    if args.check:
        worst = max(rel for _, _, rel in achieved.values())
        if worst > 0.05:
            print(f"CHECK FAIL: worst relative error {worst:.3g} > 5%", file=sys.stderr)
            return EXIT_CHECK
        print("calibration endpoint checks passed")
    return EXIT_OK


def _endpoint_errors(targets, caps, timing) -> dict[str, tuple[float, float, float]]:
    """Reproduce each endpoint through a real steady-state search."""
    from .device import build_ladder
    from .device import DEFAULT_VTH_MAX, DEFAULT_VTH_MIN

    n, bits = targets.cells_per_word, targets.bits
    ladder = build_ladder(bits, DEFAULT_VTH_MIN, DEFAULT_VTH_MAX)
    word = [0] * n
    query = [1] + [0] * (n - 1)
    results = {}
    for topology, e_target, l_target in (
        (Topology.NOR_1T, targets.nor_energy_per_bit, targets.nor_latency),
        (Topology.NAND_2T, targets.nand_energy_per_bit, targets.nand_latency),
    ):
        array = CamArray.from_contents(topology, ladder, [word])
        report = array.search(query)
        energy, latency = search_cost(topology, report, n, caps, timing)
        e_bit = energy_per_bit(energy, n, bits)
        results[f"{topology.value}_energy_per_bit"] = (
            e_bit, e_target, abs(e_bit - e_target) / e_target,
        )
        results[f"{topology.value}_latency"] = (
            latency, l_target, abs(latency - l_target) / l_target,
        )
    return results


def cmd_hdc(args: argparse.Namespace) -> int:
    cfg = _load_cfg(args)
    if args.seed is not None:
        cfg.run.seed = args.seed
    if args.dataset is not None:
        cfg.hdc.dataset = args.dataset
    if args.data_dir is not None:
        cfg.hdc.data_dir = args.data_dir
    if args.bits is not None:
        cfg.hdc.bits = args.bits
    if args.dim is not None:
        cfg.hdc.hyper_dim = args.dim
    if args.similarity is not None:
        cfg.hdc.similarity = args.similarity
    if args.epochs is not None:
        cfg.hdc.epochs = args.epochs
    cfg.validate()
    try:
        data = load_dataset(cfg.hdc.data_dir, cfg.hdc.dataset)
    except (FileNotFoundError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    caps, timing = cfg.capacitance_set(), cfg.timing_set()
    result = run_benchmark(
        data,
        bits=cfg.hdc.bits,
        hyper_dim=cfg.hdc.hyper_dim,
        similarity=cfg.hdc.similarity,
        seed=cfg.run.seed,
        learning_rate=cfg.hdc.learning_rate,
        epochs=cfg.hdc.epochs,
        caps=caps,
        timing=timing,
    )
    print(
        f"hdc {result.dataset} similarity={result.similarity} bits={result.bits} "
        f"D={result.hyper_dim}: accuracy {result.accuracy:.4f} "
        f"({result.queries} queries, {result.epochs_run} epochs)"
    )
    if result.energy_fj_per_inference is not None:
        print(
            f"  search cost: {result.energy_fj_per_inference:.6g} fJ/inference, "
            f"{result.latency_s_per_search * 1e12:.6g} ps/search"
        )
    if args.emit_csv:
        with open(args.emit_csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                "dataset,similarity,bits,hyper_dim,accuracy,"
                "energy_fj_per_inference,latency_ps".split(",")
            )
            writer.writerow(
                [
                    result.dataset,
                    result.similarity,
                    result.bits,
                    result.hyper_dim,
                    f"{result.accuracy:.9g}",
                    ""
                    if result.energy_fj_per_inference is None
                    else f"{result.energy_fj_per_inference:.9g}",
                    ""
                    if result.latency_s_per_search is None
                    else f"{result.latency_s_per_search * 1e12:.9g}",
                ]
            )
    if args.emit_json:
        _emit_json(
            {
                "dataset": result.dataset,
                "similarity": result.similarity,
                "bits": result.bits,
                "hyper_dim": result.hyper_dim,
                "accuracy": result.accuracy,
                "queries": result.queries,
                "epochs_run": result.epochs_run,
                "energy_fj_per_inference": result.energy_fj_per_inference,
                "latency_ps_per_search": None
                if result.latency_s_per_search is None
                else result.latency_s_per_search * 1e12,
            },
            args.emit_json,
        )
    if args.check:
        if args.min_accuracy is None:
            raise ConfigError("--check for hdc requires --min-accuracy")
        if result.accuracy < args.min_accuracy:
            print(
                f"CHECK FAIL: accuracy {result.accuracy:.4f} < {args.min_accuracy}",
                file=sys.stderr,
            )
            return EXIT_CHECK
        print("hdc accuracy check passed")
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--config",
        help=f"INI config file (default: ${CONFIG_ENV_VAR} or built-in defaults)",
    )
    parser.add_argument("--seed", type=int, help="override the run seed")
    parser.add_argument("--emit-csv", metavar="PATH", help="write a CSV artifact")
    parser.add_argument("--emit-json", metavar="PATH", help="write a JSON summary")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mcamsim",
        description="Behavioral multi-bit CAM simulator and benchmark harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("search", help="search one stored word")
    _add_common(p)
    p.add_argument("--topology", choices=["nor", "nand"])
    p.add_argument("--bits", type=int)
    p.add_argument("--word", required=True, help="stored symbols, e.g. 0,1,7")
    p.add_argument("--query", required=True, help="query symbols, e.g. 0,1,7")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("sweep", help="geometry sweep of search energy/latency")
    _add_common(p)
    p.add_argument("--topology", choices=["nor", "nand"])
    p.add_argument("--bits", type=int)
    p.add_argument("--rows", help="row axis, e.g. 16:128 or 16,32,64")
    p.add_argument("--cols", help="cells-per-word axis")
    p.add_argument("--queries", type=int, help="random searches per point")
    p.add_argument("--check", action="store_true", help="verify scaling trends")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("montecarlo", help="variation robustness trials")
    _add_common(p)
    p.add_argument("--bits", type=int)
    p.add_argument("--sigma", type=float, help="threshold-voltage sigma in volts")
    p.add_argument("--trials", type=int)
    p.add_argument("--cols", type=int, help="cells per word in the scenario")
    p.add_argument("--check", action="store_true", help="fail on any decision error")
    p.set_defaults(func=cmd_montecarlo)

    p = sub.add_parser("calibrate", help="fit cost constants to published endpoints")
    _add_common(p)
    p.add_argument("--emit-config", metavar="PATH", help="write constants as a config file")
    p.add_argument("--check", action="store_true", help="verify endpoints within 5%%")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("hdc", help="hyperdimensional classification benchmark")
    _add_common(p)
    p.add_argument("--dataset", choices=list(DATASET_FORMATS))
    p.add_argument("--data-dir", help="dataset directory")
    p.add_argument("--bits", type=int)
    p.add_argument("--dim", type=int, help="hypervector dimensionality D")
    p.add_argument("--similarity", choices=list(SIMILARITY_MODES))
    p.add_argument("--epochs", type=int)
    p.add_argument("--check", action="store_true", help="fail below --min-accuracy")
    p.add_argument("--min-accuracy", type=float)
    p.set_defaults(func=cmd_hdc)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"simulation error: {exc}", file=sys.stderr)
        return EXIT_SIMULATION


if __name__ == "__main__":
    sys.exit(main())
