"""Command-line entry point: ``hardylab run|list|all``."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .experiments import EXPERIMENTS, ExperimentConfig, ExperimentResult, load_config, run_experiment


def write_result(result: ExperimentResult, out_dir: Path) -> tuple[Path, Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    name = result.record.experiment
    csv_path = out_dir / f"{name}.csv"
    fields: list[str] = []
    for row in result.rows:
        fields.extend(k for k in row if k not in fields)
    with open(csv_path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        writer.writerows(result.rows)
    json_path = out_dir / f"{name}.json"
    json_path.write_text(json.dumps(result.record.to_dict(), indent=2, default=str) + "\n")
    return csv_path, json_path


def _print_record(result: ExperimentResult) -> None:
    rec = result.record
    print(f"{rec.experiment}: {'PASS' if rec.passed else 'FAIL'} ({rec.wall_clock:.2f} s)")
    for name, ok in rec.checks.items():
        print(f"  [{'pass' if ok else 'FAIL'}] {name}")


def _run_one(cfg: ExperimentConfig, out: Path) -> bool:
    result = run_experiment(cfg)
    write_result(result, out)
    _print_record(result)
    return result.record.passed


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="hardylab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one experiment")
    run.add_argument("experiment", choices=sorted(EXPERIMENTS))
    run.add_argument("--config", type=Path, help="JSON document matching ExperimentConfig")
    run.add_argument("--out", type=Path, help="output directory (default: results)")
    run.add_argument("--seed", type=int)

    sub.add_parser("list", help="list experiments")

    every = sub.add_parser("all", help="run every experiment with its defaults")
    every.add_argument("--out", type=Path, default=Path("results"))
    every.add_argument("--seed", type=int, default=0)

    args = parser.parse_args(argv)

    if args.command == "list":
        for name, exp in EXPERIMENTS.items():
            print(f"{name:16s} {exp.summary}")
        return 0

    if args.command == "run":
        cfg = load_config(args.config) if args.config else ExperimentConfig(args.experiment)
        if cfg.experiment != args.experiment:
            parser.error(f"config is for {cfg.experiment!r}, not {args.experiment!r}")
        if args.seed is not None:
            cfg.seed = args.seed
        out = args.out or Path(cfg.out or "results")
        return 0 if _run_one(cfg, out) else 1

    ok = True
    summary = {}
    for name in EXPERIMENTS:
        result = run_experiment(ExperimentConfig(name, seed=args.seed))
        write_result(result, args.out)
        _print_record(result)
        summary[name] = result.record.passed
        ok &= result.record.passed
    (args.out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
