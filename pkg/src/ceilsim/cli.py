"""Command-line interface.

Exit codes: 0 success, 2 validation error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import Any

from .config import ConfigError, PRESETS, load_config, preset_names, validate_config
from .harness import run_scenario, sweep


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ceilsim",
        description="Agent-based simulator of gender disparity dynamics in a "
        "corporate hierarchy.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_source(p: argparse.ArgumentParser, preset_required: bool = False):
        if preset_required:
            p.add_argument("--preset", required=True, choices=preset_names())
        else:
            group = p.add_mutually_exclusive_group(required=True)
            group.add_argument("--preset", choices=preset_names())
            group.add_argument("--config", help="path to a JSON config file")

    def add_run_controls(p: argparse.ArgumentParser):
        p.add_argument("--runs", type=int, default=None, help="number of replications")
        p.add_argument("--seed", type=int, default=None, help="master seed")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--parallelism", type=int, default=None,
                       help="worker processes (default: available cores)")

    run_p = sub.add_parser("run", help="run one scenario and write outputs")
    add_source(run_p)
    add_run_controls(run_p)

    sweep_p = sub.add_parser("sweep", help="run one scenario per parameter value")
    add_source(sweep_p)
    sweep_p.add_argument("--param", required=True, help="dotted parameter key, e.g. norms.w")
    sweep_p.add_argument(
        "--values", required=True,
        help="comma-separated values; use ';' between JSON list values, "
        "e.g. \"[168,240];[168,312]\"",
    )
    add_run_controls(sweep_p)

    presets_p = sub.add_parser("presets", help="preset catalog")
    presets_p.add_argument("action", choices=["list"])

    val_p = sub.add_parser("validate", help="validate a config file")
    val_p.add_argument("--config", required=True)

    return parser


def _parse_values(text: str) -> list[Any]:
    sep = ";" if ";" in text else ","
    values = []
    for token in text.split(sep):
        token = token.strip()
        if not token:
            continue
        try:
            values.append(json.loads(token))
        except json.JSONDecodeError:
            values.append(token)
    if not values:
        raise ConfigError("--values produced an empty list")
    return values


def _resolve_config(args: argparse.Namespace):
    config = load_config(args.preset if args.preset else args.config)
    run = config.run
    if getattr(args, "runs", None) is not None:
        run = replace(run, n_runs=args.runs)
    if getattr(args, "seed", None) is not None:
        run = replace(run, master_seed=args.seed)
    if getattr(args, "out", None) is not None:
        run = replace(run, out_dir=args.out)
    return validate_config(replace(config, run=run))


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "presets":
            for name in preset_names():
                overrides = PRESETS[name]
                detail = ", ".join(f"{k}={v}" for k, v in sorted(overrides.items()))
                print(f"{name}: {detail or 'all defaults'}")
            return 0
        if args.command == "validate":
            load_config(args.config)
            print(f"{args.config}: OK")
            return 0
        if args.command == "run":
            config = _resolve_config(args)
            files = run_scenario(config, config.run.out_dir, parallelism=args.parallelism)
            print(f"wrote {len(files)} files to {Path(config.run.out_dir)}")
            return 0
        if args.command == "sweep":
            config = _resolve_config(args)
            values = _parse_values(args.values)
            files = sweep(config, args.param, values, config.run.out_dir,
                          parallelism=args.parallelism)
            print(f"wrote {len(files)} files to {Path(config.run.out_dir)}")
            return 0
        raise AssertionError(f"unhandled command {args.command!r}")
    except ConfigError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # noqa: BLE001 - CLI boundary
        print(f"error: {e}", file=sys.stderr)
        return 3


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
