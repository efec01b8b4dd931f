"""
Command-line entry point for the self-homodyne QPSK link simulator.

    shqpsk run <config.json|preset> [--out DIR] [--seed N] [--no-eq]
    shqpsk suite <configs...> [--jobs N] [--out DIR] [--seed N] [--no-eq]
    shqpsk presets list
    shqpsk presets export DIR

Exit codes: 0 success, 1 scenario error, 2 config error (or bad usage).
"""
import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

from config.presets import PRESET_DESCRIPTIONS, PRESETS
from config.settings import OUTPUT_DIR, SUITE_MAX_JOBS, TOOL_VERSION
from src.scenarios.batch_runner import SUMMARY_FILE, format_summary, run_suite
from src.scenarios.config_loader import load_config
from src.scenarios.runner import run_scenario
from src.utils.errors import ConfigInvalidError, IoFailureError, ScenarioError
from src.utils.logging_config import setup_logging

EXIT_OK = 0
EXIT_SCENARIO_ERROR = 1
EXIT_CONFIG_ERROR = 2


def _add_overrides(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", type=Path, default=OUTPUT_DIR, help="output root directory")
    parser.add_argument("--seed", type=int, default=None, help="override the master seed")
    parser.add_argument("--no-eq", action="store_true", help="force the equalizer off")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shqpsk", description="Self-homodyne QPSK link simulator")
    parser.add_argument("--version", action="version", version=f"%(prog)s {TOOL_VERSION}")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one scenario")
    run.add_argument("config", help="config JSON file or preset name")
    _add_overrides(run)

    suite = sub.add_parser("suite", help="run several scenarios and summarize")
    suite.add_argument("configs", nargs="+", help="config JSON files or preset names")
    suite.add_argument("--jobs", type=int, default=SUITE_MAX_JOBS, help="concurrent scenarios")
    _add_overrides(suite)

    presets = sub.add_parser("presets", help="bundled scenarios")
    presets_sub = presets.add_subparsers(dest="presets_command", required=True)
    presets_sub.add_parser("list", help="list bundled presets")
    export = presets_sub.add_parser("export", help="write presets as JSON config files")
    export.add_argument("directory", type=Path)
    return parser


def cmd_run(args, logger) -> int:
    try:
        cfg = load_config(args.config, seed=args.seed, no_eq=args.no_eq)
    except ConfigInvalidError as e:
        logger.error(f"Config error: {e}")
        return EXIT_CONFIG_ERROR
    try:
        report = run_scenario(cfg, args.out)
    except ScenarioError as e:
        logger.error(str(e))
        return EXIT_SCENARIO_ERROR
    ber = report.ber
    print(f"{report.scenario}: BER {ber.ber:.3e} ({ber.bit_errors}/{ber.bits_compared} bits), "
          f"EVM {report.evm_percent:.2f}%")
    if ber.bit_errors == 0:
        print(f"  zero errors: BER < {ber.upper_bound:.1e}")
    print(f"  outputs in {report.output_dir}")
    return EXIT_OK


def cmd_suite(args, logger) -> int:
    try:
        result = run_suite(args.configs, args.jobs, args.out, seed=args.seed, no_eq=args.no_eq)
    except IoFailureError as e:
        logger.error(str(e))
        return EXIT_SCENARIO_ERROR
    print(format_summary(result.summary))
    print(f"\nsummary written to {Path(args.out) / SUMMARY_FILE}")
    if result.ok:
        return EXIT_OK
    if result.config_errors:
        return EXIT_CONFIG_ERROR
    return EXIT_SCENARIO_ERROR


def cmd_presets(args, logger) -> int:
    if args.presets_command == "list":
        for name in PRESETS:
            print(f"{name:<10} {PRESET_DESCRIPTIONS.get(name, '')}")
        return EXIT_OK

    directory: Path = args.directory
    try:
        directory.mkdir(parents=True, exist_ok=True)
        for name, document in PRESETS.items():
            path = directory / f"{name}.json"
            with open(path, "w", encoding="utf-8", newline="\n") as f:
                f.write(json.dumps(document, indent=2, sort_keys=True) + "\n")
            print(path)
    except OSError as e:
        logger.error(f"Failed to export presets to {directory}: {e}")
        return EXIT_SCENARIO_ERROR
    return EXIT_OK


COMMANDS = {"run": cmd_run, "suite": cmd_suite, "presets": cmd_presets}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logger = setup_logging(level=args.log_level)
    return COMMANDS[args.command](args, logger)


if __name__ == "__main__":
    sys.exit(main())
