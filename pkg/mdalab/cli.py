# Licensed under the MIT License.

"""mdalab command line: simulate, impute, analyze and tipping."""

import argparse
import logging
import os
import sys

import wandb
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from mdalab import __version__
from mdalab.config import env_overrides
from mdalab.orchestrator import Orchestrator
from mdalab.paths import config
from mdalab.run_config import OutputFormat, load_run_config
from mdalab.utils.status import ConfigurationError, ExitCode, MdaLabError

logger = logging.getLogger("mdalab")

console = Console()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mdalab", description="Multiple imputation by monotone data augmentation")
    parser.add_argument("--version", action="version", version=f"mdalab {__version__}")
    parser.add_argument("--log-level", default=config.get("log_level", "INFO"), help="logging level")
    commands = parser.add_subparsers(dest="command", required=True)

    simulate = commands.add_parser("simulate", help="generate a simulated trial")
    simulate.add_argument("--scenario", type=int, required=True, help="scenario id (1 or 2)")
    simulate.add_argument("--n", type=int, default=300, help="number of subjects (even)")
    simulate.add_argument("--seed", type=int, default=None)
    simulate.add_argument("--mechanism", default="mar", choices=["mar", "copy_reference"], help="full-data truth")
    simulate.add_argument("--out", default=None, help="output directory")

    for name, text in (("impute", "write completed datasets"), ("tipping", "run a tipping-point grid")):
        sub = commands.add_parser(name, help=text)
        sub.add_argument("--config", required=True, help="JSON or YAML run configuration")
        sub.add_argument("--seed", type=int, default=None)
        sub.add_argument("--out", default=None, help="output directory")
        sub.add_argument("--workers", type=int, default=None, help="worker processes (default: all cores)")

    analyze = commands.add_parser("analyze", help="pool an analysis over imputation files")
    analyze.add_argument("imputations", help="directory holding imp_*.csv files")
    analyze.add_argument("--config", required=True, help="run configuration with an analysis section")
    analyze.add_argument(
        "--format", default=None, choices=[f.value for f in OutputFormat], help="result format (default: output.format)"
    )
    analyze.add_argument("--out", default=None, help="output directory (default: the imputation directory)")
    return parser


def setup_logging(level: str) -> None:
    logging.basicConfig(
        level=level.upper(),
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=Console(stderr=True), rich_tracebacks=False)],
        force=True,
    )


def _outputs_table(title: str, paths) -> Table:
    table = Table(title=title)
    table.add_column("output")
    for path in paths:
        table.add_row(str(path))
    return table


def run(args) -> None:
    if args.command == "simulate":
        env = env_overrides()
        seed = args.seed if args.seed is not None else env.get("seed", 0)
        out = args.out or env.get("out") or "."
        path = Orchestrator(out_dir=out).simulate(args.scenario, args.n, seed, args.mechanism)
        console.print(_outputs_table("simulate", [path]))
        return

    if args.command == "analyze":
        cfg = load_run_config(args.config)
        if cfg.analysis is None:
            raise ConfigurationError("an analysis section is required", field="analysis")
        fmt = OutputFormat(args.format) if args.format else cfg.output.format
        Orchestrator(out_dir=args.out).analyze(args.imputations, cfg.analysis, fmt)
        return

    cfg = load_run_config(args.config, seed=args.seed, out=args.out)
    orchestrator = Orchestrator(workers=args.workers)
    if args.command == "impute":
        console.print(_outputs_table("impute", orchestrator.impute(cfg)))
    else:
        grid = orchestrator.tipping(cfg)
        logger.info("Tipping grid with %d cells written", len(grid.cells))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level)
    if os.getenv("USE_WANDB", "false").lower() == "true":
        wandb.init(project="mdalab", config={"command": args.command})
    try:
        run(args)
    except MdaLabError as exc:
        logger.error("%s", exc)
        return int(exc.exit_code)
    except FileNotFoundError as exc:
        logger.error("%s", exc)
        return int(ExitCode.DATA_ERROR)
    except KeyboardInterrupt:
        logger.error("Interrupted")
        return 130
    return int(ExitCode.SUCCESS)


if __name__ == "__main__":
    sys.exit(main())
