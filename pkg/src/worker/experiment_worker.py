import argparse
import sys
from typing import Optional, Sequence

from pydantic import ValidationError

from src.bootstrap.errors import LabError
from src.bootstrap.logger import enable_debug_logging, get_logger, set_log_level
from src.bootstrap.settings import get_settings
from src.worker.config import ExperimentConfig, apply_overrides, load_config
from src.worker.records import RunRecord
from src.worker.strategies import STRATEGY_REGISTRY

logger = get_logger("worker")

EXIT_OK = 0
EXIT_CONFIG = 2


def run_experiment(command: str, config: ExperimentConfig) -> RunRecord:
    """Run one subcommand end to end; shared by the CLI and the API."""
    if command not in STRATEGY_REGISTRY:
        raise KeyError(f"unknown experiment '{command}', expected one of {sorted(STRATEGY_REGISTRY)}")
    strategy = STRATEGY_REGISTRY[command](config)
    return strategy.run()


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, default=None, help="Experiment config JSON file")
    common.add_argument("--gamma", type=float, default=None, help="Coupling gamma in [0, 2)")
    common.add_argument("--n", type=int, default=None, help="Grid resolution")
    common.add_argument("--seed", type=int, default=None, help="Base seed")
    common.add_argument("--replicas", type=int, default=None, help="Independent field replicas")
    common.add_argument("--out", type=str, default=None, help="Output directory (default LQG_OUTPUT_DIR)")
    common.add_argument("--workers", type=int, default=None, help="Replica worker pool size")
    common.add_argument("--strict", action="store_true", help="Exit 4 when any diagnostic is flagged")
    common.add_argument("--verbose", action="store_true", help="Debug logging")

    parser = argparse.ArgumentParser(prog="lqg-lab", description="Liouville quantum gravity spectral experiments")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in STRATEGY_REGISTRY:
        sub = subparsers.add_parser(command, parents=[common])
        if command in ("spacing", "que"):
            sub.add_argument("--snapshot", type=str, default=None, help="Stored LQGF field snapshot")
        if command == "spacing":
            sub.add_argument("--spectrum", type=str, default=None, help="Stored spectrum CSV")
        if command == "kpz":
            sub.add_argument("--x", type=float, default=None, help="Euclidean scaling exponent in (0, 1]")
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    overrides = {
        "gamma": args.gamma,
        "n": args.n,
        "base_seed": args.seed,
        "replicas": args.replicas,
        "output_dir": args.out,
        "workers": args.workers,
        "strict": args.strict or None,
        "kpz_x": getattr(args, "x", None),
        "spectrum_path": getattr(args, "spectrum", None),
        "snapshot_path": getattr(args, "snapshot", None),
    }
    return apply_overrides(load_config(args.config), overrides)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    set_log_level(get_settings().log_level)
    if args.verbose:
        enable_debug_logging()

    try:
        config = config_from_args(args)
        record = run_experiment(args.command, config)
    except ValidationError as e:
        logger.error(f"[JOB] {args.command} rejected: invalid configuration\n{e}")
        return EXIT_CONFIG
    except LabError as e:
        logger.error(f"[JOB] {args.command} failed ({type(e).__name__}): {e}")
        return e.exit_code
    except FileNotFoundError as e:
        logger.error(f"[JOB] {args.command} failed: {e}")
        return EXIT_CONFIG

    logger.info(f"[JOB] {args.command} wrote {len(record.outputs)} file(s), {len(record.flags)} flag(s)")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
