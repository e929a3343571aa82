"""Command-line interface for the distributed-VQC experiment pipeline.

Subcommands mirror the pipeline stages:

    gen-data      materialize dataset CSVs
    train         train one (dataset, architecture, seed) cell
    test          score one trained cell (ideal and distributed-noisy)
    transform     rewrite a monolithic circuit file onto the QPU grid
    count-remote  count QPU-crossing CX gates in a circuit file
    report        aggregate records into curves, tables, and summary.json
    run-all       gen-data + full grid + report

All stages are deterministic for a fixed config; `--fast` caps shot
counts for quick runs, `--workers` parallelizes the run-all grid.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .ansatz import ArchKind
from .circuit import dump_text, parse_text
from .config import ConfigError, ExperimentConfig, load_config
from .dqc import count_remote, transform
from .engine import SimulationError
from .experiment import (
    ExperimentError,
    prepare_datasets,
    report,
    run_all,
    run_test,
    run_train,
)


def _load_config(args: argparse.Namespace) -> ExperimentConfig:
    config = load_config(args.config) if args.config else ExperimentConfig()
    if getattr(args, "fast", False):
        config = config.fast()
    return config


def _out_dir(args: argparse.Namespace, config: ExperimentConfig) -> str:
    return args.out if args.out else config.output_dir


def _data_seed_for(config: ExperimentConfig, preset_id: int) -> int:
    for pid, data_seed in config.datasets:
        if pid == preset_id:
            return data_seed
    raise ConfigError(
        f"dataset preset {preset_id} is not in the config "
        f"(configured: {[p for p, _ in config.datasets]})"
    )


def _read_circuit(path: str):
    p = Path(path)
    if not p.exists():
        raise ExperimentError(f"circuit file not found: {p}")
    return parse_text(p.read_text())


def cmd_gen_data(args: argparse.Namespace) -> int:
    config = _load_config(args)
    for path in prepare_datasets(config, _out_dir(args, config)):
        print(f"wrote {path}")
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    config = _load_config(args)
    data_seed = _data_seed_for(config, args.dataset)
    cell = run_train(config, _out_dir(args, config), args.dataset, data_seed,
                     args.arch, args.seed)
    print(f"wrote {cell / 'history.csv'}")
    print(f"wrote {cell / 'theta.json'}")
    return 0


def cmd_test(args: argparse.Namespace) -> int:
    config = _load_config(args)
    data_seed = _data_seed_for(config, args.dataset)
    record = run_test(config, _out_dir(args, config), args.dataset, data_seed,
                      args.arch, args.seed)
    print(f"monolithic_ideal={record['monolithic_ideal']!r} "
          f"distributed_noisy={record['distributed_noisy']!r} "
          f"remote_cx_count={record['remote_cx_count']}")
    return 0


def cmd_transform(args: argparse.Namespace) -> int:
    config = _load_config(args)
    text = dump_text(transform(_read_circuit(args.circuit), config.topology))
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_count_remote(args: argparse.Namespace) -> int:
    config = _load_config(args)
    print(count_remote(_read_circuit(args.circuit), config.topology))
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    config = _load_config(args)
    print(f"wrote {report(_out_dir(args, config))}")
    return 0


def cmd_run_all(args: argparse.Namespace) -> int:
    config = _load_config(args)
    print(f"wrote {run_all(config, _out_dir(args, config), args.workers)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dqclab",
        description="Distributed variational-classifier experiment pipeline.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH",
                        help="JSON config file (default: built-in defaults)")
    common.add_argument("--out", metavar="DIR",
                        help="output directory (default: config output_dir)")

    cfg_only = argparse.ArgumentParser(add_help=False)
    cfg_only.add_argument("--config", metavar="PATH",
                          help="JSON config file (default: built-in defaults)")

    fast = argparse.ArgumentParser(add_help=False)
    fast.add_argument("--fast", action="store_true",
                      help="cap shot counts at 200 for quick runs")

    cell = argparse.ArgumentParser(add_help=False)
    cell.add_argument("--dataset", type=int, required=True, metavar="PRESET",
                      help="dataset preset id from the config")
    cell.add_argument("--arch", required=True,
                      choices=[k.value for k in ArchKind])
    cell.add_argument("--seed", type=int, required=True,
                      help="run seed for this cell")

    p = sub.add_parser("gen-data", parents=[common],
                       help="materialize dataset CSVs")
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("train", parents=[common, fast, cell],
                       help="train one grid cell")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("test", parents=[common, fast, cell],
                       help="score one trained grid cell")
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("transform", parents=[cfg_only],
                       help="rewrite a circuit file onto the QPU grid")
    p.add_argument("circuit", help="input circuit text file")
    p.add_argument("--out", metavar="FILE",
                   help="output circuit file (default: stdout)")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("count-remote", parents=[cfg_only],
                       help="count QPU-crossing CX gates in a circuit file")
    p.add_argument("circuit", help="input circuit text file")
    p.set_defaults(func=cmd_count_remote)

    p = sub.add_parser("report", parents=[common],
                       help="aggregate records under the output directory")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("run-all", parents=[common, fast],
                       help="full pipeline: gen-data, train+test grid, report")
    p.add_argument("--workers", type=int, default=1, metavar="N",
                   help="parallel grid workers (default 1)")
    p.set_defaults(func=cmd_run_all)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, SimulationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ExperimentError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
