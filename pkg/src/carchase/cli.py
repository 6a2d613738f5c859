"""Command line interface.

Subcommands::

    carchase simulate <config> [--out DIR]
    carchase acquire <config> [--out DIR]
    carchase evaluate <dataset> <config>
    carchase export-frames <run> --every K [--out DIR]
    carchase report <run> [--out DIR]

Metrics are printed as a final ``key = value`` block on stdout; errors go to
stderr with a nonzero exit code.
"""

from __future__ import annotations

import argparse
import sys

from .config import ConfigError, load_config
from .dataset import DatasetFormatError, acquire_dataset, evaluate_detector
from .render import IoError
from .report import make_report
from .simulate import SimulationAborted, export_frames, run_simulation


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="carchase",
        description="Quadrotor visual-servoing simulator: chase a car through a synthetic scene.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run the closed-loop simulation")
    p.add_argument("config", help="path to a key = value configuration file")
    p.add_argument("--out", default=None, help="output directory (default: output.dir key)")

    p = sub.add_parser("acquire", help="render the spherical acquisition dataset")
    p.add_argument("config")
    p.add_argument("--out", default="dataset", help="dataset directory")

    p = sub.add_parser("evaluate", help="score the detector against a dataset")
    p.add_argument("dataset", help="directory produced by 'acquire'")
    p.add_argument("config")

    p = sub.add_parser("export-frames", help="re-render a finished run to PPM files")
    p.add_argument("run", help="run directory produced by 'simulate'")
    p.add_argument("--every", type=int, required=True, metavar="K", help="export every K-th frame")
    p.add_argument("--out", default=None, help="output directory (default: <run>/frames)")

    p = sub.add_parser("report", help="render figures from a run's CSV log")
    p.add_argument("run", help="run directory or log.csv path")
    p.add_argument("--out", default=None, help="figure directory (default: next to the log)")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            config = load_config(args.config)
            metrics = run_simulation(config, out_dir=args.out)
            print(metrics.as_block(), end="")
        elif args.command == "acquire":
            config = load_config(args.config)
            report = acquire_dataset(config, args.out)
            print(report.as_block(), end="")
        elif args.command == "evaluate":
            config = load_config(args.config)
            report = evaluate_detector(args.dataset, config)
            print(report.as_block(), end="")
        elif args.command == "export-frames":
            written = export_frames(args.run, args.every, out_dir=args.out)
            print(f"frames_written = {len(written)}")
        elif args.command == "report":
            written = make_report(args.run, out_dir=args.out)
            for path in written:
                print(path)
    except (ConfigError, DatasetFormatError, SimulationAborted, IoError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
