"""Command line entry point.

Exit status: 0 when every requested check passes, 1 when a check fails,
2 on structural errors (bad config, invalid state, numerical breakdown).
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import load_config
from .errors import ModalAlgError
from .matrix_core import DEFAULT_CTX
from .report import DEMOS, demo_report, render_report, run_analysis

EXIT_OK, EXIT_FAIL, EXIT_STRUCTURAL = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="modalalg", description="Definite-valued observable sets: checks and demos.")
    sub = parser.add_subparsers(dest="command", required=True)

    an = sub.add_parser("analyze", help="run the checks listed in a JSON config")
    an.add_argument("--config", required=True, help="path to the JSON config")
    an.add_argument("--format", choices=["json", "text"], default="json")
    an.add_argument("--seed", type=int, default=None, help="override the config seed")
    an.add_argument("--out", type=Path, default=None, help="write the report here instead of stdout")
    an.add_argument("--tolerance-atol", type=float, default=None)
    an.add_argument("--tolerance-eig", type=float, default=None)

    dm = sub.add_parser("demo", help="run a single built-in demonstration")
    dm.add_argument("name", choices=sorted(DEMOS))
    dm.add_argument("--format", choices=["json", "text"], default="text")
    dm.add_argument("--out", type=Path, default=None)
    return parser


def _emit(data: bytes, out: Path | None):
    if out is None:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        out.write_bytes(data)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "analyze":
            if args.seed is not None and args.seed < 0:
                raise ValueError("--seed must be non-negative")
            cfg = load_config(args.config).with_overrides(args.seed, args.tolerance_atol, args.tolerance_eig)
            report = run_analysis(cfg)
        else:
            report = demo_report(args.name, DEFAULT_CTX)
        _emit(render_report(report, args.format), args.out)
    except (ModalAlgError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STRUCTURAL
    return EXIT_OK if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
