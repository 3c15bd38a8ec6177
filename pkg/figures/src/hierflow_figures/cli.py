"""Command line for figure rendering.

Exit codes: 0 success, 1 schema/validation problem, 2 I/O problem.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .render import FIGURE_IDS, SchemaError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hierflow-figures",
        description="Render figures from a hierflow report directory.",
    )
    parser.add_argument(
        "figure", choices=[*FIGURE_IDS, "all"],
        help="figure id, or 'all' to render every figure",
    )
    parser.add_argument("--report-dir", required=True, help="tidy report directory")
    parser.add_argument(
        "--out", required=True,
        help="output image path (a directory when rendering 'all')",
    )
    parser.add_argument("--style", help="optional matplotlib style file")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.figure == "all":
            out_dir = Path(args.out)
            for fid in FIGURE_IDS:
                path = render(args.report_dir, fid, out_dir / f"{fid}.png",
                              args.style)
                print(f"wrote {path}")
        else:
            path = render(args.report_dir, args.figure, args.out, args.style)
            print(f"wrote {path}")
        return 0
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
