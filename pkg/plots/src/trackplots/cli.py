"""Command line: render figures from a tracking run directory.

Exit codes: 0 on success, 1 on missing/malformed inputs, 2 on output
I/O failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import PlotsError
from .figures import FIGURE_IDS, build
from .io import load_run_dir


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="plots",
        description="Render static figures from tracking run CSV logs",
    )
    parser.add_argument(
        "figure",
        metavar="figure-id",
        choices=FIGURE_IDS + ("all",),
        help=f"one of {', '.join(FIGURE_IDS)}, or 'all'",
    )
    parser.add_argument(
        "--in",
        dest="in_dir",
        required=True,
        help="run directory containing run_<seed>.csv and summary.csv",
    )
    parser.add_argument("--out", dest="out_dir", required=True, help="directory for images")
    args = parser.parse_args(argv)

    try:
        data = load_run_dir(args.in_dir)
    except (PlotsError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    out_dir = Path(args.out_dir)
    ids = FIGURE_IDS if args.figure == "all" else (args.figure,)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        for figure_id in ids:
            target = out_dir / f"{figure_id}.svg"
            build(figure_id, data).savefig(target)
            print(f"wrote {target}")
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
