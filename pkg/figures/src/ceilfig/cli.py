"""Command line entry: render one figure from a dataset directory.

Exit codes: 0 success, 2 bad arguments or input schema problems, 3 on
unexpected rendering failures.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .figures import FIGURE_IDS, FigureSpec, render
from .loader import SchemaError


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="plot",
        description="Render figure analogs from ceilsim aggregate CSV outputs.",
    )
    parser.add_argument("--figure", required=True, choices=FIGURE_IDS)
    parser.add_argument("--in", dest="input_dir", required=True,
                        help="dataset directory (one condition subdirectory per run)")
    parser.add_argument("--out", required=True,
                        help="output path; .png and .svg are both written")
    args = parser.parse_args(argv)
    try:
        _, written = render(FigureSpec(args.figure, Path(args.input_dir), Path(args.out)))
        for path in written:
            print(path)
        return 0
    except SchemaError as e:
        print(f"input error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # noqa: BLE001 - CLI boundary
        print(f"error: {e}", file=sys.stderr)
        return 3


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
