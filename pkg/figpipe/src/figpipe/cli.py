"""adepth-plot: render figures from adepth simulation logs.

    adepth-plot comparison --in A.csv B.csv ... --out FILE
    adepth-plot depth      --in RUN.csv        --out FILE
    adepth-plot trajectory --in RUN.csv        --out FILE

The output format follows the file extension (.svg/.pdf/.png).
"""

from __future__ import annotations

import argparse
import sys

from .figures import render_comparison, render_depth_track, render_trajectory
from .reader import MissingColumnError

__all__ = ["main"]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="adepth-plot", description=__doc__)
    sub = parser.add_subparsers(dest="figure", required=True)
    for name, n_inputs in (("comparison", "+"), ("depth", 1), ("trajectory", 1)):
        p = sub.add_parser(name)
        p.add_argument("--in", dest="inputs", nargs="+" if n_inputs == "+" else 1,
                       required=True, metavar="CSV")
        p.add_argument("--out", required=True, metavar="FILE")
    args = parser.parse_args(argv)

    try:
        if args.figure == "comparison":
            out = render_comparison(args.inputs, args.out)
        elif args.figure == "depth":
            out = render_depth_track(args.inputs[0], args.out)
        else:
            out = render_trajectory(args.inputs[0], args.out)
    except (MissingColumnError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
