"""Distance between the general two-point main terms at (1/2+it, 1/2-it-i delta)
and the critical-line limit, with and without the limit constant."""
import argparse
import sys

from lmoments import __version__
from lmoments.report import render
from lmoments.twisted import general_main, main_terms


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q", type=int, default=1009)
    ap.add_argument("--t", type=float, default=0.5)
    ap.add_argument("--h", type=int, default=1)
    ap.add_argument("--b", type=int, default=1)
    ap.add_argument("--deltas", type=float, nargs="+", default=[1e-2, 1e-3, 1e-4, 1e-5, 1e-6])
    args = ap.parse_args(argv)

    s1, s2, corr = main_terms(args.q, args.t, args.h, args.b)
    rows = []
    for d in args.deltas:
        g = general_main(args.q, complex(0.5, args.t), complex(0.5, -args.t - d), args.h, args.b)
        rows.append({"delta": d, "deviation": abs(g - (s1 + s2 + corr)),
                     "deviation_without_constant": abs(g - (s1 + s2))})
    cols = ["delta", "deviation", "deviation_without_constant"]
    meta = {"script": "limit_consistency", "version": __version__, "q": args.q, "t": args.t,
            "h": args.h, "b": args.b}
    sys.stdout.write(render("csv", cols, rows, meta))


if __name__ == "__main__":
    main()
