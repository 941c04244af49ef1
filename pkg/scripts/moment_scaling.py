"""Moment ratios moment / (phi*(q) (log q)^(k^2)) across a range of primes.

For k = 1 the table also carries the twisted-moment main-term prediction.
"""
import argparse
import sys

from lmoments import __version__
from lmoments.characters import build_modulus
from lmoments.lfunctions import CriticalPoint, l_all
from lmoments.moments import moment, normalizer
from lmoments.report import render
from lmoments.twisted import TwistPair, twisted_main


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q", type=int, nargs="+", default=[1009, 2003, 5003, 10007])
    ap.add_argument("--k", type=float, nargs="+", default=[0.3, 0.5, 0.8, 1.0])
    ap.add_argument("--t", type=float, nargs="+", default=[0.0, 0.7])
    ap.add_argument("--format", choices=["csv", "json"], default="csv")
    args = ap.parse_args(argv)

    rows = []
    for q in args.q:
        mod = build_modulus(q)
        for t in args.t:
            lv = l_all(mod, CriticalPoint(t))
            main_k1 = twisted_main(mod, t, TwistPair(1, 1), lvec=lv).main_total.real
            for k in args.k:
                m = moment(mod, t, k, lvec=lv)
                nz = normalizer(q, k)
                rows.append({"q": q, "k": k, "t": t, "ratio": m / nz,
                             "predicted_ratio": main_k1 / nz if k == 1 else None})
    # spread of the ratio over q at each (k, t)
    spread = {}
    for r in rows:
        spread.setdefault((r["k"], r["t"]), []).append(r["ratio"])
    for r in rows:
        vals = spread[(r["k"], r["t"])]
        r["spread"] = max(vals) / min(vals)
    cols = ["q", "k", "t", "ratio", "predicted_ratio", "spread"]
    sys.stdout.write(render(args.format, cols, rows, {"script": "moment_scaling", "version": __version__}))


if __name__ == "__main__":
    main()
