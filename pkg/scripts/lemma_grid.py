"""Hoelder-chain checks over a (q, k, t, window policy) grid, with slack ratios."""
import argparse
import sys

from lmoments import __version__
from lmoments.characters import build_modulus
from lmoments.lfunctions import CriticalPoint, l_all
from lmoments.mollifier import CANONICAL, CUSTOM, make_params
from lmoments.moments import lemma21_check, lemma22_check
from lmoments.report import render


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q", type=int, nargs="+", default=[101, 401, 1009])
    ap.add_argument("--k", type=float, nargs="+", default=[0.3, 0.5, 0.8, 2.0])
    ap.add_argument("--t", type=float, nargs="+", default=[0.0, 0.7])
    ap.add_argument("--bounds", type=float, nargs="+", default=[7])
    ap.add_argument("--ell", type=int, nargs="+", default=None)
    args = ap.parse_args(argv)

    rows = []
    for q in args.q:
        mod = build_modulus(q)
        for t in args.t:
            lv = l_all(mod, CriticalPoint(t))
            for k in args.k:
                for policy in (CANONICAL, CUSTOM):
                    if policy == CUSTOM:
                        params = make_params(k, q, window_mode=CUSTOM, bounds=args.bounds, ell=args.ell)
                    else:
                        params = make_params(k, q)
                    r1 = lemma21_check(mod, t, k, params, lvec=lv)
                    row = {"q": q, "k": k, "t": t, "window_mode": policy, "ell": " ".join(map(str, params.ell)),
                           "lemma21_holds": r1.holds, "lemma21_slack": r1.slack_ratio,
                           "lemma22_slack": None}
                    if k < 1:
                        row["lemma22_slack"] = lemma22_check(mod, t, k, params, lvec=lv).slack_ratio
                    rows.append(row)
    cols = ["q", "k", "t", "window_mode", "ell", "lemma21_holds", "lemma21_slack", "lemma22_slack"]
    sys.stdout.write(render("csv", cols, rows, {"script": "lemma_grid", "version": __version__}))


if __name__ == "__main__":
    main()
