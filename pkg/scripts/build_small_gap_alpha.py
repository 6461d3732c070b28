"""Construct dilation factors with certified small maximal gap.

Two modes:
  * single: one alpha for a fixed truncation length N, with the Turan box
    certificate and an exact gap recomputation against 3l ln(N)/N.
  * nested: one alpha working simultaneously at every block N_k = 4^k for
    k in [k_start, k_end], with per-block exact rechecks.

Usage:
    python3 scripts/build_small_gap_alpha.py single --r 2 --n 4096
    python3 scripts/build_small_gap_alpha.py nested --r 3 --k-start 3 --k-end 5
"""

import argparse
import json
import math
import sys
from fractions import Fraction

from lacuna.dyadic import dilate, gap_report
from lacuna.nested import build_nested_alpha
from lacuna.sequences import geometric_sequence, ln_upper, smallest_l
from lacuna.turan import find_alpha


def run_single(args):
    seq = geometric_sequence(Fraction(args.r), args.n)
    cert = find_alpha(seq, args.n)
    rep = gap_report(dilate(cert.alpha, seq, 1, args.n))
    l = smallest_l(Fraction(args.r))
    g = rep.max_gap.to_float()
    out = {
        "r": args.r,
        "n": args.n,
        "alpha_decimal": cert.alpha.decimal_str(30),
        "max_gap": g,
        "normalized": args.n * g / math.log(args.n),
        "limit_3l": 3 * l,
        "certified": bool(
            rep.max_gap.to_fraction() * args.n <= Fraction(3 * l) * ln_upper(args.n)
        ),
    }
    json.dump(out, sys.stdout, indent=2)
    print()


def run_nested(args):
    seq = geometric_sequence(Fraction(args.r), 2 * 4**args.k_end)
    chain = build_nested_alpha(seq, args.k_start, args.k_end)
    l = chain.growth_l
    rows = []
    for b in chain.blocks:
        start, stop = chain.block_indices(b.k)
        rep = gap_report(dilate(chain.alpha_final, seq, start, stop))
        bound = Fraction(3 * l) * ln_upper(b.n_k) / b.n_k
        rows.append(
            {
                "k": b.k,
                "n_k": b.n_k,
                "block_gap": rep.max_gap.to_float(),
                "bound": float(bound),
                "certified": bool(rep.max_gap.to_fraction() <= bound),
            }
        )
    out = {
        "r": args.r,
        "alpha_decimal": chain.alpha_final.decimal_str(30),
        "blocks": rows,
        "all_certified": all(r["certified"] for r in rows),
    }
    json.dump(out, sys.stdout, indent=2)
    print()


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="mode", required=True)
    s = sub.add_parser("single")
    s.add_argument("--r", type=int, default=2)
    s.add_argument("--n", type=int, default=4096)
    s.set_defaults(func=run_single)
    n = sub.add_parser("nested")
    n.add_argument("--r", type=int, default=3)
    n.add_argument("--k-start", type=int, default=3)
    n.add_argument("--k-end", type=int, default=5)
    n.set_defaults(func=run_nested)
    args = ap.parse_args(argv)
    args.func(args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
