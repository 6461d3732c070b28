"""Survey of inhomogeneous product minima for quadratic irrational pairs.

For each pair, brute-scans n * ||alpha n - eta|| * ||beta n - zeta|| against
the threshold (ln ln n)^(2+eps)/ln n up to a limit, every hit confirmed by
exact arithmetic in the relevant quadratic field.  Also builds a steered
lacunary sequence for beta and reports its exact recheck.

Usage:
    python3 scripts/littlewood_survey.py --n-limit 100000 --epsilon 1/10
"""

import argparse
import json
import sys
from fractions import Fraction

from lacuna.cf import QuadraticReal, parse_value_spec
from lacuna.littlewood import cz_build, cz_recheck, littlewood_scan

PAIRS = [
    ("quad:-1,5,2", "quad:-1,5,2"),   # phi-1 against itself
    ("quad:-1,5,2", "quad:-2,2,2"),   # phi-1 against sqrt(2)-1
    ("quad:-2,2,2", "quad:-3,3,2"),   # sqrt(2)-1 against (sqrt(3)-3)/2
]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-limit", type=int, default=100000)
    ap.add_argument("--epsilon", default="1/10")
    ap.add_argument("--cz-terms", type=int, default=15)
    args = ap.parse_args(argv)
    eps = Fraction(args.epsilon)

    report = []
    for a_spec, b_spec in PAIRS:
        alpha, beta = parse_value_spec(a_spec), parse_value_spec(b_spec)
        rep = littlewood_scan(alpha, beta, 0, 0, eps, n_limit=args.n_limit)
        report.append(
            {
                "alpha": a_spec,
                "beta": b_spec,
                "solutions": rep.solution_count,
                "blocks": {str(k): v for k, v in sorted(rep.block_counts.items())},
                "first_five": [n for n, _, _ in rep.solutions[:5]],
            }
        )

    seq = cz_build(QuadraticReal.sqrt(2), Fraction(0), args.cz_terms)
    chk = cz_recheck(seq)
    out = {
        "n_limit": args.n_limit,
        "epsilon": str(eps),
        "pairs": report,
        "steered_sqrt2": {
            "terms": [str(t) for t in seq.terms],
            "max_product": max(seq.products),
            "recheck_ok": chk["all_ok"],
        },
    }
    json.dump(out, sys.stdout, indent=2)
    print()
    return 0


if __name__ == "__main__":
    sys.exit(main())
