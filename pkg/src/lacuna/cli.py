"""Command-line front end.

Subcommands: gaps, find-alpha, nested-alpha, metric-scan, moment-check, cf,
littlewood.  A plain key=value config file can supply defaults (flags win).
Output is deterministic JSON/CSV keyed only by the config and seed: no
timestamps, keys sorted, dyadic values rendered as 30-digit decimal plus a
lossless hex mantissa/exponent pair.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

from . import bump as bump_mod
from . import cf as cf_mod
from . import littlewood as lw
from . import metric
from .dyadic import DyadicReal, dilate, gap_report
from .errors import LacunaError
from .nested import build_nested_alpha
from .sequences import (
    geometric_sequence,
    ln_upper,
    load_sequence,
    smallest_l,
    thin,
)
from .turan import find_alpha


@dataclass
class RunConfig:
    subcommand: str
    args: argparse.Namespace

    @property
    def precision_override(self) -> int | None:
        if self.args.precision:
            return self.args.precision
        env = os.environ.get("LACUNA_PRECISION_BITS")
        return int(env) if env else None


def _dyadic_json(x: DyadicReal) -> dict:
    m, e = x.hex_pair()
    return {"decimal": x.decimal_str(30), "hex_mantissa": m, "exponent": e}


def _emit(payload, out_path, as_csv=False):
    text = payload if as_csv else json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    sys.stdout.write(text)


def _load_config_defaults(argv):
    """Pre-scan for --config and return its key=value pairs."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    ns, _ = pre.parse_known_args(argv)
    if not ns.config:
        return {}
    out = {}
    with open(ns.config) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, val = line.partition("=")
            out[key.strip().replace("-", "_")] = val.strip()
    return out


def _build_seq(args, n_terms: int):
    if getattr(args, "seq", None):
        return load_sequence(args.seq)
    return geometric_sequence(Fraction(args.r), n_terms)


def _parse_real(spec: str):
    try:
        return cf_mod.parse_value_spec(spec)
    except ValueError:
        return Fraction(spec)


def _alpha_precision(seq, n: int, override: int | None) -> int:
    need = max(int(t).bit_length() for t in seq.terms[:n]) + 64
    return max(need, override or 0)


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------


def _cmd_gaps(cfg: RunConfig):
    a = cfg.args
    seq = _build_seq(a, a.n)
    prec = _alpha_precision(seq, a.n, cfg.precision_override)
    alpha = DyadicReal.from_fraction(Fraction(a.alpha), prec)
    rep = gap_report(dilate(alpha, seq, 1, a.n), a.eps)
    payload = {"alpha": _dyadic_json(alpha), **rep.to_json_dict()}
    _emit(payload, a.out)
    return 0


def _cmd_find_alpha(cfg: RunConfig):
    a = cfg.args
    seq = _build_seq(a, a.n)
    cert = find_alpha(seq, a.n)
    rep = gap_report(dilate(cert.alpha, seq, 1, a.n))
    l = smallest_l(seq.growth_factor_r)
    bound = Fraction(3 * l) * ln_upper(a.n) / a.n
    payload = cert.to_json_dict()
    payload["verified_max_gap"] = rep.max_gap.decimal_str(30)
    payload["target_bound"] = float(bound)
    payload["bound_met"] = bool(rep.max_gap.to_fraction() <= bound)
    _emit(payload, a.out)
    return 0


def _cmd_nested_alpha(cfg: RunConfig):
    a = cfg.args
    seq = _build_seq(a, 2 * 4**a.k_end)
    chain = build_nested_alpha(seq, a.k_start, a.k_end)
    payload = chain.to_json_dict()
    _emit(payload, a.out)
    return 0


def _cmd_metric_scan(cfg: RunConfig):
    a = cfg.args
    n_list = []
    n = a.n_min
    while n <= a.n_max:
        n_list.append(n)
        n *= 2
    seq = _build_seq(a, n_list[-1])
    prec = _alpha_precision(seq, n_list[-1], cfg.precision_override)
    alphas = [
        metric.sample_alpha(a.measure, a.seed * 1000003 + i, prec)
        for i in range(a.alphas)
    ]
    table = metric.dispersion_scan(
        seq, alphas, n_list, eps=a.eps, rng_seed=a.seed, measure_label=a.measure
    )
    _emit(table.to_csv(), a.out, as_csv=True)
    summary = {
        "measure": a.measure,
        "seed": a.seed,
        "rows": len(table.rows),
        "pigeonhole_ok": table.check_pigeonhole(),
    }
    try:
        fit = metric.exponent_fit(table)
        summary["kappa_median"] = fit.median
        summary["kappa_iqr"] = [fit.q25, fit.q75]
    except LacunaError:
        pass
    sys.stdout.write(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return 0


def _cmd_moment_check(cfg: RunConfig):
    a = cfg.args
    seq = _build_seq(a, a.n)
    thinned = thin(seq, a.n)
    params = metric.MetricParameters.for_n(a.n, Fraction(a.eps).limit_denominator(1000))
    res = metric.exp_moment_check(
        thinned,
        float(Fraction(a.t)),
        params,
        bump_mod.standard_bump(),
        quadrature_points=a.points,
        method=a.method,
    )
    payload = {
        "n": a.n,
        "t": a.t,
        "lhs": res.lhs,
        "rhs": res.rhs,
        "passed": res.passed,
        "method": res.method,
        "k_cut": res.k_cut,
    }
    _emit(payload, a.out)
    return 0 if res.passed else 1


def _cmd_cf(cfg: RunConfig):
    a = cfg.args
    value = _parse_real(a.value)
    expansion = cf_mod.expand(value, a.depth)
    payload = expansion.to_json_dict()
    if expansion.depth >= 2:
        payload["lambda_sup"] = cf_mod.lambda_estimate(expansion)
        payload["levy_rate"] = cf_mod.levy_rate(expansion)
    _emit(payload, a.out)
    return 0


def _cmd_littlewood(cfg: RunConfig):
    a = cfg.args
    beta = _parse_real(a.beta)
    alpha = (
        _parse_real(a.alpha)
        if a.alpha
        else metric.sample_alpha("bounded-cf:5", a.seed, 192).to_fraction()
    )
    eta, zeta = Fraction(a.eta), Fraction(a.zeta)
    eps = Fraction(a.epsilon)
    if a.brute_n:
        report = lw.littlewood_scan(alpha, beta, eta, zeta, eps, n_limit=a.brute_n)
        payload = report.to_json_dict()
    else:
        seq = lw.cz_build(beta, zeta, a.terms)
        report = lw.littlewood_scan(alpha, beta, eta, zeta, eps, n_values=seq.terms)
        payload = report.to_json_dict()
        payload["cz_recheck"] = lw.cz_recheck(seq)
        payload["cz_terms"] = [str(t) for t in seq.terms]
    _emit(payload, a.out)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lacuna")
    p.add_argument("--config", help="key=value defaults file; flags win")
    sub = p.add_subparsers(dest="subcommand", required=True)

    def common(sp):
        sp.add_argument("--precision", type=int, default=0)
        sp.add_argument("--out")

    g = sub.add_parser("gaps")
    g.add_argument("--r", default="2")
    g.add_argument("--seq")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--alpha", required=True)
    g.add_argument("--eps", type=float, default=0.05)
    common(g)
    g.set_defaults(func=_cmd_gaps)

    f = sub.add_parser("find-alpha")
    f.add_argument("--r", default="2")
    f.add_argument("--seq")
    f.add_argument("--n", type=int, required=True)
    common(f)
    f.set_defaults(func=_cmd_find_alpha)

    na = sub.add_parser("nested-alpha")
    na.add_argument("--r", default="3")
    na.add_argument("--seq")
    na.add_argument("--k-start", type=int, default=3)
    na.add_argument("--k-end", type=int, default=5)
    common(na)
    na.set_defaults(func=_cmd_nested_alpha)

    ms = sub.add_parser("metric-scan")
    ms.add_argument("--r", default="2")
    ms.add_argument("--seq")
    ms.add_argument("--n-min", type=int, default=1024)
    ms.add_argument("--n-max", type=int, default=65536)
    ms.add_argument("--alphas", type=int, default=100)
    ms.add_argument("--measure", default="lebesgue")
    ms.add_argument("--seed", type=int, default=0)
    ms.add_argument("--eps", type=float, default=0.05)
    common(ms)
    ms.set_defaults(func=_cmd_metric_scan)

    mc = sub.add_parser("moment-check")
    mc.add_argument("--r", default="3")
    mc.add_argument("--seq")
    mc.add_argument("--n", type=int, required=True)
    mc.add_argument("--t", default="0")
    mc.add_argument("--eps", default="1/20")
    mc.add_argument("--points", type=int, default=1 << 14)
    mc.add_argument("--method", default="auto")
    common(mc)
    mc.set_defaults(func=_cmd_moment_check)

    cfp = sub.add_parser("cf")
    cfp.add_argument("--value", required=True)
    cfp.add_argument("--depth", type=int, default=100)
    common(cfp)
    cfp.set_defaults(func=_cmd_cf)

    lwp = sub.add_parser("littlewood")
    lwp.add_argument("--alpha")
    lwp.add_argument("--beta", required=True)
    lwp.add_argument("--eta", default="0")
    lwp.add_argument("--zeta", default="0")
    lwp.add_argument("--epsilon", default="1/10")
    lwp.add_argument("--terms", type=int, default=30)
    lwp.add_argument("--brute-n", type=int, default=0)
    lwp.add_argument("--seed", type=int, default=0)
    common(lwp)
    lwp.set_defaults(func=_cmd_littlewood)
    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    defaults = _load_config_defaults(argv)
    if defaults:
        # config file supplies defaults for every subparser that knows the key
        for action in parser._subparsers._group_actions[0].choices.values():
            known = {
                k: v for k, v in defaults.items() if action.get_default(k) is not None
                or any(k == a.dest for a in action._actions)
            }
            typed = {}
            for k, v in known.items():
                for act in action._actions:
                    if act.dest == k:
                        typed[k] = act.type(v) if act.type else v
                        act.required = False
            action.set_defaults(**typed)
    args = parser.parse_args(argv)
    cfg = RunConfig(subcommand=args.subcommand, args=args)
    try:
        return args.func(cfg)
    except LacunaError as exc:
        sys.stderr.write(f"error [{exc.code}]: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
