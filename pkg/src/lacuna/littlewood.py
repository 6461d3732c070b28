"""Inhomogeneous approximation pipeline: convergent-steered lacunary
sequences for a fixed target pair (beta, zeta), and product scanners for
n * ||alpha n - eta|| * ||beta n - zeta||.

Sequence terms are residues of the convergent denominators: writing beta =
p_m/q_m + theta_m/q_m with theta_m = q_m beta - p_m, any n <= q_m with
n p_m = round(zeta q_m) (mod q_m) has ||beta n - zeta|| <= 1/(2 q_m) +
|theta_m|, so n * ||beta n - zeta|| < 3/2.  The builder only trusts this
after an exact recomputation of every emitted term; growth is forced into
the window 8^n < a_n (with a_{n+1} >= 8 a_n) and checked against the
4^(6 Lambda n) ceiling from the continuant growth rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .cf import ContinuedFraction, QuadraticReal, expand, lambda_estimate
from .dyadic import DyadicReal
from .errors import CzPoolExhaustedError, PrecisionTooLowError
from .sequences import _mpf_fraction

import mpmath as mp

_THR_GUARD = Fraction(1, 1 << 50)


# ---------------------------------------------------------------------------
# exact scalar helpers (QuadraticReal | Fraction | DyadicReal)
# ---------------------------------------------------------------------------


def _as_exact(value):
    if isinstance(value, QuadraticReal):
        return value
    if isinstance(value, DyadicReal):
        return value.to_fraction()
    return Fraction(value)


def _dist_to_int(x):
    """||x|| with the same exact type as x (QuadraticReal or Fraction)."""
    if isinstance(x, QuadraticReal):
        return x.dist_nearest_int()
    f = x - math.floor(x)
    return min(f, 1 - f)


def _to_float(x) -> float:
    return x.to_float() if isinstance(x, QuadraticReal) else float(x)


def exact_product(value, n: int, shift) -> tuple[object, float]:
    """n * ||value * n - shift||, exact; returns (exact object, float view)."""
    v = _as_exact(value)
    s = _as_exact(shift)
    if isinstance(v, QuadraticReal) and not isinstance(s, QuadraticReal):
        s = QuadraticReal(Fraction(s), Fraction(0), v.d)
    elif isinstance(s, QuadraticReal) and not isinstance(v, QuadraticReal):
        v = QuadraticReal(Fraction(v), Fraction(0), s.d)
    d = _dist_to_int(v * n - s)
    prod = d * n
    return prod, _to_float(prod)


def littlewood_threshold_bounds(n: int, epsilon: Fraction) -> tuple[Fraction, Fraction]:
    """Rational enclosure of (ln ln n)^(2+eps) / ln n; domain n >= 3."""
    if n < 3:
        raise ValueError("threshold defined for n >= 3")
    epsilon = Fraction(epsilon)
    with mp.workdps(40):
        e = 2 + mp.mpf(epsilon.numerator) / epsilon.denominator
        v = _mpf_fraction(mp.log(mp.log(n)) ** e / mp.log(n))
    return v - _THR_GUARD, v + _THR_GUARD


# ---------------------------------------------------------------------------
# convergent-steered sequence
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CZSequence:
    beta: object
    zeta: Fraction
    terms: tuple[int, ...]
    lambda_beta: float
    products: tuple[float, ...]
    upper_bound_ok: tuple[bool, ...]
    convergent_indices: tuple[int, ...]

    def __len__(self):
        return len(self.terms)


def _steered_candidate(cf: ContinuedFraction, m: int, zeta: Fraction) -> int:
    """The unique n in [1, q_m] with n*p_m = round(zeta*q_m) mod q_m."""
    p, q = cf.p[m], cf.q[m]
    if q == 1:
        return 1
    target = round(zeta * q) % q
    if target == 0 and zeta == 0:
        return q
    n = target * pow(p, -1, q) % q
    return n if n else q


def cz_build(beta, zeta, n_max: int, depth: int = 128) -> CZSequence:
    """Greedy selection of steered candidates into the 8^n growth window.

    Every accepted term passes an exact product recheck <= 8; candidates that
    fail it or fall below the window are skipped, and the expansion depth is
    doubled until n_max terms are found or the pool is truly exhausted.
    """
    zeta = Fraction(zeta)
    if isinstance(beta, QuadraticReal) and beta.is_rational():
        raise ValueError("beta must be irrational")
    max_depth = 1 << 14
    while True:
        cf = expand(beta, depth)
        lam = lambda_estimate(cf)
        terms, products, ub_ok, idxs = [], [], [], []
        floor_next = 8  # strict lower bound 8^(n+1) for the next term
        for m in range(1, len(cf.q)):
            if len(terms) >= n_max:
                break
            a = _steered_candidate(cf, m, zeta)
            lo = max(floor_next, 8 * terms[-1] if terms else 1)
            if a <= lo:
                continue
            prod, prod_f = exact_product(beta, a, zeta)
            if not prod <= 8:
                continue
            n1 = len(terms) + 1
            terms.append(a)
            products.append(prod_f)
            ub_ok.append(math.log(a) <= 6 * lam * n1 * math.log(4) + 1e-12)
            idxs.append(m)
            floor_next = 8 ** (n1 + 1)
        if len(terms) >= n_max:
            return CZSequence(
                beta=beta,
                zeta=zeta,
                terms=tuple(terms),
                lambda_beta=lam,
                products=tuple(products),
                upper_bound_ok=tuple(ub_ok),
                convergent_indices=tuple(idxs),
            )
        if depth >= max_depth:
            raise CzPoolExhaustedError(len(terms))
        depth *= 2


def cz_recheck(seq: CZSequence) -> dict:
    """Independent full-precision validation of every emitted term.

    Checks, all exact: a_n * ||beta a_n - zeta|| <= 8; 8^n < a_n; the
    Hadamard step a_{n+1} >= 8 a_n.  Returns per-term booleans plus flags.
    """
    product_ok, window_ok = [], []
    for i, a in enumerate(seq.terms):
        prod, _ = exact_product(seq.beta, a, seq.zeta)
        product_ok.append(bool(prod <= 8))
        window_ok.append(8 ** (i + 1) < a)
    step_ok = all(
        seq.terms[i + 1] >= 8 * seq.terms[i] for i in range(len(seq.terms) - 1)
    )
    return {
        "product_ok": product_ok,
        "window_ok": window_ok,
        "step_ok": step_ok,
        "all_ok": all(product_ok) and all(window_ok) and step_ok,
    }


def cz_chain_constant(seq: CZSequence, epsilon: Fraction) -> list[tuple[int, float]]:
    """Per-term ratio of (ln n)^(2+eps)/n to (ln ln a_n)^(2+eps)/ln a_n,
    finite uniformly when ln a_n grows linearly in n."""
    e = 2 + float(Fraction(epsilon))
    out = []
    for i, a in enumerate(seq.terms):
        n = i + 1
        if n < 2 or a < 16:
            continue
        lhs = math.log(n) ** e / n if n >= 2 else 0.0
        rhs = math.log(math.log(a)) ** e / math.log(a)
        out.append((n, lhs / rhs if rhs > 0 else float("inf")))
    return out


# ---------------------------------------------------------------------------
# product scans
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LittlewoodReport:
    epsilon: Fraction
    mode: str
    n_scanned: int
    solutions: tuple[tuple[int, float, float], ...]  # (n, product, threshold)
    block_counts: dict

    @property
    def solution_count(self) -> int:
        return len(self.solutions)

    def to_json_dict(self) -> dict:
        return {
            "epsilon": str(self.epsilon),
            "mode": self.mode,
            "n_scanned": self.n_scanned,
            "solution_count": self.solution_count,
            "solutions": [
                {"n": n, "product": p, "threshold": t} for n, p, t in self.solutions
            ],
            "block_counts": {str(k): v for k, v in sorted(self.block_counts.items())},
        }


def _upper_fraction(x, bits: int = 256) -> Fraction:
    """Rational upper bound on a nonnegative exact scalar, tight to 2^-bits."""
    if isinstance(x, QuadraticReal):
        return x.to_dyadic(bits).to_fraction() + Fraction(1, 1 << bits)
    return Fraction(x)


def _confirm_solution(alpha, beta, eta, zeta, n, thr_lo: Fraction) -> tuple[bool, float]:
    pa, fa = exact_product(alpha, n, eta)
    pb, _ = exact_product(beta, n, zeta)
    # n ||an-e|| ||bn-z|| = (n ||an-e||) * ||bn-z|| = pa * pb / n
    try:
        prod = pa * pb
        ok = bool(prod <= thr_lo * n)
    except ValueError:
        # factors live in different quadratic fields; certify through tight
        # one-sided rational bounds instead
        ok = bool(_upper_fraction(pa) * _upper_fraction(pb) <= thr_lo * n)
    fb = _to_float(pb) / n if n else 0.0
    return ok, fa * fb


def littlewood_scan(
    alpha,
    beta,
    eta,
    zeta,
    epsilon,
    n_values=None,
    n_limit: int | None = None,
) -> LittlewoodReport:
    """Solutions of n*||alpha n - eta||*||beta n - zeta|| <= (ln ln n)^(2+eps)/ln n.

    Either along an explicit term list (CZ mode) or over every n <= n_limit
    (brute mode, float-prefiltered with exact confirmation of each hit; the
    confirmation compares exact rationals, so no solution can flip under any
    precision increase).
    """
    epsilon = Fraction(epsilon)
    if (n_values is None) == (n_limit is None):
        raise ValueError("give exactly one of n_values / n_limit")
    solutions = []
    blocks = {}
    if n_values is not None:
        candidates = [int(n) for n in n_values if n >= 3]
        scanned = len(candidates)
    else:
        scanned = max(n_limit - 2, 0)
        candidates = _brute_candidates(alpha, beta, eta, zeta, epsilon, n_limit)
    for n in candidates:
        thr_lo, thr_hi = littlewood_threshold_bounds(n, epsilon)
        ok, prod_f = _confirm_solution(alpha, beta, eta, zeta, n, thr_lo)
        if ok:
            solutions.append((n, prod_f, float(thr_lo)))
            b = 1 << (n.bit_length() - 1)
            blocks[b] = blocks.get(b, 0) + 1
    return LittlewoodReport(
        epsilon=epsilon,
        mode="explicit" if n_values is not None else "brute",
        n_scanned=scanned,
        solutions=tuple(sorted(solutions)),
        block_counts=blocks,
    )


def _brute_candidates(alpha, beta, eta, zeta, epsilon, n_limit: int) -> list[int]:
    """Float sweep over all n <= n_limit; keeps everything within a generous
    margin of the threshold for exact confirmation."""
    af, bf = _to_float(_as_exact(alpha)), _to_float(_as_exact(beta))
    ef, zf = _to_float(_as_exact(eta)), _to_float(_as_exact(zeta))
    n = np.arange(3, n_limit + 1, dtype=np.float64)
    da = np.abs((n * af - ef) - np.round(n * af - ef))
    db = np.abs((n * bf - zf) - np.round(n * bf - zf))
    prod = n * da * db
    lln = np.log(np.log(n))
    thr = lln ** (2 + float(Fraction(epsilon))) / np.log(n)
    keep = prod <= thr * (1 + 1e-6) + 1e-7
    return [int(v) for v in n[keep]]


def dispersion_to_littlewood(alpha, eta, seq: CZSequence, epsilon) -> list[dict]:
    """Per dyadic index block (N, 2N]: the term minimizing ||alpha a_n - eta||
    and whether the minimum meets (ln n)^(2+eps)/n at the achieving index."""
    if isinstance(alpha, DyadicReal):
        required = max(int(t).bit_length() for t in seq.terms) + 32
        if alpha.precision_bits < required:
            raise PrecisionTooLowError(required, alpha.precision_bits)
    e = 2 + float(Fraction(epsilon))
    rows = []
    big_n = 1
    while big_n < len(seq.terms):
        idxs = range(big_n + 1, min(2 * big_n, len(seq.terms)) + 1)
        if not idxs:
            big_n *= 2
            continue
        best = None
        for n in idxs:
            val = _dist_to_int(_mul_exact(alpha, seq.terms[n - 1], eta))
            fv = _to_float(val)
            if best is None or fv < best[1]:
                best = (n, fv)
        n_star, dist = best
        bound = math.log(n_star) ** e / n_star if n_star >= 2 else float("inf")
        rows.append(
            {"N": big_n, "n": n_star, "distance": dist, "bound": bound, "meets": dist <= bound}
        )
        big_n *= 2
    return rows


def _mul_exact(alpha, a: int, eta):
    v = _as_exact(alpha)
    s = _as_exact(eta)
    if isinstance(v, QuadraticReal) and not isinstance(s, QuadraticReal):
        s = QuadraticReal(Fraction(s), Fraction(0), v.d)
    return v * a - s
