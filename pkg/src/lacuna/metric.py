"""Statistical dispersion scans and the smooth-counting apparatus.

Three layers:
  * Monte-Carlo: sample dilation factors (Lebesgue or bounded-quotient
    measures), tabulate normalized maximal gaps over dyadic ranges of N, fit
    the growth exponent of N*G against ln ln N.
  * Window counts: the bump-weighted number of dilates near a torus point t,
    computed both directly and through the truncated Fourier expansion; the
    two must agree up to the transform's tail.
  * Exponential moment: the L^1 norm of exp(omega*/(10R)) over the dilation
    factor, by composite Simpson when the oscillation budget allows and by an
    independence-justified factorization otherwise.

Scan tables use 64-bit truncated points by default: the maximal gap survives
truncation up to 2^-63, far below every tolerance used here, and the run cost
drops by orders of magnitude.  Exact mode is a flag away.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.integrate import simpson

from .bump import BumpFunction
from .dyadic import DyadicReal, dilate, frac, gap_report
from .errors import (
    FitUnderdeterminedError,
    MeasureUnsupportedError,
    QuadratureUnderresolvedError,
)
from .sequences import LacunarySequence, ThinnedSequence, _mpf_fraction
import mpmath as mp

_TRUNC_SLACK = Fraction(1, 1 << 60)


# ---------------------------------------------------------------------------
# parameters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MetricParameters:
    """Window/frequency scales derived from one shared ln N approximant.

    q = (ln N)^(1+2e), m = q^2 (exact dyadic square, so m = (ln N)^(2+4e)
    up to the single rounding in q), p = (ln N)^(2+3e).  The ratio r = m/p is
    carried as an exact rational of the stored dyadics, which is what makes
    the Taylor premise below an exact identity.
    """

    n: int
    epsilon: Fraction
    q: DyadicReal
    m: DyadicReal
    p: DyadicReal
    r_exact: Fraction

    @classmethod
    def for_n(cls, n: int, epsilon=Fraction(1, 20), precision_bits: int = 192):
        if n < 3:
            raise ValueError("need n >= 3 so ln n > 1")
        epsilon = Fraction(epsilon)
        if epsilon <= 0:
            raise ValueError("epsilon must be positive")
        with mp.workdps(60):
            ln_n = mp.log(n)
            e = mp.mpf(epsilon.numerator) / epsilon.denominator
            q = DyadicReal.from_fraction(_mpf_fraction(ln_n ** (1 + 2 * e)), precision_bits)
            p = DyadicReal.from_fraction(_mpf_fraction(ln_n ** (2 + 3 * e)), precision_bits)
        m = q * q
        r_exact = m.to_fraction() / p.to_fraction()
        return cls(n=n, epsilon=epsilon, q=q, m=m, p=p, r_exact=r_exact)

    @property
    def r_value(self) -> DyadicReal:
        return DyadicReal.from_fraction(self.r_exact, self.q.precision_bits)

    @property
    def k_cut(self) -> int:
        """Truncation index floor(N/P) for the Fourier window count."""
        return int(Fraction(self.n) / self.p.to_fraction())

    def taylor_premise(self) -> Fraction:
        """(1/10r)*(m/n)*(2n/p); equals 1/5 exactly by construction."""
        return (
            Fraction(1, 10)
            / self.r_exact
            * (self.m.to_fraction() / self.n)
            * (2 * self.n / self.p.to_fraction())
        )


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------


def _parse_measure(measure: str):
    m = measure.strip().lower()
    if m == "lebesgue":
        return "lebesgue", None
    for sep in (":", "("):
        if m.startswith("bounded-cf" + sep):
            rest = m[len("bounded-cf") + 1 :].rstrip(")")
            try:
                b = int(rest)
            except ValueError:
                raise MeasureUnsupportedError(f"measure-unsupported: {measure!r}")
            if b < 1:
                raise MeasureUnsupportedError(
                    f"measure-unsupported: bound {b} must be >= 1"
                )
            return "bounded-cf", b
    raise MeasureUnsupportedError(f"measure-unsupported: {measure!r}")


def sample_alpha(measure: str, rng_seed: int, precision_bits: int = 96) -> DyadicReal:
    """One dilation factor from the named measure, deterministic in the seed.

    bounded-cf(B) draws i.i.d. partial quotients uniform on 1..B and returns
    the deepest convergent below the precision horizon.  This is a heuristic
    stand-in for sampling the badly-approximable numbers, not a certified
    measure; tables carry the label.
    """
    kind, bound = _parse_measure(measure)
    rng = random.Random(rng_seed)
    if kind == "lebesgue":
        m = rng.getrandbits(precision_bits)
        return DyadicReal(m, -precision_bits, precision_bits)
    p, q = 0, 1
    pm1, qm1 = 1, 0
    while q.bit_length() <= precision_bits + 16:
        c = rng.randint(1, bound)
        p, pm1 = c * p + pm1, p
        q, qm1 = c * q + qm1, q
    return DyadicReal.from_fraction(Fraction(p, q), precision_bits)


# ---------------------------------------------------------------------------
# dispersion scans
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScanRow:
    alpha_id: int
    n: int
    max_gap: Fraction
    norm_log1: float
    norm_log2e: float


@dataclass(frozen=True)
class ScanTable:
    rows: tuple[ScanRow, ...]
    rng_seed: int | None
    measure_label: str
    epsilon: float
    truncated: bool

    def check_pigeonhole(self) -> bool:
        """Every max_gap at least 1/N (minus truncation slack if truncated)."""
        slack = _TRUNC_SLACK if self.truncated else 0
        return all(r.max_gap >= Fraction(1, r.n) - slack for r in self.rows)

    def to_csv(self) -> str:
        lines = ["alpha_id,N,max_gap,norm_log1,norm_log2e"]
        for r in self.rows:
            lines.append(
                f"{r.alpha_id},{r.n},{float(r.max_gap)!r},{r.norm_log1!r},{r.norm_log2e!r}"
            )
        return "\n".join(lines) + "\n"


def _is_doubling_pow2(terms) -> bool:
    if not terms or terms[0] & (terms[0] - 1):
        return False
    return all(terms[i + 1] == 2 * terms[i] for i in range(len(terms) - 1))


def _pow2_truncated_points(alpha: DyadicReal, e0: int, n_max: int) -> np.ndarray:
    """Top-64-bit windows of the binary expansion of alpha at offsets
    e0, e0+1, ..., e0+n_max-1: these are the truncated dilates by 2^(e0+i)."""
    s = e0 + n_max + 72
    s += (-s) % 8
    a = alpha.to_fraction()
    big = (a.numerator << s) // a.denominator % (1 << s)
    raw = np.frombuffer(big.to_bytes(s // 8, "big"), dtype=np.uint8)
    words = (
        sliding_window_view(raw, 8).astype(np.uint64)
        * (np.uint64(256) ** np.arange(7, -1, -1, dtype=np.uint64))
    ).sum(axis=1, dtype=np.uint64)
    offs = e0 + np.arange(n_max)
    j = offs >> 3
    sh = (offs & 7).astype(np.uint64)
    nxt = raw[j + 8].astype(np.uint64)
    vals = words[j] << sh
    with np.errstate(over="ignore"):
        vals |= np.where(sh > 0, nxt >> (np.uint64(8) - sh), np.uint64(0))
    return vals


def _generic_truncated_points(alpha: DyadicReal, terms) -> np.ndarray:
    a = alpha.to_fraction()
    s = max(int(t).bit_length() for t in terms) + 72
    big = (a.numerator << s) // a.denominator
    mask = (1 << s) - 1
    out = np.empty(len(terms), dtype=np.uint64)
    for i, t in enumerate(terms):
        out[i] = ((big * int(t)) & mask) >> (s - 64)
    return out


def _max_gap_u64(sorted_vals: np.ndarray) -> int:
    if len(sorted_vals) == 1:
        return 1 << 64
    d = np.diff(sorted_vals)
    inner = int(d.max()) if len(d) else 0
    wrap = (1 << 64) - int(sorted_vals[-1]) + int(sorted_vals[0])
    return max(inner, wrap)


def dispersion_scan(
    seq: LacunarySequence,
    alphas,
    n_list,
    eps: float = 0.05,
    truncate_bits: int | None = 64,
    rng_seed: int | None = None,
    measure_label: str = "explicit",
) -> ScanTable:
    """Gap table over (alpha, N) pairs with normalized columns N*G/(ln N)^kappa.

    With truncate_bits=64 the dilates are truncated to 64 fractional bits
    before sorting, which perturbs the maximal gap by at most 2^-63; pass
    truncate_bits=None for the exact dyadic pipeline.
    """
    n_list = sorted(set(int(n) for n in n_list))
    if not n_list or n_list[0] < 1:
        raise ValueError("N values must be positive")
    if len(seq.terms) < n_list[-1]:
        raise ValueError(f"sequence provides {len(seq.terms)} terms, need {n_list[-1]}")
    pow2 = _is_doubling_pow2(seq.terms[: n_list[-1]])
    rows = []
    for aid, alpha in enumerate(alphas):
        if truncate_bits is None:
            pts = dilate(alpha, seq, 1, n_list[-1])
            for n in n_list:
                rep = gap_report(pts[:n], eps)
                g = rep.max_gap.to_fraction()
                rows.append(_mk_row(aid, n, g, eps))
        else:
            if pow2:
                e0 = seq.terms[0].bit_length() - 1
                vals = _pow2_truncated_points(alpha, e0, n_list[-1])
            else:
                vals = _generic_truncated_points(alpha, seq.terms[: n_list[-1]])
            for n in n_list:
                g = Fraction(_max_gap_u64(np.sort(vals[:n])), 1 << 64)
                rows.append(_mk_row(aid, n, g, eps))
    return ScanTable(
        rows=tuple(rows),
        rng_seed=rng_seed,
        measure_label=measure_label,
        epsilon=eps,
        truncated=truncate_bits is not None,
    )


def _mk_row(aid: int, n: int, g: Fraction, eps: float) -> ScanRow:
    ln_n = math.log(n) if n > 1 else float("nan")
    return ScanRow(
        alpha_id=aid,
        n=n,
        max_gap=g,
        norm_log1=n * float(g) / ln_n if n > 1 else float("nan"),
        norm_log2e=n * float(g) / ln_n ** (2 + eps) if n > 1 else float("nan"),
    )


def iid_baseline(n: int, trials: int, rng_seed: int) -> dict:
    """Maximal-spacing statistics of i.i.d. uniforms: N*G/ln N summary."""
    if n < 2:
        raise ValueError("need n >= 2")
    rng = np.random.default_rng(rng_seed)
    ln_n = math.log(n)
    ratios = np.empty(trials)
    for t in range(trials):
        u = np.sort(rng.random(n))
        inner = np.diff(u).max() if n > 1 else 0.0
        g = max(inner, 1.0 - u[-1] + u[0])
        ratios[t] = n * g / ln_n
    return {
        "n": n,
        "trials": trials,
        "seed": rng_seed,
        "mean": float(ratios.mean()),
        "median": float(np.median(ratios)),
        "p95": float(np.percentile(ratios, 95)),
    }


# ---------------------------------------------------------------------------
# smooth window counts
# ---------------------------------------------------------------------------


def _dilate_floats(alpha: DyadicReal, terms) -> np.ndarray:
    return np.array([frac(alpha * int(a)).value.to_float() for a in terms])


def smooth_count_direct(
    alpha: DyadicReal,
    thinned: ThinnedSequence,
    t: float,
    params: MetricParameters,
    bump: BumpFunction,
) -> float:
    """Sum over n and integer shifts u of f((alpha*a~_n - t - u)/(M/N)).

    The window half-width M/N is below 1/2 at every supported N, so at most
    one shift u contributes per point.
    """
    width = params.m.to_float() / params.n
    x = _dilate_floats(alpha, thinned.terms)
    d = x - (t % 1.0)
    d -= np.round(d)  # representative in [-1/2, 1/2): the only candidate shift
    return float(np.sum(bump.value(d / width)))


def smooth_count_fourier(
    alpha: DyadicReal,
    thinned: ThinnedSequence,
    t: float,
    params: MetricParameters,
    bump: BumpFunction,
    k_max: int,
) -> float:
    """(M/N) * sum_{|k| <= k_max} Ff(Mk/N) * sum_n cos(2 pi k (alpha*a~_n - t))."""
    if k_max < params.k_cut:
        raise ValueError(f"k_max {k_max} below truncation floor N/P = {params.k_cut}")
    width = params.m.to_float() / params.n
    x = _dilate_floats(alpha, thinned.terms) - (t % 1.0)
    k = np.arange(1, k_max + 1)
    coeffs = bump.fourier(width * k)
    cos_sums = np.cos(2.0 * np.pi * np.outer(k, x)).sum(axis=1)
    return float(width * (len(x) + 2.0 * (coeffs * cos_sums).sum()))


def fourier_tail_bound(params: MetricParameters, bump: BumpFunction, k_max: int, count: int) -> float:
    """Rigorous bound on the direct-vs-Fourier discrepancy from the transform
    envelope: (M/N) * count * 2 * sum_{k > k_max} |Ff(Mk/N)|."""
    width = params.m.to_float() / params.n
    total = 0.0
    k = k_max + 1
    while True:
        b = bump.tail_bound(width * k)
        total += b
        if b < 1e-22:
            break
        k += 1
    return width * count * 2.0 * total


def linear_independence_bound(thinned_terms, coeff: int) -> bool:
    """Exact check that no +-coeff combination of earlier terms reaches a~_n."""
    acc = 0
    for a in thinned_terms:
        if coeff * acc >= a:
            return False
        acc += a
    return True


# ---------------------------------------------------------------------------
# exponential moment
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MomentCheck:
    lhs: float
    rhs: float
    passed: bool
    method: str
    k_cut: int
    quadrature_points: int
    required_points: int


def _omega_weights(params: MetricParameters, bump: BumpFunction) -> np.ndarray:
    width = params.m.to_float() / params.n
    k = np.arange(1, params.k_cut + 1)
    return width * bump.fourier(width * k)


def exp_moment_check(
    thinned: ThinnedSequence,
    t: float,
    params: MetricParameters,
    bump: BumpFunction,
    quadrature_points: int = 1 << 14,
    method: str = "auto",
) -> MomentCheck:
    """Compare the alpha-average of exp(omega*/(10R)) against exp(Q/50R).

    omega* is the k-truncated window count with the constant (k = 0) term
    removed.  The Simpson path needs >= 8 quadrature points per oscillation
    of the fastest integrand frequency k_cut * a~_K, which caps feasible
    sizes; past that cap the factorized path integrates the single-frequency
    profile once and raises it to the K-th power, which is exact in the limit
    where the thinned frequencies admit no small integer relations (checked
    exactly below, never assumed).
    """
    weights = _omega_weights(params, bump)
    k_cut = params.k_cut
    ten_r = 10.0 * float(params.r_exact)
    rhs = math.exp(params.q.to_float() / (50.0 * float(params.r_exact)))
    terms = thinned.terms
    if not terms or k_cut == 0:
        return MomentCheck(1.0, rhs, True, "empty", k_cut, quadrature_points, 0)

    required = 8 * k_cut * int(terms[-1]) if int(terms[-1]).bit_length() < 62 else -1
    can_simpson = 0 < required <= quadrature_points
    if method == "auto":
        method = "simpson" if can_simpson else "factorized"
    if method == "simpson":
        if not can_simpson:
            raise QuadratureUnderresolvedError(required, quadrature_points)
        lhs = _moment_simpson(terms, t, weights, ten_r, quadrature_points)
    elif method == "factorized":
        if not linear_independence_bound(terms, k_cut):
            raise QuadratureUnderresolvedError(max(required, 0), quadrature_points)
        lhs = _moment_factorized(len(terms), weights, ten_r, k_cut)
    else:
        raise ValueError(f"unknown method {method!r}")
    return MomentCheck(
        lhs=lhs,
        rhs=rhs,
        passed=lhs <= 1.1 * rhs,
        method=method,
        k_cut=k_cut,
        quadrature_points=quadrature_points,
        required_points=max(required, 0),
    )


def _moment_simpson(terms, t, weights, ten_r, n_q):
    if n_q % 2:
        n_q += 1
    # alpha = i/n_q makes every dilate an exact grid rational:
    # {alpha * a~_n} = (i * (a~_n mod n_q) mod n_q) / n_q
    residues = np.array([int(a) % n_q for a in terms], dtype=np.int64)
    i = np.arange(n_q + 1, dtype=np.int64)
    k = np.arange(1, len(weights) + 1)
    vals = np.zeros(n_q + 1)
    for rcount in np.unique(residues):
        mult = int((residues == rcount).sum())
        theta = ((i * int(rcount)) % n_q) / n_q - t
        vals += mult * 2.0 * (
            weights[:, None] * np.cos(2.0 * np.pi * np.outer(k, theta))
        ).sum(axis=0)
    integrand = np.exp(vals / ten_r)
    return float(simpson(integrand, dx=1.0 / n_q))


def _moment_factorized(count, weights, ten_r, k_cut):
    m = max(4096, 64 * k_cut)
    theta = np.arange(m + 1) / m
    k = np.arange(1, len(weights) + 1)
    g = 2.0 * (weights[:, None] * np.cos(2.0 * np.pi * np.outer(k, theta))).sum(axis=0)
    c0 = float(simpson(np.exp(g / ten_r), dx=1.0 / m))
    return c0**count


# ---------------------------------------------------------------------------
# exponent fit
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExponentFit:
    median: float
    q25: float
    q75: float
    per_alpha: dict = field(default_factory=dict)


def exponent_fit(table: ScanTable) -> ExponentFit:
    """Per-alpha least-squares slope of ln(N*G) against ln ln N, aggregated."""
    by_alpha = {}
    for r in table.rows:
        if r.n >= 3 and r.max_gap > 0:
            by_alpha.setdefault(r.alpha_id, []).append(r)
    n_distinct = len({r.n for rs in by_alpha.values() for r in rs})
    if n_distinct < 3 or len(by_alpha) < 10:
        raise FitUnderdeterminedError(
            f"fit-underdetermined: {len(by_alpha)} alphas, {n_distinct} N values"
        )
    slopes = {}
    for aid, rs in by_alpha.items():
        if len({r.n for r in rs}) < 3:
            continue
        xs = np.array([math.log(math.log(r.n)) for r in rs])
        ys = np.array([math.log(r.n * float(r.max_gap)) for r in rs])
        slopes[aid] = float(np.polyfit(xs, ys, 1)[0])
    if len(slopes) < 10:
        raise FitUnderdeterminedError("fit-underdetermined: too few usable alphas")
    vals = np.array(sorted(slopes.values()))
    return ExponentFit(
        median=float(np.median(vals)),
        q25=float(np.percentile(vals, 25)),
        q75=float(np.percentile(vals, 75)),
        per_alpha=slopes,
    )
