"""Lacunary (Hadamard) integer sequences and step-strided thinnings.

A sequence is lacunary with growth factor r > 1 when a_{n+1} >= r * a_n for all
n.  The thinned subsequence a~_n = a_{n*step} with step = l * floor((ln N)^kappa)
(l the smallest integer with r^l > e) has consecutive ratios exceeding N^xi with
xi = l*ln r > 1, which is what makes small integer combinations of its terms
linearly independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp

from .errors import NBelowThresholdError, NotLacunaryError

_LN_DPS = 40
_LN_GUARD = Fraction(1, 1 << 60)


def _mpf_fraction(x) -> Fraction:
    sign, man, exp, _ = mp.mpf(x)._mpf_
    man, exp = int(man), int(exp)  # may be gmpy2 types; keep Fractions pure
    val = Fraction(man) * Fraction(2) ** exp
    return -val if sign else val


def ln_bounds(x: Fraction | int) -> tuple[Fraction, Fraction]:
    """Rational lower/upper bounds on ln(x), tight to ~2^-60."""
    x = Fraction(x)
    if x <= 0:
        raise ValueError("ln of non-positive value")
    with mp.workdps(_LN_DPS):
        v = _mpf_fraction(mp.log(mp.mpf(x.numerator) / x.denominator))
    return v - _LN_GUARD, v + _LN_GUARD


def ln_lower(x) -> Fraction:
    return ln_bounds(x)[0]


def ln_upper(x) -> Fraction:
    return ln_bounds(x)[1]


@dataclass(frozen=True)
class LacunarySequence:
    terms: tuple[int, ...]
    growth_factor_r: Fraction
    verified: bool

    def __len__(self):
        return len(self.terms)

    def term(self, n: int) -> int:
        """1-based access: a_n."""
        return self.terms[n - 1]


@dataclass(frozen=True)
class ThinnedSequence:
    parent: LacunarySequence
    l: int
    step: int
    K: int
    terms: tuple[int, ...]
    xi: float
    index_offset: int = 0  # a~_n = parent term at index_offset + n*step (1-based)


def smallest_l(r: Fraction) -> int:
    """Smallest positive integer l with r^l > e."""
    if r <= 1:
        raise NotLacunaryError(f"growth factor {r} is not > 1")
    lo = ln_lower(r)
    if lo <= 0:
        # r barely above 1 at our guard resolution; fall back to search
        l = 1
        while ln_lower(r) * l <= 1:
            l += 1
        return l
    l = 1
    while lo * l <= 1:
        l += 1
    return l


def verify_hadamard(terms, r: Fraction) -> tuple[bool, int | None]:
    """Check a_{n+1} >= r*a_n for every pair; returns (ok, first bad 1-based n+1)."""
    terms = list(terms)
    if not terms or any(t <= 0 for t in terms):
        raise ValueError("terms must be nonempty and positive")
    r = Fraction(r)
    for i in range(len(terms) - 1):
        if terms[i + 1] * r.denominator < r.numerator * terms[i]:
            return False, i + 2
    return True, None


def geometric_sequence(r: Fraction, n_terms: int) -> LacunarySequence:
    """Terms ceil(r^n), bumped minimally so the Hadamard condition holds exactly."""
    r = Fraction(r)
    if r <= 1:
        raise NotLacunaryError(f"growth factor {r} is not > 1")
    terms = []
    if r.denominator == 1:
        b = r.numerator
        power = 1
        for _ in range(n_terms):
            power *= b
            terms.append(power)
    else:
        power = Fraction(1)
        prev = None
        for _ in range(n_terms):
            power *= r
            t = -((-power.numerator) // power.denominator)  # ceil
            if prev is not None:
                need = -((-r.numerator * prev) // r.denominator)  # ceil(r*prev)
                t = max(t, need)
            terms.append(t)
            prev = t
    ok, bad = verify_hadamard(terms, r)
    assert ok, f"construction violated Hadamard at {bad}"
    return LacunarySequence(tuple(terms), r, True)


def _floor_log_power(n: int, exponent: Fraction) -> int:
    """floor((ln n)^exponent), via high-precision evaluation."""
    with mp.workdps(_LN_DPS):
        v = mp.power(mp.log(n), mp.mpf(exponent.numerator) / exponent.denominator)
        return int(mp.floor(v))


def _floor_quotient(n: int, l: int, exponent: Fraction) -> int:
    """floor(N / (l * (ln N)^exponent))."""
    with mp.workdps(_LN_DPS):
        v = n / (l * mp.power(mp.log(n), mp.mpf(exponent.numerator) / exponent.denominator))
        return int(mp.floor(v))


def thin(seq: LacunarySequence, N: int, exponent: Fraction = Fraction(1)) -> ThinnedSequence:
    """Step-strided subsequence a~_n = a_{n*step}, step = l*floor((ln N)^exponent).

    K = floor(N / (l*(ln N)^exponent)); rejects N too small for a positive step
    or a positive K instead of clamping.
    """
    exponent = Fraction(exponent)
    if exponent < 1:
        raise ValueError("thinning exponent must be >= 1")
    if len(seq.terms) < N:
        raise ValueError(f"sequence provides {len(seq.terms)} terms, need {N}")
    l = smallest_l(seq.growth_factor_r)
    if N < 3:
        raise NBelowThresholdError(f"N-below-threshold: N={N}")
    step = l * _floor_log_power(N, exponent)
    K = _floor_quotient(N, l, exponent)
    if step < 1 or K < 1:
        raise NBelowThresholdError(f"N-below-threshold: N={N} gives step={step}, K={K}")
    terms = tuple(seq.term(n * step) for n in range(1, K + 1))
    xi = l * float(ln_lower(seq.growth_factor_r))
    return ThinnedSequence(seq, l, step, K, terms, xi)


def thin_block(seq: LacunarySequence, N: int) -> ThinnedSequence:
    """Thinning of the translated block (N, 2N]: a~_n = a_{N + n*step}."""
    if len(seq.terms) < 2 * N:
        raise ValueError(f"sequence provides {len(seq.terms)} terms, need {2 * N}")
    l = smallest_l(seq.growth_factor_r)
    if N < 3:
        raise NBelowThresholdError(f"N-below-threshold: N={N}")
    step = l * _floor_log_power(N, Fraction(1))
    K = _floor_quotient(N, l, Fraction(1))
    if step < 1 or K < 1:
        raise NBelowThresholdError(f"N-below-threshold: N={N} gives step={step}, K={K}")
    terms = tuple(seq.term(N + n * step) for n in range(1, K + 1))
    xi = l * float(ln_lower(seq.growth_factor_r))
    return ThinnedSequence(seq, l, step, K, terms, xi, index_offset=N)


def save_sequence(path, seq: LacunarySequence) -> None:
    r = seq.growth_factor_r
    with open(path, "w") as fh:
        fh.write(f"# r={r.numerator}/{r.denominator}\n")
        for t in seq.terms:
            fh.write(f"{t}\n")


def load_sequence(path) -> LacunarySequence:
    with open(path) as fh:
        header = fh.readline().strip()
        if not header.startswith("# r="):
            raise ValueError("missing '# r=<rational>' header")
        r = Fraction(header[4:])
        terms = tuple(int(line) for line in fh if line.strip())
    ok, _ = verify_hadamard(terms, r)
    return LacunarySequence(terms, r, ok)
