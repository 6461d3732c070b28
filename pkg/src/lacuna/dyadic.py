"""Exact dyadic arithmetic on the unit torus, and gap statistics.

A dyadic real is mantissa * 2**exponent with an odd (or zero) mantissa, so the
representation is unique.  Addition and multiplication of dyadics are exact;
rounding happens only through explicit round_to() calls (round-to-nearest-even).
All torus computations (fractional parts, sorting, gap vectors) are exact
integer arithmetic at a common exponent, so gap vectors sum to one exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction

from .errors import EmptyConfigurationError, PrecisionTooLowError

DEFAULT_PRECISION_BITS = 96


def _ctz(n: int) -> int:
    """Count trailing zero bits of a nonzero integer."""
    return (n & -n).bit_length() - 1


@dataclass(frozen=True, eq=False)
class DyadicReal:
    mantissa: int
    exponent: int
    precision_bits: int = DEFAULT_PRECISION_BITS

    def __post_init__(self):
        m, e = self.mantissa, self.exponent
        if m == 0:
            e = 0
        elif m % 2 == 0:
            s = _ctz(m)
            m >>= s
            e += s
        object.__setattr__(self, "mantissa", m)
        object.__setattr__(self, "exponent", e)
        if self.precision_bits <= 0:
            raise ValueError("precision_bits must be positive")

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_int(cls, n: int, precision_bits: int = DEFAULT_PRECISION_BITS):
        return cls(n, 0, precision_bits)

    @classmethod
    def from_float(cls, x: float, precision_bits: int = DEFAULT_PRECISION_BITS):
        if x != x or x in (float("inf"), float("-inf")):
            raise ValueError("non-finite float")
        m, e = math.frexp(x)
        m = int(m * (1 << 53))
        return cls(m, e - 53, precision_bits)

    @classmethod
    def from_fraction(cls, fr: Fraction, precision_bits: int = DEFAULT_PRECISION_BITS):
        """Round a rational to the nearest dyadic with precision_bits significant
        bits (ties to even)."""
        fr = Fraction(fr)
        if fr == 0:
            return cls(0, 0, precision_bits)
        p, q = fr.numerator, fr.denominator
        sign = -1 if p < 0 else 1
        p = abs(p)
        # scale so that the quotient has exactly precision_bits bits
        shift = precision_bits - (p.bit_length() - q.bit_length()) - 1
        if shift >= 0:
            num, den = p << shift, q
        else:
            num, den = p, q << (-shift)
        quot, rem = divmod(num, den)
        if quot.bit_length() != precision_bits:
            # off-by-one from the bit_length estimate
            shift += precision_bits - quot.bit_length()
            if shift >= 0:
                num, den = p << shift, q
            else:
                num, den = p, q << (-shift)
            quot, rem = divmod(num, den)
        # round to nearest, ties to even
        twice = 2 * rem
        if twice > den or (twice == den and quot % 2 == 1):
            quot += 1
        return cls(sign * quot, -shift, precision_bits)

    # -- value access -------------------------------------------------------

    def to_fraction(self) -> Fraction:
        if self.exponent >= 0:
            return Fraction(self.mantissa << self.exponent)
        return Fraction(self.mantissa, 1 << -self.exponent)

    def to_float(self) -> float:
        m, e = self.mantissa, self.exponent
        if m == 0:
            return 0.0
        bl = m.bit_length()
        if bl > 64:
            m >>= bl - 64
            e += bl - 64
        return math.ldexp(m, e)

    def decimal_str(self, digits: int = 30) -> str:
        return format_decimal(self.to_fraction(), digits)

    def hex_pair(self) -> tuple[str, int]:
        """Lossless (hex mantissa, exponent) rendering."""
        m = self.mantissa
        s = ("-" if m < 0 else "") + hex(abs(m))
        return s, self.exponent

    # -- arithmetic (exact) -------------------------------------------------

    def _with(self, m, e):
        return DyadicReal(m, e, self.precision_bits)

    def __neg__(self):
        return self._with(-self.mantissa, self.exponent)

    def __abs__(self):
        return self._with(abs(self.mantissa), self.exponent)

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        e = min(self.exponent, other.exponent)
        m = (self.mantissa << (self.exponent - e)) + (
            other.mantissa << (other.exponent - e)
        )
        return DyadicReal(m, e, min(self.precision_bits, other.precision_bits))

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return DyadicReal(
            self.mantissa * other.mantissa,
            self.exponent + other.exponent,
            min(self.precision_bits, other.precision_bits),
        )

    __rmul__ = __mul__

    def _cmp(self, other) -> int:
        other = _coerce(other)
        e = min(self.exponent, other.exponent)
        a = self.mantissa << (self.exponent - e)
        b = other.mantissa << (other.exponent - e)
        return (a > b) - (a < b)

    def __eq__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self._cmp(o) == 0

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __hash__(self):
        return hash((self.mantissa, self.exponent))

    def floor(self) -> int:
        if self.exponent >= 0:
            return self.mantissa << self.exponent
        return self.mantissa >> -self.exponent  # arithmetic shift: floor

    def round_to(self, precision_bits: int) -> "DyadicReal":
        """Round to precision_bits significant bits, ties to even."""
        if precision_bits <= 0:
            raise ValueError("precision_bits must be positive")
        m, e = self.mantissa, self.exponent
        if m == 0:
            return DyadicReal(0, 0, precision_bits)
        sign = -1 if m < 0 else 1
        m = abs(m)
        drop = m.bit_length() - precision_bits
        if drop <= 0:
            return DyadicReal(sign * m, e, precision_bits)
        keep = m >> drop
        rem = m - (keep << drop)
        half = 1 << (drop - 1)
        if rem > half or (rem == half and keep % 2 == 1):
            keep += 1
        return DyadicReal(sign * keep, e + drop, precision_bits)

    def __repr__(self):
        return f"DyadicReal({self.decimal_str(12)})"


def _coerce(x):
    if isinstance(x, DyadicReal):
        return x
    if isinstance(x, int):
        return DyadicReal(x, 0)
    return NotImplemented


ZERO = DyadicReal(0, 0)
ONE = DyadicReal(1, 0)


def format_decimal(fr: Fraction, digits: int = 30) -> str:
    """Decimal string of a rational with the given number of significant digits."""
    with localcontext() as ctx:
        ctx.prec = digits
        d = Decimal(fr.numerator) / Decimal(fr.denominator)
    return str(d)


# ---------------------------------------------------------------------------
# torus points and gaps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TorusPoint:
    value: DyadicReal

    def __post_init__(self):
        v = self.value
        if not (ZERO <= v and v < ONE):
            raise ValueError("torus point must lie in [0, 1)")

    def to_float(self):
        return self.value.to_float()


def frac(x: DyadicReal) -> TorusPoint:
    """Fractional part, always in [0, 1) (also for negative arguments)."""
    fl = x.floor()
    return TorusPoint(x - fl)


def dist_nearest_int(x: DyadicReal) -> DyadicReal:
    """Distance to the nearest integer; exact, in [0, 1/2]."""
    f = frac(x).value
    other = ONE - f
    return f if f <= other else other


@dataclass(frozen=True)
class GapReport:
    n_points: int
    sorted_points: tuple[TorusPoint, ...]
    gaps: tuple[DyadicReal, ...]
    max_gap: DyadicReal
    normalized: dict

    def to_json_dict(self, digits: int = 30) -> dict:
        return {
            "n": self.n_points,
            "max_gap": self.max_gap.decimal_str(digits),
            "normalized_log1": format_decimal(self.normalized.get(1.0, Fraction(0)), digits),
            "normalized_log2": format_decimal(self.normalized.get(2.0, Fraction(0)), digits),
        }

    def to_csv_row(self, digits: int = 30) -> str:
        d = self.to_json_dict(digits)
        return f"{d['n']},{d['max_gap']},{d['normalized_log1']},{d['normalized_log2']}"


def _normalized_map(n: int, max_gap: Fraction, eps: float) -> dict:
    """N*G / (ln N)^kappa for kappa in {1, 2, 2+eps}; empty when ln N == 0."""
    if n < 2:
        return {}
    ln_n = math.log(n)
    out = {}
    for kappa in (1.0, 2.0, 2.0 + eps):
        out[kappa] = Fraction(n) * max_gap / Fraction.from_float(ln_n**kappa)
    return out


def gap_report(points, eps: float = 0.05) -> GapReport:
    """Sorted configuration, exact gap vector including the wrap-around gap."""
    points = list(points)
    if not points:
        raise EmptyConfigurationError("empty-configuration")
    exps = [p.value.exponent for p in points if p.value.mantissa != 0]
    e = min(exps) if exps else 0
    e = min(e, 0)
    ints = sorted(
        (p.value.mantissa << (p.value.exponent - e)) for p in points
    )
    one = 1 << -e
    gaps_i = [b - a for a, b in zip(ints, ints[1:])]
    gaps_i.append(one - ints[-1] + ints[0])
    assert sum(gaps_i) == one
    max_i = max(gaps_i)
    prec = min(p.value.precision_bits for p in points)
    as_dy = lambda m: DyadicReal(m, e, prec)
    n = len(points)
    report = GapReport(
        n_points=n,
        sorted_points=tuple(TorusPoint(as_dy(m)) for m in ints),
        gaps=tuple(as_dy(g) for g in gaps_i),
        max_gap=as_dy(max_i),
        normalized=_normalized_map(n, Fraction(max_i, one), eps),
    )
    return report


def dilate(alpha: DyadicReal, seq, start: int = 1, stop: int | None = None):
    """Fractional parts {alpha * a_n} for n in [start, stop] (1-based, inclusive).

    Demands alpha carry at least bit_length(a_max) + 32 bits so every gap of the
    dilated set is resolved to >= 32 fractional bits beyond 1/a_max.
    """
    terms = seq.terms if hasattr(seq, "terms") else seq
    if stop is None:
        stop = len(terms)
    window = terms[start - 1 : stop]
    if not window:
        return []
    required = max(int(t).bit_length() for t in window) + 32
    if alpha.precision_bits < required:
        raise PrecisionTooLowError(required, alpha.precision_bits)
    return [frac(alpha * int(a)) for a in window]
