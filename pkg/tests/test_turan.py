import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lacuna.dyadic import DyadicReal, dilate, gap_report
from lacuna.errors import (
    DeltaUncertifiableError,
    EpsilonDomainError,
    IntervalTooShortError,
    NotSuperLacunaryError,
)
from lacuna.sequences import ThinnedSequence, geometric_sequence, thin
from lacuna.turan import (
    delta_lower_bound,
    equidistant_targets,
    find_alpha,
    find_dilation,
    find_dilation_block,
    find_dilation_dense,
    turan_M,
)


def pseudo_thinned(terms, K=None):
    terms = tuple(terms)
    return ThinnedSequence(
        parent=None, l=1, step=1, K=K or len(terms), terms=terms, xi=2.0
    )


class TestTuranM:
    def test_examples(self):
        assert turan_M(Fraction(1, 4), 4) == 12
        assert turan_M(Fraction(2, 5), 2) == 5
        assert turan_M(Fraction(1, 4), 1) == 6

    def test_epsilon_domain(self):
        with pytest.raises(EpsilonDomainError):
            turan_M(Fraction(1, 2), 4)
        with pytest.raises(EpsilonDomainError):
            turan_M(Fraction(0), 4)

    @given(
        st.fractions(min_value=Fraction(1, 100), max_value=Fraction(49, 100)),
        st.integers(1, 1000),
    )
    def test_dominates_float_formula(self, eps, K):
        m = turan_M(eps, K)
        assert m >= (1 / float(eps)) * math.log(K / float(eps)) - 1e-6


class TestDeltaLowerBound:
    def test_examples(self):
        assert delta_lower_bound(pseudo_thinned((1, 1000, 1000000)), 10) == 1
        assert delta_lower_bound(pseudo_thinned((1, 2)), 1) == 1

    def test_domination_failure(self):
        with pytest.raises(DeltaUncertifiableError) as exc:
            delta_lower_bound(pseudo_thinned((1, 5)), 10)
        assert exc.value.index == 2

    @settings(max_examples=200, deadline=None)
    @given(
        st.integers(1, 5),
        st.integers(1, 6),
        st.data(),
    )
    def test_sound_against_exhaustive_oracle(self, K, M, data):
        # grow terms fast enough that certification *may* hold, then compare
        # against complete enumeration of nonzero coefficient vectors
        terms = [data.draw(st.integers(1, 50))]
        for _ in range(K - 1):
            terms.append(terms[-1] * data.draw(st.integers(M + 1, 8 * M)) + data.draw(st.integers(0, 10)))
        th = pseudo_thinned(terms)
        try:
            delta = delta_lower_bound(th, M)
        except DeltaUncertifiableError:
            return
        true_min = min(
            abs(sum(m * a for m, a in zip(vec, terms)))
            for vec in itertools.product(range(-M, M + 1), repeat=K)
            if any(vec)
        )
        assert 0 < delta <= true_min


class TestEquidistantTargets:
    def test_small(self):
        assert [t.value.to_fraction() for t in equidistant_targets(1)] == [0]
        assert [t.value.to_fraction() for t in equidistant_targets(4)] == [
            Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)
        ]

    def test_thirds_are_rounded(self):
        pts = equidistant_targets(3, 96)
        assert abs(pts[1].value.to_fraction() - Fraction(1, 3)) < Fraction(1, 1 << 90)


class TestFindDilation:
    def test_single_frequency_exact_hit(self):
        cert = find_dilation(pseudo_thinned((5,)), [Fraction(0)], Fraction(1, 10))
        # band midpoint hits the target up to the dyadic rounding of alpha
        assert cert.constraints[0].achieved <= Fraction(1, 1 << 60)

    def test_three_decades(self):
        th = pseudo_thinned((1000, 10**6, 10**9))
        targets = [Fraction(0), Fraction(1, 3), Fraction(2, 3)]
        cert = find_dilation(th, targets, Fraction(1, 100))
        av = cert.alpha.to_fraction()
        for a, x in zip(th.terms, targets):
            f = av * a - x
            f -= math.floor(f)
            assert min(f, 1 - f) <= Fraction(1, 100)

    def test_achieved_recorded_and_bounded(self):
        seq = geometric_sequence(Fraction(2), 1024)
        th = thin(seq, 1024)
        eps = Fraction(2) * Fraction(69, 10) / 1024  # ~ l ln N / (2N) scale
        cert = find_dilation(
            th, [Fraction(j, th.K) for j in range(th.K)], eps
        )
        assert all(c.achieved <= eps for c in cert.constraints)
        assert cert.max_gap_bound == Fraction(1, th.K) + 2 * eps

    def test_full_set_gap_below_bound(self):
        seq = geometric_sequence(Fraction(2), 1024)
        cert = find_alpha(seq, 1024)
        rep = gap_report(dilate(cert.alpha, seq, 1, 1024))
        assert rep.max_gap.to_fraction() <= cert.max_gap_bound

    def test_interval_too_short(self):
        th = pseudo_thinned((5,))
        with pytest.raises(IntervalTooShortError):
            find_dilation(
                th, [Fraction(0)], Fraction(1, 10),
                (Fraction(0), Fraction(1, 100)),
            )

    def test_alpha_inside_interval(self):
        th = pseudo_thinned((1000, 10**6, 10**9))
        lo, hi = Fraction(3, 10), Fraction(7, 10)
        cert = find_dilation(
            th, [Fraction(0), Fraction(1, 3), Fraction(2, 3)],
            Fraction(1, 100), (lo, hi),
        )
        assert lo <= cert.alpha.to_fraction() <= hi


class TestFindAlpha:
    @pytest.mark.parametrize("r,N", [(2, 256), (2, 1024), (3, 256), (3, 1024)])
    def test_gap_within_3l_log_over_n(self, r, N):
        seq = geometric_sequence(Fraction(r), N)
        cert = find_alpha(seq, N)
        rep = gap_report(dilate(cert.alpha, seq, 1, N))
        l = 2 if r == 2 else 1
        assert rep.max_gap.to_fraction() <= Fraction(3 * l) * Fraction(
            math.log(N)
        ).limit_denominator(10**12) * Fraction(1, N) * Fraction(101, 100)

    def test_determinism(self):
        seq = geometric_sequence(Fraction(2), 512)
        a1 = find_alpha(seq, 512).alpha
        a2 = find_alpha(seq, 512).alpha
        assert a1 == a2


class TestFindDilationBlock:
    def test_interval_boundary_accepted(self):
        seq = geometric_sequence(Fraction(2), 512)
        a_n = seq.term(256)
        lo = Fraction(3, 10)
        cert = find_dilation_block(seq, 256, (lo, lo + Fraction(4, a_n)))
        assert lo <= cert.alpha.to_fraction() <= lo + Fraction(4, a_n)
        # verify the block gap directly
        pts = dilate(cert.alpha, seq, 257, 512)
        rep = gap_report(pts)
        assert rep.max_gap.to_fraction() <= cert.max_gap_bound

    def test_short_interval_rejected(self):
        seq = geometric_sequence(Fraction(2), 512)
        a_n = seq.term(256)
        with pytest.raises(IntervalTooShortError):
            find_dilation_block(seq, 256, (Fraction(0), Fraction(1, a_n)))


class TestFindDilationDense:
    def test_squares_exponent_tail(self):
        terms = [2 ** (n * n) for n in range(3, 11)]  # ratios 2^7 .. 2^19
        cert = find_dilation_dense(terms, 8, Fraction(7, 3))
        assert cert.max_gap_bound == Fraction(3, 8)
        alpha = cert.alpha.to_fraction()
        pts = [((alpha * t) % 1) for t in terms]
        pts.sort()
        gaps = [b - a for a, b in zip(pts, pts[1:])] + [1 - pts[-1] + pts[0]]
        assert max(gaps) <= Fraction(3, 8)

    def test_geometric_n_squared(self):
        terms = [256**n for n in range(1, 17)]
        cert = find_dilation_dense(terms, 16, Fraction(2))
        assert cert.max_gap_bound == Fraction(3, 16)

    def test_plain_powers_rejected(self):
        with pytest.raises(NotSuperLacunaryError):
            find_dilation_dense([2**n for n in range(1, 17)], 16, Fraction(2))
