from fractions import Fraction as F

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from shiftcharge import Sign, SignPattern, moment
from shiftcharge.errors import InvalidParams, TruncationTooDeep, UnknownPattern
from shiftcharge.grws import (
    Boundary,
    GrwsParams,
    SectorTag,
    classify_sector,
    expected_sign_pattern,
    grws_charge,
    grws_coefficients,
    grws_moments,
    grws_multiplier,
    grws_weight_sq,
    normalizer_product,
)

square = st.builds(F, st.integers(-99, 99), st.integers(100, 100))
# away from the corners the exact truncation stays shallow
inner = st.builds(F, st.integers(-3, 3), st.integers(4, 4)) | st.builds(F, st.integers(-29, 29), st.integers(40, 40))
bases = st.sampled_from([F(3, 2), F(2), F(3), F(5, 2)])


def params(p, N, D):
    return GrwsParams.of(p, N, D)


class TestParams:
    @pytest.mark.parametrize("p,N,D", [(1, 0, 0), (F(1, 2), 0, 0), (2, 1, 0), (2, 0, -1)])
    def test_rejects(self, p, N, D):
        with pytest.raises(InvalidParams):
            GrwsParams.of(p, N, D)

    def test_accepts_strings(self):
        assert GrwsParams.of("2", "-1/2", "-0.75").D == F(-3, 4)


class TestWeights:
    def test_diagonal_unweighted(self):
        pr = params(2, F(1, 3), F(1, 3))
        assert all(grws_weight_sq(pr, n) == 1 for n in range(10))

    def test_first_weight(self):
        assert grws_weight_sq(params(2, "-1/2", "-3/4"), 0) == 2

    @given(bases, square, square, st.integers(1, 30))
    def test_limit_bound(self, p, N, D, n):
        pr = GrwsParams(p, N, D)
        assert abs(grws_weight_sq(pr, n) - 1) <= (abs(N) + abs(D)) / (p**n - 1)


class TestMultipliers:
    def test_example(self):
        pr = params(2, "-1/2", "-3/4")
        assert grws_multiplier(pr, 1) == F(-1, 2)
        assert grws_multiplier(pr, 2) == F(1, 6)

    def test_m0(self):
        assert grws_multiplier(params(2, 0, 0), 0) == 1

    @pytest.mark.parametrize("j", [0, 1, 2, 3])
    def test_special_line_zero(self, j):
        p = F(3, 2)
        N = F(1, 10)
        pr = GrwsParams(p, N, p**j * N)
        assert grws_multiplier(pr, j + 1) == 0
        assert all(c == 0 for c in grws_coefficients(pr, j + 6)[j + 1 :])

    @given(bases, square, square, st.integers(1, 40))
    def test_limit(self, p, N, D, i):
        pr = GrwsParams(p, N, D)
        # m_i + N = (pD - N)/(p^i - 1)
        assert abs(grws_multiplier(pr, i) + N) <= abs(p * D - N) * p / (p - 1) * p ** (-i)

    @given(bases, square, square)
    def test_recurrence(self, p, N, D):
        pr = GrwsParams(p, N, D)
        c = grws_coefficients(pr, 10)
        assert c[0] == 1
        assert all(c[n] == c[n - 1] * grws_multiplier(pr, n) for n in range(1, 11))


class TestCharge:
    def test_special_line_two_atoms(self):
        pr = params(2, F(-1, 5), F(-2, 5))
        gc = grws_charge(pr)
        assert gc.exact and len(gc.charge) == 2
        C = gc.a_estimate
        m1 = grws_multiplier(pr, 1)
        assert gc.charge.densities == (C, C * m1)
        assert gc.charge.positions == (1, F(1, 2))

    def test_special_line_three_atoms(self):
        pr = params(2, F(-1, 5), F(-4, 5))
        gc = grws_charge(pr)
        assert gc.exact and len(gc.charge) == 3

    def test_exact_charge_reproduces_moments(self):
        pr = params(3, F(1, 4), F(3, 4))
        gc = grws_charge(pr)
        m = grws_moments(pr)
        assert all(moment(gc.charge, n) == m[n] for n in range(12))

    def test_viiia_depth_four(self):
        gc = grws_charge(params(2, "-1/2", "-3/4"), depth=4)
        assert str(gc.sign_pattern()) == "+,-,-,-,-"
        assert gc.coefficients[1:3] == (F(-1, 2), F(-1, 12))

    def test_fixed_depth_keeps_zeros(self):
        gc = grws_charge(params(2, F(1, 4), F(1, 2)), depth=4)
        assert str(gc.sign_pattern()) == "+,+,0,0,0"

    def test_epsilon_controls_tail(self):
        gc = grws_charge(params(2, "-1/2", "-3/4"), epsilon=F(1, 10**6))
        assert gc.coefficient_tail < F(1, 10**6)
        assert gc.charge.normalized

    def test_slow_decay_gives_up(self):
        with pytest.raises(TruncationTooDeep):
            grws_charge(params(F(3, 2), F(-99, 100), 0), max_depth=50)

    def test_bad_epsilon(self):
        with pytest.raises(ValueError):
            grws_charge(params(2, 0, F(1, 2)), epsilon=0)

    @settings(max_examples=40, deadline=None)
    @given(bases, inner, inner)
    def test_moments_within_bound(self, p, N, D):
        pr = GrwsParams(p, N, D)
        gc = grws_charge(pr, epsilon=F(1, 10**9))
        m = grws_moments(pr)
        for n in range(17):
            assert abs(moment(gc.charge, n) - m[n]) <= gc.moment_error(n)

    @settings(max_examples=25, deadline=None)
    @given(bases, inner, inner)
    def test_normalizer_is_infinite_product(self, p, N, D):
        pr = GrwsParams(p, N, D)
        gc = grws_charge(pr, epsilon=F(1, 10**9))
        terms = 80
        prod = normalizer_product(pr, terms)
        # remaining factors differ from 1 by at most |N - D| / (p^j - 1)
        rest = sum((abs(N - D) / (p**j - 1) for j in range(terms, terms + 200)), F(0))
        slack = prod * (2 * rest + F(1, 10**40))
        assert prod > 0
        assert abs(gc.a_estimate - prod) <= gc.a_error + slack


class TestClassify:
    def test_figure_point_sector_one(self):
        assert classify_sector(params(2, F(-3, 5), F(-3, 10))).tag is SectorTag.I

    def test_viiib(self):
        assert classify_sector(params(2, F(-2, 5), F(-9, 10))).tag is SectorTag.VIIIB

    def test_viiia(self):
        assert classify_sector(params(2, F(-1, 2), F(-3, 4))).tag is SectorTag.VIIIA

    def test_special_line_iv(self):
        s = classify_sector(params(2, F(1, 4), F(1, 2)))
        assert s.tag is SectorTag.IV and s.special_line == 1

    def test_origin(self):
        s = classify_sector(params(2, 0, 0))
        assert s.tag is None and s.boundary is Boundary.ORIGIN

    @pytest.mark.parametrize(
        "N,D,tag",
        [
            (F(-1, 2), F(1, 4), SectorTag.II),
            (F(-1, 4), F(1, 2), SectorTag.III),
            (F(1, 4), F(1, 3), SectorTag.IV),
            (F(1, 2), F(1, 4), SectorTag.V),
            (F(1, 2), F(-1, 4), SectorTag.VI),
            (F(1, 4), F(-1, 2), SectorTag.VII),
            (F(-1, 10), F(-1, 2), SectorTag.VIII),
        ],
    )
    def test_quadrants(self, N, D, tag):
        assert classify_sector(params(2, N, D)).tag is tag

    @pytest.mark.parametrize(
        "N,D,boundary",
        [
            (F(1, 3), F(1, 3), Boundary.DIAGONAL),
            (F(1, 3), F(-1, 3), Boundary.ANTIDIAGONAL),
            (0, F(1, 2), Boundary.D_AXIS),
            (F(1, 2), 0, Boundary.N_AXIS),
        ],
    )
    def test_boundaries(self, N, D, boundary):
        s = classify_sector(params(2, N, D))
        assert s.tag is None and s.boundary is boundary

    def test_viiib_special_lines_included(self):
        p = F(2)
        assert classify_sector(GrwsParams(p, F(-1, 5), F(-2, 5))).special_line == 1
        assert classify_sector(GrwsParams(p, F(-1, 5), F(-4, 5))).tag is SectorTag.VIIIB

    @given(bases, square, square)
    def test_exactly_one_label(self, p, N, D):
        s = classify_sector(GrwsParams(p, N, D))
        assert (s.tag is None) != (s.boundary is None)
        if s.special_line is not None and s.tag is not None:
            assert D == p**s.special_line * N


class TestTemplates:
    def test_viiia(self):
        t = expected_sign_pattern(classify_sector(params(2, F(-1, 2), F(-3, 4))))
        assert str(t.expand(4)) == "+,-,-,-"

    def test_sector_three(self):
        t = expected_sign_pattern(classify_sector(params(2, F(-1, 4), F(1, 2))))
        assert set(t.expand(10)) == {Sign.PLUS}

    @pytest.mark.parametrize("N,D", [(F(1, 2), F(1, 4)), (F(1, 2), F(-1, 4)), (F(1, 4), F(-1, 2))])
    def test_mixed_sectors_unknown(self, N, D):
        with pytest.raises(UnknownPattern):
            expected_sign_pattern(classify_sector(params(2, N, D)))

    def test_iv_band_alternates(self):
        s = classify_sector(params(2, F(1, 8), F(3, 8)))
        assert s.band == 1 and s.special_line is None
        assert str(expected_sign_pattern(s).expand(6)) == "+,+,+,-,+,-"

    def test_k_hint(self):
        s = classify_sector(params(2, F(1, 8), F(3, 8)))
        assert str(expected_sign_pattern(s, k_hint=0).expand(4)) == "+,+,-,+"

    @settings(max_examples=40, deadline=None)
    @given(bases, square, square)
    def test_templates_match_coefficients(self, p, N, D):
        pr = GrwsParams(p, N, D)
        try:
            template = expected_sign_pattern(classify_sector(pr))
        except UnknownPattern:
            assume(False)
        gc = grws_charge(pr, depth=12)
        assert gc.sign_pattern() == template.expand(13)

    def test_parse_round_trip(self):
        assert str(SignPattern.parse("+, -, 0")) == "+,-,0"


class TestNormalizerEnclosure:
    @settings(max_examples=40, deadline=None)
    @given(bases, square, square)
    def test_contains_product_limit(self, p, N, D):
        from shiftcharge.grws import normalizer_enclosure

        pr = GrwsParams(p, N, D)
        a, err = normalizer_enclosure(pr, F(1, 10**8))
        deep = normalizer_product(pr, 200)
        assert a > 0 and err < a * F(1, 10**8)
        assert abs(deep - a) <= err

    def test_shallow_depth_uses_product(self):
        pr = params(3, F(-987, 997), F(-976143, 994009))
        gc = grws_charge(pr, depth=12)
        assert gc.a_estimate > 0
        assert gc.a_error < gc.a_estimate * F(1, 10**12)
        m = grws_moments(pr)
        for n in range(17):
            assert abs(moment(gc.charge, n) - m[n]) <= gc.moment_error(n)
