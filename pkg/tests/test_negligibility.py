import pytest
from hypothesis import given, settings, strategies as st

import oracles
from walshrecon.negligibility import (_threshold_search, bound_factor, brute_force_threshold,
                                      coefficient_bound, contrast, cpmg_paley, degree,
                                      is_local_minimum, local_minima_negligibility,
                                      maximal_contrast_at_degree, minima_of_minima, negligibility,
                                      pdd_paley, profile, rank, subdegree, threshold_search)

GOLDEN = oracles.load_golden()
naturals = st.integers(min_value=0, max_value=2**30)


class TestProfile:
    def test_zero(self):
        pr = profile(0)
        assert (pr.rank, pr.degree, pr.negligibility, pr.subdegree) == (0, 0, 0, 0)

    def test_pdd_values(self):
        assert [negligibility(m) for m in (1, 2, 4)] == [2, 3, 4]

    def test_sine_support(self):
        assert [negligibility(m) for m in (1, 7, 11, 13, 19, 21, 25, 31)] == [2, 9, 10, 11, 11, 12, 13, 20]

    def test_subdegree(self):
        assert subdegree(0) == subdegree(1) == subdegree(16) == 0
        assert subdegree(19) == 2 and subdegree(25) == 4 and subdegree(6) == 2

    @given(naturals)
    def test_matches_oracle(self, m):
        assert negligibility(m) == oracles.neg_of(m)
        assert degree(m) == oracles.degree_of(m)
        assert rank(m) == len(oracles.bits_of(m))

    @given(naturals)
    def test_degree_is_min_power_above(self, m):
        d = degree(m)
        assert 2**d > m and (d == 0 or 2 ** (d - 1) <= m)

    @given(st.integers(1, 2**30))
    def test_rank_and_floor(self, m):
        assert rank(m) <= degree(m)
        assert negligibility(m) >= degree(m) + 1
        assert (negligibility(m) == degree(m) + 1) == (m & (m - 1) == 0)

    @given(st.integers(1, 2**30))
    def test_contrast_definition(self, m):
        assert contrast(m) == negligibility(m - 1) - negligibility(m)
        assert profile(m).contrast == contrast(m)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            negligibility(-1)


class TestBound:
    def test_mean_bound(self):
        assert coefficient_bound(0, 1.0, 3.0) == 3.0

    def test_exp_first(self):
        assert coefficient_bound(1, 1.0, 1.0) == 0.25
        assert abs(GOLDEN["spectra"]["exp"][1]) <= 0.25

    def test_variation_form_takes_minimum(self):
        assert coefficient_bound(1, 1.0, 1.0, variation=0.05) == pytest.approx(2 ** (1 - 2) * 0.05)
        assert coefficient_bound(1, 1.0, 1.0, variation=10.0) == 0.25

    def test_rejects_negative_supremum(self):
        with pytest.raises(ValueError):
            coefficient_bound(3, 1.0, -1.0)

    def test_bound_factor(self):
        assert bound_factor(0) == 2.0 and bound_factor(7) == 2.0**-8

    @pytest.mark.parametrize("name", ["exp", "sin", "f4", "f5"])
    def test_holds_on_first_32(self, name):
        from walshrecon.profiles import named_profile

        f = named_profile(name)
        sups = {k: f.sup_derivative(k) for k in range(6)}
        for m, c in enumerate(GOLDEN["spectra"][name]):
            assert abs(c) <= coefficient_bound(m, 1.0, sups[rank(m)]) * (1 + 1e-12) + 1e-15


class TestMinima:
    def test_first_32(self):
        assert local_minima_negligibility(32) == list(range(0, 33, 4))

    def test_minima_of_minima(self):
        assert minima_of_minima(2**8) == list(range(0, 2**8 + 1, 16))

    def test_count_per_degree(self):
        mins = set(local_minima_negligibility(2**12))
        for d in range(3, 13):
            assert sum(1 for k in range(2 ** (d - 1), 2**d) if k in mins) == 2 ** (d - 3)
        mm = set(minima_of_minima(2**12))
        for d in range(5, 13):
            assert sum(1 for k in range(2 ** (d - 1), 2**d) if k in mm) == 2 ** (d - 5)

    def test_neighbouring_negligibilities_never_tie(self):
        assert all(negligibility(k) != negligibility(k + 1) for k in range(2**12))

    def test_rank_minima_agree_when_strict(self):
        for k in range(1, 2**12 + 1):
            assert is_local_minimum(negligibility, k, strict=True) == is_local_minimum(rank, k, strict=True)

    def test_pdd_cpmg_minima_beyond_lowest_degrees(self):
        idx = sorted(set(pdd_paley(2**12) + cpmg_paley(2**12)))
        misses = [g for g in idx if not is_local_minimum(negligibility, g)]
        # p runs 0,2,3,5,4,6,7,9 over 0..7, so the four smallest PDD/CPMG indices are not minima
        assert misses == [1, 2, 3, 6]

    def test_pdd_undercuts_everything_else(self):
        pdd = pdd_paley(2**14)
        for k in range(1, 2**12 + 1):
            if k not in pdd:
                assert any(g > k and negligibility(g) < negligibility(k) for g in pdd)

    def test_difference_at_multiples_of_four(self):
        for j in range(1, 2**10 + 1):
            q = ((4 * j) & -(4 * j)).bit_length()  # position of the lowest set bit of 4j
            assert negligibility(4 * j) - negligibility(4 * j - 1) == 2 - q * (q - 1) // 2


class TestDegreeStructure:
    @pytest.mark.parametrize("d", range(1, 13))
    def test_pdd_minimizes_each_degree(self, d):
        block = range(2 ** (d - 1), 2**d)
        assert min(block, key=negligibility) == 2 ** (d - 1)

    @pytest.mark.parametrize("d", range(2, 13))
    def test_rank_two_indices_below_cpmg(self, d):
        cpmg = 3 * 2 ** (d - 2)
        block = range(2 ** (d - 1), 2**d)
        below = [j for j in block if negligibility(j) < negligibility(cpmg)]
        assert len([j for j in below if rank(j) == 2]) == d - 2

    def test_maximal_contrast(self):
        assert maximal_contrast_at_degree(2) == (2, 3)
        assert list(maximal_contrast_at_degree(3)) == GOLDEN["contrast_argmax"]["3"] == [4, 6]
        assert list(maximal_contrast_at_degree(8)) == GOLDEN["contrast_argmax"]["8"] == [128, 192]

    @pytest.mark.parametrize("d", range(2, 13))
    def test_maximal_contrast_is_pdd_and_cpmg(self, d):
        assert maximal_contrast_at_degree(d) == (2 ** (d - 1), 3 * 2 ** (d - 2))

    def test_maximal_contrast_domain(self):
        with pytest.raises(ValueError):
            maximal_contrast_at_degree(1)


class TestThreshold:
    def test_example(self):
        assert threshold_search(6) == [0, 1, 2, 3, 4, 5, 8, 16]

    def test_trivial(self):
        assert threshold_search(0) == [0]
        assert threshold_search(1) == [0]
        assert threshold_search(2) == [0, 1]

    def test_p9_against_frozen_scan(self):
        assert threshold_search(9) == GOLDEN["threshold_p9"]

    @pytest.mark.parametrize("p0", range(0, 15))
    def test_equals_brute_force(self, p0):
        assert threshold_search(p0) == brute_force_threshold(p0)
        assert threshold_search(p0) == oracles.brute_threshold(p0, 2 ** max(p0 - 1, 0) + 1)

    @pytest.mark.parametrize("p0", [10, 14, 18])
    def test_does_not_scan(self, p0):
        found, evaluations = _threshold_search(p0)
        assert evaluations < 2 * len(found) + p0
        assert evaluations < 2 ** (p0 - 1) / 8

    @settings(max_examples=20)
    @given(st.integers(0, 40))
    def test_every_member_below_threshold(self, p0):
        assert all(negligibility(m) <= p0 for m in threshold_search(p0))

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            threshold_search(-1)


def test_bound_and_rolloff_duality():
    from walshrecon.ddfilter import rolloff

    for m1 in range(2**8):
        for m2 in range(m1 + 1, 2**8):
            if rank(m1) != rank(m2) or negligibility(m1) == negligibility(m2):
                continue
            lo, hi = sorted((m1, m2), key=negligibility)
            assert coefficient_bound(lo, 1.0, 1.0) > coefficient_bound(hi, 1.0, 1.0)
            assert rolloff(lo, 1e-2) > rolloff(hi, 1e-2)
            assert rolloff(lo, 1e-2) / rolloff(hi, 1e-2) == pytest.approx(
                4.0 ** (negligibility(hi) - negligibility(lo)), rel=1e-12)
