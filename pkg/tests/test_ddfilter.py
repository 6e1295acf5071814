import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from walshrecon.ddfilter import (NoiseSpectrum, annihilation_check, coherence_decay,
                                 default_omega_min, filter_function, filter_table, rank_by_chi,
                                 rolloff)
from walshrecon.negligibility import negligibility, rank
from walshrecon.walsh import degree

GOLDEN = oracles.load_golden()


class TestFilterFunction:
    def test_vanishes_at_zero(self):
        assert all(filter_function(m, 0.0) == 0.0 for m in range(2**8))

    def test_against_time_domain_oracle(self):
        grid = GOLDEN["filter_grid"]
        for m in range(64):
            ours = filter_function(m, np.array(grid), 6)
            assert np.allclose(ours, GOLDEN["filter_n6"][str(m)], rtol=1e-10, atol=1e-15), m

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**5 - 1), st.floats(0.0, 200.0))
    def test_live_oracle(self, m, wT):
        assert filter_function(m, wT, 5) == pytest.approx(oracles.filter_time_domain(m, 5, wT),
                                                          rel=1e-9, abs=1e-12)

    @given(st.integers(0, 2**8 - 1), st.floats(0.0, 500.0))
    def test_independent_of_order(self, m, wT):
        d = degree(m)
        base = filter_function(m, wT, d)
        for n in (d + 1, d + 2):
            assert filter_function(m, wT, n) == pytest.approx(base, rel=1e-9, abs=1e-13)

    @given(st.integers(0, 2**8 - 1), st.floats(0.0, 1e3))
    def test_non_negative(self, m, wT):
        assert filter_function(m, wT) >= 0.0

    def test_free_evolution(self):
        wT = np.linspace(0.1, 30, 50)
        assert np.allclose(filter_function(0, wT, 0), 4 * np.sin(wT / 2) ** 2)

    def test_order_too_small(self):
        with pytest.raises(ValueError):
            filter_function(5, 1.0, 2)
        with pytest.raises(ValueError):
            filter_function(1, -1.0)

    def test_table(self):
        table = filter_table([0, 3], 4, [0.0, 1.0])
        assert set(table) == {0, 3} and table[0][0] == 0.0


class TestRolloff:
    def test_limit(self):
        for m in range(2**8):
            ratio = filter_function(m, 1e-3) / rolloff(m, 1e-3)
            assert abs(ratio - 1) < 1e-3

    def test_first_rademacher(self):
        assert filter_function(1, 1e-2) == pytest.approx(1e-2**4 / 16, rel=1e-4)

    def test_free_evolution(self):
        assert rolloff(0, 0.3) == pytest.approx(0.09)

    def test_same_rank_ratio(self):
        assert rolloff(1, 0.1) / rolloff(4, 0.1) == pytest.approx(4.0**2)


class TestAnnihilation:
    def test_examples(self):
        assert annihilation_check(1, 0) == 0.0
        assert abs(annihilation_check(3, 1)) < 1e-15
        assert annihilation_check(1, 1) == pytest.approx(-0.25)

    def test_rank_kills_low_powers(self):
        for m in range(2**8):
            for k in range(rank(m)):
                assert abs(annihilation_check(m, k)) < 1e-12

    def test_rank_power_survives(self):
        for m in range(1, 2**8):
            assert abs(annihilation_check(m, rank(m))) > 1e-12

    def test_domain(self):
        with pytest.raises(ValueError):
            annihilation_check(3, -1)


def low_pass(scale=1.0):
    return NoiseSpectrum("powerlaw", amplitude=scale, omega_min=1e-4, omega_max=1.0)


class TestCoherence:
    def test_zero_spectrum(self):
        assert coherence_decay(5, None, 1.0, NoiseSpectrum("zero")) == (0.0, 1.0)
        assert coherence_decay(5, None, 1.0, low_pass(0.0)) == (0.0, 1.0)

    def test_linear_in_amplitude(self):
        chi1, _ = coherence_decay(3, None, 1.0, low_pass(1.0))
        chi2, W2 = coherence_decay(3, None, 1.0, low_pass(0.5))
        assert chi2 == pytest.approx(chi1 / 2, rel=1e-9)
        assert W2 == pytest.approx(math.exp(-chi2))

    def test_white_noise_free_evolution(self):
        # S = 1 on [a, b], F = 4 sin^2(w/2): chi = (1/pi) int 4 sin^2(w/2) / w^2 dw
        from scipy.integrate import quad

        spec = NoiseSpectrum("powerlaw", omega_min=0.01, omega_max=40.0)
        ref = quad(lambda w: 4 * math.sin(w / 2) ** 2 / w**2, 0.01, 40.0, limit=500)[0] / math.pi
        assert coherence_decay(0, 0, 1.0, spec)[0] == pytest.approx(ref, rel=1e-8)

    def test_same_rank_ordering(self):
        spec = low_pass()
        for r in (1, 2, 3):
            group = [m for m in range(2**6) if rank(m) == r]
            chi = {m: coherence_decay(m, 6, 1.0, spec)[0] for m in group}
            for a, b in combinations(group, 2):
                if negligibility(a) < negligibility(b):
                    assert chi[a] > chi[b]
                elif negligibility(a) > negligibility(b):
                    assert chi[a] < chi[b]

    def test_lorentzian_and_tabulated(self):
        lor = NoiseSpectrum("lorentzian", amplitude=2.0, cutoff=0.5, omega_max=5.0)
        chi, W = coherence_decay(4, None, 1.0, lor)
        assert chi > 0 and 0 < W < 1
        grid = np.linspace(0, 5, 11)
        tab = NoiseSpectrum("tabulated", omega_min=1e-3, omega_max=5.0, grid=grid, values=np.ones(11))
        flat = NoiseSpectrum("powerlaw", omega_min=1e-3, omega_max=5.0)
        assert coherence_decay(2, None, 1.0, tab)[0] == pytest.approx(coherence_decay(2, None, 1.0, flat)[0])

    def test_default_lower_cutoff(self):
        spec = NoiseSpectrum("powerlaw", exponent=-1.0, omega_max=10.0)
        lo = default_omega_min(spec, 3, 2, 1.0)
        assert 0 < lo < 10.0
        g = lambda w: spec(w) / w**2 * filter_function(3, w, 2)  # noqa: E731
        w = np.geomspace(lo, 10.0, 4000)
        assert g(lo) < 1e-9 * g(w).max() * 10

    def test_ranking(self):
        rows = rank_by_chi([1, 2, 4], None, 1.0, low_pass())
        assert [r["index"] for r in rows] == [4, 2, 1]
        assert rows[0]["negligibility"] == 4

    def test_validation(self):
        with pytest.raises(ValueError):
            NoiseSpectrum(omega_max=math.inf)
        with pytest.raises(ValueError):
            NoiseSpectrum(omega_min=2.0, omega_max=1.0)
        with pytest.raises(ValueError):
            NoiseSpectrum("tabulated", grid=[0, 1], values=[1, -1])
        with pytest.raises(ValueError):
            coherence_decay(5, 2, 1.0, low_pass())


def test_all_ones_index_has_full_rank():
    for d in range(1, 12):
        m = 2**d - 1
        assert rank(m) == d == degree(m)
        assert max(rank(j) for j in range(2 ** (d - 1), 2**d)) == d
