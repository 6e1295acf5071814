import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from walshrecon.profiles import (CORPUS, FieldProfile, Provenance, WalshSpectrum, constant,
                                 exp_sum_coefficient, exponential, load_profile_csv, load_spectrum,
                                 named_profile, partial_sum, sample_profile, save_profile_csv,
                                 save_spectrum, walsh_coefficient, walsh_spectrum)
from walshrecon.walsh import WalshIndex, fwht, gray_code

GOLDEN = oracles.load_golden()


def test_constant_has_only_mean():
    f = constant(2.5)
    assert walsh_coefficient(f, 0) == pytest.approx(2.5, abs=1e-15)
    assert all(abs(walsh_coefficient(f, m)) < 1e-15 for m in range(1, 64))


def test_sine_first_coefficient():
    assert walsh_coefficient(named_profile("sin"), 1) == pytest.approx(2 / math.pi, abs=1e-14)
    assert GOLDEN["coef_sin_m1"] == pytest.approx(2 / math.pi, abs=1e-15)


def test_exp_first_coefficient_against_riemann():
    # midpoint rule at 2**20 points is accurate to ~1e-13 here
    assert walsh_coefficient(named_profile("exp"), 1) == pytest.approx(GOLDEN["coef_exp_m1_riemann"], abs=1e-12)


@pytest.mark.parametrize("name", ["exp", "sin", "f4", "f5"])
def test_spectrum_matches_antiderivative_oracle(name):
    spec = walsh_spectrum(named_profile(name), order=5)
    ref = GOLDEN["spectra"][name]
    assert np.allclose([spec[m] for m in range(32)], ref, rtol=0, atol=1e-13)


@pytest.mark.parametrize("name", ["exp", "sin", "f1", "f2", "f3", "f4", "const"])
def test_closed_form_product_matches_quadrature(name):
    f = named_profile(name)
    spec = walsh_spectrum(f, order=7)
    for m in range(128):
        assert exp_sum_coefficient(f.exp_terms, m, f.T) == pytest.approx(spec[m], abs=2e-14)


def test_single_coefficient_agrees_with_spectrum():
    f = named_profile("f5")
    spec = walsh_spectrum(f, order=6)
    for m in (0, 1, 5, 33, 63):
        assert walsh_coefficient(f, m) == pytest.approx(spec[m], abs=1e-14)


def test_sequency_argument():
    f = named_profile("f4")
    for s in range(16):
        assert walsh_coefficient(f, WalshIndex(s, "sequency")) == walsh_coefficient(f, gray_code(s))


def test_duration_scaling():
    f1, f2 = exponential(-1.0, T=1.0), exponential(-0.5, T=2.0)
    for m in range(16):
        assert walsh_coefficient(f2, m) == pytest.approx(walsh_coefficient(f1, m), abs=1e-14)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 10), st.integers(0, 2**32 - 1))
def test_sampled_coefficient_equals_fwht(n, seed):
    x = np.random.default_rng(seed).normal(size=2**n)
    f = FieldProfile(1.0, samples=x)
    c = fwht(x)
    for m in range(2**n):
        assert abs(walsh_coefficient(f, m) - c[m]) < 1e-12
    assert walsh_coefficient(f, 2**n) == 0.0


def test_sampled_count_must_be_dyadic():
    with pytest.raises(ValueError):
        FieldProfile(1.0, samples=np.ones(6))
    with pytest.raises(ValueError):
        FieldProfile(0.0, func=np.sin)


def test_partial_sum_examples():
    f = named_profile("exp")
    spec = walsh_spectrum(f, order=5)
    assert partial_sum(spec, [0], 0.7) == pytest.approx(1 - math.exp(-1))
    t = np.linspace(0, 0.999, 7)
    assert np.allclose(partial_sum(spec, range(32), t), spec.cell_values(5)[(t * 32).astype(int)])


def test_partial_sum_errors():
    spec = walsh_spectrum(named_profile("exp"), order=2)
    with pytest.raises(KeyError):
        partial_sum(spec, [0, 9], 0.5)
    with pytest.raises(ValueError):
        partial_sum(spec, [0], 1.0)


def test_uniform_convergence_proxy():
    f = named_profile("exp")
    t = (np.arange(2**12) + 0.5) / 2**12
    errs = []
    for n in range(1, 9):
        spec = walsh_spectrum(f, order=n)
        errs.append(np.max(np.abs(f(t) - partial_sum(spec, range(2**n), t))))
    assert all(b <= a for a, b in zip(errs, errs[1:]))


def test_spectrum_json_round_trip(tmp_path):
    spec = walsh_spectrum(named_profile("f4"), order=3)
    path = tmp_path / "s.json"
    save_spectrum(spec, path)
    data = json.loads(path.read_text())
    assert data["ordering"] == "paley" and set(data) == {"T", "ordering", "coefficients", "provenance"}
    back = load_spectrum(path)
    assert back.coefficients == spec.coefficients and back.provenance is Provenance.EXACT


def test_spectrum_rejects_other_ordering():
    with pytest.raises(ValueError):
        WalshSpectrum.from_json({"T": 1.0, "ordering": "sequency", "coefficients": {}})


def test_csv_round_trip(tmp_path):
    f = sample_profile(named_profile("sin"), 6)
    path = tmp_path / "p.csv"
    save_profile_csv(f, path)
    g = load_profile_csv(path)
    assert np.allclose(g.samples, f.samples) and g.T == pytest.approx(1.0)


def test_csv_rejects_non_dyadic(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("t,value\n0,1\n0.25,2\n0.5,3\n")
    with pytest.raises(ValueError):
        load_profile_csv(path)


def test_unknown_profile():
    with pytest.raises(ValueError):
        named_profile("f9")


def test_corpus_names():
    assert {"f1", "f2", "f3", "f4", "f5", "exp", "sin"} <= set(CORPUS)


@pytest.mark.parametrize("name", ["f1", "f4", "f5", "exp"])
def test_derivative_supremum(name):
    f = named_profile(name)
    t = np.linspace(0, 1, 200001)
    dense = np.max(np.abs(f._derivative_fn(1)(t)))
    assert f.sup_derivative(1) >= dense * (1 - 1e-12)
    assert f.sup_derivative(1) == pytest.approx(dense, rel=1e-6)
