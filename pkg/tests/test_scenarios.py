import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wellport.domain import INDICATORS, DomainError, QuantileTriple
from wellport.scenarios import (
    Z90,
    CalibratedDistribution,
    build_bank,
    calibrate,
    indicator_contribution,
    load_bank,
    sample_parameter,
    save_bank,
    success_npv,
    uniforms,
    volumetric_reserve,
)

from conftest import catalog, economics, project


def test_calibrate_constant():
    d = calibrate(QuantileTriple(3.0, 3.0, 3.0))
    assert d.kind == "constant"
    assert np.all(sample_parameter(d, np.linspace(0, 0.99, 5)) == 3.0)


def test_calibrate_standard_lognormal():
    d = calibrate(QuantileTriple(math.exp(-Z90), 1.0, math.exp(Z90)))
    assert d.kind == "lognormal"
    mu, sigma = d.params
    assert mu == pytest.approx(0.0, abs=1e-12)
    assert sigma == pytest.approx(1.0, abs=1e-12)


def test_bounded_triple_uses_pert():
    d = calibrate(QuantileTriple(0.1, 0.2, 0.3), bounded=True)
    assert d.kind == "pert" and d.params == (0.1, 0.2, 0.3)
    assert (d.lo, d.hi) == (0.0, 1.0)


def test_lopsided_tails_fall_back_to_pert():
    assert calibrate(QuantileTriple(1.0, 1.1, 10.0)).kind == "pert"


def test_degenerate_lognormal_is_one():
    d = CalibratedDistribution("lognormal", (0.0, 0.0))
    assert np.all(sample_parameter(d, [0.01, 0.5, 0.99]) == 1.0)


def test_negative_sigma_rejected():
    with pytest.raises(DomainError):
        CalibratedDistribution("lognormal", (0.0, -1.0))


def test_lognormal_mean():
    d = CalibratedDistribution("lognormal", (0.0, 1.0))
    u = uniforms(123, "mean-check", 0, (100_000,))
    assert sample_parameter(d, u).mean() == pytest.approx(math.exp(0.5), rel=0.02)


@settings(max_examples=25, deadline=None)
@given(
    st.floats(min_value=0.05, max_value=500.0),
    st.floats(min_value=0.05, max_value=1.0),
)
def test_lognormal_round_trip(median, spread):
    triple = QuantileTriple(median * math.exp(-spread), median, median * math.exp(spread))
    d = calibrate(triple)
    x = sample_parameter(d, uniforms(9, "round-trip", 0, (100_000,)))
    q10, q50, q90 = np.quantile(x, [0.1, 0.5, 0.9])
    assert q50 == pytest.approx(median, rel=0.02)
    assert q10 == pytest.approx(triple.q10, rel=0.05)
    assert q90 == pytest.approx(triple.q90, rel=0.05)


@given(st.lists(st.floats(min_value=0.0, max_value=0.999999), min_size=1, max_size=50))
def test_bounded_draws_stay_in_unit_interval(us):
    d = calibrate(QuantileTriple(0.05, 0.5, 0.99), bounded=True)
    x = sample_parameter(d, us)
    assert np.all((x >= 0) & (x <= 1))


def test_volumetric_examples():
    assert volumetric_reserve(1, 1, 1, 1, 0, 1) == 1
    assert volumetric_reserve(1, 5, 5, 0.3, 1.0, 1.1) == 0
    assert volumetric_reserve(2, 100, 10, 0.2, 0.4, 1.2) == pytest.approx(200)


def test_volumetric_rejects_nonpositive_volume_factor():
    with pytest.raises(DomainError):
        volumetric_reserve(1, 1, 1, 1, 0, 0)


def test_contribution_examples():
    assert indicator_contribution(0, 0, 10, 8) == 0
    assert indicator_contribution(1, 0, 7, 3) == 7
    assert indicator_contribution(0.5, 0.25, 10, 8) == pytest.approx(7)


def _econ(**kw):
    base = dict(capex=10.0, fixed=0.0, price=10.0)
    base.update(kw)
    return economics(**base)


def test_npv_without_production():
    assert success_npv(_econ(), 0.0, 0.0) == pytest.approx(-10.0)


def test_npv_profit_is_taxed():
    import dataclasses

    # oil margin (10-1)*0.5 = 4.5 per unit; 100/4.5 units give profit 100
    e = dataclasses.replace(_econ(), discount=1.0)
    assert success_npv(e, 100 / 4.5, 0.0) == pytest.approx(65.0)


def test_npv_loss_is_not_taxed():
    import dataclasses

    e = dataclasses.replace(_econ(capex=5.0, fixed=20.0), discount=0.9)
    assert success_npv(e, 0.0, 0.0) == pytest.approx(-23.0)


def test_bank_rejects_empty_sizes(toy):
    for S, K in [(0, 1), (1, 0), (-1, 3)]:
        with pytest.raises(ValueError):
            build_bank(toy, 1, S, K)


def test_bank_is_deterministic(toy):
    a, b = build_bank(toy, 3, 15, 4), build_bank(toy, 3, 15, 4)
    assert a.fingerprint() == b.fingerprint()
    assert np.array_equal(a.second_npv, b.second_npv)
    assert build_bank(toy, 4, 15, 4).fingerprint() != a.fingerprint()


def test_bank_shapes_and_invariants(toy_bank, toy):
    arr = toy.arrays
    I, J = len(arr.first_ids), len(arr.second_ids)
    assert toy_bank.first_uniforms.shape == (20, I)
    assert toy_bank.second_uniforms.shape == (20, 5, J)
    assert np.array_equal(toy_bank.first_success, toy_bank.first_uniforms <= arr.p0_first)
    for reserves in (toy_bank.first_oil, toy_bank.first_gas, toy_bank.second_oil, toy_bank.second_gas):
        assert np.all(reserves >= 0)
    assert toy_bank.n_pairs == 100


def test_contributions_follow_reserves(toy_bank, toy):
    for i, p in enumerate(toy.first_stage):
        for m_idx, m in enumerate(INDICATORS):
            expect = indicator_contribution(
                p.classification.oil(m), p.classification.gas(m), toy_bank.first_oil[:, i], toy_bank.first_gas[:, i]
            )
            assert np.array_equal(toy_bank.first_contrib[:, i, m_idx], expect)


def test_certain_success():
    cat = catalog([project("A", p0=1.0), project("B", stage="second")])
    bank = build_bank(cat, 1, 50, 2)
    assert bank.first_success.all()


def test_success_frequency():
    cat = catalog([project("A", p0=0.3), project("B", stage="second")])
    bank = build_bank(cat, 17, 100_000, 1)
    assert bank.first_success[:, 0].mean() == pytest.approx(0.3, abs=0.005)


def test_streams_depend_on_project_id_only():
    a = uniforms(5, "P1", 0, (10,))
    assert np.array_equal(a, uniforms(5, "P1", 0, (10,)))
    assert not np.array_equal(a, uniforms(5, "P2", 0, (10,)))
    assert not np.array_equal(a, uniforms(5, "P1", 1, (10,)))


def test_prefix_property(toy):
    small, large = build_bank(toy, 8, 10, 3), build_bank(toy, 8, 30, 3)
    assert np.array_equal(small.first_uniforms, large.first_uniforms[:10])


def test_bank_file_round_trip(tmp_path, toy_bank, toy):
    path = tmp_path / "bank.npz"
    save_bank(toy_bank, path)
    again = load_bank(path, toy)
    assert again.fingerprint() == toy_bank.fingerprint()
