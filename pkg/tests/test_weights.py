import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from seqspace import weights as W
from seqspace.errors import IndexOutOfRange, NonpositiveTerm

# frozen from an independent math.fsum evaluation of sum_{j<=n} j^(-1/2) / sqrt(n) at n = 10^4
REGULAR_SQRT_K1E4 = 1.9854464544952375


def test_prefix_cache_consistent_and_read_only():
    s = W.power(0.5)
    first = s.prefix(10).copy()
    s.prefix(1000)
    assert np.array_equal(s.prefix(10), first)
    assert np.array_equal(s.take([3, 7]), np.sqrt([3, 7]))
    with pytest.raises(ValueError):
        s.prefix(10)[0] = 5.0


def test_table_range_and_positivity():
    t = W.table([1.0, 2.0])
    with pytest.raises(IndexOutOfRange):
        t.prefix(3)
    with pytest.raises(NonpositiveTerm) as info:
        W.table([1.0, 0.0, 2.0]).prefix(3)
    assert info.value.index == 2


@pytest.mark.parametrize("s, expected", [
    (W.power(1), [1, 1, 1, 1]),
    (W.harmonic(), [1, 1 / 2, 1 / 3, 1 / 4]),
    (W.power(2), [1, 3, 5, 7]),
])
def test_discrete_derivative_examples(s, expected):
    assert np.allclose(W.discrete_derivative(s).prefix(4), expected, rtol=1e-14)


def test_discrete_derivative_rejects_plateau():
    with pytest.raises(NonpositiveTerm) as info:
        W.discrete_derivative(W.table([1.0, 2.0, 2.0, 3.0])).prefix(4)
    assert info.value.index == 3


def test_geometric_derivative_stays_positive():
    w = W.discrete_derivative(W.geometric())
    vals = w.prefix(w.clip(10_000))
    assert np.all(vals > 0)
    assert vals[59] == 2.0 ** -59


@pytest.mark.parametrize("w, expected", [
    (W.power(0), [1, 2, 3]),
    (W.table([1, 1 / 2, 1 / 3]), [1, 3 / 2, 11 / 6]),
    (W.table([1, 1 / 2, 1 / 4]), [1, 3 / 2, 7 / 4]),
])
def test_primitive_examples(w, expected):
    assert np.allclose(W.primitive(w).prefix(3), expected, rtol=1e-15)


def test_w_class_examples():
    assert W.w_class_check(W.power_derivative(1.0), K=10_000).holds
    constant = W.w_class_check(W.power(0), K=10_000)
    assert constant.fails and constant.details["non_increasing"]
    increasing = W.w_class_check(W.power(1), K=10_000)
    assert increasing.fails and not increasing.details["non_increasing"]


def test_essentially_monotone_examples():
    r = W.essentially_monotone(W.power(0.5), "increasing")
    assert r.holds and r.estimate == 1.0
    r = W.essentially_monotone(W.power_derivative(1.0), "decreasing")
    assert r.holds and r.estimate == 1.0
    alt = W.from_function(lambda n: np.where(np.asarray(n) % 2 == 1, 1.0, 2.0), "alternating")
    r = W.essentially_monotone(alt, "decreasing")
    assert r.holds and r.estimate == 0.5
    assert W.essentially_monotone(W.power(1), "decreasing").fails


def test_is_regular_examples():
    r = W.is_regular(W.power_derivative(0.5), K=10_000)
    assert r.holds
    assert r.estimate == pytest.approx(REGULAR_SQRT_K1E4, rel=1e-12)
    r = W.is_regular(W.power(0), K=10_000)
    assert r.holds and r.estimate == 1.0
    assert W.is_regular(W.power_derivative(1.0), K=10_000).fails


def test_has_lrp_examples():
    r = W.has_lrp(W.power(0.5))
    assert r.holds
    assert r.details["per_r"][2]["C"] == pytest.approx(math.sqrt(2), rel=1e-12)
    assert W.has_lrp(W.harmonic()).fails
    r = W.has_lrp(W.power(1))
    assert r.holds and r.details["per_r"][2]["C"] == pytest.approx(2.0, rel=1e-12)


def test_s_criterion_examples():
    r = W.s_criterion(W.power(0.5), n_max=64, k_max=10_000)
    assert r.holds
    assert r.details["sigma"][3] == pytest.approx(0.5, rel=1e-12)
    r = W.s_criterion(W.harmonic(), n_max=64, k_max=10_000)
    assert r.fails and r.estimate == 1.0
    r = W.s_criterion(W.power(1), n_max=64, k_max=10_000)
    assert r.holds and r.estimate == pytest.approx(1 / 64, rel=1e-12)


@pytest.mark.parametrize("theta", [0.25, 0.5, 0.75, 1.0])
def test_s_criterion_power_closed_form(theta):
    r = W.s_criterion(W.power(theta), n_max=32, k_max=5_000)
    assert abs(r.estimate - 32.0 ** -theta) <= 1e-12


def test_s_criterion_table_never_fails():
    # no closed form: near-1 sigma is inconclusive, not fails
    r = W.s_criterion(W.table(W.harmonic().prefix(100_000)), n_max=8, k_max=1_000)
    assert r.verdict == "inconclusive"
    assert r.method == "truncated-sup"
    r = W.s_criterion(W.table(np.sqrt(np.arange(1, 2001))), n_max=8, k_max=200)
    assert r.holds


def test_sigma_in_unit_interval_for_increasing_weights():
    for s in W.registry().values():
        sig = W.s_criterion(s, n_max=16, k_max=2_000).details["sigma"]
        assert all(0 < x <= 1 for x in sig)


def test_lemma_lrp_iff_regular_over_registry():
    checked = 0
    for s in W.registry().values():
        avg = W.averaged(s)
        if W.essentially_monotone(s, "increasing").holds and \
                W.essentially_monotone(avg, "decreasing").holds:
            assert W.has_lrp(s).verdict == W.is_regular(avg).verdict, s.label
            checked += 1
    assert checked >= 4


@given(st.lists(st.floats(1e-3, 10.0), min_size=1, max_size=40))
def test_primitive_inverts_derivative(increments):
    s = W.table(np.cumsum(increments))
    back = W.primitive(W.discrete_derivative(s)).prefix(len(increments))
    assert np.allclose(back, s.prefix(len(increments)), rtol=1e-12, atol=0)


@given(st.floats(-0.9, 2.0))
def test_power_derivative_matches_differences(theta):
    s = W.power(theta) if theta > 0 else W.power(1 + theta)
    d = W.discrete_derivative(s).prefix(200)
    direct = np.diff(np.arange(0, 201, dtype=float) ** s.params["theta"])
    assert np.allclose(d, direct, rtol=1e-9)
