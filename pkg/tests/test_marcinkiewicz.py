import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from seqspace import marcinkiewicz as mz
from seqspace import weights as W
from seqspace.errors import HypothesisViolated, InvalidScheme, SupportTooLarge
from seqspace.seqvec import BlockFamily, SeqVec, disjoint_sum, rearrangement

# frozen from math.fsum evaluations of the defining prefix sums
B_SQRT_K100_M4 = 0.4820375268234176      # sum_{j<=100} j^-1/2 / sum_{j<=400} j^-1/2
B_SQRT_K1_M4 = 0.35913644272764145       # 1 / sum_{j<=4} j^-1/2
HARMONIC_BLOCK_M3_J200 = 2.5281931753109017  # 3 max_{k<=200} H_k / H_3k

CORE_WEIGHTS = [W.power(0.25), W.power(0.5), W.power(0.75), W.harmonic(), W.geometric()]

small_vectors = st.dictionaries(st.integers(1, 40), st.floats(-10, 10, allow_nan=False),
                                min_size=0, max_size=8).map(SeqVec)


def test_m_norm_examples():
    assert mz.m_norm(SeqVec.from_values([3, 1, 2]), W.power(1)) == 3.0
    assert mz.m_norm(SeqVec.from_values([1, 1 / 2, 1 / 3]), W.harmonic()) == pytest.approx(1.0, abs=1e-15)
    assert mz.m_norm(SeqVec(), W.harmonic()) == 0.0


def test_bruteforce_examples_and_guard():
    assert mz.m_norm_bruteforce(SeqVec.from_values([3, 1, 2]), W.power(1)) == 3.0
    assert mz.m_norm_bruteforce(SeqVec.from_values([1, 1]), W.power(0.5)) == pytest.approx(math.sqrt(2))
    assert mz.m_norm_bruteforce(SeqVec(), W.power(1)) == 0.0
    with pytest.raises(SupportTooLarge):
        mz.m_norm_bruteforce(SeqVec.from_values(np.ones(21)), W.power(1))


def test_lorentz_examples():
    assert mz.lorentz_d1_norm(SeqVec.from_values([1, 1]), W.table([1, 0.5])) == 1.5
    assert mz.lorentz_d1_norm(SeqVec({4: 2.0}), W.harmonic()) == 2.0
    assert mz.lorentz_d1_norm(SeqVec.from_values([1, 2, 3]), W.table([1, 1 / 2, 1 / 3])) == \
        pytest.approx(13 / 3, rel=1e-15)
    assert mz.lorentz_dinf_norm(SeqVec.from_values([1, 0.5]), W.table([1, 2])) == 1.0
    assert mz.lorentz_dinf_norm(SeqVec({3: 5.0}), W.power_derivative(1)) == 5.0
    assert mz.lorentz_dinf_norm(SeqVec.from_values([1, 1, 1]), W.table([1, 1 / 2, 1 / 3])) == 1.0


def test_lorentz_d1_warns_on_increasing_weight():
    with pytest.warns(UserWarning):
        mz.lorentz_d1_norm(SeqVec.from_values([1, 1]), W.power(1))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        mz.lorentz_d1_norm(SeqVec.from_values([1, 1]), W.power_derivative(1))


def test_duality_pairing_examples():
    assert mz.duality_pairing(SeqVec.from_values([1, 2]), SeqVec.from_values([3, 4])) == 11
    assert mz.duality_pairing(SeqVec({1: 1}), SeqVec({2: 5})) == 0
    assert mz.duality_pairing(SeqVec({3: 1}), SeqVec({1: 2, 3: -7})) == -7


def test_b_km_examples():
    w = W.power_derivative(1.0)
    assert mz.b_km(w, 17, 1) == 1.0
    assert mz.b_km(w, 1, 2) == pytest.approx(2 / 3, rel=1e-15)
    assert mz.b_km(W.power_derivative(0.5), 100, 4) == pytest.approx(B_SQRT_K100_M4, rel=1e-12)
    # asymptotically m^(a-1)
    assert mz.b_km(W.power_derivative(0.5), 100_000, 4) == pytest.approx(0.5, abs=2e-3)


def test_big_B_examples():
    assert mz.big_B_m(W.power_derivative(0.5), 1).estimate == 1.0
    r = mz.big_B_m(W.power_derivative(1.0), 2)
    assert r.estimate == 1.0 and r.method == "truncated-sup-with-limit-extrapolation"
    r = mz.big_B_m(W.power_derivative(0.5), 4)
    assert r.details["b_1"] == pytest.approx(B_SQRT_K1_M4, rel=1e-12)
    # the limit 1/2 beats b_1
    assert r.estimate == pytest.approx(0.5, rel=1e-12)


def test_big_B_table_is_lower_bound():
    r = mz.big_B_m(W.table(W.power_derivative(1.0).prefix(4000)), 2, k_max=10_000)
    assert r.verdict == "inconclusive"
    assert r.truncation["k_max"] == 2000
    assert r.estimate < 1.0


def test_block_family_examples():
    w = W.power_derivative(1.0)
    fam = mz.block_family(w, 2, 2)
    assert fam.members == (SeqVec({1: 1.0, 3: 0.5}), SeqVec({2: 1.0, 4: 0.5}))
    single = mz.block_family(w, 1, 3)
    assert single.members == (SeqVec.from_values(w.prefix(3)),)
    with pytest.raises(InvalidScheme):
        mz.block_family(w, 2, 2, scheme="spiral")


@pytest.mark.parametrize("scheme", mz.SCHEMES)
def test_block_members_rearrange_to_weight_prefix(scheme):
    w = W.power_derivative(0.5)
    fam = mz.block_family(w, 5, 30, scheme)
    for f in fam.members:
        assert np.array_equal(rearrangement(f), w.prefix(30))


def test_diagonal_scheme_is_injective_on_grid():
    fam = mz.block_family(W.power_derivative(1.0), 20, 20, "diagonal")
    idx = [i for f in fam.members for i in f.indices]
    assert len(idx) == len(set(idx)) == 400


def test_block_identity_m1_exact():
    r = mz.block_norm_identity_check(W.power_derivative(1.0), 1, J=50)
    assert r.lhs == 1.0 and r.rhs == 1.0 and r.relative_gap == 0.0


def test_block_identity_finite_truncation():
    r = mz.block_norm_identity_check(W.power_derivative(1.0), 3, J=200)
    assert r.lhs == pytest.approx(HARMONIC_BLOCK_M3_J200, rel=1e-12)
    assert r.finite_gap <= 1e-12
    assert r.grid_bound_holds
    assert r.rhs == 3.0


def test_block_identity_sqrt_m2():
    r = mz.block_norm_identity_check(W.power_derivative(0.5), 2, J=400)
    assert r.relative_gap < 0.02
    assert r.verdict == "holds"


def test_lechner_marcinkiewicz_examples():
    assert mz.lechner_verdict_marcinkiewicz(W.power(0.5)).holds
    assert mz.lechner_verdict_marcinkiewicz(W.harmonic()).fails
    r = mz.lechner_verdict_marcinkiewicz(W.power(1.0))
    assert r.holds and "hypotheses" in r.details


def test_lechner_marcinkiewicz_hypotheses():
    with pytest.raises(HypothesisViolated) as info:
        mz.lechner_verdict_marcinkiewicz(W.table([1.0, 2.0, 2.0, 3.0]))
    assert info.value.hypothesis == "strictly-increasing"
    with pytest.raises(HypothesisViolated) as info:
        mz.lechner_verdict_marcinkiewicz(W.power(2.0))
    assert info.value.hypothesis == "derivative-essentially-decreasing"


@settings(max_examples=300)
@given(small_vectors, st.sampled_from(CORE_WEIGHTS))
def test_m_norm_matches_bruteforce(f, s):
    assert abs(mz.m_norm(f, s) - mz.m_norm_bruteforce(f, s)) <= 1e-12


@given(small_vectors, st.floats(-5, 5, allow_nan=False), st.sampled_from(CORE_WEIGHTS))
def test_m_norm_homogeneous(f, c, s):
    assert mz.m_norm(f * c, s) == pytest.approx(abs(c) * mz.m_norm(f, s), rel=1e-12, abs=1e-300)


@given(small_vectors)
def test_m_norm_linear_weight_is_sup(f):
    # cumulative sums divided by n round to within a few ulps of the max
    assert mz.m_norm(f, W.power(1)) == pytest.approx(f.sup_norm(), rel=1e-14, abs=0)


@given(small_vectors, small_vectors, st.sampled_from([W.power_derivative(1.0), W.power_derivative(0.5)]))
def test_holder_duality(f, g, w):
    lhs = abs(mz.duality_pairing(f, g))
    assert lhs <= mz.lorentz_d1_norm(f, w) * mz.m_norm(g, W.primitive(w)) * (1 + 1e-12)


@given(small_vectors, small_vectors, st.sampled_from([W.power_derivative(1.0), W.power_derivative(0.5)]))
def test_lorentz_d1_triangle(f, g, w):
    assert mz.lorentz_d1_norm(f + g, w) <= (mz.lorentz_d1_norm(f, w) + mz.lorentz_d1_norm(g, w)) * (1 + 1e-12)


@given(st.lists(st.floats(0.01, 10), min_size=1, max_size=40))
def test_quasi_norm_sandwich(vals):
    w = W.power_derivative(0.5)
    f = SeqVec.from_values(vals)
    ratio = mz.lorentz_dinf_norm(f, W.inverse(w)) / mz.m_norm(f, W.primitive(w))
    assert 1 - 1e-12 <= ratio <= W.is_regular(w).estimate * (1 + 1e-12)


@given(st.lists(st.sampled_from([-1.0, 1.0]), min_size=2, max_size=6),
       st.lists(st.floats(0.1, 3.0), min_size=6, max_size=6))
def test_l1_lower_bound_for_harmonic_blocks(signs, mags):
    # exact finite form: ||sum a_n f_n|| >= sum |a_n| max_{k<=J} b_k^(m)
    w = W.power_derivative(1.0)
    m, J = len(signs), 200
    fam = mz.block_family(w, m, J)
    a = SeqVec({n: s * mags[n - 1] for n, s in enumerate(signs, 1)})
    lhs = mz.m_norm(disjoint_sum(fam, a), W.primitive(w))
    finite_B = float(mz.b_grid(w, m, J).max())
    assert sum(abs(x) for _, x in a) * finite_B <= lhs * (1 + 1e-12)


@given(st.lists(st.floats(-10, 10, allow_nan=False).filter(bool), min_size=1, max_size=6))
def test_sup_norm_of_disjoint_sum_is_exact(coeffs):
    fam = BlockFamily([SeqVec({2 * n + 1: n + 1.0, 2 * n + 2: -0.5}) for n in range(6)])
    a = SeqVec.from_values(coeffs)
    expected = max(abs(c) * fam[n].sup_norm() for n, c in enumerate(coeffs))
    assert disjoint_sum(fam, a).sup_norm() == expected
