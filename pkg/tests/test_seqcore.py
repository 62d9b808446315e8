import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gammaln

from ultrascale import seqcore as sc
from ultrascale.errors import (
    IndexOutOfRange,
    LengthMismatch,
    NonNormalized,
    OutOfRangeParam,
    PreconditionViolated,
    TruncationTooSmall,
)
from ultrascale.seqcore import Relation, SeqProperty, Status


# --------------------------------------------------------------------------
# construction
# --------------------------------------------------------------------------

def test_gevrey_terms_exact():
    g = sc.build_sequence(sc.Gevrey(2), 3)
    assert np.allclose(g.log_terms, [0.0, 0.0, 2 * math.log(2), 2 * math.log(6)],
                       rtol=0, atol=1e-15)


def test_nqr_term():
    n = sc.build_sequence(sc.NQR(2, 2), 5)
    assert n.log_terms[3] == pytest.approx(9 * math.log(2), rel=1e-15)


def test_double_exp_term():
    d = sc.build_sequence(sc.DoubleExp(), 5)
    assert d.log_terms[2] == pytest.approx(math.exp(2), rel=1e-15)
    assert d.log_terms[0] == 0.0


def test_param_validation():
    with pytest.raises(OutOfRangeParam):
        sc.LQR(q=2, r=1.0)
    with pytest.raises(OutOfRangeParam):
        sc.NQR(q=0.5, r=2)
    with pytest.raises(OutOfRangeParam):
        sc.Gevrey(0)
    with pytest.raises(OutOfRangeParam):
        sc.BJSigma(0, 1.0)
    with pytest.raises(TruncationTooSmall):
        sc.build_sequence(sc.Gevrey(2), 1)


def test_normalization_enforced():
    with pytest.raises(NonNormalized):
        sc.LogWeightSeq(np.array([1.0, 2.0, 3.0]), 2)


def test_iterated_exp_and_log():
    assert sc.iterated_exp(1) == pytest.approx(math.e)
    assert sc.iterated_exp(2) == pytest.approx(math.exp(math.e))
    assert math.isinf(sc.iterated_exp(5))
    # shifted iterated log saturates at 1 for depths beyond float range
    assert sc.log_iter_shifted(1, 0) == pytest.approx(1.0)
    assert float(sc.log_iter_shifted(6, 100)) == 1.0


def test_mu_accessor_nondecreasing(builtins_200):
    for seq in builtins_200:
        if sc.check_property(seq, SeqProperty.LOG_CONVEX).holds:
            assert np.all(np.diff(seq.log_mu()) >= -1e-9), seq.label


def test_export_csv(tmp_path):
    g = sc.build_sequence(sc.Gevrey(2), 10)
    p = tmp_path / "seq.csv"
    sc.export_csv(g, p)
    lines = p.read_text().strip().splitlines()
    assert lines[0] == "k,log_M_k"
    assert len(lines) == 12
    assert float(lines[3].split(",")[1]) == pytest.approx(2 * math.log(2))


# --------------------------------------------------------------------------
# single-sequence conditions
# --------------------------------------------------------------------------

def test_log_convex_all_builtins_k400():
    fams = [sc.Gevrey(1.5), sc.Gevrey(3), sc.LQR(2, 1.5), sc.LQR(2, 2),
            sc.NQR(2, 2), sc.NQR(3, 1.5), sc.BJSigma(1, 1), sc.BJSigma(2, 0.5),
            sc.DoubleExp()]
    for f in fams:
        M = sc.build_sequence(f, 400)
        v = sc.check_property(M, SeqProperty.LOG_CONVEX)
        assert v.holds, f.name
        assert v.witnesses["min_second_difference"] >= -1e-9


def test_log_convex_counterexample_recheckable():
    lt = np.array([0.0, 2.0, 2.5, 6.0])  # dip at k = 2
    M = sc.LogWeightSeq(lt, 3, None, "bad")
    v = sc.check_property(M, SeqProperty.LOG_CONVEX)
    assert v.fails
    (k,) = v.counterexample
    assert 2 * lt[k] > lt[k - 1] + lt[k + 1]


def test_submult_dual_gevrey():
    M = sc.build_sequence(sc.Gevrey(2), 100)
    assert sc.check_property(M, SeqProperty.SUBMULT_DUAL).holds


def test_deriv_closed_table():
    assert sc.check_property(sc.build_sequence(sc.LQR(2, 3), 200),
                             SeqProperty.DERIV_CLOSED).fails
    v = sc.check_property(sc.build_sequence(sc.LQR(2, 2), 200),
                          SeqProperty.DERIV_CLOSED)
    assert v.holds
    # the witness C certifies the inequality at all checked indices
    M = sc.build_sequence(sc.LQR(2, 2), 200)
    C = v.witnesses["C"]
    ks = np.arange(200)
    assert np.all(M.log_terms[1:] - M.log_terms[:-1] <= (ks + 1) * math.log(C) + 1e-9)


def test_deriv_closed_semiregularity_boundary():
    # the factorial-power families are derivation closed exactly up to r = 2
    for r, want in [(1.5, True), (2.0, True), (2.5, False), (3.0, False)]:
        v = sc.check_property(sc.build_sequence(sc.LQR(2, r), 200),
                              SeqProperty.DERIV_CLOSED)
        assert v.holds == want, r


def test_alt_deriv_closed_matches_deriv_closed():
    for fam in [sc.Gevrey(2), sc.LQR(2, 2), sc.LQR(2, 3), sc.DoubleExp()]:
        M = sc.build_sequence(fam, 200)
        a = sc.check_property(M, SeqProperty.DERIV_CLOSED)
        b = sc.check_property(M, SeqProperty.ALT_DERIV_CLOSED, ell=2)
        assert a.status is b.status, fam.name


def test_quasianalytic_table():
    cases = [
        (sc.BJSigma(1, 0.5), Status.HOLDS),
        (sc.BJSigma(1, 1.0), Status.HOLDS),
        (sc.BJSigma(1, 1.5), Status.FAILS),
        (sc.BJSigma(2, 3.0), Status.HOLDS),
        (sc.Gevrey(1), Status.HOLDS),
        (sc.Gevrey(2), Status.FAILS),
        (sc.NQR(2, 2), Status.FAILS),
    ]
    for fam, want in cases:
        v = sc.check_property(sc.build_sequence(fam, 200), SeqProperty.QUASIANALYTIC)
        assert v.status is want, fam.name
        assert "partial_sum" in v.witnesses


def test_moderate_growth_table():
    cases = [(sc.Gevrey(2), True), (sc.BJSigma(1, 1), True),
             (sc.LQR(2, 2), False), (sc.NQR(2, 2), False), (sc.DoubleExp(), False)]
    for fam, want in cases:
        v = sc.check_property(sc.build_sequence(fam, 200), SeqProperty.MODERATE_GROWTH)
        assert v.holds == want, fam.name


def test_moderate_growth_witness_certifies():
    M = sc.build_sequence(sc.Gevrey(2), 120)
    v = sc.check_property(M, SeqProperty.MODERATE_GROWTH)
    g = math.log(v.witnesses["gamma"]) + 1e-9
    lt = M.log_terms
    for j in range(1, 120):
        k = np.arange(1, 120 - j + 1)
        assert np.all(lt[j + k] - lt[j] - lt[k] <= (j + k) * g)


# --------------------------------------------------------------------------
# the doubling condition
# --------------------------------------------------------------------------

def test_om7_double_exp_smallest_and_documented():
    de = sc.build_sequence(sc.DoubleExp(), 200)
    v = sc.check_property(de, SeqProperty.OM7SEQ)
    assert v.holds
    assert v.witnesses["p"] == 2  # brute-force smallest
    assert v.witnesses["p_clean"] == 8
    # the clean witness p = 8 certifies with A = B = 1: 16 e^k <= e^(8k)
    v8 = sc.om7seq_at(de, 8)
    assert v8.holds
    kk = np.arange(1, 200 // 8 + 1)
    assert np.all(16.0 * np.exp(kk) <= np.exp(8.0 * kk))


def test_om7_nqr_smallest_p_bruteforce_oracle():
    # independent oracle: smallest integer p >= 2 with 2p <= p^r
    def oracle(r):
        p = 2
        while 2 * p > p ** r:
            p += 1
        return p

    for q, r in [(2, 2), (3, 2), (2, 1.5)]:
        M = sc.build_sequence(sc.NQR(q, r), 200)
        v = sc.check_property(M, SeqProperty.OM7SEQ)
        assert v.holds, (q, r)
        assert v.witnesses["p"] == oracle(r), (q, r)


def test_om7_smallest_p_search_is_honest():
    # any p below the reported smallest one must fail individually
    M = sc.build_sequence(sc.NQR(2, 1.5), 200)
    v = sc.check_property(M, SeqProperty.OM7SEQ)
    p = v.witnesses["p"]
    for bad in range(2, p):
        assert not sc.om7seq_at(M, bad).holds, bad


def test_om7_gevrey_fails():
    assert sc.check_property(sc.build_sequence(sc.Gevrey(2), 200),
                             SeqProperty.OM7SEQ).fails


def test_om7_requires_truncation():
    M = sc.build_sequence(sc.Gevrey(2), 12)
    with pytest.raises(TruncationTooSmall):
        sc.check_property(M, SeqProperty.OM7SEQ)
    with pytest.raises(OutOfRangeParam):
        sc.om7seq_at(sc.build_sequence(sc.Gevrey(2), 200), 1)


def test_exclusion_om7_vs_moderate_growth(builtins_200):
    # no built-in family may satisfy both the doubling bound and moderate growth
    for seq in builtins_200:
        om7 = sc.check_property(seq, SeqProperty.OM7SEQ)
        mg = sc.check_property(seq, SeqProperty.MODERATE_GROWTH)
        assert not (om7.holds and mg.holds), seq.label


def test_analytic_overrides_never_contradict_confident_numerics(builtins_200):
    # where the pure numeric trend is confident, the family table must agree
    for seq in builtins_200:
        for prop in (SeqProperty.DERIV_CLOSED, SeqProperty.MODERATE_GROWTH,
                     SeqProperty.OM7SEQ):
            numeric = sc._numeric_property(seq, prop, ell=1, p_max=16)
            final = sc.check_property(seq, prop)
            if numeric.status is not Status.INCONCLUSIVE:
                assert numeric.status is final.status, (seq.label, prop)


# --------------------------------------------------------------------------
# pairwise comparison
# --------------------------------------------------------------------------

def test_compare_examples(K200):
    def rel(f1, f2):
        return sc.compare_sequences(sc.build_sequence(f1, K200),
                                    sc.build_sequence(f2, K200)).relation

    assert rel(sc.Gevrey(2), sc.Gevrey(3)) is Relation.LHD
    assert rel(sc.Gevrey(2), sc.Gevrey(2)) is Relation.APPROX
    assert rel(sc.Gevrey(5), sc.LQR(1.01, 1.1)) is Relation.LHD
    assert rel(sc.LQR(2, 2), sc.LQR(3, 2)) is Relation.LHD
    assert rel(sc.LQR(2, 1.5), sc.LQR(2, 2)) is Relation.LHD
    assert rel(sc.Gevrey(3), sc.Gevrey(2)) is Relation.INCOMPARABLE


def test_compare_le_reported_alongside():
    g2 = sc.build_sequence(sc.Gevrey(2), 200)
    g3 = sc.build_sequence(sc.Gevrey(3), 200)
    r = sc.compare_sequences(g2, g3)
    assert r.le and r.relation is Relation.LHD


def test_compare_requires_common_truncation():
    with pytest.raises(LengthMismatch):
        sc.compare_sequences(sc.build_sequence(sc.Gevrey(2), 100),
                             sc.build_sequence(sc.Gevrey(2), 120))
    with pytest.raises(TruncationTooSmall):
        sc.compare_sequences(sc.build_sequence(sc.Gevrey(2), 10),
                             sc.build_sequence(sc.Gevrey(3), 10))


def test_preceq_is_preorder_on_builtins(builtins_200):
    seqs = builtins_200
    pre = [[sc.compare_sequences(a, b).preceq for b in seqs] for a in seqs]
    for i in range(len(seqs)):
        assert pre[i][i], seqs[i].label  # reflexive
    for i in range(len(seqs)):
        for j in range(len(seqs)):
            for k in range(len(seqs)):
                if pre[i][j] and pre[j][k]:
                    assert pre[i][k], (seqs[i].label, seqs[j].label, seqs[k].label)


def test_numeric_path_on_custom_sequences():
    # custom families force the pure numeric classifier
    a = sc.build_sequence(sc.Custom(lambda k: 2.0 * gammaln(k + 1), "c2"), 200)
    b = sc.build_sequence(sc.Custom(lambda k: 3.0 * gammaln(k + 1), "c3"), 200)
    r = sc.compare_sequences(a, b)
    assert r.relation is Relation.LHD
    assert r.confidence is sc.Confidence.NUMERIC
    assert sc.compare_sequences(a, a).relation is Relation.APPROX


# --------------------------------------------------------------------------
# interpolation construction
# --------------------------------------------------------------------------

@pytest.mark.parametrize("lo,hi", [(1, 2), (1, 3), (2, 4)])
def test_interpolation_postconditions(lo, hi, K200):
    Lp = sc.build_sequence(sc.Gevrey(lo), K200)
    M = sc.build_sequence(sc.Gevrey(hi), K200)
    N = sc.interpolate_sequence(Lp, M)
    assert sc.check_property(N, SeqProperty.LOG_CONVEX).holds
    assert np.all(Lp.log_terms <= N.log_terms + 1e-9)
    assert sc.compare_sequences(N, M).relation is Relation.LHD


def test_interpolation_rejects_equal_pair(K200):
    g2 = sc.build_sequence(sc.Gevrey(2), K200)
    with pytest.raises(PreconditionViolated):
        sc.interpolate_sequence(g2, g2)


def test_interpolation_rejects_subfactorial_lower(K200):
    # lower sequence must dominate k!
    slow = sc.build_sequence(sc.Custom(lambda k: 0.5 * gammaln(k + 1), "half"), K200)
    M = sc.build_sequence(sc.Gevrey(3), K200)
    with pytest.raises(PreconditionViolated):
        sc.interpolate_sequence(slow, M)


# --------------------------------------------------------------------------
# split inequality
# --------------------------------------------------------------------------

def test_split_inequality_frozen_case():
    g1 = sc.build_sequence(sc.Gevrey(1), 10)
    # M_2 = 2 against M_1 + M_3 = 1 + 6
    assert sc.verify_split_inequality(g1, 1, 1, 1, 1.0, 1.0)


def test_split_inequality_degenerate_ell_zero():
    for fam in (sc.Gevrey(2), sc.NQR(2, 2)):
        M = sc.build_sequence(fam, 50)
        assert sc.verify_split_inequality(M, 3, 5, 0, 1.0, 1.0)


def test_split_inequality_fuzz_10k(rng, builtins_200):
    # >= 10^4 random draws across log-convex built-ins must all pass
    draws = 0
    for seq in builtins_200:
        for _ in range(800):
            j, k, ell = (int(x) for x in rng.integers(0, 60, 3))
            rho, R = np.exp(rng.uniform(0.0, math.log(1e3), 2))
            assert sc.verify_split_inequality(seq, j, k, ell, rho, R), \
                (seq.label, j, k, ell, rho, R)
            draws += 1
    assert draws >= 10_000


def test_split_inequality_index_guard():
    M = sc.build_sequence(sc.Gevrey(2), 10)
    with pytest.raises(IndexOutOfRange):
        sc.verify_split_inequality(M, 5, 5, 5, 1.0, 1.0)
    with pytest.raises(OutOfRangeParam):
        sc.verify_split_inequality(M, 1, 1, 1, 0.5, 1.0)


@settings(max_examples=200, deadline=None)
@given(
    j=st.integers(0, 40), k=st.integers(0, 40), ell=st.integers(0, 40),
    log_rho=st.floats(0, 7), log_R=st.floats(0, 7),
    s=st.floats(1.0, 4.0),
)
def test_split_inequality_property(j, k, ell, log_rho, log_R, s):
    M = sc.build_sequence(sc.Gevrey(s), 120)
    assert sc.verify_split_inequality(M, j, k, ell, math.exp(log_rho), math.exp(log_R))


@settings(max_examples=60, deadline=None)
@given(s=st.floats(0.5, 4.0), K=st.integers(16, 120))
def test_gevrey_always_log_convex_property(s, K):
    M = sc.build_sequence(sc.Gevrey(s), K)
    assert sc.check_property(M, SeqProperty.LOG_CONVEX).holds
