import math

import numpy as np
import pytest

from ultrascale import conjugate as cj
from ultrascale import seqcore as sc
from ultrascale import wmatrix as wm
from ultrascale.errors import OrderViolation, OutOfRangeParam, TruncationTooSmall
from ultrascale.seqcore import SeqProperty, Status
from ultrascale.wmatrix import MatrixProperty, MatrixRelation


@pytest.fixture(scope="module")
def gevrey_matrix():
    return wm.build_matrix(wm.GevreyMatrix(), [1.5, 2.0, 3.0], 200)


@pytest.fixture(scope="module")
def r_matrix():
    return wm.build_matrix(wm.Rmatrix(q=math.e), [1.5, 2.0, 3.0], 200)


@pytest.fixture(scope="module")
def q2_matrix():
    return wm.build_matrix(wm.Qr(r=2.0), [1.5, 2.0, 3.0], 200)


# --------------------------------------------------------------------------
# construction
# --------------------------------------------------------------------------

def test_build_gevrey_matrix_ordered(gevrey_matrix):
    m = gevrey_matrix
    assert len(m.seqs) == 3
    for a, b in zip(m.seqs, m.seqs[1:]):
        assert np.all(a.log_terms[1:] <= b.log_terms[1:] + 1e-12)


def test_build_jsigma_reversed_order():
    m = wm.build_matrix(wm.Jsigma(1.0), [1, 2, 3], 50)
    assert m.order_reversed
    # deeper iterated log means smaller members for k >= 1
    assert np.all(m.seqs[2].log_terms[1:] <= m.seqs[1].log_terms[1:] + 1e-12)
    assert np.all(m.seqs[1].log_terms[1:] <= m.seqs[0].log_terms[1:] + 1e-12)


def test_build_from_weight_fn_members():
    w2 = cj.make_weight_fn(cj.OmegaS(2))
    m = wm.build_matrix(wm.FromWeightFn(w2), [1.0, 2.0, 4.0], 30)
    ks = np.arange(31)
    for lam in (1.0, 2.0, 4.0):
        assert np.max(np.abs(m.seq_at(lam).log_terms - lam * ks ** 2 / 4.0)) < 1e-6


def test_order_violation_detected():
    a = sc.build_sequence(sc.Gevrey(2), 50)
    b = sc.build_sequence(sc.Gevrey(1.5), 50)
    with pytest.raises(OrderViolation):
        wm.WeightMatrix.from_sequences([1.0, 2.0], [a, b], "bad")


def test_monotone_grid_required():
    with pytest.raises(OutOfRangeParam):
        wm.build_matrix(wm.GevreyMatrix(), [2.0, 1.5, 3.0], 50)


def test_shared_truncation_required():
    a = sc.build_sequence(sc.Gevrey(2), 50)
    b = sc.build_sequence(sc.Gevrey(3), 60)
    with pytest.raises(TruncationTooSmall):
        wm.WeightMatrix.from_sequences([1.0, 2.0], [a, b], "bad")


def test_singleton_matrix_allowed():
    m = wm.build_matrix(wm.Bj(1), [1.0], 50)
    assert len(m.seqs) == 1


# --------------------------------------------------------------------------
# relations
# --------------------------------------------------------------------------

def test_relate_self_contains_approx_both(gevrey_matrix):
    rep = wm.matrix_relate(gevrey_matrix, gevrey_matrix)
    assert rep.has(MatrixRelation.APPROX_BOTH)


def test_gevrey_strictly_below_r(gevrey_matrix, r_matrix):
    rep = wm.matrix_relate(gevrey_matrix, r_matrix)
    assert rep.has(MatrixRelation.ROU_LHD_BEU)
    # the all-pairs claim must be exhaustively re-checkable
    for M in gevrey_matrix.seqs:
        for N in r_matrix.seqs:
            assert sc.compare_sequences(M, N).lhd


def test_r_vs_qr_brackets(r_matrix, q2_matrix):
    rep = wm.matrix_relate(r_matrix, q2_matrix)
    assert rep.has(MatrixRelation.BEU_PRECEQ)
    rep2 = wm.matrix_relate(q2_matrix, r_matrix)
    assert rep2.has(MatrixRelation.ROU_PRECEQ)


def test_jsigma_pair_approx_both_analytic():
    j1 = wm.build_matrix(wm.Jsigma(1.0), [1, 2, 3], 200)
    j2 = wm.build_matrix(wm.Jsigma(2.0), [1, 2, 3], 200)
    rep = wm.matrix_relate(j1, j2)
    assert rep.has(MatrixRelation.APPROX_BOTH)
    v = rep.verdicts[MatrixRelation.APPROX_BOTH]
    # the grids cannot exhibit the deep-end partner; the analytic answer is
    # attached and the grid outcome stays visible in the diagnostics
    notes = " ".join(v.diagnostics.notes)
    assert "analytic" in notes and "grid verdict" in notes


def test_jsigma_identity_direction_on_grid():
    j1 = wm.build_matrix(wm.Jsigma(1.0), [1, 2, 3], 200)
    j2 = wm.build_matrix(wm.Jsigma(2.0), [1, 2, 3], 200)
    # sigma1 <= sigma2 makes the identity pairing work on-grid
    v = wm.matrix_relate(j1, j2).verdicts[MatrixRelation.ROU_PRECEQ]
    assert v.holds


def test_jsigma_vs_singleton():
    # a one-point family at the shallowest depth bounds the whole scale
    j1 = wm.build_matrix(wm.Jsigma(1.0), [1, 2, 3], 200)
    single = wm.build_matrix(wm.Bj(1), [1.0], 200)
    rep = wm.matrix_relate(j1, single)
    assert rep.verdicts[MatrixRelation.ROU_PRECEQ].holds


def test_rou_lhd_beu_fails_with_counterexample(gevrey_matrix):
    rep = wm.matrix_relate(gevrey_matrix, gevrey_matrix)
    v = rep.verdicts[MatrixRelation.ROU_LHD_BEU]
    assert v.fails and v.counterexample is not None


# --------------------------------------------------------------------------
# matrix conditions
# --------------------------------------------------------------------------

def test_gevrey_matrix_semiregular(gevrey_matrix):
    for prop in (MatrixProperty.MATRIX_ANAL, MatrixProperty.R_SEMIREGULAR,
                 MatrixProperty.B_SEMIREGULAR):
        assert wm.check_matrix_property(gevrey_matrix, prop).holds, prop


def test_from_weight_fn_semiregular():
    w2 = cj.make_weight_fn(cj.OmegaS(2))
    m = wm.build_matrix(wm.FromWeightFn(w2), [1.0, 2.0, 4.0], 60)
    assert wm.check_matrix_property(m, MatrixProperty.R_SEMIREGULAR).holds
    assert wm.check_matrix_property(m, MatrixProperty.B_SEMIREGULAR).holds


def test_pure_power_family_growth_conditions():
    m = wm.build_matrix(wm.Rmatrix(q=2.0, factorial=False), [1.5, 2.0, 3.0], 100)
    for prop in (MatrixProperty.R_MG, MatrixProperty.B_MG,
                 MatrixProperty.R_L, MatrixProperty.B_L):
        v = wm.check_matrix_property(m, prop)
        assert v.holds, prop
    # explicit half of the doubling estimate: N_{2k} <= A^k (N'_k)^2 for r' > r
    n_r = sc.build_sequence(sc.NQR(2, 2.0), 100).log_terms
    n_rp = sc.build_sequence(sc.NQR(2, 3.0), 100).log_terms
    k = np.arange(1, 51)
    gap = (n_r[2 * k] - 2 * n_rp[k]) / k
    logA = gap.max()  # a finite log A certifies the bound for all checked k
    assert np.isfinite(logA) and gap[-1] < 0
    assert np.all(n_r[2 * k] <= k * logA + 2 * n_rp[k] + 1e-9)


def test_strict_grid_mode_reports_direction():
    m = wm.build_matrix(wm.Rmatrix(q=2.0, factorial=False), [1.5, 2.0, 3.0], 100)
    v = wm.check_matrix_property(m, MatrixProperty.R_MG, strict_grid=True)
    assert v.status is Status.INCONCLUSIVE
    assert any("extend the grid" in n for n in v.diagnostics.notes)


def test_off_grid_partner_noted():
    m = wm.build_matrix(wm.Rmatrix(q=2.0, factorial=False), [1.5, 2.0, 3.0], 100)
    v = wm.check_matrix_property(m, MatrixProperty.R_MG)
    assert v.holds
    assert any("off-grid" in n for n in v.diagnostics.notes)


def test_matrix_anal_flags_bad_member():
    # the factorial scale itself has bounded k-th roots of M_k/k!
    a = sc.build_sequence(sc.Gevrey(1), 60)
    b = sc.build_sequence(sc.Gevrey(2), 60)
    m = wm.WeightMatrix.from_sequences([1.0, 2.0], [a, b], "mixed")
    v = wm.check_matrix_property(m, MatrixProperty.MATRIX_ANAL)
    assert not v.holds


def test_semiregular_witness_recheck(gevrey_matrix):
    v = wm.check_matrix_property(gevrey_matrix, MatrixProperty.R_SEMIREGULAR)
    for param_label, info in v.witnesses["pairing"].items():
        M = gevrey_matrix.seq_at(float(param_label))
        N = gevrey_matrix.seq_at(info["partner"]) if info["partner"] in gevrey_matrix.params \
            else sc.build_sequence(sc.Gevrey(info["partner"]), gevrey_matrix.K)
        ks = np.arange(gevrey_matrix.K)
        lhs = M.log_terms[1:]
        rhs = (ks + 1) * math.log(info["C"]) + N.log_terms[:-1]
        assert np.all(lhs <= rhs + 1e-7)
