import math
from fractions import Fraction

import numpy as np
import pytest

from ultrascale import conjugate as cj
from ultrascale import iterates as it
from ultrascale import scales as sl
from ultrascale.errors import OddVanishingOrder, OutOfRangeParam

LOG2 = math.log(2.0)


def spec_hypo(d=2, order=2):
    return it.OperatorSpec(d, it.PrincipalHypoelliptic(order))


# --------------------------------------------------------------------------
# loss index
# --------------------------------------------------------------------------

def test_delta_elliptic_is_zero():
    d, e = it.subellipticity_delta(it.OperatorSpec(2, it.Elliptic()))
    assert d == Fraction(0) and e == Fraction(2)


def test_delta_exact_values():
    assert it.subellipticity_delta(spec_hypo(2, 2)) == (Fraction(2, 3), Fraction(4, 3))
    assert it.subellipticity_delta(spec_hypo(3, 4)) == (Fraction(4, 5), Fraction(11, 5))


def test_vanishing_order_validation():
    with pytest.raises(OddVanishingOrder):
        it.PrincipalHypoelliptic(3)
    with pytest.raises(OddVanishingOrder):
        it.PrincipalHypoelliptic(0)
    with pytest.raises(OutOfRangeParam):
        it.OperatorSpec(0, it.Elliptic())


# --------------------------------------------------------------------------
# closed-form maps
# --------------------------------------------------------------------------

def test_gevrey_loss_exact():
    out = it.loss_map(it.GevreyClass(Fraction(2)), spec_hypo())
    assert out.s == Fraction(5, 2)


def test_gevrey_loss_identity_when_elliptic():
    out = it.loss_map(it.GevreyClass(Fraction(2)), it.OperatorSpec(2, it.Elliptic()))
    assert out.s == Fraction(2)


def test_qgevrey_loss_exact_in_log_domain():
    out = it.loss_map(it.QGevreyClass(2.0, Fraction(2)), spec_hypo())
    assert out.log_q == float(Fraction(9, 4)) * math.log(2.0)
    assert out.q == pytest.approx(2.0 ** 2.25, rel=1e-15)
    assert out.r == Fraction(2)


def test_bj_loss_exact():
    out = it.loss_map(it.BJClass(1, Fraction(1)), spec_hypo())
    assert out.lam == Fraction(3, 2) and out.j == 1


def test_gevrey_loss_monotone_in_s_and_delta():
    spec = spec_hypo()
    outs = [it.loss_map(it.GevreyClass(s), spec).s for s in (1.0, 1.5, 2.0, 3.0)]
    assert all(b > a for a, b in zip(outs, outs[1:]))
    values = []
    for order in (2, 4, 6):
        values.append(it.loss_map(it.GevreyClass(2.0), spec_hypo(2, order)).s)
    assert all(b > a for a, b in zip(values, values[1:]))
    # fixed point at zero loss
    assert it.loss_map(it.GevreyClass(2.0), it.OperatorSpec(2, it.Elliptic())).s == 2.0


def test_gevrey_loss_semigroup_in_alpha():
    # composing the dilation form twice equals the squared-dilation map
    for s in (Fraction(3, 2), Fraction(2), Fraction(3)):
        for alpha in (Fraction(3, 2), Fraction(5, 4)):
            once = it.gevrey_loss_alpha(it.gevrey_loss_alpha(s, alpha), alpha)
            assert once == it.gevrey_loss_alpha(s, alpha * alpha)


def test_bj_loss_semigroup_in_alpha():
    spec = spec_hypo()
    a = spec.alpha
    lam = Fraction(1)
    twice = it.loss_map(it.loss_map(it.BJClass(1, lam), spec), spec).lam
    assert twice == a * a * lam


def test_qgevrey_consistency_with_pushforward():
    # mapping the power scale through the dilation-partner search reproduces
    # the closed-form exponent map: log q' = alpha^r log q
    spec = spec_hypo()  # alpha = 3/2
    alpha = float(spec.alpha)
    q = 2.0
    lam = math.log(q)
    grid = [lam, alpha ** 2 * lam, alpha ** 4 * lam]
    gf = sl.make_genfn(sl.PowerGen(2), grid)
    res = it.scale_pushforward_witness(gf, lam, spec)
    assert res.status is it.PushforwardStatus.OK
    assert res.partner == alpha ** 2 * lam
    assert res.gamma == 0.0
    out = it.loss_map(it.QGevreyClass(q, Fraction(2)), spec)
    assert out.log_q == pytest.approx(res.partner, rel=1e-15)


def test_pushforward_elliptic_identity():
    gf = sl.make_genfn(sl.GevreyGen(), [1.0, 2.0, 4.0])
    res = it.scale_pushforward_witness(gf, 1.0, it.OperatorSpec(2, it.Elliptic()))
    assert res.partner == 1.0 and res.gamma == 0.0


def test_pushforward_gevrey_documented_partner():
    spec = spec_hypo()  # alpha = 3/2
    gf = sl.make_genfn(sl.GevreyGen(), [1.0, 1.5, 2.0, 4.0])
    res = it.scale_pushforward_witness(gf, 1.0, spec)
    assert res.status is it.PushforwardStatus.OK
    assert res.partner == 1.5
    assert math.isfinite(res.gamma)


def test_pushforward_strict_grid_inconclusive():
    spec = spec_hypo()
    gf = sl.make_genfn(sl.PowerGen(2), [1.0])
    res = it.scale_pushforward_witness(gf, 1.0, spec, strict_grid=True)
    assert res.status is it.PushforwardStatus.INCONCLUSIVE
    assert "extend" in res.note


def test_scale_class_loss_delegates():
    spec = spec_hypo()
    gf = sl.make_genfn(sl.GevreyGen(), [1.0, 1.5, 2.0, 4.0])
    out = it.loss_map(it.ScaleClass(gf, 1.0), spec)
    assert isinstance(out, it.ScaleClass) and out.lam == 1.5


def test_weight_fn_loss_stable_under_square_absorption():
    spec = spec_hypo()
    w2 = cj.make_weight_fn(cj.OmegaS(2))
    out = it.loss_map(it.WeightFnClass(w2), spec)
    assert isinstance(out, it.WeightFnClass)
    assert out.omega is w2
    assert out.witnesses and "C" in out.witnesses


def test_weight_fn_loss_unstable_reports_required_growth():
    spec = spec_hypo()
    gp = cj.make_weight_fn(cj.GevreyPower(2))
    out = it.loss_map(it.WeightFnClass(gp), spec)
    assert isinstance(out, it.RequiredGrowth)
    assert out.alpha == pytest.approx(1.5)
    ts = np.array([4.0, 16.0])
    assert np.allclose(out(ts), gp(ts ** 1.5))


def test_missing_support_object():
    with pytest.raises(it.MissingSupportObject):
        it.loss_map(it.ScaleClass(None, 1.0), spec_hypo())
    with pytest.raises(it.MissingSupportObject):
        it.loss_map(it.WeightFnClass(None), spec_hypo())
