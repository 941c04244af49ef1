import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lmoments.characters import build_modulus
from lmoments.lfunctions import TRUNCATED, CriticalPoint, l_all
from lmoments.mollifier import CUSTOM, make_params
from lmoments.moments import (
    MollifierValues,
    gcd_weighted_sums,
    lemma21_check,
    lemma22_check,
    moment,
    normalizer,
    prop24_diagonal,
    prop24_report,
    prop25_check,
    prop26_check,
    sweep,
)
from lmoments.twisted import TwistPair, twisted_lhs, twisted_main


def custom(k, q, bounds=(7,), ell=None):
    return make_params(k, q, window_mode=CUSTOM, bounds=list(bounds), ell=ell)


def test_moment_k0(mod101):
    assert moment(mod101, 0.3, 0) == 99


def test_moment_matches_twisted_lhs_q5(mod5):
    assert abs(moment(mod5, 0.0, 1) - twisted_lhs(mod5, 0.0, TwistPair(1, 1))) < 1e-12


@settings(max_examples=10, deadline=None)
@given(t=st.floats(-5, 5), k=st.floats(0.1, 2))
def test_moment_symmetry(mod101, t, k):
    assert moment(mod101, t, k) == pytest.approx(moment(mod101, -t, k), rel=1e-9)


def test_moment_rejects_negative_k(mod101):
    with pytest.raises(ValueError):
        moment(mod101, 0.0, -1)


def test_normalizer():
    assert normalizer(101, 1) == pytest.approx(99 * math.log(101))
    assert normalizer(101, 0) == 99


def test_mollifier_values_reject_other_modulus(mod101):
    with pytest.raises(ValueError):
        MollifierValues(custom(0.5, 103), mod101, 0.0)


@pytest.mark.parametrize("k", [0.3, 0.5, 0.8, 2.0])
def test_lemma21_degenerate(mod101, k):
    params = make_params(k, 101)
    assert params.R == 0
    r = lemma21_check(mod101, 0.0, k, params)
    assert r.holds and r.constant == 1.0
    L = l_all(mod101, CriticalPoint(0)).values
    assert r.lhs == pytest.approx(complex(math.fsum(L.real), math.fsum(L.imag)))
    if k < 1:
        expect = (np.sum(np.abs(L) ** (2 * k)) ** 0.5 * np.sum(np.abs(L) ** 2) ** ((1 - k) / 2)
                  * 99 ** (k / 2))
        assert r.rhs == pytest.approx(expect, rel=1e-12)


def test_lemma21_custom_examples(mod101):
    params = custom(0.5, 101, ell=[4])
    assert params.windows == ((3, 5, 7),)
    assert lemma21_check(mod101, 0.0, 0.5, params).holds
    params2 = custom(2, 101, ell=[4])
    r = lemma21_check(mod101, 0.5, 2, params2)
    assert r.holds and r.branch == "k>1" and len(r.rhs_factors) == 2


def test_lemma21_rejects(mod101):
    with pytest.raises(ValueError):
        lemma21_check(mod101, 0.0, 1, custom(0.5, 101))


def test_lemma22_degenerate(mod101):
    k = 0.5
    r = lemma22_check(mod101, 0.0, k, make_params(k, 101))
    L = l_all(mod101, CriticalPoint(0)).values
    assert r.rhs == pytest.approx(np.sum(np.abs(L) ** 2) ** k * 99 ** (1 - k), rel=1e-12)
    assert r.holds


def test_lemma22_custom(mod101):
    r = lemma22_check(mod101, 0.0, 0.5, custom(0.5, 101))
    assert math.isfinite(r.slack_ratio) and r.slack_ratio > 0
    assert r.holds == (r.lhs <= r.constant * r.rhs)
    with pytest.raises(ValueError):
        lemma22_check(mod101, 0.0, 2, custom(2, 101))


def test_lemma22_slack_stable_across_q():
    ratios = []
    for q in (101, 401, 1009):
        r = lemma22_check(build_modulus(q), 0.0, 0.5, custom(0.5, q))
        ratios.append(r.slack_ratio)
    assert max(ratios) / min(ratios) <= 3


def test_inequality_report_uses_truncated_vector(mod101):
    lv = l_all(mod101, CriticalPoint(0.0), TRUNCATED, X=20000)
    r = lemma21_check(mod101, 0.0, 0.5, custom(0.5, 101), lvec=lv)
    assert r.holds


def test_prop24_trivial(mod101):
    params = make_params(2, 101)
    assert prop24_diagonal(mod101, 2, params) == 99


def test_prop24_hand_enumeration(mod101):
    k = 2
    a1, a2 = k - 1, k
    params = custom(k, 101, bounds=(3,), ell=[2])
    x = {1: 1, 3: a1, 9: a1**2 / 2}
    y = {1: 1, 3: a2, 9: a2**2 / 2}
    # pairs a | b with sqrt(a b m) = b
    pairs = [(1, 1), (1, 3), (1, 9), (3, 3), (3, 9), (9, 9)]
    expected = 99 * sum(x[a] * y[b] / b for a, b in pairs)
    assert prop24_diagonal(mod101, k, params) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("k,bounds,ell", [(2, (7,), None), (1.5, (5, 11), [4, 4]), (3, (13,), [6])])
def test_prop24_positive_coefficients(mod101, k, bounds, ell):
    assert prop24_diagonal(mod101, k, custom(k, 101, bounds, ell)) >= 99


def test_prop24_budget_is_explicit(mod101):
    from lmoments.mollifier import SupportBudgetExceeded

    with pytest.raises(SupportBudgetExceeded):
        prop24_diagonal(mod101, 1.5, custom(1.5, 101, (5, 11)))


def test_prop24_report(mod101):
    rep = prop24_report(mod101, 0.0, 0.5, custom(0.5, 101))
    assert rep.off_diagonal == rep.lhs - rep.diagonal


def test_prop25_degenerate(mod101):
    params = make_params(0.5, 101)
    r = prop25_check(mod101, 0.0, 0.5, params, 0)
    assert r.coef_sum == pytest.approx(1.0)
    assert r.direct == pytest.approx(twisted_lhs(mod101, 0.0, TwistPair(1, 1)).real, rel=1e-12)
    main = twisted_main(mod101, 0.0, TwistPair(1, 1))
    assert r.predicted == pytest.approx(main.main_total, rel=1e-12)


@pytest.mark.slow
def test_prop25_custom(mod101):
    params = custom(0.5, 101)
    r = prop25_check(mod101, 0.0, 0.5, params, 0)
    assert math.isfinite(r.ratio) and r.ratio >= 0
    assert r.max_abs_u <= 1
    last = prop25_check(mod101, 0.0, 0.5, params, 1)
    assert last.max_abs_u <= 1
    # with no Q-factor the gcd prediction tracks the direct sum
    assert abs(last.predicted - last.direct) / last.direct < 0.15


def test_prop25_ratio_decreases_with_ell(mod101):
    ratios = [prop25_check(mod101, 0.0, 0.5, custom(0.5, 101, ell=[ell]), 0, decompose=False).ratio
              for ell in (12, 18, 24)]
    assert ratios[0] > ratios[1] > ratios[2]


def test_prop25_rejects(mod101):
    params = custom(0.5, 101)
    with pytest.raises(ValueError):
        prop25_check(mod101, 0.0, 0.5, params, 2)
    with pytest.raises(ValueError):
        prop25_check(mod101, 0.0, 2, custom(2, 101), 0)


def test_gcd_weighted_sums_oracle():
    u = {1: 0.5, 3: -0.25, 15: 1.0, 45: 0.3}
    s0 = s1 = s2 = 0.0
    for a, ua in u.items():
        for b, ub in u.items():
            g = math.gcd(a, b)
            w = g * ua * ub / (a * b)
            s0 += w
            s1 += w * math.log(a / g)
            s2 += w * math.log(b / g)
    got = gcd_weighted_sums(u, [3, 5], block=3)
    assert got == pytest.approx((s0, s1, s2), rel=1e-13)
    scaled = gcd_weighted_sums(u, [3, 5], log_scale=2.0)
    assert scaled[0] == pytest.approx(s0 * math.exp(4.0), rel=1e-13)


def test_prop26_degenerate(mod101):
    k = 0.5
    r = prop26_check(mod101, 0.0, k, make_params(k, 101))
    assert r.product_sum == 99 and r.v_sum == 99
    assert r.product_ratio == pytest.approx(math.log(101) ** (-k * k))


def test_prop26_bounded_across_q():
    rows = [prop26_check(build_modulus(q), 0.0, 0.5, custom(0.5, q)) for q in (101, 401, 1009)]
    for attr in ("product_ratio", "v_sum_ratio"):
        vals = [getattr(r, attr) for r in rows]
        assert all(math.isfinite(v) for v in vals)
        assert max(vals) / min(vals) <= 3


def test_sweep_k0_and_order():
    rows = sweep([103, 101], [0, 1], [0.0, 0.5])
    assert [(r.q, r.k, r.t) for r in rows] == [
        (q, k, t) for q in (103, 101) for k in (0, 1) for t in (0.0, 0.5)
    ]
    for r in rows:
        if r.k == 0:
            assert r.ratio == 1
        assert r.ratio == r.moment / r.normalizer and r.normalizer > 0


def test_sweep_isolates_failures():
    rows = sweep([101, 100, 103], [1], [0.0])
    assert [r.status for r in rows][0] == "ok" and rows[2].status == "ok"
    assert rows[1].status.startswith("error") and math.isnan(rows[1].ratio)


def test_sweep_parallel_matches_serial():
    a = sweep([101, 103, 107], [0.5], [0.0], workers=1)
    b = sweep([101, 103, 107], [0.5], [0.0], workers=2)
    assert a == b


def test_sweep_k1_matches_twisted_main():
    for q in (1009, 2003):
        row = sweep([q], [1], [0.0])[0]
        main = twisted_main(build_modulus(q), 0.0, TwistPair(1, 1)).main_total.real
        assert abs(row.ratio / (main / row.normalizer) - 1) < 0.15
