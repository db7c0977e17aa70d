import math
import random
from fractions import Fraction

import pytest

from padix import elementary as el
from padix.errors import IrregularSingularity, NotSplit
from padix.field import ApproxElement, make_field, reduce_mod
from padix.functions import HypergeomParams, hypergeom_ode, polylog_ode
from padix.recurrence import ODESpec, derive_recurrence, partial_sum_matrix
from padix.regsing import (Branch, default_log, factor_indicial, formal_coefficients,
                           indicial_data, regsing_partial_sum, specialize, zp_roots)

from helpers import fraction, random_ode, random_point

Q5 = make_field(5)
Q7 = make_field(7)


def ints(poly):
    return [int(c.c[0]) for c in poly]


def idata_of(coeffs, K=Q5):
    return indicial_data(derive_recurrence(ODESpec.from_rational(K, coeffs)))


def test_indicial_ordinary():
    d = idata_of([[1], [2, 1], [3, 0, 1]])
    assert d.j0 == 0
    assert ints(d.Q[0]) == [0, -3, 3]  # 3 n (n - 1)


def test_indicial_euler_and_polylog():
    d = idata_of([[-Fraction(1, 3)], [0, 1]])
    assert ints(d.Q[0]) == [-1, 3]  # 3 (n - 1/3)
    d = indicial_data(derive_recurrence(polylog_ode(Q5, 1)))
    _, classes = factor_indicial(d.Q[0])
    assert len(classes) == 1 and classes[0].shifts == {0: 1, 1: 1}


def test_indicial_irregular():
    with pytest.raises(IrregularSingularity):
        idata_of([[-1], [0, 0, 1]])
    assert idata_of.__name__  # formal mode still yields data
    rec = derive_recurrence(ODESpec.from_rational(Q5, [[-1], [0, 0, 1]]))
    assert indicial_data(rec, formal=True).Q[0]


def test_factor_examples():
    _, cl = factor_indicial([Q5.from_int(c) for c in [0, 0, -3, 1]])
    assert len(cl) == 1
    assert cl[0].shifts == {0: 2, 3: 1} and cl[0].kappa == 3
    _, cl = factor_indicial([Q7.from_int(c) for c in [-2, 0, 1]])
    assert len(cl) == 1 and cl[0].degree == 2 and cl[0].kappa == 1
    _, cl = factor_indicial([Q5.from_int(c) for c in [3, -8, 4]])
    assert len(cl) == 1
    assert cl[0].q == [Fraction(-1, 2), 1] and cl[0].tau == 2 and set(cl[0].shifts) == {0, 1}


def test_zp_roots():
    assert [int(r.value.c[0]) for r in zp_roots([Fraction(-3), 1], 5, 10)] == [3]
    roots = zp_roots([Fraction(-2), 0, 1], 7, 10)
    assert len(roots) == 2
    for g in roots:
        assert (g * g - 2).with_precision(10).is_zero()
    assert zp_roots([Fraction(-2), 0, 1], 5, 10) == []
    with pytest.raises(NotSplit):
        regsing_partial_sum(ODESpec(Q5, [[-2], [0, 1], [0, 0, 1]]), 6, 1, 5, 10,
                            x0=Q5.from_int(1))


def test_ordinary_path_agrees():
    rng = random.Random(1)
    for _ in range(10):
        o = ODESpec.from_rational(Q5, random_ode(rng, 5, bits=12))
        u, v = random_point(rng, 5, 12)
        N = rng.randint(o.r, 80)
        A = partial_sum_matrix(o, u, v, N, 30)
        B = regsing_partial_sum(o, u, v, N, 30)
        assert A.entries == B.entries


def test_li1_column_is_log():
    rng = random.Random(2)
    o = polylog_ode(Q5, 1)
    for _ in range(10):
        x = Q5.from_int(5 * rng.randrange(1, 5 ** 20))
        M = regsing_partial_sum(o, x, 1, 120, 30)
        labels = [(l[1] + l[2], l[3]) for l in M.labels]
        assert M[0, labels.index((0, 0))] == ApproxElement(Q5, Q5.one, 30)
        assert M[0, labels.index((1, 0))] == -el.log1m(reduce_mod(x, 30), 30)


def test_euler_powers():
    M = regsing_partial_sum(ODESpec(Q5, [[-1], [0, 3]]), 6, 1, 5, 20, x0=Q5.from_int(1))
    assert M[0, 0] == el.pow(ApproxElement(Q5, Q5.from_int(6), 20), Fraction(1, 3), 20)
    M = regsing_partial_sum(ODESpec(Q7, [[-2], [0, 1], [0, 0, 1]]), 8, 1, 5, 12,
                            x0=Q7.from_int(1))
    expected = sorted(int(el.pow(ApproxElement(Q7, Q7.from_int(8), 12), g, 12).value.c[0])
                      for g in zp_roots([Fraction(-2), 0, 1], 7, 14))
    assert sorted(int(M[0, j].value.c[0]) for j in range(2)) == expected


def test_specialize_examples():
    s = 20
    one = ApproxElement(Q5, Q5.one, s)
    zero = ApproxElement(Q5, Q5.zero, s)
    x0 = ApproxElement(Q5, Q5.from_int(1), s)
    xi = ApproxElement(Q5, Q5.from_int(10), s)
    assert specialize([[one, zero]], x0, xi, 0, sigma=s) == [one, zero]
    got = specialize([[zero, zero], [one, zero]], x0, xi, 0, sigma=s)
    # log(1 + xi + Delta) = log(1 + xi) + Delta/(1 + xi) + ...
    assert got[0] == el.log1p(xi, s)
    assert got[1] == (1 + xi).inverse().with_precision(s)
    lx = ApproxElement(Q5, Q5.from_int(123), s)
    got = specialize([[zero], [one]], x0, xi, 0, branch=Branch(log_x0=lx), sigma=s)
    assert got[0] == lx + el.log1p(xi, s)


def test_specialize_multiplicative():
    rng = random.Random(3)
    s = 20
    x0 = ApproxElement(Q5, Q5.from_int(1), s)
    for _ in range(10):
        a = [ApproxElement(Q5, Q5.from_int(rng.randrange(5 ** 20)), s) for _ in range(2)]
        b = [ApproxElement(Q5, Q5.from_int(rng.randrange(5 ** 20)), s) for _ in range(2)]
        ab = [a[0] * b[0], a[0] * b[1] + a[1] * b[0]]
        xi = ApproxElement(Q5, Q5.from_int(5 * rng.randrange(5 ** 10)), s)
        d1, d2 = Fraction(1, 3), Fraction(2, 7)
        sa = specialize([a], x0, xi, d1, sigma=s)
        sb = specialize([b], x0, xi, d2, sigma=s)
        sab = specialize([ab], x0, xi, d1 + d2, sigma=s)
        assert sab == [sa[0] * sb[0], sa[0] * sb[1] + sa[1] * sb[0]]


def test_default_log_branch():
    s = 20
    assert default_log(Q5.from_int(5), s).is_zero()
    u = Q5.from_int(1 + 5 * 7)
    assert default_log(u, s) == el.log1p(ApproxElement(Q5, Q5.from_int(35), s), s)
    # log is additive on units, including the Teichmueller part
    a, b = Q5.from_int(2), Q5.from_int(3)
    assert default_log(a * b, s) == default_log(a, s) + default_log(b, s)


# -- coefficient-level checks -------------------------------------------------

def apply_ode(coeffs, gamma, series, kappa):
    """Residual sum_i a_i(t) D^i y for y = sum_{n,k} c[n][k] t^(gamma+n) L^k/k!,
    L = log t, as a dict (exponent offset, k) -> Fraction."""
    out = {}
    cur = {(n, k): c for n, vec in enumerate(series) for k, c in enumerate(vec) if c}
    for i, a in enumerate(coeffs):
        for j, aij in enumerate(a):
            if not aij:
                continue
            for (n, k), c in cur.items():
                key = (n + j, k)
                out[key] = out.get(key, 0) + aij * c
        # differentiate: t^m L^k/k! -> m t^(m-1) L^k/k! + t^(m-1) L^(k-1)/(k-1)!
        nxt = {}
        for (n, k), c in cur.items():
            m = gamma + n
            if m:
                nxt[(n - 1, k)] = nxt.get((n - 1, k), 0) + m * c
            if k:
                nxt[(n - 1, k - 1)] = nxt.get((n - 1, k - 1), 0) + c
        cur = {key: c for key, c in nxt.items() if c}
    return out


def engine_coefficients(ode, cls, nterms):
    """f_nu read off the product-tree engine as differences of partial sums at x = 1."""
    from padix.regsing import class_partial_sums
    K = ode.K
    idata = indicial_data(derive_recurrence(ode))
    sums = []
    for N in range(nterms + 1):
        cols = class_partial_sums(K, idata, cls, K.one, 1, N)
        sums.append({(c.nu0, c.k): [Fraction(int(jet[0]), int(c.den)) for jet in c.num]
                     for c in cols})
    zero = [Fraction(0)] * cls.kappa
    out = {}
    for key in sums[-1]:
        out[key] = [[a - b for a, b in zip(sums[nu + 1].get(key, zero), sums[nu].get(key, zero))]
                    for nu in range(nterms)]
    return out


def class_recurrence_residual(idata, gamma, series, nu, kappa):
    """sum_j Q_j(gamma + nu + Lambda) f_{nu - j}, Lambda acting as the left shift."""
    res = [Fraction(0)] * kappa
    for j, Q in enumerate(idata.Q):
        if nu - j < 0 or not Q:
            continue
        q = [Fraction(int(c.c[0])) for c in Q]
        x = gamma + nu
        # Taylor coefficients Q^(i)(x)/i!
        taylor = [sum(math.comb(d, i) * c * x ** (d - i) for d, c in enumerate(q) if d >= i)
                  for i in range(len(q))]
        f = series[nu - j]
        for k in range(kappa):
            for i, t in enumerate(taylor):
                if k + i < kappa:
                    res[k] += t * f[k + i]
    return res


@pytest.mark.parametrize("name", ["li2", "2f1"])
def test_class_recurrence_and_ode_residuals(name):
    if name == "li2":
        ode = polylog_ode(Q5, 2)
    else:
        ode = hypergeom_ode(Q5, HypergeomParams(Fraction(1, 2), Fraction(1, 2), Fraction(1)))
    coeffs = [[fraction(c) for c in a] for a in ode.coeffs]
    idata = indicial_data(derive_recurrence(ode))
    nterms = 50 + ode.r + 2
    cols = formal_coefficients(ode, nterms)
    assert len(cols) == ode.r
    for cls, nu0, k, vecs in cols:
        gamma = Fraction(cls.gamma_if_rational())
        series = [[fraction(c) for c in f] for f in vecs]
        for nu in range(nu0, nu0 + 50):
            assert class_recurrence_residual(idata, gamma, series, nu, cls.kappa) == [0] * cls.kappa
        res = apply_ode(coeffs, gamma, series, cls.kappa)
        for (n, kk), c in res.items():
            if n < nterms - ode.r - 1:
                assert c == 0, (n, kk)
        # the product-tree engine produces the same coefficients
        engine = engine_coefficients(ode, cls, nterms)
        assert engine[(nu0, k)] == series


def test_basis_normalization():
    ode = polylog_ode(Q5, 2)
    cols = formal_coefficients(ode, 10)
    E = set()
    for cls, nu0, k, _ in cols:
        E.add((nu0, k))
    for cls, nu0, k, vecs in cols:
        hits = [(nu, kk) for (nu, kk) in E if vecs[nu][kk].num.c[0] != 0]
        assert hits == [(nu0, k)]
