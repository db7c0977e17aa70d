import math
import random
from fractions import Fraction

import pytest

from padix import elementary as el
from padix.errors import InsufficientPrecision, NotInDomain
from padix.field import ApproxElement, height, make_field, reduce_mod, valuation

from oracles import (Quad, naive_artin_hasse, naive_exp, naive_log1m, naive_pow,
                     residues)

Q5 = make_field(5)
Q2S = make_field(2, [0, 1], [[-2], [0], [1]])


def q5(n, s):
    return ApproxElement(Q5, Q5.from_int(n), s)


def q2s(a, b, s):
    return ApproxElement(Q2S, Q2S.from_coeffs([a, b]), s)


def test_decompose_examples():
    dec = el.log_factor_decompose(q5(7 * 5, 16), 16)
    assert dec.ell == 4
    zero = el.log_factor_decompose(q5(0, 16), 16)
    assert all(not any(x.c) for x in zero.factors)


@pytest.mark.parametrize("K,s", [(Q5, 50), (Q2S, 60)])
def test_decompose_invariants(K, s):
    rng = random.Random(1)
    for _ in range(20):
        x = ApproxElement(K, K.from_coeffs([K.p * rng.randrange(K.p ** 60)
                                            for _ in range(K.n)]), s)
        dec = el.log_factor_decompose(x, s)
        prod = K.one
        for i, xs in enumerate(dec.factors, start=1):
            prod = prod * (K.one - xs)
            if any(xs.c):
                assert valuation(xs) > 0
                assert valuation(xs) >= 2 ** (i - 1) - 1
                assert height(xs) <= (2 ** i - 1) * math.log(K.p) + K.C + 1e-9
        assert reduce_mod(prod, s) == (1 - x).with_precision(s)


def test_sum_log_series_oracles():
    got = el.sum_log_series(Q5.from_int(5), 30)
    assert got.value.c == residues(naive_log1m(Quad(5), 5, 1, 30), 5, 1, 30)
    got = el.sum_log_series(Q2S.Y(), 40)
    assert got.value.c == residues(naive_log1m(Quad(0, 1, 2), 2, 2, 40), 2, 2, 40)
    assert el.sum_log_series(Q5.zero, 10).is_zero()


def test_log1m_examples():
    assert el.log1m(q5(0, 20), 20).is_zero()
    assert el.log1m(q5(5, 50), 50) == el.sum_log_series(Q5.from_int(5), 50)


def test_log1m_homomorphism():
    rng = random.Random(2)
    s = 40
    for _ in range(30):
        x = q5(5 * rng.randrange(5 ** 40), s)
        y = q5(5 * rng.randrange(5 ** 40), s)
        z = x + y - x * y  # 1 - z = (1 - x)(1 - y)
        assert el.log1m(z, s) == el.log1m(x, s) + el.log1m(y, s)


def test_log1m_stability():
    # perturbing x by O(pi^m) moves log(1 - x) by O(pi^m) only
    rng = random.Random(3)
    for _ in range(20):
        x = 5 * rng.randrange(5 ** 30)
        m = rng.randint(2, 25)
        a = el.log1m(q5(x, 30), 30)
        b = el.log1m(q5(x + 5 ** m * rng.randrange(1, 100), 30), 30)
        assert (a - b).with_precision(m).is_zero()


def test_log1m_domain():
    with pytest.raises(NotInDomain):
        el.log1m(q5(3, 10), 10)
    with pytest.raises(InsufficientPrecision):
        el.log1m(q5(5, 5), 10)


def test_exp_examples():
    assert el.exp(q5(0, 20), 20) == q5(1, 20)
    got = el.exp(q5(5, 40), 40)
    assert got.value.c == residues(naive_exp(Quad(5), 5, 1, 40), 5, 1, 40)
    with pytest.raises(NotInDomain):
        el.exp(q5(1, 10), 10)
    with pytest.raises(NotInDomain):
        el.exp(q2s(2, 0, 10), 10)


def test_exp_log_inverse():
    rng = random.Random(4)
    s = 40
    for _ in range(20):
        x = q5(5 * rng.randrange(5 ** 40), s)
        assert el.log1m(1 - el.exp(x, s), s) == x
        assert el.exp(el.log1m(x, s), s) == (1 - x).with_precision(s)


def test_pow_examples():
    x = q5(5 * 17, 30)
    assert el.pow(1 + x, 0, 30) == q5(1, 30)
    assert el.pow(1 + x, 3, 30) == ((1 + x) * (1 + x) * (1 + x)).with_precision(30)
    h = el.pow(1 + x, Fraction(1, 2), 30)
    assert h * h == (1 + x).with_precision(30)
    got = el.pow(1 + x, Fraction(-7, 3), 30)
    assert got.value.c == residues(naive_pow(Quad(85), Fraction(-7, 3), 5, 1, 30), 5, 1, 30)


def test_pow_additivity_and_limits():
    rng = random.Random(5)
    s = 30
    for _ in range(15):
        b = 1 + q5(5 * rng.randrange(5 ** 30), s)
        d1 = Fraction(rng.randrange(-50, 50), rng.choice([1, 3, 7]))
        d2 = Fraction(rng.randrange(-50, 50), rng.choice([1, 2, 9]))
        assert el.pow(b, d1, s) * el.pow(b, d2, s) == el.pow(b, d1 + d2, s)
    # integers converging to 1/3 in Z_5 give converging powers
    b = 1 + q5(10, s)
    target = el.pow(b, Fraction(1, 3), s)
    for k in range(1, 8):
        n = pow(3, -1, 5 ** k)
        assert (el.pow(b, n, s) - target).with_precision(min(s, k)).is_zero()


def test_pow_domain():
    with pytest.raises(NotInDomain):
        el.pow(q5(3, 10), 2, 10)
    with pytest.raises(NotInDomain):
        el.pow(q5(6, 10), Fraction(1, 5), 10)


def test_artin_hasse_examples():
    assert el.artin_hasse(q5(0, 10), 10) == q5(1, 10)
    got = el.artin_hasse(q5(5, 30), 30)
    assert got.value.c == residues(naive_artin_hasse(Quad(5), 5, 1, 30), 5, 1, 30)
    # AH(x)/exp(x) = exp(x^p/p + ...), so they agree to p*val(x) - 1
    for n in (25, 5 * 7, 125):
        x = q5(n, 30)
        k = min(30, 5 * valuation(x) - 1)
        assert (el.artin_hasse(x, 30) - el.exp(x, 30)).with_precision(int(k)).is_zero()


def test_artin_hasse_coefficients_integral():
    for c in el.artin_hasse_coefficients(5, 60):
        assert c.denominator % 5


def test_ramified_examples():
    s = 40
    a = q2s(0, 1, s)
    assert el.log1m(a, s).value.c == residues(naive_log1m(Quad(0, 1, 2), 2, 2, s), 2, 2, s)
    b = q2s(4, 2, s)
    assert el.exp(b, s).value.c == residues(naive_exp(Quad(4, 2, 2), 2, 2, s), 2, 2, s)
    z = el.pow(1 + a, Fraction(1, 3), s)
    assert z * z * z == (1 + a).with_precision(s)
