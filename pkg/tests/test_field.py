import math
import random
from fractions import Fraction

import pytest

from padix.errors import DenominatorNotUnit, NotEisenstein, NotIrreducible, NotMonic
from padix.field import (INF, ApproxElement, FractionElement, add, field_from_json,
                         format_approx, format_exact, height, make_field, mul,
                         parse_approx, parse_literal, reduce_mod, slice, valuation)

from oracles import base_digits

Q5 = make_field(5)
Q2S = make_field(2, [0, 1], [[-2], [0], [1]])
Q9 = make_field(3, [1, 0, 1])
FIELDS = [Q5, Q2S, Q9]


def rand_elem(K, rng, bits=40):
    return K.from_coeffs([rng.randrange(-2 ** bits, 2 ** bits) for _ in range(K.n)])


def test_make_field_shapes():
    assert (Q5.e, Q5.f) == (1, 1)
    assert (Q2S.e, Q2S.f) == (2, 1)
    assert (Q9.e, Q9.f) == (1, 2)


def test_make_field_errors():
    with pytest.raises(NotIrreducible):
        make_field(5, [1, 0, 1])
    with pytest.raises(NotEisenstein):
        make_field(2, [0, 1], [[-4], [0], [1]])
    with pytest.raises(NotEisenstein):
        make_field(3, [0, 1], [[-3], [1], [1]])
    with pytest.raises(NotMonic):
        make_field(5, [1, 2])


def test_valuation_examples():
    assert valuation(Q5.from_int(5)) == 1
    assert valuation(Q2S.Y()) == Fraction(1, 2)
    assert valuation(make_field(3).from_int(12)) == 1
    assert valuation(Q5.zero) == INF
    assert valuation(FractionElement(Q5.from_int(3), 25)) == -2


def test_height_examples():
    assert height(Q5.zero) == pytest.approx(Q5.C)
    assert height(Q5.from_int(-9)) == pytest.approx(math.log(10) + Q5.C)


def test_arithmetic_examples():
    Y = Q2S.Y()
    assert Y * Y == Q2S.from_int(2)
    x = Q9.from_coeffs([3, 4])
    assert x + Q9.zero == x
    assert Q9.X() * Q9.X() == Q9.from_int(-1)


def test_reduce_mod_examples():
    assert reduce_mod(Q5.from_int(3125), 5).value == Q5.zero
    assert reduce_mod(FractionElement(Q5.one, 2), 3).value == Q5.from_int(63)
    x = reduce_mod(Q5.from_int(123456), 4)
    assert reduce_mod(x, 4) == x
    with pytest.raises(DenominatorNotUnit):
        reduce_mod(FractionElement(Q5.one, 10), 3)


def test_slice_examples():
    x = Q5.from_int(137)
    # 137 = 2 + 2*5 + 0*25 + 1*125: digits 1 and 2 contribute 10
    d = base_digits(137, 5)
    assert slice(x, 1, 3) == Q5.from_int(sum(d[i] * 5 ** i for i in range(1, 3)))
    assert slice(x, 1, 3) == Q5.from_int(10)
    assert slice(x, 2, 2) == Q5.zero
    assert slice(x, 0, 2) == Q5.from_int(137 % 25)


def test_literals_round_trip():
    rng = random.Random(7)
    for K in FIELDS:
        for _ in range(50):
            x = rand_elem(K, rng, 30)
            assert parse_literal(K, format_exact(x)) == x
    q = parse_literal(Q2S, "(3 + Y)/7")
    assert isinstance(q, FractionElement) and q.den == 7
    a = parse_approx(Q5, "1552545 + O(pi^10)")
    assert format_approx(a) == "1552545 + O(pi^10)"


def test_field_json_round_trip():
    for K in FIELDS:
        assert field_from_json(K.to_json()) == K


def test_height_inequalities():
    rng = random.Random(11)
    fails = 0
    for case in range(1000):
        K = FIELDS[case % 3]
        s = rng.randint(2, 16)
        xs = [rand_elem(K, rng, rng.randint(1, 60)) for _ in range(s)]
        total, prod = xs[0], xs[0]
        for x in xs[1:]:
            total = add(total, x)
            prod = mul(prod, x)
        if height(total) > max(height(x) for x in xs) + math.log(s) + 1e-9:
            fails += 1
        if height(prod) > sum(height(x) for x in xs) + 1e-9:
            fails += 1
    assert fails == 0


def test_valuation_laws():
    rng = random.Random(12)
    fails = 0
    for case in range(1000):
        K = FIELDS[case % 3]
        p = K.p
        x = rand_elem(K, rng) * K.from_int(p ** rng.randint(0, 5))
        y = rand_elem(K, rng) * K.from_int(p ** rng.randint(0, 5))
        if rng.random() < 0.3 and K.e == 2:
            y = y * K.Y()
        vx, vy = valuation(x), valuation(y)
        vs = valuation(x + y)
        if vs < min(vx, vy) or (vx != vy and vs != min(vx, vy)):
            fails += 1
        if valuation(x * y) != vx + vy:
            fails += 1
    assert fails == 0


def test_slice_telescoping():
    rng = random.Random(13)
    fails = 0
    for case in range(1000):
        K = FIELDS[case % 3]
        x = rand_elem(K, rng, 80)
        cuts = [0] + sorted(rng.sample(range(1, 60), rng.randint(1, 6)))
        acc = K.zero
        for a, b in zip(cuts, cuts[1:]):
            acc = acc + slice(x, a, b)
        top = cuts[-1]
        m = K.p ** top
        if any((u - w) % m for u, w in zip(acc.c, x.c)):
            fails += 1
    assert fails == 0


def test_reduce_mod_respects_arithmetic():
    rng = random.Random(14)
    for case in range(300):
        K = FIELDS[case % 3]
        x, y = rand_elem(K, rng), rand_elem(K, rng)
        s = rng.randint(1, 40)
        lhs = reduce_mod(x * y, s)
        rhs = reduce_mod((reduce_mod(x, s) * reduce_mod(y, s)).value, s)
        assert lhs == rhs


def test_associativity():
    rng = random.Random(15)
    for case in range(300):
        K = FIELDS[case % 3]
        x, y, z = (rand_elem(K, rng) for _ in range(3))
        assert (x * y) * z == x * (y * z)


def test_approx_canonical_coefficients():
    rng = random.Random(16)
    for _ in range(200):
        s = rng.randint(1, 30)
        a = ApproxElement(Q2S, rand_elem(Q2S, rng, 50), s)
        for j, c in enumerate(a.value.c):
            assert 0 <= c < 2 ** max(-((j - s) // 2), 0) or (c == 0)
