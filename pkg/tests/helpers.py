"""Shared generators and measurements for the test suite."""

from __future__ import annotations

import math
import random
from fractions import Fraction

from padix.field import ExactElement, height


def random_ode(rng, p, max_r=3, max_d=3, bits=20):
    """Integer coefficient lists of a random ODE with a_r(0) != 0."""
    r = rng.randint(1, max_r)
    d = rng.randint(0, max_d)
    coeffs = []
    for i in range(r + 1):
        deg = rng.randint(0, d)
        a = [rng.randrange(-2 ** bits, 2 ** bits) for _ in range(deg + 1)]
        coeffs.append(a)
    while coeffs[r][0] == 0:
        coeffs[r][0] = rng.randrange(-2 ** bits, 2 ** bits)
    # make sure some coefficient reaches degree d
    if d and all(len(a) <= d for a in coeffs):
        coeffs[0] = coeffs[0] + [0] * (d + 1 - len(coeffs[0]))
        coeffs[0][d] = rng.randrange(1, 2 ** bits)
    return coeffs


def random_point(rng, p, bits=20):
    u = rng.randrange(-2 ** bits, 2 ** bits)
    v = rng.randrange(1, 2 ** 10)
    while v % p == 0:
        v = rng.randrange(1, 2 ** 10)
    return u, v


def _h(x, C):
    if isinstance(x, ExactElement):
        return height(x)
    # math.log accepts big ints, log1p does not
    return math.log(1 + abs(int(x))) + C


def h_max(obj, C):
    """Largest height over the scalar entries of a nested list."""
    if isinstance(obj, (list, tuple)):
        vals = [h_max(o, C) for o in obj]
        return max(vals) if vals else C
    return _h(obj, C)


def subproduct_height_violations(T, n0, n1, ell, H, s, C):
    """Which of the three subproduct height bounds fail for T = P(n0, n1)."""
    n = n1 - n0
    ls, ln = math.log(s), math.log(n1)
    bad = []
    eps = 1e-9
    if max(h_max(T.u, C), _h(T.v, C)) > n * (H + ls) + eps:
        bad.append("u,v")
    if max(h_max(T.C, C), _h(T.d, C)) > n * (ell + (s + 2) * (ls + ln) + 1) + eps:
        bad.append("C,d")
    if h_max(T.R, C) > n * (ell + H + (s + 3) * (ls + ln) + 1) + eps:
        bad.append("R")
    return bad


def fraction(x):
    """An integer-valued exact element or FractionElement of Q_p as a Fraction."""
    if hasattr(x, "num"):
        return Fraction(int(x.num.c[0]), int(x.den))
    return Fraction(int(x.c[0]))
