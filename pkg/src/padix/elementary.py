"""log, exp, powering and the Artin-Hasse exponential.

Logarithms are summed exactly by binary splitting after cutting the input
into digit blocks of doubling length.  Everything exponential-like is then
obtained by Newton iteration on ``log y = L``.
"""

from __future__ import annotations

import builtins
import math
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from gmpy2 import mpz

from .errors import InsufficientPrecision, NotInDomain
from .field import (INF, ApproxElement, ExactElement, FractionElement,
                    approx_from_fraction, reduce_mod, slice_digits, valuation)


def _as_approx(x, sigma):
    if isinstance(x, ApproxElement):
        return x
    if isinstance(x, FractionElement):
        return approx_from_fraction(x, sigma)
    return reduce_mod(x, sigma)


@dataclass(frozen=True)
class DigitBurstFactors:
    """Factors x_1..x_l with 1 - x = prod (1 - x_s) modulo pi^sigma."""

    factors: tuple
    sigma: int

    @property
    def ell(self):
        return len(self.factors)


def _num_blocks(sigma, e):
    # least l >= 1 with 2^l >= sigma/e
    ell = 1
    while e * 2 ** ell < sigma:
        ell += 1
    return ell


def log_factor_decompose(x, sigma):
    """Split 1 - x into factors whose heights and valuations double."""
    x = _as_approx(x, sigma)
    K = x.K
    if x.prec < sigma:
        raise InsufficientPrecision(f"input known to O(pi^{x.prec}) < O(pi^{sigma})")
    if not x.is_zero() and (x.shift or x.val_pi() <= 0):
        raise NotInDomain("log(1 - x) needs val(x) > 0")
    ell = _num_blocks(sigma, K.e)
    rest = K.reduce(x.value, sigma)
    factors = []
    for s in range(1, ell + 1):
        if s < ell:
            xs = slice_digits(rest, 0, 2 ** s - 1)
        else:
            xs = rest
        factors.append(xs)
        if s < ell and any(xs.c):
            # 1 - rest = (1 - xs)(1 - rest'), so rest' = (rest - xs) / (1 - xs)
            inv = K.inv_unit(K.one - xs, sigma)
            rest = K.reduce((rest - xs) * inv, sigma)
        elif s < ell:
            rest = K.reduce(rest, sigma)
    return DigitBurstFactors(tuple(factors), sigma)


def _log_terms(u, v, sigma, e, p):
    """Least N with N*v - log_p N >= sigma/e past the point where that is increasing."""
    v = float(v)
    target = sigma / e
    n = max(1, math.ceil(1.0 / (v * math.log(p))))
    while n * v - math.log(n, p) < target - 1e-9:
        n = max(n + 1, int(n * 1.1))
    # back off to the least such N above the monotonicity threshold
    lo = max(1, math.ceil(1.0 / (v * math.log(p))))
    hi = n
    while lo < hi:
        mid = (lo + hi) // 2
        if mid * v - math.log(mid, p) >= target - 1e-9:
            hi = mid
        else:
            lo = mid + 1
    return hi


def _split_int(u, a, b):
    # returns (T, Q, U) with sum_{a<=i<b} u^i/i = u^(a-1) T/Q and U = u^(b-a)
    if b - a == 1:
        return u, mpz(a), u
    if b - a <= 8:
        T, Q, U = _split_int(u, a, a + 1)
        for i in range(a + 1, b):
            T = T * i + U * u * Q
            Q = Q * i
            U = U * u
        return T, Q, U
    m = (a + b) // 2
    T1, Q1, U1 = _split_int(u, a, m)
    T2, Q2, U2 = _split_int(u, m, b)
    return T1 * Q2 + U1 * T2 * Q1, Q1 * Q2, U1 * U2


def _split_ext(u, a, b):
    if b - a == 1:
        return u, mpz(a), u
    if b - a <= 8:
        T, Q, U = _split_ext(u, a, a + 1)
        for i in range(a + 1, b):
            T = T * i + (U * u) * Q
            Q = Q * i
            U = U * u
        return T, Q, U
    m = (a + b) // 2
    T1, Q1, U1 = _split_ext(u, a, m)
    T2, Q2, U2 = _split_ext(u, m, b)
    return T1 * Q2 + (U1 * T2) * Q1, Q1 * Q2, U1 * U2


def log_series_exact(u, N):
    """Exact sum_{i=1}^{N} u^i/i as (numerator, integer denominator)."""
    K = u.K
    if N < 1:
        return K.zero, mpz(1)
    if K.n == 1:
        T, Q, _ = _split_int(u.c[0], 1, N + 1)
        return K.from_int(T), Q
    T, Q, _ = _split_ext(u, 1, N + 1)
    return T, Q


def sum_log_series(u, sigma):
    """-sum_{i>=1} u^i/i = log(1 - u) modulo pi^sigma, for exact u with val(u) > 0."""
    if isinstance(u, ApproxElement):
        u = u.lift()
    K = u.K
    v = valuation(u)
    if v == INF:
        return ApproxElement(K, K.zero, sigma)
    if v <= 0:
        raise NotInDomain("log series needs val(u) > 0")
    if sigma <= 0:
        return ApproxElement(K, K.zero, sigma)
    N = _log_terms(u, v, sigma, K.e, K.p)
    T, Q = log_series_exact(u, N)
    p = K.p
    Q, t = gmpy2.remove(Q, p)
    k = -(-sigma // K.e)
    mod = mpz(p) ** (k + t)
    Tr = ExactElement(K, tuple(a % mod for a in T.c))
    Tr = Tr.exact_div_int(mpz(p) ** t) if t else Tr
    m = mpz(p) ** k
    inv = gmpy2.invert(Q % m, m)
    return ApproxElement(K, -(Tr * inv), sigma)


def log1m(x, sigma):
    """log(1 - x) modulo pi^sigma for val(x) > 0."""
    dec = log_factor_decompose(x, sigma)
    K = dec.factors[0].K
    total = ApproxElement(K, K.zero, sigma)
    for xs in dec.factors:
        if any(xs.c):
            total = total + sum_log_series(xs, sigma)
    return total


def log1p(x, sigma):
    """log(1 + x) modulo pi^sigma."""
    x = _as_approx(x, sigma)
    return log1m(-x, sigma)


def _log_unit(y, sigma):
    # log y for y = 1 + (positive valuation)
    return log1m(1 - y, sigma)


def _newton_log_inverse(L, y, sigma, guard):
    """Solve log y = L starting from y with log(y)/L residual of val > 1/(p-1)."""
    K = L.K
    top = sigma + guard
    precs = [top]
    while precs[-1] > 2 * guard + 2:
        precs.append(-(-precs[-1] // 2) + guard)
    precs.reverse()
    for w in precs:
        y = y.with_precision(w) if y.prec >= w else ApproxElement(K, y.value, w)
        z = L.with_precision(w) - _log_unit(y, w)
        y = y * (1 + z)
        y = y.with_precision(w)
    for _ in range(64):
        y = ApproxElement(K, y.value, top)
        z = L.with_precision(top) - _log_unit(y, top)
        if z.with_precision(sigma).is_zero():
            return y.with_precision(sigma)
        y = y * (1 + z)
    raise InsufficientPrecision("Newton iteration did not converge")


def _exp_domain(v, p):
    return v > Fraction(1, p - 1)


def exp(x, sigma):
    """exp(x) modulo pi^sigma for val(x) > 1/(p-1)."""
    x = _as_approx(x, sigma)
    K = x.K
    if x.is_zero():
        return ApproxElement(K, K.one, sigma)
    if x.prec < sigma:
        raise InsufficientPrecision(f"input known to O(pi^{x.prec}) < O(pi^{sigma})")
    v = x.valuation()
    if not _exp_domain(v, K.p):
        raise NotInDomain("exp needs val(x) > 1/(p-1)")
    guard = K.e
    L = x.with_precision(sigma + guard)
    y = _exp_seed(x, sigma + guard)
    return _newton_log_inverse(L, y, sigma, guard)


def _exp_seed(x, prec):
    # degree e-1 Taylor truncation
    K = x.K
    y = ApproxElement(K, K.one, prec)
    term = ApproxElement(K, K.one, prec)
    for i in range(1, K.e):
        term = term * x / i
        y = y + term
    if y.shift:
        y = ApproxElement(K, K.one, prec)
    return y.with_precision(prec)


def _coerce_exponent(delta, p, digits):
    """Return delta mod p^digits as a nonnegative integer, for delta in Z_p."""
    if isinstance(delta, ApproxElement):
        if delta.K.n != 1:
            raise NotInDomain("the exponent must lie in Q_p")
        if delta.shift:
            raise NotInDomain("the exponent must be a p-adic integer")
        if delta.prec < digits:
            raise InsufficientPrecision("exponent known to too few digits")
        return int(delta.value.c[0]) % p ** digits
    delta = Fraction(delta)
    if delta.denominator % p == 0:
        raise NotInDomain("the exponent must be a p-adic integer")
    m = p ** digits
    return int(delta.numerator * builtins.pow(delta.denominator, -1, m) % m)


def pow(base, delta, sigma):
    """(1 + x)^delta modulo pi^sigma for base = 1 + x, val(x) > 0, delta in Z_p."""
    base = _as_approx(base, sigma)
    K = base.K
    if base.prec < sigma:
        raise InsufficientPrecision("base known to too few digits")
    x = base - 1
    if not x.is_zero() and (x.shift or x.val_pi() <= 0):
        raise NotInDomain("pow needs base = 1 + x with val(x) > 0")
    p = K.p
    # raise to p^k until the base lands in the exponential's domain
    k = 0
    b = base.with_precision(sigma)
    while not (b - 1).is_zero() and not _exp_domain((b - 1).valuation(), p) \
            and (b - 1).val_pi() < sigma:
        b = b ** p
        k += 1
    digits = -(-sigma // K.e) + k + 1
    d = _coerce_exponent(delta, p, digits)
    d0 = d % p ** k
    d1 = d // p ** k
    low = base.with_precision(sigma) ** d0
    xr = b - 1
    if xr.is_zero() or xr.val_pi() >= sigma or d1 == 0:
        return low.with_precision(sigma)
    L = log1p(xr, sigma) * d1
    high = exp(L, sigma)
    return (low * high).with_precision(sigma)


def artin_hasse_coefficients(p, n):
    """Rational coefficients a_0..a_{n-1} of AH(t) via k a_k = sum_j a_{k-p^j}."""
    a = [Fraction(1)]
    for k in range(1, n):
        s = Fraction(0)
        q = 1
        while q <= k:
            s += a[k - q]
            q *= p
        a.append(s / k)
    return a


def _ah_inner_terms(v, p, e, sigma):
    n = 0
    while p ** n * v - n < Fraction(sigma, e):
        n += 1
    return n


def artin_hasse(x, sigma):
    """AH(x) = exp(sum_n x^(p^n)/p^n) modulo pi^sigma for val(x) > 0."""
    x = _as_approx(x, sigma)
    K = x.K
    if x.is_zero():
        return ApproxElement(K, K.one, sigma)
    if x.prec < sigma:
        raise InsufficientPrecision("input known to too few digits")
    if x.shift or x.val_pi() <= 0:
        raise NotInDomain("Artin-Hasse needs val(x) > 0")
    p, e = K.p, K.e
    v = x.valuation()
    guard = e
    nmax = _ah_inner_terms(v, p, e, sigma + guard)
    work = sigma + guard + e * nmax
    xw = ApproxElement(K, x.value, work)
    S = ApproxElement(K, K.zero, sigma + guard)
    pw = xw
    for n in range(nmax + 1):
        term = ApproxElement(K, pw.value, pw.prec, n)
        S = S + term.with_precision(sigma + guard)
        if n < nmax:
            pw = pw ** p
    # seed: power series truncated once the tail is inside exp's domain
    M = 1
    while not M * v > Fraction(1, p - 1):
        M += 1
    coeffs = artin_hasse_coefficients(p, M)
    prec = sigma + guard
    y = ApproxElement(K, K.zero, prec)
    xp = ApproxElement(K, K.one, prec)
    for c in coeffs:
        y = y + xp * c
        xp = xp * x.with_precision(prec)
    y = y.with_precision(prec)
    return _newton_log_inverse(S, y, sigma, guard)
