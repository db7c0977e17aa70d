"""Coefficient recurrences of linear ODEs and binary-splitting partial sums.

A scalar ODE sum_i a_i(t) y^(i) = 0 induces b_0(n) y_n + ... + b_s(n) y_{n-s} = 0.
A first-order system Q(t) Y' = P(t) Y induces the same shape of recurrence
with k x k matrix coefficients; both feed the same product tree, with the
scalar case being block size k = 1.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import gmpy2
from gmpy2 import mpz

from .errors import BadDenominator, PadixError, SingularPoint
from .field import (ApproxElement, ExactElement, FieldSpec, FractionElement,
                    _h, make_field)

BASE_CASE = 32
_MPZ = type(mpz(0))


# -- scalars ------------------------------------------------------------------
#
# Over Q_p the engine works on bare mpz values; otherwise on ExactElement.
# Both support +, -, * with each other and with ints.


def _to_scalar(K, x):
    if isinstance(x, ExactElement):
        return x.c[0] if K.n == 1 else x
    if isinstance(x, (int, _MPZ)):
        return mpz(x) if K.n == 1 else K.from_int(x)
    raise TypeError(f"not an exact scalar: {x!r}")


def _from_scalar(K, x):
    if isinstance(x, ExactElement):
        return x
    return K.from_int(x)


def _shape(x):
    return x.c if isinstance(x, ExactElement) else (x,)


def _sh(x):
    """Raw height max log(1+|a|) of a scalar (without the field constant)."""
    return max(_h(a) for a in _shape(x))


def _is_zero(x):
    return not x


# -- polynomials and jets -----------------------------------------------------


def poly_eval(coeffs, n):
    """Evaluate sum c_i n^i by Estrin's divide-and-conquer scheme."""
    if not coeffs:
        return 0
    if len(coeffs) == 1:
        return coeffs[0]
    level = list(coeffs)
    x = n
    while len(level) > 1:
        nxt = []
        for i in range(0, len(level) - 1, 2):
            hi = level[i + 1]
            nxt.append(level[i] + hi * x if hi else level[i])
        if len(level) % 2:
            nxt.append(level[-1])
        level = nxt
        x = x * x
    return level[0]


def jet_mul(a, b, order):
    out = [0] * order
    for i, x in enumerate(a):
        if not x:
            continue
        for j in range(order - i):
            y = b[j]
            if y:
                out[i + j] = out[i + j] + x * y
    return out


def jet_scale(a, c):
    return [x * c if x else 0 for x in a]


def jet_add(a, b):
    return [x + y for x, y in zip(a, b)]


def jet_pow(a, k, order):
    out = [1] + [0] * (order - 1)
    for _ in range(k):
        out = jet_mul(out, a, order)
    return out


# -- specifications -----------------------------------------------------------


def _falling(n_shift, i):
    """Coefficients (ascending in n) of (n - n_shift)(n - n_shift - 1)...(i factors)."""
    poly = [1]
    for k in range(i):
        root = n_shift + k
        new = [0] * (len(poly) + 1)
        for d, c in enumerate(poly):
            new[d + 1] += c
            new[d] -= c * root
        poly = new
    return poly


@dataclass
class ODESpec:
    """a_r(t) y^(r) + ... + a_0(t) y = 0 with coefficients in O_K^ex[t].

    ``coeffs[i]`` is the ascending coefficient list of a_i.
    """

    K: FieldSpec
    coeffs: list
    ell: float = dc_field(default=None)

    def __post_init__(self):
        cs = []
        for a in self.coeffs:
            row = [c if isinstance(c, ExactElement) else self.K.from_int(c) for c in a]
            while row and not any(row[-1].c):
                row.pop()
            cs.append(row)
        while len(cs) > 1 and not cs[-1]:
            cs.pop()
        if not cs or not cs[-1]:
            raise ValueError("the leading coefficient a_r must be nonzero")
        self.coeffs = cs
        actual = max((_h_elem(c) for a in cs for c in a), default=self.K.C)
        if self.ell is None or self.ell < actual:
            self.ell = actual

    @property
    def r(self):
        return len(self.coeffs) - 1

    @property
    def d(self):
        return max(len(a) for a in self.coeffs) - 1

    def coeff(self, i, j):
        a = self.coeffs[i]
        return a[j] if 0 <= j < len(a) else self.K.zero

    @classmethod
    def from_rational(cls, K, coeffs):
        """Build from rational coefficients, clearing denominators."""
        den = 1
        for a in coeffs:
            for c in a:
                if isinstance(c, FractionElement):
                    den = math.lcm(den, int(c.den))
                elif not isinstance(c, ExactElement):
                    den = math.lcm(den, Fraction(c).denominator)
        out = []
        for a in coeffs:
            row = []
            for c in a:
                if isinstance(c, FractionElement):
                    row.append(c.num * (den // int(c.den)))
                elif isinstance(c, ExactElement):
                    row.append(c * den)
                else:
                    c = Fraction(c) * den
                    row.append(K.from_int(int(c)))
            out.append(row)
        return cls(K, out)

    def shifted(self, xi):
        """The ODE satisfied by t -> y(xi + t)."""
        from .analytic import taylor_shift
        return ODESpec(self.K, [taylor_shift(a, xi) for a in self.coeffs])


def _h_elem(x):
    return max(_h(a) for a in x.c) + x.K.C


@dataclass
class RecurrenceSpec:
    """b_0(n) y_n + sum_{j=1}^s b_j(n) y_{n-j} = 0.

    For k = 1, ``b[j]`` is an ascending list of ExactElement coefficients.
    For k > 1, ``b[j]`` is a k x k matrix of such lists, and b_0 is scalar
    (stored as a list, meaning b_0(n) times the identity).
    """

    K: FieldSpec
    b: list
    r: int
    k: int = 1
    start: int = None

    @property
    def s(self):
        return len(self.b) - 1

    def b0(self, n):
        return poly_eval([_to_scalar(self.K, c) for c in self.b[0]], n)

    def eval(self, j, n):
        """b_j(n) as a scalar (k = 1) or a k x k matrix of scalars."""
        K = self.K
        if self.k == 1 or j == 0:
            return poly_eval([_to_scalar(K, c) for c in self.b[j]], n)
        return [[poly_eval([_to_scalar(K, c) for c in ent], n) for ent in row]
                for row in self.b[j]]


def derive_recurrence(ode):
    """b_j(n) = sum_i a_{i, i-r+j} (n-j)(n-j-1)...(n-j-i+1)."""
    K = ode.K
    r, d = ode.r, ode.d
    s = r + d
    b = []
    for j in range(s + 1):
        poly = [K.zero] * (r + 1)
        for i in range(r + 1):
            c = ode.coeff(i, i - r + j)
            if not any(c.c):
                continue
            for deg, f in enumerate(_falling(j, i)):
                if f:
                    poly[deg] = poly[deg] + c * f
        while poly and not any(poly[-1].c):
            poly.pop()
        b.append(poly)
    return RecurrenceSpec(K, b, r)


@dataclass
class SystemODESpec:
    """Q(t) Y'(t) = P(t) Y(t) with Q scalar and P a k x k matrix polynomial."""

    K: FieldSpec
    Q: list
    P: list

    def __post_init__(self):
        K = self.K
        conv = lambda c: c if isinstance(c, ExactElement) else K.from_int(c)
        self.Q = [conv(c) for c in self.Q]
        self.P = [[[conv(c) for c in ent] for ent in row] for row in self.P]
        while self.Q and not any(self.Q[-1].c):
            self.Q.pop()
        if not self.Q:
            raise ValueError("Q must be nonzero")

    @property
    def k(self):
        return len(self.P)

    @property
    def ell(self):
        hs = [_h_elem(c) for c in self.Q]
        hs += [_h_elem(c) for row in self.P for ent in row for c in ent]
        return max(hs)

    def shifted(self, xi):
        from .analytic import taylor_shift
        return SystemODESpec(self.K, taylor_shift(self.Q, xi),
                             [[taylor_shift(ent, xi) for ent in row] for row in self.P])


def derive_system_recurrence(sysode):
    """Q_0 n y_n + sum_j (Q_j (n-j) - P_{j-1}) y_{n-j} = 0."""
    K = sysode.K
    k = sysode.k
    dQ = len(sysode.Q) - 1
    dP = max((len(ent) for row in sysode.P for ent in row), default=0) - 1
    s = max(dQ, dP + 1, 1)
    Q = lambda j: sysode.Q[j] if j < len(sysode.Q) else K.zero

    def P(j, a, b):
        ent = sysode.P[a][b]
        return ent[j] if 0 <= j < len(ent) else K.zero

    b = [[K.zero, Q(0)]]
    for j in range(1, s + 1):
        mat = []
        for a in range(k):
            row = []
            for c in range(k):
                # Q_j (n - j) on the diagonal, minus P_{j-1}
                const = -P(j - 1, a, c)
                lin = K.zero
                if a == c:
                    const = const - Q(j) * j
                    lin = Q(j)
                row.append([const, lin])
            mat.append(row)
        b.append(mat)
    return RecurrenceSpec(K, b, 1, k=k, start=1)


# -- the tuple monoid ---------------------------------------------------------


@dataclass
class TransitionTuple:
    """T = (C, d, u, v, R) standing for the block matrix [[C u, 0], [R, d v]].

    C is ks x ks, R is k x ks with jet entries, u is a jet.
    """

    C: list
    d: object
    u: list
    v: object
    R: list

    def components(self):
        return self.C, self.d, self.u, self.v, self.R

    def __eq__(self, other):
        return (isinstance(other, TransitionTuple) and self.C == other.C
                and self.d == other.d and self.u == other.u and self.v == other.v
                and self.R == other.R)


def identity_tuple(ks, k, order):
    C = [[1 if i == j else 0 for j in range(ks)] for i in range(ks)]
    R = [[[0] * order for _ in range(ks)] for _ in range(k)]
    return TransitionTuple(C, 1, [1] + [0] * (order - 1), 1, R)


def tuple_product(T, T2, order=None):
    """T T2 = (C C2, d d2, u u2, v v2, R C2 u2 + d v R2)."""
    if order is None:
        order = len(T.u)
    C1, C2 = T.C, T2.C
    n = len(C1)
    m = len(C2[0])
    inner = len(C2)
    C = []
    for i in range(n):
        row1 = C1[i]
        out = [0] * m
        for l in range(inner):
            a = row1[l]
            if a:
                r2 = C2[l]
                for j in range(m):
                    b = r2[j]
                    if b:
                        out[j] = out[j] + a * b
        C.append(out)
    dv = T.d * T.v
    R = []
    for rowR, rowR2 in zip(T.R, T2.R):
        # (R C2) as jets, then times u2
        acc = [[0] * order for _ in range(m)]
        for l in range(inner):
            jet = rowR[l]
            if not any(jet):
                continue
            r2 = C2[l]
            for j in range(m):
                b = r2[j]
                if b:
                    tgt = acc[j]
                    for q in range(order):
                        if jet[q]:
                            tgt[q] = tgt[q] + jet[q] * b
        out = []
        for j in range(m):
            left = jet_mul(acc[j], T2.u, order) if any(acc[j]) else [0] * order
            right = rowR2[j]
            out.append([x + (dv * y if y else 0) for x, y in zip(left, right)])
        R.append(out)
    return TransitionTuple(C, T.d * T2.d, jet_mul(T.u, T2.u, order), T.v * T2.v, R)


def _w_jet(K, u, v, order):
    w = [_to_scalar(K, u)]
    if order > 1:
        w.append(_to_scalar(K, v))
        w += [0] * (order - 2)
    return w


def _block_coeffs(rec, n):
    """(b0, [B_1..B_s]) at n with B_j a k x k matrix of scalars (or scalar when k = 1)."""
    b0 = rec.b0(n)
    Bs = [rec.eval(j, n) for j in range(1, rec.s + 1)]
    return b0, Bs


def build_transition(n, rec, u, v, order=None):
    """The tuple B(n)."""
    K = rec.K
    if order is None:
        order = rec.r
    k, s = rec.k, rec.s
    ks = k * s
    b0, Bs = _block_coeffs(rec, n)
    C = [[0] * ks for _ in range(ks)]
    for i in range(ks - k):
        C[i][i + k] = b0
    for a in range(k):
        row = C[ks - k + a]
        for j in range(1, s + 1):
            B = Bs[j - 1]
            col0 = (s - j) * k
            if k == 1:
                row[col0] = -B if B else 0
            else:
                for c in range(k):
                    x = B[a][c]
                    row[col0 + c] = -x if x else 0
    vv = _to_scalar(K, v)
    R = [[[0] * order for _ in range(ks)] for _ in range(k)]
    for a in range(k):
        R[a][ks - k + a] = [vv * b0] + [0] * (order - 1)
    return TransitionTuple(C, b0, _w_jet(K, u, v, order), vv, R)


def _apply_B(n, rec, w, v, T, order):
    """B(n) T computed directly from the sparse shape of B(n)."""
    k, s = rec.k, rec.s
    ks = k * s
    b0, Bs = _block_coeffs(rec, n)
    CT = T.C
    C = [[b0 * x if x else 0 for x in CT[i + k]] for i in range(ks - k)]
    last = []
    for a in range(k):
        out = [0] * len(CT[0])
        for j in range(1, s + 1):
            B = Bs[j - 1]
            base = (s - j) * k
            if k == 1:
                if not B:
                    continue
                src = CT[base]
                for c, x in enumerate(src):
                    if x:
                        out[c] = out[c] - B * x
            else:
                for l in range(k):
                    x0 = B[a][l]
                    if not x0:
                        continue
                    for c, x in enumerate(CT[base + l]):
                        if x:
                            out[c] = out[c] - x0 * x
        last.append(out)
    C.extend(last)
    vb0 = v * b0
    R = []
    for a in range(k):
        row = CT[ks - k + a]
        newrow = []
        for c in range(len(row)):
            jet = jet_scale(T.u, row[c]) if row[c] else [0] * order
            newrow.append([vb0 * (x + y) if (x or y) else 0 for x, y in zip(jet, T.R[a][c])])
        R.append(newrow)
    return TransitionTuple(C, b0 * T.d, jet_mul(w, T.u, order), v * T.v, R)


_THREADS = None


def set_threads(n):
    """Number of worker threads used at the top of product trees."""
    global _THREADS
    _THREADS = max(1, int(n))


def get_threads():
    if _THREADS is not None:
        return _THREADS
    try:
        return max(1, int(os.environ.get("PADIX_THREADS", "1")))
    except ValueError:
        return 1


def product_tree(rec, u, v, n0, n1, order=None, on_node=None, base_case=BASE_CASE):
    """P(n0, n1) = B(n1 - 1) ... B(n0) by a balanced product tree."""
    K = rec.K
    if order is None:
        order = rec.r
    ks = rec.k * rec.s
    w = _w_jet(K, u, v, order)
    vv = _to_scalar(K, v)

    def leaves(a, b):
        T = identity_tuple(ks, rec.k, order)
        for n in range(a, b):
            T = _apply_B(n, rec, w, vv, T, order)
        if on_node is not None:
            on_node(a, b, T)
        return T

    def rec_tree(a, b, depth):
        if b - a <= base_case:
            return leaves(a, b)
        m = (a + b) // 2
        if depth < 2 and get_threads() > 1:
            with ThreadPoolExecutor(max_workers=2) as ex:
                f_lo = ex.submit(rec_tree, a, m, depth + 1)
                f_hi = ex.submit(rec_tree, m, b, depth + 1)
                lo, hi = f_lo.result(), f_hi.result()
        else:
            lo = rec_tree(a, m, depth + 1)
            hi = rec_tree(m, b, depth + 1)
        T = tuple_product(hi, lo, order)
        if on_node is not None:
            on_node(a, b, T)
        return T

    if n1 <= n0:
        return identity_tuple(ks, rec.k, order)
    return rec_tree(n0, n1, 0)


# -- extraction ---------------------------------------------------------------


@dataclass
class FundamentalMatrix:
    """Entry (i, j) is the i-th Taylor coefficient of the j-th basis partial sum."""

    entries: list
    point: object
    N: int
    sigma: int

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    @property
    def shape(self):
        return len(self.entries), len(self.entries[0])

    def column(self, j):
        return [row[j] for row in self.entries]


def exact_divide(K, num, den, sigma):
    """num/den modulo pi^sigma for exact num, den (den nonzero)."""
    num = _from_scalar(K, num)
    den = _from_scalar(K, den)
    if not any(num.c):
        return ApproxElement(K, K.zero, sigma)
    m, t, w = K.split_pi(den)
    # den = Y^-m p^t w
    width = sigma + K.e * t
    numr = K.reduce(num, width + K.e)
    prod = numr
    if m:
        prod = K.reduce(prod * K.monomial(0, m), width)
    winv = K.inv_unit(w, max(width, 1))
    prod = prod * winv
    if t >= 0:
        return ApproxElement(K, prod, sigma, t)
    return ApproxElement(K, prod * mpz(K.p) ** (-t), sigma)


def _check_ordinary(ode):
    if not any(ode.coeff(ode.r, 0).c):
        raise SingularPoint("a_r(0) = 0: the origin is not an ordinary point")


def _check_v(K, v):
    v = int(v)
    if v == 0 or v % K.p == 0:
        raise BadDenominator("the denominator v must be a p-adic unit")
    return v


def _normalize_point(K, u, v):
    if isinstance(u, FractionElement):
        return u.num, int(u.den) * int(v)
    if isinstance(u, (int, _MPZ)):
        return K.from_int(u), int(v)
    return u, int(v)


def partial_sum_matrix(ode, u, v, N, sigma, on_node=None, rec=None):
    """r x r matrix of (1/i!) d^i/dt^i f_j,<N (u/v) modulo pi^sigma."""
    K = ode.K
    _check_ordinary(ode)
    u, v = _normalize_point(K, u, v)
    v = _check_v(K, v)
    r = ode.r
    if N < r:
        raise ValueError("need N >= r")
    if rec is None:
        rec = derive_recurrence(ode)
    d = rec.s - r
    Pi = product_tree(rec, u, v, r, N, order=r, on_node=on_node)
    w = _w_jet(K, u, v, r)
    vv = _to_scalar(K, v)
    scale = vv ** (r - 1)
    den = Pi.d * Pi.v * scale
    wpow = [jet_pow(w, i, r) for i in range(r)]
    entries = [[None] * r for _ in range(r)]
    s = rec.s
    for j in range(r):
        col = d + j
        num = jet_mul(Pi.R[0][col], wpow[r - 1], r)
        top = Pi.C[s - 1][col]
        if top:
            num = jet_add(num, jet_mul(jet_scale(Pi.u, top), wpow[r - 1], r))
        if j < r - 1:
            extra = jet_scale(wpow[j], Pi.d * Pi.v * vv ** (r - 1 - j))
            num = jet_add(num, extra)
        for i in range(r):
            entries[i][j] = exact_divide(K, num[i], den, sigma)
    return FundamentalMatrix(entries, (u, v), N, sigma)


def system_partial_sum(sysode, u, v, N, sigma, on_node=None, rec=None):
    """k x k matrix of N-term partial sums of the solutions with Y(0) = e_j."""
    K = sysode.K
    if not any(sysode.Q[0].c):
        raise SingularPoint("Q(0) = 0: the origin is not an ordinary point")
    u, v = _normalize_point(K, u, v)
    v = _check_v(K, v)
    if rec is None:
        rec = derive_system_recurrence(sysode)
    k, s = rec.k, rec.s
    if N < 1:
        raise ValueError("need N >= 1")
    Pi = product_tree(rec, u, v, 1, N, order=1, on_node=on_node)
    den = Pi.d * Pi.v
    entries = [[None] * k for _ in range(k)]
    last = (s - 1) * k
    for j in range(k):
        col = last + j
        for a in range(k):
            num = Pi.R[a][col][0]
            top = Pi.C[last + a][col]
            if top:
                num = num + top * Pi.u[0]
            entries[a][j] = exact_divide(K, num, den, sigma)
    return FundamentalMatrix(entries, (u, v), N, sigma)


def unroll(rec, init, N):
    """First N terms of a k = 1 recurrence from r initial terms, as Fractions of
    exact elements; used as a slow reference."""
    K = rec.K
    ys = [FractionElement.lift(c, K) for c in init]
    for n in range(len(ys), N):
        acc = FractionElement(K.zero, 1)
        for j in range(1, rec.s + 1):
            if n - j < 0:
                continue
            bj = _from_scalar(K, rec.eval(j, n))
            acc = acc + ys[n - j] * bj
        b0 = _from_scalar(K, rec.b0(n))
        ys.append(_fraction_div(-acc, b0))
    return ys


def _fraction_div(x, y):
    if y.is_integer():
        return x / Fraction(int(y.c[0]))
    raise PadixError("slow unrolling needs an integer leading coefficient")
