"""Exact and truncated arithmetic in K = Q_p[X,Y]/(U, V).

Elements of the exact ring Z[X,Y]/(U,V) are stored as flat tuples of
integers indexed by ``j*f + i`` for the monomial X^i Y^j, so that the
natural tuple order is the (j, i) order used for printing.
"""

from __future__ import annotations

import ast
import json
import math
from fractions import Fraction
from functools import lru_cache

import gmpy2
import sympy
from gmpy2 import mpz

from .errors import (DenominatorNotUnit, InsufficientPrecision, NotEisenstein,
                     NotIrreducible, NotMonic, PadixError)

INF = math.inf


def _vp(a, p):
    """p-adic valuation of a nonzero integer."""
    return gmpy2.remove(mpz(a), p)[1]


def _poly_rem(a, U):
    # remainder of an integer polynomial (ascending list) by a monic U
    a = list(a)
    f = len(U) - 1
    for k in range(len(a) - 1, f - 1, -1):
        c = a[k]
        if c:
            for i in range(f + 1):
                a[k - f + i] -= c * U[i]
    return a[:f] + [0] * (f - len(a))


class FieldSpec:
    """The field K, given by a prime p and the defining polynomials U, V.

    Build instances with :func:`make_field`; the constructor trusts its input.
    """

    def __init__(self, p, U, V, e, f, C, table):
        self.p = p
        self.U = tuple(U)
        self.V = tuple(tuple(v) for v in V)
        self.e = e
        self.f = f
        self.n = e * f
        self.C = C
        self._table = table
        self.zero = ExactElement(self, (mpz(0),) * self.n)
        self.one = self.from_int(1)

    def __repr__(self):
        return f"FieldSpec(p={self.p}, U={list(self.U)}, V={[list(v) for v in self.V]})"

    def __eq__(self, other):
        return (isinstance(other, FieldSpec) and self.p == other.p
                and self.U == other.U and self.V == other.V)

    def __hash__(self):
        return hash((self.p, self.U, self.V))

    @property
    def is_qp(self):
        return self.n == 1

    # -- constructors -------------------------------------------------------

    def from_int(self, a):
        c = [mpz(0)] * self.n
        c[0] = mpz(a)
        return ExactElement(self, tuple(c))

    def from_coeffs(self, coeffs):
        """Build an element from a dict {(i, j): a_ij} or a flat sequence."""
        c = [mpz(0)] * self.n
        if isinstance(coeffs, dict):
            for (i, j), a in coeffs.items():
                if not (0 <= i < self.f and 0 <= j < self.e):
                    raise ValueError("monomial outside the basis")
                c[j * self.f + i] = mpz(a)
        else:
            for k, a in enumerate(coeffs):
                c[k] = mpz(a)
        return ExactElement(self, tuple(c))

    def X(self):
        return self.monomial(1, 0)

    def Y(self):
        return self.monomial(0, 1)

    def monomial(self, i, j):
        """X^i Y^j reduced modulo (U, V)."""
        x = self.one
        gx = self._gen(1, 0)
        gy = self._gen(0, 1)
        for _ in range(i):
            x = x * gx
        for _ in range(j):
            x = x * gy
        return x

    def _gen(self, i, j):
        if i < self.f and j < self.e:
            return self.from_coeffs({(i, j): 1})
        if j == 0:
            # X with f = 1
            return self.from_coeffs(_poly_rem([0, 1], self.U))
        # Y with e = 1
        return self.from_coeffs([-a for a in _poly_rem(self.V[0], self.U)])

    def coerce(self, x):
        if isinstance(x, ExactElement):
            return x
        if isinstance(x, (int, type(mpz(0)))):
            return self.from_int(x)
        raise TypeError(f"cannot coerce {type(x).__name__} into {self}")

    # -- precision ----------------------------------------------------------

    @lru_cache(maxsize=512)
    def moduli(self, sigma):
        """Per-monomial moduli p^ceil((sigma - j)/e) for precision O(pi^sigma)."""
        e, f, p = self.e, self.f, self.p
        out = []
        for j in range(e):
            k = -((j - sigma) // e)
            out.extend([mpz(p) ** max(k, 0)] * f)
        return tuple(out)

    def reduce(self, x, sigma):
        """Canonical representative of an exact element modulo pi^sigma."""
        mods = self.moduli(sigma)
        return ExactElement(self, tuple(a % m for a, m in zip(x.c, mods)))

    def val_pi(self, x):
        """Valuation in pi-adic units (e times the normalized valuation)."""
        best = INF
        e, f, p = self.e, self.f, self.p
        for k, a in enumerate(x.c):
            if a:
                v = e * _vp(a, p) + k // f
                if v < best:
                    best = v
        return best

    def residue_is_zero(self, x):
        return self.val_pi(x) > 0

    def inv_unit(self, x, sigma):
        """Inverse modulo pi^sigma of an exact unit, by Newton iteration."""
        if sigma <= 0:
            return self.zero
        if self.val_pi(x) != 0:
            raise PadixError("inv_unit needs a unit")
        p = self.p
        if self.n == 1:
            m = mpz(p) ** sigma
            return self.from_int(gmpy2.invert(x.c[0] % m, m))
        # residue-field inverse via x^(q-2), then lift
        q = p ** self.f
        xr = self.reduce(x, 1)
        y = self.one
        base, k = xr, q - 2
        while k:
            if k & 1:
                y = self.reduce(y * base, 1)
            base = self.reduce(base * base, 1)
            k >>= 1
        prec = 1
        while prec < sigma:
            prec = min(2 * prec, sigma)
            xs = self.reduce(x, prec)
            y = self.reduce(y * (2 - self.reduce(xs * y, prec)), prec)
        return y

    def split_pi(self, x):
        """Write x = Y^(-m) * p^t * w with w a unit; returns (m, t, w).

        m is in [0, e) and val_pi(x) = e*t - m.
        """
        v = self.val_pi(x)
        if v == INF:
            raise ZeroDivisionError("zero has no inverse")
        m = (-v) % self.e
        y = x
        if m:
            y = y * self.monomial(0, m)
        t = (v + m) // self.e
        if t:
            pt = mpz(self.p) ** t
            y = ExactElement(self, tuple(a // pt for a in y.c))
        return m, t, y

    # -- parsing and printing ----------------------------------------------

    def parse(self, text):
        """Parse an element literal into an ExactElement or FractionElement."""
        return parse_literal(self, text)

    def to_json(self):
        return json.dumps({"p": self.p, "U": list(self.U),
                           "V": [list(v) for v in self.V]})


def make_field(p, U=None, V=None):
    """Validate (p, U, V) and return the FieldSpec with its constant C.

    U is an ascending coefficient list; V[j][i] is the coefficient of X^i Y^j.
    With U and V omitted the field is Q_p itself.
    """
    if U is None:
        U = [0, 1]
    if V is None:
        V = [[-p], [1]]
    if not sympy.isprime(p):
        raise ValueError(f"{p} is not prime")
    U = [int(a) for a in U]
    V = [[int(a) for a in row] for row in V]
    while len(U) > 1 and U[-1] == 0:
        U.pop()
    f = len(U) - 1
    if f < 1:
        raise ValueError("U must have positive degree")
    if U[-1] != 1:
        raise NotMonic("U is not monic")
    while len(V) > 1 and not any(V[-1]):
        V.pop()
    e = len(V) - 1
    if e < 1:
        raise ValueError("V must have positive degree in Y")
    Vr = [_poly_rem(row, U) for row in V]
    if Vr[e] != [1] + [0] * (f - 1):
        raise NotMonic("V is not monic in Y")
    if f > 1:
        xs = sympy.Symbol("x")
        poly = sympy.Poly(list(reversed(U)), xs, modulus=p)
        if not poly.is_irreducible:
            raise NotIrreducible(f"U is reducible modulo {p}")
    for j in range(e):
        if any(a % p for a in Vr[j]):
            raise NotEisenstein(f"coefficient of Y^{j} is not divisible by p")
    if not any((a // p) % p for a in Vr[0]):
        raise NotEisenstein("constant coefficient of V has valuation > 1")
    table = _reduction_table(U, Vr, e, f)
    hmax = 0.0
    for row in table:
        for ent in row:
            for _, a in ent:
                hmax = max(hmax, _h(a))
    C = math.log(e * f) + hmax
    return FieldSpec(p, U, V, e, f, C, table)


def _reduction_table(U, Vr, e, f):
    """Sparse reductions of X^i Y^j for i <= 2f-2, j <= 2e-2."""
    n = e * f

    def mul_x(a):
        # a is a list of e rows, each a list of f ints
        out = []
        for row in a:
            r = [0] + row
            out.append(_poly_rem(r, U))
        return out

    def mul_y(a):
        top = a[e - 1]
        out = [[0] * f] + [list(r) for r in a[:e - 1]]
        if any(top):
            for j in range(e):
                prod = [0] * (2 * f)
                for i1, c1 in enumerate(top):
                    if c1:
                        for i2, c2 in enumerate(Vr[j]):
                            prod[i1 + i2] += c1 * c2
                prod = _poly_rem(prod, U)
                out[j] = [x - y for x, y in zip(out[j], prod)]
        return out

    base = [[0] * f for _ in range(e)]
    base[0][0] = 1
    table = []
    xi = base
    for i in range(2 * f - 1):
        row = []
        cur = xi
        for j in range(2 * e - 1):
            flat = [(jj * f + ii, mpz(cur[jj][ii])) for jj in range(e) for ii in range(f)
                    if cur[jj][ii]]
            row.append(flat)
            cur = mul_y(cur)
        table.append(row)
        xi = mul_x(xi)
    assert len(table) == 2 * f - 1 and n == e * f
    return table


def _h(a):
    a = abs(int(a))
    return math.log(a + 1) if a < (1 << 1000) else a.bit_length() * math.log(2)


class ExactElement:
    """An element of O_K^ex = Z[X,Y]/(U,V)."""

    __slots__ = ("K", "c")

    def __init__(self, K, c):
        self.K = K
        self.c = c

    @property
    def coeffs(self):
        """Coefficients as an f x e matrix: coeffs[i][j] is a_ij."""
        f, e = self.K.f, self.K.e
        return [[int(self.c[j * f + i]) for j in range(e)] for i in range(f)]

    def __repr__(self):
        return f"ExactElement({format_exact(self)})"

    def __str__(self):
        return format_exact(self)

    def __bool__(self):
        return any(self.c)

    def __eq__(self, other):
        if isinstance(other, ExactElement):
            return self.K is other.K and self.c == other.c or (
                self.K == other.K and self.c == other.c)
        if isinstance(other, int) or type(other) is type(mpz(0)):
            return self.c[0] == other and not any(self.c[1:])
        return NotImplemented

    def __hash__(self):
        return hash(self.c)

    def _co(self, other):
        if isinstance(other, ExactElement):
            return other
        if isinstance(other, int) or type(other) is type(mpz(0)):
            return self.K.from_int(other)
        return None

    def __add__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return ExactElement(self.K, tuple(a + b for a, b in zip(self.c, o.c)))

    __radd__ = __add__

    def __neg__(self):
        return ExactElement(self.K, tuple(-a for a in self.c))

    def __sub__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return ExactElement(self.K, tuple(a - b for a, b in zip(self.c, o.c)))

    def __rsub__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        K = self.K
        if isinstance(other, int) or type(other) is type(mpz(0)):
            return ExactElement(K, tuple(a * other for a in self.c))
        if not isinstance(other, ExactElement):
            return NotImplemented
        if K.n == 1:
            return ExactElement(K, (self.c[0] * other.c[0],))
        f, e = K.f, K.e
        conv = {}
        a_nz = [(k % f, k // f, a) for k, a in enumerate(self.c) if a]
        b_nz = [(k % f, k // f, b) for k, b in enumerate(other.c) if b]
        for i1, j1, a in a_nz:
            for i2, j2, b in b_nz:
                key = (i1 + i2, j1 + j2)
                conv[key] = conv.get(key, 0) + a * b
        out = [mpz(0)] * K.n
        table = K._table
        for (i, j), v in conv.items():
            if i < f and j < e:
                out[j * f + i] += v
            else:
                for k, t in table[i][j]:
                    out[k] += v * t
        return ExactElement(K, tuple(out))

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            raise ValueError("negative power of an exact element")
        result = self.K.one
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def exact_div_int(self, d):
        """Divide by an integer known to divide every coefficient."""
        d = mpz(d)
        out = []
        for a in self.c:
            q, r = gmpy2.f_divmod(a, d)
            if r:
                raise ArithmeticError("inexact division")
            out.append(q)
        return ExactElement(self.K, tuple(out))

    def content(self):
        g = mpz(0)
        for a in self.c:
            g = gmpy2.gcd(g, a)
        return g

    def is_integer(self):
        return not any(self.c[1:])


class FractionElement:
    """An element num/den of K^ex with den a positive integer."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=1):
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        den = mpz(den)
        if den < 0:
            num, den = -num, -den
        g = gmpy2.gcd(num.content(), den)
        if g > 1:
            num = num.exact_div_int(g)
            den = den // g
        self.num = num
        self.den = den

    @property
    def K(self):
        return self.num.K

    def __repr__(self):
        return f"FractionElement({format_exact(self)})"

    def __str__(self):
        return format_exact(self)

    def __eq__(self, other):
        if isinstance(other, FractionElement):
            return self.num == other.num and self.den == other.den
        if isinstance(other, ExactElement):
            return self.den == 1 and self.num == other
        if isinstance(other, int):
            return self.den == 1 and self.num == other
        return NotImplemented

    def __hash__(self):
        return hash((self.num.c, int(self.den)))

    @staticmethod
    def lift(x, K=None):
        if isinstance(x, FractionElement):
            return x
        if isinstance(x, ExactElement):
            return FractionElement(x, 1)
        if isinstance(x, Fraction):
            return FractionElement(K.from_int(x.numerator), x.denominator)
        return FractionElement(K.from_int(x), 1)

    def __add__(self, other):
        o = FractionElement.lift(other, self.K)
        return FractionElement(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return FractionElement(-self.num, self.den)

    def __sub__(self, other):
        return self + (-FractionElement.lift(other, self.K))

    def __rsub__(self, other):
        return FractionElement.lift(other, self.K) - self

    def __mul__(self, other):
        o = FractionElement.lift(other, self.K)
        return FractionElement(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            if other == 0:
                raise ZeroDivisionError
            return FractionElement(self.num * other.denominator, self.den * other.numerator)
        raise TypeError("only division by rationals is exact in K^ex here")


# -- valuation, height, reduction, slicing -------------------------------------


def valuation(x):
    """Normalized valuation val(x) (val(p) = 1) as a Fraction, INF for zero."""
    if isinstance(x, FractionElement):
        v = valuation(x.num)
        if v == INF:
            return INF
        return v - _vp(x.den, x.K.p)
    if isinstance(x, ApproxElement):
        v = x.val_pi()
        return v if v == INF else Fraction(v, x.K.e)
    K = x.K
    v = K.val_pi(x)
    return v if v == INF else Fraction(v, K.e)


def height(x):
    """h_K(x) = max log(1 + |a_ij|) + C."""
    return max(_h(a) for a in x.c) + x.K.C


def raw_height(x):
    return max(_h(a) for a in x.c)


def add(x, y):
    return x + y


def sub(x, y):
    return x - y


def neg(x):
    return -x


def mul(x, y):
    return x * y


def reduce_mod(x, sigma):
    """Canonical ApproxElement equal to x modulo pi^sigma."""
    if isinstance(x, ApproxElement):
        return x.with_precision(min(sigma, x.prec))
    if isinstance(x, FractionElement):
        K = x.K
        if x.den % K.p == 0:
            raise DenominatorNotUnit("denominator divisible by p")
        m = mpz(K.p) ** max(-(-sigma // K.e), 0)
        inv = gmpy2.invert(x.den % m, m) if m > 1 else mpz(0)
        return ApproxElement(K, x.num * inv, sigma)
    if isinstance(x, int):
        raise TypeError("reduce_mod needs a field element")
    return ApproxElement(x.K, x, sigma)


def slice_digits(x, s0, s1):
    """Keep the p-adic digits of index in [s0, s1) of every coefficient."""
    if not 0 <= s0 <= s1:
        raise ValueError("need 0 <= s0 <= s1")
    p = mpz(x.K.p)
    m0, m1 = p ** s0, p ** s1
    return ExactElement(x.K, tuple((a % m1) - (a % m0) for a in x.c))


# public name; ``slice`` shadows a builtin so the module also exposes
# ``slice_digits`` for internal use
slice = slice_digits


class ApproxElement:
    """An element value / p^shift of K, known modulo pi^prec.

    ``value`` is canonical modulo pi^(prec + e*shift).  With shift = 0 every
    coefficient a_ij lies in [0, p^ceil((prec - j)/e)).
    """

    __slots__ = ("K", "value", "prec", "shift")

    def __init__(self, K, value, prec, shift=0):
        if isinstance(value, int) or type(value) is type(mpz(0)):
            value = K.from_int(value)
        self.K = K
        self.prec = prec
        e = K.e
        value = K.reduce(value, prec + e * shift)
        if shift > 0:
            p = mpz(K.p)
            if not any(value.c):
                shift = 0
            else:
                while shift > 0 and all(a % p == 0 for a in value.c):
                    value = ExactElement(K, tuple(a // p for a in value.c))
                    shift -= 1
        elif shift < 0:
            value = K.reduce(value * (mpz(K.p) ** (-shift)), prec)
            shift = 0
        self.value = value
        self.shift = shift

    # -- basic protocol -----------------------------------------------------

    def __repr__(self):
        return f"ApproxElement({format_approx(self)})"

    def __str__(self):
        return format_approx(self)

    def __eq__(self, other):
        if isinstance(other, ApproxElement):
            return (self.prec == other.prec and self.shift == other.shift
                    and self.value.c == other.value.c)
        return NotImplemented

    def __hash__(self):
        return hash((self.value.c, self.prec, self.shift))

    def is_zero(self):
        return not any(self.value.c)

    def val_pi(self):
        """pi-adic valuation, capped at the precision."""
        v = self.K.val_pi(self.value)
        if v == INF:
            return self.prec
        return min(v - self.K.e * self.shift, self.prec)

    def valuation(self):
        return Fraction(self.val_pi(), self.K.e)

    def with_precision(self, sigma):
        return ApproxElement(self.K, self.value, min(sigma, self.prec) if sigma is not None
                             else self.prec, self.shift)

    def lift(self):
        """The integral exact representative (requires shift 0)."""
        if self.shift:
            raise PadixError("element is not integral")
        return self.value

    def exact(self):
        """The exact element of K^ex this approximation stores."""
        return FractionElement(self.value, mpz(self.K.p) ** self.shift)

    # -- arithmetic ---------------------------------------------------------

    def _co(self, other):
        # exact constants get enough precision never to be the binding term
        if isinstance(other, ApproxElement):
            return other
        K = self.K
        if isinstance(other, Fraction):
            other = FractionElement.lift(other, K)
        elif isinstance(other, int) or type(other) is type(mpz(0)):
            other = K.from_int(other)
        if isinstance(other, ExactElement):
            other = FractionElement(other, 1)
        if not isinstance(other, FractionElement):
            return None
        v = valuation(other)
        if v == INF:
            return ApproxElement(K, K.zero, self.prec)
        vo = math.floor(v * K.e)
        prec = max(self.prec, 0) + 2 * abs(vo) + abs(self.val_pi()) + K.e
        return approx_from_fraction(other, prec)

    def __add__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        K = self.K
        k = max(self.shift, o.shift)
        p = mpz(K.p)
        prec = min(self.prec, o.prec)
        v = self.value * (p ** (k - self.shift)) + o.value * (p ** (k - o.shift))
        return ApproxElement(K, v, prec, k)

    __radd__ = __add__

    def __neg__(self):
        return ApproxElement(self.K, -self.value, self.prec, self.shift)

    def __sub__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        K = self.K
        prec = min(self.prec + o.val_pi(), o.prec + self.val_pi())
        shift = self.shift + o.shift
        return ApproxElement(K, self.value * o.value, prec, shift)

    __rmul__ = __mul__

    def inverse(self):
        """Multiplicative inverse; loses 2*val_pi digits of absolute precision."""
        K = self.K
        v = self.val_pi()
        if v >= self.prec:
            raise InsufficientPrecision("element indistinguishable from zero")
        m, t, w = K.split_pi(self.value)
        # x = Y^-m p^(t - shift) w  so  1/x = Y^m p^(shift - t) w^-1
        t -= self.shift
        prec = self.prec - 2 * v
        winv = K.inv_unit(w, prec + K.e * t + m + 1)
        val = winv
        if m:
            val = val * K.monomial(0, m)
        if t >= 0:
            return ApproxElement(K, val, prec, t)
        return ApproxElement(K, val * (mpz(K.p) ** (-t)), prec, 0)

    def __truediv__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        result = ApproxElement(self.K, 1, self.prec)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result


def approx_from_fraction(x, sigma):
    """ApproxElement for an exact fraction, allowing p in the denominator."""
    K = x.K
    den = mpz(x.den)
    t = _vp(den, K.p)
    u = den // mpz(K.p) ** t
    width = sigma + K.e * t
    m = mpz(K.p) ** max(-(-width // K.e), 0)
    inv = gmpy2.invert(u % m, m) if m > 1 else mpz(0)
    return ApproxElement(K, x.num * inv, sigma, t)


# -- literals -------------------------------------------------------------------


def parse_literal(K, text):
    """Parse the element literal grammar: integers, X, Y, + - * ^, parentheses,
    and division by a positive integer."""
    try:
        tree = ast.parse(text.strip().replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"bad element literal: {text!r}") from exc

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int) \
                and not isinstance(node.value, bool):
            return FractionElement(K.from_int(node.value), 1)
        if isinstance(node, ast.Name):
            if node.id == "X":
                return FractionElement(K.X(), 1)
            if node.id == "Y":
                return FractionElement(K.Y(), 1)
            raise ValueError(f"unknown symbol {node.id!r}")
        if isinstance(node, ast.UnaryOp):
            v = ev(node.operand)
            if isinstance(node.op, ast.USub):
                return -v
            if isinstance(node.op, ast.UAdd):
                return v
        if isinstance(node, ast.BinOp):
            a = ev(node.left)
            if isinstance(node.op, ast.Pow):
                b = ev(node.right)
                if b.den != 1 or not b.num.is_integer() or b.num.c[0] < 0:
                    raise ValueError("exponents must be nonnegative integers")
                k = int(b.num.c[0])
                return FractionElement(a.num ** k, a.den ** k)
            b = ev(node.right)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            if isinstance(node.op, ast.Mult):
                return a * b
            if isinstance(node.op, ast.Div):
                if b.den != 1 or not b.num.is_integer() or b.num.c[0] <= 0:
                    raise ValueError("can only divide by a positive integer")
                return FractionElement(a.num, a.den * b.num.c[0])
        raise ValueError(f"unsupported syntax in literal {text!r}")

    v = ev(tree)
    return v.num if v.den == 1 else v


def parse_approx(K, text):
    """Parse ``<literal> + O(pi^sigma)``; the precision suffix is required."""
    s = text.strip()
    marker = "+ O(pi^"
    idx = s.rfind(marker)
    if idx < 0 or not s.endswith(")"):
        raise ValueError("missing precision suffix")
    sigma = int(s[idx + len(marker):-1])
    body = s[:idx].strip()
    x = parse_literal(K, body) if body else K.zero
    if isinstance(x, ExactElement):
        return ApproxElement(K, x, sigma)
    return approx_from_fraction(x, sigma)


def _format_poly(K, c):
    terms = []
    f = K.f
    for k, a in enumerate(c):
        if not a:
            continue
        i, j = k % f, k // f
        mono = []
        if i:
            mono.append("X" if i == 1 else f"X^{i}")
        if j:
            mono.append("Y" if j == 1 else f"Y^{j}")
        a = int(a)
        if mono:
            body = "*".join(mono)
            if abs(a) != 1:
                body = f"{abs(a)}*{body}"
        else:
            body = str(abs(a))
        terms.append((a < 0, body))
    if not terms:
        return "0"
    out = ("-" if terms[0][0] else "") + terms[0][1]
    for negative, body in terms[1:]:
        out += (" - " if negative else " + ") + body
    return out


def format_exact(x):
    if isinstance(x, FractionElement):
        body = _format_poly(x.K, x.num.c)
        if x.den == 1:
            return body
        return f"({body})/{int(x.den)}"
    return _format_poly(x.K, x.c)


def format_approx(x):
    body = _format_poly(x.K, x.value.c)
    if x.shift:
        body = f"({body})/{x.K.p ** x.shift}"
    return f"{body} + O(pi^{x.prec})"


def field_from_json(data):
    if isinstance(data, str):
        data = json.loads(data)
    return make_field(int(data["p"]), data.get("U"), data.get("V"))
