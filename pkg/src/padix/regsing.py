"""Logarithmic series solutions at a regular singular point.

Exponents are grouped in classes gamma + nu (nu a nonnegative integer) of
roots of the indicial polynomial.  Within a class the recurrence is run on
vectors of log-coefficients: f_nu = (f_{nu,k})_k stands for
sum_k f_{nu,k} log(t)^k / k!, and Lambda acts on it as the left shift.

Only indicial polynomials that are a constant times a rational polynomial
are supported, and every exponent must lie in Z_p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import gmpy2
import sympy
from gmpy2 import mpz

from . import elementary
from .analytic import taylor_shift
from .errors import (FactorizationUnsupported, IrregularSingularity, NotSplit,
                     PrecisionLoss, PadixError)
from .field import (INF, ApproxElement, ExactElement, FractionElement,
                    approx_from_fraction, reduce_mod, valuation)
from .recurrence import (FundamentalMatrix, RecurrenceSpec, _MPZ, _check_v,
                         _from_scalar, _normalize_point, _to_scalar,
                         derive_recurrence, exact_divide, jet_mul, product_tree)


# -- indicial data -------------------------------------------------------------


@dataclass
class IndicialData:
    """Q_j(n) = b_{j0+j}(n + j0), so that Q_0 is the indicial polynomial."""

    j0: int
    Q: list
    r: int

    @property
    def s_prime(self):
        return len(self.Q) - 1


def indicial_data(rec, formal=False):
    K = rec.K
    j0 = None
    for j, b in enumerate(rec.b):
        if any(any(c.c) for c in b):
            j0 = j
            break
    if j0 is None:
        raise ValueError("the recurrence is identically zero")
    Q = []
    for j in range(j0, rec.s + 1):
        Q.append(_trim(taylor_shift(list(rec.b[j]), j0) if j0 else list(rec.b[j])))
    while len(Q) > 2 and not Q[-1]:
        Q.pop()
    if len(Q) == 1:
        Q.append([])
    if len(Q[0]) - 1 != rec.r and not formal:
        raise IrregularSingularity(
            f"indicial polynomial has degree {len(Q[0]) - 1}, expected {rec.r}")
    return IndicialData(j0, Q, rec.r)


def _trim(poly):
    out = list(poly)
    while out and not any(out[-1].c):
        out.pop()
    return out


# -- factorisation into integer-shift classes ---------------------------------


@dataclass
class ExponentClass:
    """Roots gamma + nu of Q_0 for gamma a root of q and nu in ``shifts``.

    ``q`` is monic over Q (ascending Fractions); alpha = tau*gamma is a root
    of the monic integer polynomial ``qt``.
    """

    q: list
    tau: int
    qt: list
    shifts: dict

    @property
    def degree(self):
        return len(self.q) - 1

    @property
    def kappa(self):
        return sum(self.shifts.values())

    @property
    def nus(self):
        return sorted(self.shifts)

    def multiplicity(self, nu):
        return self.shifts.get(nu, 0)

    def gamma_if_rational(self):
        if self.degree == 1:
            return -self.q[0]
        return None


def _rational_shape(Q0):
    """Write Q0 = zeta * R(n) with R monic rational; return (zeta, R)."""
    lc = Q0[-1]
    idx = next(i for i, a in enumerate(lc.c) if a)
    ratios = []
    for c in Q0:
        ratio = Fraction(int(c.c[idx]), int(lc.c[idx]))
        for a, b in zip(c.c, lc.c):
            if Fraction(int(a)) != ratio * int(b):
                raise FactorizationUnsupported(
                    "indicial polynomial is not a constant times a rational polynomial")
        ratios.append(ratio)
    return lc, ratios


def _shift_poly(q, nu):
    """Coefficients of q(n - nu)."""
    n = sympy.Symbol("n")
    expr = sum(sympy.Rational(c.numerator, c.denominator) * (n - nu) ** i
               for i, c in enumerate(q))
    poly = sympy.Poly(sympy.expand(expr), n)
    coeffs = [Fraction(int(c.p), int(c.q)) for c in reversed(poly.all_coeffs())]
    return coeffs


def _relative_shift(qa, qb):
    """Integer nu with qb(n) = qa(n - nu), or None."""
    if len(qa) != len(qb):
        return None
    d = len(qa) - 1
    # coefficient of n^(d-1) in qa(n - nu) is qa_{d-1} - d*nu
    nu = (qa[d - 1] - qb[d - 1]) / d
    if nu.denominator != 1:
        return None
    nu = int(nu)
    return nu if _shift_poly(qa, nu) == qb else None


def factor_indicial(Q0):
    """(zeta, classes) with Q0 = zeta * prod_q prod_nu q(n - nu)^m."""
    zeta, R = _rational_shape(Q0)
    n = sympy.Symbol("n")
    expr = sum(sympy.Rational(c.numerator, c.denominator) * n ** i for i, c in enumerate(R))
    _, facs = sympy.factor_list(expr, n)
    monics = []
    for f, m in facs:
        poly = sympy.Poly(f, n)
        lcf = poly.LC()
        coeffs = [Fraction(int(sympy.Rational(c / lcf).p), int(sympy.Rational(c / lcf).q))
                  for c in reversed(poly.all_coeffs())]
        if len(coeffs) > 1:
            monics.append((coeffs, m))
    groups = []
    for coeffs, m in monics:
        placed = False
        for g in groups:
            nu = _relative_shift(g["base"], coeffs)
            if nu is not None:
                g["members"].append((nu, m))
                placed = True
                break
        if not placed:
            groups.append({"base": coeffs, "members": [(0, m)]})
    classes = []
    for g in groups:
        low = min(nu for nu, _ in g["members"])
        q = _shift_poly(g["base"], low)
        shifts = {nu - low: m for nu, m in g["members"]}
        tau = _integral_scale(q)
        d = len(q) - 1
        qt = [int(q[i] * tau ** (d - i)) for i in range(d + 1)]
        classes.append(ExponentClass(q, tau, qt, shifts))
    classes.sort(key=lambda c: (c.degree, [float(x) for x in c.q]))
    return zeta, classes


def _integral_scale(q):
    d = len(q) - 1
    tau = 1
    while True:
        if all((q[i] * tau ** (d - i)).denominator == 1 for i in range(d)):
            return tau
        tau += 1


# -- roots in Z_p ---------------------------------------------------------------


def _poly_eval_int(f, x):
    acc = 0
    for c in reversed(f):
        acc = acc * x + c
    return acc


def _compose_affine(f, a, b):
    """Coefficients of f(a + b X) for integer polynomials."""
    out = [0]
    for c in reversed(f):
        new = [0] * (len(out) + 1)
        for i, x in enumerate(out):
            new[i] += x * a
            new[i + 1] += x * b
        new[0] += c
        out = new
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def _roots_mod_p(g, p):
    g = [c % p for c in g]
    while len(g) > 1 and g[-1] == 0:
        g.pop()
    if len(g) == 1:
        return [] if g[0] else list(range(p))
    if p < 5000:
        return [x for x in range(p) if _poly_eval_int(g, x) % p == 0]
    xs = sympy.Symbol("x")
    poly = sympy.Poly(list(reversed(g)), xs, modulus=p)
    out = []
    for fac, _ in poly.factor_list()[1]:
        if fac.degree() == 1:
            a, b = [int(c) % p for c in fac.all_coeffs()]
            out.append((-b * pow(a, -1, p)) % p)
    return sorted(set(out))


def _deriv(f):
    return [i * c for i, c in enumerate(f)][1:] or [0]


def zp_roots(q, p, sigma):
    """Roots in Z_p of a squarefree rational polynomial, modulo p^sigma."""
    den = 1
    for c in q:
        den = math.lcm(den, Fraction(c).denominator)
    f = [int(Fraction(c) * den) for c in q]
    d = len(f) - 1
    found = []
    stack = [(0, 0)]
    while stack:
        r, k = stack.pop()
        g = _compose_affine(f, r, p ** k)
        cont = 0
        for c in g:
            cont = math.gcd(cont, c)
        if cont == 0:
            found.append(r)
            continue
        v = gmpy2.remove(mpz(cont), p)[1] if cont else 0
        g = [c // p ** v for c in g]
        dg = _deriv(g)
        for x0 in _roots_mod_p(g, p):
            if _poly_eval_int(dg, x0) % p:
                x = _hensel(g, dg, x0, p, max(sigma - k, 1))
                found.append((r + p ** k * x) % p ** sigma)
            elif k + 1 > sigma + 4 * d + 64:
                raise PadixError("root isolation did not terminate")
            else:
                stack.append((r + p ** k * x0, k + 1))
    found = sorted(set(x % p ** sigma for x in found))
    return [ApproxElement(_qp(p), mpz(x), sigma) for x in found]


def _hensel(g, dg, x, p, prec):
    k = 1
    while k < prec:
        k = min(2 * k, prec)
        m = p ** k
        x = (x - _poly_eval_int(g, x) * pow(_poly_eval_int(dg, x), -1, m)) % m
    return x


_QP = {}


def _qp(p):
    if p not in _QP:
        from .field import make_field
        _QP[p] = make_field(p)
    return _QP[p]


# -- coefficient rings ----------------------------------------------------------


class AlgElement:
    """Element of O_K^ex[alpha]/(qt(alpha)), stored as a coefficient list."""

    __slots__ = ("c", "mod")

    def __init__(self, c, mod):
        self.c = c
        self.mod = mod

    @staticmethod
    def lift(x, mod):
        if isinstance(x, AlgElement):
            return x
        return AlgElement([x] + [0] * (len(mod) - 2), mod)

    def __bool__(self):
        return any(_nz(a) for a in self.c)

    def __eq__(self, other):
        o = AlgElement.lift(other, self.mod)
        return all(_eqz(a - b) for a, b in zip(self.c, o.c))

    def __add__(self, other):
        o = AlgElement.lift(other, self.mod) if _ringish(other) else None
        if o is None:
            return NotImplemented
        return AlgElement([a + b for a, b in zip(self.c, o.c)], self.mod)

    __radd__ = __add__

    def __neg__(self):
        return AlgElement([-a for a in self.c], self.mod)

    def __sub__(self, other):
        return self + (-AlgElement.lift(other, self.mod))

    def __rsub__(self, other):
        return AlgElement.lift(other, self.mod) - self

    def __mul__(self, other):
        if isinstance(other, AlgElement):
            d = len(self.mod) - 1
            prod = [0] * (2 * d - 1)
            for i, a in enumerate(self.c):
                if not _nz(a):
                    continue
                for j, b in enumerate(other.c):
                    if _nz(b):
                        prod[i + j] = prod[i + j] + a * b
            for k in range(len(prod) - 1, d - 1, -1):
                top = prod[k]
                if _nz(top):
                    for i in range(d):
                        if self.mod[i]:
                            prod[k - d + i] = prod[k - d + i] - top * self.mod[i]
            return AlgElement(prod[:d], self.mod)
        if _ringish(other):
            return AlgElement([a * other if _nz(a) else 0 for a in self.c], self.mod)
        return NotImplemented

    __rmul__ = __mul__

    def __repr__(self):
        return f"AlgElement({self.c})"


def _ringish(x):
    return isinstance(x, (int, _MPZ, ExactElement, AlgElement))


def _nz(a):
    if isinstance(a, ExactElement):
        return any(a.c)
    return bool(a)


def _eqz(a):
    return not _nz(a)


class LJet:
    """Truncated power series in Lambda over the coefficient ring."""

    __slots__ = ("c",)

    def __init__(self, c):
        self.c = c

    def __bool__(self):
        return any(_nz(a) for a in self.c)

    def __eq__(self, other):
        if not isinstance(other, LJet):
            other = LJet([other] + [0] * (len(self.c) - 1))
        return all(_eqz(a - b) for a, b in zip(self.c, other.c))

    def __add__(self, other):
        if isinstance(other, LJet):
            return LJet([a + b for a, b in zip(self.c, other.c)])
        c = list(self.c)
        c[0] = c[0] + other
        return LJet(c)

    __radd__ = __add__

    def __neg__(self):
        return LJet([-a for a in self.c])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, LJet):
            n = len(self.c)
            out = [0] * n
            for i, a in enumerate(self.c):
                if not _nz(a):
                    continue
                for j in range(n - i):
                    b = other.c[j]
                    if _nz(b):
                        out[i + j] = out[i + j] + a * b
            return LJet(out)
        return LJet([a * other if _nz(a) else 0 for a in self.c])

    __rmul__ = __mul__

    def __repr__(self):
        return f"LJet({self.c})"


# -- the class engine -----------------------------------------------------------


class _ClassRecurrence:
    """Recurrence adapter feeding :func:`product_tree` with the modified
    coefficients: b0~(nu) = w0^kappa and b_j~(nu) = P_j(beta + tau Lambda) z(nu),
    where z = w0^kappa W^-1 and W = Lambda^-m P_0(beta + tau Lambda)."""

    def __init__(self, K, P, cls, alpha, r):
        self.K = K
        self.P = P
        self.cls = cls
        self.alpha = alpha
        self.tau = cls.tau
        self.kappa = cls.kappa
        self.r = r
        self.k = 1
        self._cache = {}

    @property
    def s(self):
        return len(self.P) - 1

    def _lj(self, c):
        return LJet(c) if self.kappa > 1 else c[0]

    def expand(self, j, nu, length):
        """Coefficients of P_j(beta + tau Lambda) up to Lambda^(length-1)."""
        beta = self.alpha + self.tau * nu
        acc = [0] * length
        for coeff in reversed(self.P[j]):
            # acc = acc * (beta + tau Lambda) + coeff
            new = [0] * length
            for i, a in enumerate(acc):
                if not _nz(a):
                    continue
                new[i] = new[i] + a * beta
                if i + 1 < length:
                    new[i + 1] = new[i + 1] + a * self.tau
            new[0] = new[0] + coeff
            acc = new
        return acc

    def data(self, nu):
        if nu in self._cache:
            return self._cache[nu]
        kappa = self.kappa
        m = self.cls.multiplicity(nu)
        w = self.expand(0, nu, kappa + m)
        for i in range(m):
            if _nz(w[i]):
                raise PadixError("indicial root multiplicity mismatch")
        W = w[m:m + kappa]
        w0 = W[0]
        if not _nz(w0):
            raise PadixError("unexpected root of the indicial polynomial")
        g = [1]
        for k in range(1, kappa):
            acc = 0
            w0pow = 1
            for i in range(1, k + 1):
                if _nz(W[i]):
                    acc = acc + W[i] * w0pow * g[k - i]
                w0pow = w0pow * w0
            g.append(-acc)
        z = []
        for k in range(kappa):
            z.append(_pow(w0, kappa - 1 - k) * g[k])
        b0 = _pow(w0, kappa)
        bj = []
        for j in range(1, self.s + 1):
            pj = self.expand(j, nu, kappa)
            bj.append(_ljet_mul(pj, z, kappa))
        out = (b0, bj, z, m)
        if len(self._cache) < 4096:
            self._cache[nu] = out
        return out

    def b0(self, nu):
        return self.data(nu)[0]

    def eval(self, j, nu):
        if j == 0:
            return self.b0(nu)
        return self._lj(self.data(nu)[1][j - 1])


def _pow(x, k):
    out = 1
    for _ in range(k):
        out = out * x
    return out


def _ljet_mul(a, b, n):
    out = [0] * n
    for i, x in enumerate(a[:n]):
        if not _nz(x):
            continue
        for j in range(n - i):
            if _nz(b[j]):
                out[i + j] = out[i + j] + x * b[j]
    return out


# L-elements: a list over log index k of Delta-jets (lists of length r).


def _zero_L(kappa, r):
    return [[0] * r for _ in range(kappa)]


def _L_is_zero(c):
    return not any(_nz(a) for jet in c for a in jet)


def _act(J, c):
    """(J . c)_k = sum_i J_i c_{k+i} for a Lambda-jet (or scalar) J."""
    kappa = len(c)
    if isinstance(J, LJet):
        coeffs = J.c
    elif isinstance(J, list):
        coeffs = J
    else:
        coeffs = [J]
    out = []
    for k in range(kappa):
        acc = [0] * len(c[0])
        for i, a in enumerate(coeffs):
            if k + i >= kappa:
                break
            if not _nz(a):
                continue
            src = c[k + i]
            for q, x in enumerate(src):
                if _nz(x):
                    acc[q] = acc[q] + a * x
        out.append(acc)
    return out


def _L_add(a, b):
    return [[x + y for x, y in zip(ja, jb)] for ja, jb in zip(a, b)]


def _L_scale(a, s):
    return [[x * s if _nz(x) else 0 for x in jet] for jet in a]


def _L_jet(a, u, r):
    """Multiply every Delta-jet of an L-element by the Delta-jet u."""
    return [jet_mul(jet, u, r) if any(_nz(x) for x in jet) else [0] * r for jet in a]


def _act_R(Rent, c, r):
    """An R entry is a Delta-jet of Lambda-jets; it acts on c."""
    out = _zero_L(len(c), r)
    for a, J in enumerate(Rent):
        if not _nz(J):
            continue
        piece = _act(J, c)
        for k in range(len(c)):
            for q in range(r - a):
                x = piece[k][q]
                if _nz(x):
                    out[k][q + a] = out[k][q + a] + x
    return out


def _shift_right(c, m):
    kappa = len(c)
    r = len(c[0])
    return [[0] * r for _ in range(m)] + [list(j) for j in c[:kappa - m]]


@dataclass
class _Column:
    top: list
    last: list
    den: object
    nu0: int
    k: int


@dataclass
class SolutionColumn:
    """A basis solution: its log-coefficient partial sums as Delta-jets.

    ``num[k][i]`` over ``den`` is the Delta^i coefficient of
    sum_{nu < N} f_{nu,k} (x + Delta)^nu; the attached exponent is
    gamma (= alpha/tau) and the column was started at index nu0 as L^k.
    """

    cls: ExponentClass
    num: list
    den: object
    nu0: int
    k: int


def _apply_tuple(Pi, col, r):
    s = len(col.top)
    ut = [[jet_mul(jet, Pi.u, r) for jet in L] for L in col.top]
    top = []
    for i in range(s):
        acc = _zero_L(len(col.last), r)
        for l in range(s):
            a = Pi.C[i][l]
            if _nz(a):
                acc = _L_add(acc, _act(a, ut[l]))
        top.append(acc)
    last = _L_scale(col.last, Pi.d * Pi.v)
    for l in range(s):
        Rent = Pi.R[0][l]
        if any(_nz(a) for a in Rent):
            last = _L_add(last, _act_R(Rent, col.top[l], r))
    return _Column(top, last, col.den * Pi.d * Pi.v, col.nu0, col.k)


def _exceptional_step(crec, nu0, col, w, vv, r):
    """Advance one column across a root nu0 of multiplicity m."""
    b0, _, z, m = crec.data(nu0)
    s = crec.s
    rhs = _zero_L(crec.kappa, r)
    for j in range(1, s + 1):
        pj = crec.expand(j, nu0, crec.kappa)
        rhs = _L_add(rhs, _act(pj, col.top[s - j]))
    if m and any(_nz(a) for jet in rhs[crec.kappa - m:] for a in jet):
        raise PadixError("log-degree overflow at an exceptional index")
    new = _shift_right(_act(z, _L_scale(rhs, -1)), m)
    top = [_L_jet(_L_scale(col.top[i + 1], b0), w, r) for i in range(s - 1)]
    top.append(_L_jet(new, w, r))
    last = _L_scale(_L_add(col.last, col.top[s - 1]), vv * b0)
    return _Column(top, last, col.den * vv * b0, col.nu0, col.k)


def _w_jet(u, vv, r):
    return [u] + ([vv] + [0] * (r - 2) if r > 1 else [])


def _jet_pow(w, k, r):
    out = [1] + [0] * (r - 1)
    for _ in range(k):
        out = jet_mul(out, w, r)
    return out


def class_partial_sums(K, idata, cls, u, v, N, on_node=None, trace=None):
    """Partial sums over nu < N of every column of one exponent class.

    ``trace`` (a dict) receives, when given, the sequence of exact states; it
    is only used by the slow reference checks.
    """
    r = idata.r
    D = max(len(q) - 1 for q in idata.Q if q)
    tau = cls.tau
    scal = lambda x: _to_scalar(K, x)
    # P_j(X) = tau^D Q_j(X / tau)
    P = []
    for q in idata.Q:
        P.append([scal(c) * tau ** (D - i) for i, c in enumerate(q)])
    if cls.degree == 1:
        alpha = -cls.qt[0]
    else:
        alpha = AlgElement([0, 1] + [0] * (cls.degree - 2), cls.qt)
    crec = _ClassRecurrence(K, P, cls, alpha, r)
    kappa = cls.kappa
    s = crec.s
    uu = scal(u)
    vv = scal(v)
    w = _w_jet(uu, vv, r)
    cols = []
    nus = [nu for nu in cls.nus if nu < N]
    events = nus + [N]
    for idx, nu0 in enumerate(nus):
        cols = [_exceptional_step(crec, nu0, c, w, vv, r) for c in cols]
        m = cls.multiplicity(nu0)
        wp = _jet_pow(w, nu0, r)
        for k in range(m):
            top = [_zero_L(kappa, r) for _ in range(s)]
            L = _zero_L(kappa, r)
            L[k] = list(wp)
            top[s - 1] = L
            cols.append(_Column(top, _zero_L(kappa, r), vv ** nu0 if nu0 else 1, nu0, k))
        lo, hi = nu0 + 1, events[idx + 1]
        if hi > lo:
            Pi = product_tree(crec, uu, vv, lo, hi, order=r, on_node=on_node)
            cols = [_apply_tuple(Pi, c, r) for c in cols]
    out = []
    for c in cols:
        total = _L_add(c.last, c.top[s - 1])
        out.append(SolutionColumn(cls, total, c.den, c.nu0, c.k))
    return out


# -- specialization -------------------------------------------------------------


def _eval_alg(x, alpha_star, K, prec):
    """Image of a ring element under alpha -> alpha_star, as an ApproxElement."""
    if isinstance(x, AlgElement):
        acc = ApproxElement(K, K.zero, prec)
        pw = ApproxElement(K, K.one, prec)
        for a in x.c:
            if _nz(a):
                acc = acc + pw * _from_scalar(K, a)
            pw = pw * alpha_star
        return acc
    return None


def _lift_qp(K, a):
    """Embed an element of Q_p (as ApproxElement over Q_p) into K."""
    if a.K is K:
        return a
    return ApproxElement(K, K.from_int(a.value.c[0]), a.prec * K.e, a.shift)


def column_value(col, K, alpha_star, sigma):
    """num/den at alpha -> alpha_star: a list over k of Delta-jets over K."""
    if col.cls.degree == 1:
        return [[exact_divide(K, a, col.den, sigma) for a in jet] for jet in col.num]
    prec = sigma + 8 * K.e
    for _ in range(8):
        a_star = _lift_qp(K, alpha_star.with_precision(prec))
        den = _eval_alg(AlgElement.lift(col.den, col.cls.qt), a_star, K, prec)
        if den.is_zero():
            prec *= 2
            continue
        dinv = den.inverse()
        out = []
        ok = True
        for jet in col.num:
            row = []
            for a in jet:
                num = _eval_alg(AlgElement.lift(a, col.cls.qt), a_star, K, prec)
                val = num * dinv
                if val.prec < sigma:
                    ok = False
                row.append(val.with_precision(sigma))
            out.append(row)
        if ok:
            return out
        prec *= 2
    raise PrecisionLoss("exponent roots too close to specialise at this precision")


@dataclass
class Branch:
    """Choice of log(x0) and of x0^delta for the specialization."""

    log_x0: object = None
    x0_pow: object = None


def default_log(x0, sigma):
    """Iwasawa-style branch: log p = log Y = 0, log of the unit part u via
    log(u^(q-1))/(q-1)."""
    if isinstance(x0, ApproxElement):
        x0 = x0.exact()
    if isinstance(x0, FractionElement):
        K = x0.K
        lx = default_log(x0.num, sigma)
        return lx - default_log(K.from_int(int(x0.den)), sigma)
    K = x0.K
    m, t, w = K.split_pi(x0)
    q = K.p ** K.f
    wa = reduce_mod(w, sigma + K.e)
    wq = wa ** (q - 1)
    lg = elementary.log1m(1 - wq, sigma + K.e)
    return (lg * Fraction(1, q - 1)).with_precision(sigma)


def _delta_int(delta):
    if isinstance(delta, (int, Fraction)):
        d = Fraction(delta)
        return int(d) if d.denominator == 1 else None
    return None


def specialize(c, x0, xi, delta, branch=None, sigma=None):
    """x0^delta (1+t)^delta sum_k c_k (log x0 + log(1+t))^k / k! with
    t = xi + Delta/x0, for c a list of Delta-jets over K.

    Here c_k are the jets sum_nu f_{nu,k} (x + Delta)^nu with x = x0 (1 + xi),
    so that (x + Delta)^delta = x0^delta (1 + t)^delta.
    """
    K = x0.K if not isinstance(x0, ApproxElement) else x0.K
    r = len(c[0])
    kappa = len(c)
    if sigma is None:
        sigma = min(a.prec for jet in c for a in jet)
    branch = branch or Branch()
    # negative valuations in c or in x eat into the absolute precision
    neg = max((-a.val_pi() for jet in c for a in jet if not a.is_zero()), default=0)
    work = sigma + 2 * K.e * (r + kappa) + 4 * K.e + max(neg, 0)
    x0a = x0 if isinstance(x0, ApproxElement) else (
        approx_from_fraction(x0, work) if isinstance(x0, FractionElement) else reduce_mod(x0, work))
    xia = xi if isinstance(xi, ApproxElement) else (
        reduce_mod(xi, work) if not isinstance(xi, int) else ApproxElement(K, xi, work))
    work += (r - 1) * max(x0a.val_pi(), 0) if not x0a.is_zero() else 0
    # the base point is read as an exact representative
    x0a, xia = _pad(x0a, work), _pad(xia, work)
    onep = 1 + xia
    x = x0a * onep
    dint = _delta_int(delta)
    zero_xi = xia.is_zero()
    # (1 + xi)^delta and log(1 + xi)
    if zero_xi:
        pxi = ApproxElement(K, K.one, work)
        lxi = ApproxElement(K, K.zero, work)
    else:
        if dint is not None:
            pxi = onep ** dint
        else:
            pxi = elementary.pow(onep, delta, work)
        lxi = elementary.log1p(xia, work) if kappa > 1 else ApproxElement(K, K.zero, work)
    # x0^delta
    if branch.x0_pow is not None:
        px0 = branch.x0_pow
    elif dint is not None:
        px0 = x0a ** dint
    else:
        unit_one = (x0a - 1)
        if not unit_one.is_zero() and (unit_one.shift or unit_one.val_pi() <= 0):
            raise PadixError("x0^delta needs an explicit branch for non-integral delta")
        px0 = elementary.pow(x0a, delta, work) if not unit_one.is_zero() else \
            ApproxElement(K, K.one, work)
    # jets in Delta: (1 + Delta/x)^delta and log(1 + Delta/x)
    xinv = x.inverse() if r > 1 else None
    binom = [ApproxElement(K, K.one, work)]
    lg = [ApproxElement(K, K.zero, work)]
    dval = delta if not isinstance(delta, int) else Fraction(delta)
    coef = ApproxElement(K, K.one, work)
    xpow = ApproxElement(K, K.one, work)
    for i in range(1, r):
        coef = coef * _as_field(K, dval - (i - 1), work) * Fraction(1, i)
        xpow = xpow * xinv
        binom.append(coef * xpow)
        lg.append(xpow * Fraction((-1) ** (i + 1), i))
    if kappa > 1:
        if branch.log_x0 is not None:
            lx0 = branch.log_x0
        else:
            lx0 = default_log(x0a, work)
        lg[0] = lx0 + lxi
    total = [ApproxElement(K, K.zero, work) for _ in range(r)]
    lpow = [ApproxElement(K, K.one, work)] + [ApproxElement(K, K.zero, work)] * (r - 1)
    fact = 1
    for k in range(kappa):
        if k:
            lpow = _jmul(lpow, lg, r, K, work)
            fact *= k
        term = _jmul(c[k], lpow, r, K, work)
        total = [a + b * Fraction(1, fact) for a, b in zip(total, term)]
    total = _jmul(total, binom, r, K, work)
    scale = px0 * pxi
    return [(a * scale).with_precision(sigma) for a in total]


def _pad(a, work):
    if a.prec >= work:
        return a
    return ApproxElement(a.K, a.value, work, a.shift)


def _as_field(K, d, work):
    if isinstance(d, ApproxElement):
        return _lift_qp(K, d) if d.K is not K else d
    d = Fraction(d)
    return approx_from_fraction(FractionElement(K.from_int(d.numerator), d.denominator), work)


def _jmul(a, b, r, K, work):
    out = [ApproxElement(K, K.zero, work) for _ in range(r)]
    for i in range(r):
        for j in range(r - i):
            out[i + j] = out[i + j] + a[i] * b[j]
    return out


# -- driver ---------------------------------------------------------------------


@dataclass
class RegSingMatrix(FundamentalMatrix):
    """Specialized columns; ``labels[j]`` is (class, exponent, nu0, k)."""

    labels: list = dc_field(default_factory=list)


def _default_x0(K, u, v):
    if int(v) == 1:
        return u
    return FractionElement(u, v)


def regsing_partial_sum(ode, u, v, N, sigma, x0=None, branch=None, formal=False,
                        on_node=None, root_precision=None, keep=None):
    """Specialized partial sums of a basis of logarithmic solutions at u/v.

    Columns are ordered by exponent class, then by starting index nu0 and
    log degree k, then by the root of the class in Z_p.  ``keep`` is an
    optional predicate on exponent classes; classes it rejects are skipped
    and the result is then a partial basis.
    """
    K = ode.K
    u, v = _normalize_point(K, u, v)
    v = _check_v(K, v)
    rec = derive_recurrence(ode)
    idata = indicial_data(rec, formal=formal)
    _, classes = factor_indicial(idata.Q[0])
    x = FractionElement(u, v)
    if x0 is None:
        x0 = _default_x0(K, u, v)
        xi = 0
    else:
        # x = x0 (1 + xi)
        x0e = x0.exact() if isinstance(x0, ApproxElement) else x0
        xi = None
    work = sigma + 4 * K.e * (ode.r + 2)
    entries = [[] for _ in range(ode.r)]
    labels = []
    for cls in classes:
        if keep is not None and not keep(cls):
            continue
        roots = zp_roots(cls.q, K.p, (root_precision or work + 16) + 0)
        if len(roots) < cls.degree:
            raise NotSplit(f"exponent polynomial {cls.q} does not split over Z_p")
        cols = class_partial_sums(K, idata, cls, u, v, N, on_node=on_node)
        for col in cols:
            for g in roots:
                a_star = g * cls.tau
                cvals = column_value(col, K, a_star, work)
                neg = max((-a.val_pi() for jet in cvals for a in jet if not a.is_zero()),
                          default=0)
                if neg > 0:
                    cvals = column_value(col, K, a_star, work + neg)
                delta = cls.gamma_if_rational()
                if delta is None:
                    delta = g
                xa = approx_from_fraction(x, work)
                if xi is None:
                    x0a = x0 if isinstance(x0, ApproxElement) else _approx_any(K, x0, work)
                    xi_v = xa / x0a - 1
                else:
                    x0a = _approx_any(K, x0, work)
                    xi_v = 0
                jets = specialize(cvals, x0a, xi_v, delta, branch, sigma)
                for i in range(ode.r):
                    entries[i].append(jets[i])
                labels.append((cls, delta, col.nu0, col.k))
    if len(labels) != ode.r and not formal and keep is None:
        raise PadixError("did not obtain a full basis")
    return RegSingMatrix(entries, (u, v), N, sigma, labels)


def _approx_any(K, x, sigma):
    if isinstance(x, ApproxElement):
        return x
    if isinstance(x, FractionElement):
        return approx_from_fraction(x, sigma)
    if isinstance(x, int):
        return ApproxElement(K, K.from_int(x), sigma)
    return reduce_mod(x, sigma)


# -- slow reference -------------------------------------------------------------


def formal_coefficients(ode, nterms, formal=False):
    """Term-by-term log-coefficient vectors for every column, as exact
    Fractions (classes of degree 1 only).  Returns a list of
    (class, nu0, k, [f_0, ..., f_{nterms-1}]) where f_nu is a list of
    ``kappa`` FractionElements.  Used to check the product-tree engine."""
    K = ode.K
    rec = derive_recurrence(ode)
    idata = indicial_data(rec, formal=formal)
    _, classes = factor_indicial(idata.Q[0])
    out = []
    for cls in classes:
        if cls.degree != 1:
            raise FactorizationUnsupported("slow reference handles rational exponents only")
        gamma = -cls.q[0]
        kappa = cls.kappa
        s = idata.s_prime

        def Qjet(j, nu):
            # coefficients of Q_j(gamma + nu + Lambda) in Lambda, as Fractions of K
            n0 = gamma + nu
            coeffs = idata.Q[j]
            res = []
            for k in range(kappa + max(cls.shifts.values())):
                acc = FractionElement(K.zero, 1)
                for i, c in enumerate(coeffs):
                    if i >= k:
                        acc = acc + FractionElement(c, 1) * (Fraction(math.comb(i, k)) * n0 ** (i - k))
                res.append(acc)
            return res

        cols = []
        for nu in range(nterms):
            m = cls.multiplicity(nu)
            w = Qjet(0, nu)
            W = w[m:m + kappa]
            for col in cols:
                rhs = [FractionElement(K.zero, 1) for _ in range(kappa)]
                for j in range(1, s + 1):
                    if nu - j < 0:
                        continue
                    pj = Qjet(j, nu)
                    prev = col[3][nu - j]
                    for k in range(kappa):
                        for i in range(kappa - k):
                            rhs[k] = rhs[k] + pj[i] * prev[k + i]
                # solve W . g = -rhs, then f = S^m g
                g = [None] * kappa
                w0 = W[0]
                for k in range(kappa - 1, -1, -1):
                    acc = -rhs[k]
                    for i in range(1, kappa - k):
                        acc = acc - W[i] * g[k + i]
                    g[k] = _fe_div(acc, w0)
                f = [FractionElement(K.zero, 1)] * m + g[:kappa - m]
                col[3].append(f)
            for k in range(m):
                f = [FractionElement(K.zero, 1) for _ in range(kappa)]
                f[k] = FractionElement(K.one, 1)
                zeros = [[FractionElement(K.zero, 1)] * kappa for _ in range(nu)]
                cols.append((cls, nu, k, zeros + [f]))
        out.extend(cols)
    return out


def _fe_div(a, b):
    if not any(b.num.c[1:]):
        c = int(b.num.c[0])
        return FractionElement(a.num * (1 if c > 0 else -1) * int(b.den), a.den * abs(c))
    raise FactorizationUnsupported("slow reference needs integer leading coefficients")
