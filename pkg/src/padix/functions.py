"""Special functions built on the ODE engines.

Polylogarithms and Gauss 2F1 are evaluated in two stages: the logarithmic
series at 0 gives the solution and its derivatives at a short truncation
x0 of x, and the digit-burst driver carries them from x0 to x.

The Dwork log-derivative f = F'/F of F = 2F1(1/2, 1/2; 1; t) on the unit
circle combines a Frobenius eigenvector at a first point x0 with the same
continuation on the hypergeometric equation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

from sympy.functions.combinatorial.numbers import stirling

from .analytic import default_context, digit_burst_solve
from .errors import (BadParameters, MissingInitialData, NoUnitRoot, NotInDomain,
                     NotUnique, PrecisionLoss)
from .field import (INF, ApproxElement, ExactElement, FractionElement,
                    approx_from_fraction, make_field, parse_literal, reduce_mod,
                    slice_digits, valuation)
from .recurrence import ODESpec, SystemODESpec, derive_recurrence, unroll
from .regsing import regsing_partial_sum


# -- helpers --------------------------------------------------------------------


def _exact_point(x, sigma):
    """An exact representative of x (integral, or FractionElement)."""
    if isinstance(x, ApproxElement):
        if x.shift:
            return x.exact()
        return x.value
    return x


def _as_element(K, x):
    if isinstance(x, (int, Fraction)):
        x = Fraction(x)
        if x.denominator == 1:
            return K.from_int(x.numerator)
        return FractionElement(K.from_int(x.numerator), x.denominator)
    return x


def _field_of(x, p=None):
    if hasattr(x, "K"):
        return x.K
    if p is None:
        raise TypeError("pass an element of K or give p")
    return make_field(p)


def _terms_for_growth(v, sigma_e, log_growth, r):
    """Least N with (n - r + 1) v - log_growth(n) >= sigma_e for every n >= N.

    ``log_growth`` is increasing and concave in log n, so once the left side
    is increasing it stays so; the search starts past that point.
    """
    v = float(v)
    n = max(r, 1)
    while True:
        val = (n - r + 1) * v - log_growth(n)
        slope = v - (log_growth(2 * n) - log_growth(n)) / n
        if val >= sigma_e + 1e-9 and slope > 0:
            return n
        n = max(n + 1, int(n * 1.25))


def _two_stage(ode, x, sigma, select, log_growth, keep=None):
    """Evaluate the solution picked by ``select`` among the logarithmic basis
    at 0, at the point x with val(x) > 0."""
    K = ode.K
    x = _exact_point(x, sigma)
    if isinstance(x, FractionElement):
        raise NotInDomain("the argument must be integral")
    vx = valuation(x)
    if vx == INF:
        return None
    if vx <= 0:
        raise NotInDomain("the argument must satisfy |x| < 1")
    r = ode.r
    # first point: the shortest slice x0 of x whose remainder lies well inside
    # the disk of convergence of the ODE recentred at x0
    k = math.ceil(vx * K.e) + 1
    while True:
        x0 = slice_digits(x, 0, k)
        rest = x - x0
        if not any(rest.c):
            break
        shifted = ode.shifted(x0)
        ctx = default_context(shifted, nu=vx)
        if valuation(rest) > ctx.nu_tilde:
            break
        k += 1
    work = sigma + K.e * (r + 2)
    for _ in range(6):
        N = _terms_for_growth(vx, Fraction(work, K.e) + (r - 1) * vx + 2, log_growth, r)
        M = regsing_partial_sum(ode, x0, 1, N, work, keep=keep)
        j = select(M.labels)
        jet = M.column(j)
        if not any(rest.c):
            val = jet[0]
        else:
            Phi = digit_burst_solve(ctx, rest, work)
            val = None
            for i in range(r):
                t = Phi[0, i] * jet[i]
                val = t if val is None else val + t
        if val.prec >= sigma:
            return val.with_precision(sigma)
        work += sigma - val.prec + 2 * K.e
    raise PrecisionLoss("could not reach the requested precision")


# -- polylogarithms -------------------------------------------------------------


def polylog_ode(K, s):
    """(1 - t) D^(s+1) - D^s with D = t d/dt, written with d/dt."""
    if s < 1:
        raise BadParameters("polylog order must be a positive integer")
    coeffs = []
    for i in range(s + 2):
        a = [0] * (i + 2)
        s1 = int(stirling(s + 1, i)) if i <= s + 1 else 0
        s0 = int(stirling(s, i)) if i <= s else 0
        # (1 - t) S(s+1, i) t^i - S(s, i) t^i
        a[i] += s1 - s0
        a[i + 1] -= s1
        coeffs.append(a)
    ode = ODESpec(K, coeffs)
    _check_polylog_recurrence(ode, s)
    return ode


def _check_polylog_recurrence(ode, s):
    rec = derive_recurrence(ode)
    K = ode.K
    ys = [Fraction(0)] + [Fraction(1, n ** s) for n in range(1, 24)]
    for n in range(rec.s, 24):
        acc = Fraction(0)
        for j in range(rec.s + 1):
            b = rec.b[j]
            val = sum(int(c.c[0]) * n ** i for i, c in enumerate(b)) if b else 0
            acc += val * ys[n - j]
        if acc:
            raise AssertionError("polylog ODE does not annihilate the series")


def polylog(s, x, sigma, p=None):
    """Li_s(x) = sum_{i >= 1} x^i / i^s modulo pi^sigma, for |x| < 1."""
    K = _field_of(x, p)
    x = _as_element(K, x)
    ode = polylog_ode(K, s)

    def select(labels):
        for j, (_, delta, nu0, k) in enumerate(labels):
            if delta + nu0 == 1 and k == 0:
                return j
        raise AssertionError("no polylog column")

    def growth(n):
        return s * math.log(n, K.p) + 1

    out = _two_stage(ode, x, sigma, select, growth)
    return ApproxElement(K, K.zero, sigma) if out is None else out


# -- Gauss hypergeometric -------------------------------------------------------


@dataclass(frozen=True)
class HypergeomParams:
    a: Fraction
    b: Fraction
    c: Fraction

    def __post_init__(self):
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.c.denominator == 1 and self.c <= 0:
            raise BadParameters("c must not be a nonpositive integer")

    def check(self, p):
        for v in (self.a, self.b, self.c):
            if v.denominator % p == 0:
                raise BadParameters("parameters must be p-adic integers")

    def term_ratio(self, i):
        return (self.a + i) * (self.b + i) / ((self.c + i) * (1 + i))


def hypergeom_ode(K, params):
    """t(1-t) y'' + (c - (a+b+1) t) y' - ab y = 0, denominators cleared."""
    a, b, c = params.a, params.b, params.c
    ode = ODESpec.from_rational(K, [[-a * b], [c, -(a + b + 1)], [0, 1, -1]])
    _check_hypergeom_recurrence(ode, params)
    return ode


def _check_hypergeom_recurrence(ode, params, terms=20):
    """The ODE's recurrence must reproduce the Pochhammer term ratio."""
    rec = derive_recurrence(ode)
    # b_0(n) y_n + b_1(n) y_{n-1} = 0 after the j0 = 1 shift of the indicial form
    ys = [Fraction(1)]
    for i in range(terms):
        ys.append(ys[-1] * params.term_ratio(i))

    def ev(poly, n):
        return sum(Fraction(int(c.c[0])) * n ** k for k, c in enumerate(poly))

    for n in range(rec.s, terms):
        acc = sum(ev(rec.b[j], n) * ys[n - j] for j in range(rec.s + 1) if n - j >= 0)
        if acc:
            raise AssertionError("hypergeometric ODE disagrees with the term ratio")


def _pochhammer_growth(params, p):
    c = params.c
    span = abs(c.numerator) + abs(c.denominator)

    def growth(n):
        return math.log(span + n * abs(c.denominator), p) + 1

    return growth


def hypergeom_2f1(params, x, sigma, p=None):
    """2F1(a, b; c; x) modulo pi^sigma for |x| < 1."""
    K = _field_of(x, p)
    params.check(K.p)
    x = _as_element(K, x)
    ode = hypergeom_ode(K, params)

    def select(labels):
        for j, (_, delta, nu0, k) in enumerate(labels):
            if isinstance(delta, Fraction) and delta + nu0 == 0 and k == 0:
                return j
        raise AssertionError("no analytic column at exponent 0")

    def integral(cls):
        # only the class holding exponent 0 is needed, and the others may have
        # no value at x (t^(1-c) with 1 - c not an integer)
        g = cls.gamma_if_rational()
        return g is not None and Fraction(g).denominator == 1

    out = _two_stage(ode, x, sigma, select, _pochhammer_growth(params, K.p), keep=integral)
    return ApproxElement(K, K.one, sigma) if out is None else out


def hypergeom_coefficients(params, n):
    """First n series coefficients from the term ratio, as Fractions."""
    ys = [Fraction(1)]
    for i in range(n - 1):
        ys.append(ys[-1] * params.term_ratio(i))
    return ys


# -- Gauss-Manin system and Frobenius eigenvectors -----------------------------


def _pmul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _padd(a, b):
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]


def _pscale(a, k):
    return [x * k for x in a]


def gauss_manin_polys(p, c):
    """(Q, A_cleared, B_cleared, D): D = 4 cd (t - 1)(cn t^p - cd) and
    D*A, D*B the structural matrices with denominators cleared."""
    c = Fraction(c)
    cn, cd = c.numerator, c.denominator
    tm1 = [-1, 1]
    ctp = [-cd] + [0] * (p - 1) + [cn]
    D = _pscale(_pmul(tm1, ctp), 4 * cd)
    A = [[[0], _pscale(_pmul([0, 1], _pmul(tm1, ctp)), cd)],
         [_pscale(ctp, 4 * cd), [0]]]
    B = [[[0], _pmul([0] * p + [cn], _pmul(tm1, ctp))],
         [_pscale(tm1, 4 * cd * cd), [0]]]
    Q = _pmul([0, 1], D)
    return Q, A, B, D


def gauss_manin_ode(p, c):
    """t M' + A M - p M B = 0 vectorized row-major as Q Y' = P Y (4 x 4)."""
    Q, A, B, _ = gauss_manin_polys(p, c)
    K = make_field(p)
    P = [[[0] for _ in range(4)] for _ in range(4)]
    for i in range(2):
        for j in range(2):
            row = 2 * i + j
            # -(A M)_ij = -sum_k A_ik M_kj
            for k in range(2):
                col = 2 * k + j
                P[row][col] = _padd(P[row][col], _pscale(A[i][k], -1))
            # +p (M B)_ij = p sum_k M_ik B_kj
            for k in range(2):
                col = 2 * i + k
                P[row][col] = _padd(P[row][col], _pscale(B[k][j], p))
    return SystemODESpec(K, Q, P)


def _char_unit_root(tr, det, sigma):
    K = tr.K
    lam = tr
    for _ in range(2 * sigma.bit_length() + 8):
        g = lam * lam - tr * lam + det
        if g.with_precision(sigma).is_zero() and g.prec >= sigma:
            break
        lam = lam - g / (lam * 2 - tr)
    return lam


def unit_eigenvector(M, sigma):
    """Eigenvector for the unique unit eigenvalue of a 2x2 matrix.

    Normalized with second coordinate 1 when that coordinate is nonzero,
    otherwise returned as (1, 0).  Returns (vector, eigenvalue).
    """
    (a, b), (c, d) = M
    tr = a + d
    det = a * d - b * c
    if tr.val_pi() > 0:
        raise NoUnitRoot("no eigenvalue of norm 1")
    if det.val_pi() == 0:
        raise NotUnique("both eigenvalues have norm 1")
    lam = _char_unit_root(tr, det, sigma + 2 * tr.K.e)
    # two candidate kernels of M - lam
    v1 = (b, lam - a)
    v2 = (lam - d, c)
    w1 = min(v1[0].val_pi(), v1[1].val_pi())
    w2 = min(v2[0].val_pi(), v2[1].val_pi())
    x, y = v1 if w1 <= w2 else v2
    K = a.K
    if y.is_zero() or y.val_pi() >= y.prec:
        return (ApproxElement(K, K.one, sigma), ApproxElement(K, K.zero, sigma)), lam
    return ((x / y).with_precision(sigma), ApproxElement(K, K.one, sigma)), lam


# -- the Dwork log-derivative ---------------------------------------------------


@dataclass
class FrobeniusInit:
    """Matrix of the Frobenius at a base point, for the twist c."""

    matrix: list
    base_point: object
    precision: int
    c: Fraction = None


def load_frobenius_init(path_or_data, K):
    if isinstance(path_or_data, (str, bytes)) and not str(path_or_data).lstrip().startswith("{"):
        with open(path_or_data) as fh:
            data = json.load(fh)
    elif isinstance(path_or_data, dict):
        data = path_or_data
    else:
        data = json.loads(path_or_data)
    prec = int(data["precision"])
    rows = data["matrix"]
    mat = []
    for row in rows:
        out = []
        for lit in row:
            v = parse_literal(K, str(lit))
            out.append(approx_from_fraction(v, prec) if isinstance(v, FractionElement)
                       else ApproxElement(K, v, prec))
        mat.append(out)
    for row in mat:
        for e in row:
            if not e.is_zero() and e.shift:
                raise NotInDomain("Frobenius data must be integral")
    base = parse_literal(K, str(data["base_point"]))
    c = Fraction(data["c"]) if "c" in data else None
    return FrobeniusInit(mat, base, prec, c)


@dataclass
class DworkContext:
    """Evaluation of f = F'/F at x, |x| = 1, x != 1 mod p.

    The first burst point x0 is the slice of x's first ``x0_digits`` digits;
    f(x0) comes from ``f0`` when given, otherwise from the Frobenius data.
    """

    p: int
    x: object
    init: FrobeniusInit = None
    f0: object = None
    x0_digits: int = 1

    def __post_init__(self):
        self.K = make_field(self.p)
        self.x = _as_element(self.K, self.x)
        if not isinstance(self.x, ExactElement):
            raise NotInDomain("x must be an integral element")
        if valuation(self.x) != 0:
            raise NotInDomain("|x| must be 1")
        if int(self.x.c[0] - 1) % self.p == 0:
            raise NotInDomain("x must not be 1 modulo p")

    @property
    def x0(self):
        return slice_digits(self.x, 0, self.x0_digits)

    @property
    def twist(self):
        """c = x0^(1-p) as an exact rational."""
        x0 = int(self.x0.c[0])
        return Fraction(1, x0 ** (self.p - 1))


def hypergeom_half_ode(K):
    """t(1-t) y'' + (1-2t) y' - y/4 = 0, i.e. 2F1(1/2, 1/2; 1)."""
    return hypergeom_ode(K, HypergeomParams(Fraction(1, 2), Fraction(1, 2), 1))


def frobenius_at(ctx, sigma):
    """The Frobenius matrix at x0, continued from the base point if needed."""
    init = ctx.init
    K = ctx.K
    c = init.c if init.c is not None else ctx.twist
    x0 = ctx.x0
    base = init.base_point
    if isinstance(base, FractionElement):
        raise NotInDomain("base point must be integral")
    if base == x0:
        return [[e.with_precision(sigma) for e in row] for row in init.matrix]
    sysode = gauss_manin_ode(ctx.p, c).shifted(base)
    actx = default_context(sysode, nu=0)
    Phi = digit_burst_solve(actx, x0 - base, sigma)
    vec = [init.matrix[0][0], init.matrix[0][1], init.matrix[1][0], init.matrix[1][1]]
    out = []
    for i in range(4):
        acc = None
        for j in range(4):
            t = Phi[i, j] * vec[j]
            acc = t if acc is None else acc + t
        out.append(acc)
    return [[out[0], out[1]], [out[2], out[3]]]


def dwork_first_value(ctx, sigma):
    """f(x0), from the supplied value or from the Frobenius eigenvector."""
    K = ctx.K
    if ctx.f0 is not None:
        f0 = ctx.f0
        if not isinstance(f0, ApproxElement):
            f0 = _as_element(K, f0)
            f0 = approx_from_fraction(f0, sigma) if isinstance(f0, FractionElement) \
                else ApproxElement(K, f0, sigma)
        return f0
    if ctx.init is None:
        raise MissingInitialData("Frobenius initial data is required")
    M = frobenius_at(ctx, sigma)
    (v1, v2), _ = unit_eigenvector(M, sigma)
    if v2.is_zero():
        raise NoUnitRoot("unit eigenvector is not of the expected shape")
    x0 = ctx.x0
    return v1 / (x0 * (x0 - 1))


def dwork_log_derivative(ctx, sigma, c=None, steps=None):
    """f(x) = G'(x)/G(x) modulo p^sigma, G solving the hypergeometric
    equation with G(x0) = 1 and G'(x0) = f(x0).

    ``c`` sets the first block length of the continuation schedule.
    """
    K = ctx.K
    x0 = ctx.x0
    rest = ctx.x - x0
    work = sigma + 4
    ode = hypergeom_half_ode(K).shifted(x0)
    actx = default_context(ode, nu=0)
    for _ in range(6):
        f0 = dwork_first_value(ctx, work)
        if not any(rest.c):
            return f0.with_precision(sigma)
        log = [] if steps is not None else None
        Phi = digit_burst_solve(actx, rest, work, c=c, steps=log)
        G = Phi[0, 0] + Phi[0, 1] * f0
        dG = Phi[1, 0] + Phi[1, 1] * f0
        f = dG / G
        if f.prec >= sigma:
            if steps is not None:
                steps.extend(log)
            return f.with_precision(sigma)
        work += sigma - f.prec + 2
    raise PrecisionLoss("could not reach the requested precision")


def dwork_truncation(x, p, k):
    """F_k'(x)/F_k(x) modulo p^k with F_k the truncation of F to p^k terms.

    A slow reference through Dwork's congruences; usable for small k only.
    """
    mod = p ** (2 * k + 2)
    x = int(x) % mod
    u, v = 1, 0
    F, dF = 1, 0
    xp = 1
    for n in range(1, p ** k):
        # a_n / a_{n-1} = (2n - 1)^2 / (4 n^2)
        num, den = (2 * n - 1) ** 2, 4 * n * n
        while num % p == 0:
            num //= p
            v += 1
        while den % p == 0:
            den //= p
            v -= 1
        u = u * num * pow(den, -1, mod) % mod
        a = u * p ** v % mod
        dF = (dF + n * a * xp) % mod
        xp = xp * x % mod
        F = (F + a * xp) % mod
    m = p ** k
    return dF * pow(F, -1, m) % m
