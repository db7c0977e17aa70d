"""Gauss norms, convergence radii and the digit-burst evaluation driver.

Radii are encoded by exponents: rho = p^(-nu).  All bounds are exact
rationals; floating point never decides a truncation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DegenerateStep, LeadingCoefficientVanishes, OutOfDisk, PrecisionLoss
from .field import (INF, ApproxElement, ExactElement, FractionElement, slice_digits,
                    valuation)
from .recurrence import (FundamentalMatrix, ODESpec, SystemODESpec,
                         partial_sum_matrix, system_partial_sum)


def _ceil(q):
    return -((-q.numerator) // q.denominator) if isinstance(q, Fraction) else math.ceil(q)


def _floor(q):
    return q.numerator // q.denominator if isinstance(q, Fraction) else math.floor(q)


@dataclass(frozen=True)
class GaussRadius:
    """rho = p^(-nu)."""

    nu: Fraction

    def value(self, p):
        return float(p) ** (-float(self.nu))


def gauss_norm(poly, nu):
    """Exponent w of ||poly||_rho = p^(-w): min over n of val(a_n) + n*nu."""
    nu = Fraction(nu.nu if isinstance(nu, GaussRadius) else nu)
    best = INF
    for n, a in enumerate(poly):
        v = valuation(a)
        if v == INF:
            continue
        w = v + n * nu
        if best == INF or w < best:
            best = w
    return best


def _leading_invertible(a, nu):
    # a is a unit of A_rho iff its constant term dominates the Gauss norm
    if not a or valuation(a[0]) == INF:
        return False
    return gauss_norm(a, nu) == valuation(a[0])


def _matrix_norm(mat, nu):
    ws = [gauss_norm(ent, nu) for row in mat for ent in row]
    ws = [w for w in ws if w != INF]
    return min(ws) if ws else INF


def convergence_bound(ode, nu=0):
    """nu_tilde with rho_tilde = r_exp * min(rho, min_i (|a_i|/|a_r|)^(1/(i-r)))."""
    nu = Fraction(nu.nu if isinstance(nu, GaussRadius) else nu)
    p = ode.K.p
    if isinstance(ode, SystemODESpec):
        lead = ode.Q
        if not _leading_invertible(lead, nu):
            raise LeadingCoefficientVanishes("Q has a root inside the disk")
        wr = gauss_norm(lead, nu)
        wp = _matrix_norm(ode.P, nu)
        worst = nu if wp == INF else max(nu, wr - wp)
        return GaussRadius(Fraction(1, p - 1) + worst)
    r = ode.r
    ar = ode.coeffs[r]
    if not _leading_invertible(ar, nu):
        raise LeadingCoefficientVanishes("a_r has a root inside the disk")
    wr = gauss_norm(ar, nu)
    worst = nu
    for i in range(r):
        wi = gauss_norm(ode.coeffs[i], nu)
        if wi == INF:
            continue
        worst = max(worst, Fraction(wr - wi) / (r - i))
    return GaussRadius(Fraction(1, p - 1) + worst)


@dataclass
class AnalyticContext:
    """An ODE with a disk rho = p^(-nu) on which the fundamental matrix at 0
    converges with entries of Gauss norm at most M = p^M_log.

    ``nu_tilde`` is the radius exponent used for the recentred steps; it
    defaults to :func:`convergence_bound` at ``nu``.
    """

    ode: object
    nu: Fraction
    M_log: Fraction = Fraction(0)
    nu_tilde: Fraction = None

    def __post_init__(self):
        self.nu = Fraction(self.nu)
        self.M_log = Fraction(self.M_log)
        if self.nu_tilde is None:
            self.nu_tilde = convergence_bound(self.ode, self.nu).nu
        self.nu_tilde = Fraction(self.nu_tilde)

    @property
    def rho(self):
        return GaussRadius(self.nu)

    @property
    def rho_tilde(self):
        return GaussRadius(self.nu_tilde)

    @property
    def M_tilde_log(self):
        return self.M_log


def default_context(ode, nu=0):
    """Context whose bounds come from the a priori estimate alone.

    The basis solutions at any centre in the disk rho = p^(-nu) converge on
    rho_tilde, and their i-th Taylor rows have Gauss norm at most
    rho_tilde^(-i); that gives M = rho_tilde^(-(r-1)).
    """
    nt = convergence_bound(ode, nu).nu
    order = 1 if isinstance(ode, SystemODESpec) else ode.r
    return AnalyticContext(ode, nt, (order - 1) * nt, nt)


def taylor_shift(a, xi):
    """a(xi + t) for a polynomial given as an ascending coefficient list."""
    n = len(a)
    if n <= 1 or not _nonzero(xi):
        return list(a)
    if n <= 8:
        # Horner on the shifted polynomial
        out = [a[-1]]
        for c in reversed(a[:-1]):
            new = [0] * (len(out) + 1)
            for k, x in enumerate(out):
                new[k] = new[k] + x * xi
                new[k + 1] = new[k + 1] + x
            new[0] = new[0] + c
            out = new
        return [_fix(x, a[0]) for x in out]
    h = n // 2
    lo = taylor_shift(a[:h], xi)
    hi = taylor_shift(a[h:], xi)
    # (xi + t)^h by binomial expansion
    binom = [math.comb(h, k) for k in range(h + 1)]
    xpow = [1]
    for _ in range(h):
        xpow.append(xpow[-1] * xi)
    base = [xpow[h - k] * binom[k] for k in range(h + 1)]
    prod = [0] * (len(hi) + h)
    for i, x in enumerate(hi):
        if not _nonzero(x):
            continue
        for j, y in enumerate(base):
            prod[i + j] = prod[i + j] + x * y
    out = [0] * max(len(prod), len(lo))
    for i, x in enumerate(lo):
        out[i] = out[i] + x
    for i, x in enumerate(prod):
        out[i] = out[i] + x
    return [_fix(x, a[0]) for x in out]


def _nonzero(x):
    if isinstance(x, ExactElement):
        return any(x.c)
    return bool(x)


def _fix(x, like):
    # keep plain ints out of ExactElement-valued polynomials
    if isinstance(like, ExactElement) and not isinstance(x, ExactElement):
        return like.K.from_int(x)
    return x


def _digits(x):
    """Number of base-p digits of the largest coefficient of x."""
    p = x.K.p
    best = 0
    for a in x.c:
        a = abs(int(a))
        k = 0
        while a:
            a //= p
            k += 1
        best = max(best, k)
    return best


def burst_schedule(x, c, sigma):
    """Digit cut points 0, c, 2c, 4c, ... covering every digit of x."""
    K = x.K
    top = max(-(-sigma // K.e), _digits(x))
    cuts = [0, c]
    while cuts[-1] < top:
        cuts.append(cuts[-1] * 2)
    return cuts


def _terms_needed(sigma_p, v, nu, M_log, r):
    """Least N such that every entry's tail past N is below p^(-sigma_p).

    Term n of row i has valuation at least (n - i) (v - nu) - M_log.
    """
    if v <= nu:
        raise DegenerateStep("point outside the radius of convergence")
    need = (Fraction(sigma_p) + M_log) / (v - nu)
    return max(r, _ceil(need) + r)


def _step_matrix(ode, xm, N, sigma):
    if isinstance(ode, SystemODESpec):
        return system_partial_sum(ode, xm, 1, N, sigma)
    return partial_sum_matrix(ode, xm, 1, N, sigma)


def _matmul(A, B):
    n, m, q = len(A), len(B), len(B[0])
    out = []
    for i in range(n):
        row = []
        for j in range(q):
            acc = None
            for k in range(m):
                t = A[i][k] * B[k][j]
                acc = t if acc is None else acc + t
            row.append(acc)
        out.append(row)
    return out


def _identity(K, n, sigma):
    return [[ApproxElement(K, K.one if i == j else K.zero, sigma) for j in range(n)]
            for i in range(n)]


def _as_exact_point(x, sigma):
    if isinstance(x, ApproxElement):
        if x.shift:
            raise OutOfDisk("the point is not integral")
        return x.value
    if isinstance(x, FractionElement):
        if x.den != 1:
            raise OutOfDisk("digit-burst needs a point of O_K^ex")
        return x.num
    return x


def digit_burst_solve(ctx, x, sigma, c=None, steps=None):
    """Phi_0(x) modulo pi^sigma by analytic continuation along slices of x.

    ``c`` overrides the first block length; ``steps`` (a list) receives
    (x_m, N_m, matrix) for every step that was evaluated.
    """
    ode = ctx.ode
    K = ode.K
    x = _as_exact_point(x, sigma)
    order = ode.k if isinstance(ode, SystemODESpec) else ode.r
    vx = valuation(x)
    if vx == INF:
        return FundamentalMatrix(_identity(K, order, sigma), (x, 1), 0, sigma)
    if vx <= ctx.nu:
        raise OutOfDisk("|x| is not smaller than rho")
    nt = ctx.nu_tilde
    if c is None:
        c = max(_ceil(vx), _floor(nt) + 1, 1)
    c = max(int(c), 1)
    if c <= nt:
        raise DegenerateStep("block length too small for the convergence radius")
    cuts = burst_schedule(x, c, sigma)
    extra = max(0, _ceil(ctx.M_log * K.e))
    work = sigma + extra + K.e
    for _attempt in range(6):
        Y = _identity(K, order, work)
        pending = None
        cur = ode
        log = []
        for m in range(len(cuts) - 1):
            xm = slice_digits(x, cuts[m], cuts[m + 1])
            if not any(xm.c):
                continue
            if pending is not None:
                cur = cur.shifted(pending)
            vm = valuation(xm)
            if m == 0:
                N = _terms_needed(Fraction(work, K.e), vm, ctx.nu, ctx.M_log, order)
            else:
                N = _terms_needed(Fraction(work, K.e), vm, nt, (order - 1) * nt, order)
            Phi = _step_matrix(cur, xm, N, work)
            log.append((xm, N, Phi))
            Y = _matmul(Phi.entries, Y)
            pending = xm
        lowest = min(e.prec for row in Y for e in row)
        if lowest >= sigma:
            if steps is not None:
                steps.extend(log)
            out = [[e.with_precision(sigma) for e in row] for row in Y]
            return FundamentalMatrix(out, (x, 1), max((s[1] for s in log), default=0), sigma)
        work += (sigma - lowest) + K.e
    raise PrecisionLoss("could not reach the requested precision")
