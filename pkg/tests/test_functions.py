import math
import random
from fractions import Fraction

import pytest

from padix import elementary as el
from padix import functions as fn
from padix.errors import BadParameters, MissingInitialData, NoUnitRoot, NotInDomain, NotUnique
from padix.field import ApproxElement, make_field, reduce_mod
from padix.regsing import formal_coefficients

from helpers import fraction
from oracles import approx_matches, mod_fraction, pochhammer_2f1

Q5 = make_field(5)
DWORK_TABLE = {12: 1141554555, 16: 468670851430, 20: 372020184523305}


def naive_polylog(s, x, p, sigma):
    total = Fraction(0)
    i = 0
    while True:
        i += 1
        total += Fraction(x ** i, i ** s)
        if i >= 3 and i * 1 - s * math.log(i + 1, p) > sigma + 1:
            return total


@pytest.mark.parametrize("s", [1, 2, 3])
def test_polylog_oracle(s):
    rng = random.Random(s)
    for _ in range(3):
        x = 5 * rng.randrange(1, 5 ** 15)
        got = fn.polylog(s, x, 20, p=5)
        assert approx_matches(got, naive_polylog(s, x, 5, 20))


def test_polylog_li1_is_log():
    rng = random.Random(9)
    for _ in range(5):
        x = Q5.from_int(25 * rng.randrange(1, 5 ** 30))
        assert fn.polylog(1, x, 30) == -el.log1m(reduce_mod(x, 30), 30)


def test_polylog_edge_cases():
    assert fn.polylog(2, 0, 10, p=5).is_zero()
    with pytest.raises(NotInDomain):
        fn.polylog(2, 3, 10, p=5)
    with pytest.raises(BadParameters):
        fn.polylog_ode(Q5, 0)


def test_hypergeom_oracle():
    params = fn.HypergeomParams(Fraction(1, 2), Fraction(1, 2), 1)
    got = fn.hypergeom_2f1(params, 5, 25, p=5)
    assert approx_matches(got, pochhammer_2f1(Fraction(1, 2), Fraction(1, 2), 1, 5, 400))
    params = fn.HypergeomParams(Fraction(1, 3), Fraction(-2, 7), Fraction(3, 2))
    got = fn.hypergeom_2f1(params, 25 * 17, 20, p=5)
    assert approx_matches(got, pochhammer_2f1(params.a, params.b, params.c, 25 * 17, 200))


def test_hypergeom_geometric():
    rng = random.Random(10)
    params = fn.HypergeomParams(1, 1, 1)
    for _ in range(5):
        x = 5 * rng.randrange(1, 5 ** 20)
        assert approx_matches(fn.hypergeom_2f1(params, x, 25, p=5), Fraction(1, 1 - x))


def test_hypergeom_parameters():
    with pytest.raises(BadParameters):
        fn.HypergeomParams(1, 1, 0)
    with pytest.raises(BadParameters):
        fn.HypergeomParams(1, 1, -3)
    with pytest.raises(BadParameters):
        fn.hypergeom_2f1(fn.HypergeomParams(Fraction(1, 5), 1, 1), 5, 10, p=5)


def test_term_ratio_law():
    params = fn.HypergeomParams(Fraction(1, 3), Fraction(2, 3), Fraction(1, 4))
    ode = fn.hypergeom_ode(Q5, params)
    cols = formal_coefficients(ode, 52)
    analytic = [c for c in cols if c[1] == 0 and c[2] == 0 and c[0].gamma_if_rational() == 0]
    assert len(analytic) == 1
    ys = [fraction(f[0]) for f in analytic[0][3]]
    for i in range(51):
        assert ys[i + 1] / ys[i] == params.term_ratio(i)
    assert fn.hypergeom_coefficients(params, 52) == ys


# -- Gauss-Manin system -------------------------------------------------------

def test_gauss_manin_degrees():
    for p in (3, 5, 7):
        sysode = fn.gauss_manin_ode(p, 1)
        assert len(sysode.Q) - 1 == p + 2
        assert max(len(e) - 1 for row in sysode.P for e in row) == 2 * p + 1
        # the origin is singular
        assert not any(sysode.Q[0].c)


def _poly_from(e):
    return [int(c.c[0]) for c in e]


def _series_solution(Q, P, t0, n):
    """Taylor coefficients at t0 of the solutions of Q Y' = P Y with Y(t0) = e_j."""
    def shift(a):
        out = [Fraction(0)] * len(a)
        for i, c in enumerate(a):
            for k in range(i + 1):
                out[k] += c * math.comb(i, k) * t0 ** (i - k)
        return out
    Qs = shift(Q)
    Ps = [[shift(e) for e in row] for row in P]
    k = len(P)
    sols = []
    for j in range(k):
        Y = [[Fraction(int(i == j)) for i in range(k)]]
        for m in range(n - 1):
            # coefficient of s^m in Q Y' - P Y, solved for Y_{m+1}
            rhs = [Fraction(0)] * k
            for a in range(k):
                for b in range(k):
                    for d, c in enumerate(Ps[a][b]):
                        if d <= m:
                            rhs[a] += c * Y[m - d][b]
                for d in range(1, len(Qs)):
                    if d <= m:
                        rhs[a] -= Qs[d] * (m - d + 1) * Y[m - d + 1][a]
            Y.append([x / (Qs[0] * (m + 1)) for x in rhs])
        sols.append(Y)
    return sols


def test_gauss_manin_vectorization():
    p, c = 5, Fraction(1, 3)
    sysode = fn.gauss_manin_ode(p, c)
    Q = _poly_from(sysode.Q)
    P = [[_poly_from(e) for e in row] for row in sysode.P]
    _, A, B, D = fn.gauss_manin_polys(p, c)
    t0 = 2
    n = 20
    sols = _series_solution(Q, P, t0, n)

    def shift(a):
        return [sum(Fraction(a[i]) * math.comb(i, k) * t0 ** (i - k) for i in range(k, len(a)))
                for k in range(len(a))]
    Ds, As, Bs = shift(D), [[shift(e) for e in row] for row in A], [[shift(e) for e in row] for row in B]
    tt = [Fraction(t0), Fraction(1)]
    for Y in sols:
        M = [[[Y[m][2 * i + j] for m in range(n)] for j in range(2)] for i in range(2)]
        # D t M' + (DA) M - p M (DB) vanishes below degree n - deg
        for i in range(2):
            for j in range(2):
                deriv = [(m + 1) * M[i][j][m + 1] for m in range(n - 1)]
                total = fn._pmul(fn._pmul(Ds, tt), deriv)
                for k in range(2):
                    total = fn._padd(total, fn._pmul(As[i][k], M[k][j]))
                    total = fn._padd(total, fn._pscale(fn._pmul(M[i][k], Bs[k][j]), -p))
                assert all(x == 0 for x in total[:n - 2 * p - 4])


# -- unit eigenvectors --------------------------------------------------------

def _mat(rows, s=20):
    return [[ApproxElement(Q5, Q5.from_int(x), s) for x in row] for row in rows]


def test_unit_eigenvector_examples():
    (v1, v2), lam = fn.unit_eigenvector(_mat([[3, 0], [0, 5]]), 20)
    assert v2.is_zero() and v1 == ApproxElement(Q5, Q5.one, 20)
    assert lam == ApproxElement(Q5, Q5.from_int(3), 20)
    # S diag(2, 5) S^-1 with S = [[1, 1], [3, 1]] has unit eigenvector (1, 3)
    Sinv_det = -2
    M = [[Fraction(1 * 2 * 1 - 1 * 5 * 3, Sinv_det), Fraction(-1 * 2 * 1 + 1 * 5 * 1, Sinv_det)],
         [Fraction(3 * 2 * 1 - 1 * 5 * 3, Sinv_det), Fraction(-3 * 2 * 1 + 1 * 5 * 1, Sinv_det)]]
    m = 5 ** 20
    (v1, v2), lam = fn.unit_eigenvector(_mat([[mod_fraction(x, m) for x in row] for row in M]), 20)
    assert v1 == ApproxElement(Q5, Q5.from_int(mod_fraction(Fraction(1, 3), m)), 20)
    assert lam == ApproxElement(Q5, Q5.from_int(2), 20)
    with pytest.raises(NoUnitRoot):
        fn.unit_eigenvector(_mat([[5, 0], [0, 25]]), 20)
    with pytest.raises(NotUnique):
        fn.unit_eigenvector(_mat([[1, 0], [0, 2]]), 20)


# -- Dwork log-derivative -----------------------------------------------------

def test_dwork_context_validation():
    with pytest.raises(NotInDomain):
        fn.DworkContext(5, 5)
    with pytest.raises(NotInDomain):
        fn.DworkContext(5, 6)
    ctx = fn.DworkContext(5, 243)
    assert int(ctx.x0.c[0]) == 3 and ctx.twist == Fraction(1, 81)
    with pytest.raises(MissingInitialData):
        fn.dwork_log_derivative(ctx, 12)


def test_truncation_oracle_matches_reference_values():
    # Dwork's congruences: the truncation to p^k terms is right modulo p^k
    for k in range(1, 8):
        got = fn.dwork_truncation(243, 5, k)
        assert all(got == v % 5 ** k for v in DWORK_TABLE.values())


def test_dwork_stage_two_reproduces_reference_digits():
    k = 8
    f3 = fn.dwork_truncation(3, 5, k)
    ctx = fn.DworkContext(5, 243, f0=f3)
    got = fn.dwork_log_derivative(ctx, k)
    assert int(got.value.c[0]) == DWORK_TABLE[12] % 5 ** k


def test_dwork_schedule_coherence_with_f0():
    f3 = fn.dwork_truncation(3, 5, 8)
    for x in (243, 3 + 5 ** 3 * 17, 2 + 5 * 1234567):
        ctx = fn.DworkContext(5, x, f0=f3)
        a = fn.dwork_log_derivative(ctx, 8)
        b = fn.dwork_log_derivative(ctx, 8, c=2)
        assert a == b


def test_frobenius_init_loading():
    data = {"matrix": [["1", "0"], ["0", "5"]], "base_point": "3", "precision": 10}
    init = fn.load_frobenius_init(data, Q5)
    assert init.precision == 10 and init.base_point == Q5.from_int(3)
    with pytest.raises(NotInDomain):
        fn.load_frobenius_init({"matrix": [["1/5", "0"], ["0", "5"]], "base_point": "3",
                                "precision": 10}, Q5)
