"""
Partial sums of ODE solutions by binary splitting
==================================================
"""

from padix.field import format_approx, make_field
from padix.recurrence import ODESpec, derive_recurrence, partial_sum_matrix, product_tree

K = make_field(5)

# y' = y as coefficient lists [a_0, a_1] with a_i(t) multiplying y^(i)
EXP = ODESpec.from_rational(K, [[-1], [1]])
rec = derive_recurrence(EXP)
print(rec.s, [len(b) for b in rec.b])   # order and shape of the recurrence

# sum_{n < 60} 5^n / n! modulo 5^40
M = partial_sum_matrix(EXP, 5, 1, 60, 40)
print(format_approx(M[0, 0]))

# a second-order equation: rows are derivatives / i!, columns the basis
airy = ODESpec.from_rational(K, [[0, -1], [0], [1]])   # y'' = t y
M = partial_sum_matrix(airy, 10, 3, 50, 20)   # at t = 10/3
for row in M.entries:
    print(" | ".join(format_approx(e) for e in row))

# the product tree keeps a common denominator d; for y' = y from 1 to 65 it is 64!
T = product_tree(rec, K.one, 1, 1, 65)
print(T.d)
