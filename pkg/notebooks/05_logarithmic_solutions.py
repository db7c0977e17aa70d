"""
Regular singular points: logarithmic bases and polylogarithms
==============================================================
"""

from fractions import Fraction

from padix import elementary as el
from padix.field import ApproxElement, format_approx, make_field
from padix.functions import HypergeomParams, hypergeom_2f1, polylog, polylog_ode
from padix.recurrence import derive_recurrence
from padix.regsing import factor_indicial, indicial_data, regsing_partial_sum

K = make_field(5)

# Li_2 satisfies (1 - t) D^3 y = D^2 y with D = t d/dt
ode = polylog_ode(K, 2)
idata = indicial_data(derive_recurrence(ode))
_, classes = factor_indicial(idata.Q[0])
print([dict(c.shifts) for c in classes])   # exponents 0, 0, 1: logs appear

# a basis of three solutions at t = 25, labelled by exponent and log power
M = regsing_partial_sum(ode, 25, 1, 60, 20)
for lab in M.labels:
    print(lab[1] + lab[2], lab[3])

print(format_approx(polylog(2, 25, 20, p=5)))

# Li_1 is -log(1 - x)
x = ApproxElement(K, K.from_int(25 * 7), 20)
print(polylog(1, x, 20) == -el.log1m(x, 20))

# Gauss 2F1 with non-integral exponent 1 - c at the origin
F = hypergeom_2f1(HypergeomParams(Fraction(1, 3), Fraction(-2, 7), Fraction(3, 2)), 425, 15, p=5)
print(format_approx(F))
