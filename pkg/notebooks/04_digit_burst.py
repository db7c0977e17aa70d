"""
Analytic continuation along the digits of the argument
=======================================================
"""

from padix.analytic import burst_schedule, convergence_bound, default_context, digit_burst_solve
from padix.field import ApproxElement, format_approx, make_field, reduce_mod
from padix.recurrence import ODESpec

K = make_field(5)
GEOM = ODESpec.from_rational(K, [[-1], [1, -1]])    # (1 - t) y' = y, y = 1/(1 - t)

# radius of convergence bound from Gauss norms of the coefficients
print(convergence_bound(GEOM, 0))

x = K.from_int(5 * 31415926535897932384626)
ctx = default_context(GEOM)
print(burst_schedule(x, 2, 60))   # digit blocks of growing length

steps = []
Phi = digit_burst_solve(ctx, x, 60, steps=steps)
print(format_approx(Phi[0, 0]))
for xm, N, _ in steps:
    print("step with", N, "terms")

# same value as 1/(1 - x)
print((Phi[0, 0] * (1 - reduce_mod(x, 60))).with_precision(60) == ApproxElement(K, K.one, 60))
