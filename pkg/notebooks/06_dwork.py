"""
The Dwork log-derivative of 2F1(1/2, 1/2; 1; t)
================================================
"""

from padix.field import format_approx
from padix.functions import DworkContext, dwork_log_derivative, dwork_truncation

p = 5
x = 3 ** p   # the argument 243

# truncating the series of F'/F to p^k terms is right modulo p^k
for k in range(1, 6):
    print(k, dwork_truncation(x, p, k))

# continue from the first digit x0 = 3; the value there comes from a truncation
f3 = dwork_truncation(3, p, 8)
ctx = DworkContext(p, x, f0=f3)
f = dwork_log_derivative(ctx, 8)
print(format_approx(f))

# the continuation does not depend on the block schedule
print(dwork_log_derivative(ctx, 8, c=2) == f)
