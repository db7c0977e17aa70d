"""
Logarithm, exponential, powers and Artin-Hasse
===============================================
"""

from fractions import Fraction

from padix import elementary as el
from padix.field import ApproxElement, format_approx, make_field

K = make_field(5)
sigma = 40

x = ApproxElement(K, K.from_int(5 * 123456789), sigma)
lg = el.log1m(x, sigma)          # log(1 - x)
print(format_approx(lg))

# exp undoes the logarithm on the disk where both converge
print(el.exp(lg, sigma) == (1 - x).with_precision(sigma))

# rational powers of 1 + x; the square root squares back
h = el.pow(1 + x, Fraction(1, 2), sigma)
print(h * h == (1 + x).with_precision(sigma))

# Artin-Hasse has integral coefficients, so it converges on the whole open disk
print([str(c) for c in el.artin_hasse_coefficients(5, 8)])
print(format_approx(el.artin_hasse(x, sigma)))

# the splitting of 1 - x into factors with growing valuation
dec = el.log_factor_decompose(x, sigma)
print(len(dec.factors), "factors")

# Q_2(sqrt 2): exp needs val(x) > 1, i.e. three powers of the uniformizer
R = make_field(2, [0, 1], [[-2], [0], [1]])
z = ApproxElement(R, R.from_coeffs([0, 2]), 60)   # 2 Y, valuation 3/2
print(format_approx(el.exp(z, 60)))
