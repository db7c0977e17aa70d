"""
Exact residues in Q_p and its extensions
=========================================
"""

from padix.field import (ApproxElement, format_approx, format_exact, height, make_field,
                         parse_literal, reduce_mod, slice_digits, valuation)

K = make_field(5)                    # Q_5, e = f = 1
x = K.from_int(137)
print(format_exact(x), valuation(x))  # 137 is a 5-adic unit

# digits of 137 in base 5 are 2, 2, 0, 1; slice keeps digits 1 and 2
print(format_exact(slice_digits(x, 1, 3)))

# reduction keeps a canonical residue and remembers the precision
a = reduce_mod(K.from_int(5 ** 7 + 3 * 5 ** 2), 4)
print(format_approx(a))

# Q_2(sqrt 2): totally ramified, the uniformizer is Y with Y^2 = 2
R = make_field(2, [0, 1], [[-2], [0], [1]])
y = R.Y()
print(valuation(y), valuation(y * y))   # 1/2 and 1
print(format_exact(parse_literal(R, "3 + 5*Y")))

# heights grow at most additively under multiplication
u, w = K.from_int(10 ** 12), K.from_int(7 ** 20)
print(height(u * w) <= height(u) + height(w))

# approximate elements: value known modulo pi^prec
b = ApproxElement(K, K.from_int(1234), 3)
print(format_approx(b))   # 1234 mod 125 = 109
