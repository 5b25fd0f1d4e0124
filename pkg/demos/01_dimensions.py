"""Dimension brackets for a few regular Cantor sets.

Affine sets give the exact answer at every depth; the continued-fraction set
with digits {1, 2} gives nested brackets that close in slowly.
"""
import math

from cantorlab import gauss_digits, middle_alpha, pressure_dimension, two_ratio
from cantorlab.dimension import bracket_sequence

third = middle_alpha(1 / 3)
print("middle third, depth 4:", pressure_dimension(third, 4))
print("log 2 / log 3         =", math.log(2) / math.log(3))

# 2^-d + 4^-d = 1 has the golden-ratio root
print("two_ratio(1/2, 1/4):", pressure_dimension(two_ratio(0.5, 0.25), 3).d_lower,
      " exact:", -math.log2((math.sqrt(5) - 1) / 2))

gauss = gauss_digits([1, 2])
for b in bracket_sequence(gauss, [2, 4, 6, 8]):
    print(f"C(2) depth {b.depth}: [{b.d_lower:.6f}, {b.d_upper:.6f}]  width {b.width:.2e}")
