"""Limit geometries of the continued-fraction set C(2).

The normalized deep compositions converge geometrically.  Two different tails
ending in the same digit give maps whose transfer map has a nonzero D log D,
which is the nonlinearity an affine set cannot have.
"""
import numpy as np

from cantorlab import gauss_digits, h_prime_one_profile, two_ratio
from cantorlab.limit_geometry import equispaced_grid, residual_sequence

gauss = gauss_digits([1, 2])
depths = list(range(4, 15))
res = residual_sequence(gauss, (1,) * 18, depths, step=2)
for n, r, r2 in zip(depths, res, res[2:]):
    print(f"n={n:2d}  residual {r:.3e}  ratio to n+2 {r2 / r:.4f}")

grid = equispaced_grid(gauss, 1, 50)
prof = h_prime_one_profile(gauss, (1,) * 20, (1,) * 18 + (2, 1), grid, depth=12)
print("C(2): max |D log D| =", round(prof.max_abs, 5))
print("values at a few points:", np.round(prof.values[::10], 4))

affine = h_prime_one_profile(two_ratio(0.4, 0.3), (0, 1) * 8, (1, 1) * 8, depth=12)
print("affine: max |D log D| =", affine.max_abs)
