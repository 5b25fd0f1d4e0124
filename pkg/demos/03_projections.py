"""Overlap counts of projected rectangles and images under x + s·y.

For the middle-third pair d + d' exceeds 1, so the overlap integral grows
faster than ρ^-(d+d'); the perturbed pair with d + d' near 0.8 follows the
ρ^-(d+d') law, and its sums have box dimension close to 0.8 for most s.
"""
import math

import numpy as np

from cantorlab import integral_estimate, middle_alpha, perturbed, two_ratio
from cantorlab.marstrand import as_arrays, count_overlaps, delta_rectangles
from cantorlab.sum_image import Sum, dimension_scan, j_r_grid

third = middle_alpha(1 / 3)
pert = perturbed(two_ratio(0.1907, 0.1907), 0.05)

for name, system in (("middle third", third), ("perturbed, d~0.4", pert)):
    rhos = [3.0**-k for k in range(2, 7)]
    vals = [integral_estimate(as_arrays(delta_rectangles((system, system), r)), 4.0) for r in rhos]
    slope = np.polyfit(np.log(rhos), np.log(vals), 1)[0]
    print(f"{name}: fitted exponent {slope:.3f}")

rects = as_arrays(delta_rectangles((third, third), 1 / 27, 1.0))
print("N at s=1 vs s=sqrt(2):", count_overlaps(rects, 1.0), count_overlaps(rects, math.sqrt(2)))

rows = dimension_scan(Sum, j_r_grid(4, 12), (pert, pert), [2.0**-k for k in range(6, 15)], 0.8)
for r in rows:
    print(f"s={r.s:+.3f}  slope {r.slope:.3f}{'  <- flagged' if r.flagged else ''}")
