"""Carving a sub-Cantor set with dimension in a prescribed window."""
from cantorlab import extract_subcantor, middle_alpha
from cantorlab.errors import TargetAboveDimension

third = middle_alpha(1 / 3)
res = extract_subcantor(third, 0.3, 0.45)
print(f"block length {res.n}, kept {len(res.kept)} blocks, markers {res.markers}")
print(f"bracket [{res.bracket.d_lower:.6f}, {res.bracket.d_upper:.6f}]")
print("stopping inequalities:", res.recheck())

try:
    extract_subcantor(third, 0.7, 0.8)
except TargetAboveDimension as exc:
    print("refused:", exc)
