"""Recognise a copy of the line through its one-point compactification.

A long truncated line is spread out (many points pairwise more than 1
apart) and its compactification passes the circle tests.  The unit
interval is covered by a few balls, so it is rejected before the circle
tests matter.  Finally the tree embedding: along a single infinite-looking
branch the integer images bunch up, across an antichain they stay apart.
"""

from fractions import Fraction as F

from finitop import Resolution, check_real_line
from finitop.line import antichain_tree, embed_p, path_tree
from finitop.spaces import dyadic_interval, truncated_line

res = Resolution(eps_grid=[F(1, 4), F(1, 8)], delta_grid=[F(1, 4), F(1, 8)], n_points=6)

for label, pres in [("[-8, 8] at step 1/16", truncated_line(8, 4)), ("[0, 1]", dyadic_interval(5))]:
    report = check_real_line(pres, res)
    detail = ", ".join(f"{k} {v.status.value}" for k, v in report.verdicts.items())
    print(f"{label}: {report.status.value}  ({detail})")

path, flat = path_tree(200), antichain_tree(200)
step = [embed_p(n, path).sup_dist(embed_p(n + 1, path)) for n in (1, 10, 100, 199)]
print("path tree, |p(n) - p(n+1)| at n = 1, 10, 100, 199:", ", ".join(f"{float(d):.4f}" for d in step))
apart = min(embed_p(i, flat).sup_dist(embed_p(j, flat)) for i in range(1, 40) for j in range(1, i))
print(f"antichain, smallest distance between integer images: {apart}")
