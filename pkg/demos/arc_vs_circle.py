"""Tell an arc from a circle at a fixed resolution, then replay the evidence."""

from fractions import Fraction as F

from finitop import Resolution, build_net, check_ord, classify_arc, classify_circle, replay
from finitop.spaces import dyadic_interval, rational_circle

res = Resolution(eps_grid=[F(1, 4), F(1, 8)], delta_grid=[F(1, 4), F(1, 8)], n_points=8)
line_res = Resolution(eps_grid=[F(1, 4), F(1, 8), F(1, 16)], delta_grid=[F(1, 4), F(1, 8)], n_points=8)

interval = build_net(dyadic_interval(6), 65)
circle = build_net(rational_circle(64), 64)

print("unit interval as an arc:")
for name, v in classify_arc(interval, line_res).items():
    print(f"  {name:7s}{v.status.value}")

print("64 points on the unit circle as a circle:")
for name, v in classify_circle(circle, res).items():
    print(f"  {name:7s}{v.status.value}")

# the circle has no linear order: every arrangement of some triple is short-circuited
v = check_ord(circle, res)
print(f"order test on the circle: {v.status.value}, triple {v.witness['triple']}")
print(f"replaying the stored paths gives {replay(circle, v).value}")
