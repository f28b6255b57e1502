"""Collapsing tendrils versus tendrils that never collapse.

With a trigger at every stage the first tendril is folded into the main
line again and again, and local connectedness survives at every probed
scale.  Without triggers the tendrils stay, and small balls near their
attachment split into pieces when eps shrinks.
"""

import time
from fractions import Fraction as F

from finitop import Resolution, WTable, build_net, check_lc, replay, run_stages
from finitop.tendrils import check_stage_invariants, state_presentation

res = Resolution(eps_grid=[F(1, 8), F(1, 16), F(1, 32), F(1, 64)], delta_grid=[F(1, 8), F(1, 16), F(1, 32)], n_points=8)

for label, table in [("trigger every stage", WTable({1: set(range(10))})), ("no triggers", WTable())]:
    start = time.perf_counter()
    history = run_stages(table, 10, keep_history=True)
    audit_ok = all(check_stage_invariants(s).ok for s in history)
    net = build_net(state_presentation(history[-1]), len(history[-1].points))
    v = check_lc(net, res)
    print(f"{label}: {net.n} points, invariants {'ok' if audit_ok else 'BROKEN'}, LC {v.status.value}"
          f" ({time.perf_counter() - start:.1f}s)")
    if v.witness.get("splits"):
        split = v.witness["splits"][0]
        print(f"  ball at point {v.witness['center']} radius {v.witness['r']} splits at eps {split['finer']}")
        print(f"  replay: {replay(net, v).value}")
