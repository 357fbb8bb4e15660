"""Layer 3 timing skeleton: tempo-canon voices and convergence points.

A rational 3:4 canon realigns exactly every three seconds, so its
convergence count ignores the tolerance. An e:pi canon never realigns
exactly; its convergence count scales with the tolerance, which turns the
tolerance into a compositional control for switching density.
"""

import numpy as np

from polycanon import ConvergenceQuery, find_convergences, next_convergence_after, voice_time
from polycanon.presets import rational_canon, transcendental_canon

v1, v2 = rational_canon()
print("3:4 canon voice IOIs:", v1.base_ioi, "s and", v2.base_ioi, "s")
print("first events of each voice:",
      [round(voice_time(v1, k), 2) for k in range(4)],
      [round(voice_time(v2, k), 2) for k in range(4)])

for eps_ms in (10, 20, 50, 100):
    q = ConvergenceQuery(eps_ms / 1000, 30.0, v1, v2)
    events = find_convergences(q)
    print(f"eps={eps_ms:>3} ms -> {len(events)} convergences at "
          f"{[round(e.time, 1) for e in events[:5]]} ...")

q = ConvergenceQuery(0.05, 30.0, v1, v2)
nxt = next_convergence_after(q, 14.0)
print("next convergence after t=14 s:", nxt.time, "s")

w1, w2 = transcendental_canon()
print("\ne:pi canon voice IOIs:", round(w1.base_ioi, 4), "and", round(w2.base_ioi, 4), "s")
eps_grid = np.array([1, 5, 10, 20, 50, 100]) / 1000
counts = [len(find_convergences(ConvergenceQuery(e, 30.0, w1, w2))) for e in eps_grid]
for e, c in zip(eps_grid, counts):
    print(f"eps={1000 * e:>5.0f} ms -> {c:>3} convergences")
print("count grows monotonically with the tolerance:", counts == sorted(counts))
