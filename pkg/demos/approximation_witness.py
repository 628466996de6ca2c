"""
A nearby scalable frame
=======================

Straightening the contact vectors of the minimal ellipsoid gives a scalable
frame close to the original.  Its distance is bounded by
sqrt(K N (1 - V^(2/N))).  Moving (1 - V^(2/N)) outside the square root
gives a smaller number that is not a valid bound, as the last column shows.
"""
import numpy as np

from scalekit import approximate_scalable, random_unit_frame, solve_cone_projection

print(f"{'seed':>4} {'D':>8} {'V':>8} {'error':>8} {'bound':>8} {'no-root':>8}")
shown = seed = 0
while shown < 10:
    frame = random_unit_frame(7, 3, seed)
    seed += 1
    if solve_cone_projection(frame).distance < 1e-6:
        continue
    ap = approximate_scalable(frame, eta=1e-9)
    print(f"{seed - 1:4d} {solve_cone_projection(frame).distance:8.4f} {ap.volume_ratio:8.4f} "
          f"{ap.frobenius_error:8.4f} {ap.upper_bound:8.4f} {ap.mid_bound:8.4f}")
    assert ap.approx_cone_distance < 1e-6
    shown += 1

norms = np.linalg.norm(ap.approx_frame[:, ap.active_set], axis=0)
print(f"\nstraightened columns have norm V^(1/3) = {ap.volume_ratio ** (1 / 3):.4f}:",
      np.round(norms, 4))
