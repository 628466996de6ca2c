"""
Two vectors in the plane
========================

The frame {(cos t, sin t), (cos t, -sin t)} is scalable only at t = pi/4.
Its minimal ellipsoid and cone distance have closed forms, which makes it a
convenient first look at the two measures.
"""
import math

import numpy as np

from scalekit import UnitNormFrame, analyze, minimal_ellipsoid, solve_cone_projection

print(f"{'t':>8} {'V':>10} {'sin 2t':>10} {'D':>10} {'closed form':>12}")
for t in np.linspace(0.1, math.pi / 4, 8):
    frame = UnitNormFrame(np.array([[math.cos(t)] * 2, [math.sin(t), -math.sin(t)]]))
    v = minimal_ellipsoid(frame, eta=1e-9).volume_ratio
    d = solve_cone_projection(frame).distance
    s = math.sin(2 * t)
    print(f"{t:8.4f} {v:10.6f} {s:10.6f} {d:10.6f} {math.sqrt(2 - 2 / (2 - s * s)):12.6f}")

# the ellipsoid touches both vectors: X^-1 = phi_1 phi_1^T + phi_2 phi_2^T
t = math.pi / 8
frame = UnitNormFrame(np.array([[math.cos(t)] * 2, [math.sin(t), -math.sin(t)]]))
ell = minimal_ellipsoid(frame, eta=1e-9)
print("\nX^-1 at t = pi/8:\n", np.round(ell.x_inv, 8))
print("John weights:", np.round(ell.rho, 8))

report = analyze(frame)
print(f"\nverdict: scalable={report.scalable} via {report.certificate.value}")
print(f"d is at most {report.d_phi_upper:.4f}; the lower bound needs d < 1, so it reads "
      f"{report.d_phi_lower}")
