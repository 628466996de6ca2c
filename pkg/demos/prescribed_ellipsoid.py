"""
A frame with a prescribed minimal ellipsoid
===========================================

Any ellipsoid x^T X x <= 1 with trace(X^-1) = n is the minimal ellipsoid of
some unit-norm frame.  Build one, then solve for the ellipsoid again and
compare.
"""
import numpy as np

from scalekit import frame_from_ellipsoid, john_certificate, minimal_ellipsoid

rng = np.random.default_rng(3)
lam = rng.uniform(0.2, 1.0, 5)
lam *= 5 / lam.sum()
q, _ = np.linalg.qr(rng.standard_normal((5, 5)))
x_inv = (q * lam) @ q.T

frame = frame_from_ellipsoid(x_inv, m=8, seed=1)
print("column norms:", np.round(np.linalg.norm(frame.columns, axis=0), 12))

head = frame.columns[:, :5]
print("||sum phi phi^T - X^-1|| on the first five vectors:",
      np.linalg.norm(head @ head.T - x_inv))

ell = minimal_ellipsoid(frame, eta=1e-9)
cert = john_certificate(frame, ell)
print(f"prescribed V {np.sqrt(np.prod(lam)):.10f}, recovered V {ell.volume_ratio:.10f}")
print(f"certificate: reconstruction {cert.reconstruction_residual:.1e}, "
      f"containment {cert.max_containment_violation:.1e}, contact {cert.max_contact_slack:.1e}")
