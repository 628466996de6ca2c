"""
How likely is a random frame to be scalable?
============================================

In the plane the answer is exact, 1 - m / 2^(m-1).  In higher dimensions
only bounds are known, and below m = n(n+1)/2 the probability is zero.
"""
from scalekit.probability import (
    cap_geometry,
    exact_prob_2d,
    monte_carlo_prob,
    prob_bounds,
    two_cap_upper_bound,
)

print("plane, 20000 trials each")
for m in range(3, 9):
    est = monte_carlo_prob(m, 2, 20_000, seed=m)
    print(f"  m={m}: exact {exact_prob_2d(m):.4f}  simulated {est.estimate:.4f} "
          f"+- {est.stderr:.4f}  one-cap bound {prob_bounds(m, 2)[1]:.4f}  "
          f"two-cap bound {two_cap_upper_bound(m, 2):.4f}")
# the one-cap bound falls below the exact value from m = 4 on

g = cap_geometry(3)
print(f"\ncaps in R^3: a={g.a:.4f}, alpha={g.alpha:.4f}, "
      f"areas {g.area_a:.4f} / {g.area_alpha:.5f}, covering bound {g.covering_bound:.1f}")

print("\nR^3, 1000 trials each")
for m in (5, 6, 8, 10, 14, 20):
    est = monte_carlo_prob(m, 3, 1000, seed=m)
    lo, hi = prob_bounds(m, 3)
    print(f"  m={m:>2}: {est.estimate:.3f} +- {est.stderr:.3f}   envelope [{lo:.3f}, {hi:.3f}]")
