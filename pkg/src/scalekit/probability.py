"""Spherical caps, analytic bounds on the probability of scalability, and Monte Carlo.

``P(m, n)`` is the probability that ``m`` independent uniform unit vectors
in R^n form a scalable frame.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np
from scipy import integrate

from .conedist import solve_cone_projection
from .core import _unit_columns, derive_seed, random_unit_frame
from .errors import DomainError
from .scalemeasures import _max_line_gap

__all__ = [
    "CapGeometry",
    "ProbEstimate",
    "cap_relative_area",
    "cap_geometry",
    "covering_bound",
    "exact_prob_2d",
    "prob_bounds",
    "two_cap_upper_bound",
    "monte_carlo_prob",
    "worker_count",
]

QUAD_RTOL = 1e-12


@dataclass(frozen=True)
class CapGeometry:
    n: int
    a: float
    alpha: float
    area_a: float
    area_alpha: float
    covering_bound: float


@dataclass(frozen=True)
class ProbEstimate:
    m: int
    n: int
    trials: int
    hits: int
    estimate: float
    stderr: float
    lower_bound: float
    upper_bound: float
    tol: float
    seed: int
    upper_bound_two_cap: float = 1.0
    min_cone_distance: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def _sin_power_integral(k, r):
    if k == 0:
        return r
    val, _ = integrate.quad(lambda t: math.sin(t) ** k, 0.0, r,
                            epsabs=0.0, epsrel=QUAD_RTOL, limit=200)
    return val


def cap_relative_area(n: int, radius_rad: float) -> float:
    """Fraction of the unit sphere of R^n within angle ``radius_rad`` of a pole."""
    if n < 2:
        raise DomainError("caps need ambient dimension n >= 2")
    if not 0.0 < radius_rad < math.pi:
        raise DomainError("cap radius must lie in (0, pi)")
    k = n - 2
    return _sin_power_integral(k, radius_rad) / _sin_power_integral(k, math.pi)


def _radii(n):
    a = math.acos(1.0 / math.sqrt(n))
    alpha = 0.5 * math.acos(math.sqrt((n - 1) / n))
    return a, alpha


def covering_bound(n: int) -> float:
    """Upper bound on the number of caps of radius ``arccos(1/sqrt n)`` covering the sphere.

    Evaluated as ``3n + 2 + sqrt(n) (n+1) cos(a) A**-2 (1/(2A))**n``, where
    ``A`` is the relative area of such a cap.  It is loose (200 for n = 2,
    where 4 caps suffice) and only ever used as an upper bound.
    """
    if n < 2:
        raise DomainError("covering bound needs n >= 2")
    a, _ = _radii(n)
    area = cap_relative_area(n, a)
    return 3 * n + 2 + math.sqrt(n) * (n + 1) * math.cos(a) * area ** -2 * (0.5 / area) ** n


def cap_geometry(n: int) -> CapGeometry:
    a, alpha = _radii(n)
    return CapGeometry(n=n, a=a, alpha=alpha, area_a=cap_relative_area(n, a),
                       area_alpha=cap_relative_area(n, alpha),
                       covering_bound=covering_bound(n))


def exact_prob_2d(m: int) -> float:
    """Probability that ``m`` random unit vectors in the plane are scalable: ``1 - m / 2**(m-1)``."""
    if m < 2:
        raise DomainError("need m >= 2")
    return float(1 - Fraction(m, 2 ** (m - 1)))


def prob_bounds(m: int, n: int) -> tuple[float, float]:
    """Analytic ``(lower, upper)`` envelope for ``P(m, n)``.

    Returns ``(0, 0)`` below ``m = n(n+1)/2`` where scalability has
    probability zero.
    """
    if m < n * (n + 1) // 2:
        return 0.0, 0.0
    g = cap_geometry(n)
    lower = max(0.0, 1.0 - g.covering_bound * (1.0 - g.area_alpha) ** m)
    upper = 1.0 - (1.0 - g.area_a) ** (m - n)
    return lower, upper


def two_cap_upper_bound(m: int, n: int) -> float:
    """Upper bound ``1 - (1 - 2A)**(m - n)`` on ``P(m, n)``.

    The necessary condition fails for a direction ``d`` when every vector
    avoids both caps around ``d`` and ``-d``, hence the factor 2.  The
    one-cap value returned by :func:`prob_bounds` can undercut the true
    probability: for ``n = 2, m = 4`` it gives 0.4375 against 0.5.
    """
    if m < n * (n + 1) // 2:
        return 0.0
    area = cap_relative_area(n, _radii(n)[0])
    return 1.0 - max(0.0, 1.0 - 2.0 * area) ** (m - n)


def worker_count() -> int:
    """Worker processes to use: ``SCALEKIT_THREADS`` if set, else the CPU count."""
    env = os.environ.get("SCALEKIT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _run_trials(args):
    m, n, tol, seed, start, stop = args
    hits, dmin = 0, math.inf
    for t in range(start, stop):
        if n == 2:
            # same draw as random_unit_frame; the apex test needs no rank check
            a = _unit_columns(np.random.default_rng(derive_seed(seed, t)), m, n)
            hits += int(a is not None and _max_line_gap(a) <= math.pi / 2 + 1e-12)
            continue
        frame = random_unit_frame(m, n, derive_seed(seed, t))
        d = solve_cone_projection(frame).distance
        dmin = min(dmin, d)
        hits += int(d <= tol)
    return hits, dmin


def monte_carlo_prob(m: int, n: int, trials: int, tol: float = 1e-6, seed: int = 0,
                     workers: int | None = None) -> ProbEstimate:
    """Estimate ``P(m, n)`` from ``trials`` independent random frames.

    Trial ``t`` uses the seed ``derive_seed(seed, t)``, so the result does not
    depend on how trials are split across worker processes.  The verdict is
    the exact apex test for ``n == 2`` and ``D <= tol`` otherwise.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    workers = worker_count() if workers is None else max(1, workers)
    workers = min(workers, trials)
    edges = np.linspace(0, trials, workers + 1).astype(int)
    chunks = [(m, n, tol, seed, int(a), int(b)) for a, b in zip(edges[:-1], edges[1:])]
    if workers == 1:
        results = [_run_trials(c) for c in chunks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_trials, chunks))
    hits = sum(h for h, _ in results)
    dmin = min(d for _, d in results)
    p = hits / trials
    lower, upper = prob_bounds(m, n)
    return ProbEstimate(
        m=m, n=n, trials=trials, hits=int(hits), estimate=p,
        stderr=math.sqrt(p * (1.0 - p) / trials), lower_bound=lower, upper_bound=upper,
        tol=tol, seed=seed, upper_bound_two_cap=two_cap_upper_bound(m, n),
        min_cone_distance=None if n == 2 else float(dmin),
    )
