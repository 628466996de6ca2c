"""Combined scalability report, d-bounds, scalable approximation and minimax test.

``d`` denotes the Frobenius distance from a frame to the set of scalable
frames.  It is not computable directly; it is bracketed below by a function
of the cone distance ``D`` and above by a function of the volume ratio ``V``
of the minimal ellipsoid.
"""
from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass

import numpy as np

from .conedist import solve_cone_projection
from .core import UnitNormFrame
from .errors import DimensionError
from .mvee import DEFAULT_ETA, minimal_ellipsoid

__all__ = [
    "Certificate",
    "ScalabilityReport",
    "ApproximationResult",
    "MinimaxEstimate",
    "analyze",
    "is_scalable_2d_exact",
    "approximate_scalable",
    "minimax_coherence",
    "k_active",
    "vd_envelope",
    "d_bounds",
    "report_to_dict",
]

DEFAULT_TOL = 1e-6
SANDWICH_SLACK = 1e-5


class Certificate(str, enum.Enum):
    CONE_ZERO = "ConeZero"
    VOLUME_ONE = "VolumeOne"
    UNITARY_M_BY_N = "UnitaryMbyN"
    APEX_2D = "Apex2D"
    NECESSARY_VIOLATED = "NecessaryViolated"
    UNDETERMINED = "Undetermined"


@dataclass(frozen=True)
class ScalabilityReport:
    n: int
    m: int
    d_phi_lower: float
    d_phi_upper: float
    cone_distance: float
    volume_ratio: float
    scalable: bool
    certificate: Certificate
    k_active: int
    omega: float
    tol: float
    eta: float
    qp_tol: float
    d_hypothesis_holds: bool
    vd_lower: float
    vd_upper: float
    sandwich_ok: bool
    cone_verdict: bool
    minimax_value: float | None = None


@dataclass(frozen=True, eq=False)
class ApproximationResult:
    """Scalable frame built from the minimal ellipsoid.

    ``approx_frame`` is a plain ``n x m`` array: rescaled columns have norm
    ``V**(1/n)`` rather than 1, and normalising them would break the error
    bounds.
    """

    approx_frame: np.ndarray
    frobenius_error: float
    bound: float
    mid_bound: float
    upper_bound: float
    cone_bound: float
    active_set: np.ndarray
    scaling: np.ndarray
    volume_ratio: float
    approx_cone_distance: float

    @property
    def mid_bound_holds(self) -> bool:
        return self.frobenius_error <= self.mid_bound + 1e-8


@dataclass(frozen=True, eq=False)
class MinimaxEstimate:
    """Sampled upper estimate of ``min_{|d|=1} max_i |<d, phi_i>|``."""

    value: float
    direction: np.ndarray
    samples: int
    is_upper_bound: bool = True

    def certifies_not_scalable(self, n: int) -> bool:
        return self.value < 1.0 / math.sqrt(n) - 1e-9

    def sufficient_heuristic(self, n: int) -> bool:
        """Whether the sufficient-condition threshold looks satisfied.

        Never a certificate: the estimate bounds the minimax from above.
        """
        return self.value >= math.sqrt((n - 1) / n)


def k_active(m: int, n: int) -> int:
    return min(m, n * (n + 1) // 2)


def vd_envelope(d: float, n: int) -> tuple[float, float]:
    """Bounds on ``V**(4/n)`` in terms of the cone distance ``d``.

    The lower bound is informative only for ``d < 1`` (it is non-positive
    otherwise).
    """
    d2 = d * d
    lower = n * (1.0 - d2) / (n - d2)
    upper = n * (n - 1 - d2) / ((n - 1) * (n - d2)) if n > 1 else 1.0
    return lower, upper


def d_bounds(cone_distance: float, volume_ratio: float, m: int, n: int):
    """Return ``(lower, upper, omega, hypothesis_holds)`` for the distance ``d``.

    The lower bound assumes ``d < 1``; it is reported as 0 when the upper
    bound does not guarantee that.
    """
    k = k_active(m, n)
    upper = math.sqrt(max(0.0, k * n * (1.0 - volume_ratio ** (2.0 / n))))
    omega = cone_distance + math.sqrt(k)
    holds = upper < 1.0
    if holds:
        dd = cone_distance
        lower = dd / (omega + math.sqrt(max(0.0, omega * omega - dd * dd)))
        lower = min(lower, upper)
    else:
        lower = 0.0
    return lower, upper, omega, holds


def is_scalable_2d_exact(frame) -> bool:
    """Exact scalability test in the plane.

    The frame is scalable iff the narrowest double cone containing all
    ``+-phi_i`` has apex angle at least pi/2, i.e. iff no gap between
    consecutive line directions (angles mod pi) exceeds pi/2.
    """
    a = np.asarray(frame.columns if isinstance(frame, UnitNormFrame) else frame, dtype=float)
    if a.shape[0] != 2:
        raise DimensionError("the apex test needs vectors in R^2")
    return _max_line_gap(a) <= math.pi / 2 + 1e-12


def _max_line_gap(a):
    theta = np.arctan2(a[1], a[0])
    theta %= math.pi
    theta.sort()
    gap = theta[0] + math.pi - theta[-1]
    return max(gap, float(np.diff(theta).max())) if theta.size > 1 else gap


def _sphere_directions(rng, n, k):
    g = rng.standard_normal((n, k))
    return g / np.linalg.norm(g, axis=0)


def minimax_coherence(frame, num_samples: int = 10_000, refine_iters: int = 100,
                      seed=0) -> MinimaxEstimate:
    """Estimate ``min_{|d|=1} max_i |<d, phi_i>|`` from above.

    Uniform random directions are scored and the best one is refined by
    normalised subgradient steps of length ``s0 / k`` on the sphere, where
    ``s0`` is the typical spacing of the samples.  A value below
    ``1/sqrt(n)`` certifies that the frame is not scalable.
    """
    if num_samples < 1:
        raise ValueError("num_samples must be >= 1")
    a = np.asarray(frame.columns if isinstance(frame, UnitNormFrame) else frame, dtype=float)
    n = a.shape[0]
    rng = np.random.default_rng(seed)
    best_val, best_d = math.inf, None
    for start in range(0, num_samples, 8192):
        dirs = _sphere_directions(rng, n, min(8192, num_samples - start))
        vals = np.abs(a.T @ dirs).max(axis=0)
        i = int(np.argmin(vals))
        if vals[i] < best_val:
            best_val, best_d = float(vals[i]), dirs[:, i].copy()
    if n > 1:
        s0 = num_samples ** (-1.0 / (n - 1))
        d = best_d.copy()
        for k in range(1, refine_iters + 1):
            ip = a.T @ d
            i = int(np.argmax(np.abs(ip)))
            g = math.copysign(1.0, ip[i]) * a[:, i]
            g = g - (g @ d) * d
            gn = np.linalg.norm(g)
            if gn == 0.0:
                break
            d = d - (s0 / k) * g / gn
            d /= np.linalg.norm(d)
            val = float(np.abs(a.T @ d).max())
            if val < best_val:
                best_val, best_d = val, d.copy()
    best_d.flags.writeable = False
    return MinimaxEstimate(value=best_val, direction=best_d, samples=num_samples)


def analyze(frame: UnitNormFrame, tol: float = DEFAULT_TOL, eta: float = DEFAULT_ETA,
            qp_tol: float = 1e-10, necessary_samples: int = 2000) -> ScalabilityReport:
    """Scalability verdict with supporting measures.

    The verdict is ``cone_distance <= tol`` with certificate ``ConeZero``.
    A "scalable" cone verdict not matched by ``volume_ratio >= 1 - 10 tol``,
    or a pair ``(D, V)`` outside the V-D envelope by more than 1e-5, gives
    ``Undetermined``.  For ``n == 2`` the exact apex test overrides the
    verdict (certificate ``Apex2D`` whenever it says "not scalable" or
    disagrees).  For ``m == n`` the unitarity test ``||Phi^T Phi - I||_F <=
    tol`` must agree with the cone test, else ``Undetermined``; a negative
    unitarity test is reported as ``UnitaryMbyN``.  Remaining negative
    verdicts run the necessary-condition estimator with
    ``necessary_samples`` directions (0 disables it) and switch to
    ``NecessaryViolated`` when it certifies.

    Parameters
    ----------
    frame : UnitNormFrame
    tol : float
        Verdict threshold in (0, 1e-4].
    eta : float
        Ellipsoid solver tolerance.
    qp_tol : float
        KKT tolerance of the cone projection.
    """
    if not 0.0 < tol <= 1e-4:
        raise ValueError("tol must lie in (0, 1e-4]")
    n, m = frame.n, frame.m
    fit = solve_cone_projection(frame, tol=qp_tol)
    ell = minimal_ellipsoid(frame, eta=eta)
    dist, vol = fit.distance, ell.volume_ratio
    lower, upper, omega, holds = d_bounds(dist, vol, m, n)
    vd_lo, vd_hi = vd_envelope(dist, n)
    v4 = vol ** (4.0 / n)
    sandwich_ok = dist >= 1.0 or (vd_lo - SANDWICH_SLACK <= v4 <= vd_hi + SANDWICH_SLACK)
    cone_verdict = dist <= tol

    minimax = None
    scalable = cone_verdict
    cert = Certificate.CONE_ZERO
    if cone_verdict and (vol < 1.0 - 10.0 * tol or not sandwich_ok):
        scalable, cert = False, Certificate.UNDETERMINED
    elif not sandwich_ok:
        cert = Certificate.UNDETERMINED
    if n == 2:
        exact = is_scalable_2d_exact(frame)
        if exact != scalable or not exact:
            scalable, cert = exact, Certificate.APEX_2D
    elif m == n:
        g = frame.columns.T @ frame.columns
        unitary = bool(np.linalg.norm(g - np.eye(n), "fro") <= tol)
        if unitary != scalable:
            scalable, cert = False, Certificate.UNDETERMINED
        elif not unitary:
            cert = Certificate.UNITARY_M_BY_N
    if not scalable and necessary_samples and cert is Certificate.CONE_ZERO:
        est = minimax_coherence(frame, num_samples=necessary_samples, refine_iters=50)
        minimax = est.value
        if est.certifies_not_scalable(n):
            cert = Certificate.NECESSARY_VIOLATED

    return ScalabilityReport(
        n=n, m=m, d_phi_lower=lower, d_phi_upper=upper, cone_distance=dist,
        volume_ratio=vol, scalable=bool(scalable), certificate=cert,
        k_active=k_active(m, n), omega=omega, tol=tol, eta=eta, qp_tol=qp_tol,
        d_hypothesis_holds=holds, vd_lower=vd_lo, vd_upper=vd_hi,
        sandwich_ok=bool(sandwich_ok), cone_verdict=bool(cone_verdict),
        minimax_value=minimax,
    )


def report_to_dict(report: ScalabilityReport) -> dict:
    out = asdict(report)
    out["certificate"] = report.certificate.value
    return out


def _relative_bound(d, k, n):
    # valid when d <= 1 / (2 (1 + sqrt K)); increasing in d
    q = (1.0 - d) ** 4
    inner = n * (q - 4 * k * d * d) / (n * q - 4 * k * d * d)
    return math.sqrt(k * n) * math.sqrt(max(0.0, 1.0 - math.sqrt(max(0.0, inner))))


def approximate_scalable(frame: UnitNormFrame, eta: float = DEFAULT_ETA) -> ApproximationResult:
    """Scalable approximation obtained by straightening the contact vectors.

    Columns with positive John weight are replaced by ``V**(1/n) X^{1/2} phi_i``
    and the others are kept; with weights ``rho_i / V**(2/n)`` the new
    columns form a Parseval frame.  The John weights are first reduced to at
    most ``n(n+1)/2`` positive entries.

    Returns
    -------
    ApproximationResult
        ``upper_bound`` is ``sqrt(K n (1 - V**(2/n)))``; ``mid_bound`` is
        ``sqrt(K n) (1 - V**(2/n))``; ``cone_bound`` is the same estimate
        expressed through the cone distance (``nan`` when ``D >= 1``);
        ``bound`` is the estimate in terms of ``d`` evaluated at the upper
        bound on ``d`` (``nan`` outside its range of validity).
    """
    n, m = frame.n, frame.m
    ell = minimal_ellipsoid(frame, eta=eta, sparsify=True)
    vol = ell.volume_ratio
    w, q = np.linalg.eigh(ell.x)
    x_half = (q * np.sqrt(w)) @ q.T
    active = np.flatnonzero(ell.rho > 0)
    a = np.array(frame.columns)
    scale = vol ** (1.0 / n)
    a[:, active] = scale * (x_half @ frame.columns[:, active])
    scaling = np.zeros(m)
    scaling[active] = ell.rho[active] / scale ** 2
    err = float(np.linalg.norm(a - frame.columns, "fro"))

    k = k_active(m, n)
    v2 = vol ** (2.0 / n)
    upper = math.sqrt(max(0.0, k * n * (1.0 - v2)))
    mid = math.sqrt(k * n) * (1.0 - v2)
    dist = solve_cone_projection(frame).distance
    if dist < 1.0:
        lo, _ = vd_envelope(dist, n)
        cone_bound = math.sqrt(max(0.0, k * n * (1.0 - math.sqrt(max(0.0, lo)))))
    else:
        cone_bound = math.nan
    d_up = upper
    bound = _relative_bound(d_up, k, n) if d_up <= 0.5 / (1.0 + math.sqrt(k)) else math.nan

    approx_dist = solve_cone_projection(UnitNormFrame(a)).distance
    for arr in (a, active, scaling):
        arr.flags.writeable = False
    return ApproximationResult(
        approx_frame=a, frobenius_error=err, bound=bound, mid_bound=mid,
        upper_bound=upper, cone_bound=cone_bound, active_set=active, scaling=scaling,
        volume_ratio=vol, approx_cone_distance=approx_dist,
    )
