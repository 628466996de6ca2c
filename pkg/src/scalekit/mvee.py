"""Minimal (Loewner-John) ellipsoid of a symmetrized unit-norm frame.

The ellipsoid ``E(X) = {v : <X v, v> <= 1}`` enclosing ``{+-phi_i}`` is centred
at the origin, so the problem reduces to D-optimal design on the ``m``
original vectors: maximise ``log det M(p)`` with ``M(p) = sum_i p_i phi_i phi_i^T``
over the probability simplex.  At the optimum ``X^{-1} = n M(p)`` and the
John weights are ``rho = n p``.

The design is computed by Khachiyan's barycentric coordinate ascent with the
Wolfe-Atwood away/drop steps (Todd and Yildirim), which converges linearly
instead of sublinearly and drives weights of interior points to exactly zero.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .conedist import rank_one_design
from .core import UnitNormFrame, validate_frame
from .errors import DimensionError, MaxIterations, NotAFrame, NotSPD, TraceMismatch

__all__ = [
    "MinimalEllipsoid",
    "CertificateReport",
    "minimal_ellipsoid",
    "john_certificate",
    "sparsify_weights",
    "frame_from_ellipsoid",
    "equalize_diagonal",
    "ellipsoid_to_dict",
]

DEFAULT_ETA = 1e-7
_REFACTOR_EVERY = 1000
_POLISH_EVERY = 500
_COARSE_ETA = 1e-3


@dataclass(frozen=True, eq=False)
class MinimalEllipsoid:
    x_inv: np.ndarray
    x: np.ndarray
    rho: np.ndarray
    eigenvalues: np.ndarray
    volume_ratio: float
    contact_indices: np.ndarray
    eta: float
    iterations: int = 0

    @property
    def n(self) -> int:
        return self.x_inv.shape[0]


@dataclass(frozen=True)
class CertificateReport:
    """Measured residuals of the three John conditions and their verdicts."""

    reconstruction_residual: float
    max_containment_violation: float
    max_contact_slack: float
    tol: float
    reconstruction_ok: bool
    containment_ok: bool
    contact_ok: bool
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.reconstruction_ok and self.containment_ok and self.contact_ok


def _sym_inv(a):
    inv = np.linalg.inv(a)
    return 0.5 * (inv + inv.T)


def _finish(a, p, eta, iterations, sparsify):
    n = a.shape[0]
    rho = n * p
    if sparsify:
        rho = sparsify_weights(a, rho)
    x_inv = (a * rho) @ a.T
    x_inv = 0.5 * (x_inv + x_inv.T)
    eig = np.linalg.eigvalsh(x_inv)
    if eig[0] <= 0:
        raise NotAFrame("ellipsoid matrix is singular")
    x = _sym_inv(x_inv)
    volume = float(np.prod(np.sqrt(eig)))
    contact = np.flatnonzero(rho > n * eta)
    for arr in (x_inv, x, rho, eig, contact):
        arr.flags.writeable = False
    return MinimalEllipsoid(x_inv=x_inv, x=x, rho=rho, eigenvalues=eig,
                            volume_ratio=volume, contact_indices=contact,
                            eta=eta, iterations=iterations)


def _kappa(a, p):
    minv = _sym_inv((a * p) @ a.T)
    return minv, np.einsum("ij,ij->j", a, minv @ a)


def _optimal(kappa, p, n, eta):
    if kappa.max() > n * (1.0 + eta):
        return False
    big = p > eta  # rho_i > n * eta
    return not big.any() or kappa[big].min() >= n * (1.0 - eta)


def _ascent(a, p, eta, budget):
    """Coordinate ascent with away/drop steps; returns ``(p, steps, converged)``."""
    n = a.shape[0]
    hi = n * (1.0 + eta)
    lo = n * (1.0 - eta)
    minv, kappa = _kappa(a, p)
    since_refactor = 0
    it = 0
    while True:
        j = int(np.argmax(kappa))
        k_plus = kappa[j]
        supp = np.flatnonzero(p > 0)
        k = int(supp[np.argmin(kappa[supp])])
        k_minus = kappa[k]
        if k_plus <= hi:
            big = p > eta
            if not big.any() or kappa[big].min() >= lo:
                # confirm against a fresh inverse before stopping
                minv, kappa = _kappa(a, p)
                since_refactor = 0
                if _optimal(kappa, p, n, eta):
                    return p, it, True
                continue
        if it >= budget:
            return p, it, False
        it += 1
        drop = False
        if k_plus - n >= n - k_minus:
            idx, kap = j, k_plus
            tau = (kap - n) / (n * (kap - 1.0))
        else:
            idx, kap = k, k_minus
            tau_min = -p[idx] / (1.0 - p[idx])
            tau = (kap - n) / (n * (kap - 1.0)) if kap > 1.0 else tau_min
            if tau <= tau_min:
                tau, drop = tau_min, True
        u = minv @ a[:, idx]
        denom = 1.0 - tau + tau * kap
        ua = u @ a
        minv = (minv - (tau / denom) * np.outer(u, u)) / (1.0 - tau)
        kappa = (kappa - (tau / denom) * ua * ua) / (1.0 - tau)
        p = p * (1.0 - tau)
        p[idx] += tau
        if drop or p[idx] < 0:
            p[idx] = 0.0
        since_refactor += 1
        if since_refactor >= _REFACTOR_EVERY:
            p /= p.sum()
            minv, kappa = _kappa(a, p)
            since_refactor = 0


def _logdet(a, p):
    sign, val = np.linalg.slogdet((a * p) @ a.T)
    return val if sign > 0 else -np.inf


def _newton_polish(a, p, steps=40):
    """Newton iterations for ``log det`` on the current support of ``p``.

    The support is first reduced so that its rank-one terms are linearly
    independent, which makes the Hessian ``(A^T M^{-1} A)**2`` definite.
    Returns the polished weights, or ``None`` if no progress was made.
    """
    n = a.shape[0]
    p = sparsify_weights(a, n * p) / n
    p /= p.sum()
    f0 = _logdet(a, p)
    for _ in range(steps):
        s = np.flatnonzero(p > 0)
        a_s = a[:, s]
        minv = _sym_inv((a_s * p[s]) @ a_s.T)
        g = a_s.T @ minv @ a_s
        kappa = np.diag(g)
        if np.abs(kappa - n).max() <= 1e-13 * n:
            break
        h = g * g
        try:
            hk = np.linalg.solve(h, kappa)
            h1 = np.linalg.solve(h, np.ones(s.size))
        except np.linalg.LinAlgError:
            return None
        mu = hk.sum() / h1.sum()
        delta = hk - mu * h1
        new = p[s] + delta
        if np.any(new <= 0):
            # step to the boundary and drop the blocking weight
            neg = np.flatnonzero(delta < 0)
            ratios = -p[s][neg] / delta[neg]
            k = int(np.argmin(ratios))
            new = np.maximum(p[s] + ratios[k] * delta, 0.0)
            new[neg[k]] = 0.0
        q = np.zeros_like(p)
        q[s] = new
        q /= q.sum()
        if _logdet(a, q) < f0 - 1e-13 * max(1.0, abs(f0)):
            return None
        p, f0 = q, _logdet(a, q)
    return p


def minimal_ellipsoid(frame: UnitNormFrame, eta: float = DEFAULT_ETA,
                      max_iter: int | None = None, sparsify: bool = False) -> MinimalEllipsoid:
    """Minimal ellipsoid of ``{+-phi_i}`` by coordinate ascent on the design weights.

    The ascent runs to a coarse tolerance, after which Newton steps on the
    identified support finish the solve; if the Newton result does not
    certify, ascent resumes at the requested tolerance.

    Parameters
    ----------
    frame : UnitNormFrame
    eta : float
        Optimality tolerance in (0, 1e-3].  On return
        ``phi_i^T X phi_i <= 1 + eta`` for all ``i`` and ``>= 1 - eta`` for
        every index with ``rho_i > n * eta``.
    max_iter : int, optional
        Ascent step budget; default ``1e5 * ln(m / eta)``.
    sparsify : bool
        Reduce the John weights to at most ``n(n+1)/2`` positive entries.

    Raises
    ------
    NotAFrame
        The vectors do not span R^n.
    MaxIterations
    """
    if not 0.0 < eta <= 1e-3:
        raise ValueError("eta must lie in (0, 1e-3]")
    a = np.asarray(frame.columns, dtype=float)
    n, m = a.shape
    if np.linalg.matrix_rank(a) < n:
        raise NotAFrame("vectors do not span R^n; every design matrix is singular")
    if max_iter is None:
        max_iter = int(1e5 * math.log(m / eta))

    p = np.full(m, 1.0 / m)
    p, used, _ = _ascent(a, p, max(eta, _COARSE_ETA), max_iter)
    done = _optimal(_kappa(a, p)[1], p, n, eta)
    while not done:
        q = _newton_polish(a, p)
        if q is not None:
            if _optimal(_kappa(a, q)[1], q, n, eta):
                p, done = q, True
                break
            if _logdet(a, q) >= _logdet(a, p):
                p = q
        if used >= max_iter:
            raise MaxIterations(f"ellipsoid iteration did not converge in {max_iter} steps")
        p, k, done = _ascent(a, p, eta, min(_POLISH_EVERY, max_iter - used))
        used += k
    p = np.maximum(p, 0.0)
    p /= p.sum()
    return _finish(a, p, eta, used, sparsify)


def sparsify_weights(frame, rho, rtol: float = 1e-12) -> np.ndarray:
    """Move weight off linearly dependent rank-one terms.

    Repeatedly finds a null vector ``z`` of the active columns of the
    rank-one design and replaces ``rho`` by ``rho - t z`` with the largest
    ``t`` keeping ``rho >= 0``.  ``sum_i rho_i phi_i phi_i^T`` (and hence the
    trace) is unchanged; at most ``n(n+1)/2`` entries remain positive.
    """
    a = np.asarray(frame.columns if isinstance(frame, UnitNormFrame) else frame, dtype=float)
    design = rank_one_design(a)
    rho = np.array(rho, dtype=float)
    while True:
        supp = np.flatnonzero(rho > 0)
        if supp.size <= 1:
            return rho
        _, s, vt = np.linalg.svd(design[:, supp])
        if supp.size <= s.size and s[-1] > rtol * s[0]:
            return rho
        z = vt[-1]
        if z.max() <= 0:
            z = -z
        pos = z > 0
        ratios = np.full(z.shape, np.inf)
        ratios[pos] = rho[supp][pos] / z[pos]
        r = int(np.argmin(ratios))
        new = rho[supp] - ratios[r] * z
        new[r] = 0.0
        new[new < 0] = 0.0
        rho[supp] = new


def john_certificate(frame, ellipsoid, tol: float | None = None) -> CertificateReport:
    """Check the John conditions for ``(X, rho)`` on the frame.

    Measures ``||X^{-1} - sum rho_i phi_i phi_i^T||_F``, the largest excess
    ``max_i (phi_i^T X phi_i - 1)``, and the largest shortfall
    ``1 - phi_i^T X phi_i`` over indices with positive weight.  Accepts a
    :class:`MinimalEllipsoid` or any object with ``x_inv`` and ``rho``.
    """
    a = np.asarray(frame.columns if isinstance(frame, UnitNormFrame) else frame, dtype=float)
    n = a.shape[0]
    x_inv = np.asarray(ellipsoid.x_inv, dtype=float)
    rho = np.asarray(ellipsoid.rho, dtype=float)
    x = getattr(ellipsoid, "x", None)
    x = _sym_inv(x_inv) if x is None else np.asarray(x, dtype=float)
    eta = getattr(ellipsoid, "eta", 0.0)
    if tol is None:
        tol = max(n * eta, 1e-10)
    recon = float(np.linalg.norm(x_inv - (a * rho) @ a.T, "fro"))
    q = np.einsum("ij,ij->j", a, x @ a)
    containment = float(max(0.0, (q - 1.0).max()))
    floor = n * eta if eta else 0.0
    active = rho > floor
    slack = float(max(0.0, (1.0 - q[active]).max())) if active.any() else 0.0
    return CertificateReport(
        reconstruction_residual=recon,
        max_containment_violation=containment,
        max_contact_slack=slack,
        tol=tol,
        reconstruction_ok=recon <= tol,
        containment_ok=containment <= tol,
        contact_ok=slack <= tol,
    )


def equalize_diagonal(lam, start=None, atol: float = 1e-12):
    """Orthogonal ``R`` with ``R diag(lam) R^T`` having unit diagonal.

    Needs ``sum(lam) == len(lam)``.  Plane rotations are applied to the pair
    of coordinates holding the current largest and smallest diagonal entries;
    each rotation sets the smaller one to exactly 1, so at most ``n - 1``
    rotations are used.  ``start`` is an optional initial orthogonal matrix.
    """
    lam = np.asarray(lam, dtype=float)
    n = lam.size
    r = np.eye(n) if start is None else np.array(start, dtype=float)
    s = (r * lam) @ r.T
    for _ in range(4 * n):
        d = np.diag(s)
        i, j = int(np.argmin(d)), int(np.argmax(d))
        if d[j] - 1.0 <= atol and 1.0 - d[i] <= atol:
            break
        aii, ajj, aij = d[i], d[j], s[i, j]
        # rotate so that the new (i, i) entry equals 1:
        # (ajj - 1) t^2 + 2 aij t + (aii - 1) = 0 with t = tan(theta)
        disc = math.sqrt(max(0.0, aij * aij - (aii - 1.0) * (ajj - 1.0)))
        num = -aij + math.copysign(disc, -aij) if aij != 0 else disc
        t = num / (ajj - 1.0)
        if abs(t) > 1e8:
            # use the reciprocal root to avoid overflow
            t = (aii - 1.0) / num
        c = 1.0 / math.sqrt(1.0 + t * t)
        sn = c * t
        g = np.eye(n)
        g[i, i], g[i, j], g[j, i], g[j, j] = c, sn, -sn, c
        s = g @ s @ g.T
        s = 0.5 * (s + s.T)
        s[i, i] = 1.0
        r = g @ r
    return r


def frame_from_ellipsoid(x_inv, m: int, seed=None) -> UnitNormFrame:
    """Unit-norm frame of ``m`` vectors whose minimal ellipsoid is ``E(X)``.

    Builds ``n`` unit vectors with ``sum phi_i phi_i^T = x_inv`` (so all lie on
    the boundary of ``E(X)``) and pads with copies of the first one.  With a
    ``seed`` the construction starts from a random orthogonal matrix, giving a
    different (equally valid) frame.

    Raises
    ------
    NotSPD
    TraceMismatch
        ``trace(x_inv)`` differs from ``n`` by more than 1e-10.
    """
    s = np.array(x_inv, dtype=float)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise NotSPD("x_inv must be a square matrix")
    n = s.shape[0]
    if m < n:
        raise DimensionError(f"need m >= n, got m={m}, n={n}")
    if not np.allclose(s, s.T, rtol=0, atol=1e-12 * max(1.0, np.abs(s).max())):
        raise NotSPD("x_inv must be symmetric")
    s = 0.5 * (s + s.T)
    if abs(np.trace(s) - n) > 1e-10:
        raise TraceMismatch(f"trace(x_inv) = {float(np.trace(s))!r}, expected {n}")
    lam, q = np.linalg.eigh(s)
    if lam[0] <= 0:
        raise NotSPD("x_inv must be positive definite")
    lam = lam * (n / lam.sum())
    start = None
    if seed is not None:
        from scipy.stats import ortho_group
        start = ortho_group.rvs(n, random_state=np.random.default_rng(seed)) if n > 1 else np.eye(1)
    r = equalize_diagonal(lam, start)
    # columns of W = R^T satisfy ||Lambda^{1/2} w_i|| = 1
    phi = q @ (np.sqrt(lam)[:, None] * r.T)
    phi /= np.linalg.norm(phi, axis=0)
    if m > n:
        phi = np.hstack([phi, np.repeat(phi[:, :1], m - n, axis=1)])
    return validate_frame(phi)


def ellipsoid_to_dict(ell: MinimalEllipsoid) -> dict:
    return {
        "n": ell.n,
        "x_inv": ell.x_inv,
        "rho": ell.rho,
        "volume_ratio": ell.volume_ratio,
        "eta": ell.eta,
    }
