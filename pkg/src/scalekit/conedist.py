"""Distance from the identity to the cone spanned by ``phi_i phi_i^T``.

The cone distance is the minimum of ``||sum_i c_i phi_i phi_i^T - I||_F``
over ``c >= 0``.  Writing each rank-one matrix in orthonormal coordinates of
the symmetric matrices turns this into a non-negative least-squares problem
``min ||A c - b||`` with ``A^T A`` equal to the squared Gram matrix ``F`` and
``A^T b`` equal to the all-ones vector, which is solved here by the
Lawson-Hanson active-set method.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import UnitNormFrame, frame_potential, squared_gram
from .errors import MaxIterations, NegativeWeight

__all__ = [
    "ConeFit",
    "svec",
    "rank_one_design",
    "objective",
    "solve_cone_projection",
    "potential_upper_bound",
    "kkt_residual",
]

DEFAULT_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class ConeFit:
    """Solution of the cone projection.

    Only ``distance`` and the KKT conditions are unique; when ``F`` is
    singular several weight vectors attain the minimum.
    """

    weights: np.ndarray
    distance: float
    residual_matrix_norm_check: float
    iterations: int
    tol: float
    kkt: float

    @property
    def weight_sum(self) -> float:
        return float(self.weights.sum())


def svec(s: np.ndarray) -> np.ndarray:
    """Orthonormal coordinates of a symmetric matrix (off-diagonals times sqrt 2)."""
    n = s.shape[0]
    iu = np.triu_indices(n, 1)
    return np.concatenate([np.diag(s), math.sqrt(2.0) * s[iu]])


def rank_one_design(frame) -> np.ndarray:
    """Matrix whose column ``i`` is ``svec(phi_i phi_i^T)``; shape ``(n(n+1)/2, m)``."""
    a = np.asarray(frame.columns if isinstance(frame, UnitNormFrame) else frame, dtype=float)
    n = a.shape[0]
    iu, ju = np.triu_indices(n, 1)
    return np.vstack([a * a, math.sqrt(2.0) * a[iu] * a[ju]])


def _target(n):
    return np.concatenate([np.ones(n), np.zeros(n * (n - 1) // 2)])


def objective(frame, weights) -> float:
    """Squared distance ``c^T F c - 2 sum(c) + n`` for weights ``c >= 0``."""
    c = np.asarray(weights, dtype=float)
    if np.any(c < 0):
        raise NegativeWeight("weights must be non-negative")
    f = squared_gram(frame).f
    return float(c @ f @ c - 2.0 * c.sum() + frame.n)


def kkt_residual(frame, weights) -> float:
    """Largest violation of the NNLS optimality conditions.

    With gradient ``grad = 2 (F c - 1)``: ``|grad_i|`` on the support and
    ``max(0, -grad_i)`` off it.
    """
    c = np.asarray(weights, dtype=float)
    grad = 2.0 * (squared_gram(frame).f @ c - 1.0)
    on = c > 0
    viol = np.where(on, np.abs(grad), np.maximum(0.0, -grad))
    return float(viol.max(initial=0.0))


def _lawson_hanson(a, b, tol, max_iter):
    """Active-set NNLS; returns ``(x, iterations)``.

    ``tol`` bounds the dual residual ``A^T (b - A x)`` on the zero set.
    Entering variables are chosen by largest dual value, lowest index first.
    """
    m = a.shape[1]
    x = np.zeros(m)
    passive = np.zeros(m, dtype=bool)
    rejected = np.zeros(m, dtype=bool)
    it = 0
    while True:
        w = a.T @ (b - a @ x)
        cand = ~passive & ~rejected
        if not cand.any() or w[cand].max() <= tol:
            break
        j = int(np.argmax(np.where(cand, w, -np.inf)))
        passive[j] = True
        entering = True
        while True:
            it += 1
            if it > max_iter:
                raise MaxIterations(f"NNLS did not converge in {max_iter} iterations")
            idx = np.flatnonzero(passive)
            z = np.zeros(m)
            z[idx] = np.linalg.lstsq(a[:, idx], b, rcond=None)[0]
            if np.all(z[idx] > 0):
                x = z
                rejected[:] = False
                break
            if entering and z[j] <= 0:
                # round-off made a barely-positive dual value useless
                passive[j] = False
                rejected[j] = True
                break
            entering = False
            q = np.flatnonzero(passive & (z <= 0))
            ratios = x[q] / (x[q] - z[q])
            k = int(np.argmin(ratios))
            x = x + ratios[k] * (z - x)
            x[q[k]] = 0.0
            x[~passive] = 0.0
            passive &= x > 1e-15 * max(1.0, x.max())
            x[~passive] = 0.0
            rejected[:] = False
            if not passive.any():
                break
    return x, it


def solve_cone_projection(frame: UnitNormFrame, tol: float = DEFAULT_TOL,
                          max_iter: int | None = None) -> ConeFit:
    """Project the identity onto the cone of the frame's rank-one operators.

    Parameters
    ----------
    frame : UnitNormFrame
    tol : float
        KKT tolerance on the gradient ``2 (F c - 1)``; must lie in (0, 1e-4].
    max_iter : int, optional
        Active-set iteration budget, default ``50 m``.

    Returns
    -------
    ConeFit
    """
    if not 0.0 < tol <= 1e-4:
        raise ValueError("tol must lie in (0, 1e-4]")
    n, m = frame.n, frame.m
    a = rank_one_design(frame)
    b = _target(n)
    max_iter = 50 * m if max_iter is None else max_iter
    c, it = _lawson_hanson(a, b, 0.5 * tol, max_iter)
    resid = a @ c - b
    # the residual form equals c^T F c - 2 sum(c) + n without its cancellation
    g = float(resid @ resid)
    distance = math.sqrt(max(0.0, g))
    op = (frame.columns * c) @ frame.columns.T
    check = float(np.linalg.norm(op - np.eye(n), "fro"))
    c.flags.writeable = False
    return ConeFit(weights=c, distance=distance, residual_matrix_norm_check=check,
                   iterations=it, tol=tol, kkt=kkt_residual(frame, c))


def potential_upper_bound(frame) -> float:
    """Upper bound ``sqrt(n - m^2 / FP)`` on the cone distance.

    Obtained by restricting the weights to multiples of the all-ones vector.
    """
    fp = frame_potential(frame)
    return math.sqrt(max(0.0, frame.n - frame.m ** 2 / fp))
