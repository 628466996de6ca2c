"""Unit-norm frames in R^n: validation, sampling, Gram quantities and file I/O.

A frame is stored as an ``n x m`` array whose columns are the frame vectors.
Random frames are drawn with numpy's PCG64 generator
(``numpy.random.default_rng``), which produces the same stream on every
platform for a given integer seed.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    DimensionError,
    FrameFormatError,
    NegativeWeight,
    NotAFrame,
    NotUnitNorm,
    ZeroColumn,
)

__all__ = [
    "UnitNormFrame",
    "GramSquared",
    "SymmetrizedSet",
    "NotUnitNorm",
    "validate_frame",
    "random_unit_frame",
    "frame_potential",
    "squared_gram",
    "symmetrize",
    "weighted_frame_operator",
    "read_frame",
    "write_frame",
    "frame_to_json",
    "format_float",
    "derive_seed",
]

NORM_TOL = 1e-8
_RANDOM_RETRIES = 16


def _frozen(a):
    a = np.array(a, dtype=float, copy=True)
    a.flags.writeable = False
    return a


def _rank(matrix):
    s = np.linalg.svd(matrix, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    n = matrix.shape[0]
    return int(np.sum(s > n * np.finfo(float).eps * s[0]))


@dataclass(frozen=True, eq=False)
class UnitNormFrame:
    """``m`` unit vectors spanning R^n, stored column-wise in ``columns``."""

    columns: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "columns", _frozen(self.columns))

    @property
    def n(self) -> int:
        return self.columns.shape[0]

    @property
    def m(self) -> int:
        return self.columns.shape[1]

    def __array__(self, dtype=None, copy=None):
        a = self.columns if dtype is None else self.columns.astype(dtype)
        return np.array(a, copy=True) if copy else a

    def __len__(self):
        return self.m

    def permuted(self, order) -> UnitNormFrame:
        return UnitNormFrame(self.columns[:, np.asarray(order)])

    def with_signs(self, signs) -> UnitNormFrame:
        return UnitNormFrame(self.columns * np.asarray(signs, dtype=float))

    def rotated(self, u) -> UnitNormFrame:
        """Apply the orthogonal matrix ``u`` to every frame vector."""
        return UnitNormFrame(np.asarray(u, dtype=float) @ self.columns)


@dataclass(frozen=True, eq=False)
class GramSquared:
    """Entrywise squared Gram matrix, ``f[i, j] = <phi_i, phi_j>**2``."""

    f: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "f", _frozen(self.f))


@dataclass(frozen=True, eq=False)
class SymmetrizedSet:
    """The ``2m`` points ``phi_1..phi_m, -phi_1..-phi_m`` (columns)."""

    points: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "points", _frozen(self.points))

    def __len__(self):
        return self.points.shape[1]


def validate_frame(matrix, tol: float = NORM_TOL, normalize: bool = False) -> UnitNormFrame:
    """Check that ``matrix`` (n x m) holds a unit-norm frame and wrap it.

    Columns whose norm is within ``tol`` of 1 are rescaled to norm 1 exactly.
    With ``normalize=True`` any non-zero column is rescaled instead.

    Raises
    ------
    ZeroColumn
        A column has norm below ``tol``.
    NotUnitNorm
        A column norm differs from 1 by more than ``tol`` (``normalize=False``).
    DimensionError
        Fewer columns than rows, or the input is not a 2-d array.
    NotAFrame
        The columns do not span R^n.
    """
    a = np.array(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] < 1:
        raise DimensionError(f"expected a 2-d n x m array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise FrameFormatError("frame entries must be finite")
    n, m = a.shape
    if m < n:
        raise DimensionError(f"a frame of R^{n} needs at least {n} vectors, got {m}")
    norms = np.linalg.norm(a, axis=0)
    if np.any(norms < tol):
        raise ZeroColumn(f"column {int(np.argmin(norms))} has norm {norms.min():.3g}")
    if not normalize:
        bad = np.abs(norms - 1.0) > tol
        if np.any(bad):
            i = int(np.argmax(bad))
            raise NotUnitNorm(f"column {i} has norm {norms[i]!r}, expected 1 within {tol:g}")
    # leave columns that are already unit up to rounding bit-for-bit intact
    norms = np.where(np.abs(norms - 1.0) <= 4 * np.finfo(float).eps, 1.0, norms)
    a = a / norms
    if _rank(a) < n:
        raise NotAFrame(f"columns span a proper subspace of R^{n}")
    return UnitNormFrame(a)


def random_unit_frame(m: int, n: int, seed) -> UnitNormFrame:
    """Draw ``m`` independent uniform vectors on the unit sphere of R^n.

    Each column is a standard Gaussian vector divided by its norm. The draw is
    repeated (a bounded number of times) in the probability-zero event that
    the columns fail to span R^n.
    """
    if n < 1 or m < n:
        raise DimensionError(f"need m >= n >= 1, got m={m}, n={n}")
    rng = np.random.default_rng(seed)
    for _ in range(_RANDOM_RETRIES):
        a = _unit_columns(rng, m, n)
        if a is not None and _rank(a) == n:
            return UnitNormFrame(a)
    raise NotAFrame("random draw stayed rank deficient; check the generator")


def _unit_columns(rng, m, n):
    g = rng.standard_normal((n, m))
    norms = np.sqrt(np.einsum("ij,ij->j", g, g))
    if not norms.all():
        return None
    return g / norms


def derive_seed(seed: int, *keys: int) -> int:
    """Deterministic 64-bit child seed for ``(seed, *keys)``.

    Uses :class:`numpy.random.SeedSequence` spawn keys, so children of the
    same parent are statistically independent and the mapping does not
    depend on evaluation order.
    """
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys))
    lo, hi = ss.generate_state(2, dtype=np.uint32)
    return int(lo) | (int(hi) << 32)


def _as_matrix(frame):
    return frame.columns if isinstance(frame, UnitNormFrame) else np.asarray(frame, dtype=float)


def squared_gram(frame) -> GramSquared:
    a = _as_matrix(frame)
    g = a.T @ a
    return GramSquared(g * g)


def frame_potential(frame) -> float:
    """Sum over all ordered pairs of squared inner products.

    Accepts a :class:`UnitNormFrame` or a raw ``n x m`` matrix.
    """
    return float(squared_gram(frame).f.sum())


def symmetrize(frame) -> SymmetrizedSet:
    a = _as_matrix(frame)
    return SymmetrizedSet(np.hstack([a, -a]))


def weighted_frame_operator(frame, weights) -> np.ndarray:
    """Return ``sum_i w_i phi_i phi_i^T`` for non-negative weights ``w``."""
    a = _as_matrix(frame)
    w = np.asarray(weights, dtype=float)
    if w.shape != (a.shape[1],):
        raise DimensionError(f"expected {a.shape[1]} weights, got shape {w.shape}")
    if np.any(w < 0):
        raise NegativeWeight("weights must be non-negative")
    s = (a * w) @ a.T
    return 0.5 * (s + s.T)


# -- file formats -------------------------------------------------------------

def format_float(x) -> str:
    """Render a float with 17 significant digits (round-trip exact)."""
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        return "null"
    return format(x, ".17g")


def _json_value(obj):
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return _json_value(obj.tolist())
    if isinstance(obj, dict):
        items = (f"{json.dumps(str(k))}: {_json_value(v)}" for k, v in obj.items())
        return "{" + ", ".join(items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_json_value(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    """JSON text with every float written to 17 significant digits."""
    return _json_value(obj)


def frame_to_json(frame) -> str:
    a = _as_matrix(frame)
    return dumps({"n": a.shape[0], "m": a.shape[1], "columns": a.T})


def _parse_json(text):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FrameFormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(obj, dict) or "columns" not in obj:
        raise FrameFormatError('frame JSON must be an object with a "columns" key')
    try:
        cols = np.array(obj["columns"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise FrameFormatError(f"bad columns: {exc}") from exc
    if cols.ndim != 2:
        raise FrameFormatError("columns must be a list of equal-length vectors")
    a = cols.T
    n, m = a.shape
    if obj.get("n", n) != n or obj.get("m", m) != m:
        raise FrameFormatError(f"declared n/m do not match columns of shape {n}x{m}")
    return a


def _parse_csv(text):
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    try:
        a = np.array([[float(c) for c in r] for r in rows], dtype=float)
    except ValueError as exc:
        raise FrameFormatError(f"bad CSV entry: {exc}") from exc
    if a.ndim != 2 or a.size == 0:
        raise FrameFormatError("CSV rows must have equal length")
    return a


def read_frame(path, tol: float = NORM_TOL, normalize: bool = False) -> UnitNormFrame:
    """Load a frame from JSON (``{"n", "m", "columns"}``) or CSV (n rows, m columns)."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".csv" or not text.lstrip().startswith(("{", "[")):
        a = _parse_csv(text)
    else:
        a = _parse_json(text)
    return validate_frame(a, tol=tol, normalize=normalize)


def write_frame(frame, path, fmt: str | None = None) -> None:
    path = Path(path)
    fmt = fmt or ("csv" if path.suffix.lower() == ".csv" else "json")
    a = _as_matrix(frame)
    if fmt == "csv":
        text = "".join(",".join(format_float(x) for x in row) + "\n" for row in a)
    elif fmt == "json":
        text = frame_to_json(a) + "\n"
    else:
        raise ValueError(f"unknown format {fmt!r}")
    path.write_text(text)
