"""Sampled space curves, their derivative jets, and the nondegeneracy check."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import DegenerateCurve, GridTooShort, NonUniformGrid
from .numerics import derivative, local_interpolate

MIN_SAMPLES = 9
EPS_DET = 1e-9
UNIFORM_RTOL = 1e-12


def _frozen(a, shape_tail: tuple[int, ...] = ()) -> np.ndarray:
    arr = np.array(a, dtype=float)
    if arr.shape[1:] != shape_tail:
        raise ValueError(f"expected trailing shape {shape_tail}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("non-finite values")
    arr.setflags(write=False)
    return arr


def det3(u, v, w):
    """Scalar triple product det[u | v | w], by cofactor expansion.

    Broadcasts over leading axes, so stacks of vectors give stacks of determinants.
    """
    u, v, w = np.asarray(u, float), np.asarray(v, float), np.asarray(w, float)
    return (
        u[..., 0] * (v[..., 1] * w[..., 2] - v[..., 2] * w[..., 1])
        - v[..., 0] * (u[..., 1] * w[..., 2] - u[..., 2] * w[..., 1])
        + w[..., 0] * (u[..., 1] * v[..., 2] - u[..., 2] * v[..., 1])
    )


def _uniform_step(params: np.ndarray) -> float | None:
    n = params.shape[0]
    span = params[-1] - params[0]
    step = span / (n - 1)
    if np.all(np.abs(np.diff(params) - step) <= UNIFORM_RTOL * max(span, abs(params[0]), abs(params[-1]))):
        return float(step)
    return None


@dataclass(frozen=True, eq=False)
class SampledCurve:
    """A curve t -> c(t) in R^3 known at strictly increasing parameters.

    ``uniform_step`` is set by the constructor when the grid is uniform.
    """

    params: np.ndarray
    points: np.ndarray
    uniform_step: float | None = None

    def __init__(self, params, points):
        params = _frozen(params)
        points = _frozen(points, (3,))
        if params.shape[0] != points.shape[0]:
            raise ValueError("params and points differ in length")
        if params.shape[0] < MIN_SAMPLES:
            raise GridTooShort(f"need at least {MIN_SAMPLES} samples, got {params.shape[0]}")
        if np.any(np.diff(params) <= 0):
            raise ValueError("params must be strictly increasing")
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "uniform_step", _uniform_step(params))

    def __len__(self) -> int:
        return self.params.shape[0]

    @property
    def span(self) -> tuple[float, float]:
        return float(self.params[0]), float(self.params[-1])

    @classmethod
    def sample(cls, fn: Callable[[np.ndarray], np.ndarray], a: float, b: float, n: int) -> SampledCurve:
        """Evaluate a vectorised ``fn(t) -> (len(t), 3)`` on a uniform grid."""
        t = np.linspace(a, b, n)
        return cls(t, fn(t))


@dataclass(frozen=True, eq=False)
class CurveJet:
    """Derivatives c', c'', c''', c'''' at every grid sample.

    Construction does not test nondegeneracy; use ``check_nondegenerate``.
    """

    params: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    d3: np.ndarray
    d4: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "params", _frozen(self.params))
        n = self.params.shape[0]
        for name in ("d1", "d2", "d3", "d4"):
            arr = _frozen(getattr(self, name), (3,))
            if arr.shape[0] != n:
                raise ValueError(f"{name} has {arr.shape[0]} samples, grid has {n}")
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return self.params.shape[0]

    def frame(self, index: int) -> np.ndarray:
        """The matrix with columns (c', c'', c''') at ``index``."""
        return np.column_stack([self.d1[index], self.d2[index], self.d3[index]])

    def det(self) -> np.ndarray:
        return det3(self.d1, self.d2, self.d3)


def estimate_jet(curve: SampledCurve, stride: int = 1, end_stride: int | None = None) -> CurveJet:
    """Seven-point finite-difference estimates of c' .. c'''' on a uniform grid.

    ``stride`` spaces the interior stencil points that many samples apart and
    ``end_stride`` does the same near the two ends (see ``numerics.derivative``).
    """
    if len(curve) < MIN_SAMPLES:
        raise GridTooShort(f"need at least {MIN_SAMPLES} samples, got {len(curve)}")
    h = curve.uniform_step
    if h is None:
        raise NonUniformGrid("estimate_jet needs a uniform grid; call resample_uniform first")
    d = [derivative(curve.points, h, k, stride=stride, end_stride=end_stride) for k in (1, 2, 3, 4)]
    return CurveJet(curve.params, *d)


def resample_uniform(curve: SampledCurve, n: int, method: str = "pchip") -> SampledCurve:
    """Resample onto n uniform parameters.

    ``"pchip"`` is monotone cubic Hermite interpolation per coordinate: no
    overshoot, but only C1, so its third and fourth differences are unusable.
    ``"local"`` is degree-7 Lagrange through the nearest nodes, which keeps
    the higher derivatives the invariants need.
    """
    if n < MIN_SAMPLES:
        raise GridTooShort(f"need at least {MIN_SAMPLES} samples, got {n}")
    a, b = curve.span
    t = np.linspace(a, b, n)
    if method == "pchip":
        pts = PchipInterpolator(curve.params, curve.points, axis=0)(t)
    elif method == "local":
        pts = local_interpolate(curve.params, curve.points, t)
    else:
        raise ValueError(f"unknown resampling method {method!r}")
    pts[0], pts[-1] = curve.points[0], curve.points[-1]
    return SampledCurve(t, pts)


def check_nondegenerate(jet: CurveJet, eps: float = EPS_DET) -> np.ndarray:
    """Return det(c', c'', c''') per sample; raise at the first value <= eps."""
    dets = jet.det()
    bad = np.flatnonzero(~(dets > eps))
    if bad.size:
        i = int(bad[0])
        raise DegenerateCurve(i, float(dets[i]))
    return dets
