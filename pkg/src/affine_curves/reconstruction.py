"""Curves from natural equations, and the special-affine equivalence test."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from .curve_model import EPS_DET, MIN_SAMPLES, SampledCurve
from .errors import BadInitialFrame, EmptyOverlap, GridTooShort
from .group import SpecialAffineMap
from .invariants import (
    AffineSignature,
    arc_length_curve,
    arc_length_jet,
    curvatures,
    unimodular_frame,
)
from .numerics import cumulative_integral, local_interpolate

INITIAL_DET_TOL = 1e-9
GEOMETRIC_FACTOR = 10.0


@dataclass(frozen=True, eq=False)
class NaturalEquations:
    """Curvatures tabulated on a uniform arc-length grid starting at 0."""

    sigma: np.ndarray
    chi1: np.ndarray
    chi2: np.ndarray

    def __post_init__(self):
        sigma = np.array(self.sigma, dtype=float)
        chi1 = np.array(self.chi1, dtype=float)
        chi2 = np.array(self.chi2, dtype=float)
        if sigma.ndim != 1 or chi1.shape != sigma.shape or chi2.shape != sigma.shape:
            raise ValueError("sigma, chi1, chi2 must be 1-D and of equal length")
        if sigma.size == 0:
            raise ValueError("empty grid")
        if not (np.all(np.isfinite(sigma)) and np.all(np.isfinite(chi1)) and np.all(np.isfinite(chi2))):
            raise ValueError("non-finite values")
        if sigma[0] != 0.0:
            raise ValueError("sigma must start at 0")
        if sigma.size > 1:
            steps = np.diff(sigma)
            h = sigma[-1] / (sigma.size - 1)
            if not (h > 0 and np.all(np.abs(steps - h) <= 1e-9 * max(1.0, sigma[-1]))):
                raise ValueError("sigma must be uniform and ascending")
        for name, arr in (("sigma", sigma), ("chi1", chi1), ("chi2", chi2)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return self.sigma.size

    @property
    def step(self) -> float:
        return float(self.sigma[-1] / (self.sigma.size - 1)) if self.sigma.size > 1 else 0.0

    @classmethod
    def from_signature(cls, sig: AffineSignature) -> NaturalEquations:
        return cls(sig.sigma, sig.chi1, sig.chi2)

    @classmethod
    def constant(cls, chi1: float, chi2: float, sigma_max: float, n: int) -> NaturalEquations:
        sigma = np.linspace(0.0, sigma_max, n)
        return cls(sigma, np.full(n, float(chi1)), np.full(n, float(chi2)))


@dataclass(frozen=True, eq=False)
class EquivalenceReport:
    equivalent: bool
    distance: float
    compared_length: float
    map: SpecialAffineMap | None = None
    geometric_residual: float | None = None

    def to_dict(self) -> dict:
        return {
            "equivalent": bool(self.equivalent),
            "distance": float(self.distance),
            "compared_length": float(self.compared_length),
            "map": self.map.to_dict() if self.map is not None else None,
            "geometric_residual": None if self.geometric_residual is None else float(self.geometric_residual),
        }


def _generators(chi1: np.ndarray, chi2: np.ndarray) -> np.ndarray:
    k = np.zeros(chi1.shape + (3, 3))
    k[..., 0, 2] = chi1
    k[..., 1, 2] = -chi2
    k[..., 1, 0] = k[..., 2, 1] = 1.0
    return k


def _rk4_propagators(eqs: NaturalEquations) -> np.ndarray:
    # F' = F K is linear, so one RK4 step from F is F @ P with P the step taken from I.
    h = eqs.step
    k0 = _generators(eqs.chi1[:-1], eqs.chi2[:-1])
    k1 = _generators(eqs.chi1[1:], eqs.chi2[1:])
    km = (k0 + k1) / 2
    eye = np.eye(3)
    s1 = k0
    s2 = (eye + h / 2 * s1) @ km
    s3 = (eye + h / 2 * s2) @ km
    s4 = (eye + h * s3) @ k1
    return eye + h / 6 * (s1 + 2 * s2 + 2 * s3 + s4)


def integrate_frame(eqs: NaturalEquations, initial: np.ndarray | None = None) -> np.ndarray:
    """Frames F(sigma_i) solving F' = F K(sigma), shape (n, 3, 3).

    Classical RK4 at the grid step, curvatures at half steps by averaging the
    neighbouring samples.
    """
    f0 = np.eye(3) if initial is None else np.array(initial, dtype=float)
    if f0.shape != (3, 3):
        raise BadInitialFrame(f"initial frame must be 3x3, got {f0.shape}")
    d = np.linalg.det(f0)
    if not abs(d - 1.0) <= INITIAL_DET_TOL:
        raise BadInitialFrame(f"det(initial frame) = {d!r}, expected 1")
    out = np.empty((len(eqs), 3, 3))
    out[0] = f0
    if len(eqs) > 1:
        for i, p in enumerate(_rk4_propagators(eqs)):
            out[i + 1] = out[i] @ p
    return out


def reconstruct_curve(
    eqs: NaturalEquations,
    initial_frame: np.ndarray | None = None,
    initial_point: np.ndarray | None = None,
) -> SampledCurve:
    """The arc-length curve with the given curvatures, frame and starting point."""
    if len(eqs) < MIN_SAMPLES:
        raise GridTooShort(f"need at least {MIN_SAMPLES} samples, got {len(eqs)}")
    frames = integrate_frame(eqs, initial_frame)
    p0 = np.zeros(3) if initial_point is None else np.asarray(initial_point, dtype=float)
    points = p0 + cumulative_integral(frames[:, :, 0], eqs.step)
    return SampledCurve(eqs.sigma, points)


def _common_grid(a: AffineSignature, b: AffineSignature) -> np.ndarray:
    la, lb = a.length, b.length
    if not (la > 0 and lb > 0):
        raise EmptyOverlap("a signature has zero arc length")
    length = min(la, lb)
    h = min(la / (len(a) - 1), lb / (len(b) - 1))
    n = int(np.ceil(length / h - 1e-9)) + 1
    return np.linspace(0.0, length, max(n, 2))


def compare_signatures(a: AffineSignature, b: AffineSignature, tol: float) -> tuple[bool, float]:
    """Sup-norm distance of the curvatures over [0, min length], and whether it is <= tol.

    Both signatures are resampled at the finer of the two steps by monotone
    cubic interpolation.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    grid = _common_grid(a, b)
    dist = 0.0
    for fa, fb in ((a.chi1, b.chi1), (a.chi2, b.chi2)):
        ya = PchipInterpolator(a.sigma, fa)(grid)
        yb = PchipInterpolator(b.sigma, fb)(grid)
        dist = max(dist, float(np.max(np.abs(ya - yb))))
    return dist <= tol, dist


def _signature_of(gamma: SampledCurve) -> AffineSignature:
    chi1, chi2 = curvatures(arc_length_jet(gamma))
    return AffineSignature(gamma.params, chi1, chi2)


def _align(gamma: SampledCurve, gamma_bar: SampledCurve, eps: float) -> SpecialAffineMap:
    f = unimodular_frame(arc_length_jet(gamma), 0, eps).matrix
    fbar = unimodular_frame(arc_length_jet(gamma_bar), 0, eps).matrix
    b = fbar @ np.linalg.inv(f)
    b = b / np.cbrt(np.linalg.det(b))
    return SpecialAffineMap(b, gamma_bar.points[0] - b @ gamma.points[0])


def solve_alignment_map(
    c: SampledCurve, cbar: SampledCurve, n: int | None = None, eps: float = EPS_DET
) -> SpecialAffineMap:
    """The map taking the starting frame and point of c to those of cbar.

    Both frames are taken along arc length at sigma = 0.  Only meaningful when
    the two signatures already agree.
    """
    return _align(arc_length_curve(c, n, eps), arc_length_curve(cbar, n, eps), eps)


def alignment_from_jets(jet, point, jet_bar, point_bar, index: int = 0, eps: float = EPS_DET) -> SpecialAffineMap:
    """Same construction from exact jets sharing a parametrisation.

    Unimodular frames are used, so any common parameter works, not only arc length.
    """
    f = unimodular_frame(jet, index, eps).matrix
    fbar = unimodular_frame(jet_bar, index, eps).matrix
    b = fbar @ np.linalg.inv(f)
    b = b / np.cbrt(np.linalg.det(b))
    return SpecialAffineMap(b, np.asarray(point_bar, float) - b @ np.asarray(point, float))


def _geometric_residual(m: SpecialAffineMap, gamma: SampledCurve, gamma_bar: SampledCurve) -> float:
    length = min(gamma.params[-1], gamma_bar.params[-1])
    grid = np.linspace(0.0, length, max(len(gamma), len(gamma_bar)))
    p = local_interpolate(gamma.params, gamma.points, grid)
    q = local_interpolate(gamma_bar.params, gamma_bar.points, grid)
    return float(np.max(np.abs(m(p) - q)))


def verify_equivalence(
    c: SampledCurve, cbar: SampledCurve, tol: float, n: int | None = None, eps: float = EPS_DET
) -> EquivalenceReport:
    """Decide whether cbar = A(c) for some special affine A, and find A.

    Signatures are compared first; when they agree the aligning map is solved
    and the mapped curve must lie within 10 tol of cbar.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    gamma = arc_length_curve(c, n, eps)
    gamma_bar = arc_length_curve(cbar, n, eps)
    sa, sb = _signature_of(gamma), _signature_of(gamma_bar)
    length = min(sa.length, sb.length)
    same, dist = compare_signatures(sa, sb, tol)
    if not same:
        return EquivalenceReport(False, dist, length)
    m = _align(gamma, gamma_bar, eps)
    residual = _geometric_residual(m, gamma, gamma_bar)
    if not residual <= GEOMETRIC_FACTOR * tol:
        return EquivalenceReport(False, dist, length, None, residual)
    return EquivalenceReport(True, dist, length, m, residual)
