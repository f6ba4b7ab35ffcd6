"""Special affine frame, arc length and curvatures of a space curve.

The frame of a curve is the unimodular matrix obtained from (c', c'', c''') by
dividing out the cube root of its determinant.  Along the special affine arc
length sigma that determinant is identically 1 and the logarithmic derivative
of the frame takes the fixed form

    [[0, 0,  chi1],
     [1, 0, -chi2],
     [0, 1,  0   ]]

whose two free entries are the curvatures.  Both are unchanged when the curve
is moved by any x -> Bx + tau with det B = 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curve_model import (
    EPS_DET,
    MIN_SAMPLES,
    CurveJet,
    SampledCurve,
    check_nondegenerate,
    det3,
    estimate_jet,
)
from .errors import DegenerateCurve, GridTooShort, NonPositiveMass
from .numerics import cumulative_integral, local_interpolate, local_polynomial_smooth

DEFAULT_SIGNATURE_SAMPLES = 200
# Smoothed arc length: the speed det^(1/6) is estimated on at most this many
# samples and smoothed with a bandwidth of this fraction of the span.
PROFILE_SAMPLES = 401
PROFILE_BANDWIDTH = 0.1
PROFILE_DEGREE = 4
# Stencil spacing for that speed estimate, as a fraction of the span.
PROFILE_SPACING = 0.0075
# Curvature jets: interior and end stencil spacing as fractions of the span.
JET_SPACING = 0.01
JET_END_SPACING = 0.005


@dataclass(frozen=True, eq=False)
class UnimodularFrame:
    matrix: np.ndarray

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.matrix))


@dataclass(frozen=True, eq=False)
class PullbackMatrix:
    """Coefficient of dt in the pulled-back Maurer-Cartan form."""

    matrix: np.ndarray


@dataclass(frozen=True, eq=False)
class ArcLengthProfile:
    params: np.ndarray
    sigma: np.ndarray
    total: float


@dataclass(frozen=True, eq=False)
class AffineSignature:
    """Curvatures sampled on a uniform arc-length grid starting at 0."""

    sigma: np.ndarray
    chi1: np.ndarray
    chi2: np.ndarray

    def __post_init__(self):
        n = len(self.sigma)
        if len(self.chi1) != n or len(self.chi2) != n:
            raise ValueError("sigma, chi1, chi2 must share length")

    def __len__(self) -> int:
        return len(self.sigma)

    @property
    def length(self) -> float:
        return float(self.sigma[-1]) if len(self.sigma) else 0.0


def _det_at(jet: CurveJet, index: int, eps: float) -> float:
    d = float(det3(jet.d1[index], jet.d2[index], jet.d3[index]))
    if not d > eps:
        raise DegenerateCurve(index, d)
    return d


def unimodular_frame(jet: CurveJet, index: int, eps: float = EPS_DET) -> UnimodularFrame:
    d = _det_at(jet, index, eps)
    return UnimodularFrame(jet.frame(index) / np.cbrt(d))


def maurer_cartan_pullback(jet: CurveJet, index: int, eps: float = EPS_DET) -> PullbackMatrix:
    """Determinant-ratio form of alpha^-1 alpha' at one sample.

    Entry (2,3) carries a minus sign so that on an arc-length jet the matrix
    reduces to the constant-curvature generator used everywhere else.
    """
    d = _det_at(jet, index, eps)
    c1, c2, c3, c4 = jet.d1[index], jet.d2[index], jet.d3[index], jet.d4[index]
    d4 = float(det3(c1, c2, c4))
    m = np.zeros((3, 3))
    m[0, 0] = m[1, 1] = -d4 / (3 * d)
    m[2, 2] = 2 * d4 / (3 * d)
    m[0, 2] = float(det3(c2, c3, c4)) / d
    m[1, 2] = -float(det3(c1, c3, c4)) / d
    m[1, 0] = m[2, 1] = 1.0
    return PullbackMatrix(m)


def arc_length_profile(jet: CurveJet, eps: float = EPS_DET) -> ArcLengthProfile:
    """Cumulative integral of det(c', c'', c''')**(1/6) from the first sample."""
    dets = check_nondegenerate(jet, eps)
    t = jet.params
    h = (t[-1] - t[0]) / (len(t) - 1)
    sigma = cumulative_integral(dets ** (1.0 / 6.0), h)
    if np.any(np.diff(sigma) <= 0):
        raise DegenerateCurve(int(np.argmax(np.diff(sigma) <= 0)))
    return ArcLengthProfile(t, sigma, float(sigma[-1]))


def smooth_arc_length_profile(curve: SampledCurve, eps: float = EPS_DET) -> ArcLengthProfile:
    """Arc length with the integrand smoothed before integration.

    Finite-difference roundoff makes det^(1/6) jitter from sample to sample;
    integrated, that jitter moves the arc-length samples along the curve and
    is then amplified by the fourth differences behind the curvatures.  Here
    the integrand is estimated on at most PROFILE_SAMPLES samples with
    widened stencils, passed through a local quartic smoother, integrated,
    and interpolated back.
    """
    check_nondegenerate(estimate_jet(curve), eps)
    t = curve.params
    if len(curve) > PROFILE_SAMPLES:
        coarse_t = np.linspace(t[0], t[-1], PROFILE_SAMPLES)
        coarse = SampledCurve(coarse_t, local_interpolate(t, curve.points, coarse_t))
    else:
        coarse = curve
    m = len(coarse)
    stride = max(1, round((m - 1) * PROFILE_SPACING))
    dets = check_nondegenerate(estimate_jet(coarse, stride, stride), eps)
    speed = local_polynomial_smooth(dets ** (1.0 / 6.0), PROFILE_BANDWIDTH * (m - 1), PROFILE_DEGREE)
    sigma = cumulative_integral(speed, coarse.uniform_step)
    if coarse is not curve:
        sigma = local_interpolate(coarse.params, sigma, t)
        sigma[0] = 0.0
    bad = np.flatnonzero(np.diff(sigma) <= 0)
    if bad.size:
        raise DegenerateCurve(int(bad[0]))
    return ArcLengthProfile(t, sigma, float(sigma[-1]))


def reparametrize(curve: SampledCurve, profile: ArcLengthProfile, n: int) -> SampledCurve:
    """Resample ``curve`` at n equally spaced arc-length values on [0, total].

    t(sigma) is read off the profile and c(t) off the samples, both by local
    degree-7 interpolation; the ends map to the ends exactly.
    """
    if n < MIN_SAMPLES:
        raise GridTooShort(f"need at least {MIN_SAMPLES} samples, got {n}")
    sigma = np.linspace(0.0, profile.total, n)
    t = local_interpolate(profile.sigma, profile.params, sigma)
    t[0], t[-1] = profile.params[0], profile.params[-1]
    pts = local_interpolate(curve.params, curve.points, t)
    pts[0], pts[-1] = curve.points[0], curve.points[-1]
    return SampledCurve(sigma, pts)


def arc_length_curve(curve: SampledCurve, n: int | None = None, eps: float = EPS_DET) -> SampledCurve:
    """The curve resampled by special affine arc length (n defaults to max(200, len))."""
    if n is None:
        n = max(DEFAULT_SIGNATURE_SAMPLES, len(curve))
    return reparametrize(curve, smooth_arc_length_profile(curve, eps), n)


def arc_length_jet(gamma: SampledCurve) -> CurveJet:
    """Jet of an arc-length curve with stencils spaced by JET_SPACING of its length."""
    n = len(gamma)
    stride = max(1, int((n - 1) * JET_SPACING))
    end_stride = min(stride, max(1, round((n - 1) * JET_END_SPACING)))
    return estimate_jet(gamma, stride, end_stride)


def curvatures(jet: CurveJet) -> tuple[np.ndarray, np.ndarray]:
    """(chi1, chi2) of a jet taken with respect to arc length."""
    return det3(jet.d2, jet.d3, jet.d4), det3(jet.d1, jet.d3, jet.d4)


def signature(curve: SampledCurve, n: int | None = None, eps: float = EPS_DET) -> AffineSignature:
    gamma = arc_length_curve(curve, n, eps)
    chi1, chi2 = curvatures(arc_length_jet(gamma))
    return AffineSignature(gamma.params, chi1, chi2)


def jet_signature(jet: CurveJet) -> AffineSignature:
    """Signature read directly from a jet already parametrised by arc length."""
    chi1, chi2 = curvatures(jet)
    return AffineSignature(jet.params - jet.params[0], chi1, chi2)


def conservation_laws(jet: CurveJet, index: int, mass: float) -> tuple[float, float]:
    """Mass-scaled curvatures (m^3 chi1, m^3 chi2) of a trajectory at one sample."""
    if not mass > 0:
        raise NonPositiveMass(f"mass must be positive, got {mass}")
    m3 = mass**3
    c1, c2, c3, c4 = jet.d1[index], jet.d2[index], jet.d3[index], jet.d4[index]
    return m3 * float(det3(c2, c3, c4)), m3 * float(det3(c1, c3, c4))
