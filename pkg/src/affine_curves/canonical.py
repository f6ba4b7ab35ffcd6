"""Constant-curvature curves: one-parameter subgroups exp(sigma K) and their classification."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .curve_model import MIN_SAMPLES, CurveJet, SampledCurve
from .errors import ClosedFormMismatch, GridTooShort, Overflow
from .invariants import signature
from .numerics import cumulative_integral

TAYLOR_TERMS = 16
SCALED_NORM = 0.5
CLASSIFY_EPS = 1e-6
CLOSED_FORM_TOL = 1e-9


@dataclass(frozen=True)
class FrenetMatrix:
    chi1: float
    chi2: float

    @property
    def matrix(self) -> np.ndarray:
        return frenet_matrix(self.chi1, self.chi2)

    def characteristic_roots(self) -> np.ndarray:
        """Roots of lambda^3 + chi2 lambda - chi1, the eigenvalues of the matrix."""
        return np.roots([1.0, 0.0, self.chi2, -self.chi1])


def frenet_matrix(chi1: float, chi2: float) -> np.ndarray:
    return np.array([[0.0, 0.0, chi1], [1.0, 0.0, -chi2], [0.0, 1.0, 0.0]])


class CaseLabel(str, enum.Enum):
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"
    V = "V"
    VI_PP = "VI-pp"
    VI_NN = "VI-nn"
    VI_NP = "VI-np"
    VI_PN = "VI-pn"

    def __str__(self) -> str:
        return self.value


def classify_case(chi1: float, chi2: float, eps: float = CLASSIFY_EPS) -> CaseLabel:
    """Case of a constant pair; |chi| <= eps counts as zero."""
    z1, z2 = abs(chi1) <= eps, abs(chi2) <= eps
    if z1 and z2:
        return CaseLabel.I
    if z1:
        return CaseLabel.II if chi2 > 0 else CaseLabel.III
    if z2:
        return CaseLabel.IV if chi1 > 0 else CaseLabel.V
    key = ("p" if chi1 > 0 else "n") + ("p" if chi2 > 0 else "n")
    return CaseLabel("VI-" + key)


def _expm_block(a: np.ndarray, squarings: int) -> np.ndarray:
    x = a / 2.0**squarings
    n = a.shape[-1]
    eye = np.broadcast_to(np.eye(n), a.shape)
    result = eye + x / TAYLOR_TERMS
    for k in range(TAYLOR_TERMS - 1, 0, -1):
        result = eye + (x @ result) / k
    for _ in range(squarings):
        result = result @ result
    return result


def expm(m) -> np.ndarray:
    """Matrix exponential by scaling and squaring around a 16-term Taylor series.

    Accepts one square matrix or a stack of them (leading axes).
    """
    a = np.asarray(m, dtype=float)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise ValueError(f"expected square matrices, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise Overflow("non-finite entries in exponent")
    flat = a.reshape((-1,) + a.shape[-2:])
    norms = np.abs(flat).sum(axis=-2).max(axis=-1)
    with np.errstate(divide="ignore"):
        squarings = np.maximum(0, np.ceil(np.log2(norms / SCALED_NORM))).astype(int)
    out = np.empty_like(flat)
    with np.errstate(over="ignore", invalid="ignore"):
        for s in np.unique(squarings):
            sel = squarings == s
            out[sel] = _expm_block(flat[sel], int(s))
    if not np.all(np.isfinite(out)):
        raise Overflow("matrix exponential overflowed")
    return out.reshape(a.shape)


def canonical_frames(chi1: float, chi2: float, sigma) -> np.ndarray:
    """exp(sigma K) for each sigma: columns are (c', c'', c''') of the canonical curve."""
    sigma = np.asarray(sigma, dtype=float)
    return expm(sigma[..., None, None] * frenet_matrix(chi1, chi2))


def canonical_jet(chi1: float, chi2: float, sigma) -> CurveJet:
    """Exact arc-length jet of the canonical curve, from the exponential."""
    f = canonical_frames(chi1, chi2, sigma)
    d4 = chi1 * f[:, :, 0] - chi2 * f[:, :, 1]
    return CurveJet(sigma, f[:, :, 0], f[:, :, 1], f[:, :, 2], d4)


def _cube_root_case(chi1: float, s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Shared by chi1 > 0 and chi1 < 0: a is the real cube root, so for chi1 < 0
    # M = e^{|a|s/2} cos, N = -e^{|a|s/2} sin, R = e^{-|a|s}.
    a = np.cbrt(chi1)
    r3 = np.sqrt(3.0)
    M = np.exp(-a * s / 2) * np.cos(r3 / 2 * a * s)
    N = np.exp(-a * s / 2) * np.sin(r3 / 2 * a * s)
    R = np.exp(a * s)
    p = r3 * N - M + R
    q = r3 * N + M - R
    diag = 2 * M / 3 + R / 3
    frame = np.stack(
        [
            np.stack([diag, -a / 3 * q, a * a / 3 * p], -1),
            np.stack([p / (3 * a), diag, -a / 3 * q], -1),
            np.stack([-q / (3 * a * a), p / (3 * a), diag], -1),
        ],
        -2,
    )
    curve = np.stack([p / (3 * a), (-r3 * N - M + R) / (3 * a * a), (2 * M + R) / (3 * chi1) - 1 / chi1], -1)
    return frame, curve


def closed_form(chi1: float, chi2: float, sigma, eps: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form (frame, curve) for cases I-V, with the curve starting at the origin.

    Raises ValueError for case VI, which has no closed form here.
    """
    s = np.asarray(sigma, dtype=float)
    case = classify_case(chi1, chi2, eps)
    one, zero = np.ones_like(s), np.zeros_like(s)
    if case is CaseLabel.I:
        frame = np.stack(
            [np.stack([one, zero, zero], -1), np.stack([s, one, zero], -1), np.stack([s**2 / 2, s, one], -1)], -2
        )
        return frame, np.stack([s, s**2 / 2, s**3 / 6], -1)
    if case in (CaseLabel.II, CaseLabel.III):
        k = np.sqrt(abs(chi2))
        if case is CaseLabel.II:
            cs, sn, sign = np.cos(k * s), np.sin(k * s), -1.0
        else:
            cs, sn, sign = np.cosh(k * s), np.sinh(k * s), 1.0
        frame = np.stack(
            [
                np.stack([one, zero, zero], -1),
                np.stack([sn / k, cs, sign * k * sn], -1),
                np.stack([sign * (cs - 1) / k**2, sn / k, cs], -1),
            ],
            -2,
        )
        curve = np.stack([s, sign * (cs - 1) / k**2, sign * (sn / k**3 - s / k**2)], -1)
        return frame, curve
    if case in (CaseLabel.IV, CaseLabel.V):
        return _cube_root_case(chi1, s)
    raise ValueError(f"no closed form for case {case}")


def _check_agreement(expected: np.ndarray, actual: np.ndarray, what: str) -> None:
    scale = np.maximum(1.0, np.abs(expected))
    err = float(np.max(np.abs(expected - actual) / scale))
    if not err <= CLOSED_FORM_TOL:
        raise ClosedFormMismatch(f"{what}: exponential path deviates from closed form by {err:.3g}")


def generate_canonical(chi1: float, chi2: float, sigma_max: float, n: int) -> SampledCurve:
    """Sample the constant-curvature curve with c(0) = 0 and frame(0) = identity.

    c' is the first column of exp(sigma K), integrated from the origin.  For
    the zero-chi1 cases the result is checked against the closed forms.
    """
    if not sigma_max > 0:
        raise ValueError("sigma_max must be positive")
    if n < MIN_SAMPLES:
        raise GridTooShort(f"need at least {MIN_SAMPLES} samples, got {n}")
    sigma = np.linspace(0.0, sigma_max, n)
    frames = canonical_frames(chi1, chi2, sigma)
    points = cumulative_integral(frames[:, :, 0], sigma[1] - sigma[0])
    if classify_case(chi1, chi2, 0.0) in (CaseLabel.I, CaseLabel.II, CaseLabel.III):
        frame_cf, curve_cf = closed_form(chi1, chi2, sigma)
        _check_agreement(frame_cf, frames, "frame")
        _check_agreement(curve_cf, points, "curve")
    return SampledCurve(sigma, points)


def roundtrip_constants(chi1: float, chi2: float, sigma_max: float, n: int) -> tuple[float, float]:
    """Generate a canonical curve, recover its signature, return the mean curvatures."""
    sig = signature(generate_canonical(chi1, chi2, sigma_max, n))
    return float(np.mean(sig.chi1)), float(np.mean(sig.chi2))
