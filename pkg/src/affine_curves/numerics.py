"""Stencil machinery: finite differences, cumulative quadrature, local interpolation.

All weights are derived exactly in rational arithmetic from the moment
conditions of the underlying interpolating polynomial, then rounded once to
float.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import factorial

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

FD_WIDTH = 7
QUAD_WIDTH = 8
INTERP_WIDTH = 8


def _solve_exact(matrix: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    n = len(rhs)
    a = [row[:] + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next(r for r in range(col, n) if a[r][col] != 0)
        a[col], a[pivot] = a[pivot], a[col]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col] / a[col][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[i][n] / a[i][i] for i in range(n)]


@lru_cache(maxsize=None)
def fd_weights(offsets: tuple[int, ...], order: int) -> np.ndarray:
    """Weights w with sum_j w_j f(x + o_j h) ~ h**order f^(order)(x); offsets may be Fractions."""
    n = len(offsets)
    if order >= n:
        raise ValueError(f"{n} nodes cannot resolve derivative order {order}")
    vander = [[Fraction(o) ** k for o in offsets] for k in range(n)]
    rhs = [Fraction(factorial(order)) if k == order else Fraction(0) for k in range(n)]
    w = np.array([float(x) for x in _solve_exact(vander, rhs)])
    w.setflags(write=False)
    return w


@lru_cache(maxsize=None)
def interval_weights(offsets: tuple[int, ...]) -> np.ndarray:
    """Weights w with sum_j w_j f(x + o_j h) ~ (1/h) * integral of f over [x, x+h]."""
    n = len(offsets)
    vander = [[Fraction(o) ** k for o in offsets] for k in range(n)]
    rhs = [Fraction(1, k + 1) for k in range(n)]
    w = np.array([float(x) for x in _solve_exact(vander, rhs)])
    w.setflags(write=False)
    return w


def _window_start(i: int, n: int, width: int, left: int) -> int:
    return min(max(i - left, 0), n - width)


def derivative(
    values: np.ndarray, h: float, order: int, width: int = FD_WIDTH, stride: int = 1, end_stride: int | None = None
) -> np.ndarray:
    """Finite-difference derivative along axis 0 on a uniform grid of step h.

    Interior samples use central stencils of ``width`` points spaced ``stride``
    samples apart.  Closer to an end the spacing drops to ``end_stride``
    (default: ``stride``), still centred while it fits and one-sided after
    that, so the output has the input's length.  Wider spacing trades
    truncation error for much less roundoff amplification.
    """
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    stride = int(stride)
    end_stride = stride if end_stride is None else min(int(end_stride), stride)
    half = width // 2
    if stride < 1 or end_stride < 1:
        raise ValueError("strides must be positive")
    if n < (width - 1) * end_stride + 1:
        raise ValueError(f"need at least {(width - 1) * end_stride + 1} samples, got {n}")
    out = np.empty_like(values)
    central = fd_weights(tuple(range(-half, half + 1)), order)
    taps = np.arange(-half, half + 1)
    inner = np.arange(half * stride, n - half * stride)
    band = np.arange(half * end_stride, n - half * end_stride)
    band = band[(band < half * stride) | (band >= n - half * stride)]
    for k, idx in ((stride, inner), (end_stride, band)):
        if idx.size:
            out[idx] = np.tensordot(values[idx[:, None] + k * taps], central, axes=(1, 0)) / (k * h) ** order
    k = end_stride
    span = (width - 1) * k
    for i in list(range(half * k)) + list(range(n - half * k, n)):
        s = min(max(i - half * k, 0), n - 1 - span)
        w = fd_weights(tuple(Fraction(s + j * k - i, k) for j in range(width)), order)
        out[i] = np.tensordot(w, values[s:s + span + 1:k], axes=(0, 0)) / (k * h) ** order
    return out


def cumulative_integral(values: np.ndarray, h: float, width: int = QUAD_WIDTH) -> np.ndarray:
    """Running integral from the first sample, along axis 0, uniform step h.

    Each interval is integrated exactly for the degree ``width - 1`` polynomial
    through the ``width`` nearest samples; the result starts at 0.
    """
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    if n < width:
        raise ValueError(f"need at least {width} samples, got {n}")
    left = width // 2 - 1
    pieces = np.empty((n - 1,) + values.shape[1:])
    first, last = left, n - width + left  # intervals covered by the centred window
    central = interval_weights(tuple(range(-left, width - left)))
    windows = sliding_window_view(values, width, axis=0)
    pieces[first:last + 1] = windows[: last - first + 1] @ central
    for i in list(range(first)) + list(range(last + 1, n - 1)):
        s = _window_start(i, n, width, left)
        w = interval_weights(tuple(range(s - i, s - i + width)))
        pieces[i] = np.tensordot(w, values[s:s + width], axes=(0, 0))
    out = np.zeros_like(values)
    out[1:] = np.cumsum(pieces * h, axis=0)
    return out


def local_interpolate(x: np.ndarray, y: np.ndarray, xq: np.ndarray, width: int = INTERP_WIDTH) -> np.ndarray:
    """Piecewise Lagrange interpolation through the ``width`` nodes nearest each query.

    ``x`` must be strictly increasing (not necessarily uniform); ``y`` is indexed
    along axis 0. Queries outside ``[x[0], x[-1]]`` use the end windows.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xq = np.asarray(xq, dtype=float)
    n = x.shape[0]
    width = min(width, n)
    idx = np.clip(np.searchsorted(x, xq, side="right") - 1, 0, n - 2)
    start = np.clip(idx - (width // 2 - 1), 0, n - width)
    nodes = start[:, None] + np.arange(width)  # (q, width)
    xs = x[nodes]
    diff = xq[:, None] - xs  # (q, width)
    denom = xs[:, :, None] - xs[:, None, :]  # (q, width, width)
    eye = np.eye(width, dtype=bool)
    denom[:, eye] = 1.0
    ratio = diff[:, None, :] / denom
    ratio[:, eye] = 1.0
    weights = ratio.prod(axis=2)  # (q, width)
    return np.einsum("qw,qw...->q...", weights, y[nodes])


def _local_fit_row(offsets: np.ndarray, bandwidth: float, degree: int) -> np.ndarray:
    # Weights giving the value at offset 0 of a Gaussian-weighted least-squares polynomial.
    u = offsets / bandwidth
    w = np.exp(-0.5 * u * u)
    vw = np.vander(u, degree + 1, increasing=True) * w[:, None]
    gram = np.vander(u, degree + 1, increasing=True).T @ vw
    return np.linalg.solve(gram, np.eye(degree + 1)[0]) @ vw.T


def local_polynomial_smooth(values: np.ndarray, bandwidth: float, degree: int = 4) -> np.ndarray:
    """Kernel-weighted local polynomial regression on a uniform grid (bandwidth in samples).

    The window slides continuously into the ends, so the output stays smooth
    there instead of switching to a separate end fit.
    """
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    if n <= degree + 1 or bandwidth <= 0:
        return values.copy()
    r = min(int(np.ceil(4 * bandwidth)), (n - 1) // 2)
    width = 2 * r + 1
    out = np.empty_like(values)
    centre = _local_fit_row(np.arange(-r, r + 1, dtype=float), bandwidth, degree)
    out[r:n - r] = sliding_window_view(values, width, axis=0) @ centre
    for i in range(r):
        row = _local_fit_row(np.arange(width, dtype=float) - i, bandwidth, degree)
        out[i] = row @ values[:width]
        out[n - 1 - i] = row @ values[::-1][:width]
    return out
