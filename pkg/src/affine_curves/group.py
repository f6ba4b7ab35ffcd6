"""Special affine maps x -> Bx + tau with det B = 1, and a seeded map generator."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curve_model import SampledCurve
from .errors import InvalidMap, RandomRejectionExhausted

DET_RTOL = 1e-9
SERIAL_DET_TOL = 1e-6
MAX_DRAWS = 1000

# 64-bit multiplicative congruential generator (Steele and Vigna's multiplier).
MCG_MULTIPLIER = 0xF1357AEA2E62A9C5
_MASK64 = (1 << 64) - 1


def _adjugate(b: np.ndarray) -> np.ndarray:
    return np.array(
        [
            [b[1, 1] * b[2, 2] - b[1, 2] * b[2, 1], b[0, 2] * b[2, 1] - b[0, 1] * b[2, 2], b[0, 1] * b[1, 2] - b[0, 2] * b[1, 1]],
            [b[1, 2] * b[2, 0] - b[1, 0] * b[2, 2], b[0, 0] * b[2, 2] - b[0, 2] * b[2, 0], b[0, 2] * b[1, 0] - b[0, 0] * b[1, 2]],
            [b[1, 0] * b[2, 1] - b[1, 1] * b[2, 0], b[0, 1] * b[2, 0] - b[0, 0] * b[2, 1], b[0, 0] * b[1, 1] - b[0, 1] * b[1, 0]],
        ]
    )


def _det(b: np.ndarray) -> float:
    return float(b[0] @ _adjugate(b)[:, 0])


@dataclass(frozen=True, eq=False)
class SpecialAffineMap:
    B: np.ndarray
    tau: np.ndarray

    def __post_init__(self):
        b = np.array(self.B, dtype=float)
        tau = np.array(self.tau, dtype=float)
        if b.shape != (3, 3) or tau.shape != (3,):
            raise InvalidMap(f"B must be 3x3 and tau length 3, got {b.shape} and {tau.shape}")
        if not (np.all(np.isfinite(b)) and np.all(np.isfinite(tau))):
            raise InvalidMap("non-finite entries")
        d = _det(b)
        if not abs(d - 1.0) <= DET_RTOL:
            raise InvalidMap(f"det(B) = {d!r}, expected 1")
        b.setflags(write=False)
        tau.setflags(write=False)
        object.__setattr__(self, "B", b)
        object.__setattr__(self, "tau", tau)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        """Map a point or a stack of points (last axis 3)."""
        return np.asarray(x, dtype=float) @ self.B.T + self.tau

    def to_dict(self) -> dict:
        return {"B": [float(v) for v in self.B.ravel()], "tau": [float(v) for v in self.tau]}

    @classmethod
    def from_dict(cls, data: dict, tol: float = SERIAL_DET_TOL) -> SpecialAffineMap:
        """Parse ``{"B": [9 numbers row-major], "tau": [3 numbers]}``.

        A determinant within ``tol`` of 1 is accepted and B is rescaled onto
        det = 1 exactly; anything further off raises InvalidMap.
        """
        try:
            b = np.array(data["B"], dtype=float)
            tau = np.array(data["tau"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidMap(f"malformed map: {exc}") from exc
        if b.shape != (9,) or tau.shape != (3,):
            raise InvalidMap("map needs 9 entries in B and 3 in tau")
        b = b.reshape(3, 3)
        d = _det(b)
        if not abs(d - 1.0) <= tol:
            raise InvalidMap(f"det(B) = {d!r} differs from 1 by more than {tol}")
        return cls(b / np.cbrt(d), tau)


def identity() -> SpecialAffineMap:
    return SpecialAffineMap(np.eye(3), np.zeros(3))


def apply(m: SpecialAffineMap, curve: SampledCurve) -> SampledCurve:
    return SampledCurve(curve.params, m(curve.points))


def compose(a: SpecialAffineMap, b: SpecialAffineMap) -> SpecialAffineMap:
    """The map x -> a(b(x))."""
    return SpecialAffineMap(a.B @ b.B, a.B @ b.tau + a.tau)


def invert(m: SpecialAffineMap) -> SpecialAffineMap:
    inv = _adjugate(m.B) / _det(m.B)
    return SpecialAffineMap(inv, -inv @ m.tau)


class MCG64:
    """Multiplicative congruential generator on 64-bit words.

    The state is forced odd; outputs are the top 53 bits scaled into [0, 1).
    """

    def __init__(self, seed: int):
        self.state = (2 * int(seed) + 1) & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state * MCG_MULTIPLIER) & _MASK64
        return self.state

    def random(self) -> float:
        return (self.next_u64() >> 11) * 2.0**-53

    def uniform(self, lo: float, hi: float, size: int) -> np.ndarray:
        return np.array([lo + (hi - lo) * self.random() for _ in range(size)])


def random_map(seed: int, scale: float = 1.0) -> SpecialAffineMap:
    """Deterministic random special affine map with entries drawn from [-scale, scale].

    Near-singular draws (|det| <= 0.1 scale^3) are rejected.
    """
    if not scale > 0:
        raise ValueError("scale must be positive")
    rng = MCG64(seed)
    for _ in range(MAX_DRAWS):
        b = rng.uniform(-scale, scale, 9).reshape(3, 3)
        d = _det(b)
        if abs(d) > 0.1 * scale**3:
            break
    else:
        raise RandomRejectionExhausted(f"no usable draw in {MAX_DRAWS} tries (seed {seed})")
    if d < 0:
        b[:, 0] = -b[:, 0]
        d = -d
    b = b / np.cbrt(d)
    tau = rng.uniform(-scale, scale, 3)
    return SpecialAffineMap(b, tau)
