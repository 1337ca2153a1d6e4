"""Ideal low-pass convolution kernel and the band-limit parameter.

The kernel h(t) = omega * sinc(omega * t) / pi (with sinc(x) = sin(x)/x)
is the impulse response of the ideal low-pass filter with cutoff omega in
(0, pi); convolving with it realizes the orthogonal projection of a
square-summable sequence onto the band-limited subspace.  The 2D variant
is the separable product kernel for an axis-aligned rectangular band,
which is this toolkit's extension of the 1D theory to grids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError


@dataclass(frozen=True)
class BandLimit:
    """Cutoff frequency in radians per sample; a pair of cutoffs for 2D."""

    omega: float | tuple[float, float]

    def __post_init__(self):
        axes = self.axes
        if len(axes) not in (1, 2):
            raise ParameterError("band limit must be a scalar or a pair")
        for w in axes:
            if not (0.0 < w < math.pi) or not math.isfinite(w):
                raise ParameterError(f"band limit must lie strictly inside (0, pi), got {w!r}")

    @property
    def axes(self) -> tuple[float, ...]:
        if isinstance(self.omega, tuple):
            return tuple(float(w) for w in self.omega)
        return (float(self.omega),)

    @property
    def ndim(self) -> int:
        return len(self.axes)

    @classmethod
    def from_pi_fraction(cls, frac: float | tuple[float, float]) -> "BandLimit":
        """Build a band limit from a fraction of pi (0.25 means 0.25*pi)."""
        if isinstance(frac, tuple):
            return cls(tuple(float(f) * math.pi for f in frac))
        return cls(float(frac) * math.pi)


def _as_axes(omega, ndim: int) -> tuple[float, ...]:
    bl = omega if isinstance(omega, BandLimit) else BandLimit(omega)
    if bl.ndim != ndim:
        raise ParameterError(f"expected a {ndim}D band limit, got {bl.ndim}D")
    return bl.axes


def lowpass_kernel(omega: BandLimit | float, t: int) -> float:
    """Evaluate h(t) = omega*sinc(omega*t)/pi at an integer lag.

    Even in t, peaks at h(0) = omega/pi, bounded by omega/pi everywhere.
    """
    (w,) = _as_axes(omega, 1)
    if t == 0:
        return w / math.pi
    return math.sin(w * t) / (math.pi * t)


def lowpass_kernel_2d(omega: BandLimit | tuple[float, float], t: tuple[int, int]) -> float:
    """Separable 2D kernel: product of the per-axis 1D kernels."""
    w1, w2 = _as_axes(omega, 2)
    return lowpass_kernel(w1, t[0]) * lowpass_kernel(w2, t[1])


def kernel_profile(omega: float, lags: np.ndarray) -> np.ndarray:
    """Vectorized h over an array of integer lags (np.sinc is sin(pi x)/(pi x))."""
    lags = np.asarray(lags, dtype=np.float64)
    return (omega / np.pi) * np.sinc(omega * lags / np.pi)
