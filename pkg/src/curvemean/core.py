"""Shared domain types: sampled signals, periodic curve representations,
and the zero-mean constraint on warp-parameter ensembles.

A sampled signal is a 1-D float array of n >= 2 finite values; sample l
(0-based index l-1) is the observation at t = l/n, and every signal is
treated as 1-periodic, so t = 1 wraps onto t = 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "as_signal",
    "as_signal_matrix",
    "grid_points",
    "FourierCurve",
    "GridCurve",
    "project_zero_mean",
    "is_zero_mean",
    "AlignmentResult",
]


def as_signal(values) -> np.ndarray:
    """Validate and return one signal as a float64 array of length >= 2."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"signal must be 1-D, got shape {arr.shape}")
    if arr.size < 2:
        raise ValueError(f"signal needs at least 2 samples, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("signal contains non-finite values")
    return arr


def as_signal_matrix(X, min_signals: int = 1) -> np.ndarray:
    """Validate a (J, n) stack of equal-length signals."""
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise ValueError(f"expected a (J, n) array, got shape {arr.shape}")
    if arr.shape[0] < min_signals:
        raise ValueError(
            f"need at least {min_signals} signals, got {arr.shape[0]}"
        )
    if arr.shape[1] < 2:
        raise ValueError("signals need at least 2 samples")
    if not np.all(np.isfinite(arr)):
        raise ValueError("signal matrix contains non-finite values")
    return arr


def grid_points(n: int) -> np.ndarray:
    """Sampling grid t_l = l/n for l = 1..n (so the last point is t = 1)."""
    if n < 1:
        raise ValueError("n must be positive")
    return np.arange(1, n + 1) / float(n)


def _check_times(t):
    arr = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("evaluation points must be finite")
    return arr


def _as_given(out, t):
    return float(out) if np.isscalar(t) or np.ndim(t) == 0 else out


class FourierCurve:
    """Real 1-periodic curve stored as one-sided Fourier coefficients.

    ``coeffs[k]`` multiplies exp(2*pi*i*k*t) for k = 0..cutoff; negative
    frequencies are implied by conjugate symmetry, so evaluations are real.
    The imaginary part of ``coeffs[0]`` is discarded.
    """

    def __init__(self, coeffs):
        arr = np.asarray(coeffs, dtype=complex)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("coeffs must be a non-empty 1-D array")
        if not np.all(np.isfinite(arr)):
            raise ValueError("coeffs must be finite")
        arr = arr.copy()
        arr[0] = arr[0].real
        arr.setflags(write=False)
        self.coeffs = arr

    @property
    def cutoff(self) -> int:
        return self.coeffs.size - 1

    def _phases(self, t):
        k = np.arange(1, self.coeffs.size)
        return np.exp(2j * np.pi * np.multiply.outer(np.mod(t, 1.0), k))

    def value(self, t):
        """Evaluate at t, any real number or array (1-periodic)."""
        tt = _check_times(t)
        out = self.coeffs[0].real + 2.0 * np.real(
            self._phases(tt) @ self.coeffs[1:]
        )
        return _as_given(out, t)

    def derivative(self, t):
        """Evaluate the exact derivative of the trigonometric series."""
        tt = _check_times(t)
        k = np.arange(1, self.coeffs.size)
        dcoeffs = 2j * np.pi * k * self.coeffs[1:]
        out = 2.0 * np.real(self._phases(tt) @ dcoeffs)
        out = np.zeros_like(tt) + out  # cutoff 0: constant curve
        return _as_given(out, t)

    def __repr__(self):
        return f"FourierCurve(cutoff={self.cutoff})"


class GridCurve:
    """Real 1-periodic curve: linear interpolation of n grid samples.

    Sample l (0-based l-1) sits at t = l/n; the interpolant wraps around,
    connecting the last sample back to the first.
    """

    def __init__(self, values):
        self.values = as_signal(values)
        self.values.setflags(write=False)

    @property
    def n(self) -> int:
        return self.values.size

    def _locate(self, t):
        n = self.values.size
        x = np.mod(_check_times(t), 1.0) * n - 1.0
        i0 = np.floor(x).astype(int)
        frac = x - i0
        return i0 % n, (i0 + 1) % n, frac

    def value(self, t):
        left, right, frac = self._locate(t)
        out = (1.0 - frac) * self.values[left] + frac * self.values[right]
        return _as_given(out, t)

    def derivative(self, t):
        """Slope of the interpolant (right-sided at the knots)."""
        left, right, _ = self._locate(t)
        out = (self.values[right] - self.values[left]) * self.values.size
        return _as_given(out, t)

    def __repr__(self):
        return f"GridCurve(n={self.n})"


def project_zero_mean(raw) -> np.ndarray:
    """Project J parameter vectors onto the zero-sum constraint set.

    Subtracts the across-signal mean from every vector, so the output sums
    to zero component-wise. Idempotent up to rounding.
    """
    arr = np.asarray(raw, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise ValueError("need a non-empty (J, p) parameter array")
    if not np.all(np.isfinite(arr)):
        raise ValueError("parameters contain non-finite values")
    return arr - arr.mean(axis=0, keepdims=True)


def is_zero_mean(params, rtol_per_signal: float = 1e-12) -> bool:
    """True when the component-wise sums are within 1e-12 * J of zero."""
    arr = np.asarray(params, dtype=float)
    J = arr.shape[0]
    return bool(np.all(np.abs(arr.sum(axis=0)) <= rtol_per_signal * J))


@dataclass
class AlignmentResult:
    """Outcome of a mean-shape estimation run.

    Attributes
    ----------
    params : ndarray of shape (J, p)
        Estimated warp parameters, one row per signal, in the
        back-transform convention: the mean curve is the average of
        ``curve_j(warp(-params[j], t))``.
    mean_curve : ndarray of shape (n,)
        The estimated mean shape evaluated on the grid t_l = l/n.
    trace : list of float
        Objective values per accepted iteration (or per round for the
        template-based estimator), starting from the initial value.
    iterations : int
        Number of accepted steps / completed rounds.
    converged : bool
        True when the run stopped via its stopping rule rather than by
        hitting the iteration cap.
    step_sizes : list of float
        Accepted step length per iteration (empty for non-gradient runs).
    backtracks : list of int
        Number of step-shrink retries per accepted iteration.
    """

    params: np.ndarray
    mean_curve: np.ndarray
    trace: list = field(default_factory=list)
    iterations: int = 0
    converged: bool = True
    step_sizes: list = field(default_factory=list)
    backtracks: list = field(default_factory=list)
