"""Per-signal denoising.

Two routes are provided: low-pass Fourier filtering, with the cut-off
frequency picked by generalized cross validation (GCV), and periodic
orthonormal wavelet shrinkage with the universal hard threshold, the noise
scale being estimated by the median absolute deviation (MAD) of the finest
detail coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .core import FourierCurve, GridCurve, as_signal

__all__ = [
    "fourier_coefficients",
    "fourier_smooth",
    "gcv_scores",
    "gcv_select_cutoff",
    "WaveletCoeffs",
    "dwt",
    "idwt",
    "mad_noise_estimate",
    "universal_threshold",
    "hard_threshold",
    "wavelet_smooth",
    "make_smoother",
]

_SQRT3 = math.sqrt(3.0)
_SQRT2 = math.sqrt(2.0)

#: Orthonormal low-pass filters, by name. "db4" is the 4-tap Daubechies
#: filter (two vanishing moments).
WAVELET_FILTERS = {
    "haar": np.array([1.0, 1.0]) / _SQRT2,
    "db4": np.array(
        [1.0 + _SQRT3, 3.0 + _SQRT3, 3.0 - _SQRT3, 1.0 - _SQRT3]
    )
    / (4.0 * _SQRT2),
}


# ---------------------------------------------------------------------------
# Fourier route
# ---------------------------------------------------------------------------

def max_fourier_cutoff(n: int) -> int:
    """Largest cut-off that keeps the GCV denominator away from zero."""
    return (n - 2) // 2


def default_gcv_search_cutoff(n: int) -> int:
    """Search bound used by the "fourier-gcv" smoother spec.

    Capped at n/4 so the fit always keeps at least half the degrees of
    freedom; searching all the way to the Nyquist limit lets GCV pick a
    saturated, essentially unsmoothed fit whenever the last residual
    coefficient happens to be near zero.
    """
    return min(n // 4, max_fourier_cutoff(n))


def fourier_coefficients(values, cutoff: int) -> np.ndarray:
    """One-sided empirical Fourier coefficients c_0..c_cutoff.

    c_k = (1/n) * sum_{l=1..n} y_l exp(-2 pi i k l / n), matching the
    1-based sampling grid t_l = l/n.
    """
    y = as_signal(values)
    n = y.size
    if cutoff < 0:
        raise ValueError("cutoff must be non-negative")
    if cutoff > (n - 1) // 2:
        raise ValueError(
            f"cutoff {cutoff} too large for n={n}; max is {(n - 1) // 2}"
        )
    spec = np.fft.fft(y)[: cutoff + 1] / n
    k = np.arange(cutoff + 1)
    # the stored array holds y_1..y_n, one sample ahead of the FFT's 0-base
    return spec * np.exp(-2j * np.pi * k / n)


def fourier_smooth(values, cutoff: int) -> FourierCurve:
    """Low-pass fit keeping harmonics |k| <= cutoff."""
    return FourierCurve(fourier_coefficients(values, cutoff))


def gcv_scores(values, max_cutoff: int) -> np.ndarray:
    """GCV(lambda) for every lambda in 0..max_cutoff.

    GCV(lambda) = (RSS(lambda)/n) / (1 - (2*lambda+1)/n)^2 with RSS the
    residual sum of squares of the low-pass fit at the grid points; the
    model uses 2*lambda+1 real coefficients.
    """
    y = as_signal(values)
    n = y.size
    if max_cutoff < 0:
        raise ValueError("max_cutoff must be non-negative")
    if 2 * max_cutoff + 1 >= n:
        raise ValueError(
            f"max_cutoff {max_cutoff} leaves no residual degrees of freedom "
            f"for n={n}; max is {max_fourier_cutoff(n)}"
        )
    power = np.abs(np.fft.fft(y)) ** 2 / n
    lambdas = np.arange(max_cutoff + 1)
    # energy captured by |k| <= lambda, both frequency signs
    captured = np.cumsum(power)[lambdas] + np.concatenate(
        ([0.0], np.cumsum(power[::-1])[: max_cutoff])
    )
    rss = np.maximum(power.sum() - captured, 0.0)
    shrink = 1.0 - (2.0 * lambdas + 1.0) / n
    return (rss / n) / shrink**2


def gcv_select_cutoff(values, max_cutoff: int | None = None) -> int:
    """Cut-off minimizing the GCV score; ties go to the smallest lambda."""
    y = as_signal(values)
    if max_cutoff is None:
        max_cutoff = max_fourier_cutoff(y.size)
    return int(np.argmin(gcv_scores(y, max_cutoff)))


# ---------------------------------------------------------------------------
# Wavelet route
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WaveletCoeffs:
    """Periodic orthonormal wavelet decomposition of an n = 2**M signal.

    ``approx`` holds the 2**level0 scaling coefficients; ``details[i]``
    holds the detail coefficients at level level0 + i, so the last block is
    the finest level M - 1. ``threshold`` and ``noise_estimate`` are filled
    in by :func:`hard_threshold`.
    """

    approx: np.ndarray
    details: tuple
    wavelet: str
    level0: int
    threshold: float | None = None
    noise_estimate: float | None = None

    @property
    def n(self) -> int:
        return self.approx.size + sum(d.size for d in self.details)

    @property
    def finest_level(self) -> int:
        return self.level0 + len(self.details) - 1


def _filters(wavelet: str):
    try:
        lo = WAVELET_FILTERS[wavelet]
    except KeyError:
        raise ValueError(
            f"unknown wavelet {wavelet!r}; choose from "
            f"{sorted(WAVELET_FILTERS)}"
        ) from None
    # quadrature mirror: hi[m] = (-1)^m lo[T-1-m]
    hi = (-1.0) ** np.arange(lo.size) * lo[::-1]
    return lo, hi


def _check_dyadic(n: int) -> int:
    m = int(round(math.log2(n)))
    if n < 2 or 2**m != n:
        raise ValueError(f"signal length {n} is not a power of two")
    return m


def _analysis_step(a, lo, hi):
    half = a.size // 2
    idx = (2 * np.arange(half)[:, None] + np.arange(lo.size)) % a.size
    win = a[idx]
    return win @ lo, win @ hi


def _synthesis_step(approx, detail, lo, hi):
    n = 2 * approx.size
    idx = (2 * np.arange(approx.size)[:, None] + np.arange(lo.size)) % n
    out = np.zeros(n)
    np.add.at(out, idx, np.outer(approx, lo) + np.outer(detail, hi))
    return out


def dwt(values, wavelet: str = "db4", level0: int = 3) -> WaveletCoeffs:
    """Periodic discrete wavelet transform down to level ``level0``.

    Requires a power-of-two length; the transform is orthonormal, so the
    round trip through :func:`idwt` reproduces the input exactly.
    """
    y = as_signal(values)
    top = _check_dyadic(y.size)
    if not 0 <= level0 <= top - 1:
        raise ValueError(
            f"level0 must lie in [0, {top - 1}] for n={y.size}, got {level0}"
        )
    lo, hi = _filters(wavelet)
    approx = y
    details = []
    for _ in range(top - level0):
        approx, detail = _analysis_step(approx, lo, hi)
        details.append(detail)
    return WaveletCoeffs(
        approx=approx,
        details=tuple(reversed(details)),
        wavelet=wavelet,
        level0=level0,
    )


def idwt(coeffs: WaveletCoeffs) -> np.ndarray:
    """Invert :func:`dwt`."""
    lo, hi = _filters(coeffs.wavelet)
    approx = coeffs.approx
    for detail in coeffs.details:
        approx = _synthesis_step(approx, detail, lo, hi)
    return approx


def mad_noise_estimate(detail_coeffs) -> float:
    """Noise scale from the median absolute deviation about the median.

    Returns median(|beta - median(beta)|) / 0.6745, the standard
    consistency scaling for Gaussian noise.
    """
    beta = np.asarray(detail_coeffs, dtype=float)
    if beta.size == 0:
        raise ValueError("need at least one detail coefficient")
    if not np.all(np.isfinite(beta)):
        raise ValueError("detail coefficients must be finite")
    return float(np.median(np.abs(beta - np.median(beta))) / 0.6745)


def universal_threshold(sigma: float, n: int) -> float:
    """sigma * sqrt(2 log n)."""
    return float(sigma * math.sqrt(2.0 * math.log(n)))


def hard_threshold(coeffs: WaveletCoeffs) -> WaveletCoeffs:
    """Zero every detail coefficient below the universal threshold.

    The noise scale is the MAD estimate from the finest-level details, so a
    noiseless signal gets threshold 0 and survives untouched. Scaling
    coefficients always survive.
    """
    sigma = mad_noise_estimate(coeffs.details[-1])
    thr = universal_threshold(sigma, coeffs.n)
    kept = tuple(np.where(np.abs(d) >= thr, d, 0.0) for d in coeffs.details)
    return replace(
        coeffs, details=kept, threshold=thr, noise_estimate=sigma
    )


def wavelet_smooth(values, wavelet: str = "db4", level0: int = 3) -> GridCurve:
    """Denoise by hard thresholding and return the grid-form curve."""
    return GridCurve(idwt(hard_threshold(dwt(values, wavelet, level0))))


# ---------------------------------------------------------------------------
# Smoother specifications
# ---------------------------------------------------------------------------

def make_smoother(spec):
    """Turn a smoother spec into a callable signal -> periodic curve.

    Accepted specs: "fourier-gcv", "fourier-fixed:<cutoff>",
    "wavelet:<filter>:<level0>", "none" (linear interpolation of the raw
    samples), or any callable, returned unchanged.
    """
    if callable(spec):
        return spec
    if not isinstance(spec, str):
        raise ValueError(f"bad smoother spec {spec!r}")
    name, _, rest = spec.partition(":")
    if name == "fourier-gcv" and not rest:
        return lambda y: fourier_smooth(
            y, gcv_select_cutoff(y, default_gcv_search_cutoff(len(y)))
        )
    if name == "fourier-fixed":
        try:
            cutoff = int(rest)
        except ValueError:
            raise ValueError(
                f"bad smoother spec {spec!r}: expected fourier-fixed:<int>"
            ) from None
        return lambda y: fourier_smooth(y, cutoff)
    if name == "wavelet":
        parts = rest.split(":") if rest else []
        wavelet = parts[0] if parts and parts[0] else "db4"
        level0 = int(parts[1]) if len(parts) > 1 else 3
        if wavelet not in WAVELET_FILTERS:
            raise ValueError(f"unknown wavelet {wavelet!r}")
        return lambda y: wavelet_smooth(y, wavelet, level0)
    if name == "none" and not rest:
        return GridCurve
    raise ValueError(f"bad smoother spec {spec!r}")
