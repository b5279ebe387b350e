"""Long-record segmentation and dataset file I/O.

A long recording (for instance an exported single-lead ECG) is cut into
equal-length segments centered on detected peaks, giving the stack of
signals the estimators work on. Datasets travel as CSV (one signal per
row) and estimation results as JSON; both round-trip losslessly because
floats are written with shortest round-trip formatting.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks

from .core import AlignmentResult, as_signal_matrix

__all__ = [
    "Record",
    "SegmentationConfig",
    "detect_peaks",
    "segment",
    "default_beat_window",
    "DatasetFormatError",
    "load_signals",
    "store_signals",
    "load_record",
    "store_result",
    "load_result",
]


class DatasetFormatError(ValueError):
    """Raised for malformed dataset files, naming the offending cell."""


@dataclass(frozen=True)
class Record:
    """A long single-channel recording with its sampling rate (Hz)."""

    samples: np.ndarray
    sample_rate: float

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim != 1 or samples.size < 2:
            raise ValueError("record needs a 1-D array of at least 2 samples")
        if not np.all(np.isfinite(samples)):
            raise ValueError("record contains non-finite samples")
        if not self.sample_rate > 0:
            raise ValueError("sample_rate must be positive")
        object.__setattr__(self, "samples", samples)


@dataclass(frozen=True)
class SegmentationConfig:
    """Peak detection and windowing parameters, all in sample units."""

    window: int
    min_peak_distance: int = 1
    min_prominence: float = 0.0

    def __post_init__(self):
        if self.window < 4 or self.window % 2:
            raise ValueError("window must be an even integer >= 4")
        if self.min_peak_distance < 1:
            raise ValueError("min_peak_distance must be at least 1")


def detect_peaks(record: Record, config: SegmentationConfig) -> np.ndarray:
    """Indices (0-based) of prominent local maxima, thinned by distance.

    Keeps local maxima whose prominence reaches ``min_prominence``;
    whenever two survivors are closer than ``min_peak_distance`` the
    smaller one is dropped. May be empty.
    """
    prominence = config.min_prominence if config.min_prominence > 0 else None
    peaks, _ = find_peaks(record.samples, distance=config.min_peak_distance,
                          prominence=prominence)
    return peaks.astype(int)


def segment(record: Record, peaks, window: int):
    """Cut equal-length windows centered on the peaks.

    Each peak with enough room on both sides yields the slice of length
    ``window`` in which the peak sits at 0-based offset window/2 - 1.
    Peaks too close to either end are skipped and returned separately.

    Returns
    -------
    signals : (J, window) array
    skipped : list of peak indices that did not fit
    """
    if window < 4 or window % 2:
        raise ValueError("window must be an even integer >= 4")
    samples = record.samples
    if window >= samples.size:
        raise ValueError(
            f"window {window} must be shorter than the record "
            f"({samples.size} samples)"
        )
    half = window // 2
    rows = []
    skipped = []
    for peak in np.asarray(peaks, dtype=int):
        start = peak - half + 1
        if start < 0 or start + window > samples.size:
            skipped.append(int(peak))
            continue
        rows.append(samples[start:start + window])
    signals = (np.stack(rows) if rows
               else np.empty((0, window)))
    return signals, skipped


def default_beat_window(sample_rate: float, power_of_two: bool = False) -> int:
    """Window covering roughly 0.7 s, optionally snapped to a power of two.

    The snap keeps wavelet smoothing available for the segmented beats.
    """
    raw = 0.7 * sample_rate
    if power_of_two:
        exponent = max(2, int(round(np.log2(raw))))
        return 2**exponent
    w = int(round(raw))
    return max(4, w + (w % 2))


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------

def _parse_float(cell: str, row: int, col: int) -> float:
    try:
        return float(cell)
    except ValueError:
        raise DatasetFormatError(
            f"row {row}, column {col}: {cell!r} is not numeric"
        ) from None


def _looks_like_header(cells) -> bool:
    for cell in cells:
        try:
            float(cell)
        except ValueError:
            return True
    return False


def load_signals(path) -> np.ndarray:
    """Read a dataset CSV: one signal per row, optional header row."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        raw = [row for row in reader if row]
    if not raw:
        raise DatasetFormatError(f"{path}: empty dataset")
    start = 1 if _looks_like_header(raw[0]) else 0
    if start == len(raw):
        raise DatasetFormatError(f"{path}: header but no data rows")
    width = len(raw[start])
    rows = []
    for i, cells in enumerate(raw[start:], start=start + 1):
        if len(cells) != width:
            raise DatasetFormatError(
                f"row {i}: expected {width} values, got {len(cells)}"
            )
        rows.append([
            _parse_float(cell, i, j + 1) for j, cell in enumerate(cells)
        ])
    return np.asarray(rows, dtype=float)


def store_signals(signals, path) -> None:
    """Write a dataset CSV with shortest round-trip float formatting."""
    X = as_signal_matrix(np.asarray(signals, dtype=float))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in X:
            writer.writerow([repr(float(v)) for v in row])


def load_record(path, sample_rate: float) -> Record:
    """Read a single-column CSV of samples into a Record."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        raw = [row for row in reader if row]
    if not raw:
        raise DatasetFormatError(f"{path}: empty record")
    start = 1 if _looks_like_header(raw[0]) else 0
    samples = []
    for i, cells in enumerate(raw[start:], start=start + 1):
        if len(cells) != 1:
            raise DatasetFormatError(
                f"row {i}: expected a single column, got {len(cells)}"
            )
        samples.append(_parse_float(cells[0], i, 1))
    return Record(np.asarray(samples), sample_rate)


def store_result(result: AlignmentResult, path) -> None:
    """Write an alignment result as JSON (lossless float round trip)."""
    payload = {
        "params": np.asarray(result.params, dtype=float).tolist(),
        "mean_curve": np.asarray(result.mean_curve, dtype=float).tolist(),
        "trace": [float(v) for v in result.trace],
        "iterations": int(result.iterations),
        "converged": bool(result.converged),
        "step_sizes": [float(v) for v in result.step_sizes],
        "backtracks": [int(v) for v in result.backtracks],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def load_result(path) -> AlignmentResult:
    """Read back a JSON file written by :func:`store_result`."""
    with open(path) as fh:
        payload = json.load(fh)
    return AlignmentResult(
        params=np.asarray(payload["params"], dtype=float),
        mean_curve=np.asarray(payload["mean_curve"], dtype=float),
        trace=list(payload["trace"]),
        iterations=int(payload["iterations"]),
        converged=bool(payload["converged"]),
        step_sizes=list(payload.get("step_sizes", [])),
        backtracks=list(payload.get("backtracks", [])),
    )
