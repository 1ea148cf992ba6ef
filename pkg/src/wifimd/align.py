"""Start/end detection and fixed-size alignment of Doppler-time signatures."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .caf import DopplerSpectrogram
from .errors import InvalidArgument, NoMotionDetected
from .waveform import MotionClass

N_DOPPLER = 51
N_TIME = 50
SIG_SIZE = N_DOPPLER * N_TIME


@dataclass(frozen=True)
class DetectionBounds:
    start_bin: int
    end_bin: int
    std_trace: np.ndarray
    threshold: float = float("nan")

    @property
    def width(self) -> int:
        return self.end_bin - self.start_bin + 1


@dataclass(frozen=True)
class AlignedSignature:
    matrix: np.ndarray  # (51, 50) in [0, 1]
    label: Optional[MotionClass] = None
    channel: str = ""
    bounds: Optional[DetectionBounds] = None

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (N_DOPPLER, N_TIME):
            raise InvalidArgument(f"aligned signature must be {N_DOPPLER}x{N_TIME}, got {m.shape}")
        object.__setattr__(self, "matrix", m)

    @property
    def vector(self) -> np.ndarray:
        return vectorize(self.matrix)


def doppler_weights(n_bins: int, dc_bin: Optional[int] = None) -> np.ndarray:
    """Squared bin distance from DC; the DC bin itself gets weight 1."""
    if dc_bin is None:
        dc_bin = n_bins // 2
    w = (np.arange(n_bins) - dc_bin).astype(float) ** 2
    w[dc_bin] = 1.0
    return w


def _pair(X, I):
    X = np.asarray(X, dtype=float)
    I = np.asarray(I, dtype=float)
    if X.shape[0] != I.shape[0]:
        raise InvalidArgument(f"length mismatch: {X.shape[0]} bins vs {I.shape[0]} weights")
    return X, I


def weighted_mean(X, I):
    """``sum(I * X) / N``.

    Divides by the bin count N, not by the weight total. ``X`` may be a
    matrix with bins along axis 0, giving one value per column.
    """
    X, I = _pair(X, I)
    return np.tensordot(I, X, axes=(0, 0)) / X.shape[0]


def weighted_std(X, I):
    """``sqrt(sum((I * |X - mean|)^2) / sum(I))`` with the weighted mean above."""
    X, I = _pair(X, I)
    m = weighted_mean(X, I)
    dev = I.reshape((-1,) + (1,) * (X.ndim - 1)) * np.abs(X - m)
    return np.sqrt(np.sum(dev ** 2, axis=0) / I.sum())


def std_trace(spec: DopplerSpectrogram, I=None) -> np.ndarray:
    """Weighted standard deviation of every spectrogram column."""
    if I is None:
        I = doppler_weights(spec.n_bins, spec.dc_bin)
    return np.asarray(weighted_std(spec.values, I), dtype=float)


def default_threshold(trace) -> float:
    """``median + 3 * MAD`` of the per-column trace."""
    trace = np.asarray(trace, dtype=float)
    med = np.median(trace)
    return float(med + 3.0 * np.median(np.abs(trace - med)))


def bounds_from_trace(trace, threshold: float) -> tuple[int, int]:
    """Three-consecutive-bin rule on a precomputed trace.

    Start is the first of three consecutive values above ``threshold``; end
    is one before the first later run of three values below it, or the last
    bin if no such run exists.
    """
    trace = np.asarray(trace, dtype=float)
    T = trace.size
    above = trace > threshold
    below = trace < threshold
    start = next((t for t in range(T - 2) if above[t:t + 3].all()), None)
    if start is None:
        raise NoMotionDetected(f"no three consecutive bins above threshold {threshold:.4g}")
    end = T - 1
    for u in range(start + 1, T - 2):
        if below[u:u + 3].all():
            end = u - 1
            break
    return start, end


def detect_bounds(spec: DopplerSpectrogram, threshold: Optional[float] = None,
                  I=None) -> DetectionBounds:
    if spec.n_frames < 6:
        raise InvalidArgument("detection needs at least 6 time bins")
    trace = std_trace(spec, I)
    if threshold is None:
        threshold = default_threshold(trace)
    elif not threshold > 0:
        raise InvalidArgument("threshold must be positive")
    start, end = bounds_from_trace(trace, threshold)
    return DetectionBounds(start, end, trace, float(threshold))


def crop(spec, bounds: DetectionBounds) -> np.ndarray:
    values = spec.values if isinstance(spec, DopplerSpectrogram) else np.asarray(spec)
    if not 0 <= bounds.start_bin <= bounds.end_bin < values.shape[1]:
        raise InvalidArgument("bounds outside the spectrogram")
    return values[:, bounds.start_bin:bounds.end_bin + 1].copy()


def cubic_kernel(x, a: float = -0.5):
    x = np.abs(np.asarray(x, dtype=float))
    out = np.zeros_like(x)
    near = x <= 1
    far = (x > 1) & (x < 2)
    out[near] = (a + 2) * x[near] ** 3 - (a + 3) * x[near] ** 2 + 1
    out[far] = a * x[far] ** 3 - 5 * a * x[far] ** 2 + 8 * a * x[far] - 4 * a
    return out


def bicubic_resize(mat, n_cols: int = N_TIME, a: float = -0.5) -> np.ndarray:
    """Resample the time axis (columns) to ``n_cols`` with a cubic convolution kernel.

    Output column ``j`` samples input position ``(j + 0.5) * W / n_cols - 0.5``
    (pixel-centre alignment), taps beyond the edges are clamped. Rows are
    left alone, so the Doppler axis is untouched.
    """
    mat = np.asarray(mat, dtype=float)
    if mat.ndim != 2 or mat.shape[1] < 2:
        raise InvalidArgument("need a 2-D matrix with at least 2 columns")
    W = mat.shape[1]
    x = (np.arange(n_cols) + 0.5) * (W / n_cols) - 0.5
    base = np.floor(x).astype(int)
    taps = base[:, None] + np.arange(-1, 3)[None, :]
    weights = cubic_kernel(x[:, None] - taps, a)
    taps = np.clip(taps, 0, W - 1)
    return np.einsum("rjk,jk->rj", mat[:, taps], weights)


def normalize01(mat) -> np.ndarray:
    """Min-max scale to [0, 1]; a constant matrix maps to zeros."""
    mat = np.asarray(mat, dtype=float)
    lo, hi = mat.min(), mat.max()
    if hi <= lo:
        return np.zeros_like(mat)
    return (mat - lo) / (hi - lo)


def vectorize(mat) -> np.ndarray:
    """Column-major flattening of a 51x50 signature."""
    mat = np.asarray(mat)
    if mat.shape != (N_DOPPLER, N_TIME):
        raise InvalidArgument(f"expected a {N_DOPPLER}x{N_TIME} matrix, got {mat.shape}")
    return mat.reshape(-1, order="F").copy()


def unvectorize(d) -> np.ndarray:
    d = np.asarray(d)
    if d.shape != (SIG_SIZE,):
        raise InvalidArgument(f"expected a length-{SIG_SIZE} vector, got {d.shape}")
    return d.reshape((N_DOPPLER, N_TIME), order="F").copy()


def align_signature(spec: DopplerSpectrogram, threshold: Optional[float] = None,
                    label=None, channel: str = "") -> AlignedSignature:
    """Detect, crop, resize to 51x50, and normalize one recording."""
    if spec.n_bins != N_DOPPLER:
        raise InvalidArgument(f"expected {N_DOPPLER} Doppler bins, got {spec.n_bins}")
    bounds = detect_bounds(spec, threshold)
    cropped = crop(spec, bounds)
    resized = normalize01(bicubic_resize(cropped, N_TIME))
    return AlignedSignature(resized, None if label is None else MotionClass.parse(label),
                            channel or spec.source_channel, bounds)
