"""Batched cross ambiguity function and Doppler-time history.

An integration window is split into ``batch_count`` contiguous sub-batches.
For every delay the conjugated, delayed reference is correlated with the
surveillance signal inside each batch, giving one complex value per batch.
The batch sequence is zero-padded to ``zero_pad_to`` points and Fourier
transformed with the unitary (1/sqrt(N)) convention, then centre-shifted so
the zero-Doppler bin sits in the middle. Successive windows, ``hop_s``
apart, give the columns of the spectrogram.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgument
from .waveform import ChannelPair


@dataclass(frozen=True)
class CafConfig:
    sample_rate_hz: float = 2e6
    integration_s: float = 0.4
    hop_s: float = 0.04
    batch_count: int = 20
    zero_pad_to: int = 51
    delay_bins: int = 16

    def __post_init__(self):
        if not self.sample_rate_hz > 0 or not self.integration_s > 0 or not self.hop_s > 0:
            raise InvalidArgument("rates and durations must be positive")
        if self.batch_count < 1 or self.delay_bins < 1:
            raise InvalidArgument("batch_count and delay_bins must be positive")
        if self.window_samples % self.batch_count:
            raise InvalidArgument("batch_count must divide the integration length in samples")
        if self.zero_pad_to < self.batch_count:
            raise InvalidArgument("zero_pad_to must be at least batch_count")
        if self.hop_s > self.integration_s:
            raise InvalidArgument("hop_s must not exceed integration_s")

    @property
    def window_samples(self) -> int:
        return int(round(self.integration_s * self.sample_rate_hz))

    @property
    def batch_samples(self) -> int:
        return self.window_samples // self.batch_count

    @property
    def hop_samples(self) -> int:
        return int(round(self.hop_s * self.sample_rate_hz))

    @property
    def prf_hz(self) -> float:
        """Batch rate; the unambiguous Doppler span."""
        return self.batch_count / self.integration_s

    @property
    def bin_spacing_hz(self) -> float:
        return self.prf_hz / self.zero_pad_to

    @property
    def freq_axis_hz(self) -> np.ndarray:
        n = self.zero_pad_to
        return (np.arange(n) - n // 2) * self.bin_spacing_hz


@dataclass(frozen=True)
class CafSurface:
    values: np.ndarray  # (delay_bins, zero_pad_to) complex
    delay_axis_samples: np.ndarray
    freq_axis_hz: np.ndarray


@dataclass(frozen=True)
class DopplerSpectrogram:
    values: np.ndarray  # (F, T) nonnegative magnitudes
    freq_axis_hz: np.ndarray
    hop_s: float
    source_channel: str = ""
    delays: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] != len(self.freq_axis_hz):
            raise InvalidArgument("values must be F x T with F matching the frequency axis")
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise InvalidArgument("spectrogram values must be finite and nonnegative")
        object.__setattr__(self, "values", v)

    @property
    def n_bins(self) -> int:
        return self.values.shape[0]

    @property
    def n_frames(self) -> int:
        return self.values.shape[1]

    @property
    def dc_bin(self) -> int:
        return int(np.argmin(np.abs(self.freq_axis_hz)))


def batch_correlations(ref: np.ndarray, sur: np.ndarray, start: int, n_batches: int,
                       batch_len: int, delay_bins: int) -> np.ndarray:
    """Per-batch correlations ``sum conj(ref[n - tau]) * sur[n]``.

    Covers samples ``start .. start + n_batches * batch_len``; reference
    samples before index 0 count as zero. Returns ``(delay_bins, n_batches)``.
    """
    stop = start + n_batches * batch_len
    s = sur[start:stop]
    out = np.empty((delay_bins, n_batches), dtype=np.complex128)
    for tau in range(delay_bins):
        lo = start - tau
        if lo >= 0:
            r = ref[lo:stop - tau]
        else:
            r = np.concatenate([np.zeros(-lo, dtype=np.complex128), ref[:stop - tau]])
        out[tau] = (np.conj(r) * s).reshape(n_batches, batch_len).sum(axis=1)
    return out


def doppler_transform(batches: np.ndarray, zero_pad_to: int) -> np.ndarray:
    """Zero-padded unitary DFT along the last axis, DC moved to the centre."""
    spec = np.fft.fft(batches, n=zero_pad_to, axis=-1) / np.sqrt(zero_pad_to)
    return np.fft.fftshift(spec, axes=-1)


def _check_pair(pair: ChannelPair, cfg: CafConfig):
    if abs(pair.sample_rate_hz - cfg.sample_rate_hz) > 1e-9 * cfg.sample_rate_hz:
        raise InvalidArgument(
            f"pair sampled at {pair.sample_rate_hz} Hz, config expects {cfg.sample_rate_hz} Hz")


def caf_batched(pair: ChannelPair, window_start_sample: int, cfg: CafConfig) -> CafSurface:
    _check_pair(pair, cfg)
    if window_start_sample < 0 or window_start_sample + cfg.window_samples > len(pair):
        raise InvalidArgument("integration window falls outside the recording")
    c = batch_correlations(pair.reference.samples, pair.surveillance.samples,
                           window_start_sample, cfg.batch_count, cfg.batch_samples,
                           cfg.delay_bins)
    return CafSurface(doppler_transform(c, cfg.zero_pad_to), np.arange(cfg.delay_bins),
                      cfg.freq_axis_hz)


def doppler_slice(surface: CafSurface, delay_bin: int) -> np.ndarray:
    if not 0 <= delay_bin < surface.values.shape[0]:
        raise InvalidArgument(f"delay bin {delay_bin} out of range")
    return np.abs(surface.values[delay_bin])


def n_frames(n_samples: int, cfg: CafConfig) -> int:
    if n_samples < cfg.window_samples:
        return 0
    return (n_samples - cfg.window_samples) // cfg.hop_samples + 1


def _window_batches(pair: ChannelPair, cfg: CafConfig, n_win: int):
    """Yield the ``(delay_bins, batch_count)`` correlation block per window.

    When the hop is a whole number of batches the correlations are computed
    once on a common batch grid and shared between overlapping windows.
    """
    ref, sur = pair.reference.samples, pair.surveillance.samples
    L, B, hop = cfg.batch_samples, cfg.batch_count, cfg.hop_samples
    if hop % L == 0:
        step = hop // L
        grid = batch_correlations(ref, sur, 0, (n_win - 1) * step + B, L, cfg.delay_bins)
        for w in range(n_win):
            yield grid[:, w * step: w * step + B]
    else:
        for w in range(n_win):
            yield batch_correlations(ref, sur, w * hop, B, L, cfg.delay_bins)


def spectrogram(pair: ChannelPair, cfg: CafConfig, delay_selector="argmax",
                source_channel: str = "") -> DopplerSpectrogram:
    """Doppler-time history of ``pair``.

    ``delay_selector`` is ``"argmax"`` (per window, the delay whose slice
    carries the most power) or an integer delay bin held fixed.
    """
    _check_pair(pair, cfg)
    n_win = n_frames(len(pair), cfg)
    if n_win < 1:
        raise InvalidArgument("recording shorter than one integration window")
    if delay_selector != "argmax":
        fixed = int(delay_selector)
        if not 0 <= fixed < cfg.delay_bins:
            raise InvalidArgument(f"delay bin {fixed} out of range")
    cols = np.empty((cfg.zero_pad_to, n_win))
    delays = np.empty(n_win, dtype=int)
    for w, c in enumerate(_window_batches(pair, cfg, n_win)):
        if delay_selector == "argmax":
            # slice power equals batch energy under the unitary transform
            tau = int(np.argmax(np.sum(np.abs(c) ** 2, axis=1)))
        else:
            tau = fixed
        delays[w] = tau
        cols[:, w] = np.abs(doppler_transform(c[tau], cfg.zero_pad_to))
    return DopplerSpectrogram(cols, cfg.freq_axis_hz, cfg.hop_s, source_channel, delays)
