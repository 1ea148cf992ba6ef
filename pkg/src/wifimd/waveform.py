"""Synthetic Wi-Fi illuminator and two-channel passive radar scene.

The transmitted Wi-Fi baseband is modeled as unit-power circular complex
white noise. A single point scatterer (the person) reflects a delayed copy
whose phase follows the integral of its Doppler history; the surveillance
channel also sees the direct signal unless the motion blocks it.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgument

SPEED_OF_LIGHT = 299_792_458.0
DEFAULT_CARRIER_HZ = 2.462e9
MAX_HUMAN_SPEED = 2.0
PEAK_DOPPLER_RANGE_HZ = (2.5, 4.5)
PROFILE_RATE_HZ = 100.0


class MotionClass(enum.IntEnum):
    """The six activities; integer order is the classifier tie-break order."""

    M1 = 1  # pick up from the ground and stand up
    M2 = 2  # sit down on a chair
    M3 = 3  # stand up from a chair
    M4 = 4  # fall onto the mattress
    M5 = 5  # stand up after falling
    M6 = 6  # lie on the mattress, then get out of it

    @classmethod
    def parse(cls, value) -> "MotionClass":
        if isinstance(value, cls):
            return value
        if isinstance(value, str):
            key = value.strip().upper()
            if key in cls.__members__:
                return cls[key]
            if key.isdigit():
                value = int(key)
        try:
            return cls(int(value))
        except (TypeError, ValueError):
            raise InvalidArgument(f"unknown motion label {value!r}") from None


@dataclass(frozen=True)
class IqWaveform:
    samples: np.ndarray
    sample_rate_hz: float

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.complex128)
        if samples.ndim != 1 or samples.size == 0:
            raise InvalidArgument("waveform must be a nonempty 1-D sequence")
        if not self.sample_rate_hz > 0:
            raise InvalidArgument("sample_rate_hz must be positive")
        if not np.all(np.isfinite(samples)):
            raise InvalidArgument("waveform contains NaN or Inf")
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate_hz


@dataclass(frozen=True)
class ChannelPair:
    reference: IqWaveform
    surveillance: IqWaveform

    def __post_init__(self):
        if len(self.reference) != len(self.surveillance):
            raise InvalidArgument("reference and surveillance lengths differ")
        if self.reference.sample_rate_hz != self.surveillance.sample_rate_hz:
            raise InvalidArgument("reference and surveillance sample rates differ")

    @property
    def sample_rate_hz(self) -> float:
        return self.reference.sample_rate_hz

    def __len__(self) -> int:
        return len(self.reference)


@dataclass(frozen=True)
class SceneConfig:
    carrier_hz: float = DEFAULT_CARRIER_HZ
    dsi_power: float = 1.0
    echo_power: float = 0.01  # 20 dB below the direct signal
    noise_power: float = 0.1
    echo_delay_samples: int = 4
    rng_seed: int = 0
    # False: a motionless scatterer merges with the zero-Doppler clutter and
    # only the moving return is simulated
    static_echo: bool = True

    def __post_init__(self):
        if not self.carrier_hz > 0:
            raise InvalidArgument("carrier_hz must be positive")
        if self.dsi_power < 0 or self.echo_power < 0:
            raise InvalidArgument("powers must be nonnegative")
        if not self.noise_power > 0:
            raise InvalidArgument("noise_power must be positive")
        if self.echo_delay_samples < 0:
            raise InvalidArgument("echo_delay_samples must be nonnegative")


@dataclass(frozen=True)
class MotionProfile:
    """Velocity history of one activity as seen from the channel-1 geometry.

    ``channel_gain``, ``doppler_scale`` and ``dsi_visible`` hold one entry per
    receiver channel (index 0 is channel 1). Channel 2 is bistatic and
    usually sees a weaker echo with compressed Doppler.
    """

    label: MotionClass
    duration_s: float
    velocity_samples: np.ndarray
    dsi_visible: tuple[bool, bool] = (True, True)
    channel_gain: tuple[float, float] = (1.0, 1.0)
    doppler_scale: tuple[float, float] = (1.0, 1.0)

    def __post_init__(self):
        v = np.asarray(self.velocity_samples, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise InvalidArgument("velocity_samples must be a nonempty 1-D sequence")
        if np.max(np.abs(v)) > MAX_HUMAN_SPEED:
            raise InvalidArgument("velocity exceeds the 2 m/s human speed bound")
        if not 0.5 <= self.duration_s <= 10.0:
            raise InvalidArgument("duration_s must lie in [0.5, 10] s")
        object.__setattr__(self, "velocity_samples", v)
        object.__setattr__(self, "label", MotionClass.parse(self.label))

    @property
    def times_s(self) -> np.ndarray:
        """Sample instants (cell centres) of ``velocity_samples``."""
        n = self.velocity_samples.size
        return (np.arange(n) + 0.5) * (self.duration_s / n)

    def velocity_at(self, t: np.ndarray) -> np.ndarray:
        """Velocity at times ``t`` (s from motion onset); zero outside the motion."""
        t = np.asarray(t, dtype=float)
        v = np.interp(t, self.times_s, self.velocity_samples)
        v[(t < 0) | (t > self.duration_s)] = 0.0
        return v


@dataclass(frozen=True)
class _Template:
    # (sign, fraction of duration, relative amplitude) per half-sine lobe
    lobes: tuple[tuple[int, float, float], ...]
    duration_s: float
    peak_doppler_hz: float
    dsi_visible: tuple[bool, bool] = (True, True)
    channel_gain: tuple[float, float] = (1.0, 0.6)
    doppler_scale: tuple[float, float] = (1.0, 0.75)


TEMPLATES: dict[MotionClass, _Template] = {
    MotionClass.M1: _Template(((-1, 0.30, 0.6), (1, 0.50, 1.0), (-1, 0.20, 0.35)), 2.4, 4.2),
    MotionClass.M2: _Template(((-1, 0.70, 1.0), (1, 0.30, 0.45)), 1.6, 3.6),
    MotionClass.M3: _Template(((-1, 0.35, 0.55), (1, 0.65, 1.0)), 2.1, 3.0),
    # receiver 2 catches the stronger return from a fall
    MotionClass.M4: _Template(((1, 1.0, 1.0),), 0.9, 4.4,
                              channel_gain=(1.0, 1.3), doppler_scale=(1.0, 1.0)),
    # M5 and M6 both end with getting up off the mattress
    MotionClass.M5: _Template(((-1, 0.45, 0.7), (-1, 0.55, 1.0)), 1.9, 3.0),
    MotionClass.M6: _Template(((-1, 0.35, 0.6), (-1, 0.65, 1.0)), 2.6, 3.8,
                              dsi_visible=(False, True)),
}


def doppler_from_velocity(v, carrier_hz: float = DEFAULT_CARRIER_HZ):
    """Quasi-monostatic Doppler shift ``2 v f_c / c`` in Hz (scalar or array)."""
    if np.ndim(v) == 0:
        return 2.0 * float(v) * carrier_hz / SPEED_OF_LIGHT
    return 2.0 * np.asarray(v, dtype=float) * carrier_hz / SPEED_OF_LIGHT


def velocity_from_doppler(f_hz, carrier_hz: float = DEFAULT_CARRIER_HZ):
    return f_hz * SPEED_OF_LIGHT / (2.0 * carrier_hz)


def _lobe_velocity(lobes, n: int) -> np.ndarray:
    """Concatenated half-sine lobes sampled at ``n`` cell centres on [0, 1]."""
    t = (np.arange(n) + 0.5) / n
    v = np.zeros(n)
    edges = np.concatenate([[0.0], np.cumsum([frac for _, frac, _ in lobes])])
    edges /= edges[-1]
    for (sign, _, amp), lo, hi in zip(lobes, edges[:-1], edges[1:]):
        inside = (t >= lo) & (t < hi)
        v[inside] = sign * amp * np.sin(np.pi * (t[inside] - lo) / (hi - lo))
    return v


def _profile_from(label, lobes, duration_s, peak_hz, tpl, carrier_hz, gains, sway=None):
    n = max(int(round(duration_s * PROFILE_RATE_HZ)), 8)
    shape = _lobe_velocity(lobes, n)
    shape /= np.max(np.abs(shape))
    if sway is not None:
        # slow body sway, tapered so the motion still starts and ends at rest
        t = (np.arange(n) + 0.5) / n
        amp, freqs, phases = sway
        wobble = amp * np.sum(np.sin(2 * np.pi * np.outer(t * duration_s, freqs) + phases), axis=1)
        shape = shape + wobble * np.sin(np.pi * t)
        shape /= np.max(np.abs(shape))
    v = shape * velocity_from_doppler(peak_hz, carrier_hz)
    return MotionProfile(label, duration_s, v, tpl.dsi_visible, gains, tpl.doppler_scale)


def nominal_profile(label, carrier_hz: float = DEFAULT_CARRIER_HZ) -> MotionProfile:
    """Template without random jitter."""
    label = MotionClass.parse(label)
    tpl = TEMPLATES[label]
    return _profile_from(label, tpl.lobes, tpl.duration_s, tpl.peak_doppler_hz, tpl,
                         carrier_hz, tpl.channel_gain)


def motion_profile(label, seed: int, carrier_hz: float = DEFAULT_CARRIER_HZ,
                   jitter: float = 0.2, tempo: float = 1.0,
                   peak_offset_hz: float = 0.0) -> MotionProfile:
    """Randomized velocity template for one performance of ``label``.

    Duration, lobe proportions and lobe amplitudes are scaled by factors
    drawn from ``1 +- jitter``; a slow sway of up to ``jitter / 2`` of the
    peak is added; the peak Doppler is drawn within 0.4 Hz of the template
    value and clipped to the observed 2.5-4.5 Hz range. ``tempo`` (duration
    factor) and ``peak_offset_hz`` carry a performer's personal style.
    """
    label = MotionClass.parse(label)
    tpl = TEMPLATES[label]
    rng = np.random.default_rng(seed)
    duration = tempo * tpl.duration_s * rng.uniform(1 - jitter, 1 + jitter)
    lobes = tuple(
        (sign, frac * rng.uniform(1 - jitter, 1 + jitter), amp * rng.uniform(1 - jitter, 1 + jitter))
        for sign, frac, amp in tpl.lobes
    )
    lo, hi = PEAK_DOPPLER_RANGE_HZ
    peak = float(np.clip(tpl.peak_doppler_hz + peak_offset_hz + rng.uniform(-0.4, 0.4), lo, hi))
    gains = tuple(g * float(np.exp(rng.normal(0.0, 0.15))) for g in tpl.channel_gain)
    sway = (rng.uniform(0, jitter / 2) / 2, rng.uniform(0.5, 2.0, 2), rng.uniform(0, 2 * np.pi, 2))
    return _profile_from(label, lobes, float(np.clip(duration, 0.5, 10.0)), peak, tpl,
                         carrier_hz, gains, sway)


def complex_noise(rng: np.random.Generator, n: int, power: float = 1.0) -> np.ndarray:
    """Circular complex Gaussian noise with ``E|z|^2 = power``."""
    scale = np.sqrt(power / 2.0)
    return scale * (rng.standard_normal(n) + 1j * rng.standard_normal(n))


def gen_wifi_baseband(duration_s: float, sample_rate_hz: float, seed: int) -> IqWaveform:
    if not duration_s > 0 or not sample_rate_hz > 0:
        raise InvalidArgument("duration_s and sample_rate_hz must be positive")
    n = int(round(duration_s * sample_rate_hz))
    if n < 1:
        raise InvalidArgument("duration too short for the sample rate")
    return IqWaveform(complex_noise(np.random.default_rng(seed), n), sample_rate_hz)


def simulate_channels(waveform: IqWaveform, profile: MotionProfile, cfg: SceneConfig,
                      channel: int = 1, onset_s: float = 0.0) -> ChannelPair:
    """Reference and surveillance signals for one receiver channel.

    The motion begins ``onset_s`` seconds into the waveform; the scatterer is
    static (zero Doppler) before and after it, and reflects nothing there
    unless ``cfg.static_echo`` is set.
    """
    if channel not in (1, 2):
        raise InvalidArgument("channel must be 1 or 2")
    x = waveform.samples
    n = x.size
    fs = waveform.sample_rate_hz
    if not 0 <= cfg.echo_delay_samples < n:
        raise InvalidArgument("echo delay out of range for the waveform length")
    if onset_s < 0 or onset_s + profile.duration_s > n / fs + 1e-12:
        raise InvalidArgument("waveform does not cover the motion profile")
    ch = channel - 1
    rng = np.random.default_rng(cfg.rng_seed)

    t = np.arange(n) / fs - onset_s
    f_d = profile.doppler_scale[ch] * doppler_from_velocity(profile.velocity_at(t), cfg.carrier_hz)
    phase = 2.0 * np.pi * np.concatenate([[0.0], np.cumsum(f_d[:-1])]) / fs

    delayed = np.zeros(n, dtype=np.complex128)
    d = cfg.echo_delay_samples
    delayed[d:] = x[: n - d]
    echo_amp = np.sqrt(cfg.echo_power) * profile.channel_gain[ch]
    sur = echo_amp * delayed * np.exp(1j * phase)
    if not cfg.static_echo:
        sur[(t < 0) | (t > profile.duration_s)] = 0.0
    if profile.dsi_visible[ch] and cfg.dsi_power > 0:
        sur += np.sqrt(cfg.dsi_power) * x
    ref = x + complex_noise(rng, n, cfg.noise_power)
    sur += complex_noise(rng, n, cfg.noise_power)
    return ChannelPair(IqWaveform(ref, fs), IqWaveform(sur, fs))


def constant_doppler_profile(doppler_hz: float, duration_s: float,
                             carrier_hz: float = DEFAULT_CARRIER_HZ,
                             label=MotionClass.M1) -> MotionProfile:
    """Scatterer moving at fixed radial speed; used for calibration scenes."""
    n = max(int(round(duration_s * PROFILE_RATE_HZ)), 8)
    v = np.full(n, velocity_from_doppler(doppler_hz, carrier_hz))
    return MotionProfile(label, duration_s, v)
