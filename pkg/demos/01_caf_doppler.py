# coding: utf-8

# # From Wi-Fi samples to a Doppler-time picture
#
# A passive radar never transmits. It listens to an access point on a
# reference antenna and to the room on a surveillance antenna, then asks
# which delayed, frequency-shifted copy of the reference best explains the
# surveillance signal. That question is the cross ambiguity function (CAF).

import numpy as np

from wifimd import caf, waveform as wf

# The illuminator is modeled as unit-power complex white noise. A 2 MHz
# stream is realistic but slow on a laptop, so this walk-through uses 50 kHz;
# the Doppler axis depends only on the batch rate, not on the sample rate.

cfg = caf.CafConfig(sample_rate_hz=5e4)
print("Doppler bins:", cfg.zero_pad_to, " spacing %.3f Hz" % cfg.bin_spacing_hz,
      " span +-%.2f Hz" % cfg.freq_axis_hz[-1])

# ## A target moving at constant speed
#
# A scatterer approaching at 0.61 m/s shifts a 2.462 GHz carrier by ~10 Hz.

v = 0.61
print("Doppler of %.2f m/s: %.2f Hz" % (v, wf.doppler_from_velocity(v)))

x = wf.gen_wifi_baseband(0.5, cfg.sample_rate_hz, seed=1)
scene = wf.SceneConfig(dsi_power=1.0, echo_power=0.01, noise_power=0.1)
pair = wf.simulate_channels(x, wf.constant_doppler_profile(10.0, 0.5), scene)
surf = caf.caf_batched(pair, 0, cfg)
power = np.abs(surf.values) ** 2

# The direct signal leaks into the surveillance antenna with no delay and no
# Doppler, and it is 20 dB stronger than the echo, so the global CAF peak is
# the zero-Doppler line at delay 0. The echo lives at delay 4.

tau, k = np.unravel_index(np.argmax(power), power.shape)
print("global peak: delay", tau, "Doppler %.2f Hz" % surf.freq_axis_hz[k])
echo = caf.doppler_slice(surf, scene.echo_delay_samples)
print("echo slice peak: %.2f Hz" % surf.freq_axis_hz[np.argmax(echo)])

# ## A real activity
#
# Sitting down moves the body away from the antennas (negative Doppler) and
# ends with a small forward lean (positive). Sliding the 0.4 s window along
# the recording in 40 ms hops gives the micro-Doppler history.

profile = wf.nominal_profile("M2")
x = wf.gen_wifi_baseband(profile.duration_s + 2.0, cfg.sample_rate_hz, seed=2)
scene = wf.SceneConfig(dsi_power=1.0, echo_power=10.0, noise_power=1.0,
                       echo_delay_samples=0, static_echo=False)
pair = wf.simulate_channels(x, profile, scene, onset_s=1.0)
spec = caf.spectrogram(pair, cfg)
print("spectrogram:", spec.values.shape, "(Doppler bins x time bins)")

# Where is the strongest off-DC energy in each time bin? Before and after
# the motion it is only a +-2 Hz sidelobe of the direct-signal line; during
# it the ridge swings negative, then briefly positive.

off_dc = spec.values.copy()
off_dc[spec.dc_bin - 1: spec.dc_bin + 2] = 0
ridge = spec.freq_axis_hz[np.argmax(off_dc, axis=0)]
print(" ".join("%+.0f" % f for f in ridge))
