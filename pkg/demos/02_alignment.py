# coding: utf-8

# # Cutting a motion out of a recording
#
# Recordings have arbitrary length and the motion starts whenever the person
# decides to move. Classification needs a fixed-size picture, so the motion
# is located, cropped, stretched to 50 time bins and scaled to [0, 1].

import numpy as np

from wifimd import align, harness

cfg = harness.ExperimentConfig()
recipe = next(r for r in harness.sample_recipes(cfg) if r.label.name == "M3")
pair, profile = harness.simulate_recording(cfg, recipe, channel=1)
spec = harness.caf.spectrogram(pair, cfg.caf)
print("raw history:", spec.values.shape, " motion lasts %.2f s" % profile.duration_s)

# ## Weighted spread per time bin
#
# Each column gets a weighted standard deviation whose weights grow with the
# squared distance from zero Doppler. The direct signal sits exactly at zero
# Doppler, so it barely moves the trace; body motion does.

w = align.doppler_weights(spec.n_bins)
print("weights near DC:", w[23:28], " at the edge:", w[0])

b = align.detect_bounds(spec)
print("threshold (median + 3 MAD): %.1f" % b.threshold)
inside = b.std_trace[b.start_bin:b.end_bin + 1]
outside = np.delete(b.std_trace, np.arange(b.start_bin, b.end_bin + 1))
print("trace median outside the motion %.0f, inside %.0f" % (np.median(outside), np.median(inside)))

# Motion starts at the first run of three bins above the threshold and ends
# before the next run of three below it.

true_start = (recipe.onset_s - cfg.caf.integration_s) / cfg.caf.hop_s
print("detected bins %d..%d; motion enters the first window near bin %.1f"
      % (b.start_bin, b.end_bin, true_start))

# ## Fixed-size signature
#
# The crop is resampled along time with a cubic convolution kernel
# (a = -0.5); the 51 Doppler rows stay as they are.

cropped = align.crop(spec, b)
sig = align.align_signature(spec, label="M3")
print("crop", cropped.shape, "-> signature", sig.matrix.shape,
      "range [%.1f, %.1f]" % (sig.matrix.min(), sig.matrix.max()))

# Stacking columns gives the 2550-long vector the classifiers see.

d = sig.vector
print("vector length", d.size, " first column equals d[:51]:",
      np.array_equal(sig.matrix[:, 0], d[:51]))
