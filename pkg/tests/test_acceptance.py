"""Acceptance criteria for the full pipeline.

Each test records a one-line PASS/FAIL verdict, collected in the
"acceptance criteria" section of the pytest terminal summary.
"""
import math
import time

import numpy as np
import pytest

from wifimd import align, caf, classify, harness, pca
from wifimd import waveform as wf
from wifimd.caf import DopplerSpectrogram

from oracles import caf_direct, exhaustive_sparse, injected_spectrogram


@pytest.fixture(scope="module")
def benchmark_cfg():
    return harness.ExperimentConfig()


@pytest.fixture(scope="module")
def benchmark_datasets(benchmark_cfg):
    return harness.build_datasets(benchmark_cfg)


@pytest.fixture(scope="module")
def first_run(benchmark_cfg, tmp_path_factory):
    out = tmp_path_factory.mktemp("run1")
    t0 = time.perf_counter()
    reports = harness.run_experiment(benchmark_cfg.replace(out_dir=str(out)))
    return reports, out, time.perf_counter() - t0


def test_01_caf_matches_direct_sum(criterion):
    rng = np.random.default_rng(1)
    rates = [1000.0, 2500.0, 5000.0, 10000.0]
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(20):
        cfg = caf.CafConfig(sample_rate_hz=float(rng.choice(rates)),
                            delay_bins=int(rng.integers(1, 17)))
        n = int(rng.integers(cfg.window_samples, 4097))
        x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        y = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        pair = wf.ChannelPair(wf.IqWaveform(x, cfg.sample_rate_hz), wf.IqWaveform(y, cfg.sample_rate_hz))
        start = int(rng.integers(0, n - cfg.window_samples + 1))
        got = caf.caf_batched(pair, start, cfg).values
        want = caf_direct(x, y, start, cfg)
        worst = max(worst, np.max(np.abs(got - want)) / np.max(np.abs(want)))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-9 and elapsed < 10
    criterion(1, ok, f"CAF vs direct sums, worst relative error {worst:.2e}, {elapsed:.1f} s")
    assert worst <= 1e-9
    assert elapsed < 10


def test_02_doppler_localization(criterion):
    cfg = caf.CafConfig()
    axis = cfg.freq_axis_hz
    scene = wf.SceneConfig(dsi_power=0.0, echo_power=1.0, noise_power=0.1)  # SNR 10 dB
    t0 = time.perf_counter()
    errors = []
    for i, f0 in enumerate([-20, -10, -3, 3, 10, 20]):
        x = wf.gen_wifi_baseband(0.5, cfg.sample_rate_hz, seed=100 + i)
        pair = wf.simulate_channels(x, wf.constant_doppler_profile(f0, 0.5), scene)
        surf = caf.caf_batched(pair, 0, cfg)
        tau, k = np.unravel_index(np.argmax(np.abs(surf.values)), surf.values.shape)
        assert tau == scene.echo_delay_samples
        errors.append(abs(axis[k] - f0))
    elapsed = time.perf_counter() - t0
    span = (axis[0] - cfg.bin_spacing_hz / 2, axis[-1] + cfg.bin_spacing_hz / 2)
    ok = (max(errors) <= min(1.0, cfg.bin_spacing_hz) and axis.size == 51
          and np.allclose(span, (-25.0, 25.0)) and cfg.prf_hz == 50.0 and elapsed < 30)
    criterion(2, ok, f"peak error <= {max(errors):.3f} Hz over 6 targets, {axis.size} bins "
                     f"covering [{span[0]:.2f}, {span[1]:.2f}] Hz, {elapsed:.1f} s")
    assert max(errors) <= min(1.0, cfg.bin_spacing_hz)
    assert axis.size == 51 and np.allclose(span, (-25.0, 25.0))
    assert elapsed < 30


def test_03_weighted_moments_hand_case(criterion):
    mean = float(align.weighted_mean([0, 0, 1], [1, 4, 9]))
    std = float(align.weighted_std([0, 0, 1], [1, 4, 9]))
    ok = abs(mean - 3.0) <= 1e-12 and abs(std - math.sqrt(477 / 14)) <= 1e-12
    criterion(3, ok, f"Mean = {mean!r}, Std = {std!r} (sqrt(477/14) = {math.sqrt(477 / 14)!r})")
    assert ok


def test_04_detection_accuracy(criterion):
    axis = caf.CafConfig().freq_axis_hz
    rng = np.random.default_rng(2016)
    t0 = time.perf_counter()
    hits = 0
    for _ in range(100):
        T = int(rng.integers(40, 81))
        length = int(rng.integers(8, int(0.45 * T) + 1))
        s = int(rng.integers(3, T - length - 2))
        e = s + length - 1
        # any off-DC Doppler the axis can hold, outside the zero-Doppler mainlobe
        f0 = float(rng.choice([-1, 1]) * rng.uniform(2.5, 22.0))
        v = injected_spectrogram(rng, axis, T, s, e, f0, floor_db=-20.0)
        try:
            b = align.detect_bounds(DopplerSpectrogram(v, axis, 0.04))
        except align.NoMotionDetected:
            continue
        hits += abs(b.start_bin - s) <= 2 and abs(b.end_bin - e) <= 2
    elapsed = time.perf_counter() - t0
    ok = hits >= 95 and elapsed < 60
    criterion(4, ok, f"bounds within +-2 bins in {hits}/100 spectrograms at a -20 dB floor, "
                     f"{elapsed:.1f} s")
    assert hits >= 95
    assert elapsed < 60


@pytest.mark.slow
def test_05_alignment_chain(criterion, benchmark_datasets, rng):
    shapes_ok = True
    count = 0
    for ds in benchmark_datasets.values():
        for d in ds.samples:
            m = align.unvectorize(d)
            shapes_ok &= (d.shape == (2550,) and m.shape == (51, 50)
                          and m.min() >= 0.0 and m.max() <= 1.0
                          and np.array_equal(align.vectorize(m), d))
            count += 1
    x = rng.random((51, 50))
    identity_err = float(np.max(np.abs(align.bicubic_resize(x, 50) - x)))
    ok = shapes_ok and identity_err <= 1e-9
    criterion(5, ok, f"{count} processed samples 51x50 in [0, 1] -> 2550, "
                     f"identity resize error {identity_err:.1e}")
    assert shapes_ok
    assert identity_err <= 1e-9


def test_06_subspace_pursuit_vs_exhaustive(criterion):
    rng = np.random.default_rng(6)
    t0 = time.perf_counter()
    agree = 0
    monotone = True
    for _ in range(50):
        A = rng.standard_normal((8, 12))
        A /= np.linalg.norm(A, axis=0)
        x = np.zeros(12)
        x[rng.choice(12, 2, replace=False)] = rng.uniform(0.5, 2.0, 2) * rng.choice([-1, 1], 2)
        y = A @ x
        code = classify.subspace_pursuit(A, y, K=2)
        h = np.array(code.residual_history)
        monotone &= bool(np.all(np.diff(h) <= 0))
        best, _ = exhaustive_sparse(A, y, 2)
        agree += code.support == best
    elapsed = time.perf_counter() - t0
    ok = agree >= 48 and monotone and elapsed < 10
    criterion(6, ok, f"SP support equals exhaustive search in {agree}/50, residual "
                     f"non-increasing: {monotone}, {elapsed:.2f} s")
    assert agree >= 48 and monotone
    assert elapsed < 10


@pytest.mark.slow
def test_07_pca_properties(criterion, benchmark_cfg, benchmark_datasets):
    train, _ = harness.split_dataset(benchmark_datasets[1], benchmark_cfg.train_fraction,
                                     benchmark_cfg.rng_seed)
    x = train.samples
    full = pca.fit_pca(train)
    k = full.n_components
    ortho = float(np.max(np.abs(full.basis.T @ full.basis - np.eye(k))))
    descending = bool(np.all(np.diff(full.eigenvalues) <= 0))
    errs = []
    for j in range(1, k + 1):
        m = pca.fit_pca(train, n_components=j)
        errs.append(float(np.sum((pca.reconstruct(m, pca.project(m, x)) - x) ** 2)))
    monotone = bool(np.all(np.diff(errs) <= 1e-12 * errs[0]))
    var = pca.project(full, x).var(axis=0, ddof=1)
    rel = float(np.max(np.abs(var - full.eigenvalues) / full.eigenvalues))
    ok = ortho <= 1e-8 and descending and monotone and rel <= 1e-6
    criterion(7, ok, f"Md={k}: orthonormality {ortho:.1e}, descending {descending}, "
                     f"monotone reconstruction {monotone}, variance/eigenvalue {rel:.1e}")
    assert ortho <= 1e-8
    assert descending and monotone
    assert rel <= 1e-6


@pytest.mark.slow
def test_08_end_to_end_ordering(criterion, first_run):
    reports, _, elapsed = first_run
    avg = {(r.classifier, r.channel): r.average for r in reports}
    parts = []
    ok = elapsed < 300
    for ch in (1, 2):
        src, svm = avg[("SRC", ch)], avg[("SVM", ch)]
        ok &= src >= 0.85 and src > svm
        parts.append(f"ch{ch} SRC {100 * src:.1f}% vs SVM {100 * svm:.1f}%")
    criterion(8, ok, ", ".join(parts) + f", {elapsed:.0f} s")
    for ch in (1, 2):
        assert avg[("SRC", ch)] >= 0.85
        assert avg[("SRC", ch)] > avg[("SVM", ch)]
    assert elapsed < 300


@pytest.mark.slow
def test_09_noise_monotonicity(criterion, benchmark_cfg):
    levels = benchmark_cfg.noise_levels
    acc = harness.noise_sweep(benchmark_cfg, levels, channel=1)
    ok = bool(np.all(np.diff(acc) <= 0))
    pretty = ", ".join(f"{lv:g}: {100 * a:.1f}%" for lv, a in zip(levels, acc))
    criterion(9, ok, f"ch1 SRC average by noise power: {pretty}")
    assert ok


@pytest.mark.slow
def test_10_determinism(criterion, benchmark_cfg, first_run, tmp_path):
    _, out1, _ = first_run
    harness.run_experiment(benchmark_cfg.replace(out_dir=str(tmp_path)))
    names = sorted(p.name for p in out1.glob("*.csv"))
    same = [(out1 / n).read_bytes() == (tmp_path / n).read_bytes() for n in names]
    ok = bool(names) and all(same)
    criterion(10, ok, f"{sum(same)}/{len(names)} report CSVs byte-identical across two runs")
    assert ok
