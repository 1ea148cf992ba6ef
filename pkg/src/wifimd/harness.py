"""Synthetic six-activity benchmark: dataset synthesis, split, train, evaluate."""
from __future__ import annotations

import csv
import dataclasses
import io
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import align, caf, classify, pca, waveform
from .errors import DatasetBuildError, InvalidArgument, NoMotionDetected
from .waveform import MotionClass

log = logging.getLogger(__name__)

DEFAULT_COUNTS = {MotionClass.M1: 40, MotionClass.M2: 40, MotionClass.M3: 40,
                  MotionClass.M4: 10, MotionClass.M5: 20, MotionClass.M6: 20}
MAX_DROP_FRACTION = 0.05


def benchmark_caf() -> caf.CafConfig:
    # 50 kHz keeps a 340-recording run in a few minutes; PRF and bins match 2 MHz
    return caf.CafConfig(sample_rate_hz=5e4)


def benchmark_scene() -> waveform.SceneConfig:
    # In a single room the body echo shares the direct signal's range cell,
    # and the surveillance antenna faces the subject, not the access point.
    return waveform.SceneConfig(dsi_power=1.0, echo_power=10.0, noise_power=1.0,
                                echo_delay_samples=0, static_echo=False)


@dataclass
class ExperimentConfig:
    counts: dict = field(default_factory=lambda: dict(DEFAULT_COUNTS))
    train_fraction: float = 0.4
    channels: tuple = (1, 2)
    noise_levels: tuple = (1.0, 3.0, 5.0, 7.0)
    n_subjects: int = 4
    rng_seed: int = 2016
    caf: caf.CafConfig = field(default_factory=benchmark_caf)
    scene: waveform.SceneConfig = field(default_factory=benchmark_scene)
    quiet_s: float = 2.5           # still time before and after each motion
    threshold: Optional[float] = None
    sparsity: int = classify.DEFAULT_SPARSITY
    n_components: Optional[int] = None
    svm_lambda: Optional[float] = None   # None: 1 / N_train, i.e. C = 1
    svm_epochs: int = 30
    svm_seed: int = 0
    out_dir: Optional[str] = None

    def __post_init__(self):
        self.counts = {MotionClass.parse(k): int(v) for k, v in self.counts.items()}
        if any(v < 2 for v in self.counts.values()):
            raise InvalidArgument("every class needs at least 2 samples")
        if not 0 < self.train_fraction < 1:
            raise InvalidArgument("train_fraction must lie in (0, 1)")
        self.channels = tuple(int(c) for c in self.channels)
        if not self.channels or any(c not in (1, 2) for c in self.channels):
            raise InvalidArgument("channels must be drawn from {1, 2}")
        # partial tables from a config file override the benchmark defaults
        if isinstance(self.caf, dict):
            self.caf = dataclasses.replace(benchmark_caf(), **self.caf)
        if isinstance(self.scene, dict):
            self.scene = dataclasses.replace(benchmark_scene(), **self.scene)
        self.noise_levels = tuple(float(v) for v in self.noise_levels)

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    @classmethod
    def from_mapping(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InvalidArgument(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


def load_config(path) -> ExperimentConfig:
    """Read an ExperimentConfig from a ``.toml`` or ``.json`` file."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise InvalidArgument(f"cannot read config {path}: {exc}") from exc
    if path.suffix.lower() == ".toml":
        try:
            import tomllib
        except ModuleNotFoundError:
            import tomli as tomllib
        data = tomllib.loads(raw.decode("utf-8"))
    else:
        data = json.loads(raw.decode("utf-8"))
    return ExperimentConfig.from_mapping(data)


@dataclass(frozen=True)
class SampleRecipe:
    """Every seed and style parameter needed to regenerate one recording."""

    label: MotionClass
    index: int
    profile_seed: int
    waveform_seed: int
    noise_seeds: tuple
    onset_s: float
    subject: int = 0
    tempo: float = 1.0
    peak_offset_hz: float = 0.0

    def profile(self, carrier_hz: float) -> waveform.MotionProfile:
        return waveform.motion_profile(self.label, self.profile_seed, carrier_hz,
                                       tempo=self.tempo, peak_offset_hz=self.peak_offset_hz)

    @property
    def tag(self) -> str:
        return f"{self.label.name}/{self.index:03d}"


def subject_styles(cfg: ExperimentConfig) -> list[tuple[float, float]]:
    """Per-subject ``(tempo, peak_offset_hz)``; performers are slow or quick."""
    styles = []
    for subject in range(cfg.n_subjects):
        rng = np.random.default_rng([cfg.rng_seed, 7919, subject])
        styles.append((float(rng.uniform(0.85, 1.15)), float(rng.uniform(-0.5, 0.5))))
    return styles


def sample_recipes(cfg: ExperimentConfig) -> list[SampleRecipe]:
    """Recordings cycle through the subjects in index order."""
    styles = subject_styles(cfg)
    recipes = []
    for label in sorted(cfg.counts):
        for index in range(cfg.counts[label]):
            ss = np.random.SeedSequence([cfg.rng_seed, int(label), index])
            seeds = ss.generate_state(5)
            onset = cfg.quiet_s * (0.9 + 0.2 * (seeds[4] / 2**32))
            subject = index % cfg.n_subjects
            tempo, offset = styles[subject]
            recipes.append(SampleRecipe(label, index, int(seeds[0]), int(seeds[1]),
                                        (int(seeds[2]), int(seeds[3])), float(onset),
                                        subject, tempo, offset))
    return recipes


def simulate_recording(cfg: ExperimentConfig, recipe: SampleRecipe, channel: int,
                       base: Optional[waveform.IqWaveform] = None):
    """Channel pair for one recipe; ``base`` reuses an already generated illuminator."""
    profile = recipe.profile(cfg.scene.carrier_hz)
    if base is None:
        duration = recipe.onset_s + profile.duration_s + cfg.quiet_s
        base = waveform.gen_wifi_baseband(duration, cfg.caf.sample_rate_hz, recipe.waveform_seed)
    scene = dataclasses.replace(cfg.scene, rng_seed=recipe.noise_seeds[channel - 1])
    return waveform.simulate_channels(base, profile, scene, channel, recipe.onset_s), profile


def process_recording(pair: waveform.ChannelPair, cfg: ExperimentConfig, label=None,
                      channel: str = "") -> align.AlignedSignature:
    spec = caf.spectrogram(pair, cfg.caf, "argmax", channel)
    return align.align_signature(spec, cfg.threshold, label, channel)


def build_datasets(cfg: ExperimentConfig) -> dict[int, pca.SignatureDataset]:
    """One dataset per configured channel; both receivers share each illuminator."""
    rows = {ch: [] for ch in cfg.channels}
    recipes = sample_recipes(cfg)
    for recipe in recipes:
        profile = recipe.profile(cfg.scene.carrier_hz)
        duration = recipe.onset_s + profile.duration_s + cfg.quiet_s
        base = waveform.gen_wifi_baseband(duration, cfg.caf.sample_rate_hz, recipe.waveform_seed)
        for ch in cfg.channels:
            pair, _ = simulate_recording(cfg, recipe, ch, base)
            try:
                sig = process_recording(pair, cfg, recipe.label, f"ch{ch}")
            except NoMotionDetected as exc:
                log.warning("ch%d %s skipped: %s", ch, recipe.tag, exc)
                continue
            rows[ch].append((sig.vector, recipe.label, f"ch{ch}", f"ch{ch}/{recipe.tag}"))
    out = {}
    for ch, items in rows.items():
        dropped = len(recipes) - len(items)
        if dropped > MAX_DROP_FRACTION * len(recipes) or not items:
            raise DatasetBuildError(
                f"channel {ch}: {dropped} of {len(recipes)} recordings had no detectable motion")
        vecs, labels, chans, ids = zip(*items)
        out[ch] = pca.SignatureDataset(np.stack(vecs), labels, chans, ids)
    return out


def build_dataset(cfg: ExperimentConfig, channel: int = 1) -> pca.SignatureDataset:
    return build_datasets(cfg.replace(channels=(channel,)))[channel]


def _half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def split_dataset(ds: pca.SignatureDataset, train_fraction: float, seed: int):
    """Stratified random split; returns ``(train, test)``.

    Each class sends ``round(count * train_fraction)`` samples to training
    (half rounds up), but never fewer than one and always leaves one for
    testing.
    """
    if not 0 < train_fraction < 1:
        raise InvalidArgument("train_fraction must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    labels = ds.label_array
    train_idx, test_idx = [], []
    for cls in np.unique(labels):
        members = np.flatnonzero(labels == cls)
        if members.size < 2:
            raise InvalidArgument(f"class {MotionClass(cls).name} has fewer than 2 samples")
        n_train = min(max(_half_up(members.size * train_fraction), 1), members.size - 1)
        members = rng.permutation(members)
        train_idx.extend(sorted(members[:n_train]))
        test_idx.extend(sorted(members[n_train:]))
    return ds.subset(sorted(train_idx)), ds.subset(sorted(test_idx))


@dataclass(frozen=True)
class ClassificationReport:
    classifier: str
    channel: int
    seed: int
    classes: tuple
    per_class_accuracy: np.ndarray
    confusion: np.ndarray   # rows: ground truth, columns: predicted; row-normalized
    test_counts: np.ndarray
    train_ids: tuple = field(default=(), repr=False)
    test_ids: tuple = field(default=(), repr=False)
    fit_ids: tuple = field(default=(), repr=False)

    @property
    def average(self) -> float:
        return float(np.mean(self.per_class_accuracy))


def make_report(classifier: str, channel: int, seed: int, classes, truth, predicted,
                **provenance) -> ClassificationReport:
    classes = tuple(MotionClass.parse(c) for c in classes)
    pos = {int(c): i for i, c in enumerate(classes)}
    counts = np.zeros((len(classes), len(classes)))
    for t, p in zip(truth, predicted):
        counts[pos[int(t)], pos[int(p)]] += 1
    totals = counts.sum(axis=1)
    confusion = counts / np.where(totals > 0, totals, 1)[:, None]
    return ClassificationReport(classifier, channel, seed, classes, np.diag(confusion).copy(),
                                confusion, totals, **provenance)


@dataclass
class TrainedModels:
    pca_model: pca.PcaModel
    dictionary: classify.Dictionary
    svm: classify.SvmModel


def train_models(train: pca.SignatureDataset, cfg: ExperimentConfig) -> TrainedModels:
    """Fit PCA, the SRC dictionary and the SVM, touching training data only."""
    model = pca.fit_pca(train, cfg.n_components)
    z = pca.project(model, train.samples)
    dictionary = classify.build_dictionary(z, train.labels)
    lam = cfg.svm_lambda if cfg.svm_lambda is not None else 1.0 / len(train)
    svm = classify.train_linear_svm(z, train.labels, lam, cfg.svm_epochs, cfg.svm_seed)
    return TrainedModels(model, dictionary, svm)


def evaluate(models: TrainedModels, test: pca.SignatureDataset, cfg: ExperimentConfig,
             channel: int, train: Optional[pca.SignatureDataset] = None):
    z = pca.project(models.pca_model, test.samples)
    k = min(cfg.sparsity, models.dictionary.dim, models.dictionary.n_atoms)
    src_pred = [classify.src_classify(models.dictionary, y, k)[0] for y in z]
    svm_pred = [classify.svm_classify(models.svm, y) for y in z]
    classes = models.dictionary.classes
    prov = dict(train_ids=train.ids if train is not None else (), test_ids=test.ids,
                fit_ids=models.pca_model.fit_ids)
    return [make_report("SRC", channel, cfg.rng_seed, classes, test.labels, src_pred, **prov),
            make_report("SVM", channel, cfg.rng_seed, classes, test.labels, svm_pred, **prov)]


def run_on_datasets(datasets: dict, cfg: ExperimentConfig) -> list[ClassificationReport]:
    reports = []
    for ch in sorted(datasets):
        train, test = split_dataset(datasets[ch], cfg.train_fraction, cfg.rng_seed)
        models = train_models(train, cfg)
        reports.extend(evaluate(models, test, cfg, ch, train))
    return reports


def run_experiment(cfg: ExperimentConfig) -> list[ClassificationReport]:
    """Full protocol per channel; writes report files when ``cfg.out_dir`` is set."""
    reports = run_on_datasets(build_datasets(cfg), cfg)
    if cfg.out_dir:
        write_reports(reports, cfg.out_dir)
    return reports


def noise_sweep(cfg: ExperimentConfig, levels=None, channel: int = 1) -> list[float]:
    """SRC average accuracy at each simulator noise power, all else fixed."""
    out = []
    for level in levels if levels is not None else cfg.noise_levels:
        scene = dataclasses.replace(cfg.scene, noise_power=float(level))
        sub = cfg.replace(scene=scene, channels=(channel,), out_dir=None)
        reports = run_on_datasets(build_datasets(sub), sub)
        out.append(next(r.average for r in reports if r.classifier == "SRC"))
    return out


def reports_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    classes = reports[0].classes
    w.writerow(["classifier", "channel", "seed", *[c.name for c in classes], "AVG"])
    for r in reports:
        w.writerow([r.classifier, r.channel, r.seed,
                    *[f"{a:.6f}" for a in r.per_class_accuracy], f"{r.average:.6f}"])
    return buf.getvalue()


def confusion_csv(report: ClassificationReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    names = [c.name for c in report.classes]
    w.writerow(["truth", *names])
    for name, row in zip(names, report.confusion):
        w.writerow([name, *[f"{v:.6f}" for v in row]])
    return buf.getvalue()


def format_accuracy_table(reports) -> str:
    """Per-channel accuracy table, one row per classifier."""
    lines = []
    for ch in sorted({r.channel for r in reports}):
        rows = [r for r in reports if r.channel == ch]
        names = [c.name for c in rows[0].classes]
        lines.append("\t".join([f"Ch.{ch}", *names, "AVG"]))
        for r in rows:
            cells = [f"{100 * a:.1f}%" for a in r.per_class_accuracy]
            lines.append("\t".join([r.classifier, *cells, f"{100 * r.average:.1f}%"]))
    return "\n".join(lines) + "\n"


def format_confusion_table(report: ClassificationReport) -> str:
    names = [c.name for c in report.classes]
    lines = [f"{report.classifier} confusion, channel {report.channel} (rows: ground truth)",
             "\t".join(["", *names])]
    for name, row in zip(names, report.confusion):
        lines.append("\t".join([name, *[f"{100 * v:.1f}%" for v in row]]))
    return "\n".join(lines) + "\n"


def write_reports(reports, out_dir) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = {out / "reports.csv": reports_csv(reports)}
    text = [format_accuracy_table(reports)]
    for r in reports:
        written[out / f"confusion_{r.classifier.lower()}_ch{r.channel}.csv"] = confusion_csv(r)
        text.append(format_confusion_table(r))
    written[out / "reports.txt"] = "\n".join(text)
    for path, content in written.items():
        path.write_text(content, encoding="utf-8")
    return list(written)
