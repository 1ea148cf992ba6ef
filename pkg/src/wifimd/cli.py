"""Command-line front end: ``wifimd <subcommand> [options]``."""
from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

import numpy as np

from . import align, caf, harness, io, pca, waveform
from .errors import DatasetBuildError, InvalidArgument, NoMotionDetected

log = logging.getLogger("wifimd")


def _config(args) -> harness.ExperimentConfig:
    cfg = harness.load_config(args.config) if args.config else harness.ExperimentConfig()
    if args.seed is not None:
        cfg = cfg.replace(rng_seed=args.seed)
    if args.out_dir:
        cfg = cfg.replace(out_dir=args.out_dir)
    return cfg


def _out_dir(args, cfg) -> Path:
    out = Path(args.out_dir or cfg.out_dir or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_simulate(args, cfg):
    label = waveform.MotionClass.parse(args.label)
    recipe = next(r for r in harness.sample_recipes(cfg.replace(counts={label: max(args.index + 1, 2)}))
                  if r.index == args.index)
    pair, profile = harness.simulate_recording(cfg, recipe, args.channel)
    out = _out_dir(args, cfg)
    stem = f"{label.name}_{args.index:03d}_ch{args.channel}"
    meta = dict(carrier_hz=cfg.scene.carrier_hz, label=label.name, seed=cfg.rng_seed,
                channel=args.channel, onset_s=recipe.onset_s, duration_s=profile.duration_s)
    io.write_iq(out / f"{stem}_ref.cf32", pair.reference, role="reference", **meta)
    io.write_iq(out / f"{stem}_sur.cf32", pair.surveillance, role="surveillance", **meta)
    print(out / f"{stem}_ref.cf32")
    print(out / f"{stem}_sur.cf32")


def cmd_extract(args, cfg):
    ref, sur = io.read_iq(args.ref), io.read_iq(args.sur)
    ccfg = dataclasses.replace(cfg.caf, sample_rate_hz=ref.sample_rate_hz)
    selector = "argmax" if args.delay is None else args.delay
    spec = caf.spectrogram(waveform.ChannelPair(ref, sur), ccfg, selector, f"ch{args.channel}")
    out = Path(args.output) if args.output else _out_dir(args, cfg) / (Path(args.sur).stem + ".csv")
    io.write_spectrogram(out, spec)
    print(out)


def cmd_align(args, cfg):
    spec = io.read_spectrogram(args.spectrogram)
    meta = io.read_meta(args.spectrogram)
    sig = align.align_signature(spec, args.threshold if args.threshold else cfg.threshold,
                                args.label, spec.source_channel)
    out = Path(args.output) if args.output else \
        _out_dir(args, cfg) / (Path(args.spectrogram).stem + ".f32")
    io.write_signature(out, sig, source=str(args.spectrogram), start_bin=sig.bounds.start_bin,
                       end_bin=sig.bounds.end_bin, **{k: v for k, v in meta.items() if k == "seed"})
    print(out)


def cmd_dataset(args, cfg):
    cfg = cfg.replace(channels=(args.channel,))
    ds = harness.build_datasets(cfg)[args.channel]
    out = _out_dir(args, cfg)
    entries = []
    for vec, label, ident in zip(ds.samples, ds.labels, ds.ids):
        path = out / "signatures" / (ident.replace("/", "_") + ".f32")
        io.write_signature(path, align.AlignedSignature(align.unvectorize(vec), label,
                                                        f"ch{args.channel}"), source=ident)
        entries.append({"label": label.name, "channel": args.channel, "seed": cfg.rng_seed,
                        "id": ident, "path": str(path.relative_to(out))})
    manifest = out / f"manifest_ch{args.channel}.ndjson"
    io.write_manifest(manifest, entries)
    print(manifest)


def _load_manifest(path) -> pca.SignatureDataset:
    path = Path(path)
    entries = io.read_manifest(path)
    if not entries:
        raise InvalidArgument(f"{path}: empty manifest")
    vecs = [io.read_signature(path.parent / e["path"]).vector for e in entries]
    return pca.SignatureDataset(np.stack(vecs), [e["label"] for e in entries],
                                [f"ch{e['channel']}" for e in entries],
                                [e.get("id", e["path"]) for e in entries])


def cmd_train(args, cfg):
    ds = _load_manifest(args.manifest)
    train, test = harness.split_dataset(ds, cfg.train_fraction, cfg.rng_seed)
    models = harness.train_models(train, cfg)
    out = _out_dir(args, cfg)
    io.save_model(out / "pca.wmdm", models.pca_model)
    io.save_model(out / "dictionary.wmdm", models.dictionary)
    io.save_model(out / "svm.wmdm", models.svm)
    io.write_manifest(out / "split.ndjson",
                      [{"id": i, "set": "train"} for i in train.ids] +
                      [{"id": i, "set": "test"} for i in test.ids])
    print(out / "pca.wmdm")


def cmd_evaluate(args, cfg):
    out = _out_dir(args, cfg)
    if args.manifest:
        ds = _load_manifest(args.manifest)
        models_dir = Path(args.models or out)
        split = {e["id"]: e["set"] for e in io.read_manifest(models_dir / "split.ndjson")}
        test = ds.subset([i for i, ident in enumerate(ds.ids) if split.get(ident) == "test"])
        models = harness.TrainedModels(io.load_model(models_dir / "pca.wmdm"),
                                       io.load_model(models_dir / "dictionary.wmdm"),
                                       io.load_model(models_dir / "svm.wmdm"))
        channel = int(ds.channels[0].lstrip("ch") or args.channel)
        reports = harness.evaluate(models, test, cfg, channel)
        harness.write_reports(reports, out)
    else:
        cfg = cfg.replace(out_dir=str(out))
        if args.channel_given:
            cfg = cfg.replace(channels=(args.channel,))
        reports = harness.run_experiment(cfg)
    sys.stdout.write(harness.format_accuracy_table(reports))


def cmd_export(args, cfg):
    src = Path(args.input)
    if src.suffix == ".f32":
        obj = io.read_signature(src)
    else:
        obj = io.read_spectrogram(src)
    out = Path(args.output) if args.output else src.with_suffix("." + args.format)
    io.export_spectrogram(obj, out, args.format)
    print(out)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML or JSON experiment config")
    common.add_argument("--seed", type=int, help="override rng_seed")
    common.add_argument("--out-dir", help="output directory")
    common.add_argument("--channel", type=int, choices=(1, 2), default=None)
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="wifimd", parents=[common],
                                description="Passive Wi-Fi micro-Doppler activity recognition")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", parents=[common], help="write a simulated IQ channel pair")
    s.add_argument("--label", required=True, help="M1..M6")
    s.add_argument("--index", type=int, default=0, help="sample index within the class")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("extract", parents=[common], help="IQ pair -> Doppler-time CSV")
    s.add_argument("--ref", required=True)
    s.add_argument("--sur", required=True)
    s.add_argument("--delay", type=int, help="fixed delay bin (default: per-window argmax)")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_extract)

    s = sub.add_parser("align", parents=[common], help="spectrogram CSV -> 51x50 signature")
    s.add_argument("spectrogram")
    s.add_argument("--threshold", type=float)
    s.add_argument("--label")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_align)

    s = sub.add_parser("dataset", parents=[common], help="synthesize the signature dataset")
    s.set_defaults(func=cmd_dataset)

    s = sub.add_parser("train", parents=[common], help="split, fit PCA, dictionary and SVM")
    s.add_argument("--manifest", required=True)
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("evaluate", parents=[common],
                       help="evaluate trained models, or run the whole experiment")
    s.add_argument("--manifest")
    s.add_argument("--models", help="directory written by 'train'")
    s.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("export", parents=[common], help="spectrogram/signature -> CSV or PGM")
    s.add_argument("input")
    s.add_argument("--format", choices=("csv", "pgm"), default="pgm")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_export)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    args.channel_given = args.channel is not None
    if args.channel is None:
        args.channel = 1
    try:
        cfg = _config(args)
        args.func(args, cfg)
    except (InvalidArgument, NoMotionDetected, DatasetBuildError, OSError, ValueError) as exc:
        print(f"wifimd {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
