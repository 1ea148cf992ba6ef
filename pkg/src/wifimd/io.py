"""On-disk formats.

* IQ recordings: raw interleaved float32 I/Q pairs, little-endian, plus a
  ``<file>.json`` sidecar (sample_rate_hz, carrier_hz, label, seed, ...).
* Spectrograms: CSV, one row per Doppler bin in ascending frequency, one
  column per time bin, plus a JSON sidecar with the axes.
* Signatures: 2550 little-endian float32 values (column-major 51x50) plus a
  JSON sidecar (label, channel, source).
* PGM: binary P5 greyscale, rows in the same order as the CSV, values
  min-max scaled to 0-255.
* Manifests: newline-delimited JSON, one object per signature.
* Models: a small tagged container of named little-endian arrays.
"""
from __future__ import annotations

import json
import struct
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from . import align
from .caf import DopplerSpectrogram
from .classify import Dictionary, SvmModel
from .errors import InvalidArgument
from .pca import PcaModel
from .waveform import IqWaveform, MotionClass

MODEL_MAGIC = b"WMDM"
MODEL_VERSION = 1
KIND_PCA, KIND_DICTIONARY, KIND_SVM = 1, 2, 3
_DTYPES = {0: np.dtype("<f8"), 1: np.dtype("<i8")}


def sidecar(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".json")


def _write(path: Path, data: bytes):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(data)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def _read(path: Path) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc}") from exc


def write_meta(path, meta: dict):
    _write(sidecar(path), (json.dumps(meta, indent=2, sort_keys=True) + "\n").encode())


def read_meta(path) -> dict:
    p = sidecar(path)
    return json.loads(_read(p)) if p.exists() else {}


def write_iq(path, wf: IqWaveform, **meta):
    iq = np.empty(2 * len(wf), dtype="<f4")
    iq[0::2] = wf.samples.real
    iq[1::2] = wf.samples.imag
    _write(Path(path), iq.tobytes())
    write_meta(path, {"sample_rate_hz": wf.sample_rate_hz, "format": "cf32_le", **meta})


def read_iq(path, sample_rate_hz: Optional[float] = None) -> IqWaveform:
    raw = np.frombuffer(_read(Path(path)), dtype="<f4")
    if raw.size % 2:
        raise InvalidArgument(f"{path}: odd number of float32 values")
    rate = sample_rate_hz or read_meta(path).get("sample_rate_hz")
    if rate is None:
        raise InvalidArgument(f"{path}: sample rate unknown (no sidecar)")
    return IqWaveform(raw[0::2].astype(float) + 1j * raw[1::2].astype(float), float(rate))


def matrix_to_csv(mat) -> str:
    return "\n".join(",".join(repr(float(v)) for v in row) for row in np.asarray(mat)) + "\n"


def write_matrix_csv(path, mat):
    _write(Path(path), matrix_to_csv(mat).encode())


def read_matrix_csv(path) -> np.ndarray:
    return np.loadtxt(Path(path), delimiter=",", ndmin=2)


def write_spectrogram(path, spec: DopplerSpectrogram):
    write_matrix_csv(path, spec.values)
    write_meta(path, {"freq_axis_hz": [float(f) for f in spec.freq_axis_hz],
                      "hop_s": spec.hop_s, "source_channel": spec.source_channel})


def read_spectrogram(path) -> DopplerSpectrogram:
    values = read_matrix_csv(path)
    meta = read_meta(path)
    axis = meta.get("freq_axis_hz")
    if axis is None:
        n = values.shape[0]
        axis = np.arange(n) - n // 2
    return DopplerSpectrogram(values, np.asarray(axis, float), float(meta.get("hop_s", 0.04)),
                              meta.get("source_channel", ""))


def to_pgm_bytes(mat) -> bytes:
    mat = np.asarray(mat, dtype=float)
    rows, cols = mat.shape
    pixels = np.rint(255.0 * align.normalize01(mat)).astype(np.uint8)
    return f"P5 {cols} {rows} 255\n".encode("ascii") + pixels.tobytes()


def write_pgm(path, mat):
    _write(Path(path), to_pgm_bytes(mat))


def read_pgm(path) -> np.ndarray:
    data = _read(Path(path))
    tokens, pos = [], 0
    while len(tokens) < 4:
        while data[pos:pos + 1].isspace():
            pos += 1
        start = pos
        while not data[pos:pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos].decode("ascii"))
    if tokens[0] != "P5":
        raise InvalidArgument(f"{path}: not a binary PGM")
    cols, rows = int(tokens[1]), int(tokens[2])
    body = data[pos + 1: pos + 1 + rows * cols]
    return np.frombuffer(body, dtype=np.uint8).reshape(rows, cols)


def write_signature(path, sig: align.AlignedSignature, source: str = "", **meta):
    _write(Path(path), sig.vector.astype("<f4").tobytes())
    write_meta(path, {"label": sig.label.name if sig.label is not None else None,
                      "channel": sig.channel, "source": source, **meta})


def read_signature(path) -> align.AlignedSignature:
    vec = np.frombuffer(_read(Path(path)), dtype="<f4").astype(float)
    if vec.size != align.SIG_SIZE:
        raise InvalidArgument(f"{path}: expected {align.SIG_SIZE} float32 values, got {vec.size}")
    meta = read_meta(path)
    label = meta.get("label")
    return align.AlignedSignature(align.unvectorize(vec),
                                  MotionClass.parse(label) if label else None,
                                  meta.get("channel", ""))


def export_spectrogram(obj, path, fmt: str = "csv") -> Path:
    """Write a spectrogram, aligned signature or bare matrix as CSV or PGM."""
    if isinstance(obj, DopplerSpectrogram):
        mat = obj.values
    elif isinstance(obj, align.AlignedSignature):
        mat = obj.matrix
    else:
        mat = np.asarray(obj, dtype=float)
    path = Path(path)
    if fmt == "csv":
        if isinstance(obj, DopplerSpectrogram):
            write_spectrogram(path, obj)
        else:
            write_matrix_csv(path, mat)
    elif fmt == "pgm":
        write_pgm(path, mat)
    else:
        raise InvalidArgument(f"unknown export format {fmt!r}")
    return path


def write_manifest(path, entries: Iterable[dict]):
    lines = [json.dumps(e, sort_keys=True) for e in entries]
    _write(Path(path), ("\n".join(lines) + "\n").encode() if lines else b"")


def append_manifest(path, entry: dict):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("a", encoding="utf-8") as fh:
        fh.write(json.dumps(entry, sort_keys=True) + "\n")


def read_manifest(path) -> list[dict]:
    text = _read(Path(path)).decode("utf-8")
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def pack_arrays(kind: int, arrays: dict) -> bytes:
    """Serialize named arrays: magic, version, kind, count, then per array
    name, dtype code, rank, shape and little-endian data."""
    out = [MODEL_MAGIC, struct.pack("<BBH", MODEL_VERSION, kind, len(arrays))]
    for name, arr in arrays.items():
        arr = np.asarray(arr)
        code = 1 if np.issubdtype(arr.dtype, np.integer) else 0
        arr = np.ascontiguousarray(arr, dtype=_DTYPES[code])
        key = name.encode("utf-8")
        out.append(struct.pack("<B", len(key)) + key)
        out.append(struct.pack("<BB", code, arr.ndim) + struct.pack(f"<{arr.ndim}I", *arr.shape))
        out.append(arr.tobytes())
    return b"".join(out)


def unpack_arrays(data: bytes) -> tuple[int, dict]:
    if data[:4] != MODEL_MAGIC:
        raise InvalidArgument("not a model container (bad magic)")
    version, kind, count = struct.unpack_from("<BBH", data, 4)
    if version != MODEL_VERSION:
        raise InvalidArgument(f"unsupported model container version {version}")
    pos, arrays = 8, {}
    for _ in range(count):
        (klen,) = struct.unpack_from("<B", data, pos)
        name = data[pos + 1: pos + 1 + klen].decode("utf-8")
        pos += 1 + klen
        code, ndim = struct.unpack_from("<BB", data, pos)
        shape = struct.unpack_from(f"<{ndim}I", data, pos + 2)
        pos += 2 + 4 * ndim
        dtype = _DTYPES[code]
        nbytes = int(np.prod(shape, dtype=np.int64)) * dtype.itemsize
        arrays[name] = np.frombuffer(data[pos:pos + nbytes], dtype=dtype).reshape(shape).copy()
        pos += nbytes
    return kind, arrays


def save_model(path, model):
    if isinstance(model, PcaModel):
        payload = pack_arrays(KIND_PCA, {"mean": model.mean, "eigenvalues": model.eigenvalues,
                                         "basis": model.basis})
    elif isinstance(model, Dictionary):
        payload = pack_arrays(KIND_DICTIONARY, {"atoms": model.atoms, "labels": model.label_array,
                                                "classes": np.array([int(c) for c in model.classes])})
    elif isinstance(model, SvmModel):
        payload = pack_arrays(KIND_SVM, {
            "weights": model.weights, "biases": model.biases,
            "classes": np.array([int(c) for c in model.classes]),
            "hyper": np.array([model.lam, model.epochs, model.seed], dtype=float)})
    else:
        raise InvalidArgument(f"cannot serialize {type(model).__name__}")
    _write(Path(path), payload)


def load_model(path):
    kind, a = unpack_arrays(_read(Path(path)))
    if kind == KIND_PCA:
        return PcaModel(a["mean"], a["basis"], a["eigenvalues"])
    if kind == KIND_DICTIONARY:
        return Dictionary(a["atoms"], [int(v) for v in a["labels"]], [int(v) for v in a["classes"]])
    if kind == KIND_SVM:
        lam, epochs, seed = a["hyper"]
        return SvmModel(a["weights"], a["biases"], tuple(MotionClass(int(c)) for c in a["classes"]),
                        float(lam), int(epochs), int(seed))
    raise InvalidArgument(f"unknown model kind {kind}")
