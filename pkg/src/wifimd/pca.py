"""Principal-component reduction of vectorized signatures."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidArgument
from .waveform import MotionClass

VARIANCE_TARGET = 0.95
MAX_COMPONENTS = 60


@dataclass(frozen=True)
class SignatureDataset:
    """Labeled signature vectors, one per row.

    ``ids`` are stable provenance tags (e.g. ``"ch1/M4/007"``) used to prove
    that train and test sets stay disjoint through the pipeline.
    """

    samples: np.ndarray
    labels: tuple
    channels: tuple = ()
    ids: tuple = ()

    def __post_init__(self):
        x = np.asarray(self.samples, dtype=float)
        if x.ndim != 2 or x.shape[0] == 0:
            raise InvalidArgument("samples must be a nonempty N x P array")
        n = x.shape[0]
        labels = tuple(MotionClass.parse(lab) for lab in self.labels)
        if len(labels) != n:
            raise InvalidArgument("one label per sample required")
        channels = tuple(self.channels) or ("",) * n
        ids = tuple(self.ids) or tuple(str(i) for i in range(n))
        if len(channels) != n or len(ids) != n:
            raise InvalidArgument("channels and ids must match the sample count")
        object.__setattr__(self, "samples", x)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "channels", channels)
        object.__setattr__(self, "ids", ids)

    def __len__(self) -> int:
        return self.samples.shape[0]

    @property
    def dim(self) -> int:
        return self.samples.shape[1]

    @property
    def label_array(self) -> np.ndarray:
        return np.array([int(lab) for lab in self.labels])

    def subset(self, index: Sequence[int]) -> "SignatureDataset":
        index = list(index)
        return SignatureDataset(self.samples[index], [self.labels[i] for i in index],
                                [self.channels[i] for i in index], [self.ids[i] for i in index])

    def with_samples(self, samples: np.ndarray) -> "SignatureDataset":
        return SignatureDataset(samples, self.labels, self.channels, self.ids)


@dataclass(frozen=True)
class PcaModel:
    mean: np.ndarray          # (P,)
    basis: np.ndarray         # (P, Md), orthonormal columns
    eigenvalues: np.ndarray   # (Md,), descending
    fit_ids: tuple = field(default=(), compare=False)
    # full training spectrum, kept for explained-variance queries
    spectrum: Optional[np.ndarray] = field(default=None, compare=False, repr=False)

    @property
    def n_components(self) -> int:
        return self.basis.shape[1]

    @property
    def dim(self) -> int:
        return self.basis.shape[0]


def components_for_variance(spectrum, target: float = VARIANCE_TARGET,
                            cap: int = MAX_COMPONENTS) -> int:
    """Smallest count whose eigenvalues capture ``target`` of the variance, capped."""
    spectrum = np.asarray(spectrum, dtype=float)
    total = spectrum.sum()
    if total <= 0:
        return 1
    k = int(np.searchsorted(np.cumsum(spectrum) / total, target - 1e-12) + 1)
    return max(1, min(k, cap, spectrum.size))


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    # largest-magnitude entry of each column made positive
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def fit_pca(train, n_components: Optional[int] = None) -> PcaModel:
    """Fit the projection on training samples only.

    The eigenvectors of the sample covariance come from a thin SVD of the
    centred N x P data matrix, which costs O(N^2 P) when N << P. With
    ``n_components=None`` the count is chosen by :func:`components_for_variance`.
    """
    if isinstance(train, SignatureDataset):
        x, ids = train.samples, train.ids
    else:
        x, ids = np.asarray(train, dtype=float), ()
    if x.ndim != 2:
        raise InvalidArgument("training data must be N x P")
    n, p = x.shape
    if n < 2:
        raise InvalidArgument("need at least two training samples")
    mean = x.mean(axis=0)
    _, s, vt = np.linalg.svd(x - mean, full_matrices=False)
    spectrum = s ** 2 / (n - 1)
    if n_components is None:
        n_components = components_for_variance(spectrum)
    if not 1 <= n_components <= min(p, n):
        raise InvalidArgument(f"n_components must lie in [1, {min(p, n)}]")
    basis = _fix_signs(vt[:n_components].T.copy())
    return PcaModel(mean, basis, spectrum[:n_components].copy(), tuple(ids), spectrum)


def project(model: PcaModel, d) -> np.ndarray:
    """``basis.T @ (d - mean)`` for one vector or a stack of row vectors."""
    d = np.asarray(d, dtype=float)
    if d.shape[-1] != model.dim:
        raise InvalidArgument(f"expected length {model.dim}, got {d.shape[-1]}")
    return (d - model.mean) @ model.basis


def reconstruct(model: PcaModel, z) -> np.ndarray:
    return np.asarray(z) @ model.basis.T + model.mean


def project_dataset(model: PcaModel, ds: SignatureDataset) -> SignatureDataset:
    return ds.with_samples(project(model, ds.samples))
