"""Sparse-representation classification and a linear SVM baseline.

The SRC dictionary holds unit-norm training vectors as columns. A test
vector is coded over it by subspace pursuit with a fixed sparsity K; each
class then reconstructs the test vector from its own coefficients only and
the class with the smallest residual wins.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidArgument
from .waveform import MotionClass

DEFAULT_SPARSITY = 10
MAX_SP_ITERATIONS = 50


@dataclass(frozen=True)
class Dictionary:
    atoms: np.ndarray   # (Md, N_train), unit-norm columns
    labels: tuple
    classes: tuple = ()

    def __post_init__(self):
        atoms = np.asarray(self.atoms, dtype=float)
        labels = tuple(MotionClass.parse(lab) for lab in self.labels)
        if atoms.ndim != 2 or atoms.shape[1] != len(labels) or not labels:
            raise InvalidArgument("need one label per dictionary column")
        norms = np.linalg.norm(atoms, axis=0)
        if not np.allclose(norms, 1.0, atol=1e-8):
            raise InvalidArgument("dictionary atoms must have unit norm")
        classes = tuple(sorted(set(labels))) if not self.classes else \
            tuple(MotionClass.parse(c) for c in self.classes)
        missing = set(classes) - set(labels)
        if missing:
            raise InvalidArgument(f"no atoms for classes {sorted(missing)}")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "classes", classes)

    @property
    def n_atoms(self) -> int:
        return self.atoms.shape[1]

    @property
    def dim(self) -> int:
        return self.atoms.shape[0]

    @property
    def label_array(self) -> np.ndarray:
        return np.array([int(lab) for lab in self.labels])


def build_dictionary(features, labels, classes: Sequence = ()) -> Dictionary:
    """Dictionary from row-stacked training features; columns are normalized."""
    x = np.asarray(features, dtype=float)
    norms = np.linalg.norm(x, axis=1)
    if np.any(norms == 0):
        raise InvalidArgument("zero-norm training vector cannot be an atom")
    return Dictionary((x / norms[:, None]).T, labels, classes)


@dataclass(frozen=True)
class SparseCode:
    coefficients: np.ndarray
    support: tuple
    residual_norm: float
    residual_history: tuple = field(default=(), compare=False)

    @property
    def iterations(self) -> int:
        return max(len(self.residual_history) - 1, 0)


def _ls(A: np.ndarray, y: np.ndarray, idx: np.ndarray) -> np.ndarray:
    # minimum-norm solution covers rank-deficient supports
    return np.linalg.lstsq(A[:, idx], y, rcond=None)[0]


def _top(values: np.ndarray, k: int) -> np.ndarray:
    # stable ordering so ties resolve to the lower index
    order = np.argsort(-np.abs(values), kind="stable")
    return np.sort(order[:k])


def subspace_pursuit(dictionary, y, K: int = DEFAULT_SPARSITY,
                     max_iter: int = MAX_SP_ITERATIONS) -> SparseCode:
    """K-sparse code of ``y`` by subspace pursuit.

    Each iteration merges the current support with the K atoms most
    correlated with the residual, fits least squares on the union, prunes to
    the K largest coefficients and refits. Iteration stops as soon as the
    residual norm fails to decrease; the previous support is then kept, so
    the recorded residual history is non-increasing.
    """
    A = dictionary.atoms if isinstance(dictionary, Dictionary) else np.asarray(dictionary, float)
    y = np.asarray(y, dtype=float)
    m, n = A.shape
    if y.shape != (m,):
        raise InvalidArgument(f"expected a length-{m} vector")
    if not 1 <= K <= min(m, n):
        raise InvalidArgument(f"K must lie in [1, {min(m, n)}]")

    support = _top(A.T @ y, K)
    coef = _ls(A, y, support)
    resid = y - A[:, support] @ coef
    rnorm = float(np.linalg.norm(resid))
    history = [rnorm]
    for _ in range(max_iter):
        merged = np.union1d(support, _top(A.T @ resid, K))
        wide = _ls(A, y, merged)
        cand = merged[_top(wide, K)]
        cand_coef = _ls(A, y, cand)
        cand_resid = y - A[:, cand] @ cand_coef
        cand_norm = float(np.linalg.norm(cand_resid))
        if cand_norm >= rnorm:
            break
        support, coef, resid, rnorm = cand, cand_coef, cand_resid, cand_norm
        history.append(rnorm)
    assert all(b <= a for a, b in zip(history, history[1:]))

    full = np.zeros(n)
    full[support] = coef
    return SparseCode(full, tuple(int(i) for i in support), rnorm, tuple(history))


def class_residual(dictionary: Dictionary, code: SparseCode, y, class_i) -> float:
    """``||y - atoms @ delta_i(coefficients)||`` keeping only class ``class_i`` atoms."""
    cls = MotionClass.parse(class_i)
    if cls not in dictionary.classes:
        raise InvalidArgument(f"class {cls.name} not in dictionary")
    mask = dictionary.label_array == int(cls)
    return float(np.linalg.norm(np.asarray(y, float) - dictionary.atoms[:, mask] @ code.coefficients[mask]))


def src_classify(dictionary: Dictionary, y, K: int = DEFAULT_SPARSITY):
    """Return ``(label, residuals)`` with residuals ordered as ``dictionary.classes``.

    Equal residuals resolve to the class listed first.
    """
    code = subspace_pursuit(dictionary, y, K)
    residuals = np.array([class_residual(dictionary, code, y, c) for c in dictionary.classes])
    return dictionary.classes[int(np.argmin(residuals))], residuals


@dataclass(frozen=True)
class SvmModel:
    """One-vs-rest linear classifiers; row ``i`` of ``weights`` scores ``classes[i]``."""

    weights: np.ndarray
    biases: np.ndarray
    classes: tuple
    lam: float
    epochs: int
    seed: int

    @property
    def dim(self) -> int:
        return self.weights.shape[1]

    def scores(self, y) -> np.ndarray:
        return self.weights @ np.asarray(y, float) + self.biases


def _hinge_bias(margins: np.ndarray, t: np.ndarray) -> float:
    """Bias minimizing ``sum(max(0, 1 - t * (margins + b)))`` exactly.

    The objective is convex piecewise linear, so an optimum sits on a kink
    ``b = t_i - margins_i``; among tied optima the one nearest zero is used.
    """
    knots = np.unique(t - margins)
    loss = np.maximum(0.0, 1.0 - t[None, :] * (margins[None, :] + knots[:, None])).sum(axis=1)
    best = np.flatnonzero(loss <= loss.min() + 1e-12)
    return float(knots[best[np.argmin(np.abs(knots[best]))]])


def train_linear_svm(features, labels, lam: float = 1e-3, epochs: int = 30,
                     seed: int = 0) -> SvmModel:
    """One-vs-rest L2-regularized hinge-loss SVMs by stochastic subgradient steps.

    Weights follow the Pegasos schedule (step ``1/(lam t)``, one pass over a
    seeded permutation per epoch, bias updated alongside without
    regularization); afterwards each bias is refit exactly for its final
    weights.
    """
    x = np.asarray(features, dtype=float)
    labs = np.array([int(MotionClass.parse(lab)) for lab in labels])
    classes = tuple(MotionClass(c) for c in np.unique(labs))
    if len(classes) < 2:
        raise InvalidArgument("SVM training needs at least two classes")
    if not lam > 0:
        raise InvalidArgument("lam must be positive")
    if x.ndim != 2 or x.shape[0] != labs.size:
        raise InvalidArgument("features must be N x Md with one label per row")
    n, dim = x.shape
    rng = np.random.default_rng(seed)
    orders = [rng.permutation(n) for _ in range(epochs)]

    W = np.zeros((len(classes), dim))
    b = np.zeros(len(classes))
    for ci, cls in enumerate(classes):
        t = np.where(labs == int(cls), 1.0, -1.0)
        w = np.zeros(dim)
        bias = 0.0
        step = 0
        for order in orders:
            for i in order:
                step += 1
                eta = 1.0 / (lam * step)
                violated = t[i] * (x[i] @ w + bias) < 1.0
                w *= 1.0 - eta * lam
                if violated:
                    w += eta * t[i] * x[i]
                    bias += eta * lam * t[i]
        W[ci] = w
        b[ci] = _hinge_bias(x @ w, t)
    return SvmModel(W, b, classes, lam, epochs, seed)


def svm_classify(model: SvmModel, y) -> MotionClass:
    y = np.asarray(y, dtype=float)
    if y.shape != (model.dim,):
        raise InvalidArgument(f"expected a length-{model.dim} vector")
    return model.classes[int(np.argmax(model.scores(y)))]
