"""Datasets: sparse designs, label handling, synthetic generators, text I/O.

A :class:`Dataset` wraps an n x d CSR design matrix and a label/target
vector.  Everything downstream treats it as immutable; the transforms
here (`normalize_features`, `train_test_split`, `binarize_labels`) return
new datasets and never touch their input.

The text format is one sample per line, ``label idx:val idx:val ...``
with 1-based, strictly ascending indices.  Blank lines and ``#`` comments
are skipped.  Malformed lines fail fast with their line number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import sparse

from .rng import make_rng, spawn_rngs

__all__ = [
    "Dataset",
    "DataError",
    "parse_libsvm",
    "emit_libsvm",
    "binarize_labels",
    "train_test_split",
    "normalize_features",
    "synth_classification",
    "synth_regression",
]


class DataError(ValueError):
    """Malformed dataset text or an ill-posed dataset transform."""


@dataclass
class Dataset:
    """Sparse design matrix, labels/targets, and a task tag.

    ``task`` is "classification" (labels in {0,1} after binarization) or
    "regression".  Synthetic datasets carry the planted coefficient
    vector in ``planted``; parsed ones leave it None.
    """

    X: sparse.csr_matrix
    y: np.ndarray
    task: str
    planted: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if not sparse.issparse(self.X):
            raise DataError("X must be a scipy sparse matrix")
        self.X = self.X.tocsr().astype(np.float64)
        self.y = np.asarray(self.y, dtype=np.float64).ravel()
        if self.X.shape[0] != self.y.size:
            raise DataError(
                f"row/label mismatch: {self.X.shape[0]} rows, {self.y.size} labels"
            )
        if self.X.shape[0] < 1 or self.X.shape[1] < 1:
            raise DataError("dataset must have at least one row and one feature")
        if not np.all(np.isfinite(self.X.data)) or not np.all(np.isfinite(self.y)):
            raise DataError("non-finite feature or label values")
        if self.task not in ("classification", "regression"):
            raise DataError(f"unknown task {self.task!r}")

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def d(self):
        return self.X.shape[1]


def parse_libsvm(path, d=None, task=None):
    """Read a dataset from ``path`` (or any object with .read()).

    ``d`` overrides the feature count; by default it is the largest index
    seen.  ``task`` overrides the inferred one (labels within
    {-1, 0, +1} read as classification, anything else as regression).
    """
    if hasattr(path, "read"):
        text = path.read()
    else:
        with open(path, "r", encoding="ascii") as fh:
            text = fh.read()

    labels, indptr, indices, values = [], [0], [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            labels.append(float(parts[0]))
        except ValueError:
            raise DataError(f"line {lineno}: label {parts[0]!r} is not a number") from None
        prev = 0
        for tok in parts[1:]:
            idx_s, _, val_s = tok.partition(":")
            try:
                idx, val = int(idx_s), float(val_s)
            except ValueError:
                raise DataError(f"line {lineno}: bad feature token {tok!r}") from None
            if idx < 1:
                raise DataError(f"line {lineno}: index {idx} is not 1-based")
            if idx <= prev:
                raise DataError(
                    f"line {lineno}: index {idx} after {prev} "
                    "(indices must be strictly ascending)"
                )
            prev = idx
            indices.append(idx - 1)
            values.append(val)
        indptr.append(len(indices))
    if not labels:
        raise DataError("no samples found")

    max_idx = max(indices) + 1 if indices else 1
    if d is None:
        d = max_idx
    elif d < max_idx:
        raise DataError(f"d={d} but the data holds feature index {max_idx}")
    X = sparse.csr_matrix(
        (np.asarray(values, dtype=np.float64), indices, indptr),
        shape=(len(labels), d),
    )
    y = np.asarray(labels, dtype=np.float64)
    if task is None:
        task = "classification" if np.all(np.isin(y, (-1.0, 0.0, 1.0))) else "regression"
    return Dataset(X=X, y=y, task=task)


def emit_libsvm(data, path=None):
    """Write ``data`` in the text format; returns the text when path is None.

    Floats are written with shortest round-trip precision, so
    parse(emit(data)) reproduces the stored values exactly.
    """
    lines = []
    X = data.X
    for i in range(data.n):
        lo, hi = X.indptr[i], X.indptr[i + 1]
        feats = " ".join(
            f"{j + 1}:{v!r}" for j, v in zip(X.indices[lo:hi], X.data[lo:hi].tolist())
        )
        lab = repr(float(data.y[i]))
        lines.append(f"{lab} {feats}".rstrip())
    text = "\n".join(lines) + "\n"
    if path is None:
        return text
    with open(path, "w", encoding="ascii") as fh:
        fh.write(text)
    return path


def binarize_labels(data):
    """Map classification labels onto {0, 1}.

    {0,1} passes through, {-1,+1} maps to {0,1}.  More than two distinct
    labels is rejected: multiclass problems are out of scope here.
    """
    classes = np.unique(data.y)
    if classes.size > 2:
        raise DataError(
            f"{classes.size} distinct labels found; only binary labels are supported"
        )
    if np.all(np.isin(classes, (0.0, 1.0))):
        y = data.y.copy()
    elif np.all(np.isin(classes, (-1.0, 1.0))):
        y = (data.y > 0).astype(np.float64)
    else:
        raise DataError(f"cannot binarize labels {classes.tolist()}; use {{0,1}} or {{-1,+1}}")
    return replace(data, X=data.X.copy(), y=y, task="classification")


def train_test_split(data, fraction, seed):
    """Deterministic permutation split; train gets floor(fraction * n) rows."""
    if not 0.0 < fraction < 1.0:
        raise DataError(f"fraction must be in (0, 1), got {fraction}")
    n_train = int(math.floor(fraction * data.n))
    if n_train < 1 or n_train >= data.n:
        raise DataError(f"split of {data.n} rows at {fraction} leaves an empty side")
    perm = make_rng(seed).permutation(data.n)
    tr, te = np.sort(perm[:n_train]), np.sort(perm[n_train:])
    return (
        replace(data, X=data.X[tr], y=data.y[tr]),
        replace(data, X=data.X[te], y=data.y[te]),
    )


def normalize_features(data, mode="unit_row_norm"):
    """Return a copy with rescaled rows.  Zero rows are left untouched."""
    if mode == "none":
        return replace(data, X=data.X.copy(), y=data.y.copy())
    if mode != "unit_row_norm":
        raise DataError(f"unknown normalization {mode!r}")
    sq = np.asarray(data.X.multiply(data.X).sum(axis=1)).ravel()
    norms = np.sqrt(sq)
    scale = np.where(norms > 0, 1.0 / np.where(norms > 0, norms, 1.0), 1.0)
    X = sparse.diags(scale).dot(data.X).tocsr()
    return replace(data, X=X, y=data.y.copy())


def _plant(rng, d, nnz):
    """Sparse sign vector: ``nnz`` coordinates set to +-1."""
    x = np.zeros(d)
    support = rng.choice(d, size=nnz, replace=False)
    x[np.sort(support)] = rng.choice([-1.0, 1.0], size=nnz)
    return x


def _sparse_rows(rng, n, d, row_nnz):
    indices = np.empty(n * row_nnz, dtype=np.int64)
    for i in range(n):
        indices[i * row_nnz : (i + 1) * row_nnz] = np.sort(
            rng.choice(d, size=row_nnz, replace=False)
        )
    values = rng.standard_normal(n * row_nnz)
    indptr = np.arange(0, n * row_nnz + 1, row_nnz)
    return sparse.csr_matrix((values, indices, indptr), shape=(n, d))


def synth_classification(n, d, row_nnz, noise, seed, planted_nnz=None):
    """Planted binary classification.

    Rows hold ``row_nnz`` standard-normal entries at random positions.
    A sign vector with ``planted_nnz`` nonzeros (default ceil(0.2 d)) is
    planted and labels are 1 where its perturbed margin clears zero:
    b_i = 1{ a_i . x* + noise * z_i > 0 }.  noise=0 gives an exactly
    separable problem with the planted vector as witness.
    """
    if row_nnz < 1 or row_nnz > d:
        raise DataError(f"row_nnz must be in [1, {d}], got {row_nnz}")
    if planted_nnz is None:
        planted_nnz = max(1, math.ceil(0.2 * d))
    r_plant, r_rows, r_noise = spawn_rngs(seed, 3)
    planted = _plant(r_plant, d, planted_nnz)
    X = _sparse_rows(r_rows, n, d, row_nnz)
    margin = X.dot(planted) + noise * r_noise.standard_normal(n)
    y = (margin > 0).astype(np.float64)
    return Dataset(X=X, y=y, task="classification", planted=planted)


def synth_regression(
    n, d, row_nnz, noise, seed, planted_nnz=None, outlier_frac=0.05, outlier_scale=25.0
):
    """Planted sparse regression with a heavy-tailed contamination fraction.

    y_i = a_i . x* + noise * e_i, where a randomly chosen ``outlier_frac``
    of the noise draws are inflated by ``outlier_scale``.  noise=0 gives
    y = X x* exactly (no outliers either, since they scale the noise).
    """
    if row_nnz < 1 or row_nnz > d:
        raise DataError(f"row_nnz must be in [1, {d}], got {row_nnz}")
    if not 0.0 <= outlier_frac <= 1.0:
        raise DataError(f"outlier_frac must be in [0, 1], got {outlier_frac}")
    if planted_nnz is None:
        planted_nnz = max(1, math.ceil(0.2 * d))
    r_plant, r_rows, r_noise, r_out = spawn_rngs(seed, 4)
    planted = _plant(r_plant, d, planted_nnz)
    X = _sparse_rows(r_rows, n, d, row_nnz)
    e = r_noise.standard_normal(n)
    n_out = int(round(outlier_frac * n))
    if n_out:
        e[r_out.choice(n, size=n_out, replace=False)] *= outlier_scale
    y = X.dot(planted) + noise * e
    return Dataset(X=X, y=y, task="regression", planted=planted)
