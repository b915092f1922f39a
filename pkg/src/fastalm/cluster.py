"""Subspace clustering evaluation: affinity, spectral clustering, accuracy.

Given a self-representation matrix Z, points are clustered by normalized
spectral clustering on the symmetrized affinity W = (|Z| + |Z^T|) / 2 and
scored against ground truth with the best label matching.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import linear_sum_assignment
from sklearn.cluster import KMeans

from .errors import DimensionError


def affinity(z_mat):
    """Symmetric nonnegative affinity W = (|Z| + |Z^T|) / 2."""
    z_mat = np.asarray(z_mat, dtype=float)
    if z_mat.ndim != 2 or z_mat.shape[0] != z_mat.shape[1]:
        raise DimensionError(
            f"representation matrix must be square, got {z_mat.shape}"
        )
    a = np.abs(z_mat)
    return 0.5 * (a + a.T)


def spectral_cluster(w_mat, n_clusters, seed=0):
    """Normalized spectral clustering of an affinity matrix.

    Pipeline: symmetric normalized Laplacian L = I - D^{-1/2} W D^{-1/2},
    eigenvectors of the ``n_clusters`` smallest eigenvalues, row
    normalization, then k-means (10 seeded restarts, 100 iterations,
    squared-Euclidean).  Zero-degree rows (isolated points) get a unit
    self-loop first, which makes each of them its own graph component, so a
    degenerate all-zero affinity still clusters deterministically.

    Returns integer labels in ``[0, n_clusters)``.
    """
    w_mat = np.asarray(w_mat, dtype=float)
    n = w_mat.shape[0]
    if w_mat.ndim != 2 or w_mat.shape[1] != n:
        raise DimensionError(f"affinity must be square, got {w_mat.shape}")
    if not np.allclose(w_mat, w_mat.T, atol=1e-12):
        raise ValueError("affinity must be symmetric")
    if w_mat.min() < 0:
        raise ValueError("affinity must be nonnegative")
    n_clusters = int(n_clusters)
    if not 1 <= n_clusters <= n:
        raise ValueError(
            f"n_clusters must lie in [1, {n}], got {n_clusters}"
        )
    degrees = w_mat.sum(axis=1)
    isolated = degrees == 0
    if isolated.any():
        w_mat = w_mat.copy()
        w_mat[isolated, isolated] = 1.0
        degrees = w_mat.sum(axis=1)
    d_inv_sqrt = 1.0 / np.sqrt(degrees)
    lap = np.eye(n) - (d_inv_sqrt[:, None] * w_mat) * d_inv_sqrt[None, :]
    lap = 0.5 * (lap + lap.T)
    _, vecs = np.linalg.eigh(lap)
    embed = vecs[:, :n_clusters]
    row_norms = np.linalg.norm(embed, axis=1)
    row_norms[row_norms == 0] = 1.0
    embed = embed / row_norms[:, None]
    km = KMeans(
        n_clusters=n_clusters, n_init=10, max_iter=100, random_state=int(seed)
    )
    return km.fit_predict(embed).astype(int)


def cluster_accuracy(labels_pred, labels_true):
    """Fraction of points correctly labeled under the best label matching.

    Builds the confusion matrix and solves the assignment problem that
    maximizes agreement (Hungarian method), so the score is invariant to
    permutations of either labeling.
    """
    labels_pred = np.asarray(labels_pred).ravel()
    labels_true = np.asarray(labels_true).ravel()
    if labels_pred.shape != labels_true.shape:
        raise DimensionError(
            f"label vectors differ in length: {labels_pred.shape} vs "
            f"{labels_true.shape}"
        )
    if labels_pred.size == 0:
        raise ValueError("cannot score empty label vectors")
    pred_ids, pred_idx = np.unique(labels_pred, return_inverse=True)
    true_ids, true_idx = np.unique(labels_true, return_inverse=True)
    confusion = np.zeros((len(pred_ids), len(true_ids)), dtype=int)
    np.add.at(confusion, (pred_idx, true_idx), 1)
    rows, cols = linear_sum_assignment(-confusion)
    return float(confusion[rows, cols].sum()) / labels_true.size
