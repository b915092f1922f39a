"""Benchmark problem generators and on-disk problem manifests.

Three problem families:

* ``gen_lasso_simplex`` — l1-regularized least squares with a sum-to-one
  constraint:  min ||x||_1 + alpha/2 ||A x - b||^2  s.t.  1^T x = 1.
* ``gen_three_block`` — three coupled regularized regressions:
  min sum_i ( ||X_i||_(i) + alpha_i/2 ||C_i X_i - D_i||_F^2 )
  s.t. sum_i A_i X_i = B, with the l1, nuclear, and l21 norms on the
  respective blocks.
* ``build_subspace_problem`` — low-rank-plus-sparse self-representation for
  subspace clustering:  min a1 ||Z||_* + a2 ||Z||_1 + 1/2 ||X Z - X||_F^2
  s.t. 1^T Z = 1^T, written as two blocks (Z1, Z2): Z1 carries the smooth
  fit and the nuclear norm, Z2 the l1 norm, and the stacked constraint

      [Z1; 1^T Z1] + [-Z2; 0] = [0; 1^T]

  enforces both Z1 = Z2 and the column-sum condition.

All randomness comes from ``numpy.random.default_rng(seed)`` with the draw
order documented per generator, so a (kind, sizes, seed) triple pins the
instance exactly.  ``save_manifest`` / ``load_manifest`` store instances as
a small JSON index plus MatrixMarket files and reproduce them byte for byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import functions, linops
from .blocks import BlockPoint
from .solvers import Block, BlockProblem

MANIFEST_FORMAT = "block-problem/1"
MANIFEST_NAME = "manifest.json"


@dataclass
class ProblemBundle:
    """A generated instance: the solver-ready problem plus its raw pieces."""

    kind: str
    params: dict
    matrices: dict
    problem: BlockProblem
    labels: Optional[np.ndarray] = None


def gen_lasso_simplex(m, n, alpha=1.0, seed=0):
    """Random instance of the simplex-constrained lasso.

    Draw order: A of shape (m, n), then b of shape (m, 1), both standard
    normal from ``default_rng(seed)``.
    """
    m, n = int(m), int(n)
    if m < 1 or n < 1:
        raise ValueError(f"sizes must be positive, got m={m}, n={n}")
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    rng = np.random.default_rng(seed)
    a_mat = rng.standard_normal((m, n))
    b_vec = rng.standard_normal((m, 1))
    return _build_lasso_simplex(
        {"m": m, "n": n, "alpha": float(alpha), "seed": int(seed)},
        {"A": a_mat, "b": b_vec},
    )


def _build_lasso_simplex(params, matrices):
    a_mat, b_vec = matrices["A"], matrices["b"]
    n = a_mat.shape[1]
    block = Block(
        smooth=functions.Quadratic(a_mat, b_vec, params["alpha"]),
        prox=functions.L1(1.0),
        op=linops.RowSum((n, 1)),
    )
    problem = BlockProblem([block], np.ones((1, 1)))
    return ProblemBundle("lasso_simplex", params, matrices, problem)


def gen_three_block(m, alphas=(0.1, 0.1, 0.1), seed=0):
    """Random instance of the three-block coupled regression.

    All matrices are m x m standard normal.  Draw order: A_1, C_1, D_1,
    A_2, C_2, D_2, A_3, C_3, D_3, then B.
    """
    m = int(m)
    if m < 1:
        raise ValueError(f"size must be positive, got m={m}")
    alphas = tuple(float(a) for a in alphas)
    if len(alphas) != 3 or any(a <= 0 for a in alphas):
        raise ValueError(f"need three positive alphas, got {alphas}")
    rng = np.random.default_rng(seed)
    matrices = {}
    for i in (1, 2, 3):
        matrices[f"A{i}"] = rng.standard_normal((m, m))
        matrices[f"C{i}"] = rng.standard_normal((m, m))
        matrices[f"D{i}"] = rng.standard_normal((m, m))
    matrices["B"] = rng.standard_normal((m, m))
    params = {"m": m, "alphas": list(alphas), "seed": int(seed)}
    return _build_three_block(params, matrices)


def _build_three_block(params, matrices):
    m = params["m"]
    alphas = params["alphas"]
    regs = (functions.L1(1.0), functions.NuclearNorm(1.0), functions.L21(1.0))
    blocks = [
        Block(
            smooth=functions.Quadratic(matrices[f"C{i}"], matrices[f"D{i}"], alphas[i - 1]),
            prox=regs[i - 1],
            op=linops.LeftMultiply(matrices[f"A{i}"], m),
        )
        for i in (1, 2, 3)
    ]
    problem = BlockProblem(blocks, matrices["B"])
    return ProblemBundle("three_block", params, matrices, problem)


def build_subspace_problem(x_mat, alpha1, alpha2):
    """Two-block self-representation program for the data matrix ``x_mat``.

    Columns of ``x_mat`` are the points.  Block Z1 carries the smooth fit
    1/2 ||X Z1 - X||^2 and alpha1 ||Z1||_*; block Z2 carries alpha2 ||Z2||_1;
    the stacked constraint ties Z1 = Z2 and 1^T Z1 = 1^T.  Recover the
    representation with :func:`extract_representation`.
    """
    x_mat = np.asarray(x_mat, dtype=float)
    if x_mat.ndim != 2:
        raise ValueError("data matrix must be 2-D")
    if not (alpha1 > 0 and alpha2 > 0):
        raise ValueError(f"weights must be positive, got {alpha1}, {alpha2}")
    n_pts = x_mat.shape[1]
    shape = (n_pts, n_pts)
    block1 = Block(
        smooth=functions.Quadratic(x_mat, x_mat, 1.0),
        prox=functions.NuclearNorm(alpha1),
        op=linops.VStack([linops.Identity(shape), linops.RowSum(shape)]),
    )
    block2 = Block(
        smooth=functions.ZeroSmooth(),
        prox=functions.L1(alpha2),
        op=linops.VStack([linops.Negation(shape), linops.Zero(shape, (1, n_pts))]),
    )
    target = np.vstack([np.zeros(shape), np.ones((1, n_pts))])
    return BlockProblem([block1, block2], target)


def extract_representation(x):
    """Return the representation matrix Z (the first block) from a solution."""
    if isinstance(x, BlockPoint):
        return x[0].copy()
    return np.asarray(x[0], dtype=float).copy()


def gen_union_of_subspaces(n_subspaces, ambient_dim, subspace_dim, points_per,
                           noise=0.0, seed=0):
    """Sample unit-norm points from a union of random linear subspaces.

    Draw order: for each subspace, a Gaussian basis matrix (orthonormalized
    by QR) then Gaussian coefficients; finally one Gaussian noise matrix for
    the whole data set.  Columns are normalized to unit length after noise.

    Returns
    -------
    (X, labels) : (ambient_dim, N) array and (N,) int array
        N = n_subspaces * points_per.
    """
    n_subspaces, ambient_dim = int(n_subspaces), int(ambient_dim)
    subspace_dim, points_per = int(subspace_dim), int(points_per)
    if min(n_subspaces, ambient_dim, subspace_dim, points_per) < 1:
        raise ValueError("all size parameters must be positive")
    if subspace_dim > ambient_dim:
        raise ValueError(
            f"subspace dimension {subspace_dim} exceeds ambient {ambient_dim}"
        )
    if noise < 0:
        raise ValueError(f"noise level must be nonnegative, got {noise}")
    rng = np.random.default_rng(seed)
    parts = []
    for _ in range(n_subspaces):
        basis, _ = np.linalg.qr(rng.standard_normal((ambient_dim, subspace_dim)))
        coeffs = rng.standard_normal((subspace_dim, points_per))
        parts.append(basis @ coeffs)
    x_mat = np.hstack(parts)
    if noise > 0:
        x_mat = x_mat + noise * rng.standard_normal(x_mat.shape)
    norms = np.linalg.norm(x_mat, axis=0)
    norms[norms == 0] = 1.0
    x_mat = x_mat / norms
    labels = np.repeat(np.arange(n_subspaces), points_per)
    return x_mat, labels


def gen_subspace_bundle(n_subspaces, ambient_dim, subspace_dim, points_per,
                        noise, seed, alpha1, alpha2):
    """Synthetic clustering instance wrapped as a ProblemBundle."""
    x_mat, labels = gen_union_of_subspaces(
        n_subspaces, ambient_dim, subspace_dim, points_per, noise, seed
    )
    params = {
        "n_subspaces": int(n_subspaces),
        "ambient_dim": int(ambient_dim),
        "subspace_dim": int(subspace_dim),
        "points_per": int(points_per),
        "noise": float(noise),
        "seed": int(seed),
        "alpha1": float(alpha1),
        "alpha2": float(alpha2),
    }
    problem = build_subspace_problem(x_mat, alpha1, alpha2)
    return ProblemBundle("subspace", params, {"X": x_mat}, problem, labels=labels)


_BUILDERS = {
    "lasso_simplex": _build_lasso_simplex,
    "three_block": _build_three_block,
}


def _build_subspace(params, matrices):
    problem = build_subspace_problem(matrices["X"], params["alpha1"], params["alpha2"])
    return ProblemBundle("subspace", params, matrices, problem)


_BUILDERS["subspace"] = _build_subspace


def save_manifest(out_dir, bundle):
    """Write a bundle to ``out_dir``: manifest.json + one .mtx per matrix.

    Regenerating the same instance and saving it again reproduces every
    file byte for byte.  Returns the manifest path.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    entry = {
        "format": MANIFEST_FORMAT,
        "kind": bundle.kind,
        "params": bundle.params,
        "matrices": {},
    }
    for name, mat in sorted(bundle.matrices.items()):
        fname = f"{name}.mtx"
        linops.save_matrix(out_dir / fname, mat)
        entry["matrices"][name] = fname
    if bundle.labels is not None:
        lines = ["index,label"]
        lines += [f"{i},{int(lab)}" for i, lab in enumerate(bundle.labels)]
        (out_dir / "labels.csv").write_text("\n".join(lines) + "\n")
        entry["labels"] = "labels.csv"
    path = out_dir / MANIFEST_NAME
    path.write_text(json.dumps(entry, indent=2, sort_keys=True) + "\n")
    return path


def load_manifest(path):
    """Rebuild a ProblemBundle from a manifest file or its directory."""
    path = Path(path)
    if path.is_dir():
        path = path / MANIFEST_NAME
    entry = json.loads(path.read_text())
    if entry.get("format") != MANIFEST_FORMAT:
        raise ValueError(
            f"unsupported manifest format {entry.get('format')!r} in {path}"
        )
    kind = entry["kind"]
    if kind not in _BUILDERS:
        raise ValueError(f"unknown problem kind {kind!r} in {path}")
    base = path.parent
    matrices = {
        name: linops.load_matrix(base / fname)
        for name, fname in entry["matrices"].items()
    }
    bundle = _BUILDERS[kind](entry["params"], matrices)
    if "labels" in entry:
        rows = (base / entry["labels"]).read_text().strip().splitlines()[1:]
        bundle.labels = np.array([int(r.split(",")[1]) for r in rows])
    return bundle
