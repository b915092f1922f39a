"""Block-structured primal points.

A :class:`BlockPoint` is an ordered tuple of dense matrices, one per block of
a separable problem.  It supports just enough vector-space arithmetic for the
solvers to read like the math they implement: ``(1 - theta) * x + theta * z``.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError


class BlockPoint:
    """Immutable-length tuple of float64 blocks forming one primal point."""

    __slots__ = ("blocks",)

    def __init__(self, blocks):
        self.blocks = tuple(np.asarray(b, dtype=float) for b in blocks)
        for b in self.blocks:
            if b.ndim != 2:
                raise DimensionError(
                    f"blocks must be 2-D matrices, got ndim={b.ndim}"
                )

    @classmethod
    def zeros(cls, shapes):
        return cls([np.zeros(s) for s in shapes])

    @property
    def shapes(self):
        return tuple(b.shape for b in self.blocks)

    def __len__(self):
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def __getitem__(self, i):
        return self.blocks[i]

    def copy(self):
        return BlockPoint([b.copy() for b in self.blocks])

    def norm(self):
        """Euclidean norm of the concatenation of all blocks."""
        return float(np.sqrt(sum(np.sum(b * b) for b in self.blocks)))

    def dot(self, other):
        self._check_conforms(other)
        return float(sum(np.sum(a * b) for a, b in zip(self.blocks, other.blocks)))

    def dist(self, other):
        return (self - other).norm()

    def max_block_norm(self):
        return float(max(np.linalg.norm(b) for b in self.blocks))

    def is_finite(self):
        return all(np.isfinite(b).all() for b in self.blocks)

    def _check_conforms(self, other):
        if not isinstance(other, BlockPoint) or other.shapes != self.shapes:
            raise DimensionError(
                f"block points do not conform: {self.shapes} vs "
                f"{getattr(other, 'shapes', type(other))}"
            )

    def __add__(self, other):
        self._check_conforms(other)
        return BlockPoint([a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        self._check_conforms(other)
        return BlockPoint([a - b for a, b in zip(self.blocks, other.blocks)])

    def __mul__(self, s):
        return BlockPoint([float(s) * b for b in self.blocks])

    __rmul__ = __mul__

    def __repr__(self):
        return f"BlockPoint(shapes={self.shapes})"
