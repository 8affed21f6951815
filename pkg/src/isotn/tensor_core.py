"""Dense complex tensor arithmetic.

The value type for vertices, states and operators is a plain
``numpy.ndarray`` of dtype complex128 in row-major (C) order, produced by
:func:`astensor`, which validates finiteness and freezes the buffer.
An :class:`IndexSplit` records which axes of a tensor are treated as the
domain (in) and which as the codomain (out) when the tensor is viewed as a
linear map.

Conventions used throughout the package:

* grouping a tensor ``u`` by a split yields the matrix ``M[out, in]``;
* an isometry satisfies ``M† M = I`` on the in (domain) space;
* retraction back to the isometry manifold uses the polar factor of the
  grouped matrix, i.e. the metric-nearest isometry.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import IsometryImpossibleError, ShapeError, SingularMatrixError

DEFAULT_ISOMETRY_TOL = 1e-8


def astensor(values) -> np.ndarray:
    """Validate ``values`` as a dense complex tensor and return it frozen.

    Accepts anything ``np.asarray`` accepts. The result is a C-contiguous
    complex128 array with the write flag cleared, so tensors can be shared
    freely. Raises ShapeError if any entry is NaN or infinite.
    """
    arr = np.ascontiguousarray(values, dtype=np.complex128)
    if not np.all(np.isfinite(arr)):
        raise ShapeError("tensor entries must be finite (found NaN or Inf)")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class IndexSplit:
    """Partition of a tensor's axes into domain (in) and codomain (out)."""

    in_axes: tuple[int, ...]
    out_axes: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "in_axes", tuple(self.in_axes))
        object.__setattr__(self, "out_axes", tuple(self.out_axes))

    def validate(self, ndim: int) -> None:
        """Check the split is an exact cover of ``range(ndim)``."""
        combined = sorted(self.in_axes + self.out_axes)
        if combined != list(range(ndim)):
            raise ShapeError(
                f"index split in={self.in_axes} out={self.out_axes} does not "
                f"partition the {ndim} axes"
            )


def matrix_dims(shape: Sequence[int], split: IndexSplit) -> tuple[int, int]:
    """(out_dim, in_dim) of the grouped matrix for a tensor of ``shape``."""
    out_dim = int(np.prod([shape[a] for a in split.out_axes], dtype=np.int64))
    in_dim = int(np.prod([shape[a] for a in split.in_axes], dtype=np.int64))
    return out_dim, in_dim


def as_matrix(tensor: np.ndarray, split: IndexSplit) -> np.ndarray:
    """Group ``tensor`` into the matrix M[out, in] defined by ``split``."""
    split.validate(tensor.ndim)
    out_dim, in_dim = matrix_dims(tensor.shape, split)
    return tensor.transpose(split.out_axes + split.in_axes).reshape(out_dim, in_dim)


def from_matrix(matrix: np.ndarray, shape: Sequence[int], split: IndexSplit) -> np.ndarray:
    """Inverse of :func:`as_matrix`: rebuild the tensor of ``shape``."""
    axes = split.out_axes + split.in_axes
    grouped_shape = [shape[a] for a in axes]
    inverse = np.argsort(axes)
    return astensor(matrix.reshape(grouped_shape).transpose(inverse))


def contract(a: np.ndarray, b: np.ndarray, pairs: Sequence[tuple[int, int]]) -> np.ndarray:
    """Contract ``a`` with ``b`` over the given (axis-of-a, axis-of-b) pairs.

    Result axes are the uncontracted axes of ``a`` in order, followed by
    those of ``b``. With no pairs this is the outer product. Contraction is
    a single fused summation over all paired indices.
    """
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    axes_a = [p[0] for p in pairs]
    axes_b = [p[1] for p in pairs]
    if len(set(axes_a)) != len(axes_a) or len(set(axes_b)) != len(axes_b):
        raise ValueError(f"repeated axis in contraction pairs {list(pairs)}")
    for ax_a, ax_b in pairs:
        if not (0 <= ax_a < a.ndim and 0 <= ax_b < b.ndim):
            raise ValueError(f"contraction pair ({ax_a},{ax_b}) out of range")
        if a.shape[ax_a] != b.shape[ax_b]:
            raise ShapeError(
                f"dimension mismatch on pair ({ax_a},{ax_b}): "
                f"{a.shape[ax_a]} vs {b.shape[ax_b]}"
            )
    return np.tensordot(a, b, axes=(axes_a, axes_b))


def reshape_group(a: np.ndarray, groups: Sequence[Sequence[int]]) -> np.ndarray:
    """Merge axes group-wise: output axis k has the product dimension of group k.

    ``groups`` must be an ordered partition of the axes. When the
    concatenated groups preserve the original axis order the flat row-major
    data is unchanged.
    """
    a = np.asarray(a, dtype=np.complex128)
    flat = [ax for g in groups for ax in g]
    if sorted(flat) != list(range(a.ndim)):
        raise ValueError(f"groups {list(groups)} are not a partition of {a.ndim} axes")
    permuted = a.transpose(flat)
    new_shape = [int(np.prod([a.shape[ax] for ax in g], dtype=np.int64)) for g in groups]
    return permuted.reshape(new_shape)


def is_isometry(tensor: np.ndarray, split: IndexSplit, tol: float = DEFAULT_ISOMETRY_TOL) -> bool:
    """True iff the grouped matrix M satisfies ``‖M†M − I‖_max ≤ tol``.

    Raises IsometryImpossibleError when the in-dimension exceeds the
    out-dimension, since then no isometry of that shape exists at all.
    """
    m = as_matrix(np.asarray(tensor, dtype=np.complex128), split)
    out_dim, in_dim = m.shape
    if in_dim > out_dim:
        raise IsometryImpossibleError(
            f"in-dimension {in_dim} exceeds out-dimension {out_dim}"
        )
    gram = m.conj().T @ m
    return float(np.max(np.abs(gram - np.eye(in_dim)))) <= tol


def isometry_violation(tensor: np.ndarray, split: IndexSplit) -> float:
    """``‖M†M − I‖_max`` of the grouped matrix (0 for an exact isometry)."""
    m = as_matrix(np.asarray(tensor, dtype=np.complex128), split)
    gram = m.conj().T @ m
    return float(np.max(np.abs(gram - np.eye(m.shape[1]))))


def random_isometry(in_dim: int, out_dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random isometry as an (out_dim, in_dim) matrix with M†M = I.

    Drawn by QR of a complex Ginibre matrix with the R-diagonal phase fix,
    which makes the distribution invariant under left unitary multiplication.
    """
    if in_dim < 1 or out_dim < 1:
        raise ValueError("dimensions must be positive")
    if in_dim > out_dim:
        raise ValueError(f"in_dim {in_dim} exceeds out_dim {out_dim}: no isometry exists")
    z = rng.standard_normal((out_dim, in_dim)) + 1j * rng.standard_normal((out_dim, in_dim))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    q = q * (d / np.abs(d))
    return astensor(q)


def project_to_isometry(tensor: np.ndarray, split: IndexSplit) -> np.ndarray:
    """Nearest isometry in Frobenius norm: the polar factor M(M†M)^{-1/2}.

    Computed from the SVD; requires the grouped matrix to have full column
    rank, otherwise SingularMatrixError reports the offending singular value.
    """
    tensor = np.asarray(tensor, dtype=np.complex128)
    m = as_matrix(tensor, split)
    w, s, vh = np.linalg.svd(m, full_matrices=False)
    if s[-1] <= 1e-12 * max(s[0], 1.0):
        raise SingularMatrixError("matrix is rank-deficient; polar factor undefined", s[-1])
    return from_matrix(w @ vh, tensor.shape, split)
