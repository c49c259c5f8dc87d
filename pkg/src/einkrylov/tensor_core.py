"""Dense multiway arrays and the Einstein-product algebra built on them.

Tensors are plain ``numpy.ndarray`` objects with 64-bit float entries.  The
linearization convention used everywhere in this package (including every
flatten/reshape below) is C order: the last index varies fastest.  Under
that convention the Einstein product of two tensors is an ordinary matrix
product of their matricizations, which is how :func:`einstein_product`
computes it.

Stacked bases (families of same-shape tensors indexed by a trailing mode)
are represented either by :class:`TensorStack` or by an ``ndarray`` whose
last axis is the stacking mode; the contraction helpers accept both.
"""

from __future__ import annotations

from typing import Iterable, Sequence, Union

import numpy as np

from .exceptions import DimensionMismatchError

__all__ = [
    "TensorStack",
    "box_product",
    "einstein_product",
    "fro_norm",
    "inner",
    "nmode_mat_product",
    "nmode_vec_product",
    "transpose_split",
]


def _as_tensor(x) -> np.ndarray:
    return np.asarray(x, dtype=np.float64)


def einstein_product(a: np.ndarray, b: np.ndarray, n_contract: int) -> np.ndarray:
    """Contract the last `n_contract` modes of `a` with the first `n_contract` of `b`.

    Parameters
    ----------
    a, b : ndarray
        Input tensors.
    n_contract : int
        Number of contracted modes.

    Returns
    -------
    ndarray
        Tensor whose shape is the leading modes of `a` followed by the
        trailing modes of `b`.  Equivalent to the matrix product of the
        row-major matricizations.
    """
    a = _as_tensor(a)
    b = _as_tensor(b)
    if n_contract < 1:
        raise DimensionMismatchError("n_contract must be at least 1")
    if n_contract > a.ndim or n_contract > b.ndim:
        raise DimensionMismatchError(
            f"cannot contract {n_contract} modes of tensors with orders "
            f"{a.ndim} and {b.ndim}"
        )
    for k in range(n_contract):
        ea = a.shape[a.ndim - n_contract + k]
        eb = b.shape[k]
        if ea != eb:
            raise DimensionMismatchError(
                f"contracted mode pair {k}: extent {ea} (mode {a.ndim - n_contract + k} "
                f"of left operand) != extent {eb} (mode {k} of right operand)"
            )
    return np.tensordot(a, b, axes=n_contract)


def transpose_split(a: np.ndarray, split: int) -> np.ndarray:
    """Swap the leading `split` modes with the remaining trailing modes.

    For an order-2 tensor with ``split=1`` this is the ordinary matrix
    transpose.  Applying the operation twice with complementary split
    counts restores the original tensor.
    """
    a = _as_tensor(a)
    if not 1 <= split < a.ndim:
        raise DimensionMismatchError(
            f"split must lie in [1, {a.ndim - 1}] for an order-{a.ndim} tensor, got {split}"
        )
    perm = tuple(range(split, a.ndim)) + tuple(range(split))
    return np.ascontiguousarray(np.transpose(a, perm))


def inner(x: np.ndarray, y: np.ndarray) -> float:
    """Frobenius inner product (sum of elementwise products) of same-shape tensors."""
    x = _as_tensor(x)
    y = _as_tensor(y)
    if x.shape != y.shape:
        raise DimensionMismatchError(f"shape mismatch in inner product: {x.shape} vs {y.shape}")
    return float(np.dot(x.ravel(), y.ravel()))


def fro_norm(x: np.ndarray) -> float:
    """Frobenius norm, the Euclidean norm of the flattened tensor."""
    x = _as_tensor(x)
    return float(np.linalg.norm(x.ravel()))


def nmode_mat_product(x: np.ndarray, u: np.ndarray, axis: int) -> np.ndarray:
    """Multiply mode `axis` of `x` (0-based) by the matrix `u`.

    The extent of mode `axis` must equal the column count of `u`; it is
    replaced by the row count of `u` in the result.
    """
    x = _as_tensor(x)
    u = _as_tensor(u)
    if u.ndim != 2:
        raise DimensionMismatchError(f"u must be a matrix, got order {u.ndim}")
    if not 0 <= axis < x.ndim:
        raise DimensionMismatchError(f"axis {axis} out of range for order-{x.ndim} tensor")
    if u.shape[1] != x.shape[axis]:
        raise DimensionMismatchError(
            f"mode {axis} extent {x.shape[axis]} != matrix column count {u.shape[1]}"
        )
    out = np.tensordot(u, x, axes=([1], [axis]))
    return np.ascontiguousarray(np.moveaxis(out, 0, axis))


def nmode_vec_product(x: np.ndarray, v: np.ndarray, axis: int) -> np.ndarray:
    """Contract mode `axis` of `x` with the vector `v`; drops that mode."""
    x = _as_tensor(x)
    v = _as_tensor(v)
    if v.ndim != 1:
        raise DimensionMismatchError(f"v must be a vector, got order {v.ndim}")
    if not 0 <= axis < x.ndim:
        raise DimensionMismatchError(f"axis {axis} out of range for order-{x.ndim} tensor")
    if v.shape[0] != x.shape[axis]:
        raise DimensionMismatchError(
            f"mode {axis} extent {x.shape[axis]} != vector length {v.shape[0]}"
        )
    return np.tensordot(x, v, axes=([axis], [0]))


class TensorStack:
    """Ordered collection of same-shape tensors.

    A stack of ``m`` slices of shape ``s`` models the order ``len(s)+1``
    tensor of shape ``s + (m,)`` whose frontal slices (last index fixed)
    are the stored tensors.  Instances are immutable after construction;
    the stored slices are shared, not copied.
    """

    __slots__ = ("_slices", "_slice_shape")

    def __init__(self, slices: Iterable[np.ndarray]):
        slices = tuple(_as_tensor(s) for s in slices)
        if not slices:
            raise DimensionMismatchError("a TensorStack needs at least one slice")
        shape = slices[0].shape
        for j, s in enumerate(slices):
            if s.shape != shape:
                raise DimensionMismatchError(
                    f"slice {j} has shape {s.shape}, expected {shape}"
                )
        self._slices = slices
        self._slice_shape = shape

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "TensorStack":
        """Split an array along its last axis into frontal slices."""
        arr = _as_tensor(arr)
        return cls(tuple(arr[..., j] for j in range(arr.shape[-1])))

    @property
    def slice_shape(self) -> tuple:
        return self._slice_shape

    def __len__(self) -> int:
        return len(self._slices)

    def __getitem__(self, j: int) -> np.ndarray:
        return self._slices[j]

    def __iter__(self):
        return iter(self._slices)

    def to_array(self) -> np.ndarray:
        """Stack the slices along a new trailing axis."""
        return np.stack(self._slices, axis=-1)

    def combine(self, y: Sequence[float]) -> np.ndarray:
        """Linear combination of the slices with coefficients `y`."""
        y = np.asarray(y, dtype=np.float64)
        if y.ndim != 1 or y.shape[0] != len(self._slices):
            raise DimensionMismatchError(
                f"coefficient vector of length {y.shape if y.ndim != 1 else y.shape[0]} "
                f"does not match stack of {len(self._slices)} slices"
            )
        out = np.zeros(self._slice_shape, dtype=np.float64)
        for c, s in zip(y, self._slices):
            out += c * s
        return out


StackLike = Union[TensorStack, np.ndarray]


def _as_slices(x: StackLike, slice_shape=None) -> Sequence[np.ndarray]:
    """Normalize a stack-or-tensor argument to a sequence of slices.

    An ndarray whose shape equals `slice_shape` is a one-slice stack;
    otherwise its last axis is taken as the stacking mode.
    """
    if isinstance(x, TensorStack):
        return tuple(x)
    x = _as_tensor(x)
    if slice_shape is not None and x.shape == tuple(slice_shape):
        return (x,)
    return tuple(x[..., j] for j in range(x.shape[-1]))


def box_product(x: StackLike, y: StackLike) -> np.ndarray:
    """Gram-type matrix of two stacks: entry (i, j) is ``inner(x_i, y_j)``.

    Both arguments may be :class:`TensorStack` objects or ndarrays whose
    last axis is the stacking mode; a bare tensor matching the other
    argument's slice shape counts as a one-slice stack.
    """
    if isinstance(x, TensorStack):
        xs = _as_slices(x)
        ys = _as_slices(y, x.slice_shape)
    elif isinstance(y, TensorStack):
        ys = _as_slices(y)
        xs = _as_slices(x, y.slice_shape)
    else:
        xs = _as_slices(x)
        ys = _as_slices(y, xs[0].shape)
    if xs[0].shape != ys[0].shape:
        raise DimensionMismatchError(
            f"slice shape mismatch: {xs[0].shape} vs {ys[0].shape}"
        )
    xm = np.stack([s.ravel() for s in xs])
    ym = np.stack([s.ravel() for s in ys])
    return xm @ ym.T
