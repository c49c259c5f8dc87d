"""Blurring operators: abstract contract, dense explicit form, matrix-free PSF form.

The point-spread-function operator realizes the stencil

    C[i, j, k] = sum_{a,b} p[a, b] * X[i + k0 - a, j + l0 - b, k]

for every trailing slice k, with (k0, l0) the kernel center and entries of
X outside the image treated as zero.  Its adjoint is the same stencil with
the kernel flipped about its center.  Trailing modes (color channels,
video frames) are never mixed.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from . import backend
from .exceptions import DimensionMismatchError
from .tensor_core import einstein_product, fro_norm, inner, transpose_split

__all__ = [
    "ExplicitOperator",
    "LinearTensorOperator",
    "PsfBlurOperator",
    "PsfKernel",
    "adjoint_residual",
    "build_gaussian_psf",
    "load_psf_text",
    "psf_apply",
    "psf_to_explicit",
    "save_psf_text",
]

# Above this side length the dense fourth-order tensor is not materialized;
# solvers only ever need operator actions.
EXPLICIT_SIDE_LIMIT = 32


class LinearTensorOperator(ABC):
    """A linear map acting on the leading modes of a tensor.

    `apply` maps tensors whose leading modes equal `domain_shape` to
    tensors with leading modes `codomain_shape`, acting identically on any
    trailing modes.  `apply_transpose` must be the exact adjoint under the
    Frobenius inner product.
    """

    domain_shape: tuple
    codomain_shape: tuple
    n_contract: int

    @abstractmethod
    def apply(self, x: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def apply_transpose(self, y: np.ndarray) -> np.ndarray:
        ...

    def _check_leading(self, x: np.ndarray, shape: tuple, what: str) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        n = len(shape)
        if x.ndim < n or x.shape[:n] != shape:
            raise DimensionMismatchError(
                f"{what} expects leading modes {shape}, got tensor of shape {x.shape}"
            )
        return x


class ExplicitOperator(LinearTensorOperator):
    """Operator given by a dense even-order tensor, applied by contraction."""

    def __init__(self, tensor: np.ndarray):
        tensor = np.asarray(tensor, dtype=np.float64)
        if tensor.ndim % 2 != 0 or tensor.ndim == 0:
            raise DimensionMismatchError(
                f"explicit operator tensor must have even order, got {tensor.ndim}"
            )
        self.tensor = tensor
        self.n_contract = tensor.ndim // 2
        self.codomain_shape = tensor.shape[: self.n_contract]
        self.domain_shape = tensor.shape[self.n_contract:]
        self._transposed = transpose_split(tensor, self.n_contract)

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = self._check_leading(x, self.domain_shape, "apply")
        return einstein_product(self.tensor, x, self.n_contract)

    def apply_transpose(self, y: np.ndarray) -> np.ndarray:
        y = self._check_leading(y, self.codomain_shape, "apply_transpose")
        return einstein_product(self._transposed, y, self.n_contract)


@dataclass(frozen=True)
class PsfKernel:
    """2-D point-spread-function array with its center in 1-based indices."""

    values: np.ndarray
    center: tuple

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", values)
        if values.ndim != 2:
            raise ValueError(f"PSF array must be 2-D, got order {values.ndim}")
        if not np.all(np.isfinite(values)):
            raise ValueError("PSF array contains non-finite entries")
        k, l = self.center
        kh, kw = values.shape
        if not (1 <= k <= kh and 1 <= l <= kw):
            raise ValueError(f"center {self.center} outside a {kh}x{kw} array")
        object.__setattr__(self, "center", (int(k), int(l)))

    @property
    def shape(self) -> tuple:
        return self.values.shape

    def normalized(self) -> "PsfKernel":
        """Kernel rescaled to unit sum."""
        total = float(self.values.sum())
        if total == 0.0:
            raise ValueError("cannot normalize a kernel with zero sum")
        return PsfKernel(self.values / total, self.center)


def build_gaussian_psf(size: int, sigma: float, center: tuple | None = None) -> PsfKernel:
    """Gaussian PSF ``p_ij = exp(-((i-k)/sigma)^2/2 - ((j-l)/sigma)^2/2)``.

    `size` must be odd and `sigma` positive.  The center (k, l) defaults to
    the geometric center ((size+1)/2, (size+1)/2); indices are 1-based as
    in the formula.  The kernel is intentionally not normalized to unit
    sum; use :meth:`PsfKernel.normalized` for that.
    """
    if size < 1 or size % 2 == 0:
        raise ValueError(f"kernel size must be a positive odd integer, got {size}")
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if center is None:
        center = ((size + 1) // 2, (size + 1) // 2)
    k, l = center
    idx = np.arange(1, size + 1, dtype=np.float64)
    row = np.exp(-0.5 * ((idx - k) / sigma) ** 2)
    col = np.exp(-0.5 * ((idx - l) / sigma) ** 2)
    return PsfKernel(np.outer(row, col), (k, l))


class PsfBlurOperator(LinearTensorOperator):
    """Matrix-free spatially invariant blur under zero boundary conditions."""

    def __init__(self, kernel: PsfKernel, image_side: int):
        if image_side < 1:
            raise ValueError(f"image side must be positive, got {image_side}")
        self.kernel = kernel
        self.image_side = int(image_side)
        self.n_contract = 2
        self.domain_shape = (self.image_side, self.image_side)
        self.codomain_shape = (self.image_side, self.image_side)
        kh, kw = kernel.shape
        ck, cl = kernel.center[0] - 1, kernel.center[1] - 1
        # forward stencil: kernel flipped about its center
        self._w_fwd = np.ascontiguousarray(kernel.values[::-1, ::-1])
        self._a_fwd = (kh - 1 - ck, kw - 1 - cl)
        self._w_adj = kernel.values
        self._a_adj = (ck, cl)

    def _run(self, x: np.ndarray, w: np.ndarray, anchor: tuple) -> np.ndarray:
        x = self._check_leading(x, self.domain_shape, "apply")
        trailing = x.shape[2:]
        flat = np.ascontiguousarray(x.reshape(x.shape[0], x.shape[1], -1))
        out = backend.correlate2d_zero(flat, w, anchor[0], anchor[1])
        return out.reshape(x.shape[0], x.shape[1], *trailing)

    def apply(self, x: np.ndarray) -> np.ndarray:
        return self._run(x, self._w_fwd, self._a_fwd)

    def apply_transpose(self, y: np.ndarray) -> np.ndarray:
        return self._run(y, self._w_adj, self._a_adj)


def psf_apply(op: PsfBlurOperator, x: np.ndarray) -> np.ndarray:
    """Blur the leading square slices of `x` with the operator's PSF."""
    return op.apply(x)


def psf_to_explicit(kernel: PsfKernel, n_side: int, allow_large: bool = False) -> ExplicitOperator:
    """Materialize the blur as a dense fourth-order n x n x n x n tensor.

    Entry (i, j, i', j') carries the stencil weight linking input pixel
    (i', j') to output pixel (i, j); out-of-range stencil positions are
    dropped, which realizes the zero boundary conditions.  Refuses sides
    above ``EXPLICIT_SIDE_LIMIT`` unless `allow_large` is set, since the
    solvers are matrix-free and never need the dense form.
    """
    kh, kw = kernel.shape
    if n_side < max(kh, kw):
        raise ValueError(
            f"image side {n_side} smaller than kernel extent {max(kh, kw)}"
        )
    if n_side > EXPLICIT_SIDE_LIMIT and not allow_large:
        raise ValueError(
            f"side {n_side} exceeds the dense-materialization guard "
            f"({EXPLICIT_SIDE_LIMIT}); pass allow_large=True to override"
        )
    ck, cl = kernel.center[0] - 1, kernel.center[1] - 1
    p = kernel.values
    n = int(n_side)
    a = np.zeros((n, n, n, n))
    for u in range(kh):
        di = ck - u  # input row = output row + di
        i = np.arange(max(0, -di), min(n, n - di))
        if i.size == 0:
            continue
        for v in range(kw):
            dj = cl - v
            j = np.arange(max(0, -dj), min(n, n - dj))
            if j.size == 0:
                continue
            a[i[:, None], j[None, :], (i + di)[:, None], (j + dj)[None, :]] = p[u, v]
    return ExplicitOperator(a)


def adjoint_residual(op: LinearTensorOperator, trials: int, seed: int = 0) -> float:
    """Largest normalized adjoint defect ``|<Ax,y> - <x,A^T y>| / (|x||y|)``.

    Probes random tensors; alternate trials append a trailing extent-2 mode
    to exercise the pass-through behavior.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rng = np.random.default_rng(seed)
    worst = 0.0
    for t in range(trials):
        trailing = (2,) if t % 2 else ()
        x = rng.standard_normal(op.domain_shape + trailing)
        y = rng.standard_normal(op.codomain_shape + trailing)
        lhs = inner(op.apply(x), y)
        rhs = inner(x, op.apply_transpose(y))
        worst = max(worst, abs(lhs - rhs) / (fro_norm(x) * fro_norm(y)))
    return worst


def save_psf_text(kernel: PsfKernel, path) -> None:
    """Write the kernel as rows of space-separated decimals."""
    np.savetxt(path, kernel.values, fmt="%.17g")


def load_psf_text(path, center: tuple | None = None) -> PsfKernel:
    """Read a plain-text 2-D kernel; center defaults to the geometric center."""
    values = np.atleast_2d(np.loadtxt(path, dtype=np.float64))
    if center is None:
        center = ((values.shape[0] + 1) // 2, (values.shape[1] + 1) // 2)
    return PsfKernel(values, center)
