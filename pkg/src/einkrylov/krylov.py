"""Basis-generation processes: global Arnoldi and global Golub-Kahan.

Both processes orthonormalize families of tensors under the Frobenius
inner product and record their recurrence coefficients in small matrices.
Decompositions are immutable once returned; extending a Golub-Kahan
decomposition produces a new object and leaves the original intact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import BreakdownError, DimensionMismatchError, InvalidStartError
from .operators import LinearTensorOperator
from .tensor_core import TensorStack, fro_norm, inner

__all__ = [
    "ArnoldiDecomposition",
    "BidiagonalMatrices",
    "GgkbDecomposition",
    "bidiagonal_matrices",
    "extend_ggkb",
    "ggkb",
    "global_arnoldi",
]

# Relative threshold below which a recurrence coefficient counts as zero.
BREAKDOWN_TOL = 1e-14


@dataclass(frozen=True)
class ArnoldiDecomposition:
    """Orthonormal tensor basis with its upper Hessenberg coefficient matrix.

    After `steps` completed steps, `basis` holds ``steps + 1`` slices and
    `hessenberg` is ``(steps + 1) x steps`` — except on breakdown, where no
    new slice is produced and `basis` holds `steps` slices while the last
    Hessenberg row is (numerically) zero.
    """

    basis: TensorStack
    hessenberg: np.ndarray
    beta: float
    breakdown_step: Optional[int] = None

    @property
    def steps(self) -> int:
        return self.hessenberg.shape[1]


def global_arnoldi(
    op: LinearTensorOperator,
    v0: np.ndarray,
    m: int,
    reorthogonalize: bool = False,
    breakdown_tol: float = BREAKDOWN_TOL,
) -> ArnoldiDecomposition:
    """Run `m` steps of the global Arnoldi process started from `v0`.

    Modified Gram-Schmidt against all previous slices; an optional second
    pass improves orthogonality on ill-conditioned problems.  Stops early
    with a breakdown marker when the new slice's norm falls below
    ``breakdown_tol * ||v0||``.
    """
    if m < 1:
        raise ValueError(f"step count must be at least 1, got {m}")
    v0 = np.asarray(v0, dtype=np.float64)
    beta = fro_norm(v0)
    if beta == 0.0:
        raise InvalidStartError("global Arnoldi started from the zero tensor")
    slices = [v0 / beta]
    h = np.zeros((m + 1, m))
    for j in range(m):
        w = op.apply(slices[j])
        for i in range(j + 1):
            hij = inner(slices[i], w)
            h[i, j] += hij
            w = w - hij * slices[i]
        if reorthogonalize:
            for i in range(j + 1):
                corr = inner(slices[i], w)
                h[i, j] += corr
                w = w - corr * slices[i]
        hnext = fro_norm(w)
        h[j + 1, j] = hnext
        if hnext <= breakdown_tol * beta:
            return ArnoldiDecomposition(
                basis=TensorStack(slices),
                hessenberg=h[: j + 2, : j + 1].copy(),
                beta=beta,
                breakdown_step=j + 1,
            )
        slices.append(w / hnext)
    return ArnoldiDecomposition(TensorStack(slices), h, beta, None)


@dataclass(frozen=True)
class GgkbDecomposition:
    """Two orthonormal tensor bases linked by bidiagonal recurrences.

    After ``steps = len(rho)`` completed steps, `u_basis` holds
    ``steps + 1`` slices and `v_basis` holds `steps`; `sigma` stores
    sigma_1..sigma_{steps+1} with ``sigma[0] = ||C||_F``.  On breakdown the
    trailing slice whose norm vanished is omitted.
    """

    u_basis: TensorStack
    v_basis: TensorStack
    rho: np.ndarray
    sigma: np.ndarray
    breakdown_step: Optional[int] = None

    @property
    def steps(self) -> int:
        return len(self.rho)


def _ggkb_run(op, u_slices, v_slices, rho, sigma, total_steps, breakdown_tol):
    """Advance the Golub-Kahan recurrence to `total_steps` completed steps."""
    scale = sigma[0]
    while len(rho) < total_steps:
        j = len(rho)  # about to perform (1-based) step j+1
        vt = op.apply_transpose(u_slices[j])
        if j > 0:
            vt = vt - sigma[j] * v_slices[j - 1]
        rho_j = fro_norm(vt)
        if rho_j <= breakdown_tol * scale:
            if j == 0:
                raise InvalidStartError(
                    "start tensor is numerically orthogonal to the operator range"
                )
            return GgkbDecomposition(
                TensorStack(u_slices), TensorStack(v_slices),
                np.asarray(rho), np.asarray(sigma), breakdown_step=j + 1,
            )
        rho.append(rho_j)
        v_slices.append(vt / rho_j)
        ut = op.apply(v_slices[j]) - rho_j * u_slices[j]
        sigma_next = fro_norm(ut)
        if sigma_next <= breakdown_tol * scale:
            sigma.append(sigma_next)
            return GgkbDecomposition(
                TensorStack(u_slices), TensorStack(v_slices),
                np.asarray(rho), np.asarray(sigma), breakdown_step=j + 1,
            )
        sigma.append(sigma_next)
        u_slices.append(ut / sigma_next)
    return GgkbDecomposition(
        TensorStack(u_slices), TensorStack(v_slices),
        np.asarray(rho), np.asarray(sigma), breakdown_step=None,
    )


def ggkb(
    op: LinearTensorOperator,
    c: np.ndarray,
    ell: int,
    breakdown_tol: float = BREAKDOWN_TOL,
) -> GgkbDecomposition:
    """Run `ell` steps of global Golub-Kahan bidiagonalization started from `c`."""
    if ell < 1:
        raise ValueError(f"step count must be at least 1, got {ell}")
    c = np.asarray(c, dtype=np.float64)
    sigma1 = fro_norm(c)
    if sigma1 == 0.0:
        raise InvalidStartError("Golub-Kahan started from the zero tensor")
    return _ggkb_run(op, [c / sigma1], [], [], [sigma1], ell, breakdown_tol)


def extend_ggkb(
    dec: GgkbDecomposition,
    op: LinearTensorOperator,
    extra: int,
    breakdown_tol: float = BREAKDOWN_TOL,
) -> GgkbDecomposition:
    """Continue a decomposition by `extra` further steps.

    Returns a new decomposition identical to a fresh run with
    ``dec.steps + extra`` steps; the input is not modified.
    """
    if dec.breakdown_step is not None:
        raise BreakdownError(
            f"cannot extend a decomposition that broke down at step {dec.breakdown_step}"
        )
    if extra < 0:
        raise ValueError(f"extension count must be nonnegative, got {extra}")
    return _ggkb_run(
        op,
        list(dec.u_basis),
        list(dec.v_basis),
        list(dec.rho),
        list(dec.sigma),
        dec.steps + extra,
        breakdown_tol,
    )


@dataclass(frozen=True)
class BidiagonalMatrices:
    """The lower bidiagonal coefficient matrices of a Golub-Kahan run.

    `c` is ell x ell with diagonal rho_1..rho_ell and subdiagonal
    sigma_2..sigma_ell; `c_tilde` appends the row sigma_{ell+1} e_ell^T.
    """

    c: np.ndarray
    c_tilde: np.ndarray

    @classmethod
    def from_coefficients(cls, rho, sigma) -> "BidiagonalMatrices":
        rho = np.asarray(rho, dtype=np.float64)
        sigma = np.asarray(sigma, dtype=np.float64)
        ell = rho.shape[0]
        if sigma.shape[0] != ell + 1:
            raise DimensionMismatchError(
                f"need {ell + 1} sigma values for {ell} rho values, got {sigma.shape[0]}"
            )
        if not (np.all(np.isfinite(rho)) and np.all(np.isfinite(sigma))):
            raise ValueError("bidiagonal coefficients must be finite")
        c = np.diag(rho)
        for j in range(1, ell):
            c[j, j - 1] = sigma[j]
        c_tilde = np.zeros((ell + 1, ell))
        c_tilde[:ell] = c
        c_tilde[ell, ell - 1] = sigma[ell]
        return cls(c, c_tilde)

    @property
    def steps(self) -> int:
        return self.c.shape[0]


def bidiagonal_matrices(dec: GgkbDecomposition) -> BidiagonalMatrices:
    """Build the bidiagonal matrices from a decomposition."""
    if dec.steps < 1:
        raise BreakdownError("decomposition broke down before completing one step")
    return BidiagonalMatrices.from_coefficients(dec.rho, dec.sigma[: dec.steps + 1])
