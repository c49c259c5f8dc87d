"""Tests for the global Arnoldi and global Golub-Kahan processes."""

import numpy as np
import pytest

from einkrylov.exceptions import BreakdownError, InvalidStartError
from einkrylov.krylov import (
    BidiagonalMatrices,
    bidiagonal_matrices,
    extend_ggkb,
    ggkb,
    global_arnoldi,
)
from einkrylov.operators import ExplicitOperator
from einkrylov.tensor_core import (
    TensorStack,
    box_product,
    fro_norm,
    inner,
    nmode_mat_product,
)


def random_explicit(rng, shape_half=(3, 3)):
    return ExplicitOperator(rng.standard_normal(shape_half + shape_half))


class IdentityOperator(ExplicitOperator):
    def __init__(self, shape_half):
        eye = np.zeros(shape_half + shape_half)
        for idx in np.ndindex(shape_half):
            eye[idx + idx] = 1.0
        super().__init__(eye)


# ---------------------------------------------------------------------------
# global Arnoldi
# ---------------------------------------------------------------------------

def test_arnoldi_first_step_by_hand():
    rng = np.random.default_rng(50)
    op = random_explicit(rng)
    v0 = rng.standard_normal((3, 3, 2))
    dec = global_arnoldi(op, v0, 1)
    v1 = v0 / fro_norm(v0)
    assert np.isclose(dec.beta, fro_norm(v0), rtol=1e-15)
    assert np.allclose(dec.basis[0], v1, atol=1e-14)
    assert np.isclose(dec.hessenberg[0, 0], inner(v1, op.apply(v1)), rtol=1e-12)


def test_arnoldi_orthonormality_and_factorization():
    rng = np.random.default_rng(51)
    op = random_explicit(rng)
    v0 = rng.standard_normal((3, 3, 2))
    m = 4
    dec = global_arnoldi(op, v0, m)
    gram = box_product(dec.basis, dec.basis)
    assert np.abs(gram - np.eye(m + 1)).max() <= 1e-12
    # W_m (slices A*V_j) equals the basis stack contracted with H-tilde
    w = np.stack([op.apply(dec.basis[j]) for j in range(m)], axis=-1)
    v_arr = dec.basis.to_array()
    recon = nmode_mat_product(v_arr, dec.hessenberg.T, v_arr.ndim - 1)
    assert np.abs(w - recon).max() <= 1e-12


def test_arnoldi_identity_operator_breaks_down_immediately():
    rng = np.random.default_rng(52)
    op = IdentityOperator((3, 3))
    v0 = rng.standard_normal((3, 3))
    dec = global_arnoldi(op, v0, 4)
    assert dec.breakdown_step == 1
    assert dec.hessenberg.shape == (2, 1)
    assert np.isclose(dec.hessenberg[0, 0], 1.0, rtol=1e-14)
    assert abs(dec.hessenberg[1, 0]) <= 1e-14
    assert len(dec.basis) == 1


def test_arnoldi_zero_start_rejected():
    op = IdentityOperator((2, 2))
    with pytest.raises(InvalidStartError):
        global_arnoldi(op, np.zeros((2, 2)), 2)


def test_arnoldi_reorthogonalization_tightens_gram():
    rng = np.random.default_rng(53)
    # graded operator to stress Gram-Schmidt
    d = np.diag(10.0 ** np.linspace(0, -9, 9)).reshape(3, 3, 3, 3)
    op = ExplicitOperator(d)
    v0 = rng.standard_normal((3, 3))
    plain = global_arnoldi(op, v0, 6)
    tight = global_arnoldi(op, v0, 6, reorthogonalize=True)
    def defect(dec):
        g = box_product(dec.basis, dec.basis)
        return np.abs(g - np.eye(g.shape[0])).max()
    assert defect(tight) <= max(defect(plain), 1e-13)


def test_arnoldi_matches_classical_on_vectors():
    rng = np.random.default_rng(54)
    a = rng.standard_normal((6, 6))
    b = rng.standard_normal((6, 1))
    m = 4
    dec = global_arnoldi(ExplicitOperator(a), b, m)

    # classical Arnoldi with modified Gram-Schmidt
    q = [b[:, 0] / np.linalg.norm(b[:, 0])]
    h = np.zeros((m + 1, m))
    for j in range(m):
        w = a @ q[j]
        for i in range(j + 1):
            h[i, j] = q[i] @ w
            w = w - h[i, j] * q[i]
        h[j + 1, j] = np.linalg.norm(w)
        q.append(w / h[j + 1, j])

    assert np.allclose(dec.hessenberg, h, rtol=0, atol=1e-12)
    for j in range(m + 1):
        assert np.allclose(dec.basis[j][:, 0], q[j], rtol=0, atol=1e-12)


# ---------------------------------------------------------------------------
# global Golub-Kahan
# ---------------------------------------------------------------------------

def test_ggkb_first_step_formula():
    rng = np.random.default_rng(55)
    op = random_explicit(rng)
    c = rng.standard_normal((3, 3, 2))
    dec = ggkb(op, c, 1)
    sigma1 = fro_norm(c)
    u1 = c / sigma1
    assert np.isclose(dec.sigma[0], sigma1, rtol=1e-15)
    assert np.isclose(dec.rho[0], fro_norm(op.apply_transpose(u1)), rtol=1e-12)


def test_ggkb_factorization_identities():
    rng = np.random.default_rng(56)
    op = random_explicit(rng)
    c = rng.standard_normal((3, 3, 2))
    ell = 4
    dec = ggkb(op, c, ell)
    mats = bidiagonal_matrices(dec)
    u_arr = dec.u_basis.to_array()
    v_arr = dec.v_basis.to_array()

    w = np.stack([op.apply(dec.v_basis[j]) for j in range(ell)], axis=-1)
    recon = nmode_mat_product(u_arr, mats.c_tilde.T, u_arr.ndim - 1)
    assert np.abs(w - recon).max() <= 1e-12

    # A^T * U_j = rho_j V_j + sigma_j V_{j-1}: stacked form contracts with C
    wstar = np.stack([op.apply_transpose(dec.u_basis[j]) for j in range(ell)], axis=-1)
    recon2 = nmode_mat_product(v_arr, mats.c, v_arr.ndim - 1)
    assert np.abs(wstar - recon2).max() <= 1e-12


def test_ggkb_orthonormal_bases():
    rng = np.random.default_rng(57)
    op = random_explicit(rng)
    c = rng.standard_normal((3, 3, 2))
    dec = ggkb(op, c, 4)
    gu = box_product(dec.u_basis, dec.u_basis)
    gv = box_product(dec.v_basis, dec.v_basis)
    assert np.abs(gu - np.eye(len(dec.u_basis))).max() <= 1e-10
    assert np.abs(gv - np.eye(len(dec.v_basis))).max() <= 1e-10


def test_ggkb_zero_start_rejected():
    op = IdentityOperator((2, 2))
    with pytest.raises(InvalidStartError):
        ggkb(op, np.zeros((2, 2)), 2)


def test_extend_matches_fresh_run():
    rng = np.random.default_rng(58)
    op = random_explicit(rng)
    c = rng.standard_normal((3, 3, 2))
    base = ggkb(op, c, 3)
    extended = extend_ggkb(base, op, 2)
    fresh = ggkb(op, c, 5)
    assert np.allclose(extended.rho, fresh.rho, rtol=1e-12)
    assert np.allclose(extended.sigma, fresh.sigma, rtol=1e-12)
    for j in range(len(fresh.u_basis)):
        assert np.abs(extended.u_basis[j] - fresh.u_basis[j]).max() <= 1e-12
    for j in range(len(fresh.v_basis)):
        assert np.abs(extended.v_basis[j] - fresh.v_basis[j]).max() <= 1e-12
    # the original was not touched
    assert base.steps == 3


def test_extend_by_zero_is_identity():
    rng = np.random.default_rng(59)
    op = random_explicit(rng)
    c = rng.standard_normal((3, 3))
    base = ggkb(op, c, 3)
    same = extend_ggkb(base, op, 0)
    assert same.steps == base.steps
    assert np.array_equal(same.rho, base.rho)
    assert np.array_equal(same.sigma, base.sigma)


def test_extend_after_breakdown_rejected():
    # rank-one operator forces early termination
    u = np.array([[1.0], [0.0]])
    a = (u @ u.T).reshape(2, 1, 2, 1)
    op = ExplicitOperator(a)
    c = np.array([[1.0], [0.0]])
    dec = ggkb(op, c, 3)
    assert dec.breakdown_step is not None
    with pytest.raises(BreakdownError):
        extend_ggkb(dec, op, 1)


def test_ggkb_matches_classical_on_vectors():
    rng = np.random.default_rng(60)
    a = rng.standard_normal((7, 7))
    c = rng.standard_normal((7, 1))
    ell = 4
    dec = ggkb(ExplicitOperator(a), c, ell)

    # classical Golub-Kahan bidiagonalization
    sigma = [np.linalg.norm(c[:, 0])]
    u = [c[:, 0] / sigma[0]]
    v = []
    rho = []
    for j in range(ell):
        vt = a.T @ u[j] - (sigma[j] * v[j - 1] if j > 0 else 0.0)
        rho.append(np.linalg.norm(vt))
        v.append(vt / rho[j])
        ut = a @ v[j] - rho[j] * u[j]
        sigma.append(np.linalg.norm(ut))
        u.append(ut / sigma[j + 1])

    assert np.allclose(dec.rho, rho, rtol=1e-12)
    assert np.allclose(dec.sigma, sigma, rtol=1e-12)
    for j in range(ell + 1):
        assert np.allclose(dec.u_basis[j][:, 0], u[j], rtol=0, atol=1e-12)


def test_bidiagonal_matrices_layout():
    mats = BidiagonalMatrices.from_coefficients([2.0, 3.0, 4.0], [9.0, 0.5, 0.25, 0.125])
    want_c = np.array([[2.0, 0.0, 0.0], [0.5, 3.0, 0.0], [0.0, 0.25, 4.0]])
    assert np.array_equal(mats.c, want_c)
    assert np.array_equal(mats.c_tilde[:3], want_c)
    assert np.array_equal(mats.c_tilde[3], [0.0, 0.0, 0.125])
