import numpy as np
import pytest

from freeconv.algebra import (
    CPMap,
    LinearMapOnB,
    as_element,
    choi_minus_identity_min,
    dag,
    direct_sum,
    halfplane_margin,
    identity_kron,
    imag_part,
    in_halfplane,
    is_hermitian,
    kron_with_identity,
    linearize_on_basis,
    opnorm,
    real_part,
    require_halfplane,
    require_hermitian,
    unvec,
    vec,
)

from helpers import random_hermitian, random_psd


def test_as_element_rejects_nonsquare_and_nonfinite():
    with pytest.raises(ValueError):
        as_element(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        as_element(np.array([[np.nan, 0], [0, 1]]))


def test_hermitian_check_and_symmetrization():
    rng = np.random.default_rng(0)
    h = random_hermitian(rng, 3)
    assert is_hermitian(h + 1e-12 * 1j * np.eye(3))
    sym = require_hermitian(h + 1e-12 * 1j * np.eye(3))
    assert opnorm(sym - dag(sym)) == 0.0
    skew = np.zeros((3, 3), dtype=complex)
    skew[0, 1] = 1e-3
    with pytest.raises(ValueError, match="not selfadjoint"):
        require_hermitian(h + skew)


def test_halfplane_margins():
    rng = np.random.default_rng(1)
    im = random_psd(rng, 2, scale=0.5) + 0.3 * np.eye(2)
    w = random_hermitian(rng, 2) + 1j * im
    assert halfplane_margin(w, "upper") == pytest.approx(
        np.linalg.eigvalsh(imag_part(w))[0])
    assert in_halfplane(w, "upper")
    assert not in_halfplane(w, "lower")
    assert in_halfplane(dag(w), "lower")
    assert in_halfplane(im + 0.1 * 1j * random_hermitian(rng, 2), "right")
    with pytest.raises(ValueError, match="half-plane"):
        require_halfplane(w, "lower")
    with pytest.raises(ValueError):
        halfplane_margin(w, "sideways")


def test_kron_with_identity_matches_kron_and_batches():
    rng = np.random.default_rng(2)
    b = rng.standard_normal((3, 2, 2)) + 1j * rng.standard_normal((3, 2, 2))
    lifted = kron_with_identity(b, 3)
    for k in range(3):
        assert np.allclose(lifted[k], np.kron(b[k], np.eye(3)))
    assert np.allclose(identity_kron(2, b[0]), np.kron(np.eye(2), b[0]))


def test_direct_sum_blocks():
    a = np.ones((2, 2))
    b = 2.0 * np.ones((1, 1))
    s = direct_sum(a, b)
    assert s.shape == (3, 3)
    assert np.allclose(s[:2, :2], a) and s[2, 2] == 2.0 and np.all(s[:2, 2] == 0)


def test_cp_map_positivity_and_unitality():
    rng = np.random.default_rng(3)
    kraus = [rng.standard_normal((2, 4)) + 1j * rng.standard_normal((2, 4))
             for _ in range(3)]
    m = CPMap.from_kraus(kraus, to_base=True)
    p = random_psd(rng, 4)
    out = m.apply(p)
    assert np.linalg.eigvalsh(real_part(out))[0] >= -1e-12
    ident = CPMap.scaled_identity(1.0, 3)
    x = random_hermitian(rng, 3)
    assert np.allclose(ident.apply(x), x)
    with pytest.raises(ValueError):
        CPMap.scaled_identity(-0.5, 2)


def test_cp_map_amplified_apply_is_blockwise():
    rng = np.random.default_rng(4)
    kraus = [rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))]
    m = CPMap.from_kraus(kraus)
    x = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    y = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    block = direct_sum(x, y)
    out = m.apply(block, level=2)
    assert np.allclose(out, direct_sum(m.apply(x), m.apply(y)))


def test_cp_compose_matches_sequential_application():
    rng = np.random.default_rng(5)
    inner = CPMap.from_kraus([rng.standard_normal((2, 6)) * 0.3
                              for _ in range(2)], to_base=True)
    outer = CPMap.from_kraus([rng.standard_normal((2, 2)) + 0.5j * np.eye(2)])
    comp = outer.compose(inner)
    x = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    assert np.allclose(comp.apply(x), outer.apply(inner.apply(x)))


def test_choi_certifies_alpha_minus_identity():
    assert choi_minus_identity_min(CPMap.scaled_identity(2.0, 2)) >= -1e-10
    assert choi_minus_identity_min(CPMap.scaled_identity(1.0, 3)) >= -1e-10
    # alpha = 0.5 Id has alpha - Id completely negative
    assert choi_minus_identity_min(CPMap.scaled_identity(0.5, 2)) < -0.4


def test_vec_unvec_column_stacking():
    c = np.array([[1.0, 2.0], [3.0, 4.0]])
    v = vec(c)
    assert np.allclose(v, [1.0, 3.0, 2.0, 4.0])
    assert np.allclose(unvec(v, 2), c)


def test_linearize_reproduces_two_sided_multiplication():
    rng = np.random.default_rng(6)
    A = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    B = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    lin = linearize_on_basis(lambda c: A @ c @ B, 3)
    # on vec with column stacking, c -> A c B has matrix B^T kron A
    assert np.allclose(lin.matrix, np.kron(B.T, A))
    c = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    assert np.allclose(lin(c), A @ c @ B)
    assert lin.spectral_radius() == pytest.approx(
        np.max(np.abs(np.linalg.eigvals(lin.matrix))))


def test_linearize_batch_path_and_nonlinear_rejection():
    rng = np.random.default_rng(7)
    A = rng.standard_normal((2, 2))
    lin = linearize_on_basis(lambda c: A @ c, 2,
                             batch=lambda cs: A[None] @ cs)
    assert np.allclose(lin.matrix, np.kron(np.eye(2), A))
    with pytest.raises(ValueError, match="map not linear"):
        linearize_on_basis(lambda c: c @ c, 2)


def test_linear_map_compose():
    rng = np.random.default_rng(8)
    m1 = LinearMapOnB(2, rng.standard_normal((4, 4)))
    m2 = LinearMapOnB(2, rng.standard_normal((4, 4)))
    c = rng.standard_normal((2, 2))
    assert np.allclose(m1.compose(m2)(c), m1(m2(c)))
