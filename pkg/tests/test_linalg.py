import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pfbench import linalg as la
from pfbench.linalg import (
    DimensionError,
    MatrixFormatError,
    NotHermitianError,
    as_matrix,
    ginibre,
    hs_inner,
    hs_norm,
    kernel_basis,
    kron,
    matrix_units,
    min_eig_hermitian,
    unvec,
    vec,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_hs_inner_trivial():
    assert hs_inner(np.eye(3), np.eye(3)) == 3
    assert hs_inner(matrix_units(2, 2, 0, 0), matrix_units(2, 2, 1, 1)) == 0


def test_hs_inner_matches_double_loop(rng):
    x, y = ginibre(rng, 4), ginibre(rng, 4)
    expected = 0j
    for i in range(4):
        for j in range(4):
            expected += np.conj(y[i, j]) * x[i, j]
    assert abs(hs_inner(x, y) - expected) <= 1e-12 * abs(expected)
    assert hs_inner(x, y) == pytest.approx(np.conj(hs_inner(y, x)), abs=1e-14)


def test_hs_inner_shape_mismatch():
    with pytest.raises(DimensionError):
        hs_inner(np.eye(2), np.eye(3))


def test_kron_units():
    np.testing.assert_array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))
    out = kron(matrix_units(2, 2, 0, 1), np.eye(2))
    expected = np.zeros((4, 4))
    expected[0:2, 2:4] = np.eye(2)
    np.testing.assert_array_equal(out, expected)


def test_kron_matches_quadruple_loop(rng):
    a, b = ginibre(rng, 3, 2), ginibre(rng, 2, 3)
    expected = np.zeros((6, 6), dtype=complex)
    for i in range(3):
        for j in range(2):
            for k in range(2):
                for l in range(3):
                    expected[i * 2 + k, j * 3 + l] = a[i, j] * b[k, l]
    np.testing.assert_allclose(kron(a, b), expected, rtol=1e-15, atol=0)


def test_vec_convention():
    np.testing.assert_array_equal(vec([[1, 2], [3, 4]]), [1, 3, 2, 4])


def test_unvec_roundtrip(rng):
    x = ginibre(rng, 3, 5)
    np.testing.assert_array_equal(unvec(vec(x), 3, 5), x)
    with pytest.raises(DimensionError):
        unvec(vec(x), 4, 4)


def test_hs_inner_is_vec_inner(rng):
    x, y = ginibre(rng, 4), ginibre(rng, 4)
    assert abs(hs_inner(x, y) - np.vdot(vec(y), vec(x))) <= 1e-12 * abs(hs_inner(x, y))


@pytest.mark.parametrize(
    "h, expected",
    [(np.diag([1.0, 2.0]), 1.0), (np.zeros((3, 3)), 0.0), ([[1.0, 2.0], [2.0, 1.0]], -1.0)],
)
def test_min_eig_examples(h, expected):
    assert min_eig_hermitian(h) == pytest.approx(expected, abs=1e-12)


def test_min_eig_errors():
    with pytest.raises(DimensionError):
        min_eig_hermitian(np.ones((2, 3)))
    with pytest.raises(NotHermitianError):
        min_eig_hermitian([[0.0, 1.0], [0.0, 0.0]])


def test_min_eig_tolerates_roundoff_asymmetry():
    h = np.array([[2.0, 1.0], [1.0 + 1e-13, 2.0]])
    assert min_eig_hermitian(h) == pytest.approx(1.0, abs=1e-12)


def test_kernel_examples():
    full = kernel_basis(np.zeros((3, 3)))
    assert len(full) == 3
    np.testing.assert_allclose(np.array(full) @ np.array(full).conj().T, np.eye(3), atol=1e-14)
    assert kernel_basis(np.eye(3)) == []
    (v,) = kernel_basis(np.diag([1.0, 0.0, 2.0]))
    assert abs(abs(v[1]) - 1.0) < 1e-14


def test_kernel_of_wide_matrix(rng):
    m = ginibre(rng, 2, 5)
    basis = kernel_basis(m)
    assert len(basis) == 3
    for v in basis:
        assert np.linalg.norm(m @ v) <= 1e-12


@settings(max_examples=50, deadline=None)
@given(seeds, st.integers(1, 5), st.integers(1, 5))
def test_cauchy_schwarz(seed, n, m):
    rng = np.random.default_rng(seed)
    x, y = ginibre(rng, n, m), ginibre(rng, n, m)
    lhs = abs(hs_inner(x, y)) ** 2
    rhs = hs_inner(x, x).real * hs_inner(y, y).real
    assert lhs <= rhs * (1 + 1e-12)
    xx = hs_inner(x, x)
    assert xx.real >= 0 and abs(xx.imag) <= 1e-14 * hs_norm(x) ** 2
    assert hs_norm(x) ** 2 == pytest.approx(xx.real, rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_kron_associative_and_multiplicative(seed):
    rng = np.random.default_rng(seed)
    a, b, c = ginibre(rng, 2, 3), ginibre(rng, 3, 2), ginibre(rng, 2, 2)
    np.testing.assert_allclose(kron(kron(a, b), c), kron(a, kron(b, c)), rtol=0, atol=1e-13)
    d, e = ginibre(rng, 3, 2), ginibre(rng, 2, 3)
    np.testing.assert_allclose(kron(a, b) @ kron(d, e), kron(a @ d, b @ e), atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(seeds, st.integers(1, 4), st.integers(1, 4))
def test_vec_intertwines_products(seed, n, m):
    rng = np.random.default_rng(seed)
    a, x, b = ginibre(rng, n), ginibre(rng, n, m), ginibre(rng, m)
    lhs = vec(a @ x @ b)
    rhs = kron(b.T, a) @ vec(x)
    assert np.linalg.norm(lhs - rhs) <= 1e-10 * np.linalg.norm(lhs)


@settings(max_examples=50, deadline=None)
@given(seeds, st.integers(1, 6), st.floats(-10, 10))
def test_min_eig_shift(seed, n, c):
    rng = np.random.default_rng(seed)
    g = ginibre(rng, n)
    h = g + g.conj().T
    assert min_eig_hermitian(h + c * np.eye(n)) == pytest.approx(min_eig_hermitian(h) + c, abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(1, 6), st.integers(1, 6), st.integers(0, 3))
def test_kernel_vectors_are_null_and_orthonormal(seed, rows, cols, drop):
    rng = np.random.default_rng(seed)
    m = ginibre(rng, rows, cols)
    if drop and cols > 1:
        m[:, -1] = m[:, 0] * 2.0
    tol = la.RANK_TOL
    smax = np.linalg.norm(m, 2)
    basis = kernel_basis(m, tol)
    for v in basis:
        assert np.linalg.norm(m @ v) <= 2 * tol * smax
    if basis:
        gram = np.array(basis) @ np.array(basis).conj().T
        assert np.max(np.abs(gram - np.eye(len(basis)))) <= 1e-10


def test_adjoint_involution(rng):
    m = ginibre(rng, 3, 4)
    np.testing.assert_array_equal(la.adjoint(la.adjoint(m)), m)


def test_json_roundtrip(tmp_path, rng):
    m = ginibre(rng, 2, 3)
    doc = la.matrix_to_dict(m)
    assert doc["rows"] == 2 and doc["cols"] == 3 and len(doc["data"]) == 6
    assert doc["data"][1] == [m[0, 1].real, m[0, 1].imag]
    path = tmp_path / "m.json"
    la.save_matrix(path, m)
    np.testing.assert_array_equal(la.load_matrix(path), m)


@pytest.mark.parametrize(
    "doc",
    [
        {"rows": 2, "cols": 2, "data": [[1, 0]] * 3},
        {"rows": 0, "cols": 2, "data": []},
        {"rows": 1, "cols": 1, "data": [[1, 0, 0]]},
        {"rows": 1, "cols": 1, "data": [["a", 0]]},
        {"cols": 1, "data": [[1, 0]]},
        [1, 2],
    ],
)
def test_json_rejects_malformed(doc):
    with pytest.raises(MatrixFormatError):
        la.matrix_from_dict(doc)


def test_load_rejects_bad_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(MatrixFormatError):
        la.load_matrix(path)
    with pytest.raises(MatrixFormatError):
        la.load_matrix(tmp_path / "missing.json")


def test_as_matrix_promotes_vectors():
    assert as_matrix([1, 2, 3]).shape == (3, 1)
    with pytest.raises(DimensionError):
        as_matrix(np.zeros((0, 2)))
    json.dumps(la.vector_to_pairs([1j, 2]))
