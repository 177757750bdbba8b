"""Dense complex linear algebra used by every other module.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Vectorization
stacks columns, so the matrix of ``X -> A @ X @ B`` is ``kron(B.T, A)``.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

RANK_TOL = 1e-10
SYM_TOL = 1e-10


class DimensionError(ValueError):
    """Operand shapes are incompatible with the requested operation."""


class NotHermitianError(ValueError):
    pass


class DomainError(ValueError):
    """A scalar argument lies outside the admissible range."""


class PreconditionError(ValueError):
    pass


class MatrixFormatError(ValueError):
    """A JSON matrix document does not follow the shared schema."""


def as_matrix(m) -> np.ndarray:
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionError(f"expected a non-empty 2-D matrix, got shape {arr.shape}")
    return arr


def as_square(m) -> np.ndarray:
    arr = as_matrix(m)
    if arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {arr.shape}")
    return arr


def adjoint(m) -> np.ndarray:
    return as_matrix(m).conj().T


def hs_inner(x, y) -> complex:
    """Hilbert-Schmidt inner product ``trace(Y^* X)``, linear in ``x``."""
    x = as_matrix(x)
    y = as_matrix(y)
    if x.shape != y.shape:
        raise DimensionError(f"shape mismatch {x.shape} vs {y.shape}")
    # trace(Y^* X) without forming the product
    return complex(np.vdot(y, x))


def hs_norm(x) -> float:
    return float(np.linalg.norm(as_matrix(x)))


def op_norm(x) -> float:
    """Largest singular value."""
    return float(np.linalg.norm(as_matrix(x), 2))


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def vec(x) -> np.ndarray:
    """Stack the columns of ``x`` into a 1-D vector."""
    return as_matrix(x).reshape(-1, order="F")


def unvec(v, rows: int, cols: int) -> np.ndarray:
    v = np.asarray(v, dtype=np.complex128).reshape(-1)
    if v.size != rows * cols:
        raise DimensionError(f"cannot reshape length {v.size} into {rows}x{cols}")
    return v.reshape(rows, cols, order="F")


def symmetrize(h, sym_tol: float = SYM_TOL) -> np.ndarray:
    h = as_square(h)
    gap = np.linalg.norm(h - h.conj().T)
    if gap > sym_tol * (1.0 + np.linalg.norm(h)):
        raise NotHermitianError(f"matrix is not Hermitian: ||H - H*||_HS = {gap:.3e}")
    return 0.5 * (h + h.conj().T)


def min_eig_hermitian(h, sym_tol: float = SYM_TOL) -> float:
    """Smallest eigenvalue of a numerically Hermitian matrix.

    The input is symmetrized as ``(H + H^*) / 2`` before the solve.

    Raises
    ------
    DimensionError
        If ``h`` is not square.
    NotHermitianError
        If ``||H - H^*||_HS > sym_tol * (1 + ||H||_HS)``.
    """
    return float(np.linalg.eigvalsh(symmetrize(h, sym_tol))[0])


def eigh_hermitian(h, sym_tol: float = SYM_TOL) -> tuple[np.ndarray, np.ndarray]:
    return np.linalg.eigh(symmetrize(h, sym_tol))


def kernel_basis(m, rank_tol: float = RANK_TOL) -> list[np.ndarray]:
    """Orthonormal basis of the numerical null space of ``m``.

    A right singular direction belongs to the kernel when its singular value
    is at most ``rank_tol * sigma_max``. Directions beyond ``min(rows, cols)``
    always do. Returns 1-D vectors; the list is empty for an injective ``m``.
    """
    m = as_matrix(m)
    _, s, vh = np.linalg.svd(m, full_matrices=True)
    smax = s[0] if s.size else 0.0
    ncols = m.shape[1]
    sv = np.zeros(ncols)
    sv[: s.size] = s
    keep = sv <= rank_tol * smax
    return [vh[i].conj().copy() for i in np.flatnonzero(keep)]


def matrix_units(n: int, m: int, i: int, j: int) -> np.ndarray:
    e = np.zeros((n, m), dtype=np.complex128)
    e[i, j] = 1.0
    return e


def ginibre(rng: np.random.Generator, n: int, m: int | None = None) -> np.ndarray:
    m = n if m is None else m
    return (rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))) / np.sqrt(2.0)


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    q, r = np.linalg.qr(ginibre(rng, n))
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_normal(rng: np.random.Generator, n: int, eigenvalues=None) -> np.ndarray:
    """``V diag(d) V^*`` with ``V`` random unitary; ``d`` Gaussian unless given."""
    v = random_unitary(rng, n)
    d = ginibre(rng, n, 1).ravel() if eigenvalues is None else np.asarray(eigenvalues, complex)
    return (v * d) @ v.conj().T


def random_unit_vector(rng: np.random.Generator, n: int) -> np.ndarray:
    x = ginibre(rng, n, 1).ravel()
    return x / np.linalg.norm(x)


# -- shared JSON matrix format ---------------------------------------------


def matrix_to_dict(m) -> dict:
    m = as_matrix(m)
    return {
        "rows": m.shape[0],
        "cols": m.shape[1],
        "data": [[float(z.real), float(z.imag)] for z in m.ravel(order="C")],
    }


def matrix_from_dict(doc) -> np.ndarray:
    try:
        rows, cols, data = doc["rows"], doc["cols"], doc["data"]
    except (KeyError, TypeError) as exc:
        raise MatrixFormatError(f"matrix document needs rows, cols, data: {exc}") from None
    if not (isinstance(rows, int) and isinstance(cols, int)) or rows < 1 or cols < 1:
        raise MatrixFormatError("rows and cols must be positive integers")
    if not isinstance(data, list) or len(data) != rows * cols:
        raise MatrixFormatError(f"data must hold exactly rows*cols = {rows * cols} pairs")
    out = np.empty(rows * cols, dtype=np.complex128)
    for idx, pair in enumerate(data):
        if (
            not isinstance(pair, (list, tuple))
            or len(pair) != 2
            or not all(isinstance(p, (int, float)) and not isinstance(p, bool) for p in pair)
        ):
            raise MatrixFormatError(f"entry {idx} is not a [re, im] pair of numbers")
        out[idx] = complex(pair[0], pair[1])
    return out.reshape(rows, cols)


def load_matrix(path) -> np.ndarray:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise MatrixFormatError(f"cannot read matrix from {path}: {exc}") from None
    return matrix_from_dict(doc)


def save_matrix(path, m) -> None:
    Path(path).write_text(json.dumps(matrix_to_dict(m)))


def vector_to_pairs(v) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, complex).ravel()]
