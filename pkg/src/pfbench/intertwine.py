"""The superoperator ``X -> A X B`` and intertwining (Putnam-Fuglede) trials.

Under column-stacking ``vec``, the matrix of ``X -> A X B`` is
``kron(B.T, A)``. Fixed points of ``X -> A X U^*`` are exactly the solutions
of ``A X = X U`` when ``U`` is unitary, so the intertwiner space is the
kernel of ``kron(conj(U), A) - I``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .classes import (
    OperatorClass,
    SphereOptConfig,
    Verdict,
    class_check,
    defect_value,
    lambda_family,
)
from .linalg import (
    RANK_TOL,
    DimensionError,
    PreconditionError,
    as_matrix,
    as_square,
    hs_inner,
    kernel_basis,
    min_eig_hermitian,
    op_norm,
    random_unit_vector,
    random_unitary,
    unvec,
    vec,
)

EIG_TOL = 1e-9
UNIT_CIRCLE_TOL = 1e-8


@dataclass
class Superoperator:
    a: np.ndarray
    b: np.ndarray
    _rep: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        self.a = as_square(self.a)
        self.b = as_square(self.b)

    @property
    def matrix_rep(self) -> np.ndarray:
        if self._rep is None:
            self._rep = np.kron(self.b.T, self.a)
        return self._rep

    def __call__(self, x) -> np.ndarray:
        return gamma_apply(self.a, self.b, x)

    def adjoint(self) -> "Superoperator":
        return Superoperator(self.a.conj().T, self.b.conj().T)


def gamma_apply(a, b, x) -> np.ndarray:
    a, b, x = as_square(a), as_square(b), as_matrix(x)
    if a.shape[1] != x.shape[0] or x.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot form A X B with shapes {a.shape}, {x.shape}, {b.shape}")
    return a @ x @ b


def _random_matrix(rng, n, m):
    return rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))


def gamma_action_check(a, b, samples: int = 20, seed: int = 0) -> float:
    """Largest relative gap between ``vec(A X B)`` and ``matrix_rep @ vec(X)``."""
    g = Superoperator(a, b)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        x = _random_matrix(rng, g.a.shape[0], g.b.shape[0])
        lhs = vec(g(x))
        rhs = g.matrix_rep @ vec(x)
        worst = max(worst, np.linalg.norm(lhs - rhs) / (1.0 + np.linalg.norm(lhs)))
    return float(worst)


def gamma_adjoint_check(a, b, samples: int = 20, seed: int = 0) -> float:
    """Largest normalized gap in ``<A X B, Y> = <X, A^* Y B^*>`` over random pairs.

    Each gap is divided by ``1 + ||A|| ||B|| ||X|| ||Y||`` so that the result
    is compared against a plain tolerance.
    """
    a, b = as_square(a), as_square(b)
    if samples < 1:
        raise DimensionError("samples must be positive")
    rng = np.random.default_rng(seed)
    n, m = a.shape[0], b.shape[0]
    ah, bh = a.conj().T, b.conj().T
    scale_ab = op_norm(a) * op_norm(b)
    worst = 0.0
    for _ in range(samples):
        x = _random_matrix(rng, n, m)
        y = _random_matrix(rng, n, m)
        gap = abs(hs_inner(gamma_apply(a, b, x), y) - hs_inner(x, gamma_apply(ah, bh, y)))
        worst = max(worst, gap / (1.0 + scale_ab * np.linalg.norm(x) * np.linalg.norm(y)))
    return float(worst)


def _check_unitary(u, tol_factor: float = 1e-10) -> np.ndarray:
    u = as_square(u)
    m = u.shape[0]
    if np.linalg.norm(u.conj().T @ u - np.eye(m)) > tol_factor * m:
        raise PreconditionError("U is not numerically unitary")
    return u


def solve_intertwiner(a, u, rank_tol: float = RANK_TOL) -> list[np.ndarray]:
    """HS-orthonormal basis of ``{X : A X = X U}`` for unitary ``U``."""
    a = as_square(a)
    u = _check_unitary(u)
    n, m = a.shape[0], u.shape[0]
    rep = Superoperator(a, u.conj().T).matrix_rep
    basis = kernel_basis(rep - np.eye(n * m), rank_tol)
    return [unvec(v, n, m) for v in basis]


@dataclass
class PfReport:
    forward_residual: float
    adjoint_residual: float
    x_norm: float
    labels: dict = field(default_factory=dict)

    @property
    def residuals(self) -> tuple[float, float]:
        return (self.forward_residual, self.adjoint_residual)

    @property
    def relative_residuals(self) -> tuple[float, float]:
        if self.x_norm == 0.0:
            return (0.0, 0.0)
        return (self.forward_residual / self.x_norm, self.adjoint_residual / self.x_norm)

    def to_dict(self) -> dict:
        rf, ra = self.relative_residuals
        return {
            "forward": self.forward_residual,
            "adjoint": self.adjoint_residual,
            "x_norm": self.x_norm,
            "relative": [rf, ra],
            "labels": dict(self.labels),
        }


def pf_residual(a, u, x, labels: dict | None = None) -> PfReport:
    """``||A X - X U||_HS`` and ``||A^* X - X U^*||_HS``."""
    a, u, x = as_square(a), as_square(u), as_matrix(x)
    if a.shape[0] != x.shape[0] or x.shape[1] != u.shape[0]:
        raise DimensionError(f"incompatible shapes A {a.shape}, X {x.shape}, U {u.shape}")
    fwd = np.linalg.norm(a @ x - x @ u)
    adj = np.linalg.norm(a.conj().T @ x - x @ u.conj().T)
    return PfReport(float(fwd), float(adj), float(np.linalg.norm(x)), dict(labels or {}))


@dataclass
class EigenAdjointResult:
    pairs: list[tuple[complex, float]]
    diagnostics: dict


def eigen_adjoint_check(t, tol: float = EIG_TOL) -> EigenAdjointResult:
    """``||T^* x - conj(lam) x||`` for every unit eigenpair with ``||T x - lam x|| <= tol``.

    Eigenvalue candidates come from a general eigensolver and are merged
    when closer than ``sqrt(tol)``; eigenvectors are the right singular
    vectors of ``T - lam I`` whose singular value is at most ``tol``.
    """
    t = as_square(t)
    n = t.shape[0]
    cands: list[complex] = []
    for lam in np.linalg.eigvals(t):
        if all(abs(lam - c) > np.sqrt(tol) for c in cands):
            cands.append(complex(lam))
    pairs: list[tuple[complex, float]] = []
    skipped = 0
    th = t.conj().T
    for lam in cands:
        shifted = t - lam * np.eye(n)
        _, s, vh = np.linalg.svd(shifted)
        vecs = [vh[i].conj() for i in range(n) if s[i] <= tol]
        if not vecs:
            skipped += 1
        for x in vecs:
            pairs.append((lam, float(np.linalg.norm(th @ x - np.conj(lam) * x))))
    diag = {"candidates": len(cands), "candidates_without_eigenvector": skipped, "empty": not pairs}
    return EigenAdjointResult(pairs, diag)


def star_defect(t, x) -> float:
    return defect_value(t, OperatorClass.STAR_PARANORMAL, x)


@dataclass
class TensorUnitaryReport:
    product_identity_max_error: float
    a_verdict: Verdict
    tensor_verdict: Verdict
    tensor_defect: float
    tensor_witness: np.ndarray | None
    family_max_error: float
    lambdas: list[float]

    @property
    def certification_preserved(self) -> bool:
        return self.a_verdict is not Verdict.CERTIFIED or self.tensor_verdict is Verdict.CERTIFIED


def tensor_unitary_check(
    a, u, samples: int = 20, cfg: SphereOptConfig = SphereOptConfig(), lambdas=None, seed: int = 0
) -> TensorUnitaryReport:
    """Compare the *-paranormal structure of ``A`` and ``kron(A, U)`` for unitary ``U``.

    Checks the defect functional on product vectors ``x (x) y``, whether a
    certificate for ``A`` carries over to the tensor product, and the
    smallest eigenvalue of the one-parameter family on both sides.
    """
    a = as_square(a)
    u = _check_unitary(u)
    rng = np.random.default_rng(seed)
    big = np.kron(a, u)
    err = 0.0
    for _ in range(samples):
        x = random_unit_vector(rng, a.shape[0])
        y = random_unit_vector(rng, u.shape[0])
        err = max(err, abs(star_defect(big, np.kron(x, y)) - star_defect(a, x)))
    if lambdas is None:
        lambdas = list(np.exp(rng.uniform(np.log(0.05), np.log(20.0), 5)))
    fam = 0.0
    for lam in lambdas:
        lhs = min_eig_hermitian(lambda_family(big, OperatorClass.STAR_PARANORMAL, lam))
        rhs = min_eig_hermitian(lambda_family(a, OperatorClass.STAR_PARANORMAL, lam))
        fam = max(fam, abs(lhs - rhs))
    ca = class_check(a, OperatorClass.STAR_PARANORMAL, cfg)
    cb = class_check(big, OperatorClass.STAR_PARANORMAL, cfg)
    return TensorUnitaryReport(err, ca.verdict, cb.verdict, cb.defect, cb.witness, fam, [float(x) for x in lambdas])


def unit_circle_eigenvalues(a, tol: float = UNIT_CIRCLE_TOL) -> list[complex]:
    """Distinct eigenvalues of ``a`` with modulus within ``tol`` of one, projected onto the circle."""
    out: list[complex] = []
    for lam in np.linalg.eigvals(as_square(a)):
        if abs(abs(lam) - 1.0) <= tol:
            mu = complex(lam / abs(lam))
            if all(abs(mu - c) > 1e-6 for c in out):
                out.append(mu)
    return out


@dataclass
class TrialResult:
    reports: list[PfReport]
    diagnostics: dict

    @property
    def max_relative_adjoint(self) -> float:
        return max((r.relative_residuals[1] for r in self.reports), default=0.0)


def pf_theorem_trial(
    a,
    seed: int = 0,
    rank_tol: float = RANK_TOL,
    cfg: SphereOptConfig = SphereOptConfig(),
    check_hypothesis: bool = True,
) -> TrialResult:
    """Solve ``A X = X U`` for unitaries sharing a unit-circle eigenvalue with ``A``.

    For every such eigenvalue ``mu`` two unitaries are tried: the scalar
    ``[mu]`` and ``V diag(mu, phases) V^*`` of the size of ``A`` with seeded
    random ``V`` and phases. If ``A`` itself is unitary it is tried as ``U``
    as well. Every basis element of each intertwiner space yields one report.
    """
    a = as_square(a)
    n = a.shape[0]
    rng = np.random.default_rng(seed)
    mus = unit_circle_eigenvalues(a)
    diag: dict = {"seed": seed, "unit_circle_eigenvalues": len(mus)}
    if check_hypothesis:
        diag["star_paranormal"] = class_check(a, OperatorClass.STAR_PARANORMAL, cfg).verdict.value
    unitaries: list[tuple[str, np.ndarray]] = []
    for idx, mu in enumerate(mus):
        unitaries.append((f"[mu{idx}]", np.array([[mu]])))
        phases = np.exp(2j * np.pi * rng.uniform(size=n - 1))
        v = random_unitary(rng, n)
        unitaries.append((f"V diag(mu{idx}, phases) V*", (v * np.concatenate(([mu], phases))) @ v.conj().T))
    if np.linalg.norm(a.conj().T @ a - np.eye(n)) <= 1e-10 * n:
        unitaries.append(("A", a))
    reports = []
    for label, u in unitaries:
        for j, x in enumerate(solve_intertwiner(a, u, rank_tol)):
            reports.append(pf_residual(a, u, x, labels={"A": "input", "U": label, "X": f"basis[{j}]"}))
    if not reports:
        diag["note"] = "no intertwiner: A has no unit-circle eigenvalue, the statement is vacuous"
    return TrialResult(reports, diag)


def kron_swap_indices(n: int, m: int) -> np.ndarray:
    """Index array ``p`` with ``kron(B, A) == kron(A, B)[np.ix_(p, p)]`` for ``A`` n x n, ``B`` m x m."""
    j, i = np.divmod(np.arange(n * m), n)
    return i * m + j


def kron_swap_permutation(n: int, m: int) -> np.ndarray:
    """Permutation matrix ``P`` with ``kron(B, A) = P kron(A, B) P^T``."""
    return np.eye(n * m)[kron_swap_indices(n, m)]
