"""Banded operators on l^2 and their exact rectangular sections.

A vector supported on ``e_0 .. e_{k-1}`` is mapped by an operator of lower
bandwidth ``p`` into the span of ``e_0 .. e_{k+p-1}``, so the
``(k + p) x k`` section reproduces the infinite action with no truncation.
Square truncations do not have this property and are never used here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .classes import (
    CERTIFY_TOL,
    DefectFunctional,
    OperatorClass,
    SphereMinimum,
    SphereOptConfig,
    sphere_minimize,
)
from .intertwine import PfReport, pf_residual
from .linalg import DomainError

SQRT8 = math.sqrt(8.0)
SWEEP_K = 40


@dataclass(frozen=True)
class BandOperator:
    entry_rule: Callable[[int, int], complex]
    lower_bandwidth: int
    upper_bandwidth: int
    name: str = "band"

    def entry(self, i: int, j: int) -> complex:
        if j < i - self.lower_bandwidth or j > i + self.upper_bandwidth:
            return 0.0
        return self.entry_rule(i, j)

    def adjoint(self) -> "BandOperator":
        rule = self.entry_rule
        return BandOperator(
            lambda i, j: complex(rule(j, i)).conjugate(),
            self.upper_bandwidth,
            self.lower_bandwidth,
            f"{self.name}*",
        )

    def respects_bandwidth(self, limit: int | None = None) -> bool:
        limit = 10 * (self.lower_bandwidth + self.upper_bandwidth + 1) if limit is None else limit
        for i in range(limit):
            for j in range(limit):
                outside = j < i - self.lower_bandwidth or j > i + self.upper_bandwidth
                if outside and self.entry_rule(i, j) != 0:
                    return False
        return True


def _paper_t_rule(i: int, j: int) -> complex:
    if (i, j) in ((0, 0), (0, 1), (1, 1), (2, 1)):
        return 1.0
    if j >= 2 and i == j + 1:
        return SQRT8
    return 0.0


def paper_t() -> BandOperator:
    """``(x0, x1, x2, ...) -> (x0 + x1, x1, x1, sqrt(8) x2, sqrt(8) x3, ...)``."""
    return BandOperator(_paper_t_rule, 1, 1, "paper-t")


def identity_band() -> BandOperator:
    return BandOperator(lambda i, j: 1.0 if i == j else 0.0, 0, 0, "identity")


def weighted_shift(weights) -> BandOperator:
    """``S e_i = w_i e_{i+1}``; indices past the list reuse the last weight."""
    w = [complex(x) for x in weights]
    if not w:
        raise DomainError("weighted_shift needs at least one weight")

    def rule(i: int, j: int) -> complex:
        if i != j + 1:
            return 0.0
        return w[min(j, len(w) - 1)]

    label = ",".join(_fmt_weight(x) for x in w)
    return BandOperator(rule, 1, 0, f"shift:{label}")


def _fmt_weight(z: complex) -> str:
    return repr(z.real) if z.imag == 0 else repr(z)


def parse_operator(spec: str) -> BandOperator:
    """Resolve the names ``paper-t`` and ``shift:w0,w1,...``."""
    if spec == "paper-t":
        return paper_t()
    if spec.startswith("shift:"):
        try:
            weights = [float(tok) for tok in spec[len("shift:"):].split(",") if tok.strip()]
        except ValueError:
            raise DomainError(f"bad weight list in {spec!r}") from None
        return weighted_shift(weights)
    raise DomainError(f"unknown operator {spec!r}")


def section(op: BandOperator, k: int) -> np.ndarray:
    """The ``(k + lower) x k`` block of ``op``, exact on ``span(e_0..e_{k-1})``."""
    if k < 1:
        raise DomainError("section size must be positive")
    rows = k + op.lower_bandwidth
    out = np.zeros((rows, k), dtype=np.complex128)
    for j in range(k):
        for i in range(max(0, j - op.upper_bandwidth), min(rows, j + op.lower_bandwidth + 1)):
            out[i, j] = op.entry_rule(i, j)
    return out


def square_section(op: BandOperator, k: int) -> np.ndarray:
    """Exact matrix of ``op^2`` on vectors supported on the first ``k`` coordinates."""
    return section(op, k + op.lower_bandwidth) @ section(op, k)


@dataclass(frozen=True)
class SupportVector:
    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=np.complex128).ravel())

    @property
    def k(self) -> int:
        return self.coeffs.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    @classmethod
    def basis(cls, n: int, k: int | None = None) -> "SupportVector":
        k = n + 1 if k is None else k
        c = np.zeros(k, dtype=np.complex128)
        c[n] = 1.0
        return cls(c)


def apply(op: BandOperator, h: SupportVector) -> SupportVector:
    return SupportVector(section(op, h.k) @ h.coeffs)


def band_functional(op: BandOperator, kind: OperatorClass, k: int) -> DefectFunctional:
    if kind is OperatorClass.PARANORMAL:
        base = section(op, k)
    elif kind is OperatorClass.STAR_PARANORMAL:
        base = section(op.adjoint(), k)
    else:
        raise DomainError(f"unsupported kind {kind}")
    return DefectFunctional(square_section(op, k), base)


def support_defect_min(
    op: BandOperator, kind: OperatorClass, k: int, cfg: SphereOptConfig = SphereOptConfig()
) -> SphereMinimum:
    """Minimum of the defect functional over unit vectors supported on ``e_0..e_{k-1}``."""
    if k < 1:
        raise DomainError("support length must be positive")
    return sphere_minimize(band_functional(op, OperatorClass(kind), k), cfg)


def defect_sweep(
    op: BandOperator, kind: OperatorClass, ks=range(1, SWEEP_K + 1), cfg: SphereOptConfig = SphereOptConfig()
) -> list[tuple[int, SphereMinimum]]:
    return [(k, support_defect_min(op, kind, k, cfg)) for k in sorted(ks)]


def embedded_section(op: BandOperator, k: int) -> np.ndarray:
    """``section(op, k)`` padded with zero columns to a square matrix."""
    s = section(op, k)
    out = np.zeros((s.shape[0], s.shape[0]), dtype=np.complex128)
    out[:, :k] = s
    return out


def verify_counterexample(k: int = 10, op: BandOperator | None = None) -> PfReport:
    """Residuals of ``TP = PU`` and ``T^*P = PU^*`` with ``P = e_0 e_0^*`` and ``U = I``."""
    if k < 3:
        raise DomainError("k must be at least 3")
    op = paper_t() if op is None else op
    a = embedded_section(op, k)
    n = a.shape[0]
    p = np.zeros((n, n), dtype=np.complex128)
    p[0, 0] = 1.0
    return pf_residual(a, np.eye(n), p, labels={"A": f"{op.name}[k={k}]", "U": "identity", "X": "e0 e0*"})


@dataclass
class HeadCheckReport:
    samples: int
    expansion_max_error: float
    head_min_discriminant: float
    tail_max_error: float
    head_positive: bool

    def passed(self, tol: float = 1e-12) -> bool:
        return self.head_positive and self.expansion_max_error <= tol and self.tail_max_error <= tol

    def to_dict(self) -> dict:
        return {
            "samples": self.samples,
            "expansion_max_error": self.expansion_max_error,
            "head_min_discriminant": self.head_min_discriminant,
            "tail_max_error": self.tail_max_error,
            "head_positive": self.head_positive,
        }


def head_quadratic(alpha: complex, beta: complex, lam: float) -> float:
    """``||T^2 h||^2 - 2 lam ||T h||^2 + lam^2 ||h||^2`` for ``h = alpha e_0 + beta e_1``, from sections."""
    h = np.array([alpha, beta], dtype=np.complex128)
    op = paper_t()
    th = section(op, 2) @ h
    t2h = square_section(op, 2) @ h
    return float(np.vdot(t2h, t2h).real - 2 * lam * np.vdot(th, th).real + lam**2 * np.vdot(h, h).real)


def head_expansion(alpha: complex, beta: complex, lam: float) -> float:
    a2, b2 = abs(alpha) ** 2, abs(beta) ** 2
    return (
        abs(alpha + 2 * beta) ** 2 + 10 * b2
        - 2 * lam * (abs(alpha + beta) ** 2 + 2 * b2)
        + lam**2 * (a2 + b2)
    )


def head_discriminant(alpha: complex, beta: complex) -> float:
    """Minimum over ``lam`` of the head quadratic, times ``||h||^2``."""
    a2, b2 = abs(alpha) ** 2, abs(beta) ** 2
    return (abs(alpha + 2 * beta) ** 2 + 10 * b2) * (a2 + b2) - (abs(alpha + beta) ** 2 + 2 * b2) ** 2


def tail_quadratic(n: int, lam: float) -> float:
    op = paper_t()
    e = SupportVector.basis(n)
    th = apply(op, e)
    t2h = apply(op, th)
    return float(t2h.norm() ** 2 - 2 * lam * th.norm() ** 2 + lam**2 * e.norm() ** 2)


def two_dim_head_check(
    samples: int = 10_000,
    seed: int = 0,
    tail_indices=range(2, 21),
    tail_lambdas=(1.0, 4.0, 8.0, 16.0),
) -> HeadCheckReport:
    """Check the head/tail split of the paranormality inequality for ``paper_t``.

    The head expansion is compared against the quadratic computed from exact
    sections (relative to its magnitude), head positivity is checked through
    the discriminant, and the tail quadratic of each ``e_n`` is compared with
    ``(lam - 8)^2``.
    """
    if samples < 1:
        raise DomainError("samples must be positive")
    rng = np.random.default_rng(seed)
    ab = rng.standard_normal((samples, 2)) + 1j * rng.standard_normal((samples, 2))
    lams = np.exp(rng.uniform(np.log(1e-2), np.log(1e2), samples))
    exp_err = 0.0
    disc_min = math.inf
    for (alpha, beta), lam in zip(ab, lams):
        q = head_quadratic(alpha, beta, lam)
        e = head_expansion(alpha, beta, lam)
        scale = 1.0 + abs(e) + lam**2 * (abs(alpha) ** 2 + abs(beta) ** 2)
        exp_err = max(exp_err, abs(q - e) / scale)
        disc_min = min(disc_min, head_discriminant(alpha, beta))
    tail_err = max(abs(tail_quadratic(n, lam) - (lam - 8.0) ** 2) for n in tail_indices for lam in tail_lambdas)
    return HeadCheckReport(samples, exp_err, disc_min, tail_err, bool(disc_min >= -CERTIFY_TOL))
