"""Membership tests for the normal, hyponormal, paranormal and *-paranormal classes.

Paranormality (and its * variant) is the statement that

    ||T^2 x||^2 - 2 lam b(x) + lam^2 >= 0   for all lam > 0 and unit x,

with ``b(x) = ||T x||^2`` (paranormal) or ``||T^* x||^2`` (*-paranormal).
Minimizing over ``lam`` in closed form (``lam = b(x)``) leaves the defect
functional ``f(x) = ||T^2 x||^2 - b(x)^2`` on the unit sphere, which is
minimized by multi-start projected gradient descent. A negative value comes
with a witness and is a proof; a nonnegative best value is only as good as
the optimizer's coverage.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .linalg import DomainError, as_square, eigh_hermitian, min_eig_hermitian, vector_to_pairs

CERTIFY_TOL = 1e-9
REFUTE_MARGIN = 1e-6
_MAX_SHRINKS = 40
# accepted decreases below this (normalized objective) are roundoff
_STALL_DECREASE = 1e-15
_STALL_ITERS = 3


class OperatorClass(enum.Enum):
    NORMAL = "normal"
    HYPONORMAL = "hyponormal"
    PARANORMAL = "paranormal"
    STAR_PARANORMAL = "star-paranormal"


PARANORMAL = OperatorClass.PARANORMAL
STAR_PARANORMAL = OperatorClass.STAR_PARANORMAL


class Verdict(enum.Enum):
    CERTIFIED = "certified"
    REFUTED = "refuted"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class SphereOptConfig:
    """Multi-start projected gradient descent settings.

    The step rule acts on the objective divided by
    ``2 ||F2||^2 + 12 ||F1||^4`` (spectral norms), a Lipschitz bound for its
    gradient. A unit step is therefore safe, and trajectories do not depend
    on the overall scale of the operator.
    """

    restarts: int = 64
    max_iters: int = 500
    grad_tol: float = 1e-10
    initial_step: float = 1.0
    shrink: float = 0.5
    sufficient_decrease: float = 1e-4
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1 or self.max_iters < 1:
            raise DomainError("restarts and max_iters must be positive")
        if not 0.0 < self.shrink < 1.0:
            raise DomainError("shrink must lie in (0, 1)")


class DefectFunctional:
    """``f(x) = ||F2 x||^2 - ||F1 x||^4`` for 1-D ``x`` or column batches.

    For a square ``T`` the maps are ``F2 = T @ T`` and ``F1 = T`` (paranormal)
    or ``F1 = T^*`` (*-paranormal). Rectangular maps are allowed; only their
    column count has to agree.
    """

    def __init__(self, square_map, base_map):
        self.square_map = np.asarray(square_map, dtype=np.complex128)
        self.base_map = np.asarray(base_map, dtype=np.complex128)
        if self.square_map.shape[1] != self.base_map.shape[1]:
            raise DomainError("maps must act on the same space")
        self.dim = self.square_map.shape[1]

    @classmethod
    def for_matrix(cls, t, kind: OperatorClass) -> "DefectFunctional":
        t = as_square(t)
        return cls(t @ t, _base(t, kind))

    def scale(self) -> float:
        """Upper bound on the Lipschitz constant of the gradient."""
        n2 = np.linalg.norm(self.square_map, 2) ** 2
        n1 = np.linalg.norm(self.base_map, 2) ** 4
        s = 2.0 * n2 + 12.0 * n1
        return float(s) if s > 0 else 1.0

    def _parts(self, x):
        y2 = self.square_map @ x
        y1 = self.base_map @ x
        q = np.sum(np.abs(y2) ** 2, axis=0)
        b = np.sum(np.abs(y1) ** 2, axis=0)
        return y2, y1, q, b

    def value(self, x):
        _, _, q, b = self._parts(x)
        return q - b * b

    def base(self, x):
        """``b(x)``, the minimizing ``lam`` of the one-parameter family at ``x``."""
        return self._parts(x)[3]

    def gradient(self, x):
        """Euclidean gradient with C^n read as R^{2n}."""
        y2, y1, _, b = self._parts(x)
        return 2.0 * (self.square_map.conj().T @ y2) - 4.0 * b * (self.base_map.conj().T @ y1)

    def tangent_gradient(self, x):
        g = self.gradient(x)
        radial = np.real(np.sum(np.conj(x) * g, axis=0))
        return g - radial * x


@dataclass
class SphereMinimum:
    value: float
    argmin: np.ndarray
    restarts_used: int
    best_restart: int
    grad_norm: float
    iterations: int
    start_values: np.ndarray = field(repr=False)

    def __iter__(self):
        yield self.value
        yield self.argmin

    def diagnostics(self) -> dict:
        return {
            "restarts_used": self.restarts_used,
            "best_restart": self.best_restart,
            "best_objective": self.value,
            "grad_norm": self.grad_norm,
            "iterations": self.iterations,
        }


def _normalize_columns(x):
    return x / np.linalg.norm(x, axis=0)


def sphere_minimize(functional: DefectFunctional, cfg: SphereOptConfig = SphereOptConfig()) -> SphereMinimum:
    """Minimize ``functional`` over the complex unit sphere.

    Projected gradient descent with Armijo backtracking and renormalization.
    The first trial step is ``cfg.initial_step``; later iterations start
    from the Barzilai-Borwein step ``<s, s> / |Re <s, y>|`` (clipped to
    ``[1e-3, 1e3]`` times ``cfg.initial_step``). All restarts advance
    together as columns of one array, each with its own step. Ties between
    restarts go to the lowest index.
    """
    n = functional.dim
    rng = np.random.default_rng(cfg.seed)
    x = rng.standard_normal((n, cfg.restarts)) + 1j * rng.standard_normal((n, cfg.restarts))
    x = _normalize_columns(x)
    start_values = functional.value(x)

    s = functional.scale()
    fx = start_values / s
    g = functional.tangent_gradient(x) / s
    trial0 = np.full(cfg.restarts, cfg.initial_step)
    active = np.ones(cfg.restarts, dtype=bool)
    stall = np.zeros(cfg.restarts, dtype=int)
    iters = np.zeros(cfg.restarts, dtype=int)
    lo, hi = 1e-3 * cfg.initial_step, 1e3 * cfg.initial_step
    for _ in range(cfg.max_iters):
        gnorm = np.linalg.norm(g, axis=0)
        active &= gnorm > cfg.grad_tol
        if not active.any():
            break
        cols = np.flatnonzero(active)
        step = trial0[cols].copy()
        accepted = np.zeros(cols.size, dtype=bool)
        x_new = x[:, cols].copy()
        f_new = fx[cols].copy()
        pending = np.arange(cols.size)
        for _ in range(_MAX_SHRINKS):
            c = cols[pending]
            trial = _normalize_columns(x[:, c] - step[pending] * g[:, c])
            f_trial = functional.value(trial) / s
            ok = f_trial <= fx[c] - cfg.sufficient_decrease * step[pending] * gnorm[c] ** 2
            x_new[:, pending[ok]] = trial[:, ok]
            f_new[pending[ok]] = f_trial[ok]
            accepted[pending[ok]] = True
            pending = pending[~ok]
            if pending.size == 0:
                break
            step[pending] *= cfg.shrink

        tiny = fx[cols] - f_new <= _STALL_DECREASE * (1.0 + np.abs(fx[cols]))
        stall[cols] = np.where(tiny, stall[cols] + 1, 0)
        g_new = functional.tangent_gradient(x_new) / s
        ds = x_new - x[:, cols]
        dy = g_new - g[:, cols]
        sy = np.abs(np.real(np.sum(np.conj(ds) * dy, axis=0)))
        ss = np.real(np.sum(np.conj(ds) * ds, axis=0))
        with np.errstate(divide="ignore", invalid="ignore"):
            bb = np.where(sy > 0, ss / sy, cfg.initial_step)
        trial0[cols] = np.clip(np.nan_to_num(bb, nan=cfg.initial_step), lo, hi)

        x[:, cols] = x_new
        fx[cols] = f_new
        g[:, cols] = g_new
        iters[cols[accepted]] += 1
        active[cols[~accepted | (stall[cols] >= _STALL_ITERS)]] = False

    x = _normalize_columns(x)
    values = functional.value(x)
    best = int(np.argmin(values))
    final_g = np.linalg.norm(functional.tangent_gradient(x[:, best]))
    return SphereMinimum(
        value=float(values[best]),
        argmin=x[:, best].copy(),
        restarts_used=cfg.restarts,
        best_restart=best,
        grad_norm=float(final_g),
        iterations=int(iters[best]),
        start_values=start_values,
    )


def _base(t, kind: OperatorClass):
    if kind is OperatorClass.PARANORMAL:
        return t
    if kind is OperatorClass.STAR_PARANORMAL:
        return t.conj().T
    raise DomainError(f"defect functional is defined for paranormal classes only, not {kind}")


def defect_value(t, kind: OperatorClass, x) -> float:
    """``||T^2 x||^2 - b(x)^2`` at the normalized ``x``."""
    x = np.asarray(x, dtype=np.complex128).ravel()
    x = x / np.linalg.norm(x)
    return float(DefectFunctional.for_matrix(t, kind).value(x))


def defect_min(t, kind: OperatorClass, cfg: SphereOptConfig = SphereOptConfig()) -> SphereMinimum:
    return sphere_minimize(DefectFunctional.for_matrix(t, kind), cfg)


def self_commutator(t) -> np.ndarray:
    t = as_square(t)
    th = t.conj().T
    return th @ t - t @ th


@dataclass
class ClassCertificate:
    cls: OperatorClass
    verdict: Verdict
    defect: float
    witness: np.ndarray | None
    diagnostics: dict

    def to_dict(self) -> dict:
        return {
            "class": self.cls.value,
            "verdict": self.verdict.value,
            "defect": self.defect,
            "witness": None if self.witness is None else vector_to_pairs(self.witness),
            "restarts_used": self.diagnostics.get("restarts_used", 0),
        }


def class_check(
    t,
    cls: OperatorClass,
    cfg: SphereOptConfig = SphereOptConfig(),
    certify_tol: float = CERTIFY_TOL,
    refute_margin: float = REFUTE_MARGIN,
) -> ClassCertificate:
    """Certify, refute, or give up on ``t`` belonging to ``cls``.

    ``defect`` is ``||[T^*, T]||_HS`` for the normal class, the smallest
    eigenvalue of ``[T^*, T]`` for the hyponormal class, and the best-found
    minimum of the defect functional otherwise. Values between
    ``-refute_margin`` and ``-certify_tol`` (resp. between ``certify_tol``
    and ``refute_margin`` for the normal class) are inconclusive.
    """
    t = as_square(t)
    cls = OperatorClass(cls)
    if cls is OperatorClass.NORMAL:
        comm = self_commutator(t)
        defect = float(np.linalg.norm(comm))
        w, v = eigh_hermitian(comm)
        top = int(np.argmax(np.abs(w)))
        diag = {"restarts_used": 0, "witness_value": -float(abs(w[top]))}
        if defect <= certify_tol:
            return ClassCertificate(cls, Verdict.CERTIFIED, defect, None, diag)
        if defect > refute_margin:
            return ClassCertificate(cls, Verdict.REFUTED, defect, v[:, top].copy(), diag)
        return ClassCertificate(cls, Verdict.INCONCLUSIVE, defect, None, diag)

    if cls is OperatorClass.HYPONORMAL:
        w, v = eigh_hermitian(self_commutator(t))
        defect = float(w[0])
        witness = v[:, 0].copy()
        diag = {"restarts_used": 0}
    else:
        res = defect_min(t, cls, cfg)
        defect, witness = res.value, res.argmin
        diag = res.diagnostics()

    if defect >= -certify_tol:
        return ClassCertificate(cls, Verdict.CERTIFIED, defect, None, diag)
    if defect < -refute_margin:
        return ClassCertificate(cls, Verdict.REFUTED, defect, witness, diag)
    return ClassCertificate(cls, Verdict.INCONCLUSIVE, defect, None, diag)


def lambda_family(t, kind: OperatorClass, lam: float) -> np.ndarray:
    """``T^{*2} T^2 - 2 lam B + lam^2 I`` with ``B = T^* T`` or ``T T^*``."""
    t = as_square(t)
    t2 = t @ t
    base = _base(t, kind)
    return t2.conj().T @ t2 - 2.0 * lam * (base.conj().T @ base) + lam * lam * np.eye(t.shape[0])


def lambda_family_check(t, kind: OperatorClass, lambdas) -> list[tuple[float, float]]:
    out = []
    for lam in lambdas:
        lam = float(lam)
        if not lam > 0.0:
            raise DomainError(f"lambda must be positive, got {lam}")
        out.append((lam, min_eig_hermitian(lambda_family(t, kind, lam))))
    return out
