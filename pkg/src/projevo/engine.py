"""Finite-dimensional projection evolution.

A state is reduced by one projector drawn from an orthogonal resolution of
unity, with Born-rule weights::

    Prob(nu) = Tr[E_nu rho E_nu],    rho' = E_nu rho E_nu / Prob(nu)

Families can be carried along by a unitary, E(tau, nu) = U E(tau0, nu) U^+,
which for rank-one families reproduces ordinary unitary evolution.
"""

from dataclasses import dataclass, field
from typing import Hashable, Sequence

import numpy as np

from .csvio import write_rows
from .errors import (
    InvalidStateError,
    NonUnitaryError,
    ProjEvoError,
    StructuralError,
    TrajectoryStepError,
    ZeroProbabilityBranchError,
)

PROB_FLOOR = 1e-14
STATE_TOL = 1e-12
FAMILY_TOL = 1e-10
UNITARY_TOL = 1e-12


def _as_square(matrix, what):
    m = np.array(matrix, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise StructuralError(f"{what} must be a non-empty square matrix, got shape {m.shape}")
    return m


def _opnorm(m):
    return float(np.linalg.norm(m, 2))


@dataclass(frozen=True, eq=False)
class DensityState:
    """Hermitian, positive semidefinite, unit-trace matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        m = _as_square(self.matrix, "density matrix")
        if _opnorm(m - m.conj().T) > STATE_TOL:
            raise InvalidStateError("density matrix is not Hermitian")
        m = 0.5 * (m + m.conj().T)
        if abs(np.trace(m).real - 1.0) > STATE_TOL:
            raise InvalidStateError(f"density matrix trace is {np.trace(m).real!r}, expected 1")
        if np.linalg.eigvalsh(m)[0] < -STATE_TOL:
            raise InvalidStateError("density matrix has a negative eigenvalue")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self):
        return self.matrix.shape[0]

    @classmethod
    def pure(cls, vector):
        v = np.asarray(vector, dtype=np.complex128).ravel()
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()))


@dataclass(frozen=True, eq=False)
class Projector:
    matrix: np.ndarray
    label: Hashable = None

    def __post_init__(self):
        m = _as_square(self.matrix, "projector")
        if _opnorm(m - m.conj().T) > STATE_TOL:
            raise InvalidStateError(f"projector {self.label!r} is not Hermitian")
        m = 0.5 * (m + m.conj().T)
        if _opnorm(m @ m - m) > FAMILY_TOL:
            raise InvalidStateError(f"projector {self.label!r} is not idempotent")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self):
        return self.matrix.shape[0]

    @classmethod
    def onto(cls, vectors, label=None):
        """Projector onto the span of orthonormal column vectors."""
        v = np.asarray(vectors, dtype=np.complex128)
        if v.ndim == 1:
            v = v[:, None]
        return cls(v @ v.conj().T, label)


@dataclass(frozen=True)
class ProjectionFamily:
    """One etime step's menu of outcomes (checked by ``validate_family``)."""

    projectors: tuple
    etime: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "projectors", tuple(self.projectors))
        if not self.projectors:
            raise StructuralError("a projection family needs at least one projector")

    @property
    def dim(self):
        return self.projectors[0].dim

    @property
    def labels(self):
        return [p.label for p in self.projectors]


@dataclass(frozen=True)
class FamilyDiagnostics:
    orthogonality_defect: float
    idempotency_defect: float
    completeness_defect: float
    passed: bool


def validate_family(family, tol=FAMILY_TOL):
    """Measure how far ``family`` is from an orthogonal resolution of unity."""
    dims = {p.dim for p in family.projectors}
    if len(dims) != 1:
        raise StructuralError(f"projectors in family have mixed dimensions {sorted(dims)}")
    n = dims.pop()
    mats = [p.matrix for p in family.projectors]
    ortho = 0.0
    for i, a in enumerate(mats):
        for b in mats[i + 1:]:
            ortho = max(ortho, _opnorm(a @ b))
    idem = max(_opnorm(a @ a - a) for a in mats)
    complete = _opnorm(sum(mats) - np.eye(n))
    return FamilyDiagnostics(ortho, idem, complete, max(ortho, idem, complete) <= tol)


def _check_dims(rho, p):
    if rho.dim != p.dim:
        raise StructuralError(f"state dimension {rho.dim} does not match projector dimension {p.dim}")


def outcome_probability(rho, p):
    """Tr(P rho P), clamped to [0, 1]."""
    _check_dims(rho, p)
    # Tr(P rho P) = Tr(rho P) for a projector
    prob = float(np.sum(rho.matrix * p.matrix.T).real)
    return min(max(prob, 0.0), 1.0)


def apply_projection(rho, p, prob_floor=PROB_FLOOR):
    """Condition ``rho`` on outcome ``p``: P rho P / Tr(P rho P)."""
    _check_dims(rho, p)
    reduced = p.matrix @ rho.matrix @ p.matrix
    prob = float(np.trace(reduced).real)
    if prob <= prob_floor:
        raise ZeroProbabilityBranchError(
            f"outcome {p.label!r} has probability {prob:.3g} <= {prob_floor:g}")
    return DensityState(reduced / prob)


def step(rho, family, rng, prob_floor=PROB_FLOOR, validate=True):
    """Sample one outcome of ``family`` and reduce the state.

    Sampling is inverse-CDF over the family's declared order using a single
    uniform draw from ``rng``.  Returns ``(label, probability, new_state)``.
    """
    if validate:
        diag = validate_family(family)
        if not diag.passed:
            raise InvalidStateError(f"family at etime {family.etime} is not a resolution of unity: {diag}")
    probs = np.array([outcome_probability(rho, p) for p in family.projectors])
    total = probs.sum()
    if abs(total - 1.0) > FAMILY_TOL:
        raise InvalidStateError(f"outcome probabilities sum to {total!r}")
    probs[probs <= prob_floor] = 0.0
    if not probs.any():
        raise ZeroProbabilityBranchError("every outcome is below the probability floor")
    cdf = np.cumsum(probs)
    idx = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
    idx = min(idx, len(probs) - 1)
    while probs[idx] == 0.0:
        idx -= 1
    chosen = family.projectors[idx]
    return chosen.label, float(probs[idx]), apply_projection(rho, chosen, prob_floor)


def is_unitary(u, tol=UNITARY_TOL):
    u = np.asarray(u, dtype=np.complex128)
    return u.ndim == 2 and u.shape[0] == u.shape[1] and _opnorm(u.conj().T @ u - np.eye(u.shape[0])) <= tol


def shift_family(family, u, etime=None):
    """Conjugate every projector: E -> U E U^+."""
    u = np.asarray(u, dtype=np.complex128)
    if u.shape != (family.dim, family.dim):
        raise StructuralError(f"unitary shape {u.shape} does not match family dimension {family.dim}")
    if not is_unitary(u):
        raise NonUnitaryError("shift_family requires a unitary matrix")
    ud = u.conj().T
    return ProjectionFamily(
        tuple(Projector(u @ p.matrix @ ud, p.label) for p in family.projectors),
        family.etime if etime is None else etime,
    )


@dataclass(frozen=True)
class TrajectoryStep:
    tau: float
    outcome: Hashable
    probability: float


@dataclass
class TrajectoryRecord:
    seed: int
    steps: list = field(default_factory=list)
    final_state: DensityState = None

    def rows(self):
        for i, s in enumerate(self.steps):
            yield i, float(s.tau), s.outcome, s.probability

    def write_csv(self, fh):
        write_rows(fh, ["step_index", "tau", "outcome_label", "conditional_probability"], self.rows())


@dataclass(frozen=True, eq=False)
class Carry:
    """Unitary transport of the state between two recorded etimes.

    A dense run of rank-one families shifted by U(s) selects, in the limit
    of vanishing spacing, the carried branch with probability one and
    leaves the state U rho U^+.  ``Carry`` applies that limit directly; it
    draws no random number and produces no record row.
    """

    unitary: np.ndarray

    def __post_init__(self):
        u = _as_square(self.unitary, "carry unitary")
        if not is_unitary(u):
            raise NonUnitaryError("Carry requires a unitary matrix")
        u.setflags(write=False)
        object.__setattr__(self, "unitary", u)

    @property
    def dim(self):
        return self.unitary.shape[0]

    def apply(self, rho):
        u = self.unitary
        m = u @ rho.matrix @ u.conj().T
        return DensityState(0.5 * (m + m.conj().T))


def validate_schedule(rho0, schedule):
    """Check every schedule item against ``rho0``; errors carry the item index."""
    if not any(isinstance(item, ProjectionFamily) for item in schedule):
        raise StructuralError("schedule must contain at least one family")
    for i, item in enumerate(schedule):
        try:
            if not isinstance(item, (ProjectionFamily, Carry)):
                raise StructuralError(f"unknown schedule item {type(item).__name__}")
            if item.dim != rho0.dim:
                raise StructuralError(f"schedule item dimension {item.dim} != state dimension {rho0.dim}")
            if isinstance(item, ProjectionFamily):
                diag = validate_family(item)
                if not diag.passed:
                    raise InvalidStateError(f"invalid family: {diag}")
        except ProjEvoError as exc:
            raise TrajectoryStepError(i, exc) from exc


def run_trajectory(rho0, schedule: Sequence, seed: int, prob_floor=PROB_FLOOR, validate=True):
    """Run one seeded path through an etime-ordered schedule.

    Schedule items are ``ProjectionFamily`` (one sampled step each) or
    ``Carry`` (deterministic transport between steps).  ``validate=False``
    skips the up-front checks when the caller has already run
    ``validate_schedule`` on the same schedule.
    """
    if validate:
        validate_schedule(rho0, schedule)
    rng = np.random.default_rng(seed)
    record = TrajectoryRecord(seed=seed)
    rho = rho0
    for i, item in enumerate(schedule):
        try:
            if isinstance(item, Carry):
                rho = item.apply(rho)
                continue
            label, prob, rho = step(rho, item, rng, prob_floor, validate=False)
        except ProjEvoError as exc:
            raise TrajectoryStepError(i, exc) from exc
        record.steps.append(TrajectoryStep(item.etime, label, prob))
    record.final_state = rho
    return record


# -- helpers for building test and surrogate families -----------------------

def random_unitary(n, rng):
    """Haar-distributed unitary from the QR decomposition of a Ginibre matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_density(n, rng, rank=None):
    """Normalised Wishart density matrix."""
    rank = n if rank is None else rank
    g = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    w = g @ g.conj().T
    return DensityState(w / np.trace(w).real)


def basis_family(u, groups=None, etime=0.0, labels=None):
    """Family of projectors onto groups of columns of the unitary ``u``.

    ``groups`` is a list of column-index lists; by default each column is
    its own rank-one outcome.
    """
    u = np.asarray(u, dtype=np.complex128)
    n = u.shape[0]
    groups = [[i] for i in range(n)] if groups is None else groups
    labels = list(range(len(groups))) if labels is None else labels
    return ProjectionFamily(
        tuple(Projector.onto(u[:, g], lab) for g, lab in zip(groups, labels)), etime)


def fidelity(rho, sigma):
    """Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2."""
    for a, b in ((rho, sigma), (sigma, rho)):
        if abs(np.trace(a.matrix @ a.matrix).real - 1.0) <= STATE_TOL:
            # pure a: F = <psi|b|psi> = Tr(a b); avoids sqrt of round-off eigenvalues
            return float(np.sum(a.matrix * b.matrix.T).real)
    w, v = np.linalg.eigh(rho.matrix)
    sq = (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T
    inner = np.linalg.eigvalsh(sq @ sigma.matrix @ sq)
    return float(np.sum(np.sqrt(np.clip(inner, 0, None))) ** 2)
