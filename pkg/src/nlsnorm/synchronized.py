"""Synchronized states U_i = σ_i U of the cubic limit system and their
non-degeneracy.

With t = σ² the amplitudes solve the linear system B t = 1. The linearized
system then decouples along the eigenvectors of M = I + 2C, C_ij = β_ij σ_i σ_j,
and it is non-degenerate when no eigenvalue Λ_ℓ (ℓ >= 2) of M lands on an
eigenvalue of -Δψ + ψ = λU²ψ.
"""

from dataclasses import asdict, dataclass, field
from enum import Enum
import math

import numpy as np

__all__ = [
    "CouplingError",
    "SpectrumUnavailable",
    "CouplingMatrix",
    "SynchronizedState",
    "NoSynchronizedState",
    "Verdict",
    "SpectrumPolicy",
    "NondegeneracyReport",
    "solve_sigma",
    "eigen_symmetric",
    "check_nondegeneracy",
    "Example1",
    "example1_closed_form",
    "example2_matrix",
    "example2_closed_form",
]

SYMMETRY_TOL = 1e-12
SINGULAR_TOL = 1e-12
MARGIN_TOL = 1e-6


class CouplingError(ValueError):
    """Invalid or singular coupling matrix."""


class SpectrumUnavailable(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class CouplingMatrix:
    entries: np.ndarray

    def __post_init__(self):
        B = np.atleast_2d(np.asarray(self.entries, dtype=float))
        if B.ndim != 2 or B.shape[0] != B.shape[1]:
            raise CouplingError(f"coupling matrix must be square, got shape {B.shape}")
        if not np.all(np.isfinite(B)):
            raise CouplingError("coupling matrix has non-finite entries")
        if np.max(np.abs(B - B.T)) > SYMMETRY_TOL * max(1.0, np.max(np.abs(B))):
            raise CouplingError("coupling matrix must be symmetric")
        if np.any(np.diag(B) <= 0):
            raise CouplingError("diagonal entries beta_ii must be positive")
        object.__setattr__(self, "entries", B)

    @property
    def k(self):
        return self.entries.shape[0]

    @classmethod
    def two_by_two(cls, mu1, mu2, beta):
        return cls([[mu1, beta], [beta, mu2]])

    def all_positive(self):
        return bool(np.all(self.entries > 0))

    def is_singular(self):
        sv = np.linalg.svd(self.entries, compute_uv=False)
        return sv[-1] <= SINGULAR_TOL * sv[0]


@dataclass(frozen=True, eq=False)
class SynchronizedState:
    sigma: np.ndarray
    C: np.ndarray
    M: np.ndarray
    thetas: np.ndarray
    lambdas: np.ndarray
    eigenvectors: np.ndarray
    principal_index: int

    @property
    def k(self):
        return len(self.sigma)

    @property
    def principal_vector(self):
        return self.eigenvectors[:, self.principal_index]

    @property
    def secondary_lambdas(self):
        """Λ_ℓ for ℓ >= 2, i.e. every eigenvalue but the one carried by σ."""
        return np.delete(self.lambdas, self.principal_index)


@dataclass(frozen=True, eq=False)
class NoSynchronizedState:
    t: np.ndarray
    offending: tuple


def _jacobi_rotate(A, V, p, q):
    apq = A[p, q]
    diff = A[q, q] - A[p, p]
    if apq == 0.0:
        return
    if abs(apq) < 1e-18 * abs(diff):
        # theta^2 would overflow; tan of the rotation angle is apq/diff
        t = apq / diff
    else:
        theta = diff / (2.0 * apq)
        t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
    c = 1.0 / math.sqrt(t * t + 1.0)
    s = t * c
    Ap = A[:, p].copy()
    Aq = A[:, q].copy()
    A[:, p] = c * Ap - s * Aq
    A[:, q] = s * Ap + c * Aq
    Ap = A[p, :].copy()
    Aq = A[q, :].copy()
    A[p, :] = c * Ap - s * Aq
    A[q, :] = s * Ap + c * Aq
    A[p, q] = A[q, p] = 0.0
    Vp = V[:, p].copy()
    V[:, p] = c * Vp - s * V[:, q]
    V[:, q] = s * Vp + c * V[:, q]


def eigen_symmetric(A, max_sweeps=100):
    """Cyclic Jacobi eigen-decomposition of a small symmetric matrix.

    Returns eigenvalues in ascending order and the matching orthonormal
    eigenvectors as columns, each with its first nonzero component positive.
    Ties are ordered by eigenvector, lexicographically descending, so that
    standard basis vectors keep their natural order.
    """
    A = np.array(A, dtype=float, copy=True)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("matrix must be square")
    scale = max(1.0, np.max(np.abs(A))) if n else 1.0
    if n and np.max(np.abs(A - A.T)) > SYMMETRY_TOL * scale:
        raise ValueError("matrix must be symmetric")
    V = np.eye(n)
    # work on the unit-scale matrix so tiny or huge entries behave alike
    amax = float(np.max(np.abs(A))) if n else 0.0
    if amax > 0.0:
        A /= amax
    norm = np.linalg.norm(A)
    for _ in range(max_sweeps):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= 1e-15 * norm:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                _jacobi_rotate(A, V, p, q)
    vals = np.diag(A).copy()
    for j in range(n):
        nz = np.flatnonzero(np.abs(V[:, j]) > 1e-14)
        if nz.size and V[nz[0], j] < 0:
            V[:, j] = -V[:, j]
    tie = 1e-12 if amax > 0.0 else 0.0
    order = list(np.argsort(vals, kind="stable"))
    i = 0
    while i < n:
        j = i
        while j + 1 < n and vals[order[j + 1]] - vals[order[i]] <= tie:
            j += 1
        order[i: j + 1] = sorted(order[i: j + 1], key=lambda m: tuple(V[:, m]), reverse=True)
        i = j + 1
    return vals[order] * (amax if amax > 0.0 else 1.0), V[:, order]


def solve_sigma(B):
    """Amplitudes σ with Σ_j β_ij σ_j² = 1, plus C, M and their spectra.

    Returns :class:`NoSynchronizedState` when some σ_i² is not positive.
    """
    if not isinstance(B, CouplingMatrix):
        B = CouplingMatrix(B)
    if B.is_singular():
        raise CouplingError("coupling matrix singular")
    t = np.linalg.solve(B.entries, np.ones(B.k))
    bad = tuple(int(i) for i in np.flatnonzero(t <= 0))
    if bad:
        return NoSynchronizedState(t, bad)
    sigma = np.sqrt(t)
    C = B.entries * np.outer(sigma, sigma)
    M = np.eye(B.k) + 2.0 * C
    thetas, vecs = eigen_symmetric(C)
    lambdas = 1.0 + 2.0 * thetas
    principal = int(np.argmax(np.abs(vecs.T @ (sigma / np.linalg.norm(sigma)))))
    return SynchronizedState(sigma, C, M, thetas, lambdas, vecs, principal)


class Verdict(str, Enum):
    NONDEGENERATE_SUFFICIENT = "nondegenerate_sufficient"
    NONDEGENERATE_SPECTRAL = "nondegenerate_spectral"
    DEGENERATE_RISK = "degenerate_risk"
    NO_SYNCHRONIZED_STATE = "no_synchronized_state"


@dataclass(frozen=True)
class SpectrumPolicy:
    """Where the excluded eigenvalues λ_m come from.

    mode "compute" solves the weighted problem for the cubic ground state in
    dimension N; "supplied" uses ``eigenvalues``; "none" refuses.
    """

    mode: str = "compute"
    N: int = 2
    sector_max: int = 3
    lambda_max: float = 10.0
    eigenvalues: tuple = ()

    def excluded(self, needed_up_to):
        if self.mode == "supplied":
            return tuple(sorted(self.eigenvalues))
        if self.mode == "compute":
            from .radial import shoot_ground_state
            from .spectrum import merged_spectrum
            gs = shoot_ground_state(self.N, 3.0)
            from .spectrum import SpectralQuery, sector_eigenvalues
            top = max(self.lambda_max, needed_up_to + 1.0)
            # lowest eigenvalue grows with the sector; add sectors until one is empty
            smax = self.sector_max
            while sector_eigenvalues(SpectralQuery(gs, smax + 1, 1, top)).eigenvalues:
                smax += 1
            return tuple(e.value for e in merged_spectrum(gs, smax, top))
        raise SpectrumUnavailable(
            "the weighted spectrum is needed for this coupling matrix;"
            " run with spectrum_policy=compute")


@dataclass
class NondegeneracyReport:
    verdict: Verdict
    sigma: list = field(default_factory=list)
    lambdas: list = field(default_factory=list)
    excluded_set: list = field(default_factory=list)
    margins: list = field(default_factory=list)
    path: str = ""
    collisions: list = field(default_factory=list)
    offending: list = field(default_factory=list)

    def to_dict(self):
        d = asdict(self)
        d["verdict"] = self.verdict.value
        return d


def _margin(lam, excluded):
    return min(abs(lam - x) for x in excluded) if excluded else math.inf


def check_nondegeneracy(B, spectrum_policy=None, margin_tol=MARGIN_TOL):
    """Run the Perron-Frobenius test, falling back to the spectral comparison.

    The positive-entry test is re-verified numerically: every secondary Λ must
    sit in (-1, 3) and away from 1 by more than ``margin_tol``. If that fails
    the spectral comparison decides.
    """
    if not isinstance(B, CouplingMatrix):
        B = CouplingMatrix(B)
    state = solve_sigma(B)
    if isinstance(state, NoSynchronizedState):
        return NondegeneracyReport(Verdict.NO_SYNCHRONIZED_STATE,
                                   lambdas=[], path="sign_failure",
                                   offending=list(state.offending))
    lambdas = [float(x) for x in state.lambdas]
    sigma = [float(x) for x in state.sigma]
    rest = [float(x) for x in state.secondary_lambdas]
    if abs(state.lambdas[state.principal_index] - 3.0) > 1e-10:
        raise ArithmeticError("principal eigenvalue of M differs from 3")

    path = "spectral"
    if B.all_positive():
        # Perron-Frobenius: simple Λ = 3, the others in (-1, 3) \ {1}
        pf_set = (1.0, 3.0)
        margins = [min(abs(x - 1.0), 3.0 - x) for x in rest]
        ok = all(-1.0 + margin_tol < x < 3.0 - margin_tol for x in rest) and \
            all(m > margin_tol for m in margins)
        if ok:
            return NondegeneracyReport(Verdict.NONDEGENERATE_SUFFICIENT, sigma, lambdas,
                                       list(pf_set), margins, "perron_frobenius")
        path = "perron_frobenius_uncertified->spectral"

    if not rest:
        return NondegeneracyReport(Verdict.NONDEGENERATE_SPECTRAL, sigma, lambdas, [], [],
                                   path)
    if spectrum_policy is None:
        spectrum_policy = SpectrumPolicy(mode="none")
    excluded = list(spectrum_policy.excluded(max(rest)))
    margins = [_margin(x, excluded) for x in rest]
    collisions = [x for x, m in zip(rest, margins) if m <= margin_tol]
    verdict = Verdict.DEGENERATE_RISK if collisions else Verdict.NONDEGENERATE_SPECTRAL
    return NondegeneracyReport(verdict, sigma, lambdas, excluded, margins, path, collisions)


@dataclass(frozen=True)
class Example1:
    admissible: bool
    sigma_squared: tuple
    sigma: tuple
    Lambda1: float
    Lambda2: float


def example1_closed_form(mu1, mu2, beta):
    """Two equations, β_11 = μ1, β_22 = μ2, β_12 = β."""
    if not (mu1 > 0 and mu2 > 0):
        raise ValueError("mu1 and mu2 must be positive")
    den = beta * beta - mu1 * mu2
    if den == 0:
        raise ZeroDivisionError("degenerate denominator: beta^2 = mu1*mu2")
    s1 = (beta - mu2) / den
    s2 = (beta - mu1) / den
    admissible = (-math.sqrt(mu1 * mu2) < beta < min(mu1, mu2)) or beta > max(mu1, mu2)
    sigma = (math.sqrt(s1), math.sqrt(s2)) if admissible else None
    return Example1(admissible, (s1, s2), sigma, 3.0, 3.0 - 2.0 * beta * (s1 + s2))


def example2_matrix(mu, beta):
    mu = np.asarray(mu, dtype=float)
    B = np.full((len(mu), len(mu)), float(beta))
    np.fill_diagonal(B, mu)
    return CouplingMatrix(B)


def example2_closed_form(mu, beta):
    """σ for β_ii = μ_i (strictly increasing) and a common β > μ_k off the diagonal."""
    mu = np.asarray(mu, dtype=float)
    if mu.ndim != 1 or mu.size < 1 or np.any(mu <= 0) or np.any(np.diff(mu) <= 0):
        raise ValueError("mu must be a strictly increasing positive vector")
    if not beta > mu[-1]:
        raise ValueError(f"beta = {beta} must exceed mu_k = {mu[-1]}")
    bracket = (mu - beta) * (1.0 + beta * np.sum(1.0 / (mu - beta)))
    if np.any(bracket <= 0):
        raise ValueError("closed form outside its domain: non-positive bracket")
    sigma = bracket ** -0.5
    B = example2_matrix(mu, beta).entries
    if np.max(np.abs(B @ sigma ** 2 - 1.0)) > 1e-10:
        raise ArithmeticError("closed-form amplitudes do not solve B sigma^2 = 1")
    return sigma
