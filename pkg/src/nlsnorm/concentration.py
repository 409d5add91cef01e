"""Global potential, correction profiles and mass asymptotics.

Γ(x) = γ Σ σ_i² V_i(x) decides where a normalized solution concentrates, and
μ0 = γ Σ σ_i² is the limiting mass. In the plane (N = 2) the first-order
mass correction vanishes identically (Ξ = 0) and the sign of α ΔΓ(0)
decides on which side of μ0 solutions exist.
"""

from dataclasses import dataclass
import json
import math

import numpy as np

from .linearized import (compute_alpha, moment_source, solve_linearized_affine,
                         solve_vector_affine, solve_z0, LinearizedProblem,
                         linear_residual)
from .radial import GroundState, RadialProfile, radial_quadrature, surface_area
from .synchronized import SynchronizedState

__all__ = [
    "Polynomial",
    "PotentialModel",
    "GlobalPotential",
    "CriticalPoint",
    "CorrectionZ",
    "UpsilonCheck",
    "MassAsymptotics",
    "CriticalPrediction",
    "load_potential_model",
    "potential_model_from_dict",
    "build_global_potential",
    "find_critical_point",
    "mass_threshold",
    "solve_correction_Z",
    "compute_Xi",
    "compute_upsilon",
    "predict_noncritical",
    "predict_critical",
    "predict_critical_gap",
    "predict_tau_critical",
    "regime_of",
]

FD_GRAD = 1e-6
FD_HESS = 1e-4
FD_THIRD = 1e-3


class Polynomial:
    """Sparse multivariate polynomial, terms as {exponent tuple: coefficient}."""

    def __init__(self, terms, N):
        self.N = N
        self.terms = {}
        for exps, c in dict(terms).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != N or min(exps, default=0) < 0:
                raise ValueError(f"bad exponent tuple {exps} for N = {N}")
            if c != 0:
                self.terms[exps] = self.terms.get(exps, 0.0) + float(c)

    @classmethod
    def quadratic(cls, coeffs, offset=0.0):
        N = len(coeffs)
        terms = {tuple(2 if i == j else 0 for i in range(N)): a for j, a in enumerate(coeffs)}
        if offset:
            terms[(0,) * N] = offset
        return cls(terms, N)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return float(sum(c * np.prod(x ** np.array(e)) for e, c in self.terms.items()))

    def diff(self, j):
        out = {}
        for e, c in self.terms.items():
            if e[j]:
                f = list(e)
                f[j] -= 1
                out[tuple(f)] = out.get(tuple(f), 0.0) + c * e[j]
        return Polynomial(out, self.N)

    def grad(self, x):
        return np.array([self.diff(j)(x) for j in range(self.N)])

    def hessian(self, x):
        return np.array([[self.diff(i).diff(j)(x) for j in range(self.N)]
                         for i in range(self.N)])

    def grad_laplacian(self, x):
        lap = None
        for i in range(self.N):
            d = self.diff(i).diff(i)
            lap = d if lap is None else Polynomial({**_merge(lap.terms, d.terms)}, self.N)
        return lap.grad(x)


def _merge(a, b):
    out = dict(a)
    for e, c in b.items():
        out[e] = out.get(e, 0.0) + c
    return out


@dataclass(frozen=True, eq=False)
class PotentialModel:
    """k scalar potentials on R^N.

    ``evaluators`` are callables of a length-N array. When every evaluator is a
    :class:`Polynomial`, derivatives are analytic; otherwise they come from
    central differences. ``quadratic_coeffs`` (shape k x N) is set for models
    of the form V_i(x) = Σ_j a_j^(i) x_j² near the critical point.
    """

    N: int
    evaluators: tuple
    quadratic_coeffs: np.ndarray = None

    @property
    def k(self):
        return len(self.evaluators)

    @property
    def derivative_mode(self):
        if all(isinstance(v, Polynomial) for v in self.evaluators):
            return "analytic-supplied"
        return "finite-difference"

    @classmethod
    def quadratic(cls, coeffs, offsets=None):
        a = np.atleast_2d(np.asarray(coeffs, dtype=float))
        offs = np.zeros(a.shape[0]) if offsets is None else np.asarray(offsets, float)
        polys = tuple(Polynomial.quadratic(row, c) for row, c in zip(a, offs))
        return cls(a.shape[1], polys, a if not np.any(offs) else None)

    @classmethod
    def polynomial(cls, N, term_lists):
        return cls(N, tuple(Polynomial({tuple(e): c for c, e in terms}, N)
                            for terms in term_lists))

    def values_at(self, x):
        return np.array([v(x) for v in self.evaluators])


def potential_model_from_dict(doc):
    """Build a model from {"N", "k", "kind": "quadratic"|"polynomial", ...}."""
    N, k, kind = int(doc["N"]), int(doc["k"]), doc["kind"]
    if kind == "quadratic":
        model = PotentialModel.quadratic(doc["coefficients"], doc.get("offsets"))
    elif kind == "polynomial":
        lists = [[(t["coef"], t["exponents"]) for t in pot] for pot in doc["potentials"]]
        model = PotentialModel.polynomial(N, lists)
    else:
        raise ValueError(f"unknown potential kind {kind!r}")
    if model.N != N or model.k != k:
        raise ValueError(f"declared N={N}, k={k} but the terms give N={model.N}, k={model.k}")
    return model


def load_potential_model(path):
    with open(path, encoding="utf-8") as fh:
        return potential_model_from_dict(json.load(fh))


def _fd_grad(f, x, h):
    g = np.empty(len(x))
    for j in range(len(x)):
        e = np.zeros(len(x))
        e[j] = h
        g[j] = (f(x + e) - f(x - e)) / (2 * h)
    return g


def _fd_hessian_step(f, x, h):
    n = len(x)
    H = np.empty((n, n))
    f0 = f(x)
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = h
        H[i, i] = (f(x + ei) - 2 * f0 + f(x - ei)) / h ** 2
        for j in range(i + 1, n):
            ej = np.zeros(n)
            ej[j] = h
            H[i, j] = H[j, i] = (f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej)
                                 + f(x - ei - ej)) / (4 * h * h)
    return H


def _fd_hessian(f, x, h):
    # Richardson on the h^2 term of the central stencils
    return (4 * _fd_hessian_step(f, x, h / 2) - _fd_hessian_step(f, x, h)) / 3


@dataclass(frozen=True, eq=False)
class GlobalPotential:
    gamma: float
    sigma: np.ndarray
    potentials: PotentialModel

    @property
    def N(self):
        return self.potentials.N

    @property
    def weights(self):
        return self.gamma * self.sigma ** 2

    def __call__(self, x):
        return float(self.weights @ self.potentials.values_at(np.asarray(x, float)))

    def _analytic(self):
        return self.potentials.derivative_mode == "analytic-supplied"

    def grad(self, x):
        x = np.asarray(x, float)
        if self._analytic():
            return sum(w * v.grad(x) for w, v in zip(self.weights, self.potentials.evaluators))
        return _fd_grad(self, x, FD_GRAD)

    def hessian(self, x):
        x = np.asarray(x, float)
        if self._analytic():
            return sum(w * v.hessian(x) for w, v in zip(self.weights, self.potentials.evaluators))
        return _fd_hessian(self, x, FD_HESS)

    def laplacian(self, x):
        return float(np.trace(self.hessian(x)))

    def grad_laplacian(self, x):
        """∂_j ΔΓ(x), j = 1..N."""
        x = np.asarray(x, float)
        if self._analytic():
            return sum(w * v.grad_laplacian(x)
                       for w, v in zip(self.weights, self.potentials.evaluators))

        def lap(y):
            return float(np.trace(_fd_hessian(self, y, FD_THIRD)))

        return _fd_grad(lap, x, FD_THIRD)


def build_global_potential(ground, sync, potentials):
    """Γ = γ Σ σ_i² V_i. ``ground`` may be a GroundState or γ itself."""
    gamma = ground.gamma if isinstance(ground, GroundState) else float(ground)
    sigma = sync.sigma if isinstance(sync, SynchronizedState) else np.atleast_1d(
        np.asarray(sync, float))
    if len(sigma) != potentials.k:
        raise ValueError(f"{len(sigma)} amplitudes but {potentials.k} potentials")
    return GlobalPotential(gamma, np.asarray(sigma, float), potentials)


@dataclass(frozen=True)
class CriticalPoint:
    xi0: np.ndarray
    nondegenerate: bool
    hessian_eigenvalues: np.ndarray
    iterations: int


def find_critical_point(gp, x_start, max_iter=200, grad_tol=1e-10, eig_tol=1e-8):
    """Newton iteration on ∇Γ.

    Stops once the gradient is below ``grad_tol`` and the Newton step has
    also become negligible, so that a degenerate point is approached far
    enough for its vanishing curvature to show. A singular Hessian triggers
    a few gradient steps before Newton resumes.
    """
    x = np.asarray(x_start, dtype=float).copy()
    for it in range(1, max_iter + 1):
        g = gp.grad(x)
        H = gp.hessian(x)
        singular = np.linalg.cond(H) > 1e14
        if singular and np.linalg.norm(g) <= grad_tol:
            break
        try:
            if singular:
                raise np.linalg.LinAlgError
            step = np.linalg.solve(H, g)
        except np.linalg.LinAlgError:
            for _ in range(20):
                x = x - 1e-2 * gp.grad(x)
            continue
        x = x - step
        if np.linalg.norm(gp.grad(x)) <= grad_tol and np.linalg.norm(step) <= grad_tol * (
                1.0 + np.linalg.norm(x)):
            break
    else:
        if np.linalg.norm(gp.grad(x)) > grad_tol:
            raise ArithmeticError(f"Newton did not converge; last iterate {x}")
    eig = np.linalg.eigvalsh(gp.hessian(x))
    return CriticalPoint(x, bool(np.min(np.abs(eig)) > eig_tol), eig, it)


def mass_threshold(ground, sigma):
    """μ0 = γ Σ σ_i²."""
    sigma = sigma.sigma if isinstance(sigma, SynchronizedState) else np.asarray(sigma, float)
    return float(ground.gamma * np.sum(sigma ** 2))


@dataclass(frozen=True, eq=False)
class CorrectionZ:
    Z: tuple
    z: RadialProfile
    z_direct: RadialProfile
    equivalence_gap: float
    residual: float


def _check_cubic(ground):
    if not math.isclose(ground.p, 3.0):
        raise ValueError("the coupled correction system is defined for p = 3")


def solve_correction_Z(ground, sync, v_at_xi0, r0=None):
    """Radial Z_i of -ΔZ_i + Z_i - Σ_j β_ij (U_j² Z_i + 2 U_i U_j Z_j) = V_i(ξ0) U_i.

    With U_i = σ_i U the left side is -ΔZ + Z - U² M Z, M = I + 2C, which is
    solved by k-dimensional affine shooting. The combination z = Σ σ_i Z_i is
    compared with an independent scalar solve of -Δz + z - 3U²z = (Σ σ_i² V_i) U.
    """
    _check_cubic(ground)
    v = np.atleast_1d(np.asarray(v_at_xi0, dtype=float))
    sigma = sync.sigma
    if len(v) != len(sigma):
        raise ValueError("v_at_xi0 must have one entry per component")
    if r0 is None:
        r0 = ground.decay_radius(1e-10)
    sources = [ground.profile.with_values(vi * si * ground.U, vi * si * ground.dU)
               for vi, si in zip(v, sigma)]
    Y, dY, _ = solve_vector_affine(ground, sync.M, sources, r0)
    Z = tuple(RadialProfile(ground.grid, Y[:, i], ground.N, dY[:, i]) for i in range(len(v)))
    zv = Y @ sigma
    z = RadialProfile(ground.grid, zv, ground.N, dY @ sigma)
    c = float(np.sum(sigma ** 2 * v))
    src = ground.profile.with_values(c * ground.U, c * ground.dU)
    z_direct = solve_linearized_affine(LinearizedProblem(ground, 3.0, src, r0))
    gap = float(np.max(np.abs(zv - z_direct.values)))
    # residual relative to the source size, so it does not scale with σ and V
    res = linear_residual(ground, 3.0, z, src) / max(1.0, float(np.max(np.abs(src.values))))
    return CorrectionZ(Z, z, z_direct, gap, res)


def compute_Xi(ground, sync, v_at_xi0, r0=None):
    """Ξ = Σ σ_i ∫ U Z_i dx over R^N."""
    v = np.atleast_1d(np.asarray(v_at_xi0, dtype=float))
    if not np.any(v):
        return 0.0
    corr = solve_correction_Z(ground, sync, v, r0)
    prof = ground.profile.with_values(ground.U * corr.z.values)
    return surface_area(ground.N) * radial_quadrature(prof, 0)


@dataclass(frozen=True)
class UpsilonCheck:
    upsilon: float
    alpha_from_z0: float
    alpha_full: float
    delta_gamma: float
    coefficient_sum: float
    rhs: float
    identity_gap: float
    laplacian_gap: float


def compute_upsilon(ground, sync, quadratic_coeffs, alpha_full=None, potentials=None):
    """Both sides of the Υ identity in the plane.

    Left: Υ = Σ_j (Σ_ℓ σ_ℓ² a_j^(ℓ)) ∫ U z_j*, with ∫ U z_j* = ½ ∫ U z0 and
    z0 solved here. Right: α ΔΓ(0) / (4γ), with α from :func:`compute_alpha`
    (or supplied) and ΔΓ(0) from the Hessian of Γ built on the quadratic
    potentials. ``laplacian_gap`` checks ΔΓ(0) = 2γ Σ σ_ℓ² (a_1 + a_2).
    """
    if quadratic_coeffs is None:
        raise ValueError("critical regime requires the quadratic coefficients a_j^(i)")
    if ground.N != 2 or not math.isclose(ground.p, 3.0):
        raise ValueError("the critical-regime identity is stated for N = 2, p = 3")
    a = np.atleast_2d(np.asarray(quadratic_coeffs, dtype=float))
    sigma = sync.sigma if isinstance(sync, SynchronizedState) else np.asarray(sync, float)
    if a.shape != (len(sigma), 2):
        raise ValueError(f"expected coefficients of shape ({len(sigma)}, 2), got {a.shape}")
    z0 = solve_z0(ground)
    alpha_z0 = surface_area(2) * radial_quadrature(ground.profile.with_values(ground.U * z0.values))
    sums = (sigma ** 2) @ a
    upsilon = float(np.sum(sums) * 0.5 * alpha_z0)
    if alpha_full is None:
        alpha_full = compute_alpha(2, 3.0, ground=ground).alpha_full
    model = potentials if potentials is not None else PotentialModel.quadratic(a)
    gp = build_global_potential(ground, sigma, model)
    dgamma = gp.laplacian(np.zeros(2))
    rhs = alpha_full * dgamma / (4.0 * ground.gamma)
    expected_lap = 2.0 * ground.gamma * float(np.sum(sums))
    scale = max(abs(upsilon), abs(rhs))
    gap = abs(upsilon - rhs) / scale if scale > 0 else 0.0
    lscale = max(abs(dgamma), abs(expected_lap))
    lgap = abs(dgamma - expected_lap) / lscale if lscale > 0 else 0.0
    return UpsilonCheck(upsilon, alpha_z0, alpha_full, dgamma, float(np.sum(sums)), rhs,
                        gap, lgap)


@dataclass(frozen=True)
class MassAsymptotics:
    mu0: float
    regime: str
    alpha_full: float = None
    delta_gamma: float = None

    def __post_init__(self):
        if not self.mu0 > 0:
            raise ValueError("mu0 must be positive")


def regime_of(N):
    return {1: "subcritical", 2: "critical", 3: "supercritical"}[N]


def predict_noncritical(N, mu, mu0):
    """Leading-order inversion of μ = ε^(N-2) μ0: returns (ε, λ = ε^-2).

    N = 1 needs μ > μ0 and N = 3 needs 0 < μ < μ0, so that ε < 1.
    """
    if N == 1:
        if not mu > mu0:
            raise ValueError("N = 1 requires mu > mu0")
    elif N == 3:
        if not 0 < mu < mu0:
            raise ValueError("N = 3 requires 0 < mu < mu0")
    else:
        raise ValueError("the non-critical regime is N = 1 or N = 3")
    eps = (mu / mu0) ** (1.0 / (N - 2))
    return eps, eps ** -2


@dataclass(frozen=True)
class CriticalPrediction:
    admissible: bool
    epsilon: float = None
    lam: float = None
    reason: str = ""


def predict_critical(mu, mu0, alpha_full, delta_gamma):
    """ε = ((μ0 - μ)/(α ΔΓ))^(1/4) and λ = ε^-2 on the admissible side.

    Solutions exist below μ0 when α ΔΓ > 0 and above it when α ΔΓ < 0.
    """
    return predict_critical_gap(mu0 - mu, alpha_full, delta_gamma)


def predict_critical_gap(gap, alpha_full, delta_gamma):
    """Same map fed the mass gap μ0 - μ directly, free of cancellation."""
    prod = alpha_full * delta_gamma
    if prod == 0:
        raise ValueError("alpha * delta_gamma must be nonzero")
    if gap == 0 or math.copysign(1.0, gap) != math.copysign(1.0, prod):
        side = "below" if prod > 0 else "above"
        return CriticalPrediction(False, reason=f"mass must lie {side} mu0 when"
                                  f" alpha*delta_gamma = {prod:.6g}")
    ratio = gap / prod
    return CriticalPrediction(True, ratio ** 0.25, math.sqrt(1.0 / ratio))


def predict_tau_critical(gp, ground, xi0=None):
    """τ_j = -(γ̃ / (2Nγ)) ∂_j ΔΓ(ξ0) / ∂_j² Γ(ξ0)."""
    N = gp.N
    x = np.zeros(N) if xi0 is None else np.asarray(xi0, float)
    diag = np.diag(gp.hessian(x))
    if np.any(np.abs(diag) < 1e-12):
        raise ValueError("a diagonal Hessian entry of Gamma vanishes at xi0")
    return -(ground.gamma_tilde / (2 * N * ground.gamma)) * gp.grad_laplacian(x) / diag
