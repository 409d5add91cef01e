"""Linearized radial problems around the ground state.

Solves -ΔS + S - q U^{p-1} S = g for radial S with S'(0) = 0 and S(r0) = 0.
The value S(r0) is an affine function of S(0), so one homogeneous shot and
one particular shot fix S(0) exactly. The same idea with k homogeneous shots
handles the coupled systems in :mod:`nlsnorm.concentration`.
"""

from dataclasses import dataclass
import logging
import math

import numpy as np

from . import _kernels as kern
from .radial import (GroundState, RadialProfile, check_exponent, radial_quadrature,
                     shoot_ground_state, surface_area)

__all__ = [
    "ResonanceError",
    "LinearizedProblem",
    "AlphaPoint",
    "SweepFailure",
    "moment_source",
    "shoot_affine",
    "solve_linearized_affine",
    "solve_vector_affine",
    "compute_alpha",
    "sweep_alpha",
    "write_sweep",
    "closed_form_z",
    "solve_z0",
    "linear_residual",
]

log = logging.getLogger(__name__)

R0_LEVEL = 1e-10
RESONANCE_TOL = 1e-12


class ResonanceError(ArithmeticError):
    """The truncation radius sits on a node of the homogeneous solution."""


@dataclass(frozen=True, eq=False)
class LinearizedProblem:
    ground: GroundState
    potential_coefficient: float
    source: RadialProfile
    r0: float = None

    def __post_init__(self):
        if self.r0 is None:
            object.__setattr__(self, "r0", self.ground.decay_radius(R0_LEVEL))
        if self.r0 > self.ground.grid.r_max + 1e-12:
            raise ValueError(
                f"r0 = {self.r0} lies beyond the ground-state grid ({self.ground.grid.r_max})")
        if self.source.grid != self.ground.grid:
            raise ValueError("source must live on the ground-state grid")

    @property
    def n0(self):
        return int(round(self.r0 / self.ground.grid.h))


@dataclass(frozen=True)
class AlphaPoint:
    N: int
    p: float
    alpha_radial: float
    alpha_full: float


@dataclass(frozen=True)
class SweepFailure:
    N: int
    p: float
    reason: str


def moment_source(ground, power=2, scale=1.0):
    """scale * r^power * U(r) on the ground grid, with its derivative."""
    r, U, dU = ground.r, ground.U, ground.dU
    vals = scale * r ** power * U
    ders = scale * (power * r ** max(power - 1, 0) * U + r ** power * dU) if power else scale * dU
    return RadialProfile(ground.grid, vals, ground.N, ders)


def _weight(ground):
    # U^{p-1} at nodes and half steps; U is positive on the whole grid
    U = ground.U
    U_mid = ground.profile.midpoints()
    e = ground.p - 1.0
    return np.abs(U) ** e, np.abs(U_mid) ** e


def _source_arrays(sources):
    g_node = np.stack([s.values for s in sources], axis=1)
    g_mid = np.stack([s.midpoints() for s in sources], axis=1)
    return np.ascontiguousarray(g_node), np.ascontiguousarray(g_mid)


def _integrate(ground, M, g_node, g_mid, y0, n):
    w_node, w_mid = _weight(ground)
    return kern.integrate_linear(float(ground.N), ground.grid.h, w_node, w_mid,
                                 np.ascontiguousarray(M, dtype=float), g_node, g_mid,
                                 np.asarray(y0, dtype=float), n)


def shoot_affine(problem, s0):
    """S(r0) for the initial value S(0) = s0 (the affine map being solved)."""
    g_node, g_mid = _source_arrays([problem.source])
    M = np.array([[problem.potential_coefficient]])
    Y, _ = _integrate(problem.ground, M, g_node, g_mid, [s0], problem.n0)
    return float(Y[-1, 0])


def solve_vector_affine(ground, M, sources, r0):
    """Radial solution of -ΔY + Y - U^{p-1} M Y = g with Y(r0) = 0.

    ``sources`` is a list of k profiles. Returns (Y, Y') on the ground grid,
    zero past r0, and the initial vector Y(0).
    """
    M = np.atleast_2d(np.asarray(M, dtype=float))
    k = M.shape[0]
    if len(sources) != k:
        raise ValueError(f"need {k} sources, got {len(sources)}")
    h = ground.grid.h
    n_full = ground.grid.n_steps
    r0_try = [r0, 0.9 * r0, 1.1 * r0]
    g_node, g_mid = _source_arrays(sources)
    zero_node = np.zeros_like(g_node)
    zero_mid = np.zeros_like(g_mid)
    last = None
    for r in r0_try:
        n0 = int(round(r / h))
        if n0 > n_full or n0 < 16:
            continue
        P, dP = _integrate(ground, M, g_node, g_mid, np.zeros(k), n0)
        H = np.empty((k, k))
        hom = []
        for j in range(k):
            e = np.zeros(k)
            e[j] = 1.0
            Yh, dYh = _integrate(ground, M, zero_node, zero_mid, e, n0)
            hom.append((Yh, dYh))
            H[:, j] = Yh[-1]
        scale = max(np.max(np.abs(Yh)) for Yh, _ in hom)
        sv = np.linalg.svd(H, compute_uv=False)
        if sv[-1] < RESONANCE_TOL * scale or sv[-1] == 0.0:
            last = r
            log.info("resonant truncation radius %.4f, retrying", r)
            continue
        s = -np.linalg.solve(H, P[-1])
        Y = P.copy()
        dY = dP.copy()
        for j, (Yh, dYh) in enumerate(hom):
            Y += s[j] * Yh
            dY += s[j] * dYh
        Y[-1] = 0.0
        Yf = np.zeros((n_full + 1, k))
        dYf = np.zeros((n_full + 1, k))
        Yf[: n0 + 1] = Y
        dYf[: n0 + 1] = dY
        return Yf, dYf, s
    raise ResonanceError(
        f"resonant truncation radius near r0 = {last if last is not None else r0:.4f},"
        " perturb r0")


def solve_linearized_affine(problem):
    """S = S0 + s0*h with s0 = -S0(r0)/h(r0); returned on the ground grid."""
    gs = problem.ground
    Y, dY, _ = solve_vector_affine(gs, [[problem.potential_coefficient]],
                                   [problem.source], problem.r0)
    return RadialProfile(gs.grid, Y[:, 0], gs.N, dY[:, 0])


def linear_residual(ground, q, S, g, r_stop=None):
    """max |S'' + (N-1)/r S' - S + q U^{p-1} S + g| over interior nodes.

    Central differences up to ``r_stop`` (default: where U falls below
    1e-6 U(0)). Closer to r0 the affine combination cancels two growing
    shots and S carries round-off of order eps * e^r, which the second
    difference amplifies by 1/h^2 without saying anything about the solve.
    """
    if r_stop is None:
        r_stop = ground.decay_radius(1e-6)
    nz = np.flatnonzero(S.values)
    n = min(int(r_stop / ground.grid.h), nz[-1]) if nz.size else 0
    if n < 3:
        return 0.0
    h, r, N = ground.grid.h, ground.r, ground.N
    f = S.values
    sl = slice(1, n - 1)
    d2 = (f[2:n] - 2 * f[1:n - 1] + f[: n - 2]) / h ** 2
    d1 = (f[2:n] - f[: n - 2]) / (2 * h)
    w = np.abs(ground.U[sl]) ** (ground.p - 1)
    res = d2 + (N - 1) / r[sl] * d1 - f[sl] + q * w * f[sl] + g.values[sl]
    return float(np.max(np.abs(res)))


def compute_alpha(N, p, ground=None, r0=None, **shoot_kw):
    """Radial and full-measure integral of U*S, S solving the |x|^2 U problem."""
    if ground is None:
        ground = shoot_ground_state(N, p, **shoot_kw)
    prob = LinearizedProblem(ground, ground.p, moment_source(ground), r0)
    S = solve_linearized_affine(prob)
    a = radial_quadrature(ground.profile.with_values(ground.U * S.values), 0)
    return AlphaPoint(N, float(p), a, surface_area(N) * a)


def _alpha_or_failure(args):
    N, p, kw = args
    try:
        return compute_alpha(N, p, **kw)
    except (ArithmeticError, RuntimeError, ValueError) as exc:
        return SweepFailure(N, p, f"{type(exc).__name__}: {exc}")


def sweep_alpha(N, p_min, p_max, n_points, workers=1, **kw):
    """alpha on a uniform p grid including both ends, ordered by p.

    Points that fail are returned as :class:`SweepFailure` entries in place.
    """
    if n_points <= 0:
        return []
    if not 1 < p_min <= p_max:
        raise ValueError("need 1 < p_min <= p_max")
    check_exponent(N, p_max)
    ps = [p_min] if n_points == 1 else list(np.linspace(p_min, p_max, n_points))
    jobs = [(N, float(p), kw) for p in ps]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(workers) as ex:
            return list(ex.map(_alpha_or_failure, jobs))
    return [_alpha_or_failure(j) for j in jobs]


def write_sweep(points, path, header=None):
    """Two-column TSV 'p<TAB>alpha_radial', failures as '#' comment lines."""
    lines = []
    if header:
        lines.append("# " + header)
    for pt in sorted(points, key=lambda x: x.p):
        if isinstance(pt, SweepFailure):
            lines.append(f"# failed p={pt.p!r}: {pt.reason}")
        else:
            lines.append(f"{pt.p!r}\t{pt.alpha_radial!r}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _require_cubic_plane(ground):
    if ground.N != 2 or not math.isclose(ground.p, 3.0):
        raise ValueError("this construction is specific to N = 2, p = 3")


def closed_form_z(ground, c):
    """z = -(c/2) (U + r U') using the integrator's derivative channel."""
    _require_cubic_plane(ground)
    r, U, dU = ground.r, ground.U, ground.dU
    vals = -0.5 * c * (U + r * dU)
    # (U + rU')' = 2U' + rU'', with U'' taken from the equation itself
    ddU = np.zeros_like(U)
    ddU[1:] = U[1:] - U[1:] ** 3 - dU[1:] / r[1:]
    ddU[0] = (U[0] - U[0] ** 3) / 2.0
    ders = -0.5 * c * (2 * dU + r * ddU)
    return RadialProfile(ground.grid, vals, 2, ders)


def solve_z0(ground, r0=None):
    """Radial solution of -Δz0 + z0 - 3U^2 z0 = |x|^2 U in R^2."""
    _require_cubic_plane(ground)
    prob = LinearizedProblem(ground, 3.0, moment_source(ground), r0)
    return solve_linearized_affine(prob)
