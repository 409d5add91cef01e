"""Radial grids, quadrature and the ground state of -ΔU + U = U^p.

The ground state is found by shooting on U(0): initial values that are too
small make the trajectory turn back up before reaching zero, values that are
too large make it cross zero. Bisection between the two classes recovers the
decaying solution, but only up to the radius where the unstable e^{r} mode
has amplified the last bit of round-off. Past that radius the shot is
restarted from the bisected state and the slope u'(r) is bisected instead,
which extends the profile stage by stage down to the requested tail level.
"""

from dataclasses import dataclass, field
from enum import Enum
import math

import numpy as np
from scipy.integrate import simpson
from scipy.special import gamma as gamma_fn

from . import _kernels as kern

__all__ = [
    "GroundStateError",
    "RadialGrid",
    "RadialProfile",
    "GroundState",
    "Outcome",
    "IVPResult",
    "surface_area",
    "critical_exponent",
    "check_exponent",
    "integrate_ivp",
    "shoot_ground_state",
    "radial_quadrature",
    "ode_residual",
]

MAX_DIM = 8


class GroundStateError(RuntimeError):
    """Raised when the shooting procedure cannot produce a ground state."""


@dataclass(frozen=True)
class RadialGrid:
    """Uniform nodes r_j = j*h, j = 0..n_steps, with h = r_max/n_steps."""

    r_max: float
    n_steps: int

    def __post_init__(self):
        if not self.r_max > 0:
            raise ValueError(f"r_max must be positive, got {self.r_max}")
        if self.n_steps < 16:
            raise ValueError(f"n_steps must be at least 16, got {self.n_steps}")

    @classmethod
    def from_step(cls, h, n_steps):
        return cls(h * n_steps, n_steps)

    @property
    def h(self):
        return self.r_max / self.n_steps

    @property
    def r(self):
        return np.arange(self.n_steps + 1) * self.h


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """A radial function sampled on a :class:`RadialGrid`.

    ``derivative`` is the exact derivative channel of the integrator when the
    profile came out of an RK4 run; it is used for Hermite interpolation at
    half steps and wherever U' is needed.
    """

    grid: RadialGrid
    values: np.ndarray
    dim: int
    derivative: np.ndarray = None
    decaying: bool = False
    tail_tol: float = 1e-6

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.shape != (self.grid.n_steps + 1,):
            raise ValueError(
                f"expected {self.grid.n_steps + 1} samples, got {values.shape}")
        if not 1 <= self.dim <= MAX_DIM:
            raise ValueError(f"dimension must be in 1..{MAX_DIM}, got {self.dim}")
        if not np.all(np.isfinite(values)):
            raise ValueError("profile contains non-finite values")
        if self.derivative is not None:
            d = np.asarray(self.derivative, dtype=float)
            if d.shape != values.shape:
                raise ValueError("derivative must match values in shape")
            object.__setattr__(self, "derivative", d)
        if self.decaying:
            peak = np.max(np.abs(values))
            if abs(values[-1]) > self.tail_tol * peak:
                raise ValueError(
                    f"profile declared decaying but |f(r_max)| = {abs(values[-1]):.3e}"
                    f" exceeds {self.tail_tol:g} * max|f|")

    @property
    def r(self):
        return self.grid.r

    def midpoints(self):
        """Values at r_j + h/2, cubic Hermite when the derivative is known."""
        f = self.values
        if self.derivative is None:
            # cubic through four neighbours; one-sided at the ends
            mid = 0.5 * (f[:-1] + f[1:])
            if len(f) >= 4:
                inner = (-f[:-3] + 9 * f[1:-2] + 9 * f[2:-1] - f[3:]) / 16
                mid[1:-1] = inner
            return mid
        d = self.derivative
        return 0.5 * (f[:-1] + f[1:]) + self.grid.h * (d[:-1] - d[1:]) / 8.0

    def with_values(self, values, derivative=None, decaying=False):
        return RadialProfile(self.grid, values, self.dim, derivative, decaying,
                             self.tail_tol)

    def truncated(self, n_steps):
        """The same samples restricted to the first ``n_steps`` intervals."""
        grid = RadialGrid.from_step(self.grid.h, n_steps)
        d = None if self.derivative is None else self.derivative[: n_steps + 1]
        return RadialProfile(grid, self.values[: n_steps + 1], self.dim, d)


@dataclass(frozen=True, eq=False)
class GroundState:
    profile: RadialProfile
    N: int
    p: float
    u0: float
    gamma: float
    gamma_tilde: float
    radial_mass: float
    bracket_width: float = 0.0
    stage_radii: tuple = field(default=())

    @property
    def grid(self):
        return self.profile.grid

    @property
    def r(self):
        return self.profile.r

    @property
    def U(self):
        return self.profile.values

    @property
    def dU(self):
        return self.profile.derivative

    def decay_radius(self, level):
        """First node radius where U < level * U(0)."""
        idx = np.flatnonzero(self.U < level * self.u0)
        if idx.size == 0:
            raise GroundStateError(
                f"U never drops below {level:g} * U(0) on [0, {self.grid.r_max}]")
        return idx[0] * self.grid.h


class Outcome(Enum):
    CROSSES_ZERO = "crosses_zero"
    STAYS_POSITIVE = "stays_positive"
    DIVERGES = "diverges"


@dataclass(frozen=True, eq=False)
class IVPResult:
    profile: RadialProfile
    outcome: Outcome
    r_event: float = math.inf


def surface_area(N):
    """Measure of the unit sphere S^{N-1} in R^N (2 for N = 1)."""
    if not 1 <= N <= MAX_DIM:
        raise ValueError(f"dimension must be in 1..{MAX_DIM}, got {N}")
    return 2.0 * math.pi ** (N / 2) / gamma_fn(N / 2)


def critical_exponent(N):
    """(N+2)/(N-2) for N >= 3, infinity otherwise."""
    return math.inf if N <= 2 else (N + 2) / (N - 2)


def check_exponent(N, p):
    if not 1 <= N <= MAX_DIM:
        raise ValueError(f"dimension must be in 1..{MAX_DIM}, got {N}")
    if not p > 1:
        raise ValueError(f"exponent must exceed 1, got p = {p}")
    if not p < critical_exponent(N):
        raise ValueError(
            f"p = {p} is not subcritical for N = {N} (need p < {critical_exponent(N):g})")


def _taylor_start(N, p, u0, h):
    # u = u0 + a r^2 + b r^4 solves the ODE to O(r^4) at the origin
    f0 = u0 - u0 ** p
    df0 = 1.0 - p * u0 ** (p - 1.0)
    a = f0 / (2.0 * N)
    b = df0 * a / (4.0 * (N + 2.0))
    return u0 + a * h * h + b * h ** 4, 2.0 * a * h + 4.0 * b * h ** 3


def integrate_ivp(N, p, u0, grid):
    """Integrate u'' + (N-1)/r u' = u - u^p, u(0) = u0, u'(0) = 0.

    Returns the profile up to the first event together with its
    classification: the first zero crossing (localized linearly inside the
    step), divergence past 10*max(u0, 1), or survival to ``grid.r_max``.
    """
    if not u0 > 0:
        raise ValueError("u0 must be positive")
    h, n = grid.h, grid.n_steps
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    u[0] = u0
    u1, v1 = _taylor_start(N, p, u0, h)
    code, j = kern.shoot_nonlinear(float(N), float(p), h, 1, u1, v1, n,
                                   10.0 * max(u0, 1.0), False, u, v)
    if code == kern.END:
        prof = RadialProfile(grid, u, N, v)
        return IVPResult(prof, Outcome.STAYS_POSITIVE)
    if code == kern.CROSS:
        r_star = (j - 1) * h + h * u[j - 1] / (u[j - 1] - u[j])
        keep = max(j - 1, 16)
        prof = RadialProfile(RadialGrid.from_step(h, keep), u[: keep + 1], N,
                             v[: keep + 1])
        return IVPResult(prof, Outcome.CROSSES_ZERO, r_star)
    keep = max(j - 1, 16)
    vals = np.nan_to_num(u[: keep + 1])
    ders = np.nan_to_num(v[: keep + 1])
    prof = RadialProfile(RadialGrid.from_step(h, keep), vals, N, ders)
    return IVPResult(prof, Outcome.DIVERGES, j * h)


class _Shooter:
    """Shared buffers and classification for the staged bisection."""

    def __init__(self, N, p, h, n_cap):
        self.N, self.p, self.h = float(N), float(p), h
        self.n_cap = n_cap
        self.u = np.zeros(n_cap + 1)
        self.v = np.zeros(n_cap + 1)

    def shot(self, j_start, u_start, v_start, cap, span):
        n_max = min(j_start + span, self.n_cap)
        code, j = kern.shoot_nonlinear(self.N, self.p, self.h, j_start, u_start,
                                       v_start, n_max, cap, True, self.u, self.v)
        return code, j

    @staticmethod
    def overshoots(code):
        return code in (kern.CROSS, kern.DIVERGE)


def _bisect(classify, s_under, s_over, max_iter=200):
    """Bisect to adjacent floats between an undershooting and overshooting value."""
    for _ in range(max_iter):
        mid = 0.5 * (s_under + s_over)
        if mid in (s_under, s_over):
            break
        if classify(mid):
            s_over = mid
        else:
            s_under = mid
    return s_under, s_over


def _find_u0_bracket(classify, lo, hi, u0_max):
    if classify(lo):
        # the lower end already overshoots: scan upward from just above 1
        raise GroundStateError("no ground-state bracket: lower end overshoots")
    while not classify(hi):
        lo = hi
        hi *= 2.0
        if hi > u0_max:
            raise GroundStateError(f"no ground-state bracket in [1, {u0_max:g}]")
    return lo, hi


def shoot_ground_state(N, p, tol=1e-10, h=1e-3, tail_tol=1e-12, sep_tol=1e-9,
                       bracket=(1.0 + 1e-6, 10.0), u0_max=1e6, r_cap=400.0):
    """Positive radial decaying solution of -ΔU + U = U^p in R^N.

    Parameters
    ----------
    N : int
        Dimension, 1..8.
    p : float
        Exponent, 1 < p < (N+2)/(N-2) for N >= 3.
    tol : float
        Required width of the final U(0) bracket. Bisection always runs to
        adjacent floats; ``tol`` is checked, not targeted.
    h : float
        RK4 step.
    tail_tol : float
        The profile is extended until U(r_max) < tail_tol * U(0).
    sep_tol : float
        Relative disagreement between the two bracketing shots at which a
        stage is cut and restarted.

    Returns
    -------
    GroundState
    """
    check_exponent(N, p)
    if not tol > 0:
        raise ValueError("tol must be positive")
    n_cap = int(round(r_cap / h))
    sh = _Shooter(N, p, h, n_cap)
    span = int(round(60.0 / h))

    def start(u0):
        return _taylor_start(N, p, u0, h)

    def classify_u0(u0):
        code, _ = sh.shot(1, *start(u0), 10.0 * max(u0, 1.0), span)
        return sh.overshoots(code)

    lo, hi = _find_u0_bracket(classify_u0, bracket[0], bracket[1], u0_max)
    lo, hi = _bisect(classify_u0, lo, hi)
    if hi - lo > tol:
        raise GroundStateError(f"U(0) bracket width {hi - lo:.3e} exceeds tol {tol:g}")
    u0 = 0.5 * (lo + hi)
    cap = 10.0 * max(u0, 1.0)

    U = np.zeros(n_cap + 1)
    dU = np.zeros(n_cap + 1)
    U[0] = u0

    def run(j0, us, vs):
        code, j = sh.shot(j0, us, vs, cap, span)
        return code, j, sh.u[: j + 1].copy(), sh.v[: j + 1].copy()

    # stage 1 pair of trajectories
    _, j_a, ua, va = run(1, *start(lo))
    _, j_b, ub, vb = run(1, *start(hi))
    j0 = 1
    stage_radii = []
    level = tail_tol * u0
    for _ in range(200):
        j_hi = min(j_a, j_b)
        seg = slice(j0, j_hi + 1)
        um = 0.5 * (ua[seg] + ub[seg])
        vm = 0.5 * (va[seg] + vb[seg])
        gap = np.abs(ua[seg] - ub[seg])
        bad = np.flatnonzero(gap > sep_tol * np.abs(um))
        cut = (bad[0] - 1) if bad.size else len(um) - 1
        small = np.flatnonzero(um[: cut + 1] < level)
        if small.size:
            j_end = j0 + small[0]
            U[j0: j_end + 1] = um[: small[0] + 1]
            dU[j0: j_end + 1] = vm[: small[0] + 1]
            break
        if cut < 1:
            raise GroundStateError(f"shooting stalled at r = {j0 * h:.3f}")
        j_m = j0 + cut
        U[j0: j_m + 1] = um[: cut + 1]
        dU[j0: j_m + 1] = vm[: cut + 1]
        if j_m >= n_cap - 1:
            raise GroundStateError(f"tail did not reach {tail_tol:g} * U(0) before r = {r_cap}")
        stage_radii.append(j_m * h)
        u_m, v_m = U[j_m], dU[j_m]

        def classify_v(vs, j_m=j_m, u_m=u_m):
            code, _ = sh.shot(j_m, u_m, vs, cap, span)
            return sh.overshoots(code)

        dv = 1e-7 * abs(v_m) + 1e-300
        for _ in range(40):
            v_under, v_over = v_m + dv, v_m - dv
            if not classify_v(v_under) and classify_v(v_over):
                break
            dv *= 4.0
        else:
            raise GroundStateError(f"no slope bracket at r = {j_m * h:.3f}")
        v_under, v_over = _bisect(classify_v, v_under, v_over)
        _, j_a, ua, va = run(j_m, u_m, v_under)
        _, j_b, ub, vb = run(j_m, u_m, v_over)
        j0 = j_m
    else:
        raise GroundStateError("too many shooting stages")

    grid = RadialGrid.from_step(h, j_end)
    prof = RadialProfile(grid, U[: j_end + 1].copy(), N, dU[: j_end + 1].copy(),
                         decaying=True, tail_tol=tail_tol)
    omega = surface_area(N)
    radial_mass = radial_quadrature(prof, 0, square=True)
    gamma_tilde = omega * radial_quadrature(prof, 2, square=True)
    return GroundState(prof, N, float(p), float(u0), omega * radial_mass, gamma_tilde,
                       radial_mass, hi - lo, tuple(stage_radii))


def radial_quadrature(f, weight_power=0, square=False):
    """Composite Simpson value of the integral of f(r) r^(N-1+m) over the grid.

    With ``square=True`` the integrand uses f(r)^2. The tail beyond r_max is
    neglected.
    """
    vals = f.values ** 2 if square else f.values
    r = f.r
    expo = f.dim - 1 + weight_power
    w = r ** expo if expo != 0 else np.ones_like(r)
    return float(simpson(vals * w, x=r))


def ode_residual(gs):
    """Pointwise |u'' + (N-1)/r u' - u + u^p| / max(1, u^p) at interior nodes.

    Derivatives are central differences of the stored samples.
    """
    U, h, r = gs.U, gs.grid.h, gs.r
    d2 = (U[2:] - 2 * U[1:-1] + U[:-2]) / h ** 2
    d1 = (U[2:] - U[:-2]) / (2 * h)
    ui = U[1:-1]
    upow = np.abs(ui) ** gs.p
    res = d2 + (gs.N - 1) / r[1:-1] * d1 - ui + upow
    return np.abs(res) / np.maximum(1.0, upow)
