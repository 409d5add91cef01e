"""Eigenvalues of -Δψ + ψ = λ U² ψ, one angular sector at a time.

Writing ψ(x) = r^ℓ φ(r) Y_ℓ(θ) turns sector ℓ in R^N into a regular radial
problem φ'' + (N+2ℓ-1)/r φ' = (1 - λU²) φ, i.e. the ℓ = 0 problem in
dimension N + 2ℓ, with φ(0) = 1. By Sturm comparison the number of sign
changes of φ on (0, r_max) counts the eigenvalues below λ, so each one is
bracketed by bisection on that count and then polished with Brent's method
on φ(r_max).
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy.ndimage import maximum_filter1d
from scipy.optimize import brentq

from . import _kernels as kern

__all__ = [
    "SpectralQuery",
    "SectorSpectrum",
    "MergedEigenvalue",
    "sector_eigenvalues",
    "sector_eigenfunction",
    "sector_residual",
    "count_sign_changes",
    "eigenfunction_nodes",
    "merged_spectrum",
]

BISECT_TOL = 1e-8
MERGE_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class SpectralQuery:
    ground: object
    sector: int = 0
    how_many: int = 1
    lambda_max: float = 10.0

    def __post_init__(self):
        if self.sector < 0 or int(self.sector) != self.sector:
            raise ValueError(f"sector must be a non-negative integer, got {self.sector}")
        if not self.lambda_max > 0:
            raise ValueError("lambda_max must be positive")
        if not math.isclose(self.ground.p, 3.0):
            raise ValueError("the weighted problem is defined for the cubic ground state")


@dataclass(frozen=True)
class SectorSpectrum:
    sector: int
    eigenvalues: tuple
    complete: bool


@dataclass(frozen=True)
class MergedEigenvalue:
    value: float
    sectors: tuple


def _weights(ground):
    U_mid = ground.profile.midpoints()
    return ground.U ** 2, U_mid ** 2


def _shooter(ground, sector):
    dim = float(ground.N + 2 * sector)
    w_node, w_mid = _weights(ground)
    h, n = ground.grid.h, ground.grid.n_steps

    def shot(lam):
        return kern.weighted_shot(dim, h, lam, w_node, w_mid, n)

    return shot


def sector_eigenvalues(query):
    """Lowest ``how_many`` eigenvalues below ``lambda_max`` in one sector."""
    shot = _shooter(query.ground, query.sector)

    def count(lam):
        return shot(lam)[1]

    available = count(query.lambda_max)
    want = min(query.how_many, available)
    found = []
    lo_prev = 0.0
    for m in range(1, want + 1):
        lo, hi = lo_prev, query.lambda_max
        while hi - lo > BISECT_TOL:
            mid = 0.5 * (lo + hi)
            if count(mid) >= m:
                hi = mid
            else:
                lo = mid
        phi_lo, phi_hi = shot(lo)[0][-1], shot(hi)[0][-1]
        if phi_lo * phi_hi < 0:
            lam = brentq(lambda x: shot(x)[0][-1], lo, hi, xtol=1e-14, rtol=1e-15)
        else:
            lam = 0.5 * (lo + hi)
        found.append(lam)
        lo_prev = hi
    return SectorSpectrum(query.sector, tuple(found), want == query.how_many)


def sector_eigenfunction(ground, sector, lam):
    """ψ(r) = r^ℓ φ(r) on the ground grid, scaled to max |ψ| = 1."""
    phi, _ = _shooter(ground, sector)(lam)
    psi = ground.r ** sector * phi if sector else phi.copy()
    return psi / np.max(np.abs(psi))


def sector_residual(ground, sector, lam, r_stop=None):
    """Relative residual of the sector ODE for (λ, ψ), central differences.

    The check runs on φ = ψ / r^ℓ, which satisfies the same equation with the
    centrifugal term absorbed; differencing ψ directly near the origin
    measures the O(h²/r) error of the difference quotient, not of ψ. Nodes up
    to ``r_stop`` (default: where U drops below 1e-8 U(0)) are used and the
    result is scaled by the largest term of the equation.
    """
    phi, _ = _shooter(ground, sector)(lam)
    r, h = ground.r, ground.grid.h
    dim = ground.N + 2 * sector
    if r_stop is None:
        r_stop = ground.decay_radius(1e-8)
    n = int(r_stop / h)
    sl = slice(1, n)
    d2 = (phi[2: n + 1] - 2 * phi[1:n] + phi[: n - 1]) / h ** 2
    d1 = (phi[2: n + 1] - phi[: n - 1]) / (2 * h)
    pot = (1 - lam * ground.U[sl] ** 2) * phi[sl]
    res = d2 + (dim - 1) / r[sl] * d1 - pot
    scale = max(np.max(np.abs(d2)), np.max(np.abs(pot)))
    return float(np.max(np.abs(res)) / scale)


def eigenfunction_nodes(ground, sector, lam, floor=1e-6):
    """Sign changes of ψ on (0, r_cut).

    r_cut is where the envelope of |ψ| (running maximum over a unit window)
    first falls below floor * max|ψ| past the peak. Further out the shot is
    dominated by amplified round-off in the growing mode, which can add a
    spurious zero without moving the eigenvalue.
    """
    psi = sector_eigenfunction(ground, sector, lam)
    width = max(3, int(round(1.0 / ground.grid.h)))
    env = maximum_filter1d(np.abs(psi), size=width)
    peak = int(np.argmax(np.abs(psi)))
    low = np.flatnonzero(env[peak:] < floor)
    stop = peak + low[0] if low.size else len(psi) - 1
    return count_sign_changes(psi[: stop + 1])


def count_sign_changes(values):
    s = np.sign(values[1:-1])
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))


def merged_spectrum(ground, sector_max, lambda_max, how_many=50):
    """Union of the sector spectra for ℓ = 0..sector_max below ``lambda_max``.

    Values closer than 1e-6 are merged and carry every sector they came from.
    """
    if sector_max < 1:
        raise ValueError("sector_max must be at least 1")
    tagged = []
    for ell in range(sector_max + 1):
        spec = sector_eigenvalues(SpectralQuery(ground, ell, how_many, lambda_max))
        tagged.extend((lam, ell) for lam in spec.eigenvalues)
    tagged.sort()
    merged = []
    for lam, ell in tagged:
        if merged and lam - merged[-1][0][-1] <= MERGE_TOL:
            merged[-1][0].append(lam)
            merged[-1][1].append(ell)
        else:
            merged.append(([lam], [ell]))
    return [MergedEigenvalue(float(np.mean(v)), tuple(sorted(set(s)))) for v, s in merged]
