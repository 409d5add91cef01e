"""Compiled RK4 loops for the radial ODEs.

Everything here works on plain float arrays so that numba can compile it in
nopython mode. The Python-facing wrappers live in :mod:`nlsnorm.radial`,
:mod:`nlsnorm.linearized` and :mod:`nlsnorm.spectrum`.
"""

import numba as nb
import numpy as np

# event codes returned by shoot_nonlinear
END = 0
CROSS = 1
TURN = 2
DIVERGE = 3


@nb.njit(cache=True)
def _force(u, p):
    # odd extension of u - u^p so that a sub-step below zero stays finite
    return u - np.abs(u) ** (p - 1.0) * u


@nb.njit(cache=True)
def _rhs(N, p, r, u, v):
    return v, _force(u, p) - (N - 1.0) / r * v


@nb.njit(cache=True)
def shoot_nonlinear(N, p, h, j_start, u_start, v_start, n_max, cap, stop_on_turn,
                    u_out, v_out):
    """RK4 for u'' + (N-1)/r u' = u - u^p from node ``j_start``.

    Fills ``u_out``/``v_out`` from ``j_start`` on and returns
    ``(code, j_last)``, where ``j_last`` is the last node written.
    """
    u = u_start
    v = v_start
    u_out[j_start] = u
    v_out[j_start] = v
    for j in range(j_start, n_max):
        r = j * h
        k1u, k1v = _rhs(N, p, r, u, v)
        k2u, k2v = _rhs(N, p, r + 0.5 * h, u + 0.5 * h * k1u, v + 0.5 * h * k1v)
        k3u, k3v = _rhs(N, p, r + 0.5 * h, u + 0.5 * h * k2u, v + 0.5 * h * k2v)
        k4u, k4v = _rhs(N, p, r + h, u + h * k3u, v + h * k3v)
        u = u + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
        v = v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        u_out[j + 1] = u
        v_out[j + 1] = v
        if not (np.isfinite(u) and np.isfinite(v)) or np.abs(u) > cap:
            return DIVERGE, j + 1
        if u < 0.0:
            return CROSS, j + 1
        if stop_on_turn and v > 0.0:
            return TURN, j + 1
    return END, n_max


@nb.njit(cache=True)
def integrate_linear(dim, h, w_node, w_mid, M, g_node, g_mid, y0, n):
    """RK4 for the vector system Y'' + (dim-1)/r Y' = Y - w(r) M Y - g(r).

    ``w_node``/``w_mid`` hold the scalar weight at the nodes and at the
    half-step points, ``g_node``/``g_mid`` the source with shape (n+1, k)
    and (n, k). The start at the origin uses the regular series
    Y(h) = Y0 + (Y0 - w0 M Y0 - g0) h^2 / (2 dim).
    """
    k = y0.shape[0]
    Y = np.zeros((n + 1, k))
    D = np.zeros((n + 1, k))
    Y[0] = y0
    c = y0 - w_node[0] * (M @ y0) - g_node[0]
    Y[1] = y0 + c * h * h / (2.0 * dim)
    D[1] = c * h / dim
    y = Y[1].copy()
    d = D[1].copy()
    for j in range(1, n):
        r = j * h
        rm = r + 0.5 * h
        k1y = d
        k1d = y - w_node[j] * (M @ y) - g_node[j] - (dim - 1.0) / r * d
        ya = y + 0.5 * h * k1y
        da = d + 0.5 * h * k1d
        k2y = da
        k2d = ya - w_mid[j] * (M @ ya) - g_mid[j] - (dim - 1.0) / rm * da
        yb = y + 0.5 * h * k2y
        db = d + 0.5 * h * k2d
        k3y = db
        k3d = yb - w_mid[j] * (M @ yb) - g_mid[j] - (dim - 1.0) / rm * db
        yc = y + h * k3y
        dc = d + h * k3d
        k4y = dc
        k4d = yc - w_node[j + 1] * (M @ yc) - g_node[j + 1] - (dim - 1.0) / (r + h) * dc
        y = y + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        d = d + h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d)
        Y[j + 1] = y
        D[j + 1] = d
    return Y, D


@nb.njit(cache=True)
def weighted_shot(dim, h, lam, w_node, w_mid, n):
    """phi'' + (dim-1)/r phi' = (1 - lam w(r)) phi with phi(0) = 1.

    Returns the node values and the number of sign changes on (0, r_n).
    """
    phi = np.zeros(n + 1)
    phi[0] = 1.0
    c = 1.0 - lam * w_node[0]
    y = 1.0 + c * h * h / (2.0 * dim)
    d = c * h / dim
    phi[1] = y
    nodes = 0
    for j in range(1, n):
        r = j * h
        rm = r + 0.5 * h
        k1y = d
        k1d = (1.0 - lam * w_node[j]) * y - (dim - 1.0) / r * d
        ya = y + 0.5 * h * k1y
        da = d + 0.5 * h * k1d
        k2y = da
        k2d = (1.0 - lam * w_mid[j]) * ya - (dim - 1.0) / rm * da
        yb = y + 0.5 * h * k2y
        db = d + 0.5 * h * k2d
        k3y = db
        k3d = (1.0 - lam * w_mid[j]) * yb - (dim - 1.0) / rm * db
        yc = y + h * k3y
        dc = d + h * k3d
        k4y = dc
        k4d = (1.0 - lam * w_node[j + 1]) * yc - (dim - 1.0) / (r + h) * dc
        y_new = y + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        d = d + h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d)
        if (y_new < 0.0) != (y < 0.0):
            nodes += 1
        y = y_new
        phi[j + 1] = y
    return phi, nodes
