"""Hot loops with a numba path and a pure-numpy fallback.

Set ``FATSUB_DISABLE_NUMBA=1`` to force the numpy path (also used when
numba is not importable).  Both paths run the same arithmetic, so results
agree to rounding.
"""
from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("FATSUB_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    if _DISABLED:
        raise ImportError
    from numba import njit
except ImportError:  # pragma: no cover - depends on environment
    njit = None

USE_NUMBA = njit is not None


def sigma_min_sweep_numpy(T, points, chunk=4096):
    """Smallest singular value of ``sum_k u_k T[:, :, k]`` for each row ``u``."""
    T = np.ascontiguousarray(T, dtype=np.float64)
    points = np.ascontiguousarray(points, dtype=np.float64)
    if points.shape[0] == 0 or min(T.shape[:2]) == 0:
        return np.zeros(points.shape[0])
    out = np.empty(points.shape[0])
    for lo in range(0, points.shape[0], chunk):
        mats = np.einsum("rsk,nk->nrs", T, points[lo:lo + chunk])
        out[lo:lo + chunk] = np.linalg.svd(mats, compute_uv=False)[:, -1]
    return out


def rk4_linear_numpy(M, u0, h, nsteps):
    """Classical RK4 for ``u' = M u``; returns all ``nsteps + 1`` states."""
    M = np.asarray(M, dtype=np.float64)
    traj = np.empty((nsteps + 1, u0.shape[0]))
    u = np.array(u0, dtype=np.float64)
    traj[0] = u
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(nsteps):
            k1 = M @ u
            k2 = M @ (u + 0.5 * h * k1)
            k3 = M @ (u + 0.5 * h * k2)
            k4 = M @ (u + h * k3)
            u = u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            traj[n + 1] = u
            if not np.isfinite(u).all():
                # diverged; the caller only needs to see a non-finite state
                traj[n + 1:] = np.nan
                break
    return traj


if USE_NUMBA:

    @njit(cache=True)
    def _sigma_min_sweep_nb(T, points):
        r, s, d = T.shape
        n = points.shape[0]
        out = np.empty(n)
        A = np.empty((r, s))
        for p in range(n):
            for i in range(r):
                for j in range(s):
                    acc = 0.0
                    for k in range(d):
                        acc += T[i, j, k] * points[p, k]
                    A[i, j] = acc
            sv = np.linalg.svd(A)[1]
            out[p] = sv[sv.shape[0] - 1]
        return out

    @njit(cache=True)
    def _rk4_linear_nb(M, u0, h, nsteps):
        d = u0.shape[0]
        traj = np.empty((nsteps + 1, d))
        u = u0.copy()
        traj[0] = u
        for n in range(nsteps):
            k1 = M @ u
            k2 = M @ (u + 0.5 * h * k1)
            k3 = M @ (u + 0.5 * h * k2)
            k4 = M @ (u + h * k3)
            u = u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            traj[n + 1] = u
        return traj

    def sigma_min_sweep_numba(T, points):
        T = np.ascontiguousarray(T, dtype=np.float64)
        points = np.ascontiguousarray(points, dtype=np.float64)
        if points.shape[0] == 0 or min(T.shape[:2]) == 0:
            return np.zeros(points.shape[0])
        return _sigma_min_sweep_nb(T, points)

    def rk4_linear_numba(M, u0, h, nsteps):
        return _rk4_linear_nb(np.ascontiguousarray(M, dtype=np.float64),
                              np.ascontiguousarray(u0, dtype=np.float64), float(h), int(nsteps))

    sigma_min_sweep = sigma_min_sweep_numba
    rk4_linear = rk4_linear_numba
else:
    sigma_min_sweep = sigma_min_sweep_numpy
    rk4_linear = rk4_linear_numpy


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
