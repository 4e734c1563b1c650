"""Fatness certification and dimensional constraints.

Two equivalent formulations are searched independently:

* two-form: for every unit vertical ``U`` the form ``(X, Y) -> Q([X,Y], U)``
  on m is non-degenerate; margin = min_U sigma_min(omega(U)).
* dual map: for every unit horizontal ``X`` the map ``V -> proj_m [V, X]``
  from p to m is injective; margin = min_X sigma_min.

The ½ of the A-tensor is dropped in both margins; it rescales the margin
and never changes the verdict.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtri
from scipy.stats import qmc

from . import _kernels
from .errors import InvalidArgument
from .submersion import HomogeneousTriple

DEFAULT_TOLERANCE = 1e-9
DEFAULT_GRID = 32
DEFAULT_REFINE = 20
MAX_GRID_POINTS = 1 << 15

FAT, NOT_FAT, INCONCLUSIVE = "fat", "not-fat", "inconclusive"


@dataclass
class FatnessReport:
    verdict: str
    margin: float
    witness: np.ndarray
    grid_density: int
    refine_iters: int
    tolerance: float
    formulation: str
    reason: str = ""
    n_samples: int = 0
    note: str = "A-tensor factor 1/2 dropped; the verdict is scale invariant"

    @property
    def is_fat(self) -> bool:
        return self.verdict == FAT

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "margin": float(self.margin),
            "witness": [float(x) for x in self.witness],
            "grid_density": int(self.grid_density),
            "refine_iters": int(self.refine_iters),
            "tolerance": float(self.tolerance),
            "formulation": self.formulation,
            "reason": self.reason,
            "n_samples": int(self.n_samples),
            "note": self.note,
        }


@dataclass
class ConstraintReport:
    even_base: bool
    equality_case_dims: bool
    multiple_of_4: bool
    multiple_of_8: bool
    overall: bool
    detail: str = ""
    applicable: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "even_base": self.even_base,
            "equality_case_dims": self.equality_case_dims,
            "multiple_of_4": self.multiple_of_4,
            "multiple_of_8": self.multiple_of_8,
            "overall": self.overall,
            "detail": self.detail,
        }


def omega_matrix(triple: HomogeneousTriple, U) -> np.ndarray:
    """``M[i, j] = Q([e_i, e_j], U)`` on the orthonormal m-basis."""
    t = triple
    return np.einsum("ijk,k->ij", t.c[t.sm, t.sm, t.sp], np.asarray(U, float))


def astar_matrix(triple: HomogeneousTriple, X) -> np.ndarray:
    """Matrix (dim m x dim p) of ``V -> proj_m [V, X]``."""
    t = triple
    return np.einsum("aik,i->ka", t.c[t.sp, t.sm, t.sm], np.asarray(X, float))


def sphere_grid(dim: int, density: int, max_points: int = MAX_GRID_POINTS) -> np.ndarray:
    """Deterministic low-discrepancy points on the unit sphere in R^dim.

    ``density**(dim-1)`` Halton points pushed through the normal quantile and
    normalized (capped at ``max_points``), plus the ± coordinate axes.
    """
    if dim < 1:
        raise InvalidArgument("sphere dimension must be positive")
    if dim == 1:
        return np.ones((1, 1))
    n = int(min(density ** (dim - 1), max_points))
    pts = qmc.Halton(d=dim, scramble=False).random(n + 1)[1:]
    gauss = ndtri(np.clip(pts, 1e-12, 1 - 1e-12))
    gauss /= np.linalg.norm(gauss, axis=1, keepdims=True)
    axes = np.vstack([np.eye(dim), -np.eye(dim)])
    return np.vstack([axes, gauss])


def _sigma_min(T, u) -> float:
    return float(_kernels.sigma_min_sweep(T, u[None, :])[0])


def _linearized_step(T, u):
    """Project ``u`` onto the zero set of the linearized smallest singular value."""
    A = np.einsum("rsk,k->rs", T, u)
    Uu, s, Vt = np.linalg.svd(A)
    y, x = Uu[:, len(s) - 1], Vt[len(s) - 1]
    grad = np.einsum("r,rsk,s->k", y, T, x)
    grad -= (grad @ u) * u
    g2 = grad @ grad
    if g2 < 1e-300:
        return None
    v = u - (s[-1] / g2) * grad
    return v / np.linalg.norm(v)


def _minimize_on_sphere(T, dim, grid_density, refine_iters, max_points):
    pts = sphere_grid(dim, grid_density, max_points)
    vals = _kernels.sigma_min_sweep(T, pts)
    i = int(np.argmin(vals))
    u, best = pts[i].copy(), float(vals[i])
    n_samples = len(pts)
    if dim == 1:
        return best, u, n_samples
    step = np.pi / grid_density
    eye = np.eye(dim)
    for _ in range(refine_iters):
        cands = np.vstack([u + step * eye, u - step * eye])
        cands /= np.linalg.norm(cands, axis=1, keepdims=True)
        lin = _linearized_step(T, u)
        if lin is not None:
            cands = np.vstack([lin[None, :], cands])
        cv = _kernels.sigma_min_sweep(T, cands)
        n_samples += len(cands)
        j = int(np.argmin(cv))
        if cv[j] < best:
            u, best = cands[j].copy(), float(cv[j])
        else:
            step *= 0.5
    return best, u, n_samples


def _verdict(margin: float, tolerance: float) -> str:
    if margin > tolerance:
        return FAT
    if margin < tolerance / 10:
        return NOT_FAT
    return INCONCLUSIVE


def _check_pre(triple: HomogeneousTriple):
    if triple.dp < 1:
        raise InvalidArgument("fatness needs a non-trivial vertical space (dim p >= 1)")
    if triple.dm < 2:
        raise InvalidArgument("fatness needs dim m >= 2")


def fatness_margin(triple: HomogeneousTriple, grid_density: int = DEFAULT_GRID,
                   refine_iters: int = DEFAULT_REFINE, tolerance: float = DEFAULT_TOLERANCE,
                   max_points: int = MAX_GRID_POINTS) -> FatnessReport:
    """Non-degeneracy of ``omega(U)`` over the unit sphere of p."""
    _check_pre(triple)
    if triple.dm % 2:
        witness = np.eye(triple.dp)[0]
        return FatnessReport(NOT_FAT, 0.0, witness, grid_density, refine_iters, tolerance,
                             "two-form", "odd-dimensional base")
    T = triple.c[triple.sm, triple.sm, triple.sp]
    margin, witness, n = _minimize_on_sphere(T, triple.dp, grid_density, refine_iters, max_points)
    return FatnessReport(_verdict(margin, tolerance), margin, witness, grid_density, refine_iters,
                         tolerance, "two-form", n_samples=n)


def fatness_via_astar(triple: HomogeneousTriple, grid_density: int = DEFAULT_GRID,
                      refine_iters: int = DEFAULT_REFINE, tolerance: float = DEFAULT_TOLERANCE,
                      max_points: int = MAX_GRID_POINTS) -> FatnessReport:
    """Injectivity of ``V -> proj_m [V, X]`` over the unit sphere of m."""
    _check_pre(triple)
    if triple.dp > triple.dm - 1:
        return FatnessReport(NOT_FAT, 0.0, np.eye(triple.dm)[0], grid_density, refine_iters,
                             tolerance, "a-star", "dim p > dim m - 1")
    if triple.dm % 2:
        return FatnessReport(NOT_FAT, 0.0, np.eye(triple.dm)[0], grid_density, refine_iters,
                             tolerance, "a-star", "odd-dimensional base")
    T = np.ascontiguousarray(triple.c[triple.sp, triple.sm, triple.sm].transpose(2, 0, 1))
    margin, witness, n = _minimize_on_sphere(T, triple.dm, grid_density, refine_iters, max_points)
    return FatnessReport(_verdict(margin, tolerance), margin, witness, grid_density, refine_iters,
                         tolerance, "a-star", n_samples=n)


def check_dimensional_constraints(dim_V: int, dim_B: int) -> ConstraintReport:
    """Necessary conditions on (dim vertical, dim base) for a fat submersion.

    (a) dim B even; (b) dim V = dim B - 1 forces dim B in {2, 4, 8};
    (c) dim V >= 2 forces dim B = 4k and dim V >= 4 forces dim B = 8k.
    Clauses that do not apply report True.
    """
    if dim_V < 0 or dim_B < 0:
        raise InvalidArgument("dimensions must be non-negative")
    applicable = {
        "even_base": True,
        "equality_case_dims": dim_V == dim_B - 1,
        "multiple_of_4": dim_V >= 2,
        "multiple_of_8": dim_V >= 4,
    }
    even = dim_B % 2 == 0
    eq = dim_B in (2, 4, 8) if applicable["equality_case_dims"] else True
    m4 = dim_B % 4 == 0 if applicable["multiple_of_4"] else True
    m8 = dim_B % 8 == 0 if applicable["multiple_of_8"] else True
    failed = [name for name, ok in
              (("even_base", even), ("equality_case_dims", eq), ("multiple_of_4", m4), ("multiple_of_8", m8))
              if not ok]
    detail = "all applicable clauses hold" if not failed else "failed: " + ", ".join(failed)
    return ConstraintReport(even, eq, m4, m8, not failed, detail, applicable)
