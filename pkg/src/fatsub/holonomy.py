"""Holonomy, dual-holonomy and basic fields along one-parameter subgroups.

For left-invariant fields of a bi-invariant metric ``∇_X Y = ½[X, Y]``, so a
field ``u(t)`` along ``exp(tX)`` written in the left-invariant frame has
``∇_ċ u = u' + ½[X, u]``.  The covariant equations then become linear ODEs
with constant coefficients, solved here by fixed-step RK4.

All vectors are in the adapted frame of the triple (see ``submersion``).
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import IntegrationDiverged, InvalidArgument
from .fatness import astar_matrix
from .submersion import HomogeneousTriple, a_star

DRIFT_TOL = 1e-8
CANCEL_TOL = 1e-10
KERNEL_TOL = 1e-8


@dataclass(frozen=True)
class GeodesicSpec:
    direction: np.ndarray
    horizon: float = 10.0
    step: float = 1e-3

    def __post_init__(self):
        X = np.asarray(self.direction, float)
        object.__setattr__(self, "direction", X)
        if abs(np.linalg.norm(X) - 1.0) > 1e-12:
            raise InvalidArgument("geodesic direction must be a unit vector")
        if self.step <= 0 or self.horizon < 0:
            raise InvalidArgument("step must be positive and horizon non-negative")
        n = self.horizon / self.step
        if abs(n - round(n)) > 1e-9 * max(1.0, n):
            raise InvalidArgument("horizon must be an integer multiple of the step")

    @property
    def nsteps(self) -> int:
        return int(round(self.horizon / self.step))

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.nsteps * self.step, self.nsteps + 1)


@dataclass
class FieldTrajectory:
    kind: str
    times: np.ndarray
    values: np.ndarray
    shape_operator: np.ndarray
    subspace_drift: float = 0.0
    cancellation_residual: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.values, axis=1)


def _unit_in(triple: HomogeneousTriple, X, sl, what) -> np.ndarray:
    X = np.asarray(X, float)
    n = sl.stop - sl.start
    if X.shape != (n,):
        raise InvalidArgument(f"{what} must have {n} components, got shape {X.shape}")
    return X


def _shape_full(triple: HomogeneousTriple, S) -> np.ndarray:
    """Embed a symmetric operator on p into g (zero elsewhere)."""
    full = np.zeros((triple.dim, triple.dim))
    if S is None:
        return full
    S = np.asarray(S, float)
    if S.shape != (triple.dp, triple.dp):
        raise InvalidArgument(f"shape operator must be {triple.dp}x{triple.dp}")
    if np.abs(S - S.T).max(initial=0.0) > 1e-12:
        raise InvalidArgument("shape operator must be symmetric")
    full[triple.sp, triple.sp] = S
    return full


def _projector(triple: HomogeneousTriple, sl) -> np.ndarray:
    P = np.zeros((triple.dim, triple.dim))
    P[sl, sl] = np.eye(sl.stop - sl.start)
    return P


def _integrate(M, w0, spec: GeodesicSpec) -> np.ndarray:
    traj = _kernels.rk4_linear(M, w0, spec.step, spec.nsteps)
    if not np.all(np.isfinite(traj)):
        raise IntegrationDiverged("trajectory became non-finite")
    return traj


def _drift(traj, keep) -> float:
    out = np.ones(traj.shape[1], bool)
    out[keep] = False
    return float(np.abs(traj[:, out]).max(initial=0.0))


def _vertical_field(triple: HomogeneousTriple, spec: GeodesicSpec, u0, S, sign: float, kind: str):
    u0 = _unit_in(triple, u0, triple.sp, "initial vertical vector")
    X = _unit_in(triple, spec.direction, triple.sm, "geodesic direction")
    Xf = triple.embed_m(X)
    Pp = _projector(triple, triple.sp)
    Sf = _shape_full(triple, S)
    # u' = -½ proj_p [X, u] - S u; the m-part of ∇_ċ u = -A*_ċ u cancels
    M = -0.5 * Pp @ triple.ad(Xf) @ Pp - sign * Sf
    traj = _integrate(M, triple.embed_p(u0), spec)
    drift = _drift(traj, triple.sp)
    if drift >= DRIFT_TOL:
        raise IntegrationDiverged(f"vertical drift {drift:.2e} exceeds {DRIFT_TOL:g}")
    # horizontal cancellation: ½ proj_m [X, u] against -A*_X u, at every step
    horiz = 0.5 * np.einsum("ij,nj->ni", triple.ad(Xf), traj)[:, triple.sm]
    astar = 0.5 * traj[:, triple.sp] @ astar_matrix(triple, X).T
    cancel = float(np.abs(horiz + astar).max(initial=0.0))
    if cancel >= CANCEL_TOL:
        raise IntegrationDiverged(f"horizontal cancellation failed ({cancel:.2e})")
    S_op = np.zeros((triple.dp, triple.dp)) if S is None else np.asarray(S, float)
    return FieldTrajectory(kind, spec.times, traj[:, triple.sp].copy(), S_op, drift, cancel)


def integrate_holonomy(triple: HomogeneousTriple, spec: GeodesicSpec, xi0, S=None) -> FieldTrajectory:
    """Holonomy field ``∇_ċ ξ = -A*_ċ ξ - S_ċ ξ`` along ``exp(tX)``."""
    return _vertical_field(triple, spec, xi0, S, 1.0, "holonomy")


def integrate_dual_holonomy(triple: HomogeneousTriple, spec: GeodesicSpec, nu0, S=None) -> FieldTrajectory:
    """Dual holonomy field ``∇_ċ ν = -A*_ċ ν + S_ċ ν``."""
    return _vertical_field(triple, spec, nu0, S, -1.0, "dual")


def integrate_basic_field(triple: HomogeneousTriple, V, spec: GeodesicSpec, X0) -> FieldTrajectory:
    """Basic horizontal field along the vertical geodesic ``exp(tV)``.

    With totally geodesic leaves ``x' + ½[V, x] = -½[V, x]``, i.e.
    ``x' = -[V, x]``.  ``spec.direction`` is ignored except for timing, so
    any unit m-vector may be passed there; ``V`` is the unit p-direction.
    """
    V = _unit_in(triple, V, triple.sp, "vertical direction")
    if abs(np.linalg.norm(V) - 1.0) > 1e-12:
        raise InvalidArgument("vertical direction must be a unit vector")
    X0 = _unit_in(triple, X0, triple.sm, "initial horizontal vector")
    Pm = _projector(triple, triple.sm)
    M = -Pm @ triple.ad(triple.embed_p(V)) @ Pm
    traj = _integrate(M, triple.embed_m(X0), spec)
    drift = _drift(traj, triple.sm)
    if drift >= DRIFT_TOL:
        raise IntegrationDiverged(f"horizontal drift {drift:.2e} exceeds {DRIFT_TOL:g}")
    return FieldTrajectory("basic", spec.times, traj[:, triple.sm].copy(),
                           np.zeros((triple.dp, triple.dp)), drift, 0.0, {"V": V})


def paired_basic_drift(triple: HomogeneousTriple, a: FieldTrajectory, b: FieldTrajectory) -> float:
    """Drift of ``Q([x(t), y(t)], V)`` for two basic fields along the same ``exp(tV)``."""
    V = a.extra["V"]
    vals = np.einsum("ni,nj,ija,a->n", a.values, b.values, triple.c[triple.sm, triple.sm, triple.sp], V, optimize=True)
    return float(np.abs(vals - vals[0]).max(initial=0.0))


def total_space_sec(triple: HomogeneousTriple, A, B) -> float:
    """Unreduced curvature of the normal homogeneous total space ``G/K``.

    Full adapted coordinates; ``¼|[A,B]|² + ¾|proj_k [A,B]|²``.
    """
    b = triple.bracket(A, B)
    bk = b[triple.sk]
    return 0.25 * float(b @ b) + 0.75 * float(bk @ bk)


def quadratic_curvature_poly(triple: HomogeneousTriple, X, Z, xi):
    """Coefficients ``(a, b, c)`` with ``K(X, ξ + tZ) = a t² + 2 b t + c``.

    ``b = <(∇_X A)_X Z, ξ>``.  Using ``∇_X Y = ½[X, Y]`` one gets
    ``(∇_X A)_X Z = ¼(proj_v [X, proj_v [X, Z]] - proj_v [X, [X, Z]])``
    and the first term is zero since ``[m, p] ⊆ m``.
    """
    X, Z, xi = (np.asarray(v, float) for v in (X, Z, xi))
    Xf, Zf = triple.embed_m(X), triple.embed_m(Z)
    a = total_space_sec(triple, Xf, Zf)
    XZ = triple.bracket(Xf, Zf)
    vXZ = np.zeros_like(XZ)
    vXZ[triple.sp] = XZ[triple.sp]
    nab = 0.25 * (triple.bracket(Xf, vXZ)[triple.sp] - triple.bracket(Xf, XZ)[triple.sp])
    b = float(nab @ xi)
    s = a_star(triple, X, xi)
    return a, b, float(s @ s)


@dataclass
class PropagationReport:
    kernel_empty: bool
    max_residual: float
    passed: bool
    horizon: float
    seed: np.ndarray | None = None

    def to_dict(self) -> dict:
        return {
            "kernel_empty": self.kernel_empty,
            "max_residual": float(self.max_residual),
            "passed": self.passed,
            "horizon": float(self.horizon),
            "seed": None if self.seed is None else [float(x) for x in self.seed],
        }


def astar_kernel(triple: HomogeneousTriple, X, tol: float = KERNEL_TOL) -> np.ndarray:
    """Orthonormal rows spanning ``{V in p : A*_X V = 0}``."""
    A = astar_matrix(triple, X)
    if triple.dp == 0:
        return np.zeros((0, 0))
    _, s, Vt = np.linalg.svd(A)
    s = np.concatenate([s, np.zeros(triple.dp - len(s))])
    return Vt[s < tol]


def flat_geodesic_propagation(triple: HomogeneousTriple, X, xi0=None,
                              spec: GeodesicSpec | None = None) -> PropagationReport:
    """Check that a holonomy field starting in ``ker A*_X`` stays there."""
    X = np.asarray(X, float)
    spec = spec or GeodesicSpec(X, 10.0, 1e-3)
    if xi0 is None:
        ker = astar_kernel(triple, X)
        if len(ker) == 0:
            return PropagationReport(True, 0.0, True, spec.horizon)
        xi0 = ker[0]
    xi0 = np.asarray(xi0, float)
    if np.linalg.norm(a_star(triple, X, xi0)) >= 1e-10:
        raise InvalidArgument("seed is not in the kernel of A*_X")
    traj = integrate_holonomy(triple, spec, xi0)
    A = astar_matrix(triple, X)
    res = float(np.linalg.norm(0.5 * traj.values @ A.T, axis=1).max(initial=0.0))
    return PropagationReport(False, res, res < 1e-6, spec.horizon, xi0)


def kernel_rank_track(triple: HomogeneousTriple, spec: GeodesicSpec, samples: int = 101) -> list[int]:
    """``dim ker A*_{ċ(t)}`` sampled along ``exp(tX)``.

    Returned per sample so that constancy is observable by the caller.
    """
    X = spec.direction
    idx = np.unique(np.linspace(0, spec.nsteps, min(samples, spec.nsteps + 1)).round().astype(int))
    # the velocity of exp(tX), pulled back by left translation, is X at every t
    return [int(len(astar_kernel(triple, X))) for _ in idx]


def write_trajectory_csv(path, traj: FieldTrajectory, triple: HomogeneousTriple | None = None,
                         direction=None, partner: FieldTrajectory | None = None) -> None:
    """Columns: t, components, |a_star| (vertical fields with a direction), pairing."""
    dim = traj.values.shape[1]
    header = ["t"] + [f"v{i}" for i in range(dim)] + ["a_star_norm", "pairing"]
    A = astar_matrix(triple, direction) if triple is not None and direction is not None \
        and traj.kind != "basic" else None
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for n, t in enumerate(traj.times):
            v = traj.values[n]
            an = float(np.linalg.norm(0.5 * A @ v)) if A is not None else ""
            pr = float(v @ partner.values[n]) if partner is not None else ""
            w.writerow([repr(float(t))] + [repr(float(x)) for x in v] + [an, pr])
