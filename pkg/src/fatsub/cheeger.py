"""Cheeger deformation tensors, horizontal lifts and deformed curvatures.

Everything is expressed in a Q-orthonormal basis of the orbit space, so
tensors are plain symmetric matrices.  ``t`` is the deformation parameter
(``t = 0`` is the undeformed metric).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument
from .submersion import HomogeneousTriple, a_star, check_spd

IDENTITY_TOL = 1e-12


@dataclass(frozen=True)
class OrbitData:
    dim_orbit: int
    O: np.ndarray

    @property
    def Q_gram(self) -> np.ndarray:
        return np.eye(self.dim_orbit)


@dataclass(frozen=True)
class DeformationTensors:
    t: float
    O_t: np.ndarray
    C_t_vertical_part: np.ndarray
    O_F: np.ndarray
    O_tilde: np.ndarray
    C_tilde: np.ndarray


@dataclass(frozen=True)
class ProductTangent:
    """Tangent vector on the product ``P x F``, split by the two orbit actions."""

    X_P_horizontal: np.ndarray
    V_vee: np.ndarray
    X_F_horizontal: np.ndarray
    W_star: np.ndarray


def _check_t(t: float) -> float:
    t = float(t)
    if not np.isfinite(t) or t < 0:
        raise InvalidArgument(f"deformation parameter must be finite and >= 0, got {t}")
    return t


def _sym(A) -> np.ndarray:
    return 0.5 * (A + A.T)


def _inv(A) -> np.ndarray:
    return np.linalg.solve(A, np.eye(len(A)))


def _rel(a, b) -> float:
    return float(np.abs(a - b).max(initial=0.0) / max(1.0, np.abs(b).max(initial=0.0)))


def orbit_tensor(metric_gram_on_orbit) -> OrbitData:
    """Orbit tensor ``O`` from the Gram matrix of the metric on a Q-orthonormal orbit basis."""
    O = check_spd(metric_gram_on_orbit, "orbit metric")
    return OrbitData(O.shape[0], _sym(O).copy())


def deform(O, t: float, check: bool = True) -> np.ndarray:
    """``O_t = (O⁻¹ + t)⁻¹``, cross-checked against ``O (1 + tO)⁻¹``."""
    O = check_spd(O, "orbit tensor")
    t = _check_t(t)
    eye = np.eye(len(O))
    first = _inv(_inv(O) + t * eye)
    if check:
        second = O @ _inv(eye + t * O)
        r = _rel(first, second)
        if r > IDENTITY_TOL:
            raise ArithmeticError(f"closed forms of O_t disagree by {r:.2e}")
    return _sym(first)


def apply_Ct(O, t: float, X_horizontal, U_orbit):
    """``C_t(X + U*) = X + ((1 + tO)⁻¹ U)*``; returns ``(X, U')``."""
    O = check_spd(O, "orbit tensor")
    t = _check_t(t)
    U = np.asarray(U_orbit, float)
    return np.array(X_horizontal, float), np.linalg.solve(np.eye(len(O)) + t * O, U)


def tilde_tensors(O, O_F, t: float, check: bool = True) -> DeformationTensors:
    """Generalized tensors for the diagonal action on ``P x F``.

    ``Õ_t = O_F (1 + O_t⁻¹ O_F)⁻¹ = (O_F⁻¹ + O_t⁻¹)⁻¹`` and
    ``C̃_t = -C_t O_t⁻¹ Õ_t = -O⁻¹ Õ_t``.
    """
    O = check_spd(O, "orbit tensor")
    O_F = check_spd(O_F, "fiber orbit tensor")
    if O.shape != O_F.shape:
        raise InvalidArgument("O and O_F act on orbit spaces of different dimension")
    t = _check_t(t)
    eye = np.eye(len(O))
    O_t = deform(O, t, check)
    O_t_inv = _inv(O_t)
    C_t = _inv(eye + t * O)
    Ot1 = O_F @ _inv(eye + O_t_inv @ O_F)
    Ot2 = _inv(_inv(O_F) + O_t_inv)
    Ct1 = -C_t @ O_t_inv @ Ot2
    Ct2 = -_inv(O) @ Ot2
    if check:
        for what, a, b in (("O_tilde", Ot1, Ot2), ("C_tilde", Ct1, Ct2)):
            r = _rel(a, b)
            if r > IDENTITY_TOL:
                raise ArithmeticError(f"closed forms of {what} disagree by {r:.2e}")
    return DeformationTensors(t, O_t, C_t, O_F, _sym(Ot2), Ct2)


def horizontal_lift(O, O_F, t: float, X, X_F, U) -> ProductTangent:
    """Lift ``X + X_F + U*`` to the product, orthogonal to the diagonal orbit."""
    d = tilde_tensors(O, O_F, t, check=False)
    OtU = d.O_tilde @ np.asarray(U, float)
    V_vee = -np.linalg.solve(d.O_t, OtU)
    W_star = np.linalg.solve(d.O_F, OtU)
    return ProductTangent(np.array(X, float), V_vee, np.array(X_F, float), W_star)


def lift_orthogonality_residual(O, O_F, t: float, lift: ProductTangent) -> float:
    """Size of the functional ``V -> g_t(V_vee, V) + g_F(W_star, V)`` (should vanish)."""
    d = tilde_tensors(O, O_F, t, check=False)
    return float(np.abs(d.O_t @ lift.V_vee + d.O_F @ lift.W_star).max(initial=0.0))


def qt_metric(O, O_F, t: float, tangent1, tangent2) -> float:
    """``Q_t`` on pairs ``(X, U)`` of horizontal and orbit coordinates.

    Both lifted orbit components are measured in their own metric, the
    P-side with the deformed ``O_t`` and the F-side with ``O_F``, and the
    orbit part is rescaled by ``t``.  This collapses to
    ``Q(X, Y) + t Q(Õ_t U, V)``, which tends to ``Q(X, Y) + Q(U, V)``.
    """
    X, U = (np.asarray(v, float) for v in tangent1)
    Y, V = (np.asarray(v, float) for v in tangent2)
    d = tilde_tensors(O, O_F, t, check=False)
    WU, WV = np.linalg.solve(d.O_t, d.O_tilde @ U), np.linalg.solve(d.O_t, d.O_tilde @ V)
    FU, FV = np.linalg.solve(d.O_F, d.O_tilde @ U), np.linalg.solve(d.O_F, d.O_tilde @ V)
    orbit = WU @ d.O_t @ WV + FU @ d.O_F @ FV
    return float(X @ Y + d.t * orbit)


def qt_gram(O, O_F, t: float, dim_horizontal: int) -> np.ndarray:
    """Gram matrix of ``Q_t`` on ``R^dim_horizontal ⊕ orbit``."""
    d = tilde_tensors(O, O_F, t, check=False)
    n = len(d.O_t)
    G = np.zeros((dim_horizontal + n, dim_horizontal + n))
    G[:dim_horizontal, :dim_horizontal] = np.eye(dim_horizontal)
    G[dim_horizontal:, dim_horizontal:] = d.t * d.O_tilde
    return G


def deformed_metric_operator(triple: HomogeneousTriple, t: float, scale: float = 1.0) -> np.ndarray:
    """Metric operator on g (adapted frame) after deforming along H.

    The undeformed metric is Q on m and ``scale * Q`` on h, so the orbit
    tensor is ``scale * id`` and the deformed h-block is ``O_t``.
    """
    if scale <= 0:
        raise InvalidArgument("orbit scale must be positive")
    t = _check_t(t)
    lam = scale / (1.0 + t * scale)
    phi = np.eye(triple.dim)
    phi[triple.sh, triple.sh] *= lam
    return phi


def deformed_vertizontal_sec(triple: HomogeneousTriple, t: float, X, V, scale: float = 1.0) -> float:
    """Unreduced ``K_t(X, V)`` for X in m and V in p after the Cheeger deformation.

    With orbit tensor ``O = scale * id`` this is ``|A*_X O_t V|²``.
    """
    if scale <= 0:
        raise InvalidArgument("orbit scale must be positive")
    t = _check_t(t)
    lam = scale / (1.0 + t * scale)
    a = a_star(triple, X, lam * np.asarray(V, float))
    return float(a @ a)
