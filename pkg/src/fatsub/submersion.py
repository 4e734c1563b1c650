"""Homogeneous submersion model ``H/K -> G/K -> G/H`` at the basepoint.

All vectors are coordinate vectors in an adapted Q-orthonormal frame of g,
ordered ``m | p | k`` with ``m = g ⊖ h`` (horizontal), ``p = h ⊖ k``
(vertical) and ``k`` the isotropy.  Curvatures are unreduced: no division
by the area of the plane, so degenerate planes simply give 0.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import liealg
from .errors import InvalidArgument, InvalidMetric, NotASubalgebra
from .liealg import MatrixLieAlgebra, SubalgebraEmbedding


@dataclass(frozen=True)
class TangentRepr:
    m_part: np.ndarray
    p_part: np.ndarray
    k_part: np.ndarray

    def full(self) -> np.ndarray:
        return np.concatenate([self.m_part, self.p_part, self.k_part])


class HomogeneousTriple:
    """Nested subalgebras ``k ⊆ h ⊆ g`` with orthonormal complements.

    ``frame`` holds the adapted basis as rows of g-coordinates and ``c`` the
    structure constants in that basis.
    """

    def __init__(self, g: MatrixLieAlgebra, h: SubalgebraEmbedding, k: SubalgebraEmbedding,
                 name: str = "", frame: np.ndarray | None = None):
        if h.parent is not g or k.parent is not g:
            raise InvalidArgument("h and k must be embedded in g")
        if not h.contains(k):
            raise NotASubalgebra(f"{k.name or 'k'} is not contained in {h.name or 'h'}")
        self.g, self.h, self.k = g, h, k
        self.name = name or f"({g.name}, {h.name.split(' <')[0]}, {k.name.split(' <')[0]})"
        if frame is None:
            m = liealg.orthogonal_complement(h).complement
            p = liealg.orthogonal_complement(k, h).complement
            frame = np.vstack([m, p, k.coords])
        self.frame = np.asarray(frame, float).reshape(g.dim, g.dim)
        self.dm = g.dim - h.dim
        self.dp = h.dim - k.dim
        self.dk = k.dim
        F = self.frame
        self.c = np.einsum("ai,bj,ek,ijk->abe", F, F, F, g.c, optimize=True) if g.dim else np.zeros((0, 0, 0))
        self.sm = slice(0, self.dm)
        self.sp = slice(self.dm, self.dm + self.dp)
        self.sk = slice(self.dm + self.dp, g.dim)
        self.sh = slice(self.dm, g.dim)

    def __repr__(self):
        return f"HomogeneousTriple({self.name}, dim m={self.dm}, dim p={self.dp}, dim k={self.dk})"

    @property
    def dim(self) -> int:
        return self.g.dim

    def m_basis(self) -> np.ndarray:
        """m-basis as g-coordinate rows."""
        return self.frame[self.sm]

    def p_basis(self) -> np.ndarray:
        return self.frame[self.sp]

    def embed_m(self, x) -> np.ndarray:
        v = np.zeros(self.dim)
        v[self.sm] = x
        return v

    def embed_p(self, u) -> np.ndarray:
        v = np.zeros(self.dim)
        v[self.sp] = u
        return v

    def split(self, v) -> TangentRepr:
        v = np.asarray(v, float)
        return TangentRepr(v[self.sm].copy(), v[self.sp].copy(), v[self.sk].copy())

    def bracket(self, x, y) -> np.ndarray:
        return np.einsum("i,j,ijk->k", x, y, self.c)

    def ad(self, x) -> np.ndarray:
        return np.einsum("i,ijk->kj", x, self.c)

    def rebased(self, Rm=None, Rp=None) -> "HomogeneousTriple":
        """Same triple with m and p re-based by orthogonal matrices."""
        F = self.frame.copy()
        if Rm is not None:
            F[self.sm] = np.asarray(Rm) @ F[self.sm]
        if Rp is not None:
            F[self.sp] = np.asarray(Rp) @ F[self.sp]
        return HomogeneousTriple(self.g, self.h, self.k, self.name, F)

    def invariant_residuals(self) -> dict[str, float]:
        F = self.frame
        return {
            "h_closure": self.h.closure_residual(),
            "k_closure": self.k.closure_residual(),
            "frame_orthonormality": float(np.abs(F @ F.T - np.eye(self.dim)).max(initial=0.0)),
            "m_perp_h": float(np.abs(F[self.sm] @ self.h.coords.T).max(initial=0.0)),
            "p_in_h": float(np.abs(F[self.sp] - F[self.sp] @ self.h.projector()).max(initial=0.0)),
            "p_perp_k": float(np.abs(F[self.sp] @ self.k.coords.T).max(initial=0.0)),
        }


def make_triple(g, h: str, k: str = "e", name: str = "") -> HomogeneousTriple:
    """Build a triple from catalog names, e.g. ``make_triple("sp2", "sp1xsp1", "sp1u")``."""
    G = liealg.algebra(g) if isinstance(g, str) else g
    return HomogeneousTriple(G, liealg.embed(G, h), liealg.embed(G, k), name)


def a_tensor(triple: HomogeneousTriple, X, Y) -> np.ndarray:
    """``A_X Y = ½ proj_p [X, Y]`` for m-vectors ``X, Y``; returns a p-vector."""
    t = triple
    return 0.5 * np.einsum("i,j,ijk->k", X, Y, t.c[t.sm, t.sm, t.sp])


def a_star(triple: HomogeneousTriple, X, V) -> np.ndarray:
    """Dual ``A*_X V = ½ proj_m [V, X]``; returns an m-vector."""
    t = triple
    return 0.5 * np.einsum("a,i,aik->k", V, X, t.c[t.sp, t.sm, t.sm])


def biinvariant_sec(alg, X, Y) -> float:
    """``¼|[X,Y]|²`` for full coordinate vectors (alg: algebra or triple)."""
    b = np.einsum("i,j,ijk->k", X, Y, alg.c)
    return 0.25 * float(b @ b)


def oneill_base_sec(triple: HomogeneousTriple, X, Y) -> float:
    """Unreduced curvature of the normal homogeneous base ``G/H`` on m-vectors."""
    b = triple.bracket(triple.embed_m(X), triple.embed_m(Y))
    vert = b[triple.sh]
    return 0.25 * float(b @ b) + 0.75 * float(vert @ vert)


def vertizontal_sec(triple: HomogeneousTriple, X, V) -> float:
    a = a_star(triple, X, V)
    return float(a @ a)


def normal_homogeneous_sec(triple: HomogeneousTriple, U, V) -> float:
    """Curvature of the fiber ``H/K`` with its normal metric, U, V p-vectors."""
    b = triple.bracket(triple.embed_p(U), triple.embed_p(V))
    iso = b[triple.sk]
    return 0.25 * float(b @ b) + 0.75 * float(iso @ iso)


def check_spd(phi, what: str = "metric operator", floor: float = 1e-12) -> np.ndarray:
    phi = np.asarray(phi, float)
    if phi.ndim != 2 or phi.shape[0] != phi.shape[1]:
        raise InvalidMetric(f"{what} must be square")
    if np.abs(phi - phi.T).max(initial=0.0) > 1e-12 * max(1.0, np.abs(phi).max(initial=0.0)):
        raise InvalidMetric(f"{what} is not symmetric")
    if phi.shape[0] and np.linalg.eigvalsh(phi).min() <= floor:
        raise InvalidMetric(f"{what} is not positive-definite")
    return phi


def levi_civita(alg, phi, X, Y) -> np.ndarray:
    """``∇_X Y`` for left-invariant fields under ``<a, b> = Q(phi a, b)``.

    Koszul: ``∇_X Y = ½([X,Y] - ad*_X Y - ad*_Y X)`` with ``ad*`` the
    metric adjoint ``phi⁻¹ ad_Xᵀ phi``.
    """
    c = alg.c
    adX = np.einsum("i,ijk->kj", X, c)
    adY = np.einsum("i,ijk->kj", Y, c)
    phi_inv_t = np.linalg.solve(phi, np.eye(len(phi)))
    star = lambda A, v: phi_inv_t @ (A.T @ (phi @ v))
    return 0.5 * (adX @ Y - star(adX, Y) - star(adY, X))


def left_invariant_curvature(alg, phi, X, Y) -> float:
    """Unreduced sectional curvature ``<R(X,Y)Y, X>`` of a left-invariant metric."""
    phi = check_spd(phi)
    X = np.asarray(X, float)
    Y = np.asarray(Y, float)
    nab = lambda a, b: levi_civita(alg, phi, a, b)
    XY = np.einsum("i,j,ijk->k", X, Y, alg.c)
    R = nab(X, nab(Y, Y)) - nab(Y, nab(X, Y)) - nab(XY, Y)
    return float(R @ phi @ X)
