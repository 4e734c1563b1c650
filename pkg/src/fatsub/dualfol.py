"""Dual-foliation diagnostics at the basepoint of a homogeneous triple.

Spans are computed in the adapted frame of g and their dimensions are
numerical ranks with singular-value threshold ``RANK_TOL``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .liealg import RANK_TOL
from .submersion import HomogeneousTriple


@dataclass
class SpanReport:
    depth_dims: list
    saturated_at: int
    twisted: bool
    final_dim: int
    dim_g: int

    def to_dict(self) -> dict:
        return {
            "depth_dims": [int(d) for d in self.depth_dims],
            "saturated_at": int(self.saturated_at),
            "twisted": bool(self.twisted),
            "final_dim": int(self.final_dim),
            "dim_g": int(self.dim_g),
        }


@dataclass
class DualLeafVertical:
    basis: np.ndarray
    dim: int

    def to_dict(self) -> dict:
        return {"dim": int(self.dim), "basis": self.basis.tolist()}


def _row_span(rows: np.ndarray, tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal rows spanning the row space of ``rows``."""
    if rows.size == 0:
        return np.zeros((0, rows.shape[1] if rows.ndim == 2 else 0))
    _, s, Vt = np.linalg.svd(rows, full_matrices=False)
    return Vt[s > tol * max(1.0, s[0])]


def _closure(triple: HomogeneousTriple, gens: np.ndarray):
    t = triple
    m_rows = np.eye(t.dim)[t.sm]
    cur = _row_span(gens)
    dims = [len(cur)]
    for _ in range(t.dim):
        new = np.einsum("ai,bj,ijk->abk", cur, m_rows, t.c).reshape(-1, t.dim)
        nxt = _row_span(np.vstack([cur, new]))
        if len(nxt) == len(cur):
            break
        cur = nxt
        dims.append(len(cur))
    return cur, dims


def bracket_closure(triple: HomogeneousTriple, extra_generators=None) -> SpanReport:
    """Iterated span ``S_0 = m``, ``S_{j+1} = S_j + [S_j, m]``.

    ``depth_dims[j] = dim S_j``.  The triple is twisted when the closure
    together with the isotropy k fills g (horizontal curves reach every
    point of ``G/K``).
    """
    t = triple
    gens = np.eye(t.dim)[t.sm]
    if extra_generators is not None:
        gens = np.vstack([gens, np.atleast_2d(np.asarray(extra_generators, float))])
    cur, dims = _closure(t, gens)
    with_k = _row_span(np.vstack([cur, np.eye(t.dim)[t.sk]])) if t.dk else cur
    return SpanReport(dims, len(dims) - 1, len(with_k) == t.dim, len(cur), t.dim)


def a_span(triple: HomogeneousTriple, tol: float = RANK_TOL) -> DualLeafVertical:
    """Span of ``A_X Y = ½ proj_p [X, Y]`` over m-basis pairs, as p-coordinate rows."""
    t = triple
    if t.dp == 0 or t.dm == 0:
        return DualLeafVertical(np.zeros((0, t.dp)), 0)
    rows = 0.5 * t.c[t.sm, t.sm, t.sp].reshape(-1, t.dp)
    basis = _row_span(rows, tol)
    return DualLeafVertical(basis, len(basis))


def ambrose_singer_check(triple: HomogeneousTriple, fat: bool = False) -> bool:
    """Basepoint form of the holonomy span identity.

    By Ad(H)-invariance the transported spans all equal the basepoint span,
    so the leaf through the basepoint has tangent ``m ⊕ a_span`` and this
    must match the bracket closure taken modulo k.  When the triple is fat
    the span must also be all of p and the triple twisted.
    """
    t = triple
    cur, _ = _closure(t, np.eye(t.dim)[t.sm])
    mod_k = cur.copy()
    mod_k[:, t.sk] = 0.0
    leaf_dim = len(_row_span(mod_k))
    span = a_span(t)
    ok = leaf_dim == t.dm + span.dim
    if fat:
        ok = ok and span.dim == t.dp and bracket_closure(t).twisted
    return bool(ok)
