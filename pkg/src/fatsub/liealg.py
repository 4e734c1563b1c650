"""Matrix Lie algebras: bases, brackets, structure constants, subalgebras.

Every algebra is stored through a real matrix representation.  Complex
matrices use the embedding ``a + ib -> [[a, -b], [b, a]]`` entrywise and
quaternionic matrices use left multiplication ``q -> L(q)`` (4x4 real
blocks).  The inner product is ``Q(X, Y) = -scale * tr(XY)`` on the real
matrices, with ``scale`` chosen so the shipped basis is orthonormal
(``scale = 1`` for so, ``1/2`` for su and u, ``1/4`` for sp).  In complex and
quaternionic terms this is ``-Re tr(XY)``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from importlib import resources
from typing import Callable, Sequence

import numpy as np

from .errors import CatalogMiss, DegenerateBasis, InvalidArgument, NotASubalgebra

CLOSURE_TOL = 1e-10
ORTHO_TOL = 1e-12
RANK_TOL = 1e-8

_SQRT2 = np.sqrt(2.0)

# left multiplication by i, j, k on H = R^4 with basis (1, i, j, k)
_LI = np.array([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]], float)
_LJ = np.array([[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]], float)
_LK = np.array([[0, 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]], float)
QUAT_UNITS = (np.eye(4), _LI, _LJ, _LK)


def bracket(X, Y):
    """Matrix commutator ``XY - YX``."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if X.ndim != 2 or X.shape[0] != X.shape[1] or X.shape != Y.shape:
        raise InvalidArgument(f"bracket needs equal square matrices, got {X.shape} and {Y.shape}")
    return X @ Y - Y @ X


def complex_to_real(Z):
    Z = np.asarray(Z, dtype=complex)
    n = Z.shape[0]
    R = np.zeros((2 * n, 2 * n))
    R[0::2, 0::2] = Z.real
    R[1::2, 1::2] = Z.real
    R[0::2, 1::2] = -Z.imag
    R[1::2, 0::2] = Z.imag
    return R


def real_to_complex(R):
    R = np.asarray(R, dtype=float)
    return R[0::2, 0::2] + 1j * R[1::2, 0::2]


def quat_to_real(a, b=None, c=None, d=None):
    """Real 4n x 4n matrix of the quaternionic matrix ``a + b i + c j + d k``."""
    a = np.asarray(a, dtype=float)
    parts = [a] + [np.zeros_like(a) if p is None else np.asarray(p, float) for p in (b, c, d)]
    return sum(np.kron(p, unit) for p, unit in zip(parts, QUAT_UNITS))


def quat_components(R):
    """Inverse of :func:`quat_to_real` for matrices of that form."""
    R = np.asarray(R, dtype=float)
    return tuple(R[i::4, 0::4] for i in range(4))


# ---------------------------------------------------------------------------
# core types
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class StructureConstants:
    """``c[i, j, k]`` = coefficient of ``e_k`` in ``[e_i, e_j]``."""

    c: np.ndarray

    @property
    def dim(self) -> int:
        return self.c.shape[0]

    def antisymmetry_residual(self) -> float:
        if self.dim == 0:
            return 0.0
        return float(np.abs(self.c + self.c.transpose(1, 0, 2)).max())

    def total_antisymmetry_residual(self) -> float:
        if self.dim == 0:
            return 0.0
        return max(self.antisymmetry_residual(), float(np.abs(self.c + self.c.transpose(0, 2, 1)).max()))

    def jacobi_residual(self) -> float:
        if self.dim == 0:
            return 0.0
        c = self.c
        # [[e_i,e_j],e_k] + cyclic, coefficient on e_m
        t = np.einsum("ijl,lkm->ijkm", c, c)
        r = t + t.transpose(1, 2, 0, 3) + t.transpose(2, 0, 1, 3)
        return float(np.abs(r).max())

    def bracket(self, x, y):
        return np.einsum("i,j,ijk->k", x, y, self.c)

    def ad(self, x):
        """Matrix of ``ad_x`` acting on coordinate column vectors."""
        return np.einsum("i,ijk->kj", x, self.c)


@dataclass(frozen=True, eq=False)
class MatrixLieAlgebra:
    name: str
    basis: np.ndarray
    scale: float = 1.0
    rank_meta: int | None = None
    torus: tuple[int, ...] = ()
    family: str | None = None
    size: int | None = None
    components: tuple["MatrixLieAlgebra", ...] = field(default=(), repr=False)

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=float)
        if b.ndim != 3 or b.shape[1] != b.shape[2]:
            raise InvalidArgument(f"basis must have shape (dim, n, n), got {b.shape}")
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    def __repr__(self):
        return f"MatrixLieAlgebra({self.name!r}, dim={self.dim}, n={self.n})"

    @property
    def n(self) -> int:
        return self.basis.shape[1]

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def inner(self, X, Y) -> float:
        return -self.scale * float(np.einsum("ij,ji->", X, Y))

    @cached_property
    def gram(self) -> np.ndarray:
        g = -self.scale * np.einsum("iab,jba->ij", self.basis, self.basis)
        g.setflags(write=False)
        return g

    @property
    def is_orthonormal(self) -> bool:
        return bool(np.abs(self.gram - np.eye(self.dim)).max(initial=0.0) < ORTHO_TOL)

    def coords(self, X) -> np.ndarray:
        rhs = -self.scale * np.einsum("ab,iba->i", X, self.basis)
        if self.is_orthonormal:
            return rhs
        return np.linalg.solve(self.gram, rhs)

    def element(self, x) -> np.ndarray:
        return np.tensordot(np.asarray(x, float), self.basis, axes=1)

    @cached_property
    def structure(self) -> StructureConstants:
        return structure_constants(self)

    @property
    def c(self) -> np.ndarray:
        return self.structure.c

    def rescaled(self, lam: float) -> "MatrixLieAlgebra":
        """Same algebra with inner product ``lam * Q`` and re-normalized basis."""
        if lam <= 0:
            raise InvalidArgument("scale factor must be positive")
        return MatrixLieAlgebra(
            f"{self.name}*{lam:g}", self.basis / np.sqrt(lam), self.scale * lam,
            self.rank_meta, self.torus, self.family, self.size, self.components,
        )

    def residual_outside_span(self, X) -> float:
        return float(np.abs(X - self.element(self.coords(X))).max())


@dataclass(frozen=True)
class CatalogRecord:
    """Arithmetic-only catalog entry (no matrix basis)."""

    name: str
    dim: int
    rank: int
    realizable: bool = False
    generator: str | None = None


def inner(algebra: MatrixLieAlgebra, X, Y) -> float:
    X = np.asarray(X, float)
    Y = np.asarray(Y, float)
    if X.shape != (algebra.n, algebra.n) or Y.shape != X.shape:
        raise InvalidArgument(f"expected {algebra.n}x{algebra.n} matrices")
    return algebra.inner(X, Y)


def structure_constants(algebra: MatrixLieAlgebra) -> StructureConstants:
    if not algebra.is_orthonormal:
        raise InvalidArgument(f"{algebra.name}: structure constants need an orthonormal basis")
    B = algebra.basis
    if algebra.dim == 0:
        return StructureConstants(np.zeros((0, 0, 0)))
    prod = np.einsum("iab,jbc->ijac", B, B)
    br = prod - prod.transpose(1, 0, 2, 3)
    c = -algebra.scale * np.einsum("ijab,kba->ijk", br, B)
    resid = np.abs(br - np.einsum("ijk,kab->ijab", c, B)).max()
    if resid >= CLOSURE_TOL:
        raise NotASubalgebra(f"{algebra.name}: bracket closure residual {resid:.3e}")
    c.setflags(write=False)
    return StructureConstants(c)


def killing_form(algebra: MatrixLieAlgebra) -> np.ndarray:
    """``B(e_i, e_j) = tr(ad e_i ad e_j)`` from the structure constants."""
    c = algebra.c
    return np.einsum("ikl,jlk->ij", c, c)


def orthonormalize(basis: Sequence, inner: Callable, tol: float = 1e-10) -> list:
    """Modified Gram-Schmidt with one re-orthogonalization pass.

    Order is preserved; raises :class:`DegenerateBasis` on rank deficiency.
    """
    out = []
    for v in basis:
        w = np.array(v, dtype=float)
        n0 = np.sqrt(max(inner(w, w), 0.0))
        for _ in range(2):
            for u in out:
                w = w - inner(u, w) * u
        nrm = np.sqrt(max(inner(w, w), 0.0))
        if n0 == 0.0 or nrm <= tol * max(n0, 1.0):
            raise DegenerateBasis(f"vector {len(out)} is (numerically) dependent")
        out.append(w / nrm)
    return out


def _canonical_rows(P: np.ndarray, rank: int) -> np.ndarray:
    """Orthonormal basis of the range of projector ``P`` built from its columns in order."""
    dim = P.shape[0]
    rows: list[np.ndarray] = []
    for i in range(dim):
        if len(rows) == rank:
            break
        w = P[:, i].copy()
        for _ in range(2):
            for u in rows:
                w -= (u @ w) * u
        nrm = np.linalg.norm(w)
        if nrm > 1e-6:
            rows.append(w / nrm)
    if len(rows) != rank:
        raise DegenerateBasis("could not extract a basis of the requested rank")
    return np.array(rows).reshape(rank, dim)


def _orthonormal_rows(C: np.ndarray) -> np.ndarray:
    """Orthonormal rows spanning the row space of ``C`` (must have full row rank)."""
    C = np.atleast_2d(np.asarray(C, float))
    if C.shape[0] == 0:
        return C.reshape(0, C.shape[1])
    s = np.linalg.svd(C, compute_uv=False)
    if s[-1] <= RANK_TOL * max(s[0], 1.0):
        raise DegenerateBasis("coordinate vectors are linearly dependent")
    return np.array(orthonormalize(list(C), lambda a, b: float(a @ b)))


# ---------------------------------------------------------------------------
# subalgebras and splits
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SubalgebraEmbedding:
    """Subalgebra of ``parent`` given by orthonormal coordinate rows."""

    parent: MatrixLieAlgebra
    coords: np.ndarray
    name: str = ""

    def __post_init__(self):
        C = np.asarray(self.coords, dtype=float).reshape(-1, self.parent.dim)
        C = _orthonormal_rows(C)
        C.setflags(write=False)
        object.__setattr__(self, "coords", C)
        resid = self.closure_residual()
        if resid >= CLOSURE_TOL:
            raise NotASubalgebra(f"{self.name or 'subspace'}: closure residual {resid:.3e}")

    def __repr__(self):
        return f"SubalgebraEmbedding({self.name!r}, dim={self.dim} in {self.parent.name})"

    @property
    def dim(self) -> int:
        return self.coords.shape[0]

    @property
    def basis(self) -> np.ndarray:
        return np.tensordot(self.coords, self.parent.basis, axes=1)

    def closure_residual(self) -> float:
        C = self.coords
        if C.shape[0] == 0:
            return 0.0
        br = np.einsum("ai,bj,ijk->abk", C, C, self.parent.c)
        return float(np.abs(br - br @ C.T @ C).max())

    def projector(self) -> np.ndarray:
        return self.coords.T @ self.coords

    def contains(self, other: "SubalgebraEmbedding", tol: float = ORTHO_TOL) -> bool:
        if other.dim == 0:
            return True
        return bool(np.abs(other.coords - other.coords @ self.projector()).max() < max(tol, 1e-10))

    def as_algebra(self, name: str | None = None) -> MatrixLieAlgebra:
        return MatrixLieAlgebra(name or self.name or "sub", self.basis, self.parent.scale)


@dataclass(frozen=True, eq=False)
class OrthogonalSplit:
    """``ambient = sub (+) complement``, Q-orthogonal, in parent coordinates."""

    sub: SubalgebraEmbedding
    complement: np.ndarray
    ambient: np.ndarray

    @property
    def parent(self) -> MatrixLieAlgebra:
        return self.sub.parent

    def orthogonality_residual(self) -> float:
        if self.sub.dim == 0 or self.complement.shape[0] == 0:
            return 0.0
        return float(np.abs(self.sub.coords @ self.complement.T).max())


def orthogonal_complement(sub: SubalgebraEmbedding, ambient=None) -> OrthogonalSplit:
    """Orthonormal basis of ``ambient ⊖ sub`` (ambient defaults to the parent)."""
    dim = sub.parent.dim
    if ambient is None:
        A = np.eye(dim)
    elif isinstance(ambient, SubalgebraEmbedding):
        A = ambient.coords
    else:
        A = _orthonormal_rows(ambient)
    P_amb = A.T @ A
    S = sub.coords
    if S.shape[0] and np.abs(S - S @ P_amb).max() > 1e-10:
        raise InvalidArgument("sub is not contained in the ambient space")
    P = P_amb - S.T @ S
    r = A.shape[0] - S.shape[0]
    comp = _canonical_rows(P, r) if r > 0 else np.zeros((0, dim))
    comp.setflags(write=False)
    return OrthogonalSplit(sub, comp, A)


def check_pair(split: OrthogonalSplit) -> dict[str, bool]:
    """Reductive / symmetric test for ``ambient = h (+) m``."""
    c = split.parent.c
    H, M = split.sub.coords, split.complement
    reductive = True
    if H.shape[0] and M.shape[0]:
        hm = np.einsum("ai,bj,ijk->abk", H, M, c)
        reductive = bool(np.abs(hm - hm @ M.T @ M).max() < CLOSURE_TOL)
    symmetric = reductive
    if symmetric and M.shape[0]:
        mm = np.einsum("ai,bj,ijk->abk", M, M, c)
        proj = mm @ H.T @ H if H.shape[0] else np.zeros_like(mm)
        symmetric = bool(np.abs(mm - proj).max() < CLOSURE_TOL)
    return {"reductive": reductive, "symmetric": symmetric}


# ---------------------------------------------------------------------------
# classical bases
# ---------------------------------------------------------------------------


def _unit(n, i, j):
    E = np.zeros((n, n))
    E[i, j] = 1.0
    return E


def _so_basis(n):
    mats, torus = [], []
    for i in range(n):
        for j in range(i + 1, n):
            if j == i + 1 and i % 2 == 0:
                torus.append(len(mats))
            mats.append((_unit(n, i, j) - _unit(n, j, i)) / _SQRT2)
    return mats, torus


def _complex_offdiag(n):
    mats = []
    for i in range(n):
        for j in range(i + 1, n):
            E = _unit(n, i, j)
            mats.append(complex_to_real(1j * (E + E.T) / _SQRT2))
            mats.append(complex_to_real((E - E.T) / _SQRT2))
    return mats


def _su_basis(n):
    mats = _complex_offdiag(n)
    diag = [complex_to_real(1j * (_unit(n, k, k) - _unit(n, k + 1, k + 1))) for k in range(n - 1)]
    ip = lambda a, b: -0.5 * float(np.einsum("ij,ji->", a, b))
    torus = list(range(len(mats), len(mats) + len(diag)))
    mats += orthonormalize(diag, ip) if diag else []
    return mats, torus


def _u_basis(n):
    mats = _complex_offdiag(n)
    torus = list(range(len(mats), len(mats) + n))
    mats += [complex_to_real(1j * _unit(n, k, k)) for k in range(n)]
    return mats, torus


def _sp_basis(n):
    mats, torus = [], []
    Z = np.zeros((n, n))
    for a in range(n):
        E = _unit(n, a, a)
        torus.append(len(mats))
        mats.append(quat_to_real(Z, E))
        mats.append(quat_to_real(Z, None, E))
        mats.append(quat_to_real(Z, None, None, E))
    for a in range(n):
        for b in range(a + 1, n):
            E = _unit(n, a, b)
            mats.append(quat_to_real((E - E.T) / _SQRT2))
            for unit in range(1, 4):
                comps = [Z, None, None, None]
                comps[unit] = (E + E.T) / _SQRT2
                mats.append(quat_to_real(*comps))
    return mats, torus


def _torus_basis(n):
    return [complex_to_real(1j * _unit(n, k, k)) for k in range(n)], list(range(n))


_FAMILIES = {
    "so": (_so_basis, 1.0, lambda n: n // 2),
    "su": (_su_basis, 0.5, lambda n: n - 1),
    "u": (_u_basis, 0.5, lambda n: n),
    "sp": (_sp_basis, 0.25, lambda n: n),
    "t": (_torus_basis, 0.5, lambda n: n),
}
# real-representation block factor per natural matrix entry
_ENTRY = {"so": 1, "su": 2, "u": 2, "sp": 4, "t": 2}


def classical(family: str, n: int) -> MatrixLieAlgebra:
    builder, scale, rank = _FAMILIES[family]
    mats, torus = builder(n)
    real_n = n * _ENTRY[family]
    basis = np.array(mats).reshape(len(mats), real_n, real_n)
    name = f"u(1)^{n}" if family == "t" else f"{family}({n})"
    return MatrixLieAlgebra(name, basis, scale, rank(n), tuple(torus), family, n)


def direct_sum(*algebras: MatrixLieAlgebra) -> MatrixLieAlgebra:
    scales = {a.scale for a in algebras}
    if len(scales) != 1:
        raise InvalidArgument("direct sum needs summands with the same trace normalization")
    N = sum(a.n for a in algebras)
    mats, torus, off, offd = [], [], 0, 0
    for a in algebras:
        for i, B in enumerate(a.basis):
            M = np.zeros((N, N))
            M[off:off + a.n, off:off + a.n] = B
            mats.append(M)
        torus += [offd + t for t in a.torus]
        off += a.n
        offd += a.dim
    rank = sum(a.rank_meta or 0 for a in algebras)
    name = "+".join(a.name for a in algebras)
    return MatrixLieAlgebra(name, np.array(mats).reshape(len(mats), N, N), scales.pop(),
                            rank, tuple(torus), "sum", None, tuple(algebras))


def trivial_algebra() -> MatrixLieAlgebra:
    return MatrixLieAlgebra("0", np.zeros((0, 1, 1)), 1.0, 0, (), "trivial", 0)


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------


def _normalize(name: str) -> str:
    return (name.strip().lower().replace(" ", "").replace("×", "x").replace("⊕", "+")
            .replace("{e}", "e").replace("_", ""))


@lru_cache(maxsize=None)
def catalog_records() -> dict[str, CatalogRecord]:
    """Parse the shipped ``catalog.txt`` (see the file header for the format)."""
    text = resources.files("fatsub.data").joinpath("catalog.txt").read_text()
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) not in (4, 5):
            raise ValueError(f"catalog.txt:{lineno}: expected 4 or 5 fields")
        name, dim, rank, flag = parts[:4]
        gen = parts[4] if len(parts) == 5 else None
        out[_normalize(name)] = CatalogRecord(name, int(dim), int(rank), flag == "yes", gen)
    return out


_ALG_RE = re.compile(r"^(so|su|sp|u|spin)\(?(\d+)\)?$")
_TORUS_RE = re.compile(r"^u\(?1\)?\^(\d+)$")


def _short(name: str) -> str:
    """Canonical record key, e.g. ``sp2`` / ``Sp(2)`` -> ``sp(2)``."""
    key = _normalize(name)
    m = _ALG_RE.match(key)
    if m:
        return f"{m.group(1)}({m.group(2)})"
    m = _TORUS_RE.match(key)
    if m:
        return f"u(1)^{m.group(1)}"
    return key


@lru_cache(maxsize=None)
def _build(key: str) -> MatrixLieAlgebra | CatalogRecord:
    if "+" in key:
        return direct_sum(*(catalog(part) for part in key.split("+")))
    rec = catalog_records().get(key)
    if rec is None:
        raise CatalogMiss(f"unknown catalog entry {key!r}")
    if not rec.realizable:
        return rec
    m = _ALG_RE.match(key)
    t = _TORUS_RE.match(key)
    if rec.generator == "torus" and t:
        alg = classical("t", int(t.group(1)))
    elif m:
        family = "so" if m.group(1) == "spin" else m.group(1)
        n = int(m.group(2))
        if n == 0 or (family in ("so", "su") and n == 1):
            return trivial_algebra()
        alg = classical(family, n)
    else:
        raise CatalogMiss(f"no generator for catalog entry {key!r}")
    if alg.dim != rec.dim or alg.rank_meta != rec.rank:
        raise ValueError(f"catalog data mismatch for {key}: built dim {alg.dim}, rank {alg.rank_meta}")
    return alg


def catalog(name: str):
    """Look up an algebra, an arithmetic record, or an embedding ``"sub < parent"``."""
    if "<" in name:
        sub, parent = name.split("<", 1)
        par = catalog(parent)
        if isinstance(par, CatalogRecord):
            raise CatalogMiss(f"{parent!r} is arithmetic-only; no embeddings")
        return embed(par, sub)
    key = _normalize(name)
    if "+" in key:
        key = "+".join(_short(p) for p in key.split("+"))
    else:
        key = _short(key)
    return _build(key)


def algebra(name: str) -> MatrixLieAlgebra:
    """Like :func:`catalog` but insists on a realizable algebra."""
    out = catalog(name)
    if not isinstance(out, MatrixLieAlgebra):
        raise CatalogMiss(f"{name!r} is not realizable as a matrix algebra")
    return out


def record(name: str) -> CatalogRecord:
    """Dimension/rank record for any catalog name, realizable or not."""
    out = catalog(name)
    if isinstance(out, CatalogRecord):
        return out
    return CatalogRecord(out.name, out.dim, out.rank_meta or 0, True, out.family)


# ---------------------------------------------------------------------------
# named embeddings
# ---------------------------------------------------------------------------


def subspace_where(parent: MatrixLieAlgebra, condition: Callable, name: str = "") -> SubalgebraEmbedding:
    """Subalgebra of elements ``X`` with ``condition(X) == 0`` (condition linear)."""
    if parent.dim == 0:
        return SubalgebraEmbedding(parent, np.zeros((0, 0)), name)
    A = np.array([np.ravel(condition(B)) for B in parent.basis]).T
    if A.size == 0:
        P = np.eye(parent.dim)
        r = parent.dim
    else:
        _, s, vt = np.linalg.svd(A, full_matrices=True)
        r_cond = int(np.sum(s > RANK_TOL * max(s[0], 1.0))) if s.size else 0
        null = vt[r_cond:]
        P = null.T @ null
        r = null.shape[0]
    coords = _canonical_rows(P, r) if r else np.zeros((0, parent.dim))
    return SubalgebraEmbedding(parent, coords, name)


def _outside_blocks(N: int, blocks: Sequence[tuple[int, int]]):
    mask = np.ones((N, N), bool)
    for lo, hi in blocks:
        mask[lo:hi, lo:hi] = False
    return mask


def _block_ranges(sizes, f, offset=0):
    out, pos = [], offset
    for s in sizes:
        out.append((pos * f, (pos + s) * f))
        pos += s
    return out


def _pad(N: int, lo: int):
    def embed_matrix(X):
        M = np.zeros((N, N))
        M[lo:lo + X.shape[0], lo:lo + X.shape[0]] = X
        return M
    return embed_matrix


_FAM_TOKEN = re.compile(r"^(so|su|sp|u)\(?(\d+)\)?([ul]?)$")
_PAIR_TOKEN = re.compile(r"^(so|su|sp|u)\(?(\d+)\)?[x+](so|su|sp|u)\(?(\d+)\)?$")
_SU_TOKEN = re.compile(r"^s\(u\(?(\d+)\)?[x+]u\(?(\d+)\)?\)$")
_TRIVIAL = {"e", "0", "z2", "su(1)", "so(1)", "sp(0)", "su1", "so1", "sp0", "1"}


def _standalone(parent: MatrixLieAlgebra, token: str):
    """Resolve a block token to ``(standalone algebra, matrix map into parent)``."""
    if parent.family == "sum":
        m = re.match(r"^#(\d+)$", token)
        if m:
            idx = int(m.group(1)) - 1
            off = sum(a.n for a in parent.components[:idx])
            return parent.components[idx], _pad(parent.n, off)
    m = _FAM_TOKEN.match(token)
    if m and m.group(1) == parent.family:
        k = int(m.group(2))
        f = _ENTRY[parent.family]
        lo = 0 if m.group(3) != "l" else (parent.size - k) * f
        return catalog(f"{parent.family}({k})"), _pad(parent.n, lo)
    raise CatalogMiss(f"{token!r} is not a block subalgebra of {parent.name}")


def embed(parent: MatrixLieAlgebra, token: str) -> SubalgebraEmbedding:
    """Named subalgebra of ``parent``.

    Tokens: ``e``; ``fam(k)`` with optional ``u``/``l`` suffix for the upper or
    lower diagonal block; ``fam(a)xfam(b)`` block sums; ``s(u(a)xu(b))``;
    ``u(k)`` in so(2k) or sp(k); ``so(k)`` (real matrices) and ``sp(k)`` in
    su(n); ``u(1)`` in su(2); ``t`` for the shipped maximal torus; ``#i`` and
    ``diag`` in direct sums; ``A/B`` for ``B`` inside the block subalgebra ``A``;
    ``A&B`` for the intersection of two named subalgebras.
    """
    raw = token
    token = _normalize(token)
    name = f"{raw} < {parent.name}"
    fam, n, N = parent.family, parent.size, parent.n
    f = _ENTRY.get(fam, 1)

    if "&" in token:
        parts = [embed(parent, tok) for tok in token.split("&")]
        outs = [np.eye(parent.dim) - e.projector() for e in parts]
        return subspace_where(parent, lambda X: np.concatenate([O @ parent.coords(X) for O in outs]), name)
    if "/" in token:
        outer, inner_tok = token.split("/", 1)
        alg, emb = _standalone(parent, outer)
        sub = embed(alg, inner_tok)
        mats = [emb(B) for B in sub.basis]
        coords = np.array([parent.coords(M) for M in mats]).reshape(len(mats), parent.dim)
        return SubalgebraEmbedding(parent, coords, name)
    if token in _TRIVIAL:
        return SubalgebraEmbedding(parent, np.zeros((0, parent.dim)), name)
    if token in ("t", "torus"):
        coords = np.eye(parent.dim)[list(parent.torus)]
        return SubalgebraEmbedding(parent, coords, name)

    if fam == "sum":
        if token == "diag":
            a, b = parent.components
            if a.n != b.n:
                raise CatalogMiss("diagonal needs equal summands")
            return subspace_where(parent, lambda X: X[:a.n, :a.n] - X[a.n:, a.n:], name)
        alg, emb = _standalone(parent, token)
        coords = np.array([parent.coords(emb(B)) for B in alg.basis]).reshape(alg.dim, parent.dim)
        return SubalgebraEmbedding(parent, coords, name)

    m = _FAM_TOKEN.match(token)
    if m and m.group(1) == fam:
        k = int(m.group(2))
        if k > n:
            raise CatalogMiss(f"{raw!r} does not fit in {parent.name}")
        lo = 0 if m.group(3) != "l" else n - k
        mask = _outside_blocks(N, _block_ranges([k], f, lo))
        return subspace_where(parent, lambda X: X[mask], name)

    m = _PAIR_TOKEN.match(token)
    if m and m.group(1) == m.group(3) == fam:
        a, b = int(m.group(2)), int(m.group(4))
        if a + b != n:
            raise CatalogMiss(f"{raw!r} does not fit in {parent.name}")
        ranges = _block_ranges([a, b], f)
        mask = _outside_blocks(N, ranges)
        if fam == "su":
            def cond(X):
                Z = real_to_complex(X)
                return np.concatenate([X[mask], [np.trace(Z[:a, :a]).imag]])
            return subspace_where(parent, cond, name)
        return subspace_where(parent, lambda X: X[mask], name)

    m = _SU_TOKEN.match(token)
    if m and fam == "su":
        a, b = int(m.group(1)), int(m.group(2))
        if a + b != n:
            raise CatalogMiss(f"{raw!r} does not fit in {parent.name}")
        mask = _outside_blocks(N, _block_ranges([a, b], f))
        return subspace_where(parent, lambda X: X[mask], name)

    m = _FAM_TOKEN.match(token)
    if m and not m.group(3):
        sub_fam, k = m.group(1), int(m.group(2))
        if sub_fam == "u" and fam == "so" and 2 * k <= n:
            J = np.kron(np.eye(n // 2), np.array([[0.0, -1.0], [1.0, 0.0]]))
            if n % 2:
                J = np.pad(J, ((0, 1), (0, 1)))
            mask = _outside_blocks(N, [(0, 2 * k)])
            return subspace_where(parent, lambda X: np.concatenate([X[mask], (X @ J - J @ X)[:2 * k, :2 * k].ravel()]), name)
        if sub_fam == "u" and fam == "sp" and k <= n:
            mask = _outside_blocks(N, [(0, 4 * k)])
            return subspace_where(parent, lambda X: np.concatenate(
                [X[mask], X[2::4, 0::4].ravel(), X[3::4, 0::4].ravel()]), name)
        if sub_fam == "u" and k == 1 and fam == "su" and n == 2:
            return embed(parent, "t")
        if sub_fam == "so" and fam == "su" and k <= n:
            mask = _outside_blocks(N, [(0, 2 * k)])
            return subspace_where(parent, lambda X: np.concatenate([X[mask], X[1::2, 0::2].ravel()]), name)
        if sub_fam == "sp" and fam == "su" and 2 * k == n:
            # pairs (2i, 2i+1) carry one quaternionic coordinate, so block sums stay contiguous
            J = np.kron(np.eye(k), np.array([[0.0, -1.0], [1.0, 0.0]]))

            def cond(X):
                Z = real_to_complex(X)
                W = Z.T @ J + J @ Z
                return np.concatenate([W.real.ravel(), W.imag.ravel()])
            return subspace_where(parent, cond, name)
    raise CatalogMiss(f"unknown subalgebra {raw!r} of {parent.name}")
