"""Table-driven verification of the classification of fat homogeneous bundles.

Rows live in ``data/tables.txt`` (grammar documented in the file header).
Each row is checked against the necessary conditions available to a
computer: dimension arithmetic, parity of the base, the 4k/8k rules, rank
equality for even rank-one quotients, the symmetric-pair bracket test and,
for small realizable triples, the fatness search.  Nothing is corrected:
a row that fails a check is reported as such.
"""
from __future__ import annotations

import ast
import operator
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

import numpy as np

from . import liealg
from .errors import CatalogMiss, InvalidArgument
from .fatness import check_dimensional_constraints, fatness_margin
from .liealg import CatalogRecord, MatrixLieAlgebra, RANK_TOL
from .submersion import HomogeneousTriple, make_triple

TABLE_IDS = ("ziller-A", "symmetric-fiber-B", "berard-bergery-C", "table-A", "table-B")
PASS, FAIL, SKIPPED = "pass", "fail", "skipped"
FATNESS_MAX_DIM = 21
FAT_MARGIN_FLOOR = 1e-3

EQUALITY_CASE_DIMS = (1, 3, 7)
# fiber dimensions admitted only because a table row lists them (S^5 = SU(4)/Sp(2))
TABLE_EXCEPTIONS = (5,)


# ---------------------------------------------------------------------------
# fixture parsing
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Entry:
    display: str
    token: str


@dataclass
class TableRow:
    table_id: str
    label: str
    entries: dict
    meta: dict
    param: int | None = None

    @property
    def key(self) -> str:
        suffix = f"[n={self.param}]" if self.param is not None else ""
        return f"{self.table_id}:{self.label}{suffix}"

    def token(self, name: str) -> str:
        return self.entries[name].token

    def display(self, name: str) -> str:
        e = self.entries.get(name)
        if e is None:
            return ""
        return e.display if isinstance(e, Entry) else str(e)


_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul}


def _eval_int(expr: str, n: int) -> int:
    """Integer arithmetic in ``n`` (``+``, ``-``, ``*``, parentheses)."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return node.value
        if isinstance(node, ast.Name) and node.id == "n":
            return n
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        raise InvalidArgument(f"unsupported expression {expr!r}")

    return ev(ast.parse(expr, mode="eval"))


def _substitute(text: str, n: int | None) -> str:
    if n is None:
        if "{" in text and re.search(r"\{[^}]*\bn\b", text):
            raise InvalidArgument(f"parameterized field {text!r} in a row without params")
        return text
    return re.sub(r"\{([^}]*)\}", lambda m: str(_eval_int(m.group(1), n)), text)


def parse_rows(text: str) -> list[TableRow]:
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split("|")]
        if len(parts) != 3:
            raise InvalidArgument(f"line {lineno}: expected 'table | label | fields'")
        table_id, label, body = parts
        if table_id not in TABLE_IDS:
            raise InvalidArgument(f"line {lineno}: unknown table {table_id!r}")
        raw = {}
        for item in filter(None, (f.strip() for f in body.split(";"))):
            if "=" not in item:
                raise InvalidArgument(f"line {lineno}: field {item!r} has no '='")
            k, v = item.split("=", 1)
            raw[k.strip()] = v.strip()
        params = [None]
        if "params" in raw:
            name, values = raw.pop("params").split(":")
            if name.strip() != "n":
                raise InvalidArgument(f"line {lineno}: only the parameter n is supported")
            params = [int(v) for v in values.split(",")]
        for n in params:
            entries, meta = {}, {}
            for k, v in raw.items():
                if "@" in v:
                    disp, tok = (s.strip() for s in v.split("@", 1))
                    entries[k] = Entry(disp if n is None else f"{disp}", _substitute(tok, n))
                elif k in ("M", "B", "HK"):
                    entries[k] = v
                else:
                    meta[k] = _substitute(v, n)
            rows.append(TableRow(table_id, label, entries, meta, n))
    return rows


@lru_cache(maxsize=None)
def _shipped_text(name: str) -> str:
    return resources.files("fatsub.data").joinpath(name).read_text()


def load_table_rows(table_id: str | None = None) -> list[TableRow]:
    rows = parse_rows(_shipped_text("tables.txt"))
    if table_id is not None:
        if table_id not in TABLE_IDS:
            raise InvalidArgument(f"unknown table {table_id!r}")
        rows = [r for r in rows if r.table_id == table_id]
    return rows


def load_expected_flags() -> set[tuple[str, str]]:
    """``(row key, check name)`` pairs that are known to fail (data file)."""
    out = set()
    for line in _shipped_text("expected_flags.txt").splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            key, check = line.split()
            out.add((key, check))
    return out


# ---------------------------------------------------------------------------
# group resolution
# ---------------------------------------------------------------------------


@dataclass
class Group:
    """A group entry: its algebra data and, when realizable, its embedding."""

    dim: int
    rank: int
    algebra: MatrixLieAlgebra | None = None
    embedding: liealg.SubalgebraEmbedding | None = None

    @property
    def realizable(self) -> bool:
        return self.algebra is not None


def _split_product(token: str) -> list[str]:
    parts, depth, cur = [], 0, ""
    for ch in token:
        depth += ch == "("
        depth -= ch == ")"
        if ch == "x" and depth == 0:
            parts.append(cur)
            cur = ""
        else:
            cur += ch
    parts.append(cur)
    return parts


def _record_of(token: str) -> CatalogRecord:
    """Dimension/rank of a catalog name, a product ``AxB`` or ``s(u(a)xu(b))``."""
    tok = token.strip().lower()
    if tok in ("e", "z2", "{e}"):
        return CatalogRecord("e", 0, 0, True, None)
    m = re.fullmatch(r"s\(u\((\d+)\)xu\((\d+)\)\)", tok)
    if m:
        a, b = int(m.group(1)), int(m.group(2))
        return CatalogRecord(tok, a * a + b * b - 1, a + b - 1, True, None)
    parts = _split_product(tok)
    if len(parts) > 1:
        recs = [_record_of(p) for p in parts]
        return CatalogRecord(tok, sum(r.dim for r in recs), sum(r.rank for r in recs),
                             all(r.realizable for r in recs), None)
    return liealg.record(tok)


def _top(token: str) -> Group:
    rec = liealg.record(token)
    alg = liealg.algebra(token) if rec.realizable else None
    return Group(rec.dim, rec.rank, alg)


def _sub(parent: Group, token: str) -> Group:
    if parent.realizable:
        emb = liealg.embed(parent.algebra, token)
        return Group(emb.dim, subalgebra_rank(emb), parent.algebra, emb)
    rec = _record_of(token)
    return Group(rec.dim, rec.rank)


def subalgebra_rank(emb: liealg.SubalgebraEmbedding, seed: int = 0) -> int:
    """Rank as the centralizer dimension of a generic element."""
    if emb.dim == 0:
        return 0
    S = emb.coords
    c = emb.parent.c
    X = np.random.default_rng(seed).normal(size=emb.dim) @ S
    ad = np.einsum("i,bj,ijk->bk", X, S, c) @ S.T
    s = np.linalg.svd(ad, compute_uv=False)
    return int(emb.dim - np.sum(s > RANK_TOL * max(1.0, s[0])))


def symmetric_pair(g: MatrixLieAlgebra, h: liealg.SubalgebraEmbedding) -> bool:
    """``(g, h)`` is a symmetric pair; a trivial h is tested as ``(h ⊕ h, diagonal)``."""
    if h.dim == 0:
        doubled = liealg.direct_sum(g, g)
        return liealg.check_pair(liealg.orthogonal_complement(liealg.embed(doubled, "diag")))["symmetric"]
    return liealg.check_pair(liealg.orthogonal_complement(h))["symmetric"]


def _fiber_pair(H: Group, K: Group) -> bool:
    if K.dim == 0:
        return symmetric_pair(H.algebra, liealg.embed(H.algebra, "e"))
    return symmetric_pair(H.algebra, K.embedding)


# ---------------------------------------------------------------------------
# verdicts
# ---------------------------------------------------------------------------


def equality_case_rule(dim_fiber: int) -> bool:
    """Fiber dimension allowed when ``dim V = dim B - 1``."""
    return dim_fiber in EQUALITY_CASE_DIMS


def multiple_rule(dim_fiber: int) -> bool:
    """Fiber dimension a multiple of 2, 4 or 8."""
    return dim_fiber % 2 == 0


def fiber_dimension_rule(dim_fiber: int) -> bool:
    if dim_fiber < 1:
        raise InvalidArgument("fiber dimension must be positive")
    return equality_case_rule(dim_fiber) or multiple_rule(dim_fiber) or dim_fiber in TABLE_EXCEPTIONS


def fiber_rule_source(dim_fiber: int) -> str:
    if equality_case_rule(dim_fiber):
        return "equality-case"
    if multiple_rule(dim_fiber):
        return "multiple"
    if dim_fiber in TABLE_EXCEPTIONS:
        return "table-exception"
    return "none"


CHECKS = ("dim_ok", "even_base_ok", "multiples_ok", "rank_ok", "symmetric_pair_ok", "fatness_ok")


@dataclass
class RowVerdict:
    key: str
    row: TableRow
    dim_ok: str = SKIPPED
    even_base_ok: str = SKIPPED
    multiples_ok: str = SKIPPED
    rank_ok: str = SKIPPED
    symmetric_pair_ok: str = SKIPPED
    fatness_ok: str = SKIPPED
    margin: float | None = None
    notes: list = field(default_factory=list)

    def failures(self) -> list[str]:
        return [c for c in CHECKS if getattr(self, c) == FAIL]

    @property
    def passed(self) -> bool:
        return not self.failures()

    def to_dict(self) -> dict:
        out = {"key": self.key, "table_id": self.row.table_id}
        out.update({c: getattr(self, c) for c in CHECKS})
        out["margin"] = self.margin
        out["notes"] = "; ".join(self.notes)
        return out


def _tri(ok: bool) -> str:
    return PASS if ok else FAIL


def _fatness(v: RowVerdict, triple: HomogeneousTriple):
    if triple.dim > FATNESS_MAX_DIM:
        v.notes.append(f"fatness skipped: dim g = {triple.dim} > {FATNESS_MAX_DIM}")
        return
    rep = fatness_margin(triple)
    v.margin = float(rep.margin)
    v.fatness_ok = _tri(rep.verdict == "fat" and rep.margin > FAT_MARGIN_FLOOR)
    if v.fatness_ok == FAIL:
        v.notes.append(f"fatness search says {rep.verdict}" + (f" ({rep.reason})" if rep.reason else ""))


def _verify_ziller(row: TableRow, v: RowVerdict):
    H, Hp = _top(row.token("H")), _top(row.token("Hp"))
    K, Kp = _sub(H, row.token("K")), _sub(Hp, row.token("Kp"))
    dim_M, dim_B = H.dim - K.dim, Hp.dim - Kp.dim
    v.dim_ok = _tri(dim_M - dim_B == 3)
    if v.dim_ok == FAIL:
        v.notes.append(f"dim M - dim B = {dim_M} - {dim_B} = {dim_M - dim_B}, structure group has dim 3")
    v.even_base_ok = _tri(dim_B % 2 == 0)
    cons = check_dimensional_constraints(3, dim_B)
    v.multiples_ok = _tri(cons.overall)
    if not cons.overall:
        v.notes.append(cons.detail)
    if row.meta.get("rank_one") == "base" and dim_B % 2 == 0:
        v.rank_ok = _tri(Hp.rank == Kp.rank)
    if Hp.realizable:
        v.symmetric_pair_ok = _tri(_fiber_pair(Hp, Kp))
    if "triple" in row.meta:
        g, h, k = (s.strip() for s in row.meta["triple"].split(","))
        _fatness(v, make_triple(g, h, k, row.key))


def _verify_fiber(row: TableRow, v: RowVerdict):
    H = _top(row.token("H"))
    K = _sub(H, row.token("K"))
    dim = int(row.meta["dim"])
    if row.display("HK") == "(unnamed)":
        v.notes.append("H/K name cell is blank in the source table; placeholder name used")
    v.dim_ok = _tri(H.dim - K.dim == dim)
    if v.dim_ok == FAIL:
        v.notes.append(f"dim H - dim K = {H.dim - K.dim}, recorded {dim}")
    v.multiples_ok = _tri(fiber_dimension_rule(dim))
    src = fiber_rule_source(dim)
    if src == "table-exception":
        v.notes.append(f"fiber dimension {dim} admitted as a table-sourced exception")
    elif src == "none":
        v.notes.append(f"fiber dimension {dim} is odd and not in {EQUALITY_CASE_DIMS}")
    if row.meta.get("rank_one") == "fiber" and dim % 2 == 0:
        v.rank_ok = _tri(H.rank == K.rank)
    if H.realizable:
        v.symmetric_pair_ok = _tri(_fiber_pair(H, K))
    else:
        v.notes.append("arithmetic-only row")


def _verify_bb(row: TableRow, v: RowVerdict):
    G = _top(row.token("G"))
    H, K = _sub(G, row.token("H")), _sub(G, row.token("K"))
    dim_B, dim_F = G.dim - H.dim, H.dim - K.dim
    ok = 0 <= K.dim < H.dim < G.dim
    if ok and G.realizable:
        ok = H.embedding.contains(K.embedding)
        if not ok:
            v.notes.append("K is not contained in H")
    v.dim_ok = _tri(ok)
    v.even_base_ok = _tri(dim_B % 2 == 0)
    if dim_B % 2:
        v.notes.append(f"base G/H has odd dimension {dim_B}")
    cons = check_dimensional_constraints(dim_F, dim_B)
    v.multiples_ok = _tri(cons.overall)
    if not cons.overall:
        v.notes.append(f"(dim V, dim B) = ({dim_F}, {dim_B}) {cons.detail}")
    if row.meta.get("rank_one") == "fiber" and dim_F % 2 == 0:
        v.rank_ok = _tri(H.rank == K.rank)
    if not G.realizable:
        v.notes.append("arithmetic-only row")
        return
    base_sym = symmetric_pair(G.algebra, H.embedding)
    if K.dim == 0:
        fib_alg = H.embedding.as_algebra()
        fiber_sym = symmetric_pair(fib_alg, liealg.embed(fib_alg, "e"))
    else:
        fiber_sym = liealg.check_pair(liealg.orthogonal_complement(K.embedding, H.embedding))["symmetric"]
    v.symmetric_pair_ok = _tri(base_sym and fiber_sym)
    if not base_sym:
        v.notes.append("base G/H is not a symmetric pair")
    if not fiber_sym:
        v.notes.append("fiber H/K is not a symmetric pair")
    if v.dim_ok == PASS and H.dim > K.dim:
        _fatness(v, HomogeneousTriple(G.algebra, H.embedding, K.embedding, row.key))


def _verify_table_b(row: TableRow, v: RowVerdict):
    G = _top(row.token("G"))
    H = _sub(G, row.token("H"))
    dim_B = G.dim - H.dim
    v.dim_ok = _tri(0 <= H.dim < G.dim)
    v.even_base_ok = _tri(dim_B % 2 == 0)
    if dim_B % 2:
        v.notes.append(f"base G/H has odd dimension {dim_B}")
    if G.realizable:
        v.symmetric_pair_ok = _tri(symmetric_pair(G.algebra, H.embedding))
    else:
        v.notes.append("arithmetic-only row")


_VERIFIERS = {
    "ziller-A": _verify_ziller,
    "symmetric-fiber-B": _verify_fiber,
    "table-A": _verify_fiber,
    "berard-bergery-C": _verify_bb,
    "table-B": _verify_table_b,
}


def verify_row(row: TableRow) -> RowVerdict:
    """Run every applicable check on one row; see the module docstring."""
    v = RowVerdict(row.key, row)
    _VERIFIERS[row.table_id](row, v)
    return v


def verify_tables(table_id: str | None = None) -> list[RowVerdict]:
    return [verify_row(r) for r in load_table_rows(table_id)]


_HEADERS = {
    "ziller-A": ("M", "H", "K", "B", "Hp", "Kp"),
    "symmetric-fiber-B": ("HK", "H", "K", "dim"),
    "table-A": ("HK", "H", "K", "dim"),
    "berard-bergery-C": ("G", "H", "K"),
    "table-B": ("G", "H"),
}
_SHORT = {PASS: "ok", FAIL: "FAIL", SKIPPED: "-"}


def format_verdicts(verdicts: list[RowVerdict]) -> str:
    """Plain-text table per source table, columns as in the printed tables plus checks."""
    out = []
    for tid in TABLE_IDS:
        vs = [v for v in verdicts if v.row.table_id == tid]
        if not vs:
            continue
        cols = list(_HEADERS[tid]) + ["n", "dim", "even", "mult", "rank", "sym", "fat"]
        body = []
        for v in vs:
            r = v.row
            cells = [r.meta.get(c, "") if c == "dim" else r.display(c) for c in _HEADERS[tid]]
            cells.append("" if r.param is None else str(r.param))
            cells += [_SHORT[getattr(v, c)] for c in CHECKS]
            body.append(cells)
        widths = [max(len(str(x)) for x in col) for col in zip(cols, *body)]
        line = lambda cells: "  ".join(str(c).ljust(w) for c, w in zip(cells, widths)).rstrip()
        out.append(tid)
        out.append(line(cols))
        out.append(line(["-" * w for w in widths]))
        out.extend(line(b) for b in body)
        notes = [(v.key, n) for v in vs for n in v.notes]
        out.extend(f"  note {k}: {n}" for k, n in notes)
        out.append("")
    return "\n".join(out)


# ---------------------------------------------------------------------------
# candidate search
# ---------------------------------------------------------------------------


@dataclass
class Candidate:
    g: str
    h: str
    k: str
    dim_g: int
    dim_m: int
    dim_p: int
    margin: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _h_tokens(fam: str, n: int) -> list[str]:
    out = []
    for a in range(1, n):
        b = n - a
        if a >= b:
            out.append(f"{fam}({a})x{fam}({b})" if fam != "su" else f"s(u({a})xu({b}))")
        if fam != "su" or a >= 2:
            out.append(f"{fam}({a})")
    if fam == "so" and n % 2 == 0:
        out.append(f"u({n // 2})")
    if fam == "sp":
        out.append(f"u({n})")
    if fam == "su":
        if n >= 3:
            out.append(f"so({n})")
        if n % 2 == 0:
            out.append(f"sp({n // 2})")
    return out


def _k_tokens(fam: str, h: str) -> list[str]:
    out = ["e"]
    m = re.fullmatch(r"(so|su|sp|u)\((\d+)\)x(so|su|sp|u)\((\d+)\)", h)
    if m:
        out += [f"{m.group(1)}({m.group(2)})", f"{m.group(3)}({m.group(4)})l"]
    m = re.fullmatch(r"s\(u\((\d+)\)xu\((\d+)\)\)", h)
    if m:
        a, b = int(m.group(1)), int(m.group(2))
        if a >= 2:
            out.append(f"su({a})")
        if b >= 2:
            out.append(f"su({b})l")
    return out


def enumerate_candidates(max_dim_g: int = 10, families=("so", "su", "sp")) -> list[Candidate]:
    """Classical triples ``(g, h, k)`` passing every obstruction, fatness included.

    Circle fibers (dim p = 1) are excluded.  Sorted by ``(dim g, names)``.
    """
    if max_dim_g > 36:
        raise InvalidArgument("max_dim_g must be <= 36")
    seen, out = set(), []
    for name, rec in sorted(liealg.catalog_records().items()):
        fam = rec.generator
        if not rec.realizable or fam not in families or rec.dim > max_dim_g or rec.dim == 0:
            continue
        if name.startswith("spin"):
            continue
        n = int(re.search(r"\d+", name).group())
        g = liealg.algebra(name)
        for h_tok in _h_tokens(fam, n):
            try:
                h = liealg.embed(g, h_tok)
            except CatalogMiss:
                continue
            dim_m = g.dim - h.dim
            if dim_m < 2 or dim_m % 2:
                continue
            if not symmetric_pair(g, h):
                continue
            for k_tok in _k_tokens(fam, h_tok):
                try:
                    k = liealg.embed(g, k_tok)
                except CatalogMiss:
                    continue
                dim_p = h.dim - k.dim
                if dim_p < 2 or not h.contains(k):
                    continue
                if not check_dimensional_constraints(dim_p, dim_m).overall:
                    continue
                sig = (g.dim, name, h.dim, k.dim, h_tok, k_tok)
                if sig in seen:
                    continue
                seen.add(sig)
                triple = HomogeneousTriple(g, h, k)
                rep = fatness_margin(triple)
                if rep.verdict != "fat":
                    continue
                out.append(Candidate(name, h_tok, k_tok, g.dim, dim_m, dim_p, float(rep.margin)))
    out.sort(key=lambda c: (c.dim_g, c.g, c.h, c.k))
    return out
