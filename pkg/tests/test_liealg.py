import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fatsub import liealg as L
from fatsub.errors import CatalogMiss, NotASubalgebra


@pytest.mark.parametrize("name, dim", [
    ("so3", 3), ("so(5)", 10), ("so7", 21),
    ("su2", 3), ("su(3)", 8), ("su4", 15),
    ("sp1", 3), ("sp2", 10), ("sp3", 21),
    ("u2", 4), ("spin3", 3),
])
def test_dimensions(name, dim):
    assert L.algebra(name).dim == dim


@pytest.mark.parametrize("name", ["so4", "so5", "su3", "sp2", "u2", "su2+su2"])
def test_structure_constants_are_a_lie_algebra(name):
    g = L.algebra(name)
    assert g.is_orthonormal
    sc = g.structure
    assert sc.total_antisymmetry_residual() < 1e-12
    assert sc.jacobi_residual() < 1e-10


@pytest.mark.parametrize("name, factor", [
    ("so4", -2), ("so5", -3), ("su2", -4), ("su3", -6), ("sp1", -8), ("sp2", -12),
])
def test_killing_form_is_multiple_of_q(name, factor):
    K = L.killing_form(L.algebra(name))
    np.testing.assert_allclose(K, factor * np.eye(len(K)), atol=1e-10)


def test_matrix_bracket_matches_constants():
    g = L.algebra("sp2")
    rng = np.random.default_rng(3)
    x, y = rng.normal(size=(2, g.dim))
    direct = g.coords(L.bracket(g.element(x), g.element(y)))
    np.testing.assert_allclose(direct, g.structure.bracket(x, y), atol=1e-12)


@pytest.mark.parametrize("parent, token, dim", [
    ("su3", "s(u2xu1)", 4),
    ("su3", "so3", 3),
    ("sp2", "sp1xsp1", 6),
    ("so5", "so4", 6),
    ("su3", "so3&su2", 1),
    ("su4", "sp2&s(u2xu2)", 6),
])
def test_embedding_dims(parent, token, dim):
    emb = L.embed(L.algebra(parent), token)
    assert emb.dim == dim
    assert emb.closure_residual() < 1e-10


@pytest.mark.parametrize("parent, token, symmetric", [
    ("su3", "s(u2xu1)", True),
    ("su3", "so3", True),
    ("su3", "su2", False),
    ("sp2", "sp1xsp1", True),
    ("so5", "so4", True),
])
def test_check_pair(parent, token, symmetric):
    split = L.orthogonal_complement(L.embed(L.algebra(parent), token))
    assert split.orthogonality_residual() < 1e-12
    flags = L.check_pair(split)
    assert flags["reductive"]
    assert flags["symmetric"] is symmetric


def test_non_closed_subspace_rejected():
    with pytest.raises(NotASubalgebra):
        L.SubalgebraEmbedding(L.algebra("so3"), np.eye(3)[:2])


def test_catalog_miss_and_arithmetic_entries():
    with pytest.raises(CatalogMiss):
        L.catalog("nosuch")
    rec = L.record("e6")
    assert (rec.dim, rec.rank, rec.realizable) == (78, 6, False)
    with pytest.raises(CatalogMiss):
        L.algebra("e6")


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=20, max_size=20))
def test_bracket_antisymmetric_and_ad_invariant(vals):
    g = L.algebra("sp2")
    x, y = np.array(vals[:10]), np.array(vals[10:])
    sc = g.structure
    np.testing.assert_allclose(sc.bracket(x, y), -sc.bracket(y, x), atol=1e-9)
    # ad_x is skew for the bi-invariant metric
    A = sc.ad(x)
    np.testing.assert_allclose(A, -A.T, atol=1e-9)
