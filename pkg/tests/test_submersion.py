import numpy as np
import pytest
from scipy.stats import ortho_group

from conftest import CATALOG_TRIPLES, triple, unit
from fatsub import submersion as S
from fatsub.errors import InvalidMetric, NotASubalgebra


@pytest.mark.parametrize("g, h, k", CATALOG_TRIPLES)
def test_adapted_frame(g, h, k):
    t = triple(g, h, k)
    assert t.dm + t.dp + t.dk == t.dim
    assert max(t.invariant_residuals().values()) < 1e-10


def test_k_outside_h_rejected():
    with pytest.raises(NotASubalgebra):
        S.make_triple("su3", "so3", "s(u2xu1)")


@pytest.mark.parametrize("g, h, k", [("sp2", "sp1xsp1", "sp1u"), ("su3", "s(u2xu1)", "e"), ("so5", "so4", "so3")])
def test_a_tensor_dual_and_skew(g, h, k, rng):
    t = triple(g, h, k)
    X, Y, V = unit(rng, t.dm), unit(rng, t.dm), unit(rng, t.dp)
    assert S.a_tensor(t, X, Y) @ V == pytest.approx(Y @ S.a_star(t, X, V), abs=1e-12)
    np.testing.assert_allclose(S.a_tensor(t, X, Y), -S.a_tensor(t, Y, X), atol=1e-12)


def test_vertizontal_matches_koszul(sp2, rng):
    phi = np.eye(sp2.dim)
    for _ in range(20):
        X, V = unit(rng, sp2.dm), unit(rng, sp2.dp)
        oracle = S.left_invariant_curvature(sp2, phi, sp2.embed_m(X), sp2.embed_p(V))
        assert S.vertizontal_sec(sp2, X, V) == pytest.approx(oracle, abs=1e-12)


def test_hopf_vertizontal_is_quarter(sp2, rng):
    # S^7 -> S^4 with the round normal metric: |A*_X V|^2 = 1/4 on unit vectors
    for _ in range(10):
        assert S.vertizontal_sec(sp2, unit(rng, 4), unit(rng, 3)) == pytest.approx(0.25, abs=1e-12)


def test_biinvariant_matches_koszul(rng):
    t = triple("su3", "su2", "e")
    X, Y = rng.normal(size=(2, t.dim))
    assert S.biinvariant_sec(t, X, Y) == pytest.approx(
        S.left_invariant_curvature(t, np.eye(t.dim), X, Y), rel=1e-10)


def test_symmetric_base_curvature(rng):
    # [m, m] lies in h, so the base curvature is |[X, Y]|^2
    t = triple("su3", "s(u2xu1)", "e")
    X, Y = rng.normal(size=(2, t.dm))
    b = t.bracket(t.embed_m(X), t.embed_m(Y))
    assert S.oneill_base_sec(t, X, Y) == pytest.approx(b @ b, rel=1e-12)


def test_rebasing_leaves_curvature_invariant(sp2, rng):
    Rm, Rp = ortho_group.rvs(4, random_state=1), ortho_group.rvs(3, random_state=2)
    t2 = sp2.rebased(Rm, Rp)
    X, V = unit(rng, 4), unit(rng, 3)
    assert S.vertizontal_sec(t2, X, V) == pytest.approx(S.vertizontal_sec(sp2, Rm.T @ X, Rp.T @ V), abs=1e-12)


def test_degenerate_plane_is_zero(sp2):
    X = np.eye(4)[0]
    assert S.oneill_base_sec(sp2, X, X) == pytest.approx(0.0, abs=1e-14)


@pytest.mark.parametrize("phi", [np.diag([1.0, -1.0, 1.0]), np.ones((3, 2)), np.array([[1.0, 2.0, 0], [0, 1, 0], [0, 0, 1]])])
def test_bad_metric_rejected(phi):
    with pytest.raises(InvalidMetric):
        S.check_spd(phi)
