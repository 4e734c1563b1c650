import csv

import numpy as np
import pytest
from scipy.linalg import expm

from conftest import triple, unit
from fatsub import holonomy as H
from fatsub.errors import IntegrationDiverged, InvalidArgument
from fatsub.submersion import left_invariant_curvature


def _shape(rng, n, norm=0.5):
    A = rng.normal(size=(n, n))
    S = A + A.T
    return norm * S / np.linalg.norm(S, 2)


@pytest.fixture
def spec():
    return H.GeodesicSpec(np.eye(4)[0], horizon=2.0, step=1e-3)


def test_spec_validation():
    with pytest.raises(InvalidArgument):
        H.GeodesicSpec(np.array([1.0, 1.0]))
    with pytest.raises(InvalidArgument):
        H.GeodesicSpec(np.array([1.0, 0.0]), horizon=1.0, step=0.3)
    s = H.GeodesicSpec(np.array([0.0, 1.0]), horizon=1.0, step=0.25)
    assert s.nsteps == 4
    np.testing.assert_allclose(s.times, [0, 0.25, 0.5, 0.75, 1.0])


def test_totally_geodesic_field_is_constant(sp2, spec, rng):
    xi0 = unit(rng, 3)
    tr = H.integrate_holonomy(sp2, spec, xi0)
    np.testing.assert_allclose(tr.values, np.broadcast_to(xi0, tr.values.shape), atol=1e-14)
    assert tr.subspace_drift == 0.0
    assert tr.cancellation_residual < H.CANCEL_TOL


def test_zero_field_stays_zero(sp2, spec):
    assert not H.integrate_holonomy(sp2, spec, np.zeros(3)).values.any()


def test_matches_matrix_exponential(sp2, spec, rng):
    S = _shape(rng, 3)
    xi0 = unit(rng, 3)
    tr = H.integrate_holonomy(sp2, spec, xi0, S)
    np.testing.assert_allclose(tr.values[-1], expm(-S * spec.horizon) @ xi0, rtol=1e-10)


def test_pairing_constant_with_shape_operator(sp2, spec, rng):
    S = _shape(rng, 3)
    xi = H.integrate_holonomy(sp2, spec, unit(rng, 3), S)
    nu = H.integrate_dual_holonomy(sp2, spec, unit(rng, 3), S)
    pairing = np.einsum("ni,ni->n", xi.values, nu.values)
    assert np.ptp(pairing) < 1e-10


def test_bad_inputs(sp2, spec):
    with pytest.raises(InvalidArgument):
        H.integrate_holonomy(sp2, spec, np.ones(2))
    with pytest.raises(InvalidArgument):
        H.integrate_holonomy(sp2, spec, np.ones(3), np.arange(9.0).reshape(3, 3))


def test_blow_up_raises(sp2):
    spec = H.GeodesicSpec(np.eye(4)[0], horizon=10.0, step=0.5)
    with pytest.raises(IntegrationDiverged):
        H.integrate_holonomy(sp2, spec, np.ones(3), -1e5 * np.eye(3))


def test_basic_fields_pairing(sp2, rng):
    V = unit(rng, 3)
    spec = H.GeodesicSpec(np.eye(4)[0], horizon=5.0, step=1e-3)
    a = H.integrate_basic_field(sp2, V, spec, unit(rng, 4))
    b = H.integrate_basic_field(sp2, V, spec, unit(rng, 4))
    assert a.subspace_drift < H.DRIFT_TOL
    assert np.ptp(a.norms) < 1e-10
    assert H.paired_basic_drift(sp2, a, b) < 1e-10


@pytest.mark.parametrize("g, h, k", [("sp2", "sp1xsp1", "sp1u"), ("su3", "s(u2xu1)", "e"), ("su3", "su2", "e")])
def test_discriminant_nonpositive(g, h, k, rng):
    tr = triple(g, h, k)
    for _ in range(200):
        X, Z, xi = rng.normal(size=tr.dm), rng.normal(size=tr.dm), rng.normal(size=tr.dp)
        a, b, c = H.quadratic_curvature_poly(tr, X, Z, xi)
        assert b * b - a * c <= 1e-10


def test_polynomial_matches_oracle(sp2, rng):
    X, Z, xi = rng.normal(size=4), rng.normal(size=4), rng.normal(size=3)
    a, b, c = H.quadratic_curvature_poly(sp2, X, Z, xi)
    Xf = sp2.embed_m(X)
    for s in (0.5, 1.0, 3.0):
        W = sp2.embed_p(xi) + s * sp2.embed_m(Z)
        br = sp2.bracket(Xf, W)
        oracle = left_invariant_curvature(sp2, np.eye(sp2.dim), Xf, W) + 0.75 * br[sp2.sk] @ br[sp2.sk]
        assert a * s * s + 2 * b * s + c == pytest.approx(oracle, abs=1e-10)
        assert H.total_space_sec(sp2, Xf, W) == pytest.approx(oracle, abs=1e-10)


def test_kernel_propagation(non_fat, rng):
    X = unit(rng, non_fat.dm)
    ker = H.astar_kernel(non_fat, X)
    assert len(ker) >= 1
    rep = H.flat_geodesic_propagation(non_fat, X)
    assert rep.passed and not rep.kernel_empty
    spec = H.GeodesicSpec(X, 10.0, 1e-2)
    assert len(set(H.kernel_rank_track(non_fat, spec))) == 1


def test_kernel_empty_when_fat(sp2, rng):
    rep = H.flat_geodesic_propagation(sp2, unit(rng, 4))
    assert rep.kernel_empty and rep.passed


def test_seed_outside_kernel_rejected(non_fat):
    X = np.eye(non_fat.dm)[0]
    ker = H.astar_kernel(non_fat, X)
    off = np.linalg.svd(ker)[2][-1]  # orthogonal to the kernel
    with pytest.raises(InvalidArgument):
        H.flat_geodesic_propagation(non_fat, X, off)


def test_csv_columns(sp2, spec, tmp_path, rng):
    xi = H.integrate_holonomy(sp2, spec, unit(rng, 3))
    nu = H.integrate_dual_holonomy(sp2, spec, unit(rng, 3))
    path = tmp_path / "traj.csv"
    H.write_trajectory_csv(path, xi, sp2, spec.direction, nu)
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["t", "v0", "v1", "v2", "a_star_norm", "pairing"]
    assert len(rows) == spec.nsteps + 2
    # fat: |A*_X xi| = |xi| / 2 for the Hopf triple
    assert float(rows[1][4]) == pytest.approx(0.5)
