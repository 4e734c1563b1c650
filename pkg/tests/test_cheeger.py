import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import FAT_TRIPLES, random_spd, triple, unit
from fatsub import cheeger as C
from fatsub.errors import InvalidArgument, InvalidMetric
from fatsub.submersion import left_invariant_curvature, vertizontal_sec


@pytest.fixture
def spd_pair(rng):
    return random_spd(rng, 4), random_spd(rng, 4)


def test_deform_zero_is_identity(spd_pair):
    O, _ = spd_pair
    np.testing.assert_allclose(C.deform(O, 0.0), O, atol=1e-13)


def test_deform_scalar():
    np.testing.assert_allclose(C.deform(2.0 * np.eye(3), 1.5), (2.0 / 4.0) * np.eye(3))


def test_deform_is_a_flow(spd_pair):
    # O_{s+t} = (O_s)_t
    O, _ = spd_pair
    np.testing.assert_allclose(C.deform(C.deform(O, 0.7), 2.3), C.deform(O, 3.0), rtol=1e-12)


@pytest.mark.parametrize("t", [-1.0, np.inf, np.nan])
def test_bad_parameter(t):
    with pytest.raises(InvalidArgument):
        C.deform(np.eye(2), t)


def test_non_spd_rejected():
    with pytest.raises(InvalidMetric):
        C.orbit_tensor(np.diag([1.0, 0.0]))


def test_apply_Ct_contracts_orbit_part(spd_pair):
    O, _ = spd_pair
    X, U = C.apply_Ct(O, 10.0, [1.0, 2.0], np.ones(4))
    np.testing.assert_array_equal(X, [1.0, 2.0])
    assert np.linalg.norm(U) < np.linalg.norm(np.ones(4))


def test_tilde_tensors(spd_pair):
    O, OF = spd_pair
    d = C.tilde_tensors(O, OF, 2.0)
    # harmonic-mean form: Õ⁻¹ = O_F⁻¹ + O_t⁻¹
    np.testing.assert_allclose(np.linalg.inv(d.O_tilde), np.linalg.inv(OF) + np.linalg.inv(d.O_t), rtol=1e-10)
    np.testing.assert_allclose(d.C_tilde, -np.linalg.solve(O, d.O_tilde), rtol=1e-10)


def test_tilde_shape_mismatch():
    with pytest.raises(InvalidArgument):
        C.tilde_tensors(np.eye(2), np.eye(3), 1.0)


@settings(max_examples=40, deadline=None)
@given(st.floats(0, 100), st.integers(0, 2**31 - 1))
def test_lift_orthogonal_and_reconstructs(t, seed):
    rng = np.random.default_rng(seed)
    O, OF = random_spd(rng, 3), random_spd(rng, 3)
    X, XF, U = rng.normal(size=2), rng.normal(size=2), rng.normal(size=3)
    lift = C.horizontal_lift(O, OF, t, X, XF, U)
    assert C.lift_orthogonality_residual(O, OF, t, lift) < 1e-12 * max(1.0, np.abs(U).max() * 20)
    np.testing.assert_allclose(lift.W_star - lift.V_vee, U, atol=1e-11)


def test_qt_metric_matches_gram(spd_pair, rng):
    O, OF = spd_pair
    G = C.qt_gram(O, OF, 3.0, 2)
    a, b = rng.normal(size=(2, 6))
    assert C.qt_metric(O, OF, 3.0, (a[:2], a[2:]), (b[:2], b[2:])) == pytest.approx(a @ G @ b, rel=1e-10)


def test_qt_horizontal_unchanged():
    X, Y = np.array([1.0, 2.0]), np.array([0.5, -1.0])
    z = np.zeros(3)
    assert C.qt_metric(np.eye(3), np.eye(3), 1.0, (X, z), (Y, z)) == pytest.approx(X @ Y)


def test_qt_converges_to_q():
    res = [np.abs(C.qt_gram(np.eye(2), np.eye(2), t, 2) - np.eye(4)).max() for t in (1, 10, 100, 1000)]
    assert all(a > b for a, b in zip(res, res[1:]))
    assert res[-1] < 3e-3


def test_deformed_curvature_t0(sp2, rng):
    X, V = unit(rng, sp2.dm), unit(rng, sp2.dp)
    assert C.deformed_vertizontal_sec(sp2, 0.0, X, V) == pytest.approx(vertizontal_sec(sp2, X, V))


@pytest.mark.parametrize("g, h, k", FAT_TRIPLES)
@pytest.mark.parametrize("t", [0.1, 1.0, 10.0, 100.0])
def test_deformed_curvature_positive_and_oracle(g, h, k, t, rng):
    tr = triple(g, h, k)
    phi = C.deformed_metric_operator(tr, t)
    for _ in range(5):
        X, V = unit(rng, tr.dm), unit(rng, tr.dp)
        K = C.deformed_vertizontal_sec(tr, t, X, V)
        assert K > 0
        assert K == pytest.approx(left_invariant_curvature(tr, phi, tr.embed_m(X), tr.embed_p(V)), abs=1e-10)


def test_deformed_curvature_scaled_orbit(sp2, rng):
    X, V = unit(rng, 4), unit(rng, 3)
    phi = C.deformed_metric_operator(sp2, 2.0, scale=0.5)
    assert C.deformed_vertizontal_sec(sp2, 2.0, X, V, scale=0.5) == pytest.approx(
        left_invariant_curvature(sp2, phi, sp2.embed_m(X), sp2.embed_p(V)), abs=1e-10)
