import os
import subprocess
import sys

import numpy as np
import pytest

from fatsub import _kernels as K

needs_numba = pytest.mark.skipif(not K.USE_NUMBA, reason="numba path disabled")


@pytest.fixture
def tensor(rng):
    return rng.normal(size=(6, 4, 3)), rng.normal(size=(50, 3))


def test_numpy_sweep_matches_svd(tensor):
    T, pts = tensor
    out = K.sigma_min_sweep_numpy(T, pts, chunk=7)
    ref = [np.linalg.svd(np.einsum("rsk,k->rs", T, u), compute_uv=False)[-1] for u in pts]
    np.testing.assert_allclose(out, ref, rtol=1e-12)


@needs_numba
def test_backends_agree(tensor, rng):
    T, pts = tensor
    np.testing.assert_allclose(K.sigma_min_sweep_numba(T, pts), K.sigma_min_sweep_numpy(T, pts), rtol=1e-12)
    M = rng.normal(size=(5, 5))
    u0 = rng.normal(size=5)
    np.testing.assert_allclose(K.rk4_linear_numba(M, u0, 1e-2, 200), K.rk4_linear_numpy(M, u0, 1e-2, 200),
                               rtol=1e-12)


@pytest.mark.parametrize("fn", [K.sigma_min_sweep_numpy, K.sigma_min_sweep])
def test_empty_inputs(fn):
    assert fn(np.zeros((0, 0, 2)), np.ones((3, 2))).tolist() == [0.0, 0.0, 0.0]
    assert fn(np.ones((2, 2, 2)), np.zeros((0, 2))).shape == (0,)


def test_rk4_fourth_order():
    M = np.array([[0.0, 1.0], [-1.0, 0.0]])
    exact = np.array([np.cos(1.0), -np.sin(1.0)])
    errs = [np.abs(K.rk4_linear(M, np.array([1.0, 0.0]), 1.0 / n, n)[-1] - exact).max() for n in (10, 20)]
    assert errs[0] / errs[1] >= 12


def test_env_flag_selects_numpy():
    env = dict(os.environ, FATSUB_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", "from fatsub import _kernels; print(_kernels.backend())"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
