"""The numba and numpy paths of every kernel must agree."""
import os
import subprocess
import sys

import numpy as np
import pytest

from gengsp import _kernels as K


def _args(rng):
    nodes = rng.integers(0, 7, 40).astype(np.int64)
    starts = rng.uniform(0, 5, 40)
    ends = starts + rng.uniform(0, 1, 40)
    return {
        "exp_eval": (rng.uniform(0, 6, 30), np.arange(-4, 4) + 0.5, 2.0),
        "cheb_eval": (rng.uniform(-1, 1, 30), 9),
        "design_matrix": (rng.normal(size=(30, 3)) + 0j, rng.normal(size=(30, 4)) + 1j),
        "step_coeffs": (nodes, starts, ends, np.linspace(-3, 3, 7), 7, 1.5),
        "slot_status": (nodes, starts, ends, np.linspace(0, 6, 13), 7),
    }


@pytest.mark.parametrize("name", ["exp_eval", "cheb_eval", "design_matrix",
                                  "step_coeffs", "slot_status"])
def test_backends_agree(name, rng):
    args = _args(rng)[name]
    a = getattr(K, name + "_np")(*args)
    b = getattr(K, name + "_jit")(*args)
    assert a.shape == b.shape
    assert np.allclose(a, b, atol=1e-13, rtol=1e-12)


def test_cheb_eval_orthonormal_values():
    x = np.array([1.0, -1.0, 0.0])
    t = K.cheb_eval_np(x, 3)
    assert np.allclose(t[:, 0], 1 / np.sqrt(np.pi))
    assert np.allclose(t[:, 2], np.sqrt(2 / np.pi) * (2 * x ** 2 - 1))


def test_slot_status_left_closed():
    out = K.slot_status_np(np.array([0]), np.array([1.0]), np.array([2.0]),
                           np.array([0.5, 1.0, 1.5, 2.0]), 1)
    assert out.tolist() == [[0.0, 1.0, 1.0, 0.0]]


def test_env_flag_selects_numpy_backend():
    env = dict(os.environ, GENGSP_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c",
                          "from gengsp import _kernels as K; print(K.BACKEND, K.exp_eval is K.exp_eval_np)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["numpy", "True"]


def test_default_backend_uses_numba_when_available():
    if not K.HAVE_NUMBA:
        pytest.skip("numba disabled in this environment")
    assert K.BACKEND == "numba" and K.exp_eval is K.exp_eval_jit
