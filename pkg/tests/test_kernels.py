import importlib
import subprocess
import sys

import numpy as np
import pytest

from suplift import _kernels_py, kernels

try:
    from suplift import _kernels as compiled
except ImportError:
    compiled = None

needs_compiled = pytest.mark.skipif(compiled is None, reason="compiled extension not built")


def affine_inputs(k, seed):
    rng = np.random.default_rng(seed)
    fidx = rng.integers(0, 12, (k, 2)).astype(np.int64)
    gidx = rng.integers(0, 12, (k, 2)).astype(np.int64)
    return (rng.uniform(0.1, 2, k), fidx, rng.uniform(0.1, 2, k), gidx, 1, 3,
            np.zeros(2, dtype=np.int64), np.array([48, 48], dtype=np.int64), -0.5, 0.25, 0.75)


def heisenberg_inputs(k, seed):
    rng = np.random.default_rng(seed)
    return (rng.uniform(0.1, 2, k), np.ascontiguousarray(rng.uniform(-1, 1, (k, 3))),
            rng.uniform(0.1, 2, k), np.ascontiguousarray(rng.uniform(-1, 1, (k, 3))),
            np.full(3, -2.5), np.full(3, 0.25), np.array([20, 20, 20], dtype=np.int64), 0.0, 0.5, 0.5)


def test_backend_is_reported():
    assert kernels.BACKEND in ("cython", "numpy")


def test_numpy_affine_kernel_by_hand():
    out = _kernels_py.affine_pair_max(np.array([4.0]), np.array([[0]]), np.array([9.0]), np.array([[2]]),
                                      1, 1, np.zeros(1, dtype=np.int64), np.array([4], dtype=np.int64),
                                      0.0, 0.5, 0.5)
    assert np.asarray(out).tolist() == [0.0, 0.0, 6.0, 0.0]


@needs_compiled
@pytest.mark.parametrize("seed", range(4))
def test_backends_agree_affine(seed):
    args = affine_inputs(60, seed)
    a = np.asarray(_kernels_py.affine_pair_max(*args))
    b = np.asarray(compiled.affine_pair_max(*args))
    assert np.allclose(a, b, rtol=1e-13, atol=0)


@needs_compiled
@pytest.mark.parametrize("seed", range(4))
def test_backends_agree_heisenberg(seed):
    args = heisenberg_inputs(60, seed)
    a = np.asarray(_kernels_py.heisenberg_pair_max(*args))
    b = np.asarray(compiled.heisenberg_pair_max(*args))
    assert np.allclose(a, b, rtol=1e-13, atol=0)


def test_environment_forces_fallback():
    code = "from suplift import kernels; print(kernels.BACKEND)"
    env = {"SUPLIFT_PURE_PYTHON": "1", "PATH": ""}
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
    importlib.reload(kernels)
