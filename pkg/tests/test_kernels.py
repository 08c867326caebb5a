import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gapless_mec import _pykernels, kernels

try:
    from gapless_mec import _ckernels
except ImportError:  # extension not built
    _ckernels = None

needs_c = pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")


def signed(rng, n, m):
    return rng.integers(-1, 2, size=(n, m)).astype(np.int8)


def brute_partition(S, mask, ea, eb):
    n = S.shape[0]
    a = np.array([(mask >> i) & 1 for i in range(n)], bool)
    total = 0
    for side in (a, ~a):
        sub = S[side].astype(int)
        total += int(((np.abs(sub).sum(axis=0) - np.abs(sub.sum(axis=0))) // 2).sum())
    return total + int(ea[a].sum() + eb[~a].sum())


@pytest.mark.parametrize("seed", range(5))
def test_partition_costs_reference(seed):
    rng = np.random.default_rng(seed)
    S = signed(rng, 6, 5)
    ea, eb = rng.integers(0, 3, 6), rng.integers(0, 3, 6)
    masks = np.arange(64)
    got = _pykernels.partition_costs(S, masks, ea, eb)
    assert got.tolist() == [brute_partition(S, int(k), ea, eb) for k in masks]


def test_pair_cost_matrix_reference():
    D = np.array([[1, 0, 3], [2, 2, 0]])
    out = _pykernels.pair_cost_matrix(D)
    assert out[0, 1] == 0 + 2 and out[1, 2] == 0 + 0 and out[0, 0] == 3
    assert out[1, 0] == -1


@needs_c
@settings(max_examples=60, deadline=None)
@given(st.integers(1, 12), st.integers(1, 9), st.integers(0, 2 ** 31))
def test_backends_agree(n, m, seed):
    rng = np.random.default_rng(seed)
    S = signed(rng, n, m)
    masks = rng.integers(0, 2 ** n, size=50)
    ea, eb = rng.integers(0, 4, n), rng.integers(0, 4, n)
    py = _pykernels.partition_costs(S, masks, ea, eb)
    c = _ckernels.partition_costs(S, masks, ea, eb)
    assert np.array_equal(np.asarray(py), np.asarray(c))
    D = rng.integers(0, 5, size=(n, m))
    assert np.array_equal(np.asarray(_pykernels.pair_cost_matrix(D)),
                          np.asarray(_ckernels.pair_cost_matrix(D)))


def test_backend_selected():
    assert kernels.BACKEND in ("cython", "python")
    if _ckernels is not None and os.environ.get("GAPLESS_MEC_PURE") is None:
        assert kernels.BACKEND == "cython"


def test_pure_override():
    code = "from gapless_mec import kernels; print(kernels.BACKEND)"
    env = {**os.environ, "GAPLESS_MEC_PURE": "1"}
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "python"
