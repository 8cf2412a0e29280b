"""Backend selection and compiled-vs-reference kernel parity.

Every kernel ships in two implementations: the BLAS-backed compiled
extension and a plain numpy reference. They must agree to float rounding
on identical inputs, for both float32 and float64.
"""

from __future__ import annotations

import numpy as np
import pytest

from cvscan.nn import backend
from cvscan.nn import kernels_numpy

cython_kernels = pytest.importorskip(
    "cvscan.nn._kernels", reason="compiled extension not built"
)

RNG = np.random.default_rng(20240817)

# (batch, channels_in, length, channels_out, width)
CONV_SHAPES = [
    (1, 8, 500, 64, 5),
    (3, 64, 248, 128, 5),
    (2, 3, 11, 4, 3),
    (5, 1, 7, 2, 1),
]

TOLS = {np.float32: 3e-5, np.float64: 1e-12}


def _rel_close(a, b, tol):
    scale = max(1.0, float(np.abs(b).max()))
    return float(np.abs(a - b).max()) / scale <= tol


@pytest.mark.parametrize("dtype", [np.float32, np.float64])
@pytest.mark.parametrize("shape", CONV_SHAPES)
class TestConvParity:
    def test_forward(self, dtype, shape):
        b, c, l, o, k = shape
        x = RNG.standard_normal((b, c, l)).astype(dtype)
        w = RNG.standard_normal((o, c, k)).astype(dtype)
        bias = RNG.standard_normal(o).astype(dtype)
        got = cython_kernels.conv1d_forward(x, w, bias)
        want = kernels_numpy.conv1d_forward(x, w, bias)
        assert got.shape == want.shape
        assert got.dtype == want.dtype
        assert _rel_close(got, want, TOLS[dtype])

    def test_backward(self, dtype, shape):
        b, c, l, o, k = shape
        l_out = l - k + 1
        x = RNG.standard_normal((b, c, l)).astype(dtype)
        w = RNG.standard_normal((o, c, k)).astype(dtype)
        dout = RNG.standard_normal((b, o, l_out)).astype(dtype)
        gx, gw, gb = cython_kernels.conv1d_backward(x, w, dout)
        rx, rw, rb = kernels_numpy.conv1d_backward(x, w, dout)
        for got, want in ((gx, rx), (gw, rw), (gb, rb)):
            assert got.dtype == want.dtype
            assert _rel_close(got, want, TOLS[dtype])


@pytest.mark.parametrize("dtype", [np.float32, np.float64])
@pytest.mark.parametrize("length", [2, 3, 7, 496, 501])
class TestPoolParity:
    def test_forward(self, dtype, length):
        x = RNG.standard_normal((2, 6, length)).astype(dtype)
        got, garg = cython_kernels.maxpool2_forward(x)
        want, warg = kernels_numpy.maxpool2_forward(x)
        np.testing.assert_array_equal(got, want)
        np.testing.assert_array_equal(garg, warg)

    def test_backward(self, dtype, length):
        x = RNG.standard_normal((2, 6, length)).astype(dtype)
        _, arg = kernels_numpy.maxpool2_forward(x)
        dout = RNG.standard_normal(
            (2, 6, length // 2)
        ).astype(dtype)
        got = cython_kernels.maxpool2_backward(dout, arg, length)
        want = kernels_numpy.maxpool2_backward(dout, arg, length)
        np.testing.assert_array_equal(got, want)


@pytest.mark.parametrize("dtype", [np.float32, np.float64])
@pytest.mark.parametrize("shape", [(1, 15616, 64), (4, 64, 5), (3, 2, 2)])
class TestDenseParity:
    def test_forward(self, dtype, shape):
        b, n_in, n_out = shape
        x = RNG.standard_normal((b, n_in)).astype(dtype)
        w = RNG.standard_normal((n_out, n_in)).astype(dtype)
        bias = RNG.standard_normal(n_out).astype(dtype)
        got = cython_kernels.dense_forward(x, w, bias)
        want = kernels_numpy.dense_forward(x, w, bias)
        assert _rel_close(got, want, TOLS[dtype])

    def test_backward(self, dtype, shape):
        b, n_in, n_out = shape
        x = RNG.standard_normal((b, n_in)).astype(dtype)
        w = RNG.standard_normal((n_out, n_in)).astype(dtype)
        dout = RNG.standard_normal((b, n_out)).astype(dtype)
        gx, gw, gb = cython_kernels.dense_backward(x, w, dout)
        rx, rw, rb = kernels_numpy.dense_backward(x, w, dout)
        for got, want in ((gx, rx), (gw, rw), (gb, rb)):
            assert _rel_close(got, want, TOLS[dtype])


class TestPoolSemantics:
    @pytest.mark.parametrize("impl", [kernels_numpy, cython_kernels])
    def test_ties_pick_left(self, impl):
        x = np.array([[[2.0, 2.0, 1.0, 5.0]]], dtype=np.float32)
        out, arg = impl.maxpool2_forward(x)
        assert out.tolist() == [[[2.0, 5.0]]]
        assert arg.tolist() == [[[0, 1]]]

    @pytest.mark.parametrize("impl", [kernels_numpy, cython_kernels])
    def test_odd_tail_dropped(self, impl):
        x = np.array([[[1.0, 2.0, 99.0]]], dtype=np.float32)
        out, _ = impl.maxpool2_forward(x)
        assert out.tolist() == [[[2.0]]]

    @pytest.mark.parametrize("impl", [kernels_numpy, cython_kernels])
    def test_backward_routes_to_argmax(self, impl):
        x = np.array([[[1.0, 4.0, 3.0, 2.0, 9.0]]], dtype=np.float32)
        _, arg = impl.maxpool2_forward(x)
        dout = np.array([[[10.0, 20.0]]], dtype=np.float32)
        dx = impl.maxpool2_backward(dout, arg, 5)
        assert dx.tolist() == [[[0.0, 10.0, 20.0, 0.0, 0.0]]]


class TestBackendSelection:
    def test_auto_prefers_compiled_here(self):
        kernels = backend.select_backend("auto")
        assert backend.backend_name(kernels) == "cython"
        assert kernels is cython_kernels

    def test_explicit_numpy(self):
        kernels = backend.select_backend("numpy")
        assert backend.backend_name(kernels) == "numpy"
        assert kernels is kernels_numpy

    def test_explicit_cython(self):
        kernels = backend.select_backend("cython")
        assert backend.backend_name(kernels) == "cython"

    def test_unknown_name_rejected(self):
        with pytest.raises(ValueError):
            backend.select_backend("fortran")

    def test_use_backend_swaps_and_restores(self):
        original = backend.BACKEND_NAME
        try:
            backend.use_backend("numpy")
            assert backend.BACKEND_NAME == "numpy"
            assert backend.KERNELS is kernels_numpy
            backend.use_backend("cython")
            assert backend.BACKEND_NAME == "cython"
        finally:
            backend.use_backend(original)
