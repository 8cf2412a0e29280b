# Compiled kernel backend: im2col convolutions and dense layers lowered
# onto BLAS GEMM (via scipy's exported BLAS symbols), pooling as plain
# loops.  The fused `real` type builds float32 and float64 variants of
# every kernel; float64 exists for the finite-difference gradient tests.
#
# BLAS is Fortran/column-major.  A row-major matrix M is the Fortran
# matrix M^T at the same pointer, so each helper below computes the
# transposed product with swapped operands; no data is ever copied.

import numpy as np

from scipy.linalg.cython_blas cimport dgemm, sgemm

ctypedef fused real:
    float
    double


cdef void _gemm_nn(real* a, real* b, real* c, int big_m, int big_n, int big_k,
                   real beta) noexcept:
    # row-major: C(M,N) = A(M,K) @ B(K,N) + beta*C
    cdef char tn = c'N'
    cdef real alpha = 1.0
    cdef int m = big_n, n = big_m, k = big_k
    cdef int lda = big_n, ldb = big_k, ldc = big_n
    if real is float:
        sgemm(&tn, &tn, &m, &n, &k, &alpha, b, &lda, a, &ldb, &beta, c, &ldc)
    else:
        dgemm(&tn, &tn, &m, &n, &k, &alpha, b, &lda, a, &ldb, &beta, c, &ldc)


cdef void _gemm_nt(real* a, real* b, real* c, int big_m, int big_n, int big_k,
                   real beta) noexcept:
    # row-major: C(M,N) = A(M,K) @ B(N,K)^T + beta*C
    cdef char tt = c'T'
    cdef char tn = c'N'
    cdef real alpha = 1.0
    cdef int m = big_n, n = big_m, k = big_k
    cdef int lda = big_k, ldb = big_k, ldc = big_n
    if real is float:
        sgemm(&tt, &tn, &m, &n, &k, &alpha, b, &lda, a, &ldb, &beta, c, &ldc)
    else:
        dgemm(&tt, &tn, &m, &n, &k, &alpha, b, &lda, a, &ldb, &beta, c, &ldc)


cdef void _gemm_tn(real* a, real* b, real* c, int big_m, int big_n, int big_k,
                   real beta) noexcept:
    # row-major: C(M,N) = A(K,M)^T @ B(K,N) + beta*C
    cdef char tt = c'T'
    cdef char tn = c'N'
    cdef real alpha = 1.0
    cdef int m = big_n, n = big_m, k = big_k
    cdef int lda = big_n, ldb = big_m, ldc = big_n
    if real is float:
        sgemm(&tn, &tt, &m, &n, &k, &alpha, b, &lda, a, &ldb, &beta, c, &ldc)
    else:
        dgemm(&tn, &tt, &m, &n, &k, &alpha, b, &lda, a, &ldb, &beta, c, &ldc)


cdef void _fill_cols(real[:, :, ::1] x, real[:, ::1] cols, int bi, int kw) noexcept:
    cdef int channels = x.shape[1]
    cdef int l_out = cols.shape[0]
    cdef int c, t, k
    for c in range(channels):
        for t in range(l_out):
            for k in range(kw):
                cols[t, c * kw + k] = x[bi, c, t + k]


def conv1d_forward(real[:, :, ::1] x, real[:, :, ::1] w, real[::1] b):
    cdef int batch = x.shape[0]
    cdef int channels = x.shape[1]
    cdef int length = x.shape[2]
    cdef int n_out = w.shape[0]
    cdef int kw = w.shape[2]
    cdef int l_out = length - kw + 1
    cdef int ck = channels * kw
    dtype = np.float32 if real is float else np.float64
    out_arr = np.empty((batch, n_out, l_out), dtype=dtype)
    cols_arr = np.empty((l_out, ck), dtype=dtype)
    cdef real[:, :, ::1] out = out_arr
    cdef real[:, ::1] cols = cols_arr
    cdef int bi, o, t
    for bi in range(batch):
        _fill_cols(x, cols, bi, kw)
        _gemm_nt(&w[0, 0, 0], &cols[0, 0], &out[bi, 0, 0], n_out, l_out, ck, <real>0.0)
        for o in range(n_out):
            for t in range(l_out):
                out[bi, o, t] += b[o]
    return out_arr


def conv1d_backward(real[:, :, ::1] x, real[:, :, ::1] w, real[:, :, ::1] dout):
    cdef int batch = x.shape[0]
    cdef int channels = x.shape[1]
    cdef int length = x.shape[2]
    cdef int n_out = w.shape[0]
    cdef int kw = w.shape[2]
    cdef int l_out = length - kw + 1
    cdef int ck = channels * kw
    dtype = np.float32 if real is float else np.float64
    dx_arr = np.zeros((batch, channels, length), dtype=dtype)
    dw_arr = np.zeros((n_out, channels, kw), dtype=dtype)
    db_arr = np.zeros(n_out, dtype=dtype)
    cols_arr = np.empty((l_out, ck), dtype=dtype)
    dcols_arr = np.empty((l_out, ck), dtype=dtype)
    cdef real[:, :, ::1] dx = dx_arr
    cdef real[:, :, ::1] dw = dw_arr
    cdef real[::1] db = db_arr
    cdef real[:, ::1] cols = cols_arr
    cdef real[:, ::1] dcols = dcols_arr
    cdef int bi, o, t, c, k
    for bi in range(batch):
        _fill_cols(x, cols, bi, kw)
        # dw (O, C*K) += dout_b (O, L_out) @ cols (L_out, C*K)
        _gemm_nn(&dout[bi, 0, 0], &cols[0, 0], &dw[0, 0, 0], n_out, ck, l_out, <real>1.0)
        # dcols (L_out, C*K) = dout_b^T @ w (O, C*K)
        _gemm_tn(&dout[bi, 0, 0], &w[0, 0, 0], &dcols[0, 0], l_out, ck, n_out, <real>0.0)
        for c in range(channels):
            for t in range(l_out):
                for k in range(kw):
                    dx[bi, c, t + k] += dcols[t, c * kw + k]
        for o in range(n_out):
            for t in range(l_out):
                db[o] += dout[bi, o, t]
    return dx_arr, dw_arr, db_arr


def maxpool2_forward(real[:, :, ::1] x):
    cdef int batch = x.shape[0]
    cdef int channels = x.shape[1]
    cdef int l_out = x.shape[2] // 2
    dtype = np.float32 if real is float else np.float64
    out_arr = np.empty((batch, channels, l_out), dtype=dtype)
    arg_arr = np.empty((batch, channels, l_out), dtype=np.uint8)
    cdef real[:, :, ::1] out = out_arr
    cdef unsigned char[:, :, ::1] arg = arg_arr
    cdef int bi, c, t
    cdef real lo, hi
    for bi in range(batch):
        for c in range(channels):
            for t in range(l_out):
                lo = x[bi, c, 2 * t]
                hi = x[bi, c, 2 * t + 1]
                if hi > lo:
                    out[bi, c, t] = hi
                    arg[bi, c, t] = 1
                else:
                    out[bi, c, t] = lo
                    arg[bi, c, t] = 0
    return out_arr, arg_arr


def maxpool2_backward(real[:, :, ::1] dout, unsigned char[:, :, ::1] arg, int length):
    cdef int batch = dout.shape[0]
    cdef int channels = dout.shape[1]
    cdef int l_out = dout.shape[2]
    dtype = np.float32 if real is float else np.float64
    dx_arr = np.zeros((batch, channels, length), dtype=dtype)
    cdef real[:, :, ::1] dx = dx_arr
    cdef int bi, c, t
    for bi in range(batch):
        for c in range(channels):
            for t in range(l_out):
                dx[bi, c, 2 * t + arg[bi, c, t]] = dout[bi, c, t]
    return dx_arr


def dense_forward(real[:, ::1] x, real[:, ::1] w, real[::1] b):
    cdef int batch = x.shape[0]
    cdef int features = x.shape[1]
    cdef int units = w.shape[0]
    dtype = np.float32 if real is float else np.float64
    out_arr = np.empty((batch, units), dtype=dtype)
    cdef real[:, ::1] out = out_arr
    _gemm_nt(&x[0, 0], &w[0, 0], &out[0, 0], batch, units, features, <real>0.0)
    cdef int bi, u
    for bi in range(batch):
        for u in range(units):
            out[bi, u] += b[u]
    return out_arr


def dense_backward(real[:, ::1] x, real[:, ::1] w, real[:, ::1] dout):
    cdef int batch = x.shape[0]
    cdef int features = x.shape[1]
    cdef int units = w.shape[0]
    dtype = np.float32 if real is float else np.float64
    dx_arr = np.empty((batch, features), dtype=dtype)
    dw_arr = np.empty((units, features), dtype=dtype)
    db_arr = np.zeros(units, dtype=dtype)
    cdef real[:, ::1] dx = dx_arr
    cdef real[:, ::1] dw = dw_arr
    cdef real[::1] db = db_arr
    # dx (B, F) = dout (B, U) @ w (U, F)
    _gemm_nn(&dout[0, 0], &w[0, 0], &dx[0, 0], batch, features, units, <real>0.0)
    # dw (U, F) = dout^T (U, B) @ x (B, F)
    _gemm_tn(&dout[0, 0], &x[0, 0], &dw[0, 0], units, features, batch, <real>0.0)
    cdef int bi, u
    for bi in range(batch):
        for u in range(units):
            db[u] += dout[bi, u]
    return dx_arr, dw_arr, db_arr
