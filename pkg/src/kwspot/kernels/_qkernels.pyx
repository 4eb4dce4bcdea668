# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled int8 inference kernels.

Same integer semantics as the numpy fallback (round-half-away-from-zero
requantization, int32 accumulation); plain C loops, no allocation.
"""

from libc.stdint cimport int8_t, int32_t, int64_t


def quantize_f64_i8(const double[:, ::1] x, double inv_scale, int zp,
                    int8_t[:, ::1] out):
    cdef Py_ssize_t i, j
    cdef double v
    cdef long q
    for i in range(x.shape[0]):
        for j in range(x.shape[1]):
            v = x[i, j] * inv_scale
            if v >= 0:
                q = <long>(v + 0.5)
            else:
                q = -(<long>(-v + 0.5))
            q += zp
            if q < -128:
                q = -128
            elif q > 127:
                q = 127
            out[i, j] = <int8_t>q


def conv1d_i8(const int8_t[:, ::1] x, const int8_t[:, :, ::1] w,
              const int32_t[::1] bias, int x_zp, int32_t[:, ::1] acc):
    cdef Py_ssize_t o, c, l, k
    cdef Py_ssize_t n_out = w.shape[0], n_in = w.shape[1], ksize = w.shape[2]
    cdef Py_ssize_t l_out = acc.shape[1]
    cdef int32_t s
    for o in range(n_out):
        for l in range(l_out):
            s = bias[o]
            for c in range(n_in):
                for k in range(ksize):
                    s += (<int32_t>x[c, l + k] - x_zp) * <int32_t>w[o, c, k]
            acc[o, l] = s


def requantize_i32_i8(const int32_t[::1] acc, long long mantissa, int shift,
                      int out_zp, int clamp_lo, int8_t[::1] out):
    cdef Py_ssize_t i
    cdef int64_t p, q
    cdef int64_t rounding = (<int64_t>1) << (shift - 1)
    for i in range(acc.shape[0]):
        p = <int64_t>acc[i] * mantissa
        if p >= 0:
            q = (p + rounding) >> shift
        else:
            q = -((-p + rounding) >> shift)
        q += out_zp
        if q < clamp_lo:
            q = clamp_lo
        elif q > 127:
            q = 127
        out[i] = <int8_t>q


def maxpool1d_i8(const int8_t[:, ::1] x, int size, int8_t[:, ::1] out):
    cdef Py_ssize_t c, l, k
    cdef Py_ssize_t n_ch = out.shape[0], l_out = out.shape[1]
    cdef int8_t best, v
    for c in range(n_ch):
        for l in range(l_out):
            best = x[c, l * size]
            for k in range(1, size):
                v = x[c, l * size + k]
                if v > best:
                    best = v
            out[c, l] = best


def dense_i8(const int8_t[::1] x, const int8_t[:, ::1] w,
             const int32_t[::1] bias, int x_zp, int32_t[::1] acc):
    cdef Py_ssize_t m, n
    cdef Py_ssize_t n_out = w.shape[0], n_in = w.shape[1]
    cdef int32_t s
    for m in range(n_out):
        s = bias[m]
        for n in range(n_in):
            s += (<int32_t>x[n] - x_zp) * <int32_t>w[m, n]
        acc[m] = s


def dequantize_i32_f64(const int32_t[::1] acc, double scale, double[::1] out):
    cdef Py_ssize_t i
    for i in range(acc.shape[0]):
        out[i] = acc[i] * scale
