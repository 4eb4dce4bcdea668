"""Pure-numpy int8 inference kernels.

Bit-identical to the compiled backend: all arithmetic is integer with
round-half-away-from-zero requantization. Each ``bind_*`` factory captures
its operand views plus any scratch it needs, so the returned thunks do not
allocate tensor buffers when called.
"""

from __future__ import annotations

import numpy as np

name = "fallback"


def bind_quantize(x_f64: np.ndarray, inv_scale: float, zp: int,
                  out_i8: np.ndarray):
    scaled = np.empty(x_f64.shape, dtype=np.float64)
    mags = np.empty(x_f64.shape, dtype=np.float64)

    def run():
        np.multiply(x_f64, inv_scale, out=scaled)
        np.fabs(scaled, out=mags)
        np.add(mags, 0.5, out=mags)
        np.floor(mags, out=mags)
        np.copysign(mags, scaled, out=mags)
        np.add(mags, float(zp), out=mags)
        np.clip(mags, -128.0, 127.0, out=mags)
        np.copyto(out_i8, mags, casting="unsafe")

    return run


def bind_conv1d(x_i8: np.ndarray, w_i8: np.ndarray, bias_i32: np.ndarray,
                x_zp: int, acc_i32: np.ndarray):
    w32 = w_i8.astype(np.int32)
    x32 = np.empty(x_i8.shape, dtype=np.int32)
    k = w_i8.shape[2]
    windows = np.lib.stride_tricks.sliding_window_view(x32, k, axis=1)

    def run():
        np.subtract(x_i8, np.int32(x_zp), out=x32)
        np.einsum("clk,ock->ol", windows, w32, out=acc_i32)
        np.add(acc_i32, bias_i32[:, None], out=acc_i32)

    return run


def bind_requantize(acc_flat: np.ndarray, mantissa: int, shift: int,
                    out_zp: int, clamp_lo: int, out_flat: np.ndarray):
    prod = np.empty(acc_flat.shape, dtype=np.int64)
    neg = np.empty(acc_flat.shape, dtype=bool)
    rounding = np.int64(1) << np.int64(shift - 1)

    def run():
        np.multiply(acc_flat, np.int64(mantissa), out=prod)
        np.less(prod, 0, out=neg)
        np.absolute(prod, out=prod)
        np.add(prod, rounding, out=prod)
        np.right_shift(prod, shift, out=prod)
        np.negative(prod, out=prod, where=neg)
        np.add(prod, np.int64(out_zp), out=prod)
        np.clip(prod, clamp_lo, 127, out=prod)
        np.copyto(out_flat, prod, casting="unsafe")

    return run


def bind_maxpool(x_i8: np.ndarray, size: int, out_i8: np.ndarray):
    c, length = x_i8.shape
    l_out = length // size
    if l_out * size == length:
        src, pre = x_i8, None
    else:
        # Odd tail: stage the pool-covered prefix in a bind-time buffer so the
        # grouped reshape stays a view.
        src = np.empty((c, l_out * size), dtype=np.int8)
        pre = x_i8[:, :l_out * size]
    grouped = src.reshape(c, l_out, size)

    def run():
        if pre is not None:
            np.copyto(src, pre)
        grouped.max(axis=2, out=out_i8)

    return run


def bind_dense(x_flat_i8: np.ndarray, w_i8: np.ndarray, bias_i32: np.ndarray,
               x_zp: int, acc_i32: np.ndarray):
    w32 = w_i8.astype(np.int32)
    x32 = np.empty(x_flat_i8.shape, dtype=np.int32)

    def run():
        np.subtract(x_flat_i8, np.int32(x_zp), out=x32)
        np.matmul(w32, x32, out=acc_i32)
        np.add(acc_i32, bias_i32, out=acc_i32)

    return run


def bind_dequantize(acc_i32: np.ndarray, scale: float, out_f64: np.ndarray):
    def run():
        np.multiply(acc_i32, np.float64(scale), out=out_f64)

    return run
