"""Binder adapters for the compiled Cython kernels."""

from __future__ import annotations

from . import _qkernels as _k

name = "compiled"


def bind_quantize(x_f64, inv_scale, zp, out_i8):
    inv_scale = float(inv_scale)
    zp = int(zp)

    def run():
        _k.quantize_f64_i8(x_f64, inv_scale, zp, out_i8)

    return run


def bind_conv1d(x_i8, w_i8, bias_i32, x_zp, acc_i32):
    x_zp = int(x_zp)

    def run():
        _k.conv1d_i8(x_i8, w_i8, bias_i32, x_zp, acc_i32)

    return run


def bind_requantize(acc_flat, mantissa, shift, out_zp, clamp_lo, out_flat):
    mantissa, shift = int(mantissa), int(shift)
    out_zp, clamp_lo = int(out_zp), int(clamp_lo)

    def run():
        _k.requantize_i32_i8(acc_flat, mantissa, shift, out_zp, clamp_lo, out_flat)

    return run


def bind_maxpool(x_i8, size, out_i8):
    size = int(size)

    def run():
        _k.maxpool1d_i8(x_i8, size, out_i8)

    return run


def bind_dense(x_flat_i8, w_i8, bias_i32, x_zp, acc_i32):
    x_zp = int(x_zp)

    def run():
        _k.dense_i8(x_flat_i8, w_i8, bias_i32, x_zp, acc_i32)

    return run


def bind_dequantize(acc_i32, scale, out_f64):
    scale = float(scale)

    def run():
        _k.dequantize_i32_f64(acc_i32, scale, out_f64)

    return run
