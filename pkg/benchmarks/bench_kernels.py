"""Compare the compiled and pure-numpy kernel backends on streaming inference.

Usage: python benchmarks/bench_kernels.py [--windows N]

Builds the default 23-class architecture, quantizes it against random
calibration data, then times end-to-end window classification (MFCC included)
and the bare int8 engine for each available backend. Both backends must agree
bit-for-bit; the script verifies that before timing.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from kwspot.audio import AudioClip
from kwspot.features import extract_mfcc, mel_filterbank
from kwspot.kernels import available_backends
from kwspot.model import default_architecture
from kwspot.quant import QuantRuntime, calibrate, quantize_model


def build_quantized(seed: int = 0):
    rng = np.random.default_rng(seed)
    model = default_architecture(23, seed=seed)
    reps = []
    for _ in range(16):
        samples = rng.normal(0, 3000, 16000).astype(np.int16)
        reps.append(extract_mfcc(AudioClip(samples=samples)))
    ranges = calibrate(model, reps)
    return quantize_model(model, ranges), reps


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--windows", type=int, default=300,
                        help="number of 1-second windows to classify per backend")
    args = parser.parse_args()

    qmodel, reps = build_quantized()
    rng = np.random.default_rng(42)
    clips = [AudioClip(samples=rng.normal(0, 2500, 16000).astype(np.int16))
             for _ in range(args.windows)]
    bank = mel_filterbank(qmodel.mfcc_config)
    features = [extract_mfcc(c, qmodel.mfcc_config, bank=bank) for c in clips]

    backends = available_backends()
    runtimes = {name: QuantRuntime(qmodel, backend=name) for name in backends}

    if len(backends) > 1:
        names = list(backends)
        for feats in features[:20]:
            outputs = [runtimes[n].run(feats).probs for n in names]
            for other in outputs[1:]:
                assert np.array_equal(outputs[0], other), "backends disagree"
        print(f"cross-checked {names}: bit-identical on 20 windows")

    engine_seconds = {}
    print(f"\n{'backend':<10} {'engine-only':>14} {'mfcc+engine':>14}")
    for name in backends:
        runtime = runtimes[name]
        for feats in features[:10]:
            runtime.run(feats)  # warm up

        start = time.perf_counter()
        for feats in features:
            runtime.run(feats)
        engine_seconds[name] = time.perf_counter() - start

        start = time.perf_counter()
        for clip in clips:
            runtime.run(extract_mfcc(clip, qmodel.mfcc_config, bank=bank))
        full = time.perf_counter() - start

        print(f"{name:<10} {args.windows / engine_seconds[name]:>10.0f} w/s "
              f"{args.windows / full:>10.0f} w/s")

    if "compiled" in engine_seconds and "fallback" in engine_seconds:
        print(f"\ncompiled speedup over fallback (engine only): "
              f"{engine_seconds['fallback'] / engine_seconds['compiled']:.1f}x")


if __name__ == "__main__":
    main()
