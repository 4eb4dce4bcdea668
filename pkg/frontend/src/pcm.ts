/** Audio sample conversion: browser capture buffers -> 16 kHz PCM-16 LE frames. */

export const TARGET_RATE = 16000;
export const MAX_FRAME_SAMPLES = 4096;

/**
 * Decimate a Float32 capture buffer to 16 kHz by averaging each stride of
 * source samples (integer ratios get exact boxcar decimation; fractional
 * ratios average the covered span).
 */
export function downsampleTo16k(input: Float32Array, inputRate: number): Float32Array {
  if (inputRate === TARGET_RATE) return input;
  if (inputRate < TARGET_RATE) {
    throw new Error(`capture rate ${inputRate} below target ${TARGET_RATE}`);
  }
  const ratio = inputRate / TARGET_RATE;
  const outLength = Math.floor(input.length / ratio);
  const out = new Float32Array(outLength);
  for (let i = 0; i < outLength; i++) {
    const start = Math.floor(i * ratio);
    const end = Math.min(Math.floor((i + 1) * ratio), input.length);
    let sum = 0;
    for (let j = start; j < end; j++) sum += input[j];
    out[i] = end > start ? sum / (end - start) : 0;
  }
  return out;
}

/** Float samples in [-1, 1] -> little-endian int16 bytes. */
export function floatToPcm16(samples: Float32Array): ArrayBuffer {
  const buffer = new ArrayBuffer(samples.length * 2);
  const view = new DataView(buffer);
  for (let i = 0; i < samples.length; i++) {
    let q = Math.round(samples[i] * 32768);
    if (q > 32767) q = 32767;
    if (q < -32768) q = -32768;
    view.setInt16(i * 2, q, true);
  }
  return buffer;
}

/** Int16 bytes -> float samples (the inverse scaling of floatToPcm16). */
export function pcm16ToFloat(buffer: ArrayBuffer): Float32Array {
  const view = new DataView(buffer);
  const out = new Float32Array(buffer.byteLength / 2);
  for (let i = 0; i < out.length; i++) {
    out[i] = view.getInt16(i * 2, true) / 32768;
  }
  return out;
}

/** Split a sample buffer into transmit frames of at most MAX_FRAME_SAMPLES. */
export function frameSplit(samples: Float32Array): Float32Array[] {
  const frames: Float32Array[] = [];
  for (let start = 0; start < samples.length; start += MAX_FRAME_SAMPLES) {
    frames.push(samples.subarray(start, Math.min(start + MAX_FRAME_SAMPLES, samples.length)));
  }
  return frames;
}
