/** Scalar latent quantization and its bit-level serialization.
 *
 * Latent activations in [0, 1] map to 2^bits uniform levels. Levels are
 * serialized as Gray code so a single transport bit flip moves the
 * reconstructed level by one step instead of half the range.
 */

import { DataError } from "./errors";

export function grayEncode(q: number): number {
  return q ^ (q >> 1);
}

export function grayDecode(g: number): number {
  let b = g;
  b ^= b >> 1;
  b ^= b >> 2;
  b ^= b >> 4;
  b ^= b >> 8;
  return b;
}

/** Quantize one activation to an integer level in [0, 2^bits). */
export function toLevel(value: number, bits: number): number {
  const top = (1 << bits) - 1;
  let q = Math.round(value * top);
  if (q < 0) q = 0;
  if (q > top) q = top;
  return q;
}

export function fromLevel(level: number, bits: number): number {
  return level / ((1 << bits) - 1);
}

/** Serialize latent activations to a 0/1 stream, MSB-first Gray words. */
export function latentToBits(latent: Float32Array, bits: number): Uint8Array {
  const out = new Uint8Array(latent.length * bits);
  let cursor = 0;
  for (let i = 0; i < latent.length; i++) {
    const g = grayEncode(toLevel(latent[i], bits));
    for (let b = bits - 1; b >= 0; b--) {
      out[cursor++] = (g >> b) & 1;
    }
  }
  return out;
}

/** Rebuild latent activations from a 0/1 stream written by latentToBits. */
export function bitsToLatent(stream: Uint8Array, count: number, bits: number): Float32Array {
  if (stream.length !== count * bits) {
    throw new DataError(
      `latent stream holds ${stream.length} bits, expected ${count * bits}`,
    );
  }
  const out = new Float32Array(count);
  let cursor = 0;
  for (let i = 0; i < count; i++) {
    let g = 0;
    for (let b = 0; b < bits; b++) {
      g = (g << 1) | stream[cursor++];
    }
    out[i] = fromLevel(grayDecode(g), bits);
  }
  return out;
}
