/** Reference image codec: 8x8 DCT, uniform quantizer, 3x bit repetition.
 *
 * Port of the link simulator's built-in `baseline-dct-rep3` codec, kept
 * algorithm-identical (orthonormal DCT, step 8, round-half-to-even, 9-bit
 * two's-complement words, per-bit repetition with majority voting) so the
 * two implementations score the same streams the same way.
 */

import { DataError } from "./errors";
import { GrayImage } from "./pgm";

export const BASELINE_CODEC_ID = "baseline-dct-rep3";
export const BLOCK = 8;
export const BITS_PER_COEFF = 9;
export const REPEAT = 3;
const COEF_LIMIT = 255;
const QUANT_STEP = 8.0;

export function baselineBitsPerImage(width: number, height: number): number {
  checkDims(width, height);
  return width * height * BITS_PER_COEFF * REPEAT;
}

function checkDims(width: number, height: number): void {
  if (width <= 0 || height <= 0) {
    throw new DataError("image dimensions must be positive");
  }
  if (width % BLOCK || height % BLOCK) {
    throw new DataError(
      `image dimensions must be multiples of ${BLOCK}, got ${width}x${height}`,
    );
  }
}

/** Orthonormal 8-point DCT-II basis, row k holding the k-th cosine. */
const DCT_BASIS = (() => {
  const m = new Float64Array(BLOCK * BLOCK);
  for (let k = 0; k < BLOCK; k++) {
    const scale = k === 0 ? Math.sqrt(1 / BLOCK) : Math.sqrt(2 / BLOCK);
    for (let n = 0; n < BLOCK; n++) {
      m[k * BLOCK + n] = scale * Math.cos((Math.PI * (2 * n + 1) * k) / (2 * BLOCK));
    }
  }
  return m;
})();

/** Round half to even, matching numpy's rint. */
export function rint(x: number): number {
  const floor = Math.floor(x);
  const frac = x - floor;
  let r: number;
  if (frac > 0.5) r = floor + 1;
  else if (frac < 0.5) r = floor;
  else r = floor % 2 === 0 ? floor : floor + 1;
  // keep the sign of zero so results mirror the reference exactly
  return x < 0 && r === 0 ? -0 : r;
}

/** C = M B Mt for one 8x8 block (forward transform). */
function dct2d(block: Float64Array, out: Float64Array, tmp: Float64Array): void {
  const n = BLOCK;
  for (let k = 0; k < n; k++) {
    for (let col = 0; col < n; col++) {
      let acc = 0;
      for (let r = 0; r < n; r++) acc += DCT_BASIS[k * n + r] * block[r * n + col];
      tmp[k * n + col] = acc;
    }
  }
  for (let row = 0; row < n; row++) {
    for (let k = 0; k < n; k++) {
      let acc = 0;
      for (let c = 0; c < n; c++) acc += tmp[row * n + c] * DCT_BASIS[k * n + c];
      out[row * n + k] = acc;
    }
  }
}

/** B = Mt C M for one 8x8 block (inverse transform). */
function idct2d(coefs: Float64Array, out: Float64Array, tmp: Float64Array): void {
  const n = BLOCK;
  for (let r = 0; r < n; r++) {
    for (let col = 0; col < n; col++) {
      let acc = 0;
      for (let k = 0; k < n; k++) acc += DCT_BASIS[k * n + r] * coefs[k * n + col];
      tmp[r * n + col] = acc;
    }
  }
  for (let row = 0; row < n; row++) {
    for (let c = 0; c < n; c++) {
      let acc = 0;
      for (let k = 0; k < n; k++) acc += tmp[row * n + k] * DCT_BASIS[k * n + c];
      out[row * n + c] = acc;
    }
  }
}

export function baselineEncode(image: GrayImage): Uint8Array {
  checkDims(image.width, image.height);
  const { width, height, pixels } = image;
  const nCoefs = width * height;
  const bits = new Uint8Array(nCoefs * BITS_PER_COEFF * REPEAT);
  const block = new Float64Array(BLOCK * BLOCK);
  const coefs = new Float64Array(BLOCK * BLOCK);
  const tmp = new Float64Array(BLOCK * BLOCK);
  let cursor = 0;
  for (let by = 0; by < height; by += BLOCK) {
    for (let bx = 0; bx < width; bx += BLOCK) {
      for (let r = 0; r < BLOCK; r++) {
        for (let c = 0; c < BLOCK; c++) {
          block[r * BLOCK + c] = pixels[(by + r) * width + (bx + c)] - 128.0;
        }
      }
      dct2d(block, coefs, tmp);
      for (let i = 0; i < BLOCK * BLOCK; i++) {
        let q = rint(coefs[i] / QUANT_STEP);
        if (q > COEF_LIMIT) q = COEF_LIMIT;
        if (q < -COEF_LIMIT) q = -COEF_LIMIT;
        const word = q & ((1 << BITS_PER_COEFF) - 1);
        for (let bit = BITS_PER_COEFF - 1; bit >= 0; bit--) {
          const value = (word >> bit) & 1;
          bits[cursor++] = value;
          bits[cursor++] = value;
          bits[cursor++] = value;
        }
      }
    }
  }
  return bits;
}

export function baselineDecode(bits: Uint8Array, width: number, height: number): GrayImage {
  checkDims(width, height);
  const expected = baselineBitsPerImage(width, height);
  if (bits.length !== expected) {
    throw new DataError(`stream holds ${bits.length} bits, expected ${expected}`);
  }
  const pixels = new Uint8Array(width * height);
  const coefs = new Float64Array(BLOCK * BLOCK);
  const block = new Float64Array(BLOCK * BLOCK);
  const tmp = new Float64Array(BLOCK * BLOCK);
  const signBit = 1 << (BITS_PER_COEFF - 1);
  const wrap = 1 << BITS_PER_COEFF;
  let cursor = 0;
  for (let by = 0; by < height; by += BLOCK) {
    for (let bx = 0; bx < width; bx += BLOCK) {
      for (let i = 0; i < BLOCK * BLOCK; i++) {
        let word = 0;
        for (let bit = 0; bit < BITS_PER_COEFF; bit++) {
          const votes = bits[cursor] + bits[cursor + 1] + bits[cursor + 2];
          cursor += 3;
          word = (word << 1) | (votes >= 2 ? 1 : 0);
        }
        const signed = word >= signBit ? word - wrap : word;
        coefs[i] = signed * QUANT_STEP;
      }
      idct2d(coefs, block, tmp);
      for (let r = 0; r < BLOCK; r++) {
        for (let c = 0; c < BLOCK; c++) {
          let v = rint(block[r * BLOCK + c] + 128.0);
          if (v < 0) v = 0;
          if (v > 255) v = 255;
          pixels[(by + r) * width + (bx + c)] = v;
        }
      }
    }
  }
  return { width, height, pixels };
}
