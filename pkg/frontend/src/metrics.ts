/** Full-reference image quality metrics on 8-bit grayscale.
 *
 * Both metrics follow the conventions of the link simulator's Python
 * implementation so numbers are comparable across the two packages:
 * PSNR against a 255 peak, SSIM over uniform 8x8 windows at valid
 * positions computed from integral images.
 */

import { GrayImage } from "./pgm";

const SSIM_WINDOW = 8;
const SSIM_C1 = (0.01 * 255.0) ** 2;
const SSIM_C2 = (0.03 * 255.0) ** 2;

function checkPair(a: GrayImage, b: GrayImage): void {
  if (a.width !== b.width || a.height !== b.height) {
    throw new Error(
      `shape mismatch: ${a.width}x${a.height} vs ${b.width}x${b.height}`,
    );
  }
}

/** Peak signal-to-noise ratio in dB; +Infinity for identical images. */
export function psnrDb(reference: GrayImage, test: GrayImage): number {
  checkPair(reference, test);
  const n = reference.pixels.length;
  let sum = 0;
  for (let i = 0; i < n; i++) {
    const d = reference.pixels[i] - test.pixels[i];
    sum += d * d;
  }
  if (sum === 0) return Infinity;
  const mse = sum / n;
  return 10 * Math.log10((255 * 255) / mse);
}

/** Summed-area table with a zero top row and left column. */
function integral(values: Float64Array, h: number, w: number): Float64Array {
  const sat = new Float64Array((h + 1) * (w + 1));
  const stride = w + 1;
  for (let y = 0; y < h; y++) {
    let rowSum = 0;
    for (let x = 0; x < w; x++) {
      rowSum += values[y * w + x];
      sat[(y + 1) * stride + (x + 1)] = sat[y * stride + (x + 1)] + rowSum;
    }
  }
  return sat;
}

function windowMean(sat: Float64Array, stride: number, y: number, x: number, w: number): number {
  const sum =
    sat[(y + w) * stride + (x + w)] -
    sat[y * stride + (x + w)] -
    sat[(y + w) * stride + x] +
    sat[y * stride + x];
  return sum / (w * w);
}

/** Mean structural similarity over uniform 8x8 windows. */
export function ssim(reference: GrayImage, test: GrayImage): number {
  checkPair(reference, test);
  const h = reference.height;
  const w = reference.width;
  const win = SSIM_WINDOW;
  if (h < win || w < win) {
    throw new Error(`image ${w}x${h} is smaller than the ${win}x${win} SSIM window`);
  }
  const n = h * w;
  const a = new Float64Array(n);
  const b = new Float64Array(n);
  const aa = new Float64Array(n);
  const bb = new Float64Array(n);
  const ab = new Float64Array(n);
  for (let i = 0; i < n; i++) {
    const av = reference.pixels[i];
    const bv = test.pixels[i];
    a[i] = av;
    b[i] = bv;
    aa[i] = av * av;
    bb[i] = bv * bv;
    ab[i] = av * bv;
  }
  const stride = w + 1;
  const satA = integral(a, h, w);
  const satB = integral(b, h, w);
  const satAA = integral(aa, h, w);
  const satBB = integral(bb, h, w);
  const satAB = integral(ab, h, w);

  let total = 0;
  let count = 0;
  for (let y = 0; y + win <= h; y++) {
    for (let x = 0; x + win <= w; x++) {
      const muA = windowMean(satA, stride, y, x, win);
      const muB = windowMean(satB, stride, y, x, win);
      let varA = windowMean(satAA, stride, y, x, win) - muA * muA;
      let varB = windowMean(satBB, stride, y, x, win) - muB * muB;
      const cov = windowMean(satAB, stride, y, x, win) - muA * muB;
      // integral-image cancellation can leave tiny negative variances
      if (varA < 0) varA = 0;
      if (varB < 0) varB = 0;
      const num = (2 * muA * muB + SSIM_C1) * (2 * cov + SSIM_C2);
      const den = (muA * muA + muB * muB + SSIM_C1) * (varA + varB + SSIM_C2);
      total += num / den;
      count++;
    }
  }
  return total / count;
}
