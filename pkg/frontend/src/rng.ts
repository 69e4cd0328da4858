/** Deterministic random streams built from integer seed paths.
 *
 * Every consumer of randomness (dataset synthesis, weight init, batch
 * shuffling, channel flips) derives its own stream from the run seed plus
 * a tag path, so adding a draw in one place never shifts another stream.
 */

const GOLDEN = 0x9e3779b9;

function mix(h: number, value: number): number {
  h = (h ^ Math.imul(value >>> 0, 0x85ebca6b)) >>> 0;
  h = Math.imul((h << 13) | (h >>> 19), 5) + 0xe6546b64;
  return h >>> 0;
}

/** sfc32 generator; small state, passes PractRand, plenty for simulation. */
export class Rng {
  private a: number;
  private b: number;
  private c: number;
  private d: number;
  private spareGauss: number | null = null;

  private constructor(a: number, b: number, c: number, d: number) {
    this.a = a >>> 0;
    this.b = b >>> 0;
    this.c = c >>> 0;
    this.d = d >>> 0;
    for (let i = 0; i < 12; i++) this.nextUint32();
  }

  /** Derive a stream from a path of integers and labels. */
  static from(...path: Array<number | string>): Rng {
    let h0 = GOLDEN;
    let h1 = 0x243f6a88;
    let h2 = 0xb7e15162;
    let h3 = 0xdeadbeef;
    for (const part of path) {
      if (typeof part === "number") {
        if (!Number.isFinite(part)) throw new Error("seed part must be finite");
        const lo = part >>> 0;
        const hi = Math.floor(Math.abs(part) / 4294967296) >>> 0;
        h0 = mix(h0, lo);
        h1 = mix(h1, hi);
        h2 = mix(h2, lo ^ 0x5bf03635);
        h3 = mix(h3, hi ^ 0x630aa3a5);
      } else {
        for (let i = 0; i < part.length; i++) {
          const ch = part.charCodeAt(i);
          h0 = mix(h0, ch);
          h1 = mix(h1, ch ^ i);
          h2 = mix(h2, ch + 0x1000193);
          h3 = mix(h3, ch ^ 0x811c9dc5);
        }
      }
    }
    return new Rng(h0, h1, h2, h3);
  }

  nextUint32(): number {
    const t = (((this.a + this.b) >>> 0) + this.d) >>> 0;
    this.d = (this.d + 1) >>> 0;
    this.a = this.b ^ (this.b >>> 9);
    this.b = (this.c + (this.c << 3)) >>> 0;
    this.c = (((this.c << 21) | (this.c >>> 11)) + t) >>> 0;
    return t;
  }

  /** Uniform in [0, 1). */
  nextFloat(): number {
    return this.nextUint32() / 4294967296;
  }

  /** Uniform in [lo, hi). */
  uniform(lo: number, hi: number): number {
    return lo + (hi - lo) * this.nextFloat();
  }

  /** Integer in [0, n). */
  nextInt(n: number): number {
    if (n <= 0 || !Number.isInteger(n)) throw new Error(`bad range ${n}`);
    // rejection sampling keeps the draw unbiased for any n
    const limit = 4294967296 - (4294967296 % n);
    let v = this.nextUint32();
    while (v >= limit) v = this.nextUint32();
    return v % n;
  }

  /** Standard normal via Box-Muller, caching the paired draw. */
  nextGauss(): number {
    if (this.spareGauss !== null) {
      const v = this.spareGauss;
      this.spareGauss = null;
      return v;
    }
    let u = this.nextFloat();
    while (u === 0) u = this.nextFloat();
    const r = Math.sqrt(-2 * Math.log(u));
    const theta = 2 * Math.PI * this.nextFloat();
    this.spareGauss = r * Math.sin(theta);
    return r * Math.cos(theta);
  }

  /** In-place Fisher-Yates shuffle. */
  shuffle(values: Int32Array | number[]): void {
    for (let i = values.length - 1; i > 0; i--) {
      const j = this.nextInt(i + 1);
      const tmp = values[i];
      values[i] = values[j];
      values[j] = tmp;
    }
  }

  /** Bernoulli(p) 0/1 mask of the requested length. */
  bernoulli(p: number, out: Uint8Array): Uint8Array {
    for (let i = 0; i < out.length; i++) {
      out[i] = this.nextFloat() < p ? 1 : 0;
    }
    return out;
  }
}
