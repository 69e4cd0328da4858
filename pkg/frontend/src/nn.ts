/** Minimal NHWC convolutional network with hand-written backpropagation.
 *
 * The sandbox this codec trains in has no GPU and no native tensor
 * runtime, so the few kernels the architecture needs (3x3 convolution,
 * nearest-neighbor upsampling, pointwise nonlinearities, Adam) are
 * implemented directly on typed arrays. Loops are ordered so the channel
 * dimension is innermost and contiguous; accumulation happens in doubles.
 */

import { Rng } from "./rng";
import { fromLevel, grayDecode, grayEncode, toLevel } from "./quant";

export interface Shape {
  n: number;
  h: number;
  w: number;
  c: number;
}

export function shapeSize(s: Shape): number {
  return s.n * s.h * s.w * s.c;
}

export interface Param {
  name: string;
  value: Float32Array;
  grad: Float32Array;
}

export interface Layer {
  /** Output shape for a given input shape; also validates the input. */
  outShape(input: Shape): Shape;
  forward(x: Float32Array, shape: Shape, training: boolean): Float32Array;
  /** Gradient w.r.t. the layer input; accumulates parameter gradients. */
  backward(dy: Float32Array): Float32Array;
  params(): Param[];
}

/** 3x3 convolution, same padding, stride 1 or 2.
 *
 * Weights are stored tap-major as [kh][kw][ci][co] with the output
 * channel contiguous, which keeps the hot inner loops sequential.
 */
export class Conv3x3 implements Layer {
  readonly weight: Float32Array;
  readonly bias: Float32Array;
  readonly dWeight: Float32Array;
  readonly dBias: Float32Array;

  private inBuf: Float32Array = new Float32Array(0);
  private inShape: Shape = { n: 0, h: 0, w: 0, c: 0 };

  constructor(
    readonly name: string,
    readonly cin: number,
    readonly cout: number,
    readonly stride: 1 | 2,
    init?: Rng,
    /**
     * Set when a relu gates this layer's input (possibly through an
     * upsampling): dx at zero inputs is discarded downstream, so backward
     * may skip those positions entirely.
     */
    readonly reluGatedInput = false,
  ) {
    this.weight = new Float32Array(9 * cin * cout);
    this.bias = new Float32Array(cout);
    this.dWeight = new Float32Array(this.weight.length);
    this.dBias = new Float32Array(cout);
    if (init) {
      // He initialization for the fan-in of a 3x3 kernel
      const std = Math.sqrt(2 / (9 * cin));
      for (let i = 0; i < this.weight.length; i++) {
        this.weight[i] = init.nextGauss() * std;
      }
    }
  }

  outShape(input: Shape): Shape {
    if (input.c !== this.cin) {
      throw new Error(`${this.name}: got ${input.c} channels, want ${this.cin}`);
    }
    if (this.stride === 2 && (input.h % 2 || input.w % 2)) {
      throw new Error(`${this.name}: stride 2 needs even input, got ${input.h}x${input.w}`);
    }
    return { n: input.n, h: input.h / this.stride, w: input.w / this.stride, c: this.cout };
  }

  forward(x: Float32Array, shape: Shape, _training: boolean): Float32Array {
    const out = this.outShape(shape);
    this.inBuf = x;
    this.inShape = shape;
    const { h: H, w: W, c: CI } = shape;
    const { h: HO, w: WO, c: CO } = out;
    const y = new Float32Array(shapeSize(out));
    const wgt = this.weight;
    const bias = this.bias;
    const stride = this.stride;
    const acc = new Float64Array(CO);
    for (let b = 0; b < shape.n; b++) {
      const xBase = b * H * W * CI;
      const yBase = b * HO * WO * CO;
      for (let oh = 0; oh < HO; oh++) {
        const ihBase = oh * stride - 1;
        for (let ow = 0; ow < WO; ow++) {
          const iwBase = ow * stride - 1;
          for (let co = 0; co < CO; co++) acc[co] = bias[co];
          for (let kh = 0; kh < 3; kh++) {
            const ih = ihBase + kh;
            if (ih < 0 || ih >= H) continue;
            for (let kw = 0; kw < 3; kw++) {
              const iw = iwBase + kw;
              if (iw < 0 || iw >= W) continue;
              const xOff = xBase + (ih * W + iw) * CI;
              const wOff = (kh * 3 + kw) * CI * CO;
              for (let ci = 0; ci < CI; ci++) {
                const xv = x[xOff + ci];
                if (xv === 0) continue;
                const wRow = wOff + ci * CO;
                for (let co = 0; co < CO; co++) {
                  acc[co] += xv * wgt[wRow + co];
                }
              }
            }
          }
          const yOff = yBase + (oh * WO + ow) * CO;
          for (let co = 0; co < CO; co++) y[yOff + co] = acc[co];
        }
      }
    }
    return y;
  }

  backward(dy: Float32Array): Float32Array {
    const shape = this.inShape;
    const out = this.outShape(shape);
    const { h: H, w: W, c: CI } = shape;
    const { h: HO, w: WO, c: CO } = out;
    const x = this.inBuf;
    const wgt = this.weight;
    const dW = this.dWeight;
    const dB = this.dBias;
    const stride = this.stride;
    const skipZeros = this.reluGatedInput;
    const dx = new Float32Array(x.length);
    for (let b = 0; b < shape.n; b++) {
      const xBase = b * H * W * CI;
      const yBase = b * HO * WO * CO;
      for (let oh = 0; oh < HO; oh++) {
        const ihBase = oh * stride - 1;
        for (let ow = 0; ow < WO; ow++) {
          const iwBase = ow * stride - 1;
          const dyOff = yBase + (oh * WO + ow) * CO;
          for (let co = 0; co < CO; co++) dB[co] += dy[dyOff + co];
          for (let kh = 0; kh < 3; kh++) {
            const ih = ihBase + kh;
            if (ih < 0 || ih >= H) continue;
            for (let kw = 0; kw < 3; kw++) {
              const iw = iwBase + kw;
              if (iw < 0 || iw >= W) continue;
              const xOff = xBase + (ih * W + iw) * CI;
              const wOff = (kh * 3 + kw) * CI * CO;
              for (let ci = 0; ci < CI; ci++) {
                const xv = x[xOff + ci];
                // zero input: no weight gradient, and dx is masked off by
                // the relu behind this layer, so the whole row can go
                if (xv === 0 && skipZeros) continue;
                const row = wOff + ci * CO;
                let sum = 0;
                for (let co = 0; co < CO; co++) {
                  const d = dy[dyOff + co];
                  dW[row + co] += xv * d;
                  sum += wgt[row + co] * d;
                }
                dx[xOff + ci] += sum;
              }
            }
          }
        }
      }
    }
    return dx;
  }

  params(): Param[] {
    return [
      { name: `${this.name}.weight`, value: this.weight, grad: this.dWeight },
      { name: `${this.name}.bias`, value: this.bias, grad: this.dBias },
    ];
  }
}

export class Relu implements Layer {
  private out: Float32Array = new Float32Array(0);

  outShape(input: Shape): Shape {
    return input;
  }

  forward(x: Float32Array, _shape: Shape, _training: boolean): Float32Array {
    const y = new Float32Array(x.length);
    for (let i = 0; i < x.length; i++) y[i] = x[i] > 0 ? x[i] : 0;
    this.out = y;
    return y;
  }

  backward(dy: Float32Array): Float32Array {
    const y = this.out;
    const dx = new Float32Array(dy.length);
    for (let i = 0; i < dy.length; i++) dx[i] = y[i] > 0 ? dy[i] : 0;
    return dx;
  }

  params(): Param[] {
    return [];
  }
}

export class Sigmoid implements Layer {
  private out: Float32Array = new Float32Array(0);

  outShape(input: Shape): Shape {
    return input;
  }

  forward(x: Float32Array, _shape: Shape, _training: boolean): Float32Array {
    const y = new Float32Array(x.length);
    for (let i = 0; i < x.length; i++) y[i] = 1 / (1 + Math.exp(-x[i]));
    this.out = y;
    return y;
  }

  backward(dy: Float32Array): Float32Array {
    const y = this.out;
    const dx = new Float32Array(dy.length);
    for (let i = 0; i < dy.length; i++) dx[i] = dy[i] * y[i] * (1 - y[i]);
    return dx;
  }

  params(): Param[] {
    return [];
  }
}

/** Nearest-neighbor 2x upsampling; backward sums each 2x2 cell. */
export class Upsample2 implements Layer {
  private inShape: Shape = { n: 0, h: 0, w: 0, c: 0 };

  outShape(input: Shape): Shape {
    return { n: input.n, h: input.h * 2, w: input.w * 2, c: input.c };
  }

  forward(x: Float32Array, shape: Shape, _training: boolean): Float32Array {
    this.inShape = shape;
    const { n, h, w, c } = shape;
    const y = new Float32Array(n * h * 2 * w * 2 * c);
    const wo = w * 2;
    for (let b = 0; b < n; b++) {
      for (let ih = 0; ih < h; ih++) {
        for (let iw = 0; iw < w; iw++) {
          const src = ((b * h + ih) * w + iw) * c;
          const row0 = ((b * h * 2 + ih * 2) * wo + iw * 2) * c;
          const row1 = row0 + wo * c;
          for (let ch = 0; ch < c; ch++) {
            const v = x[src + ch];
            y[row0 + ch] = v;
            y[row0 + c + ch] = v;
            y[row1 + ch] = v;
            y[row1 + c + ch] = v;
          }
        }
      }
    }
    return y;
  }

  backward(dy: Float32Array): Float32Array {
    const { n, h, w, c } = this.inShape;
    const dx = new Float32Array(n * h * w * c);
    const wo = w * 2;
    for (let b = 0; b < n; b++) {
      for (let ih = 0; ih < h; ih++) {
        for (let iw = 0; iw < w; iw++) {
          const dst = ((b * h + ih) * w + iw) * c;
          const row0 = ((b * h * 2 + ih * 2) * wo + iw * 2) * c;
          const row1 = row0 + wo * c;
          for (let ch = 0; ch < c; ch++) {
            dx[dst + ch] =
              dy[row0 + ch] + dy[row0 + c + ch] + dy[row1 + ch] + dy[row1 + c + ch];
          }
        }
      }
    }
    return dx;
  }

  params(): Param[] {
    return [];
  }
}

/** Binary channel behind a straight-through quantizer.
 *
 * Forward quantizes each activation to 2^bits levels, serializes the level
 * as Gray code, flips each code bit independently with the configured
 * probability, and dequantizes the result. The backward pass treats the
 * whole operation as identity, which is what lets gradients reach the
 * encoder through the discrete bottleneck.
 */
export class NoisyQuantizer implements Layer {
  /** Flip probability applied during forward passes. */
  flipProb = 0;
  /** Stream driving the flips; reseat between phases for reproducibility. */
  rng: Rng | null = null;

  constructor(readonly bits: number) {
    if (!Number.isInteger(bits) || bits < 1 || bits > 8) {
      throw new Error(`quantizer bits must be in [1, 8], got ${bits}`);
    }
  }

  outShape(input: Shape): Shape {
    return input;
  }

  forward(x: Float32Array, _shape: Shape, _training: boolean): Float32Array {
    const y = new Float32Array(x.length);
    const bits = this.bits;
    const p = this.flipProb;
    const rng = this.rng;
    for (let i = 0; i < x.length; i++) {
      let level = toLevel(x[i], bits);
      if (p > 0 && rng !== null) {
        let code = grayEncode(level);
        for (let b = 0; b < bits; b++) {
          if (rng.nextFloat() < p) code ^= 1 << b;
        }
        level = grayDecode(code);
      }
      y[i] = fromLevel(level, bits);
    }
    return y;
  }

  backward(dy: Float32Array): Float32Array {
    return dy;
  }

  params(): Param[] {
    return [];
  }
}

/** Plain layer pipeline tracking intermediate shapes. */
export class Net {
  constructor(readonly layers: Layer[]) {}

  outShape(input: Shape): Shape {
    let s = input;
    for (const layer of this.layers) s = layer.outShape(s);
    return s;
  }

  forward(x: Float32Array, shape: Shape, training: boolean): Float32Array {
    let s = shape;
    let h = x;
    for (const layer of this.layers) {
      const next = layer.outShape(s);
      h = layer.forward(h, s, training);
      s = next;
    }
    return h;
  }

  backward(dy: Float32Array): Float32Array {
    let d = dy;
    for (let i = this.layers.length - 1; i >= 0; i--) {
      d = this.layers[i].backward(d);
    }
    return d;
  }

  params(): Param[] {
    const all: Param[] = [];
    for (const layer of this.layers) all.push(...layer.params());
    return all;
  }

  countParams(): number {
    return this.params().reduce((acc, p) => acc + p.value.length, 0);
  }

  zeroGrads(): void {
    for (const p of this.params()) p.grad.fill(0);
  }
}

/** Mean squared error; writes the input gradient into dx. */
export function mseLoss(pred: Float32Array, target: Float32Array, dx: Float32Array): number {
  const n = pred.length;
  let sum = 0;
  const scale = 2 / n;
  for (let i = 0; i < n; i++) {
    const d = pred[i] - target[i];
    sum += d * d;
    dx[i] = scale * d;
  }
  return sum / n;
}

/** Adam with bias correction; one slot pair per parameter tensor. */
export class Adam {
  private m: Float32Array[];
  private v: Float32Array[];
  private t = 0;

  constructor(
    readonly parameters: Param[],
    readonly lr: number,
    readonly beta1 = 0.9,
    readonly beta2 = 0.999,
    readonly eps = 1e-8,
  ) {
    this.m = parameters.map((p) => new Float32Array(p.value.length));
    this.v = parameters.map((p) => new Float32Array(p.value.length));
  }

  step(): void {
    this.t++;
    const b1t = 1 - Math.pow(this.beta1, this.t);
    const b2t = 1 - Math.pow(this.beta2, this.t);
    for (let k = 0; k < this.parameters.length; k++) {
      const { value, grad } = this.parameters[k];
      const m = this.m[k];
      const v = this.v[k];
      for (let i = 0; i < value.length; i++) {
        const g = grad[i];
        m[i] = this.beta1 * m[i] + (1 - this.beta1) * g;
        v[i] = this.beta2 * v[i] + (1 - this.beta2) * g * g;
        const mHat = m[i] / b1t;
        const vHat = v[i] / b2t;
        value[i] -= (this.lr * mHat) / (Math.sqrt(vHat) + this.eps);
      }
    }
  }
}
