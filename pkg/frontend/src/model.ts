/** Codec model assembly, weight serialization, and bit-level inference.
 *
 * The architecture is a four-stage strided convolutional encoder feeding a
 * scalar quantizer, mirrored by a four-stage upsampling decoder. Image and
 * latent sizes are fixed at build time; the emitted stream length is
 * latent size times quantizer bits and is recorded in the bundle so
 * transport can verify it without loading weights.
 */

import * as fs from "fs";
import * as path from "path";

import { DataError, EnvironmentError } from "./errors";
import { Conv3x3, Net, NoisyQuantizer, Relu, Shape, Sigmoid, Upsample2 } from "./nn";
import { GrayImage } from "./pgm";
import { bitsToLatent, latentToBits } from "./quant";
import { Rng } from "./rng";

export interface ArchSpec {
  width: number;
  height: number;
  /** Output channels of the first three encoder stages. */
  encoderChannels: [number, number, number];
  latentChannels: number;
  /** Conv widths after each of the four decoder upsamplings. */
  decoderChannels: [number, number, number, number];
  quantBits: number;
}

export const DEFAULT_ARCH: ArchSpec = {
  width: 64,
  height: 64,
  encoderChannels: [16, 32, 64],
  latentChannels: 24,
  decoderChannels: [64, 32, 16, 12],
  quantBits: 4,
};

const DOWN_FACTOR = 16; // four stride-2 stages

export function latentShapeFor(arch: ArchSpec): Shape {
  if (arch.width % DOWN_FACTOR || arch.height % DOWN_FACTOR) {
    throw new DataError(
      `image size must be a multiple of ${DOWN_FACTOR}, got ${arch.width}x${arch.height}`,
    );
  }
  return {
    n: 1,
    h: arch.height / DOWN_FACTOR,
    w: arch.width / DOWN_FACTOR,
    c: arch.latentChannels,
  };
}

export function bitsPerImageFor(arch: ArchSpec): number {
  const latent = latentShapeFor(arch);
  return latent.h * latent.w * latent.c * arch.quantBits;
}

export class CodecModel {
  readonly encoder: Net;
  readonly quantizer: NoisyQuantizer;
  readonly decoder: Net;

  constructor(readonly arch: ArchSpec, init?: Rng) {
    const [e0, e1, e2] = arch.encoderChannels;
    const [d0, d1, d2, d3] = arch.decoderChannels;
    const lc = arch.latentChannels;
    const initFor = (tag: string) =>
      init ? Rng.from(init.nextUint32(), tag) : undefined;
    this.encoder = new Net([
      new Conv3x3("enc0", 1, e0, 2, initFor("enc0")),
      new Relu(),
      new Conv3x3("enc1", e0, e1, 2, initFor("enc1"), true),
      new Relu(),
      new Conv3x3("enc2", e1, e2, 2, initFor("enc2"), true),
      new Relu(),
      new Conv3x3("enc3", e2, lc, 2, initFor("enc3"), true),
      new Sigmoid(),
    ]);
    this.quantizer = new NoisyQuantizer(arch.quantBits);
    this.decoder = new Net([
      new Upsample2(),
      new Conv3x3("dec0", lc, d0, 1, initFor("dec0")),
      new Relu(),
      new Upsample2(),
      new Conv3x3("dec1", d0, d1, 1, initFor("dec1"), true),
      new Relu(),
      new Upsample2(),
      new Conv3x3("dec2", d1, d2, 1, initFor("dec2"), true),
      new Relu(),
      new Upsample2(),
      new Conv3x3("dec3", d2, d3, 1, initFor("dec3"), true),
      new Relu(),
      new Conv3x3("out", d3, 1, 1, initFor("out"), true),
      new Sigmoid(),
    ]);
  }

  countParams(): number {
    return this.encoder.countParams() + this.decoder.countParams();
  }

  inputShape(n: number): Shape {
    return { n, h: this.arch.height, w: this.arch.width, c: 1 };
  }

  latentShape(n: number): Shape {
    return { ...latentShapeFor(this.arch), n };
  }

  /** Training/eval forward: encode, pass the noisy quantizer, decode. */
  forward(x: Float32Array, n: number, training: boolean): Float32Array {
    const z = this.encoder.forward(x, this.inputShape(n), training);
    const zq = this.quantizer.forward(z, this.latentShape(n), training);
    return this.decoder.forward(zq, this.latentShape(n), training);
  }

  backward(dOut: Float32Array): void {
    const dZq = this.decoder.backward(dOut);
    const dZ = this.quantizer.backward(dZq);
    this.encoder.backward(dZ);
  }

  zeroGrads(): void {
    this.encoder.zeroGrads();
    this.decoder.zeroGrads();
  }

  /** Clean latent for one image batch; no flips, no quantization noise. */
  encodeLatent(x: Float32Array, n: number): Float32Array {
    return this.encoder.forward(x, this.inputShape(n), false);
  }

  /** One image to its transport bit stream. */
  encodeBits(image: GrayImage): Uint8Array {
    const { width, height } = this.arch;
    if (image.width !== width || image.height !== height) {
      throw new DataError(
        `model expects ${width}x${height} images, got ${image.width}x${image.height}`,
      );
    }
    const x = new Float32Array(width * height);
    for (let i = 0; i < x.length; i++) x[i] = image.pixels[i] / 255;
    const z = this.encodeLatent(x, 1);
    return latentToBits(z, this.arch.quantBits);
  }

  /** One transport bit stream back to an image. */
  decodeBits(bits: Uint8Array): GrayImage {
    const expected = bitsPerImageFor(this.arch);
    if (bits.length !== expected) {
      throw new DataError(`stream holds ${bits.length} bits, expected ${expected}`);
    }
    const latent = this.latentShape(1);
    const z = bitsToLatent(bits, latent.h * latent.w * latent.c, this.arch.quantBits);
    const y = this.decoder.forward(z, latent, false);
    const { width, height } = this.arch;
    const pixels = new Uint8Array(width * height);
    for (let i = 0; i < pixels.length; i++) {
      let v = Math.round(y[i] * 255);
      if (v < 0) v = 0;
      if (v > 255) v = 255;
      pixels[i] = v;
    }
    return { width, height, pixels };
  }

  allParams() {
    return [...this.encoder.params(), ...this.decoder.params()];
  }
}

/** Everything train_suite records about one trained model. */
export interface TrainedBundle {
  schema_version: 1;
  codec_id: string;
  kind: "learned";
  target_ber: number;
  width: number;
  height: number;
  bits_per_image: number;
  quant_bits: number;
  arch: {
    encoder_channels: [number, number, number];
    latent_channels: number;
    decoder_channels: [number, number, number, number];
  };
  weights_file: string;
  param_count: number;
  converged: boolean;
  val_psnr_db: number;
  val_loss: number;
  training: {
    seed: number;
    epochs_requested: number;
    epochs_run: number;
    best_epoch: number;
    batch_size: number;
    learning_rate: number;
    patience: number;
    dataset_sha256: string;
    train_images: number;
    val_images: number;
  };
}

export function archFromBundle(bundle: TrainedBundle): ArchSpec {
  return {
    width: bundle.width,
    height: bundle.height,
    encoderChannels: bundle.arch.encoder_channels,
    latentChannels: bundle.arch.latent_channels,
    decoderChannels: bundle.arch.decoder_channels,
    quantBits: bundle.quant_bits,
  };
}

export function weightsToBuffer(model: CodecModel): Buffer {
  const params = model.allParams();
  const total = params.reduce((acc, p) => acc + p.value.length, 0);
  const out = Buffer.alloc(total * 4);
  let offset = 0;
  for (const p of params) {
    for (let i = 0; i < p.value.length; i++) {
      out.writeFloatLE(p.value[i], offset);
      offset += 4;
    }
  }
  return out;
}

export function loadWeightsFromBuffer(model: CodecModel, data: Buffer): void {
  const total = model.allParams().reduce((acc, p) => acc + p.value.length, 0);
  if (data.length !== total * 4) {
    throw new DataError(
      `weights hold ${data.length} bytes, expected ${total * 4}`,
    );
  }
  let offset = 0;
  for (const p of model.allParams()) {
    for (let i = 0; i < p.value.length; i++) {
      p.value[i] = data.readFloatLE(offset);
      offset += 4;
    }
  }
}

export function saveBundle(dir: string, bundle: TrainedBundle, model: CodecModel): void {
  fs.mkdirSync(dir, { recursive: true });
  fs.writeFileSync(
    path.join(dir, "bundle.json"),
    JSON.stringify(bundle, null, 2) + "\n",
  );
  fs.writeFileSync(path.join(dir, bundle.weights_file), weightsToBuffer(model));
}

export function loadBundle(dir: string): { bundle: TrainedBundle; model: CodecModel } {
  const bundlePath = path.join(dir, "bundle.json");
  let raw: string;
  try {
    raw = fs.readFileSync(bundlePath, "utf8");
  } catch (err) {
    throw new EnvironmentError(`cannot read model bundle ${bundlePath}: ${(err as Error).message}`);
  }
  let bundle: TrainedBundle;
  try {
    bundle = JSON.parse(raw) as TrainedBundle;
  } catch (err) {
    throw new DataError(`model bundle ${bundlePath} is not valid JSON: ${(err as Error).message}`);
  }
  if (bundle.schema_version !== 1) {
    throw new DataError(
      `model bundle ${bundlePath}: unsupported schema_version=${bundle.schema_version}`,
    );
  }
  const model = new CodecModel(archFromBundle(bundle));
  const expectedBits = bitsPerImageFor(model.arch);
  if (bundle.bits_per_image !== expectedBits) {
    throw new DataError(
      `model bundle ${bundlePath} declares ${bundle.bits_per_image} bits per image, architecture emits ${expectedBits}`,
    );
  }
  let weights: Buffer;
  const weightsPath = path.join(dir, bundle.weights_file);
  try {
    weights = fs.readFileSync(weightsPath);
  } catch (err) {
    throw new EnvironmentError(`cannot read weights ${weightsPath}: ${(err as Error).message}`);
  }
  loadWeightsFromBuffer(model, weights);
  return { bundle, model };
}
