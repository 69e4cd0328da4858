/** Deterministic synthetic grayscale corpus for training and evaluation.
 *
 * The sandbox has no route to public image hosts, so instead of a download
 * script the corpus is synthesized locally from a seeded generator: six
 * pattern families (gradients, blobs, plaids, soft shapes, low-pass noise,
 * bars) chosen and parameterized per image. Every image derives from the
 * run seed plus its split name and index, so any subset can be regenerated
 * independently and a manifest of SHA-256 checksums pins the result.
 */

import * as crypto from "crypto";
import * as fs from "fs";
import * as path from "path";

import { EnvironmentError } from "./errors";
import { GrayImage, loadPgm, savePgm, serializePgm } from "./pgm";
import { Rng } from "./rng";

export const DATASET_SEED_DEFAULT = 7;
export const IMAGE_SIZE = 64;

export interface SplitSpec {
  name: string;
  count: number;
}

export const DEFAULT_SPLITS: SplitSpec[] = [
  { name: "train", count: 240 },
  { name: "val", count: 24 },
  { name: "test", count: 20 },
];

function gradientField(rng: Rng, size: number, out: Float64Array): void {
  const a = rng.uniform(-1, 1);
  const bu = rng.uniform(-2, 2);
  const bw = rng.uniform(-2, 2);
  const cuw = rng.uniform(-2, 2);
  const cu2 = rng.uniform(-1.5, 1.5);
  const cw2 = rng.uniform(-1.5, 1.5);
  for (let y = 0; y < size; y++) {
    const v = y / (size - 1);
    for (let x = 0; x < size; x++) {
      const u = x / (size - 1);
      out[y * size + x] =
        a + bu * u + bw * v + cuw * u * v + cu2 * u * u + cw2 * v * v;
    }
  }
}

function blobs(rng: Rng, size: number, out: Float64Array): void {
  gradientField(rng, size, out);
  const count = 2 + rng.nextInt(4);
  for (let k = 0; k < count; k++) {
    const cx = rng.uniform(4, size - 4);
    const cy = rng.uniform(4, size - 4);
    const sigma = rng.uniform(3, 14);
    const amp = rng.uniform(-2, 2);
    const inv = 1 / (2 * sigma * sigma);
    for (let y = 0; y < size; y++) {
      for (let x = 0; x < size; x++) {
        const d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
        out[y * size + x] += amp * Math.exp(-d2 * inv);
      }
    }
  }
}

function plaid(rng: Rng, size: number, out: Float64Array): void {
  out.fill(rng.uniform(-0.5, 0.5));
  const waves = 2 + rng.nextInt(2);
  for (let k = 0; k < waves; k++) {
    const cycles = rng.uniform(0.5, 5.5);
    const theta = rng.uniform(0, Math.PI);
    const phase = rng.uniform(0, 2 * Math.PI);
    const amp = rng.uniform(0.3, 1.0);
    const fx = (2 * Math.PI * cycles * Math.cos(theta)) / size;
    const fy = (2 * Math.PI * cycles * Math.sin(theta)) / size;
    for (let y = 0; y < size; y++) {
      for (let x = 0; x < size; x++) {
        out[y * size + x] += amp * Math.cos(fx * x + fy * y + phase);
      }
    }
  }
}

function smoothstep(edge: number, widthPx: number, d: number): number {
  const t = Math.min(1, Math.max(0, (d - edge) / widthPx + 0.5));
  return t * t * (3 - 2 * t);
}

function shapes(rng: Rng, size: number, out: Float64Array): void {
  gradientField(rng, size, out);
  const count = 2 + rng.nextInt(4);
  for (let k = 0; k < count; k++) {
    const level = rng.uniform(-1.5, 1.5);
    const soft = rng.uniform(1, 3);
    if (rng.nextFloat() < 0.5) {
      const cx = rng.uniform(8, size - 8);
      const cy = rng.uniform(8, size - 8);
      const r = rng.uniform(4, 18);
      for (let y = 0; y < size; y++) {
        for (let x = 0; x < size; x++) {
          const d = Math.hypot(x - cx, y - cy);
          const inside = 1 - smoothstep(r, soft, d);
          const i = y * size + x;
          out[i] = out[i] * (1 - inside) + level * inside;
        }
      }
    } else {
      const x0 = rng.uniform(2, size - 18);
      const y0 = rng.uniform(2, size - 18);
      const wdt = rng.uniform(8, 28);
      const hgt = rng.uniform(8, 28);
      for (let y = 0; y < size; y++) {
        for (let x = 0; x < size; x++) {
          const dx = Math.max(x0 - x, x - (x0 + wdt), 0);
          const dy = Math.max(y0 - y, y - (y0 + hgt), 0);
          const inside = 1 - smoothstep(0, soft, Math.hypot(dx, dy));
          const i = y * size + x;
          out[i] = out[i] * (1 - inside) + level * inside;
        }
      }
    }
  }
}

function boxBlurPass(src: Float64Array, dst: Float64Array, size: number, radius: number): void {
  // horizontal then vertical accumulation with clamped edges
  const tmp = new Float64Array(size * size);
  const span = 2 * radius + 1;
  for (let y = 0; y < size; y++) {
    for (let x = 0; x < size; x++) {
      let acc = 0;
      for (let k = -radius; k <= radius; k++) {
        let xx = x + k;
        if (xx < 0) xx = 0;
        if (xx >= size) xx = size - 1;
        acc += src[y * size + xx];
      }
      tmp[y * size + x] = acc / span;
    }
  }
  for (let y = 0; y < size; y++) {
    for (let x = 0; x < size; x++) {
      let acc = 0;
      for (let k = -radius; k <= radius; k++) {
        let yy = y + k;
        if (yy < 0) yy = 0;
        if (yy >= size) yy = size - 1;
        acc += tmp[yy * size + x];
      }
      dst[y * size + x] = acc / span;
    }
  }
}

function lowpassNoise(rng: Rng, size: number, out: Float64Array): void {
  const noise = new Float64Array(size * size);
  for (let i = 0; i < noise.length; i++) noise[i] = rng.nextGauss();
  const radius = 2 + rng.nextInt(6);
  boxBlurPass(noise, out, size, radius);
  boxBlurPass(out, noise, size, radius);
  out.set(noise);
}

function bars(rng: Rng, size: number, out: Float64Array): void {
  const horizontal = rng.nextFloat() < 0.5;
  const lo = rng.uniform(-1, 0);
  const hi = rng.uniform(0.2, 1.2);
  const soft = rng.uniform(0.5, 2);
  let pos = 0;
  let level = rng.nextFloat() < 0.5 ? lo : hi;
  const edges: number[] = [];
  const levels: number[] = [level];
  while (pos < size) {
    pos += 4 + rng.nextInt(13);
    edges.push(pos);
    level = level === lo ? hi : lo;
    levels.push(level);
  }
  for (let t = 0; t < size; t++) {
    let seg = 0;
    while (seg < edges.length && t >= edges[seg]) seg++;
    let v = levels[seg];
    // soften the nearest edge
    if (seg < edges.length) {
      const d = edges[seg] - t;
      if (d < soft * 2) {
        const mix = smoothstep(0, soft * 2, d);
        v = levels[seg + 1] * (1 - mix) + v * mix;
      }
    }
    for (let s = 0; s < size; s++) {
      const i = horizontal ? t * size + s : s * size + t;
      out[i] = v;
    }
  }
}

const FAMILIES = [gradientField, blobs, plaid, shapes, lowpassNoise, bars];

/** Render one image of the corpus; deterministic in (seed, split, index). */
export function synthesizeImage(seed: number, split: string, index: number): GrayImage {
  const rng = Rng.from(seed, "image", split, index);
  const size = IMAGE_SIZE;
  const field = new Float64Array(size * size);
  FAMILIES[rng.nextInt(FAMILIES.length)](rng, size, field);

  let lo = Infinity;
  let hi = -Infinity;
  for (const v of field) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  const span = hi - lo > 1e-9 ? hi - lo : 1;
  const gamma = rng.uniform(0.8, 1.25);
  const pixels = new Uint8Array(size * size);
  for (let i = 0; i < pixels.length; i++) {
    const unit = Math.pow((field[i] - lo) / span, gamma);
    pixels[i] = Math.max(0, Math.min(255, Math.round(unit * 255)));
  }
  return { width: size, height: size, pixels };
}

export interface Manifest {
  schema_version: 1;
  seed: number;
  image_size: number;
  splits: Record<string, { count: number; files: Record<string, string> }>;
}

export function generateDataset(
  outDir: string,
  seed: number = DATASET_SEED_DEFAULT,
  splits: SplitSpec[] = DEFAULT_SPLITS,
): Manifest {
  const manifest: Manifest = {
    schema_version: 1,
    seed,
    image_size: IMAGE_SIZE,
    splits: {},
  };
  for (const split of splits) {
    const dir = path.join(outDir, split.name);
    fs.mkdirSync(dir, { recursive: true });
    const files: Record<string, string> = {};
    for (let i = 0; i < split.count; i++) {
      const image = synthesizeImage(seed, split.name, i);
      const name = `img_${String(i).padStart(4, "0")}.pgm`;
      const data = serializePgm(image);
      fs.writeFileSync(path.join(dir, name), data);
      files[name] = crypto.createHash("sha256").update(data).digest("hex");
    }
    manifest.splits[split.name] = { count: split.count, files };
  }
  fs.writeFileSync(
    path.join(outDir, "manifest.json"),
    JSON.stringify(manifest, null, 2) + "\n",
  );
  return manifest;
}

/** Load one split as images sorted by file name. */
export function loadSplit(dataDir: string, split: string): GrayImage[] {
  const dir = path.join(dataDir, split);
  let names: string[];
  try {
    names = fs.readdirSync(dir).filter((n) => n.endsWith(".pgm"));
  } catch (err) {
    throw new EnvironmentError(
      `dataset split ${dir} is not readable: ${(err as Error).message}`,
    );
  }
  names.sort();
  if (names.length === 0) {
    throw new EnvironmentError(`dataset split ${dir} holds no .pgm images`);
  }
  return names.map((n) => loadPgm(path.join(dir, n)));
}

/** Order-independent digest of one split's pixel content. */
export function splitSha256(images: GrayImage[]): string {
  const hash = crypto.createHash("sha256");
  for (const image of images) {
    hash.update(serializePgm(image));
  }
  return hash.digest("hex");
}

/** Stack a split into one normalized NHWC batch buffer. */
export function imagesToBatch(images: GrayImage[]): Float32Array {
  if (images.length === 0) throw new EnvironmentError("empty image batch");
  const per = images[0].width * images[0].height;
  const out = new Float32Array(images.length * per);
  for (let k = 0; k < images.length; k++) {
    const img = images[k];
    if (img.width * img.height !== per) {
      throw new EnvironmentError("image batch mixes sizes");
    }
    for (let i = 0; i < per; i++) out[k * per + i] = img.pixels[i] / 255;
  }
  return out;
}
