/** Robustness evaluation: codecs against injected bit-flip rates.
 *
 * Flips are drawn per (image, rate, repeat) from tagged streams, so every
 * evaluation of the same configuration sees the same corruption pattern
 * regardless of codec ordering or which subsets run.
 */

import * as fs from "fs";
import * as path from "path";

import { baselineBitsPerImage, baselineDecode, baselineEncode, BASELINE_CODEC_ID } from "./baselineCodec";
import { loadSplit } from "./dataset";
import { EnvironmentError } from "./errors";
import { psnrDb, ssim } from "./metrics";
import { loadBundle, TrainedBundle, CodecModel } from "./model";
import { GrayImage } from "./pgm";
import { Rng } from "./rng";
import { MappingTable, readTable, selectCodec } from "./table";

/** Cap used when averaging PSNR so lossless cases keep means finite. */
export const PSNR_CAP_DB = 60;

export interface BitCodec {
  id: string;
  encode(image: GrayImage): Uint8Array;
  decode(bits: Uint8Array): GrayImage;
}

export function learnedCodec(bundle: TrainedBundle, model: CodecModel): BitCodec {
  return {
    id: bundle.codec_id,
    encode: (image) => model.encodeBits(image),
    decode: (bits) => model.decodeBits(bits),
  };
}

export function baselineCodec(width: number, height: number): BitCodec {
  baselineBitsPerImage(width, height);
  return {
    id: BASELINE_CODEC_ID,
    encode: (image) => baselineEncode(image),
    decode: (bits) => baselineDecode(bits, width, height),
  };
}

export function flipBits(bits: Uint8Array, ber: number, rng: Rng): Uint8Array {
  const out = new Uint8Array(bits);
  if (ber <= 0) return out;
  for (let i = 0; i < out.length; i++) {
    if (rng.nextFloat() < ber) out[i] ^= 1;
  }
  return out;
}

export interface ScoreSummary {
  meanPsnrDb: number;
  meanSsim: number;
  perImagePsnrDb: number[];
  perImageSsim: number[];
}

/** Score one codec over a set of images at one injected flip rate. */
export function scoreCodec(
  codec: BitCodec,
  images: GrayImage[],
  ber: number,
  seed: number,
  repeats = 1,
): ScoreSummary {
  const perImagePsnrDb: number[] = [];
  const perImageSsim: number[] = [];
  const microBer = Math.round(ber * 1e6);
  for (let k = 0; k < images.length; k++) {
    const clean = codec.encode(images[k]);
    let psnrSum = 0;
    let ssimSum = 0;
    for (let r = 0; r < repeats; r++) {
      const rng = Rng.from(seed, "evalflips", microBer, k, r);
      const rec = codec.decode(flipBits(clean, ber, rng));
      psnrSum += Math.min(psnrDb(images[k], rec), PSNR_CAP_DB);
      ssimSum += ssim(images[k], rec);
    }
    perImagePsnrDb.push(psnrSum / repeats);
    perImageSsim.push(ssimSum / repeats);
  }
  const mean = (xs: number[]) => xs.reduce((a, b) => a + b, 0) / xs.length;
  return {
    meanPsnrDb: mean(perImagePsnrDb),
    meanSsim: mean(perImageSsim),
    perImagePsnrDb,
    perImageSsim,
  };
}

export interface LoadedSuite {
  table: MappingTable;
  codecs: Map<string, { bundle: TrainedBundle; model: CodecModel }>;
}

/** Load the mapping table plus every codec it references. */
export function loadSuite(modelsDir: string): LoadedSuite {
  const tablePath = path.join(modelsDir, "table.json");
  if (!fs.existsSync(tablePath)) {
    throw new EnvironmentError(
      `no mapping table at ${tablePath}; run training first`,
    );
  }
  const table = readTable(tablePath);
  const codecs = new Map<string, { bundle: TrainedBundle; model: CodecModel }>();
  for (const entry of table.entries) {
    codecs.set(entry.codec_id, loadBundle(path.join(modelsDir, entry.codec_id)));
  }
  return { table, codecs };
}

export interface EvalRow {
  ber: number;
  selected_codec_id: string;
  selected_psnr_db: number;
  selected_ssim: number;
  baseline_psnr_db: number;
  baseline_ssim: number;
  per_codec: Record<string, { psnr_db: number; ssim: number }>;
}

export interface EvalReport {
  data_dir: string;
  split: string;
  images: number;
  seed: number;
  rows: EvalRow[];
}

/** Fig-4-style comparison: per rate, table-selected codec vs baseline. */
export function runEvaluation(
  modelsDir: string,
  dataDir: string,
  bers: number[],
  seed = 0,
  split = "test",
): EvalReport {
  const suite = loadSuite(modelsDir);
  const images = loadSplit(dataDir, split);
  const first = suite.codecs.values().next().value;
  if (!first) throw new EnvironmentError("mapping table references no codecs");
  const base = baselineCodec(first.bundle.width, first.bundle.height);

  const rows: EvalRow[] = [];
  for (const ber of bers) {
    const perCodec: Record<string, { psnr_db: number; ssim: number }> = {};
    for (const [id, { bundle, model }] of suite.codecs) {
      const score = scoreCodec(learnedCodec(bundle, model), images, ber, seed);
      perCodec[id] = { psnr_db: score.meanPsnrDb, ssim: score.meanSsim };
    }
    const baseScore = scoreCodec(base, images, ber, seed);
    const selected = selectCodec(ber, suite.table);
    rows.push({
      ber,
      selected_codec_id: selected,
      selected_psnr_db: perCodec[selected].psnr_db,
      selected_ssim: perCodec[selected].ssim,
      baseline_psnr_db: baseScore.meanPsnrDb,
      baseline_ssim: baseScore.meanSsim,
      per_codec: perCodec,
    });
  }
  return { data_dir: dataDir, split, images: images.length, seed, rows };
}
