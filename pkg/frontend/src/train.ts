/** Per-level codec training and the suite that assembles the mapping table.
 *
 * One model is trained per requested BER level with bit flips injected at
 * that rate behind the straight-through quantizer. All models share their
 * initial weights (derived from the run seed), so differences between
 * levels reflect the channel they were hardened against, not init luck.
 * A run whose flip-objective validation loss never improves on its
 * pre-training value within the patience window is flagged as
 * non-converged and left out of the table.
 */

import * as crypto from "crypto";
import * as fs from "fs";
import * as path from "path";

import { imagesToBatch, loadSplit, splitSha256 } from "./dataset";
import { DataError, NumericalError } from "./errors";
import { psnrDb } from "./metrics";
import {
  ArchSpec,
  CodecModel,
  DEFAULT_ARCH,
  TrainedBundle,
  bitsPerImageFor,
  saveBundle,
} from "./model";
import { Adam, mseLoss } from "./nn";
import { GrayImage } from "./pgm";
import { Rng } from "./rng";
import { MappingTable, buildTable, sortedStringify, writeTable } from "./table";

export interface TrainOptions {
  levels: number[];
  dataDir: string;
  outDir: string;
  seed: number;
  epochs: number;
  batchSize: number;
  learningRate: number;
  patience: number;
  arch: ArchSpec;
  /** Fixed flip drawings per validation image for the early-stop objective. */
  valFlipRepeats: number;
  log?: (line: string) => void;
}

export const TRAIN_DEFAULTS = {
  seed: 0,
  epochs: 60,
  batchSize: 16,
  learningRate: 2e-3,
  patience: 8,
  arch: DEFAULT_ARCH,
  valFlipRepeats: 2,
};

export function codecIdFor(level: number, quantBits: number): string {
  return `jscc-q${quantBits}-ber${level.toFixed(4)}`;
}

export function validateLevels(levels: number[], quantBits: number): void {
  if (levels.length === 0) {
    throw new DataError("need at least one BER level");
  }
  let prev = 0;
  for (const level of levels) {
    if (!(level > 0 && level < 0.5)) {
      throw new DataError(`BER level ${level} must lie strictly inside (0, 0.5)`);
    }
    if (level <= prev) {
      throw new DataError("BER levels must be strictly increasing");
    }
    prev = level;
  }
  const ids = levels.map((l) => codecIdFor(l, quantBits));
  if (new Set(ids).size !== ids.length) {
    throw new DataError("BER levels too close together: codec ids collide");
  }
}

export interface EpochRecord {
  epoch: number;
  train_loss: number;
  val_flip_loss: number;
  val_psnr_db: number;
}

export interface LevelResult {
  bundle: TrainedBundle;
  model: CodecModel;
  history: EpochRecord[];
  elapsedS: number;
}

function microBer(level: number): number {
  return Math.round(level * 1e6);
}

/** Flip-objective MSE on the validation batch with reproducible masks. */
function valFlipLoss(
  model: CodecModel,
  valBatch: Float32Array,
  nVal: number,
  level: number,
  seed: number,
  repeats: number,
): number {
  let total = 0;
  const scratch = new Float32Array(valBatch.length);
  for (let r = 0; r < repeats; r++) {
    model.quantizer.flipProb = level;
    model.quantizer.rng = Rng.from(seed, "valflips", microBer(level), r);
    const out = model.forward(valBatch, nVal, false);
    total += mseLoss(out, valBatch, scratch);
  }
  model.quantizer.flipProb = 0;
  model.quantizer.rng = null;
  return total / repeats;
}

/** Noiseless validation PSNR in the 8-bit domain the decoder emits. */
function valCleanPsnr(model: CodecModel, valImages: GrayImage[], valBatch: Float32Array): number {
  model.quantizer.flipProb = 0;
  model.quantizer.rng = null;
  const out = model.forward(valBatch, valImages.length, false);
  const per = model.arch.width * model.arch.height;
  let total = 0;
  for (let k = 0; k < valImages.length; k++) {
    const pixels = new Uint8Array(per);
    for (let i = 0; i < per; i++) {
      let v = Math.round(out[k * per + i] * 255);
      if (v < 0) v = 0;
      if (v > 255) v = 255;
      pixels[i] = v;
    }
    const rec = { width: model.arch.width, height: model.arch.height, pixels };
    const p = psnrDb(valImages[k], rec);
    total += Math.min(p, 99);
  }
  return total / valImages.length;
}

export function trainLevel(
  level: number,
  trainImages: GrayImage[],
  valImages: GrayImage[],
  datasetSha: string,
  opts: TrainOptions,
): LevelResult {
  const log = opts.log ?? (() => {});
  const started = Date.now();
  const arch = opts.arch;
  const codecId = codecIdFor(level, arch.quantBits);
  const model = new CodecModel(arch, Rng.from(opts.seed, "init"));
  const optimizer = new Adam(model.allParams(), opts.learningRate);

  const per = arch.width * arch.height;
  const trainBatchAll = imagesToBatch(trainImages);
  const valBatch = imagesToBatch(valImages);
  const nTrain = trainImages.length;
  const batchSize = Math.min(opts.batchSize, nTrain);

  const flipStream = Rng.from(opts.seed, "trainflips", microBer(level));
  const indices = new Int32Array(nTrain);
  for (let i = 0; i < nTrain; i++) indices[i] = i;
  const batchBuf = new Float32Array(batchSize * per);
  const gradBuf = new Float32Array(batchSize * per);

  const baselineLoss = valFlipLoss(
    model, valBatch, valImages.length, level, opts.seed, opts.valFlipRepeats,
  );
  let bestLoss = baselineLoss;
  let bestEpoch = 0;
  let improved = false;
  let sinceImprove = 0;
  let snapshot: Float32Array[] | null = null;
  const history: EpochRecord[] = [];
  let diverged = false;

  log(`${codecId}: ${model.countParams()} params, pre-training val loss ${baselineLoss.toExponential(3)}`);

  let epochsRun = 0;
  for (let epoch = 1; epoch <= opts.epochs; epoch++) {
    epochsRun = epoch;
    Rng.from(opts.seed, "shuffle", microBer(level), epoch).shuffle(indices);
    let trainLoss = 0;
    let nBatches = 0;
    model.quantizer.flipProb = level;
    model.quantizer.rng = flipStream;
    for (let start = 0; start + batchSize <= nTrain; start += batchSize) {
      for (let k = 0; k < batchSize; k++) {
        batchBuf.set(
          trainBatchAll.subarray(indices[start + k] * per, (indices[start + k] + 1) * per),
          k * per,
        );
      }
      const out = model.forward(batchBuf, batchSize, true);
      trainLoss += mseLoss(out, batchBuf, gradBuf);
      nBatches++;
      model.backward(gradBuf);
      optimizer.step();
      model.zeroGrads();
    }
    trainLoss /= Math.max(nBatches, 1);

    const flipLoss = valFlipLoss(
      model, valBatch, valImages.length, level, opts.seed, opts.valFlipRepeats,
    );
    const cleanPsnr = valCleanPsnr(model, valImages, valBatch);
    history.push({
      epoch,
      train_loss: trainLoss,
      val_flip_loss: flipLoss,
      val_psnr_db: cleanPsnr,
    });
    log(
      `${codecId}: epoch ${epoch}/${opts.epochs} train ${trainLoss.toExponential(3)} ` +
      `val ${flipLoss.toExponential(3)} clean ${cleanPsnr.toFixed(2)} dB`,
    );

    if (!Number.isFinite(trainLoss) || !Number.isFinite(flipLoss)) {
      diverged = true;
      break;
    }
    if (flipLoss < bestLoss - 1e-9) {
      bestLoss = flipLoss;
      bestEpoch = epoch;
      improved = true;
      sinceImprove = 0;
      snapshot = model.allParams().map((p) => new Float32Array(p.value));
    } else {
      sinceImprove++;
      if (sinceImprove >= opts.patience) break;
    }
  }

  if (snapshot !== null) {
    const params = model.allParams();
    for (let i = 0; i < params.length; i++) params[i].value.set(snapshot[i]);
  }
  const converged = improved && !diverged && Number.isFinite(bestLoss);
  const finalPsnr = converged ? valCleanPsnr(model, valImages, valBatch) : 0;
  const finalLoss = converged
    ? valFlipLoss(model, valBatch, valImages.length, level, opts.seed, opts.valFlipRepeats)
    : Infinity;

  const bundle: TrainedBundle = {
    schema_version: 1,
    codec_id: codecId,
    kind: "learned",
    target_ber: level,
    width: arch.width,
    height: arch.height,
    bits_per_image: bitsPerImageFor(arch),
    quant_bits: arch.quantBits,
    arch: {
      encoder_channels: arch.encoderChannels,
      latent_channels: arch.latentChannels,
      decoder_channels: arch.decoderChannels,
    },
    weights_file: "weights.bin",
    param_count: model.countParams(),
    converged,
    val_psnr_db: finalPsnr,
    val_loss: Number.isFinite(finalLoss) ? finalLoss : -1,
    training: {
      seed: opts.seed,
      epochs_requested: opts.epochs,
      epochs_run: epochsRun,
      best_epoch: bestEpoch,
      batch_size: batchSize,
      learning_rate: opts.learningRate,
      patience: opts.patience,
      dataset_sha256: datasetSha,
      train_images: trainImages.length,
      val_images: valImages.length,
    },
  };
  return { bundle, model, history, elapsedS: (Date.now() - started) / 1000 };
}

export interface SuiteResult {
  results: LevelResult[];
  table: MappingTable;
  tablePath: string;
  elapsedS: number;
}

export function trainSuite(opts: TrainOptions): SuiteResult {
  const started = Date.now();
  validateLevels(opts.levels, opts.arch.quantBits);
  const trainImages = loadSplit(opts.dataDir, "train");
  const valImages = loadSplit(opts.dataDir, "val");
  for (const img of [...trainImages, ...valImages]) {
    if (img.width !== opts.arch.width || img.height !== opts.arch.height) {
      throw new DataError(
        `dataset image is ${img.width}x${img.height}, model wants ${opts.arch.width}x${opts.arch.height}`,
      );
    }
  }
  const datasetSha = crypto
    .createHash("sha256")
    .update(splitSha256(trainImages))
    .update(splitSha256(valImages))
    .digest("hex");

  fs.mkdirSync(opts.outDir, { recursive: true });
  const results: LevelResult[] = [];
  for (const level of opts.levels) {
    const result = trainLevel(level, trainImages, valImages, datasetSha, opts);
    saveBundle(path.join(opts.outDir, result.bundle.codec_id), result.bundle, result.model);
    results.push(result);
    (opts.log ?? (() => {}))(
      `${result.bundle.codec_id}: ${result.bundle.converged ? "converged" : "NOT CONVERGED"} ` +
      `best epoch ${result.bundle.training.best_epoch} val ${result.bundle.val_psnr_db.toFixed(2)} dB ` +
      `in ${result.elapsedS.toFixed(1)}s`,
    );
  }

  const good = results.filter((r) => r.bundle.converged);
  if (good.length === 0) {
    throw new NumericalError("no level converged; the mapping table would be empty");
  }
  const table = buildTable(
    good.map((r) => r.bundle.target_ber),
    good.map((r) => r.bundle.codec_id),
    {
      tool: "jscc-codec",
      levels: opts.levels,
      seed: opts.seed,
      epochs: opts.epochs,
      batch_size: opts.batchSize,
      learning_rate: opts.learningRate,
      patience: opts.patience,
      quant_bits: opts.arch.quantBits,
      image_width: opts.arch.width,
      image_height: opts.arch.height,
      bits_per_image: bitsPerImageFor(opts.arch),
      dataset_sha256: datasetSha,
      codec_ids: good.map((r) => r.bundle.codec_id),
      excluded_codec_ids: results
        .filter((r) => !r.bundle.converged)
        .map((r) => r.bundle.codec_id),
      val_psnr_db: Object.fromEntries(
        good.map((r) => [r.bundle.codec_id, r.bundle.val_psnr_db]),
      ),
    },
  );
  const tablePath = path.join(opts.outDir, "table.json");
  writeTable(tablePath, table);

  const cliPath = path.resolve(__dirname, "cli.js");
  const descriptors = good.map((r) => ({
    codec_id: r.bundle.codec_id,
    kind: "external_process",
    width: r.bundle.width,
    height: r.bundle.height,
    bits_per_image: r.bundle.bits_per_image,
    argv: [
      process.execPath,
      cliPath,
      "--model",
      path.resolve(opts.outDir, r.bundle.codec_id),
    ],
  }));
  fs.writeFileSync(
    path.join(opts.outDir, "descriptors.json"),
    sortedStringify(descriptors) + "\n",
  );

  const elapsedS = (Date.now() - started) / 1000;
  const report = {
    elapsed_s: elapsedS,
    levels: results.map((r) => ({
      codec_id: r.bundle.codec_id,
      converged: r.bundle.converged,
      elapsed_s: r.elapsedS,
      epochs_run: r.bundle.training.epochs_run,
      best_epoch: r.bundle.training.best_epoch,
      val_psnr_db: r.bundle.val_psnr_db,
      val_flip_loss: r.bundle.val_loss,
      history: r.history,
    })),
  };
  fs.writeFileSync(
    path.join(opts.outDir, "report.json"),
    JSON.stringify(report, null, 2) + "\n",
  );
  return { results, table, tablePath, elapsedS };
}
