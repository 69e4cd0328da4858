#!/usr/bin/env node
/** Command line front end.
 *
 * Subcommands: gen-data, train, encode, decode, evaluate.  The encode and
 * decode forms follow the external codec contract used by the rydberg_ofdm
 * link layer: a fixed argv prefix (including --model) plus
 * `encode --in img.pgm --out bits.bin` or the decode equivalent, with file
 * payloads on disk, diagnostics on stderr, and typed exit codes:
 *
 *   0  success
 *   2  malformed data (bad PGM, wrong-length bit stream, bad flags)
 *   3  environment (missing files, unreadable model bundle)
 *   4  numerical failure (no training level converged)
 *   1  anything unexpected
 */

import * as path from "path";

import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { readBitFile, writeBitFile } from "./bitio";
import { DATASET_SEED_DEFAULT, DEFAULT_SPLITS, generateDataset, SplitSpec } from "./dataset";
import { DataError, EnvironmentError, exitCodeFor } from "./errors";
import { runEvaluation } from "./evaluate";
import { loadBundle } from "./model";
import { loadPgm, savePgm } from "./pgm";
import { TrainOptions, TRAIN_DEFAULTS, trainSuite } from "./train";

import * as fs from "fs";

function log(line: string): void {
  process.stderr.write(line + "\n");
}

function requireModel(modelDir: unknown): string {
  if (typeof modelDir !== "string" || modelDir.length === 0) {
    throw new DataError("this subcommand needs --model pointing at a trained bundle directory");
  }
  return modelDir;
}

function writeGuarded(what: string, target: string, fn: () => void): void {
  try {
    fn();
  } catch (err) {
    if (err instanceof DataError || err instanceof EnvironmentError) throw err;
    throw new EnvironmentError(`cannot write ${what} ${target}: ${(err as Error).message}`);
  }
}

function parseLevels(raw: string, flag: string): number[] {
  const parts = raw.split(",").map((s) => s.trim()).filter((s) => s.length > 0);
  if (parts.length === 0) throw new DataError(`${flag} needs a comma separated list of rates`);
  const out = parts.map((s) => Number(s));
  if (out.some((x) => !Number.isFinite(x))) {
    throw new DataError(`${flag} has a non-numeric entry in "${raw}"`);
  }
  return out;
}

function cmdGenData(outDir: string, seed: number, counts: { train: number; val: number; test: number }): void {
  const splits: SplitSpec[] = DEFAULT_SPLITS.map((s) => ({
    name: s.name,
    count: counts[s.name as keyof typeof counts] ?? s.count,
  }));
  const manifest = generateDataset(outDir, seed, splits);
  const total = splits.reduce((a, s) => a + s.count, 0);
  log(`wrote ${total} images to ${outDir} (seed ${seed})`);
  log(`manifest: ${path.join(outDir, "manifest.json")} schema ${manifest.schema_version}`);
}

function cmdTrain(argv: Record<string, unknown>): void {
  const opts: TrainOptions = {
    ...TRAIN_DEFAULTS,
    levels: parseLevels(String(argv.levels), "--levels"),
    dataDir: String(argv.data),
    outDir: String(argv.out),
    seed: Number(argv.seed),
    log,
  };
  if (argv.epochs !== undefined) opts.epochs = Number(argv.epochs);
  if (argv.batchSize !== undefined) opts.batchSize = Number(argv.batchSize);
  if (argv.learningRate !== undefined) opts.learningRate = Number(argv.learningRate);
  if (argv.patience !== undefined) opts.patience = Number(argv.patience);
  if (argv.valFlips !== undefined) opts.valFlipRepeats = Number(argv.valFlips);
  const suite = trainSuite(opts);
  for (const r of suite.results) {
    const tag = r.bundle.converged ? "converged" : "FLAGGED (excluded)";
    log(
      `${r.bundle.codec_id}: ${tag}, val psnr ${r.bundle.val_psnr_db.toFixed(2)} dB, ` +
        `epochs ${r.bundle.training.epochs_run}/${r.bundle.training.epochs_requested}`,
    );
  }
  log(`mapping table: ${suite.tablePath}`);
  log(`total training time: ${suite.elapsedS.toFixed(1)} s`);
}

function cmdEncode(modelDir: string, inPath: string, outPath: string): void {
  const { model } = loadBundle(modelDir);
  const image = loadPgm(inPath);
  const bits = model.encodeBits(image);
  writeGuarded("bit file", outPath, () => writeBitFile(outPath, bits));
}

function cmdDecode(modelDir: string, inPath: string, outPath: string): void {
  const { model } = loadBundle(modelDir);
  const bits = readBitFile(inPath);
  const image = model.decodeBits(bits);
  writeGuarded("image", outPath, () => savePgm(outPath, image));
}

function cmdEvaluate(argv: Record<string, unknown>): void {
  const started = Date.now();
  const report = runEvaluation(
    String(argv.models),
    String(argv.data),
    parseLevels(String(argv.bers), "--bers"),
    Number(argv.seed),
    String(argv.split),
  );
  for (const row of report.rows) {
    log(
      `ber=${row.ber.toFixed(4)} selected=${row.selected_codec_id} ` +
        `psnr=${row.selected_psnr_db.toFixed(2)}dB ssim=${row.selected_ssim.toFixed(4)} | ` +
        `baseline psnr=${row.baseline_psnr_db.toFixed(2)}dB ssim=${row.baseline_ssim.toFixed(4)}`,
    );
  }
  const elapsedS = (Date.now() - started) / 1000;
  log(`evaluated ${report.images} ${report.split} images in ${elapsedS.toFixed(1)} s`);
  if (typeof argv.out === "string" && argv.out.length > 0) {
    const payload = { ...report, elapsed_s: elapsedS };
    writeGuarded("report", argv.out, () =>
      fs.writeFileSync(String(argv.out), JSON.stringify(payload, null, 2) + "\n"),
    );
    log(`report: ${argv.out}`);
  }
}

export async function main(rawArgv: string[]): Promise<void> {
  const parser = yargs(rawArgv)
    .scriptName("jscc-codec")
    .usage("$0 <command> [options]")
    .option("model", {
      type: "string",
      describe: "trained bundle directory (for encode/decode)",
      global: true,
    })
    .command(
      "gen-data",
      "synthesize the deterministic grayscale dataset",
      (y) =>
        y
          .option("out", { type: "string", demandOption: true, describe: "output directory" })
          .option("seed", { type: "number", default: DATASET_SEED_DEFAULT })
          .option("train", { type: "number", default: DEFAULT_SPLITS[0].count })
          .option("val", { type: "number", default: DEFAULT_SPLITS[1].count })
          .option("test", { type: "number", default: DEFAULT_SPLITS[2].count }),
      (argv) =>
        cmdGenData(String(argv.out), Number(argv.seed), {
          train: Number(argv.train),
          val: Number(argv.val),
          test: Number(argv.test),
        }),
    )
    .command(
      "train",
      "train one codec per bit error rate and write the mapping table",
      (y) =>
        y
          .option("levels", {
            type: "string",
            demandOption: true,
            describe: "comma separated BER levels, e.g. 0.01,0.07",
          })
          .option("data", { type: "string", demandOption: true, describe: "dataset directory" })
          .option("seed", { type: "number", default: TRAIN_DEFAULTS.seed })
          .option("out", { type: "string", demandOption: true, describe: "output directory" })
          .option("epochs", { type: "number", describe: `max epochs (default ${TRAIN_DEFAULTS.epochs})` })
          .option("batch-size", { type: "number", describe: `batch size (default ${TRAIN_DEFAULTS.batchSize})` })
          .option("learning-rate", { type: "number", describe: `Adam step (default ${TRAIN_DEFAULTS.learningRate})` })
          .option("patience", { type: "number", describe: `early stop patience (default ${TRAIN_DEFAULTS.patience})` })
          .option("val-flips", { type: "number", describe: "fixed flip draws per validation image" }),
      (argv) => cmdTrain(argv as Record<string, unknown>),
    )
    .command(
      "encode",
      "compress one PGM image into a bit stream file",
      (y) =>
        y
          .option("in", { type: "string", demandOption: true, describe: "input .pgm" })
          .option("out", { type: "string", demandOption: true, describe: "output bit file" }),
      (argv) => cmdEncode(requireModel(argv.model), String(argv.in), String(argv.out)),
    )
    .command(
      "decode",
      "reconstruct a PGM image from a bit stream file",
      (y) =>
        y
          .option("in", { type: "string", demandOption: true, describe: "input bit file" })
          .option("out", { type: "string", demandOption: true, describe: "output .pgm" }),
      (argv) => cmdDecode(requireModel(argv.model), String(argv.in), String(argv.out)),
    )
    .command(
      "evaluate",
      "score trained codecs against the baseline at injected flip rates",
      (y) =>
        y
          .option("models", { type: "string", demandOption: true, describe: "training output directory" })
          .option("data", { type: "string", demandOption: true, describe: "dataset directory" })
          .option("bers", { type: "string", default: "0,0.01,0.05,0.1" })
          .option("seed", { type: "number", default: 0 })
          .option("split", { type: "string", default: "test" })
          .option("out", { type: "string", describe: "optional JSON report path" }),
      (argv) => cmdEvaluate(argv as Record<string, unknown>),
    )
    .demandCommand(1, "missing subcommand")
    .strict()
    .version(false)
    .exitProcess(false)
    .fail((msg, err) => {
      if (err && (err as Error).name !== "YError") throw err;
      throw new DataError(msg ?? (err ? err.message : "invalid usage"));
    });
  await parser.parse();
}

/* istanbul ignore next */
if (require.main === module) {
  main(hideBin(process.argv)).catch((err) => {
    process.stderr.write(`jscc-codec: error: ${(err as Error).message}\n`);
    process.exitCode = exitCodeFor(err);
  });
}
