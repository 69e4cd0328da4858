/** Public surface of the jscc-codec package. */

export { DataError, EnvironmentError, NumericalError, exitCodeFor } from "./errors";
export { Rng } from "./rng";
export { GrayImage, parsePgm, serializePgm, loadPgm, savePgm } from "./pgm";
export {
  packBits,
  unpackBits,
  serializeBitStream,
  parseBitStream,
  readBitFile,
  writeBitFile,
} from "./bitio";
export { psnrDb, ssim } from "./metrics";
export { grayEncode, grayDecode, latentToBits, bitsToLatent } from "./quant";
export {
  BASELINE_CODEC_ID,
  baselineEncode,
  baselineDecode,
  baselineBitsPerImage,
} from "./baselineCodec";
export {
  ArchSpec,
  DEFAULT_ARCH,
  CodecModel,
  TrainedBundle,
  bitsPerImageFor,
  latentShapeFor,
  archFromBundle,
  saveBundle,
  loadBundle,
} from "./model";
export {
  DATASET_SEED_DEFAULT,
  IMAGE_SIZE,
  DEFAULT_SPLITS,
  Manifest,
  SplitSpec,
  generateDataset,
  synthesizeImage,
  loadSplit,
  splitSha256,
} from "./dataset";
export {
  MappingEntry,
  MappingTable,
  validateTable,
  buildTable,
  selectCodec,
  tableToJson,
  writeTable,
  readTable,
  sortedStringify,
} from "./table";
export {
  TrainOptions,
  TRAIN_DEFAULTS,
  codecIdFor,
  validateLevels,
  trainLevel,
  trainSuite,
  LevelResult,
  SuiteResult,
  EpochRecord,
} from "./train";
export {
  BitCodec,
  PSNR_CAP_DB,
  learnedCodec,
  baselineCodec,
  flipBits,
  scoreCodec,
  loadSuite,
  runEvaluation,
  EvalReport,
  EvalRow,
  ScoreSummary,
} from "./evaluate";
