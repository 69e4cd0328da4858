/** Binary 8-bit PGM (P5) reading and writing.
 *
 * The header parser follows the netpbm convention: tokens separated by
 * whitespace, # comments running to end of line, and a single whitespace
 * byte terminating the maxval before the pixel payload.
 */

import * as fs from "fs";

import { DataError, EnvironmentError } from "./errors";

export interface GrayImage {
  width: number;
  height: number;
  /** Row-major pixels, length width * height. */
  pixels: Uint8Array;
}

const WHITESPACE = new Set([0x20, 0x09, 0x0d, 0x0a]);

function readTokens(data: Buffer, count: number): { tokens: string[]; offset: number } {
  const tokens: string[] = [];
  let pos = 0;
  while (tokens.length < count) {
    if (pos >= data.length) throw new DataError("truncated netpbm header");
    const ch = data[pos];
    if (WHITESPACE.has(ch)) {
      pos++;
      continue;
    }
    if (ch === 0x23) {
      const end = data.indexOf(0x0a, pos);
      if (end < 0) throw new DataError("unterminated comment in netpbm header");
      pos = end + 1;
      continue;
    }
    const start = pos;
    while (pos < data.length && !WHITESPACE.has(data[pos])) pos++;
    tokens.push(data.subarray(start, pos).toString("ascii"));
  }
  if (pos >= data.length) {
    throw new DataError("netpbm header not followed by pixel data");
  }
  return { tokens, offset: pos + 1 };
}

export function parsePgm(data: Buffer): GrayImage {
  const magic = data.subarray(0, 2).toString("ascii");
  if (magic !== "P5") {
    throw new DataError(`unsupported netpbm magic ${JSON.stringify(magic)}, want binary grayscale P5`);
  }
  const { tokens, offset } = readTokens(data, 4);
  const width = Number(tokens[1]);
  const height = Number(tokens[2]);
  const maxval = Number(tokens[3]);
  if (!Number.isInteger(width) || !Number.isInteger(height) || !Number.isInteger(maxval)) {
    throw new DataError("non-numeric netpbm header field");
  }
  if (maxval !== 255) {
    throw new DataError(`only 8-bit images are supported, maxval=${maxval}`);
  }
  if (width <= 0 || height <= 0) {
    throw new DataError("netpbm dimensions must be positive");
  }
  const need = width * height;
  const got = data.length - offset;
  if (got !== need) {
    throw new DataError(`netpbm payload is ${got} bytes, expected ${need}`);
  }
  return { width, height, pixels: new Uint8Array(data.subarray(offset, offset + need)) };
}

export function serializePgm(image: GrayImage): Buffer {
  const { width, height, pixels } = image;
  if (pixels.length !== width * height) {
    throw new DataError(
      `pixel buffer holds ${pixels.length} bytes, expected ${width * height}`,
    );
  }
  const header = Buffer.from(`P5\n${width} ${height}\n255\n`, "ascii");
  return Buffer.concat([header, Buffer.from(pixels)]);
}

export function loadPgm(path: string): GrayImage {
  let data: Buffer;
  try {
    data = fs.readFileSync(path);
  } catch (err) {
    throw new EnvironmentError(`cannot read image ${path}: ${(err as Error).message}`);
  }
  return parsePgm(data);
}

export function savePgm(path: string, image: GrayImage): void {
  fs.writeFileSync(path, serializePgm(image));
}
