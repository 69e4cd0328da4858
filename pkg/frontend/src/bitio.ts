/** Bit-stream files: 8-byte little-endian bit count, then MSB-first bytes.
 *
 * This is the transport framing the link simulator speaks, so the layout
 * here must stay byte-compatible with its reader and writer.
 */

import * as fs from "fs";

import { DataError, EnvironmentError } from "./errors";

/** Pack 0/1 values MSB-first into bytes, zero-padding the tail. */
export function packBits(bits: Uint8Array): Uint8Array {
  const out = new Uint8Array(Math.ceil(bits.length / 8));
  for (let i = 0; i < bits.length; i++) {
    const bit = bits[i];
    if (bit !== 0 && bit !== 1) throw new DataError("bits must be 0 or 1");
    if (bit) out[i >> 3] |= 0x80 >> (i & 7);
  }
  return out;
}

/** Unpack bytes MSB-first into exactly nBits 0/1 values. */
export function unpackBits(bytes: Uint8Array, nBits: number): Uint8Array {
  const out = new Uint8Array(nBits);
  for (let i = 0; i < nBits; i++) {
    out[i] = (bytes[i >> 3] >> (7 - (i & 7))) & 1;
  }
  return out;
}

export function serializeBitStream(bits: Uint8Array): Buffer {
  const header = Buffer.alloc(8);
  header.writeBigUInt64LE(BigInt(bits.length));
  return Buffer.concat([header, Buffer.from(packBits(bits))]);
}

export function parseBitStream(data: Buffer): Uint8Array {
  if (data.length < 8) {
    throw new DataError("bit file shorter than its header");
  }
  const declared = data.readBigUInt64LE(0);
  if (declared > BigInt(Number.MAX_SAFE_INTEGER)) {
    throw new DataError(`bit count ${declared} is implausibly large`);
  }
  const nBits = Number(declared);
  const expected = Math.ceil(nBits / 8);
  const payload = data.subarray(8);
  if (payload.length !== expected) {
    throw new DataError(
      `bit file payload is ${payload.length} bytes, expected ${expected}`,
    );
  }
  return unpackBits(new Uint8Array(payload), nBits);
}

export function readBitFile(path: string): Uint8Array {
  let data: Buffer;
  try {
    data = fs.readFileSync(path);
  } catch (err) {
    throw new EnvironmentError(`cannot read bit file ${path}: ${(err as Error).message}`);
  }
  return parseBitStream(data);
}

export function writeBitFile(path: string, bits: Uint8Array): void {
  fs.writeFileSync(path, serializeBitStream(bits));
}
