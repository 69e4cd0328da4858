import { describe, expect, it } from "vitest";

import {
  packBits,
  parseBitStream,
  serializeBitStream,
  unpackBits,
} from "../src/bitio";
import { DataError } from "../src/errors";

describe("bit packing", () => {
  it("is MSB first", () => {
    const bits = new Uint8Array([1, 0, 0, 0, 0, 0, 0, 1]);
    expect(packBits(bits)[0]).toBe(0x81);
  });

  it("pads the tail byte with zeros", () => {
    const packed = packBits(new Uint8Array([1, 1, 1]));
    expect(packed.length).toBe(1);
    expect(packed[0]).toBe(0b1110_0000);
  });

  it("round trips arbitrary lengths", () => {
    for (const n of [1, 7, 8, 9, 63, 64, 65, 1536]) {
      const bits = new Uint8Array(n);
      for (let i = 0; i < n; i++) bits[i] = (i * 7 + 3) % 2;
      expect(unpackBits(packBits(bits), n)).toEqual(bits);
    }
  });
});

describe("stream framing", () => {
  it("prefixes a little-endian 64-bit count", () => {
    const data = serializeBitStream(new Uint8Array([1, 0, 1]));
    expect(data.readBigUInt64LE(0)).toBe(3n);
    expect(data.length).toBe(9);
  });

  it("round trips through parse", () => {
    const bits = new Uint8Array(100);
    bits[0] = 1;
    bits[99] = 1;
    expect(parseBitStream(serializeBitStream(bits))).toEqual(bits);
  });

  it("rejects short headers", () => {
    expect(() => parseBitStream(Buffer.from("abc", "ascii"))).toThrow(DataError);
  });

  it("rejects payload size mismatches", () => {
    const good = serializeBitStream(new Uint8Array(16));
    expect(() => parseBitStream(good.subarray(0, good.length - 1))).toThrow(DataError);
    expect(() => parseBitStream(Buffer.concat([good, Buffer.from([0])]))).toThrow(DataError);
  });

  it("accepts the empty stream", () => {
    expect(parseBitStream(serializeBitStream(new Uint8Array(0))).length).toBe(0);
  });
});
