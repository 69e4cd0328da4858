/** Codec mapping table: measured BER thresholds to codec choices.
 *
 * The JSON layout is shared with the link simulator, which consumes these
 * tables to pick a codec after its probe phase: schema_version 1, entries
 * sorted by strictly increasing inclusive upper bound, final bound exactly
 * 1.0, unique codec ids, free-form metadata object.
 */

import * as fs from "fs";

import { DataError, EnvironmentError } from "./errors";

export interface MappingEntry {
  ber_upper_bound: number;
  codec_id: string;
}

export interface MappingTable {
  entries: MappingEntry[];
  metadata: Record<string, unknown>;
}

export function validateTable(table: MappingTable): void {
  if (!Array.isArray(table.entries) || table.entries.length === 0) {
    throw new DataError("codec mapping table is empty");
  }
  let prev = 0.0;
  for (let i = 0; i < table.entries.length; i++) {
    const entry = table.entries[i];
    if (!entry.codec_id) {
      throw new DataError(`entries[${i}].codec_id is empty`);
    }
    if (!(prev < entry.ber_upper_bound && entry.ber_upper_bound <= 1.0)) {
      throw new DataError(
        `entries[${i}].ber_upper_bound=${entry.ber_upper_bound} must be strictly increasing and at most 1.0`,
      );
    }
    prev = entry.ber_upper_bound;
  }
  if (table.entries[table.entries.length - 1].ber_upper_bound !== 1.0) {
    throw new DataError("last ber_upper_bound must be exactly 1.0");
  }
  const ids = table.entries.map((e) => e.codec_id);
  if (new Set(ids).size !== ids.length) {
    throw new DataError("codec ids in the table must be unique");
  }
}

/** Inclusive upper bounds at midpoints between adjacent levels, then 1.0. */
export function buildTable(
  levels: number[],
  codecIds: string[],
  metadata: Record<string, unknown>,
): MappingTable {
  if (levels.length !== codecIds.length || levels.length === 0) {
    throw new DataError("need one codec id per BER level");
  }
  // midpoints in whole micro-BER so the bounds carry no float-sum noise
  const micro = levels.map((level) => Math.round(level * 1e6));
  const entries: MappingEntry[] = levels.map((_, i) => ({
    ber_upper_bound:
      i + 1 < levels.length ? (micro[i] + micro[i + 1]) / 2e6 : 1.0,
    codec_id: codecIds[i],
  }));
  const table = { entries, metadata };
  validateTable(table);
  return table;
}

/** First codec whose upper bound admits this BER (inclusive). */
export function selectCodec(ber: number, table: MappingTable): string {
  if (!(ber >= 0 && ber <= 1)) {
    throw new DataError(`ber must be within [0, 1], got ${ber}`);
  }
  for (const entry of table.entries) {
    if (ber <= entry.ber_upper_bound) return entry.codec_id;
  }
  throw new DataError("mapping table has no terminal entry");
}

/** JSON.stringify with recursively sorted object keys. */
export function sortedStringify(value: unknown, indent = 2): string {
  const sortKeys = (v: unknown): unknown => {
    if (Array.isArray(v)) return v.map(sortKeys);
    if (v !== null && typeof v === "object") {
      const out: Record<string, unknown> = {};
      for (const key of Object.keys(v as Record<string, unknown>).sort()) {
        out[key] = sortKeys((v as Record<string, unknown>)[key]);
      }
      return out;
    }
    return v;
  };
  return JSON.stringify(sortKeys(value), null, indent);
}

export function tableToJson(table: MappingTable): string {
  const payload = {
    schema_version: 1,
    entries: table.entries.map((e) => ({
      ber_upper_bound: e.ber_upper_bound,
      codec_id: e.codec_id,
    })),
    metadata: table.metadata,
  };
  return sortedStringify(payload) + "\n";
}

export function writeTable(path: string, table: MappingTable): void {
  validateTable(table);
  fs.writeFileSync(path, tableToJson(table));
}

export function readTable(path: string): MappingTable {
  let raw: string;
  try {
    raw = fs.readFileSync(path, "utf8");
  } catch (err) {
    throw new EnvironmentError(`cannot read mapping table ${path}: ${(err as Error).message}`);
  }
  let payload: {
    schema_version?: unknown;
    entries?: unknown;
    metadata?: unknown;
  };
  try {
    payload = JSON.parse(raw);
  } catch (err) {
    throw new DataError(`mapping table ${path}: invalid JSON: ${(err as Error).message}`);
  }
  if (payload.schema_version !== 1) {
    throw new DataError(
      `mapping table ${path}: unsupported schema_version=${JSON.stringify(payload.schema_version)}`,
    );
  }
  if (!Array.isArray(payload.entries)) {
    throw new DataError(`mapping table ${path}: entries must be a list`);
  }
  const metadata = payload.metadata ?? {};
  if (typeof metadata !== "object" || Array.isArray(metadata) || metadata === null) {
    throw new DataError(`mapping table ${path}: metadata must be an object`);
  }
  const entries: MappingEntry[] = payload.entries.map((item, i) => {
    if (typeof item !== "object" || item === null) {
      throw new DataError(`mapping table ${path}: entries[${i}] not an object`);
    }
    const bound = Number((item as Record<string, unknown>).ber_upper_bound);
    const codecId = (item as Record<string, unknown>).codec_id;
    if (!Number.isFinite(bound) || typeof codecId !== "string") {
      throw new DataError(`mapping table ${path}: entries[${i}] is malformed`);
    }
    return { ber_upper_bound: bound, codec_id: codecId };
  });
  const table = { entries, metadata: metadata as Record<string, unknown> };
  validateTable(table);
  return table;
}
