/**
 * On-disk formats shared with the screening pipeline.
 *
 * Embedding container: a 14-byte little-endian header
 * (magic "CPDM", u8 version, u8 kind, u32 dim, u32 count)
 * followed by count*dim float32 values in row-major order.
 * Detections sit next to it as plain JSON, and corpus manifests
 * are JSON Lines with one video per line.
 */
import { Buffer } from "node:buffer";
import * as fs from "node:fs";
import * as path from "node:path";

export const EMB_MAGIC = "CPDM";
export const EMB_VERSION = 1;

export const KIND_TITLE = 1;
export const KIND_IMAGE = 2;
export const KIND_FACE = 3;

export const TITLE_DIM = 768;
export const IMAGE_DIM = 2048;
export const HISTOGRAM_BINS = 512;

/** Tactic flags the pipeline's manifest schema accepts in `categories`. */
export const KNOWN_CATEGORIES = [
  "misleading",
  "spam",
  "false_promise",
  "exaggerated",
  "curiosity_gap",
] as const;

const HEADER_SIZE = 14;

export class FormatError extends Error {}

export interface EmbeddingBlock {
  kind: number;
  dim: number;
  vectors: Float32Array[];
}

/** Serialize vectors into the embedding container format. */
export function encodeEmbeddings(
  vectors: readonly Float32Array[],
  kind: number,
  dim: number,
): Buffer {
  if (!Number.isInteger(dim) || dim < 1) {
    throw new FormatError(`embedding dim must be a positive integer, got ${dim}`);
  }
  if (!Number.isInteger(kind) || kind < 0 || kind > 255) {
    throw new FormatError(`embedding kind must fit in a byte, got ${kind}`);
  }
  for (const [i, vec] of vectors.entries()) {
    if (vec.length !== dim) {
      throw new FormatError(`vector ${i} has length ${vec.length}, expected ${dim}`);
    }
    for (const x of vec) {
      if (!Number.isFinite(x)) {
        throw new FormatError(`vector ${i} contains a non-finite value`);
      }
    }
  }
  const header = Buffer.alloc(HEADER_SIZE);
  header.write(EMB_MAGIC, 0, "ascii");
  header.writeUInt8(EMB_VERSION, 4);
  header.writeUInt8(kind, 5);
  header.writeUInt32LE(dim, 6);
  header.writeUInt32LE(vectors.length, 10);

  const payload = Buffer.alloc(4 * dim * vectors.length);
  for (const [i, vec] of vectors.entries()) {
    for (let j = 0; j < dim; j++) {
      payload.writeFloatLE(vec[j], 4 * (i * dim + j));
    }
  }
  return Buffer.concat([header, payload]);
}

/** Parse an embedding container, checking magic, version, and payload size. */
export function decodeEmbeddings(buf: Buffer): EmbeddingBlock {
  if (buf.length < HEADER_SIZE) {
    throw new FormatError(`truncated embedding block: ${buf.length} bytes`);
  }
  const magic = buf.toString("ascii", 0, 4);
  if (magic !== EMB_MAGIC) {
    throw new FormatError(`bad magic ${JSON.stringify(magic)}`);
  }
  const version = buf.readUInt8(4);
  if (version !== EMB_VERSION) {
    throw new FormatError(`unsupported version ${version}`);
  }
  const kind = buf.readUInt8(5);
  const dim = buf.readUInt32LE(6);
  const count = buf.readUInt32LE(10);
  if (dim === 0) {
    throw new FormatError("zero dimension");
  }
  const expected = HEADER_SIZE + 4 * dim * count;
  if (buf.length !== expected) {
    throw new FormatError(`payload size mismatch: ${buf.length} bytes, expected ${expected}`);
  }
  const vectors: Float32Array[] = [];
  for (let i = 0; i < count; i++) {
    const vec = new Float32Array(dim);
    for (let j = 0; j < dim; j++) {
      vec[j] = buf.readFloatLE(HEADER_SIZE + 4 * (i * dim + j));
    }
    vectors.push(vec);
  }
  return { kind, dim, vectors };
}

export function writeEmbeddings(
  file: string,
  vectors: readonly Float32Array[],
  kind: number,
  dim: number,
): void {
  fs.writeFileSync(file, encodeEmbeddings(vectors, kind, dim));
}

export function readEmbeddings(file: string): EmbeddingBlock {
  return decodeEmbeddings(fs.readFileSync(file));
}

export interface Detections {
  objects: string[];
  bins: number[];
  totalPixels: number;
}

/** Write object labels plus the color histogram as the pipeline's detections JSON. */
export function writeDetections(file: string, det: Detections): void {
  if (det.bins.length !== HISTOGRAM_BINS) {
    throw new FormatError(`histogram must have ${HISTOGRAM_BINS} bins, got ${det.bins.length}`);
  }
  const doc = {
    objects: det.objects,
    histogram: { bins: det.bins, total_pixels: det.totalPixels },
  };
  fs.writeFileSync(file, JSON.stringify(doc, null, 2) + "\n");
}

export interface ManifestEntry {
  videoId: string;
  title: string;
  label: 0 | 1;
  categories: Record<string, boolean>;
  bundleDir: string;
}

/**
 * Render one manifest line. bundle_dir is stored relative to the
 * manifest's own directory so the corpus can be moved as a unit.
 */
export function manifestLine(entry: ManifestEntry, manifestDir: string): string {
  const rel = path.relative(manifestDir, entry.bundleDir) || ".";
  const doc = {
    bundle_dir: rel.split(path.sep).join("/"),
    categories: entry.categories,
    label: entry.label,
    title: entry.title,
    video_id: entry.videoId,
  };
  return JSON.stringify(doc);
}

export function writeManifest(file: string, entries: readonly ManifestEntry[]): void {
  const dir = path.dirname(file);
  const lines = entries.map((e) => manifestLine(e, dir));
  fs.writeFileSync(file, lines.join("\n") + (lines.length ? "\n" : ""));
}
