import { Buffer } from "node:buffer";
import * as fs from "node:fs";
import * as path from "node:path";
import { describe, expect, it } from "vitest";
import {
  FormatError,
  KIND_FACE,
  KIND_IMAGE,
  decodeEmbeddings,
  encodeEmbeddings,
  manifestLine,
  readEmbeddings,
  writeEmbeddings,
  writeDetections,
} from "../src/formats.js";
import { tempDir } from "./helpers.js";

describe("embedding container", () => {
  it("matches the byte layout exactly", () => {
    // Hand-assembled oracle: header + two known float32 patterns.
    const buf = encodeEmbeddings([Float32Array.from([1.5, -2.0])], KIND_IMAGE, 2);
    const expected = Buffer.concat([
      Buffer.from("CPDM", "ascii"),
      Buffer.from([1, KIND_IMAGE]),
      Buffer.from([2, 0, 0, 0]), // dim
      Buffer.from([1, 0, 0, 0]), // count
      Buffer.from([0x00, 0x00, 0xc0, 0x3f]), // 1.5
      Buffer.from([0x00, 0x00, 0x00, 0xc0]), // -2.0
    ]);
    expect(buf.equals(expected)).toBe(true);
  });

  it("round-trips vectors bit-exactly", () => {
    const vecs = [
      Float32Array.from([0.25, -3.125, 1e-7, 42]),
      Float32Array.from([Math.fround(Math.PI), 0, -0, 6.02e23]),
    ];
    const out = decodeEmbeddings(encodeEmbeddings(vecs, KIND_IMAGE, 4));
    expect(out.kind).toBe(KIND_IMAGE);
    expect(out.dim).toBe(4);
    expect(out.vectors.length).toBe(2);
    for (let i = 0; i < vecs.length; i++) {
      expect(Array.from(out.vectors[i])).toEqual(Array.from(vecs[i]));
    }
  });

  it("supports empty blocks with a declared dim", () => {
    const out = decodeEmbeddings(encodeEmbeddings([], KIND_FACE, 128));
    expect(out.vectors.length).toBe(0);
    expect(out.dim).toBe(128);
  });

  it("rejects malformed input", () => {
    expect(() => encodeEmbeddings([], KIND_FACE, 0)).toThrow(FormatError);
    expect(() => encodeEmbeddings([Float32Array.from([1])], KIND_FACE, 2)).toThrow(FormatError);
    expect(() => encodeEmbeddings([Float32Array.from([NaN])], KIND_FACE, 1)).toThrow(FormatError);

    const good = encodeEmbeddings([Float32Array.from([1, 2])], KIND_IMAGE, 2);
    const badMagic = Buffer.from(good);
    badMagic.write("NOPE", 0, "ascii");
    expect(() => decodeEmbeddings(badMagic)).toThrow(/magic/);
    expect(() => decodeEmbeddings(good.subarray(0, 10))).toThrow(/truncated/);
    expect(() => decodeEmbeddings(good.subarray(0, good.length - 4))).toThrow(/mismatch/);
  });

  it("reads back what it writes to disk", () => {
    const dir = tempDir("fmt");
    const file = path.join(dir, "x.emb");
    writeEmbeddings(file, [Float32Array.from([7, 8, 9])], KIND_IMAGE, 3);
    const out = readEmbeddings(file);
    expect(Array.from(out.vectors[0])).toEqual([7, 8, 9]);
  });
});

describe("detections JSON", () => {
  it("uses the snake_case schema the pipeline parses", () => {
    const dir = tempDir("det");
    const file = path.join(dir, "d.json");
    const bins = new Array(512).fill(0);
    bins[0] = 5;
    bins[511] = 3;
    writeDetections(file, { objects: ["person", "car"], bins, totalPixels: 8 });
    const doc = JSON.parse(fs.readFileSync(file, "utf-8"));
    expect(doc.objects).toEqual(["person", "car"]);
    expect(doc.histogram.bins.length).toBe(512);
    expect(doc.histogram.bins[511]).toBe(3);
    expect(doc.histogram.total_pixels).toBe(8);
  });

  it("rejects histograms of the wrong width", () => {
    const dir = tempDir("det");
    expect(() =>
      writeDetections(path.join(dir, "bad.json"), { objects: [], bins: [1, 2], totalPixels: 3 }),
    ).toThrow(/512/);
  });
});

describe("manifest lines", () => {
  it("stores bundle_dir relative to the manifest", () => {
    const line = manifestLine(
      {
        videoId: "v01",
        title: "Ten shocking facts",
        label: 1,
        categories: { exaggerated: true },
        bundleDir: "/data/corpus/bundles/v01",
      },
      "/data/corpus",
    );
    const doc = JSON.parse(line);
    expect(doc.bundle_dir).toBe("bundles/v01");
    expect(doc.video_id).toBe("v01");
    expect(doc.label).toBe(1);
    expect(doc.categories).toEqual({ exaggerated: true });
  });
});
