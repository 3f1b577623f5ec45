import { execFile } from "node:child_process";
import * as fs from "node:fs";
import * as path from "node:path";
import { promisify } from "node:util";
import { beforeAll, describe, expect, it } from "vitest";
import {
  KIND_FACE,
  KIND_IMAGE,
  KIND_TITLE,
  TITLE_DIM,
  IMAGE_DIM,
  readEmbeddings,
  writeManifest,
  type ManifestEntry,
} from "../src/formats.js";
import { ExtractionError, extractBundle, type ExtractionJob } from "../src/extract.js";
import type { Transcriber, Translator, FaceDetector, ObjectDetector } from "../src/models.js";
import { checker, gradient, makePng, makeWav, sine, solid, tempDir } from "./helpers.js";

const run = promisify(execFile);
const PYTHON = process.env.PYTHON ?? "python3";

interface Sample {
  job: ExtractionJob;
  label: 0 | 1;
}

let root: string;
let samples: Sample[];

/** Three sample media items: tone audio, silent audio, no audio. */
function buildSamples(base: string): Sample[] {
  const media = path.join(base, "media");
  const bundles = path.join(base, "bundles");
  const mk = (id: string) => path.join(media, id);

  const s1: Sample = {
    label: 1,
    job: {
      videoId: "vid-001",
      title: "You Won't Believe These 10 Facts",
      thumbnail: makePng(mk("v1-thumb.png"), 32, 24, gradient),
      keyframes: [
        makePng(mk("v1-kf0.png"), 32, 24, solid(220, 30, 30)),
        makePng(mk("v1-kf1.png"), 32, 24, checker(4, [255, 255, 255], [0, 0, 0])),
      ],
      audio: makeWav(mk("v1.wav"), { samples: Array.from(sine(440, 0.1)) }),
      bundleDir: path.join(bundles, "vid-001"),
    },
  };
  const s2: Sample = {
    label: 0,
    job: {
      videoId: "vid-002",
      title: "Committee hearing on municipal budget",
      thumbnail: makePng(mk("v2-thumb.png"), 16, 16, solid(40, 60, 200)),
      keyframes: [makePng(mk("v2-kf0.png"), 16, 16, solid(45, 65, 205))],
      audio: makeWav(mk("v2.wav"), { samples: new Array(1600).fill(0) }), // silent
      bundleDir: path.join(bundles, "vid-002"),
    },
  };
  const s3: Sample = {
    label: 0,
    job: {
      videoId: "vid-003",
      title: "Weekly weather roundup",
      thumbnail: makePng(mk("v3-thumb.png"), 20, 12, checker(2, [200, 200, 50], [50, 200, 200])),
      keyframes: [
        makePng(mk("v3-kf0.png"), 20, 12, solid(128, 128, 128)),
        makePng(mk("v3-kf1.png"), 20, 12, gradient),
        makePng(mk("v3-kf2.png"), 20, 12, solid(10, 10, 10)),
      ],
      bundleDir: path.join(bundles, "vid-003"),
    },
  };
  return [s1, s2, s3];
}

beforeAll(async () => {
  root = tempDir("extract");
  samples = buildSamples(root);
  for (const s of samples) {
    await extractBundle(s.job);
  }
});

describe("extractBundle", () => {
  it("writes every bundle artifact", () => {
    for (const s of samples) {
      const must = [
        "title.emb",
        "thumbnail.emb",
        "keyframes.emb",
        "faces_thumbnail.emb",
        "detections_thumbnail.json",
        "caption.txt",
        "transcript.txt",
      ];
      for (let i = 0; i < s.job.keyframes.length; i++) {
        const idx = String(i).padStart(3, "0");
        must.push(`faces_kf_${idx}.emb`, `detections_kf_${idx}.json`);
      }
      for (const name of must) {
        expect(fs.existsSync(path.join(s.job.bundleDir, name)), `${s.job.videoId}/${name}`).toBe(
          true,
        );
      }
    }
  });

  it("honours the embedding dimension contracts (768 title / 2048 image)", () => {
    for (const s of samples) {
      const title = readEmbeddings(path.join(s.job.bundleDir, "title.emb"));
      expect(title.kind).toBe(KIND_TITLE);
      expect(title.dim).toBe(TITLE_DIM);
      expect(title.vectors.length).toBe(1);

      const thumb = readEmbeddings(path.join(s.job.bundleDir, "thumbnail.emb"));
      expect(thumb.kind).toBe(KIND_IMAGE);
      expect(thumb.dim).toBe(IMAGE_DIM);
      expect(thumb.vectors.length).toBe(1);

      const kfs = readEmbeddings(path.join(s.job.bundleDir, "keyframes.emb"));
      expect(kfs.dim).toBe(IMAGE_DIM);
      expect(kfs.vectors.length).toBe(s.job.keyframes.length);

      const faces = readEmbeddings(path.join(s.job.bundleDir, "faces_thumbnail.emb"));
      expect(faces.kind).toBe(KIND_FACE);
      expect(faces.dim).toBeGreaterThanOrEqual(1);
    }
  });

  it("leaves the transcript empty for silent or missing audio", () => {
    const silent = fs.readFileSync(path.join(samples[1].job.bundleDir, "transcript.txt"), "utf-8");
    const noAudio = fs.readFileSync(path.join(samples[2].job.bundleDir, "transcript.txt"), "utf-8");
    expect(silent).toBe("");
    expect(noAudio).toBe("");
  });

  it("produces bundles the screening pipeline validates with zero violations", async () => {
    const manifestPath = path.join(root, "manifest.jsonl");
    const entries: ManifestEntry[] = samples.map((s) => ({
      videoId: s.job.videoId,
      title: s.job.title,
      label: s.label,
      categories: s.label === 1 ? { exaggerated: true, curiosity_gap: true } : {},
      bundleDir: s.job.bundleDir,
    }));
    writeManifest(manifestPath, entries);

    const { stdout } = await run(PYTHON, ["-m", "baitscreen.cli", "validate", "--manifest", manifestPath]);
    expect(stdout.trim()).toBe("0 violations");
  });

  it("requires at least one keyframe", async () => {
    const job: ExtractionJob = {
      ...samples[0].job,
      videoId: "vid-bad",
      keyframes: [],
      bundleDir: path.join(root, "bundles", "vid-bad"),
    };
    await expect(extractBundle(job)).rejects.toThrow(ExtractionError);
  });
});

describe("model seams", () => {
  const stubTranscriber: Transcriber = {
    transcribe: () => ({ text: "hallo welt", language: "de" }),
  };
  const stubTranslator: Translator = {
    toEnglish: (text, language) => (language === "de" ? "hello world" : text),
  };

  it("routes voiced audio through transcription and translation", async () => {
    const dir = path.join(root, "bundles", "seam-voiced");
    await extractBundle(
      { ...samples[0].job, videoId: "seam-voiced", bundleDir: dir },
      { models: { transcriber: stubTranscriber, translator: stubTranslator } },
    );
    const text = fs.readFileSync(path.join(dir, "transcript.txt"), "utf-8");
    expect(text.trim()).toBe("hello world");
  });

  it("short-circuits silent audio before any backend runs", async () => {
    const dir = path.join(root, "bundles", "seam-silent");
    await extractBundle(
      { ...samples[1].job, videoId: "seam-silent", bundleDir: dir },
      { models: { transcriber: stubTranscriber, translator: stubTranslator } },
    );
    const text = fs.readFileSync(path.join(dir, "transcript.txt"), "utf-8");
    expect(text).toBe("");
  });

  it("persists pluggable face and object detections", async () => {
    const faceStub: FaceDetector = {
      embeddingDim: 4,
      detect: () => [Float32Array.from([1, 2, 3, 4]), Float32Array.from([5, 6, 7, 8])],
    };
    const objectStub: ObjectDetector = { detect: () => ["person", "dog"] };
    const dir = path.join(root, "bundles", "seam-det");
    await extractBundle(
      { ...samples[2].job, videoId: "seam-det", bundleDir: dir },
      { models: { faceDetector: faceStub, objectDetector: objectStub } },
    );
    const faces = readEmbeddings(path.join(dir, "faces_thumbnail.emb"));
    expect(faces.dim).toBe(4);
    expect(faces.vectors.length).toBe(2);
    const det = JSON.parse(fs.readFileSync(path.join(dir, "detections_thumbnail.json"), "utf-8"));
    expect(det.objects).toEqual(["person", "dog"]);
  });
});
