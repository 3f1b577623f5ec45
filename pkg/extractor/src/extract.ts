/**
 * Single-video extraction: decode the raw media for one video and
 * write the modality bundle directory the screening pipeline loads.
 *
 * Bundle layout (all files required):
 *   title.emb                 one 768-dim title vector
 *   thumbnail.emb             one 2048-dim image vector
 *   keyframes.emb             K >= 1 image vectors, 2048-dim
 *   faces_thumbnail.emb       face vectors found in the thumbnail
 *   detections_thumbnail.json object labels + 512-bin color histogram
 *   faces_kf_XXX.emb          per-keyframe faces (XXX = 000, 001, ...)
 *   detections_kf_XXX.json    per-keyframe objects + histogram
 *   caption.txt               thumbnail caption
 *   transcript.txt            English transcript ("" when silent/absent)
 */
import * as fs from "node:fs";
import * as path from "node:path";
import {
  KIND_TITLE,
  KIND_IMAGE,
  KIND_FACE,
  TITLE_DIM,
  IMAGE_DIM,
  writeEmbeddings,
  writeDetections,
} from "./formats.js";
import { rgbHistogram } from "./histogram.js";
import { decodePng, decodeWav, isSilent, type DecodedImage } from "./media.js";
import { defaultModels, type ModelSet } from "./models.js";

export class ExtractionError extends Error {}

export interface ExtractionJob {
  videoId: string;
  title: string;
  /** Path to the thumbnail PNG. */
  thumbnail: string;
  /** Paths to keyframe PNGs, at least one. */
  keyframes: string[];
  /** Optional path to a WAV audio track. */
  audio?: string;
  /** Where to write the bundle. Created if missing. */
  bundleDir: string;
}

export interface ExtractOptions {
  /** Override any subset of the model seams. */
  models?: Partial<ModelSet>;
  /** Peak-amplitude threshold below which audio counts as silent. */
  silenceThreshold?: number;
}

export interface BundleSummary {
  videoId: string;
  bundleDir: string;
  keyframes: number;
  thumbnailFaces: number;
  thumbnailObjects: number;
  transcriptChars: number;
  files: string[];
}

function checkDim(vec: Float32Array, dim: number, what: string): Float32Array {
  if (vec.length !== dim) {
    throw new ExtractionError(`${what} encoder returned ${vec.length} dims, contract is ${dim}`);
  }
  return vec;
}

function kfIndex(i: number): string {
  return String(i).padStart(3, "0");
}

/** Extract one video's bundle. Returns a summary of what was written. */
export async function extractBundle(
  job: ExtractionJob,
  options: ExtractOptions = {},
): Promise<BundleSummary> {
  const models: ModelSet = { ...defaultModels(), ...options.models };
  const threshold = options.silenceThreshold ?? 1e-3;

  if (job.keyframes.length < 1) {
    throw new ExtractionError(`${job.videoId}: at least one keyframe is required`);
  }

  const thumbnail = decodePng(job.thumbnail);
  const keyframes = job.keyframes.map((p) => decodePng(p));

  const titleVec = checkDim(models.textEncoder.encode(job.title), TITLE_DIM, "title");
  const thumbVec = checkDim(models.imageEncoder.encode(thumbnail), IMAGE_DIM, "image");
  const kfVecs = keyframes.map((img) =>
    checkDim(models.imageEncoder.encode(img), IMAGE_DIM, "image"),
  );

  const faceDim = Math.max(1, models.faceDetector.embeddingDim);
  const detectFaces = (img: DecodedImage): Float32Array[] => {
    const faces = models.faceDetector.detect(img);
    for (const f of faces) {
      if (f.length !== faceDim) {
        throw new ExtractionError(
          `face detector emitted ${f.length}-dim vector, declared ${faceDim}`,
        );
      }
    }
    return faces;
  };
  const thumbFaces = detectFaces(thumbnail);
  const kfFaces = keyframes.map(detectFaces);

  const thumbObjects = models.objectDetector.detect(thumbnail);
  const kfObjects = keyframes.map((img) => models.objectDetector.detect(img));

  const caption = models.captioner.caption(thumbnail);

  let transcript = "";
  if (job.audio) {
    const audio = decodeWav(job.audio);
    if (!isSilent(audio, threshold)) {
      const t = models.transcriber.transcribe(audio);
      transcript = t.language === "en" ? t.text : models.translator.toEnglish(t.text, t.language);
    }
  }

  fs.mkdirSync(job.bundleDir, { recursive: true });
  const files: string[] = [];
  const put = (name: string, write: (full: string) => void) => {
    write(path.join(job.bundleDir, name));
    files.push(name);
  };

  put("title.emb", (f) => writeEmbeddings(f, [titleVec], KIND_TITLE, TITLE_DIM));
  put("thumbnail.emb", (f) => writeEmbeddings(f, [thumbVec], KIND_IMAGE, IMAGE_DIM));
  put("keyframes.emb", (f) => writeEmbeddings(f, kfVecs, KIND_IMAGE, IMAGE_DIM));
  put("faces_thumbnail.emb", (f) => writeEmbeddings(f, thumbFaces, KIND_FACE, faceDim));
  put("detections_thumbnail.json", (f) => {
    const h = rgbHistogram(thumbnail.data, 4);
    writeDetections(f, { objects: thumbObjects, bins: h.bins, totalPixels: h.totalPixels });
  });
  keyframes.forEach((img, i) => {
    put(`faces_kf_${kfIndex(i)}.emb`, (f) => writeEmbeddings(f, kfFaces[i], KIND_FACE, faceDim));
    put(`detections_kf_${kfIndex(i)}.json`, (f) => {
      const h = rgbHistogram(img.data, 4);
      writeDetections(f, { objects: kfObjects[i], bins: h.bins, totalPixels: h.totalPixels });
    });
  });
  put("caption.txt", (f) => fs.writeFileSync(f, caption + "\n"));
  put("transcript.txt", (f) => fs.writeFileSync(f, transcript ? transcript + "\n" : ""));

  return {
    videoId: job.videoId,
    bundleDir: job.bundleDir,
    keyframes: keyframes.length,
    thumbnailFaces: thumbFaces.length,
    thumbnailObjects: thumbObjects.length,
    transcriptChars: transcript.length,
    files,
  };
}
