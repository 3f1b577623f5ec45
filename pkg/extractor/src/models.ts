/**
 * Model seams and their offline defaults.
 *
 * Every heavy model (text encoder, image encoder, face detector,
 * object detector, captioner, transcriber, translator) sits behind an
 * interface so production backends can be plugged in per job. The
 * defaults shipped here are deterministic, dependency-free stand-ins:
 * they produce structurally valid output of the contracted dimensions
 * from pixel/text statistics alone, which keeps extraction runnable
 * (and testable) on machines with no model weights.
 */
import { TITLE_DIM, IMAGE_DIM } from "./formats.js";
import { rgbHistogram } from "./histogram.js";
import type { DecodedImage, WavAudio } from "./media.js";

export interface TextEncoder {
  /** Must return a vector of length TITLE_DIM (768). */
  encode(text: string): Float32Array;
}

export interface ImageEncoder {
  /** Must return a vector of length IMAGE_DIM (2048). */
  encode(image: DecodedImage): Float32Array;
}

export interface FaceDetector {
  /** Embedding length for every face this detector emits (>= 1 even when it finds none). */
  readonly embeddingDim: number;
  detect(image: DecodedImage): Float32Array[];
}

export interface ObjectDetector {
  detect(image: DecodedImage): string[];
}

export interface Captioner {
  caption(image: DecodedImage): string;
}

export interface Transcription {
  text: string;
  /** BCP-47-ish language tag, e.g. "en", "de". */
  language: string;
}

export interface Transcriber {
  transcribe(audio: WavAudio): Transcription;
}

export interface Translator {
  /** Return English text; called only when the transcription language is not English. */
  toEnglish(text: string, language: string): string;
}

export interface ModelSet {
  textEncoder: TextEncoder;
  imageEncoder: ImageEncoder;
  faceDetector: FaceDetector;
  objectDetector: ObjectDetector;
  captioner: Captioner;
  transcriber: Transcriber;
  translator: Translator;
}

// FNV-1a, the usual seed/prime constants; cheap and stable across runs.
function fnv1a(text: string, seed = 0x811c9dc5): number {
  let h = seed >>> 0;
  for (let i = 0; i < text.length; i++) {
    h ^= text.charCodeAt(i);
    h = Math.imul(h, 0x01000193) >>> 0;
  }
  return h >>> 0;
}

/**
 * Feature-hashing text encoder: each token adds +/-1 at a hashed
 * coordinate, then the vector is L2-normalized. Same text, same vector.
 */
export class HashingTextEncoder implements TextEncoder {
  encode(text: string): Float32Array {
    const vec = new Float32Array(TITLE_DIM);
    const tokens = text.toLowerCase().split(/[^a-z0-9']+/).filter(Boolean);
    for (const tok of tokens) {
      const h = fnv1a(tok);
      const idx = h % TITLE_DIM;
      const sign = (h >>> 16) & 1 ? 1 : -1;
      vec[idx] += sign;
    }
    let norm = 0;
    for (const x of vec) norm += x * x;
    if (norm > 0) {
      norm = Math.sqrt(norm);
      for (let i = 0; i < vec.length; i++) vec[i] /= norm;
    }
    return vec;
  }
}

/**
 * Histogram-projection image encoder: the normalized 512-bin color
 * histogram is projected to IMAGE_DIM coordinates through fixed
 * hash-derived +/-1 weights. Deterministic in the pixels.
 */
export class HistogramImageEncoder implements ImageEncoder {
  encode(image: DecodedImage): Float32Array {
    const { bins, totalPixels } = rgbHistogram(image.data, 4);
    const vec = new Float32Array(IMAGE_DIM);
    for (let b = 0; b < bins.length; b++) {
      if (bins[b] === 0) continue;
      const freq = bins[b] / totalPixels;
      // Each occupied bin spreads into 8 hashed coordinates.
      for (let r = 0; r < 8; r++) {
        const h = fnv1a(`${b}:${r}`);
        const idx = h % IMAGE_DIM;
        const sign = (h >>> 16) & 1 ? 1 : -1;
        vec[idx] += sign * freq;
      }
    }
    // A couple of global statistics so images with identical
    // histograms but different sizes still differ.
    vec[0] += image.width / 4096;
    vec[1] += image.height / 4096;
    return vec;
  }
}

/** Finds no faces; declares a conventional embedding width. */
export class NullFaceDetector implements FaceDetector {
  readonly embeddingDim = 128;
  detect(): Float32Array[] {
    return [];
  }
}

/** Finds no objects. */
export class NullObjectDetector implements ObjectDetector {
  detect(): string[] {
    return [];
  }
}

const COLOR_TERMS: Array<[string, number, number, number]> = [
  ["black", 0, 0, 0],
  ["white", 255, 255, 255],
  ["gray", 128, 128, 128],
  ["red", 220, 40, 40],
  ["orange", 240, 140, 30],
  ["yellow", 230, 220, 50],
  ["green", 50, 180, 70],
  ["cyan", 60, 200, 200],
  ["blue", 50, 80, 220],
  ["purple", 150, 60, 200],
];

/** Names the dominant color family of the frame. */
export class ColorCaptioner implements Captioner {
  caption(image: DecodedImage): string {
    const { bins } = rgbHistogram(image.data, 4);
    let best = 0;
    for (let b = 1; b < bins.length; b++) {
      if (bins[b] > bins[best]) best = b;
    }
    // Bin center back to RGB.
    const r = ((best >> 6) & 7) * 32 + 16;
    const g = ((best >> 3) & 7) * 32 + 16;
    const b = (best & 7) * 32 + 16;
    let term = COLOR_TERMS[0][0];
    let dist = Infinity;
    for (const [name, cr, cg, cb] of COLOR_TERMS) {
      const d = (r - cr) ** 2 + (g - cg) ** 2 + (b - cb) ** 2;
      if (d < dist) {
        dist = d;
        term = name;
      }
    }
    return `a frame dominated by ${term} tones`;
  }
}

/**
 * Offline default: emits no text. Extraction already short-circuits
 * silent audio before the transcriber runs, so plugging in a real ASR
 * backend changes only what voiced audio produces.
 */
export class SilentTranscriber implements Transcriber {
  transcribe(): Transcription {
    return { text: "", language: "en" };
  }
}

/** Passes text through unchanged. */
export class IdentityTranslator implements Translator {
  toEnglish(text: string): string {
    return text;
  }
}

export function defaultModels(): ModelSet {
  return {
    textEncoder: new HashingTextEncoder(),
    imageEncoder: new HistogramImageEncoder(),
    faceDetector: new NullFaceDetector(),
    objectDetector: new NullObjectDetector(),
    captioner: new ColorCaptioner(),
    transcriber: new SilentTranscriber(),
    translator: new IdentityTranslator(),
  };
}
