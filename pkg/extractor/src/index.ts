export {
  EMB_MAGIC,
  EMB_VERSION,
  KIND_TITLE,
  KIND_IMAGE,
  KIND_FACE,
  TITLE_DIM,
  IMAGE_DIM,
  HISTOGRAM_BINS,
  KNOWN_CATEGORIES,
  FormatError,
  encodeEmbeddings,
  decodeEmbeddings,
  writeEmbeddings,
  readEmbeddings,
  writeDetections,
  manifestLine,
  writeManifest,
} from "./formats.js";
export type { EmbeddingBlock, Detections, ManifestEntry } from "./formats.js";
export { rgbHistogram } from "./histogram.js";
export type { Histogram } from "./histogram.js";
export { MediaError, decodePng, decodeWav, isSilent } from "./media.js";
export type { DecodedImage, WavAudio } from "./media.js";
export {
  HashingTextEncoder,
  HistogramImageEncoder,
  NullFaceDetector,
  NullObjectDetector,
  ColorCaptioner,
  SilentTranscriber,
  IdentityTranslator,
  defaultModels,
} from "./models.js";
export type {
  TextEncoder,
  ImageEncoder,
  FaceDetector,
  ObjectDetector,
  Captioner,
  Transcriber,
  Transcription,
  Translator,
  ModelSet,
} from "./models.js";
export { ExtractionError, extractBundle } from "./extract.js";
export type { ExtractionJob, ExtractOptions, BundleSummary } from "./extract.js";
export { batchExtract } from "./batch.js";
export type { BatchJob, BatchOptions, BatchSummary, JobFailure } from "./batch.js";
