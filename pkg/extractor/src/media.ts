/**
 * Media decoding: PNG images via pngjs and RIFF/WAVE audio parsed
 * directly (PCM 8/16-bit and IEEE float32, any channel count).
 */
import * as fs from "node:fs";
import { PNG } from "pngjs";

export class MediaError extends Error {}

export interface DecodedImage {
  width: number;
  height: number;
  /** Interleaved RGBA bytes, length = width*height*4. */
  data: Uint8Array;
}

export function decodePng(file: string): DecodedImage {
  let png: PNG;
  try {
    png = PNG.sync.read(fs.readFileSync(file));
  } catch (err) {
    throw new MediaError(`cannot decode ${file}: ${(err as Error).message}`);
  }
  return { width: png.width, height: png.height, data: new Uint8Array(png.data) };
}

export interface WavAudio {
  sampleRate: number;
  /** Mono samples normalized to [-1, 1]; channels are averaged. */
  samples: Float32Array;
}

export function decodeWav(file: string): WavAudio {
  const buf = fs.readFileSync(file);
  if (buf.length < 12 || buf.toString("ascii", 0, 4) !== "RIFF" || buf.toString("ascii", 8, 12) !== "WAVE") {
    throw new MediaError(`${file} is not a RIFF/WAVE file`);
  }
  let fmt: { audioFormat: number; channels: number; sampleRate: number; bitsPerSample: number } | null = null;
  let data: Buffer | null = null;
  let off = 12;
  while (off + 8 <= buf.length) {
    const id = buf.toString("ascii", off, off + 4);
    const size = buf.readUInt32LE(off + 4);
    const body = buf.subarray(off + 8, off + 8 + size);
    if (id === "fmt ") {
      fmt = {
        audioFormat: body.readUInt16LE(0),
        channels: body.readUInt16LE(2),
        sampleRate: body.readUInt32LE(4),
        bitsPerSample: body.readUInt16LE(14),
      };
    } else if (id === "data") {
      data = Buffer.from(body);
    }
    off += 8 + size + (size % 2); // chunks are word-aligned
  }
  if (!fmt || !data) {
    throw new MediaError(`${file} is missing fmt/data chunks`);
  }
  if (fmt.channels < 1) {
    throw new MediaError(`${file} declares ${fmt.channels} channels`);
  }

  const bytesPer = fmt.bitsPerSample / 8;
  const frameCount = Math.floor(data.length / (bytesPer * fmt.channels));
  const samples = new Float32Array(frameCount);
  const read = sampleReader(fmt.audioFormat, fmt.bitsPerSample, file);
  for (let i = 0; i < frameCount; i++) {
    let acc = 0;
    for (let c = 0; c < fmt.channels; c++) {
      acc += read(data, (i * fmt.channels + c) * bytesPer);
    }
    samples[i] = acc / fmt.channels;
  }
  return { sampleRate: fmt.sampleRate, samples };
}

function sampleReader(
  audioFormat: number,
  bits: number,
  file: string,
): (buf: Buffer, off: number) => number {
  if (audioFormat === 1 && bits === 16) {
    return (buf, off) => buf.readInt16LE(off) / 32768;
  }
  if (audioFormat === 1 && bits === 8) {
    return (buf, off) => (buf.readUInt8(off) - 128) / 128; // 8-bit PCM is unsigned
  }
  if (audioFormat === 3 && bits === 32) {
    return (buf, off) => buf.readFloatLE(off);
  }
  throw new MediaError(`${file}: unsupported WAV encoding (format ${audioFormat}, ${bits}-bit)`);
}

/** True when no sample exceeds the amplitude threshold. */
export function isSilent(audio: WavAudio, threshold = 1e-3): boolean {
  for (const s of audio.samples) {
    if (Math.abs(s) > threshold) {
      return false;
    }
  }
  return true;
}
