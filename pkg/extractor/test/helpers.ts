/** Sample media generators used across the test suites. */
import { Buffer } from "node:buffer";
import * as fs from "node:fs";
import * as path from "node:path";
import { PNG } from "pngjs";

export type Painter = (x: number, y: number) => [number, number, number, number];

export function makePng(file: string, width: number, height: number, paint: Painter): string {
  const png = new PNG({ width, height });
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      const [r, g, b, a] = paint(x, y);
      const off = (y * width + x) * 4;
      png.data[off] = r;
      png.data[off + 1] = g;
      png.data[off + 2] = b;
      png.data[off + 3] = a;
    }
  }
  fs.mkdirSync(path.dirname(file), { recursive: true });
  fs.writeFileSync(file, PNG.sync.write(png));
  return file;
}

export const solid =
  (r: number, g: number, b: number): Painter =>
  () =>
    [r, g, b, 255];

export const gradient: Painter = (x, y) => [(x * 8) % 256, (y * 8) % 256, (x + y) % 256, 255];

export const checker =
  (size: number, a: [number, number, number], b: [number, number, number]): Painter =>
  (x, y) => {
    const c = (Math.floor(x / size) + Math.floor(y / size)) % 2 === 0 ? a : b;
    return [c[0], c[1], c[2], 255];
  };

export interface WavSpec {
  sampleRate?: number;
  channels?: number;
  samples: number[] | Float32Array;
}

/** Write a 16-bit PCM WAV; mono samples are duplicated across channels. */
export function makeWav(file: string, spec: WavSpec): string {
  const rate = spec.sampleRate ?? 16_000;
  const channels = spec.channels ?? 1;
  const n = spec.samples.length;
  const data = Buffer.alloc(n * channels * 2);
  for (let i = 0; i < n; i++) {
    const v = Math.max(-1, Math.min(1, spec.samples[i]));
    const int = Math.round(v * 32767);
    for (let c = 0; c < channels; c++) {
      data.writeInt16LE(int, (i * channels + c) * 2);
    }
  }
  const header = Buffer.alloc(44);
  header.write("RIFF", 0, "ascii");
  header.writeUInt32LE(36 + data.length, 4);
  header.write("WAVE", 8, "ascii");
  header.write("fmt ", 12, "ascii");
  header.writeUInt32LE(16, 16);
  header.writeUInt16LE(1, 20); // PCM
  header.writeUInt16LE(channels, 22);
  header.writeUInt32LE(rate, 24);
  header.writeUInt32LE(rate * channels * 2, 28);
  header.writeUInt16LE(channels * 2, 32);
  header.writeUInt16LE(16, 34);
  header.write("data", 36, "ascii");
  header.writeUInt32LE(data.length, 40);
  fs.mkdirSync(path.dirname(file), { recursive: true });
  fs.writeFileSync(file, Buffer.concat([header, data]));
  return file;
}

export function sine(freq: number, seconds: number, rate = 16_000, amp = 0.5): Float32Array {
  const n = Math.floor(seconds * rate);
  const out = new Float32Array(n);
  for (let i = 0; i < n; i++) {
    out[i] = amp * Math.sin((2 * Math.PI * freq * i) / rate);
  }
  return out;
}

export function tempDir(prefix: string): string {
  return fs.mkdtempSync(path.join(process.env.TMPDIR ?? "/tmp", `${prefix}-`));
}
