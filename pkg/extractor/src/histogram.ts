/**
 * Color histograms over decoded pixel data.
 *
 * Colors are quantized to an 8x8x8 RGB cube (512 bins, 3 high bits
 * per channel), matching the histogram layout the screening pipeline
 * compares across thumbnail and keyframes.
 */
import { HISTOGRAM_BINS } from "./formats.js";

export interface Histogram {
  bins: number[];
  totalPixels: number;
}

/**
 * Count pixels per quantized RGB bin.
 *
 * `data` is interleaved channel data (RGB or RGBA depending on
 * `channels`); any fourth channel is ignored.
 */
export function rgbHistogram(data: Uint8Array, channels: 3 | 4): Histogram {
  if (data.length % channels !== 0) {
    throw new Error(`pixel buffer length ${data.length} is not a multiple of ${channels}`);
  }
  const bins = new Array<number>(HISTOGRAM_BINS).fill(0);
  const n = data.length / channels;
  for (let i = 0; i < n; i++) {
    const off = i * channels;
    const r = data[off] >> 5;
    const g = data[off + 1] >> 5;
    const b = data[off + 2] >> 5;
    bins[(r << 6) | (g << 3) | b] += 1;
  }
  return { bins, totalPixels: n };
}
