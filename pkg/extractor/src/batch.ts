/**
 * Batch extraction over a job list: bounded parallelism, per-job
 * failure isolation (one broken video never aborts the run), optional
 * skip of already-extracted bundles, and optional manifest output in
 * the pipeline's corpus format.
 */
import * as fs from "node:fs";
import * as path from "node:path";
import { extractBundle, type ExtractionJob, type ExtractOptions, type BundleSummary } from "./extract.js";
import { writeManifest, type ManifestEntry } from "./formats.js";

export interface BatchJob extends ExtractionJob {
  /** Screening label for the manifest; defaults to 0 (not clickbait). */
  label?: 0 | 1;
  /** Clickbait tactic flags for the manifest; defaults to none. */
  categories?: Record<string, boolean>;
}

export interface BatchOptions extends ExtractOptions {
  /** Max extractions in flight at once (default 1). */
  parallelism?: number;
  /** Skip jobs whose bundle dir already holds a title.emb. */
  skipExisting?: boolean;
  /** When set, write a manifest of the successful jobs here. */
  manifestPath?: string;
}

export interface JobFailure {
  videoId: string;
  error: string;
}

export interface BatchSummary {
  completed: BundleSummary[];
  failed: JobFailure[];
  skipped: string[];
}

function alreadyExtracted(job: BatchJob): boolean {
  return fs.existsSync(path.join(job.bundleDir, "title.emb"));
}

/** Run every job, collecting outcomes instead of throwing. */
export async function batchExtract(
  jobs: readonly BatchJob[],
  options: BatchOptions = {},
): Promise<BatchSummary> {
  const parallelism = Math.max(1, options.parallelism ?? 1);
  const summary: BatchSummary = { completed: [], failed: [], skipped: [] };

  const queue = [...jobs];
  const runNext = async (): Promise<void> => {
    for (;;) {
      const job = queue.shift();
      if (!job) return;
      if (options.skipExisting && alreadyExtracted(job)) {
        summary.skipped.push(job.videoId);
        continue;
      }
      try {
        summary.completed.push(await extractBundle(job, options));
      } catch (err) {
        summary.failed.push({ videoId: job.videoId, error: (err as Error).message });
      }
    }
  };
  await Promise.all(Array.from({ length: parallelism }, runNext));

  if (options.manifestPath) {
    // Manifest order follows the job list, not completion order.
    const byId = new Map(summary.completed.map((c) => [c.videoId, c]));
    const entries: ManifestEntry[] = [];
    for (const job of jobs) {
      if (!byId.has(job.videoId) && !(options.skipExisting && summary.skipped.includes(job.videoId))) {
        continue;
      }
      entries.push({
        videoId: job.videoId,
        title: job.title,
        label: job.label ?? 0,
        categories: job.categories ?? {},
        bundleDir: job.bundleDir,
      });
    }
    fs.mkdirSync(path.dirname(options.manifestPath), { recursive: true });
    writeManifest(options.manifestPath, entries);
  }
  return summary;
}
