#!/usr/bin/env node
/**
 * Command-line front end.
 *
 *   bundle-extract extract --video-id v01 --title "..." \
 *       --thumbnail t.png --keyframe k0.png --keyframe k1.png \
 *       [--audio a.wav] --bundle-dir out/v01
 *
 *   bundle-extract batch --jobs jobs.json [--parallelism N] \
 *       [--skip-existing] [--manifest out/manifest.jsonl]
 *
 * The batch jobs file is a JSON array of objects with snake_case keys:
 * video_id, title, thumbnail, keyframes, bundle_dir, and optionally
 * audio, label, categories.
 */
import * as fs from "node:fs";
import { pathToFileURL } from "node:url";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { extractBundle } from "./extract.js";
import { batchExtract, type BatchJob } from "./batch.js";

interface RawJob {
  video_id: string;
  title: string;
  thumbnail: string;
  keyframes: string[];
  audio?: string;
  bundle_dir: string;
  label?: 0 | 1;
  categories?: Record<string, boolean>;
}

function parseJobs(file: string): BatchJob[] {
  const raw = JSON.parse(fs.readFileSync(file, "utf-8")) as RawJob[];
  if (!Array.isArray(raw)) {
    throw new Error(`${file}: expected a JSON array of jobs`);
  }
  return raw.map((j, i) => {
    for (const key of ["video_id", "title", "thumbnail", "keyframes", "bundle_dir"] as const) {
      if (j[key] === undefined) {
        throw new Error(`${file}: job ${i} is missing "${key}"`);
      }
    }
    return {
      videoId: j.video_id,
      title: j.title,
      thumbnail: j.thumbnail,
      keyframes: j.keyframes,
      audio: j.audio,
      bundleDir: j.bundle_dir,
      label: j.label,
      categories: j.categories,
    };
  });
}

export async function main(argv: string[]): Promise<number> {
  let exitCode = 0;
  await yargs(argv)
    .scriptName("bundle-extract")
    .strict()
    .demandCommand(1)
    .command(
      "extract",
      "extract one video's modality bundle",
      (y) =>
        y
          .option("video-id", { type: "string", demandOption: true })
          .option("title", { type: "string", demandOption: true })
          .option("thumbnail", { type: "string", demandOption: true, describe: "thumbnail PNG" })
          .option("keyframe", {
            type: "string",
            array: true,
            demandOption: true,
            describe: "keyframe PNG (repeatable)",
          })
          .option("audio", { type: "string", describe: "WAV audio track" })
          .option("bundle-dir", { type: "string", demandOption: true })
          .option("silence-threshold", { type: "number", default: 1e-3 }),
      async (args) => {
        try {
          const summary = await extractBundle(
            {
              videoId: args["video-id"],
              title: args.title,
              thumbnail: args.thumbnail,
              keyframes: args.keyframe,
              audio: args.audio,
              bundleDir: args["bundle-dir"],
            },
            { silenceThreshold: args["silence-threshold"] },
          );
          console.log(
            `${summary.videoId}: ${summary.files.length} files, ` +
              `${summary.keyframes} keyframes -> ${summary.bundleDir}`,
          );
        } catch (err) {
          console.error(`error: ${(err as Error).message}`);
          exitCode = 1;
        }
      },
    )
    .command(
      "batch",
      "extract a list of videos, tolerating per-job failures",
      (y) =>
        y
          .option("jobs", { type: "string", demandOption: true, describe: "JSON job list" })
          .option("parallelism", { type: "number", default: 1 })
          .option("skip-existing", { type: "boolean", default: false })
          .option("manifest", { type: "string", describe: "write a corpus manifest here" })
          .option("silence-threshold", { type: "number", default: 1e-3 }),
      async (args) => {
        let jobs: BatchJob[];
        try {
          jobs = parseJobs(args.jobs);
        } catch (err) {
          console.error(`error: ${(err as Error).message}`);
          exitCode = 1;
          return;
        }
        const summary = await batchExtract(jobs, {
          parallelism: args.parallelism,
          skipExisting: args["skip-existing"],
          manifestPath: args.manifest,
          silenceThreshold: args["silence-threshold"],
        });
        for (const f of summary.failed) {
          console.error(`failed ${f.videoId}: ${f.error}`);
        }
        console.log(
          `extracted ${summary.completed.length}, ` +
            `failed ${summary.failed.length}, skipped ${summary.skipped.length}`,
        );
        if (summary.failed.length > 0) {
          exitCode = 1;
        }
      },
    )
    .parseAsync();
  return exitCode;
}

const invokedDirectly =
  process.argv[1] !== undefined && import.meta.url === pathToFileURL(process.argv[1]).href;
if (invokedDirectly) {
  main(hideBin(process.argv)).then((code) => {
    process.exitCode = code;
  });
}
