#!/usr/bin/env node
// falq-ingest --src ckpt.safetensors --out DIR [--match GLOB]... [--cast f32|keep]

import { CastPolicy, extract, IngestError, IngestManifest } from "./extract";
import { CheckpointFormatError } from "./safetensors";

const USAGE =
  "usage: falq-ingest --src PATH --out DIR [--match GLOB]... [--cast f32|keep]";

export function parseArgs(argv: string[]): IngestManifest {
  let src: string | undefined;
  let outDir: string | undefined;
  let cast: CastPolicy = "keep";
  const match: string[] = [];
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    const next = () => {
      if (i + 1 >= argv.length) throw new UsageError(`${arg} needs a value`);
      return argv[++i];
    };
    switch (arg) {
      case "--src":
        src = next();
        break;
      case "--out":
        outDir = next();
        break;
      case "--match":
        match.push(next());
        break;
      case "--cast": {
        const value = next();
        if (value !== "f32" && value !== "keep") {
          throw new UsageError(`--cast must be f32 or keep, got ${value}`);
        }
        cast = value;
        break;
      }
      case "--help":
      case "-h":
        throw new UsageError(USAGE);
      default:
        throw new UsageError(`unknown argument ${arg}`);
    }
  }
  if (!src || !outDir) throw new UsageError(USAGE);
  return { src, match, outDir, cast };
}

export class UsageError extends Error {}

export function main(argv: string[]): number {
  let manifest: IngestManifest;
  try {
    manifest = parseArgs(argv);
  } catch (err) {
    process.stderr.write(`${(err as Error).message}\n`);
    return 2;
  }
  try {
    const index = extract(manifest);
    process.stdout.write(
      `${index.written.length} tensor(s) written to ${manifest.outDir} ` +
        `(${index.skipped.length} skipped); see index.json\n`,
    );
    return 0;
  } catch (err) {
    if (err instanceof IngestError || err instanceof CheckpointFormatError) {
      process.stderr.write(`falq-ingest: ${err.message}\n`);
      return 1;
    }
    throw err;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
