// Pull 2-D float tensors out of a safetensors checkpoint and write each as
// a FATF file plus an index.json describing what was written and skipped.

import * as fs from "node:fs";
import * as path from "node:path";

import { encodeFatf, FatfDtype } from "./fatf";
import {
  decodeValues,
  isFloatDtype,
  parseCheckpoint,
  TensorInfo,
} from "./safetensors";

export type CastPolicy = "f32" | "keep";

export interface IngestManifest {
  /** checkpoint path (single-file safetensors) */
  src: string;
  /** glob-style name filters; a tensor is kept when any pattern matches */
  match: string[];
  outDir: string;
  cast: CastPolicy;
}

export interface WrittenTensor {
  tensor: string;
  file: string;
  shape: number[];
  dtype_source: string;
  dtype_stored: FatfDtype;
}

export interface SkippedTensor {
  tensor: string;
  reason: string;
}

export interface IngestIndex {
  source: string;
  cast: CastPolicy;
  patterns: string[];
  written: WrittenTensor[];
  skipped: SkippedTensor[];
}

export class IngestError extends Error {}

export type LogFn = (line: string) => void;

/** fnmatch-style globs: `*` any run, `?` one char; everything else literal. */
export function globToRegExp(pattern: string): RegExp {
  const escaped = pattern.replace(/[.+^${}()|[\]\\]/g, "\\$&");
  return new RegExp(`^${escaped.replace(/\*/g, ".*").replace(/\?/g, ".")}$`);
}

function sanitizeName(name: string, taken: Set<string>): string {
  let base = name.replace(/[^A-Za-z0-9._-]/g, "_");
  if (base === "" || base.startsWith(".")) base = `tensor${base}`;
  let candidate = base;
  let n = 1;
  while (taken.has(candidate)) {
    candidate = `${base}.${n++}`;
  }
  taken.add(candidate);
  return candidate;
}

function storedDtype(source: string, cast: CastPolicy): FatfDtype {
  if (cast === "f32") return "float32";
  // keep: FATF has no 16-bit codes, so half precisions widen losslessly
  return source === "F64" ? "float64" : "float32";
}

/**
 * Run one manifest. Writes `<sanitized tensor name>.fatf` per matching 2-D
 * float tensor, plus `index.json`, into `outDir`. Non-2-D and non-float
 * tensors are skipped with a log line. Throws IngestError when the source
 * is unreadable, malformed, or when no tensor matches the filters.
 */
export function extract(
  manifest: IngestManifest,
  log: LogFn = (line) => process.stderr.write(line + "\n"),
): IngestIndex {
  let raw: Uint8Array;
  try {
    raw = fs.readFileSync(manifest.src);
  } catch (err) {
    throw new IngestError(`cannot read ${manifest.src}: ${err}`);
  }
  const ckpt = parseCheckpoint(raw);
  const patterns = manifest.match.length ? manifest.match : ["*"];
  const regexps = patterns.map(globToRegExp);
  const matched = ckpt.tensors.filter((t) =>
    regexps.some((re) => re.test(t.name)),
  );
  if (matched.length === 0) {
    throw new IngestError(
      `no tensor matches [${patterns.join(", ")}] in ${manifest.src}`,
    );
  }
  fs.mkdirSync(manifest.outDir, { recursive: true });
  const taken = new Set<string>(["index"]);
  const written: WrittenTensor[] = [];
  const skipped: SkippedTensor[] = [];
  const skip = (tensor: TensorInfo, reason: string) => {
    skipped.push({ tensor: tensor.name, reason });
    log(`skip ${tensor.name}: ${reason}`);
  };
  for (const tensor of matched) {
    if (tensor.shape.length !== 2) {
      skip(tensor, `not 2-D (shape [${tensor.shape}])`);
      continue;
    }
    if (!isFloatDtype(tensor.dtype)) {
      skip(tensor, `unsupported dtype ${tensor.dtype}`);
      continue;
    }
    const dtype = storedDtype(tensor.dtype, manifest.cast);
    if (manifest.cast === "keep" && (tensor.dtype === "F16" || tensor.dtype === "BF16")) {
      log(`note ${tensor.name}: ${tensor.dtype} widened losslessly to float32`);
    }
    const values = decodeValues(ckpt, tensor);
    const file = `${sanitizeName(tensor.name, taken)}.fatf`;
    fs.writeFileSync(
      path.join(manifest.outDir, file),
      encodeFatf(values, tensor.shape, dtype),
    );
    written.push({
      tensor: tensor.name,
      file,
      shape: tensor.shape,
      dtype_source: tensor.dtype,
      dtype_stored: dtype,
    });
    log(`wrote ${file} (${tensor.shape.join("x")} ${tensor.dtype} -> ${dtype})`);
  }
  if (written.length === 0) {
    throw new IngestError("every matching tensor was skipped; nothing written");
  }
  const index: IngestIndex = {
    source: path.resolve(manifest.src),
    cast: manifest.cast,
    patterns,
    written,
    skipped,
  };
  fs.writeFileSync(
    path.join(manifest.outDir, "index.json"),
    JSON.stringify(index, null, 2) + "\n",
  );
  return index;
}
