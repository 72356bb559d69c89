// Safetensors reader: 8 bytes header length (u64 LE) + JSON header + data.
// Only what ingest needs: float dtypes, shapes, and raw views into the
// data section. f16/bf16 entries are widened to f32 losslessly.

export type SafetensorsDtype = "F16" | "BF16" | "F32" | "F64";

export interface TensorInfo {
  name: string;
  dtype: string;
  shape: number[];
  /** byte range relative to the data section */
  begin: number;
  end: number;
}

export interface ParsedCheckpoint {
  tensors: TensorInfo[];
  metadata?: Record<string, string>;
  data: Uint8Array;
}

export class CheckpointFormatError extends Error {}

const DTYPE_BYTES: Record<SafetensorsDtype, number> = {
  F16: 2,
  BF16: 2,
  F32: 4,
  F64: 8,
};

export function isFloatDtype(dtype: string): dtype is SafetensorsDtype {
  return dtype in DTYPE_BYTES;
}

export function parseCheckpoint(raw: Uint8Array): ParsedCheckpoint {
  if (raw.byteLength < 8) {
    throw new CheckpointFormatError("file too short for a safetensors header");
  }
  const view = new DataView(raw.buffer, raw.byteOffset, raw.byteLength);
  const headerLen = view.getBigUint64(0, true);
  if (headerLen > BigInt(raw.byteLength - 8)) {
    throw new CheckpointFormatError(`header length ${headerLen} exceeds file size`);
  }
  const n = Number(headerLen);
  let header: Record<string, unknown>;
  try {
    header = JSON.parse(new TextDecoder().decode(raw.subarray(8, 8 + n)));
  } catch (err) {
    throw new CheckpointFormatError(`header is not valid JSON: ${err}`);
  }
  const data = raw.subarray(8 + n);
  const tensors: TensorInfo[] = [];
  let metadata: Record<string, string> | undefined;
  for (const [name, value] of Object.entries(header)) {
    if (name === "__metadata__") {
      metadata = value as Record<string, string>;
      continue;
    }
    const info = value as {
      dtype?: string;
      shape?: number[];
      data_offsets?: [number, number];
    };
    if (!info || typeof info.dtype !== "string" || !Array.isArray(info.shape) ||
        !Array.isArray(info.data_offsets)) {
      throw new CheckpointFormatError(`malformed tensor entry for "${name}"`);
    }
    const [begin, end] = info.data_offsets;
    if (begin < 0 || end < begin || end > data.byteLength) {
      throw new CheckpointFormatError(`offsets out of range for "${name}"`);
    }
    if (isFloatDtype(info.dtype)) {
      const count = info.shape.reduce((a, b) => a * b, 1);
      if (end - begin !== count * DTYPE_BYTES[info.dtype]) {
        throw new CheckpointFormatError(`payload size mismatch for "${name}"`);
      }
    }
    tensors.push({ name, dtype: info.dtype, shape: info.shape, begin, end });
  }
  return { tensors, metadata, data };
}

/** Exact widening of one IEEE binary16 value (every f16 is an exact f32). */
export function halfToFloat(bits: number): number {
  const sign = bits & 0x8000 ? -1 : 1;
  const exp = (bits >> 10) & 0x1f;
  const mant = bits & 0x3ff;
  if (exp === 0) {
    return sign * mant * 2 ** -24; // subnormal (or zero)
  }
  if (exp === 31) {
    return mant === 0 ? sign * Infinity : NaN;
  }
  return sign * (1 + mant / 1024) * 2 ** (exp - 15);
}

/** Decode a tensor's payload into float64 values (lossless for all dtypes). */
export function decodeValues(
  ckpt: ParsedCheckpoint,
  tensor: TensorInfo,
): Float64Array {
  if (!isFloatDtype(tensor.dtype)) {
    throw new CheckpointFormatError(`unsupported dtype ${tensor.dtype}`);
  }
  const bytes = ckpt.data.subarray(tensor.begin, tensor.end);
  const view = new DataView(bytes.buffer, bytes.byteOffset, bytes.byteLength);
  const count = tensor.shape.reduce((a, b) => a * b, 1);
  const out = new Float64Array(count);
  switch (tensor.dtype) {
    case "F16":
      for (let i = 0; i < count; i++) {
        out[i] = halfToFloat(view.getUint16(2 * i, true));
      }
      break;
    case "BF16": {
      // bf16 is the top half of an f32: shift and reinterpret
      const scratch = new DataView(new ArrayBuffer(4));
      for (let i = 0; i < count; i++) {
        scratch.setUint32(0, view.getUint16(2 * i, true) << 16, false);
        out[i] = scratch.getFloat32(0, false);
      }
      break;
    }
    case "F32":
      for (let i = 0; i < count; i++) {
        out[i] = view.getFloat32(4 * i, true);
      }
      break;
    case "F64":
      for (let i = 0; i < count; i++) {
        out[i] = view.getFloat64(8 * i, true);
      }
      break;
  }
  return out;
}
