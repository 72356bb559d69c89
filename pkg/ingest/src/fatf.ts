// FATF tensor files: "FATF" magic, u16 version, u8 dtype code, u8 ndim,
// u64 dims, then row-major little-endian scalars. Matches the byte layout
// documented in docs/formats.md of the main package.

export const FATF_MAGIC = "FATF";
export const FATF_VERSION = 1;

export type FatfDtype = "float64" | "float32";

const DTYPE_CODES: Record<FatfDtype, number> = { float64: 0, float32: 1 };
const CODE_DTYPES: Record<number, FatfDtype> = { 0: "float64", 1: "float32" };

export class FatfFormatError extends Error {}

export interface FatfTensor {
  dtype: FatfDtype;
  shape: number[];
  /** row-major values, exact for float64, already-rounded for float32 */
  values: Float64Array;
}

export function encodeFatf(
  values: ArrayLike<number>,
  shape: number[],
  dtype: FatfDtype,
): Uint8Array {
  if (shape.length < 1 || shape.length > 2) {
    throw new FatfFormatError(`FATF stores 1-D or 2-D tensors, got ${shape.length}-D`);
  }
  if (shape.some((d) => d <= 0 || !Number.isInteger(d))) {
    throw new FatfFormatError(`bad shape [${shape}]`);
  }
  const count = shape.reduce((a, b) => a * b, 1);
  if (values.length !== count) {
    throw new FatfFormatError(
      `value count ${values.length} != product(shape) ${count}`,
    );
  }
  const itemSize = dtype === "float64" ? 8 : 4;
  const headerSize = 8 + 8 * shape.length;
  const out = new Uint8Array(headerSize + count * itemSize);
  const view = new DataView(out.buffer);
  for (let i = 0; i < 4; i++) out[i] = FATF_MAGIC.charCodeAt(i);
  view.setUint16(4, FATF_VERSION, true);
  view.setUint8(6, DTYPE_CODES[dtype]);
  view.setUint8(7, shape.length);
  shape.forEach((d, i) => view.setBigUint64(8 + 8 * i, BigInt(d), true));
  for (let i = 0; i < count; i++) {
    if (dtype === "float64") {
      view.setFloat64(headerSize + 8 * i, values[i], true);
    } else {
      view.setFloat32(headerSize + 4 * i, values[i], true);
    }
  }
  return out;
}

export function decodeFatf(raw: Uint8Array): FatfTensor {
  if (raw.byteLength < 8) {
    throw new FatfFormatError("truncated FATF header");
  }
  const view = new DataView(raw.buffer, raw.byteOffset, raw.byteLength);
  const magic = String.fromCharCode(raw[0], raw[1], raw[2], raw[3]);
  if (magic !== FATF_MAGIC) {
    throw new FatfFormatError(`bad magic "${magic}"`);
  }
  const version = view.getUint16(4, true);
  if (version > FATF_VERSION) {
    throw new FatfFormatError(`unsupported version ${version}`);
  }
  const code = view.getUint8(6);
  const dtype = CODE_DTYPES[code];
  if (dtype === undefined) {
    throw new FatfFormatError(`unsupported dtype_code ${code} for this reader`);
  }
  const ndim = view.getUint8(7);
  if (ndim < 1 || ndim > 2) {
    throw new FatfFormatError(`ndim must be 1 or 2, got ${ndim}`);
  }
  if (raw.byteLength < 8 + 8 * ndim) {
    throw new FatfFormatError("truncated FATF dims");
  }
  const shape: number[] = [];
  for (let i = 0; i < ndim; i++) {
    const dim = view.getBigUint64(8 + 8 * i, true);
    if (dim === 0n || dim > BigInt(Number.MAX_SAFE_INTEGER)) {
      throw new FatfFormatError(`bad dim ${dim}`);
    }
    shape.push(Number(dim));
  }
  const headerSize = 8 + 8 * ndim;
  const itemSize = dtype === "float64" ? 8 : 4;
  const count = shape.reduce((a, b) => a * b, 1);
  if (raw.byteLength - headerSize !== count * itemSize) {
    throw new FatfFormatError(
      `payload length ${raw.byteLength - headerSize} != expected ${count * itemSize}`,
    );
  }
  const values = new Float64Array(count);
  for (let i = 0; i < count; i++) {
    values[i] =
      dtype === "float64"
        ? view.getFloat64(headerSize + 8 * i, true)
        : view.getFloat32(headerSize + 4 * i, true);
  }
  return { dtype, shape, values };
}
