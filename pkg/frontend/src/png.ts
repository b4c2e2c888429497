/** Minimal PNG codec for the studio's transport needs.
 *
 * Layouts travel as 8-bit single-channel PNGs (the service accepts grayscale
 * or indexed), edit masks as 0/255 grayscale, and generated images arrive as
 * RGB. Everything here is 8-bit, non-interlaced; compression rides on the
 * standard CompressionStream / DecompressionStream ("deflate" is the zlib
 * format PNG uses), so the codec has no dependencies and runs in both the
 * browser and node.
 */

export type Bytes = Uint8Array<ArrayBuffer>;

const SIGNATURE = [137, 80, 78, 71, 13, 10, 26, 10];

export class PngError extends Error {}

// -- base64, chunked to stay clear of argument-count limits --

export function bytesToB64(data: Bytes): string {
  let binary = "";
  const step = 0x8000;
  for (let i = 0; i < data.length; i += step) {
    binary += String.fromCharCode(...data.subarray(i, i + step));
  }
  return btoa(binary);
}

export function b64ToBytes(b64: string): Bytes {
  let binary: string;
  try {
    binary = atob(b64);
  } catch {
    throw new PngError("not valid base64");
  }
  const out = new Uint8Array(binary.length);
  for (let i = 0; i < binary.length; i++) {
    out[i] = binary.charCodeAt(i);
  }
  return out;
}

// -- zlib via the standard streams --

async function pipe(data: Bytes, transform: CompressionStream | DecompressionStream): Promise<Bytes> {
  const stream = new Blob([data]).stream().pipeThrough(transform);
  return new Uint8Array(await new Response(stream).arrayBuffer());
}

function deflate(data: Bytes): Promise<Bytes> {
  return pipe(data, new CompressionStream("deflate"));
}

async function inflate(data: Bytes): Promise<Bytes> {
  try {
    return await pipe(data, new DecompressionStream("deflate"));
  } catch (err) {
    throw new PngError(`image data does not inflate: ${err}`);
  }
}

// -- CRC32 (PNG chunk checksums) --

const CRC_TABLE = (() => {
  const table = new Uint32Array(256);
  for (let n = 0; n < 256; n++) {
    let c = n;
    for (let k = 0; k < 8; k++) {
      c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
    }
    table[n] = c >>> 0;
  }
  return table;
})();

function crc32(...parts: Bytes[]): number {
  let c = 0xffffffff;
  for (const part of parts) {
    for (let i = 0; i < part.length; i++) {
      c = (CRC_TABLE[(c ^ part[i]!) & 0xff]! ^ (c >>> 8)) >>> 0;
    }
  }
  return (c ^ 0xffffffff) >>> 0;
}

function u32be(value: number): Bytes {
  const out = new Uint8Array(4);
  new DataView(out.buffer).setUint32(0, value >>> 0);
  return out;
}

function chunk(type: string, body: Bytes): Bytes[] {
  const tag = new TextEncoder().encode(type) as Bytes;
  return [u32be(body.length), tag, body, u32be(crc32(tag, body))];
}

function concat(parts: Bytes[]): Bytes {
  const total = parts.reduce((n, p) => n + p.length, 0);
  const out = new Uint8Array(total);
  let at = 0;
  for (const part of parts) {
    out.set(part, at);
    at += part.length;
  }
  return out;
}

/** Encode one byte per pixel as an 8-bit grayscale PNG (color type 0). */
export async function encodeGrayPng(width: number, height: number, data: Bytes): Promise<Bytes> {
  if (width <= 0 || height <= 0 || data.length !== width * height) {
    throw new PngError(`data length ${data.length} does not fit ${width}x${height}`);
  }
  const ihdr = new Uint8Array(13);
  const view = new DataView(ihdr.buffer);
  view.setUint32(0, width);
  view.setUint32(4, height);
  ihdr[8] = 8; // bit depth
  ihdr[9] = 0; // grayscale
  const raw = new Uint8Array(height * (width + 1));
  for (let y = 0; y < height; y++) {
    raw[y * (width + 1)] = 0; // filter: none
    raw.set(data.subarray(y * width, (y + 1) * width), y * (width + 1) + 1);
  }
  return concat([
    new Uint8Array(SIGNATURE),
    ...chunk("IHDR", ihdr),
    ...chunk("IDAT", await deflate(raw)),
    ...chunk("IEND", new Uint8Array(0)),
  ]);
}

export interface DecodedPng {
  width: number;
  height: number;
  /** Samples per pixel after decoding; indexed images stay 1 (palette indices). */
  channels: number;
  colorType: number;
  /** Row-major samples, channels interleaved. */
  data: Bytes;
  /** RGB triples for color type 3, when a PLTE chunk is present. */
  palette: Bytes | null;
}

const CHANNELS: Record<number, number> = { 0: 1, 2: 3, 3: 1, 4: 2, 6: 4 };

function paeth(a: number, b: number, c: number): number {
  const p = a + b - c;
  const pa = Math.abs(p - a);
  const pb = Math.abs(p - b);
  const pc = Math.abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  if (pb <= pc) return b;
  return c;
}

function unfilter(raw: Bytes, width: number, height: number, bpp: number): Bytes {
  const stride = width * bpp;
  if (raw.length < height * (stride + 1)) {
    throw new PngError(`pixel data is ${raw.length} bytes, expected ${height * (stride + 1)}`);
  }
  const out = new Uint8Array(height * stride);
  for (let y = 0; y < height; y++) {
    const filter = raw[y * (stride + 1)]!;
    const row = raw.subarray(y * (stride + 1) + 1, (y + 1) * (stride + 1));
    const at = y * stride;
    for (let x = 0; x < stride; x++) {
      const left = x >= bpp ? out[at + x - bpp]! : 0;
      const up = y > 0 ? out[at + x - stride]! : 0;
      const upLeft = y > 0 && x >= bpp ? out[at + x - stride - bpp]! : 0;
      let value = row[x]!;
      switch (filter) {
        case 0:
          break;
        case 1:
          value += left;
          break;
        case 2:
          value += up;
          break;
        case 3:
          value += (left + up) >> 1;
          break;
        case 4:
          value += paeth(left, up, upLeft);
          break;
        default:
          throw new PngError(`unknown filter type ${filter} on row ${y}`);
      }
      out[at + x] = value & 0xff;
    }
  }
  return out;
}

/** Decode an 8-bit non-interlaced PNG (grayscale, RGB, indexed, or with alpha). */
export async function decodePng(bytes: Bytes): Promise<DecodedPng> {
  if (bytes.length < 8 || SIGNATURE.some((b, i) => bytes[i] !== b)) {
    throw new PngError("not a PNG: bad signature");
  }
  const view = new DataView(bytes.buffer, bytes.byteOffset, bytes.byteLength);
  let at = 8;
  let header: { width: number; height: number; colorType: number } | null = null;
  let palette: Bytes | null = null;
  const idat: Bytes[] = [];
  while (at + 8 <= bytes.length) {
    const length = view.getUint32(at);
    const type = String.fromCharCode(bytes[at + 4]!, bytes[at + 5]!, bytes[at + 6]!, bytes[at + 7]!);
    const body = bytes.slice(at + 8, at + 8 + length);
    if (body.length !== length) {
      throw new PngError(`truncated ${type} chunk`);
    }
    at += 12 + length;
    if (type === "IHDR") {
      const hv = new DataView(body.buffer);
      const bitDepth = body[8]!;
      const colorType = body[9]!;
      const interlace = body[12]!;
      if (bitDepth !== 8) {
        throw new PngError(`only 8-bit PNGs are supported, got bit depth ${bitDepth}`);
      }
      if (!(colorType in CHANNELS)) {
        throw new PngError(`unsupported color type ${colorType}`);
      }
      if (interlace !== 0) {
        throw new PngError("interlaced PNGs are not supported");
      }
      header = { width: hv.getUint32(0), height: hv.getUint32(4), colorType };
    } else if (type === "PLTE") {
      palette = body;
    } else if (type === "IDAT") {
      idat.push(body);
    } else if (type === "IEND") {
      break;
    }
  }
  if (header === null) {
    throw new PngError("missing IHDR chunk");
  }
  if (idat.length === 0) {
    throw new PngError("missing IDAT chunk");
  }
  const channels = CHANNELS[header.colorType]!;
  const raw = await inflate(concat(idat));
  const data = unfilter(raw, header.width, header.height, channels);
  return { ...header, channels, data, palette };
}
