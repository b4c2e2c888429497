/** Hand-rolled PNG builder so tests can produce color types and filter codes
 * the studio encoder never emits. */

export type Bytes = Uint8Array<ArrayBuffer>;

const CRC_TABLE = new Uint32Array(256).map((_, n) => {
  let c = n;
  for (let k = 0; k < 8; k++) {
    c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
  }
  return c >>> 0;
});

function crc32(...parts: Uint8Array[]): number {
  let crc = 0xffffffff;
  for (const part of parts) {
    for (const byte of part) {
      crc = (CRC_TABLE[(crc ^ byte) & 0xff]! ^ (crc >>> 8)) >>> 0;
    }
  }
  return (crc ^ 0xffffffff) >>> 0;
}

function chunk(type: string, body: Uint8Array): Bytes {
  const tag = new TextEncoder().encode(type);
  const out = new Uint8Array(12 + body.length);
  const view = new DataView(out.buffer);
  view.setUint32(0, body.length);
  out.set(tag, 4);
  out.set(body, 8);
  view.setUint32(8 + body.length, crc32(tag, body));
  return out;
}

/** Assemble a PNG from already-filtered scanlines (filter byte + pixels per
 * row). `raw` length must be height * (1 + width * channels). */
export async function buildPng(
  width: number,
  height: number,
  colorType: number,
  raw: Uint8Array,
  palette?: Uint8Array,
): Promise<Bytes> {
  const ihdr = new Uint8Array(13);
  const hv = new DataView(ihdr.buffer);
  hv.setUint32(0, width);
  hv.setUint32(4, height);
  ihdr[8] = 8; // bit depth
  ihdr[9] = colorType;
  const stream = new Blob([raw as Bytes]).stream().pipeThrough(new CompressionStream("deflate"));
  const packed = new Uint8Array(await new Response(stream).arrayBuffer());
  const chunks: Bytes[] = [
    new Uint8Array([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]),
    chunk("IHDR", ihdr),
  ];
  if (palette !== undefined) {
    chunks.push(chunk("PLTE", palette));
  }
  chunks.push(chunk("IDAT", packed), chunk("IEND", new Uint8Array(0)));
  const total = chunks.reduce((n, c) => n + c.length, 0);
  const out = new Uint8Array(total);
  let at = 0;
  for (const c of chunks) {
    out.set(c, at);
    at += c.length;
  }
  return out;
}

/** Unfiltered scanlines (filter code 0 on every row) from flat pixel data. */
export function plainScanlines(width: number, height: number, channels: number, data: Uint8Array): Bytes {
  const stride = width * channels;
  if (data.length !== stride * height) {
    throw new Error(`data length ${data.length} does not fit ${width}x${height}x${channels}`);
  }
  const raw = new Uint8Array(height * (stride + 1));
  for (let y = 0; y < height; y++) {
    raw.set(data.subarray(y * stride, (y + 1) * stride), y * (stride + 1) + 1);
  }
  return raw;
}
