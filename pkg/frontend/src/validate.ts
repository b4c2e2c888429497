/** Client-side request validation, mirroring the service's 422 contract.
 *
 * The checks run in the same order the service applies them and name the same
 * `field` (including indexed forms like "attributes[3]"), so any request the
 * studio refuses locally would have been refused by the service, and the UI
 * can highlight the offending control without a network round trip. Message
 * text matches the service verbatim except where it embeds Python-formatted
 * values.
 */

import { b64ToBytes, decodePng, PngError } from "./png.js";
import { CLASS_COUNT, UNLABELED_INDEX } from "./theme.js";

export interface FieldError {
  field: string;
  message: string;
}

export type Variant = "AL" | "A_ONLY" | "L_ONLY";

export interface ServiceShape {
  variant: Variant;
  resolution: number;
  attributeCount: number;
  checkpointHash: string | null;
}

export interface GenerateBody {
  layout?: unknown;
  attributes?: unknown;
  seed?: unknown;
  checkpoint?: unknown;
  [extra: string]: unknown;
}

export interface SweepBody extends GenerateBody {
  attribute_index?: unknown;
  strengths?: unknown;
}

function isNumber(value: unknown): value is number {
  return typeof value === "number" && Number.isFinite(value);
}

function checkCheckpoint(body: GenerateBody, shape: ServiceShape): FieldError | null {
  const wanted = body.checkpoint;
  if (wanted === undefined || wanted === null) {
    return null;
  }
  if (typeof wanted !== "string" || shape.checkpointHash === null || !shape.checkpointHash.startsWith(wanted)) {
    return {
      field: "checkpoint",
      message: `service holds checkpoint ${shape.checkpointHash}, not '${String(wanted)}'`,
    };
  }
  return null;
}

/** PIL mode names for the color types the decoder knows, for message parity. */
const MODE_NAMES: Record<number, string> = { 0: "L", 2: "RGB", 3: "P", 4: "LA", 6: "RGBA" };

async function checkLayout(body: GenerateBody, shape: ServiceShape): Promise<FieldError | null> {
  if (!("layout" in body) || body.layout === undefined) {
    return { field: "layout", message: "layout is required" };
  }
  if (typeof body.layout !== "string") {
    return { field: "layout", message: "layout must be a base64 PNG string" };
  }
  const reject = (reason: string): FieldError => ({
    field: "layout",
    message: `layout does not decode to an index map: ${reason}`,
  });
  let png;
  try {
    png = await decodePng(b64ToBytes(body.layout));
  } catch (err) {
    return reject(err instanceof PngError ? err.message : String(err));
  }
  if (png.colorType !== 0 && png.colorType !== 3) {
    const mode = MODE_NAMES[png.colorType] ?? `type ${png.colorType}`;
    return reject(`layout PNG must be indexed or 8-bit grayscale, got mode '${mode}'`);
  }
  for (let i = 0; i < png.data.length; i++) {
    const value = png.data[i]!;
    if (value >= CLASS_COUNT) {
      const row = Math.floor(i / png.width);
      const col = i % png.width;
      return reject(`class index ${value} at pixel (row=${row}, col=${col}) outside [0, ${UNLABELED_INDEX}]`);
    }
  }
  if (png.height !== shape.resolution || png.width !== shape.resolution) {
    return {
      field: "layout",
      message:
        `layout is ${png.height}x${png.width}, ` +
        `model expects ${shape.resolution}x${shape.resolution}`,
    };
  }
  return null;
}

function checkAttributes(body: GenerateBody, shape: ServiceShape): FieldError | null {
  if (!("attributes" in body) || body.attributes === undefined) {
    return { field: "attributes", message: "attributes is required" };
  }
  const values = body.attributes;
  if (!Array.isArray(values) || !values.every(isNumber)) {
    return { field: "attributes", message: "attributes must be a list of numbers" };
  }
  if (values.length !== shape.attributeCount) {
    return {
      field: "attributes",
      message: `attributes must have ${shape.attributeCount} entries, got ${values.length}`,
    };
  }
  for (let k = 0; k < values.length; k++) {
    const v = values[k]!;
    if (!(v >= 0 && v <= 1)) {
      return { field: `attributes[${k}]`, message: `attributes[${k}] = ${v} outside [0, 1]` };
    }
  }
  return null;
}

function checkSeed(body: GenerateBody): FieldError | null {
  const seed = body.seed ?? 0;
  if (typeof seed === "boolean" || !Number.isInteger(seed)) {
    return { field: "seed", message: "seed must be an integer" };
  }
  return null;
}

/** Null when the service would accept the body; otherwise the first error it
 * would report. */
export async function validateGenerateBody(body: GenerateBody, shape: ServiceShape): Promise<FieldError | null> {
  const checkpoint = checkCheckpoint(body, shape);
  if (checkpoint !== null) return checkpoint;
  if (shape.variant !== "A_ONLY") {
    const layout = await checkLayout(body, shape);
    if (layout !== null) return layout;
  }
  if (shape.variant !== "L_ONLY") {
    const attrs = checkAttributes(body, shape);
    if (attrs !== null) return attrs;
  }
  return checkSeed(body);
}

export async function validateSweepBody(body: SweepBody, shape: ServiceShape): Promise<FieldError | null> {
  if (shape.variant === "L_ONLY") {
    return { field: "attribute_index", message: "layout-only model has no attributes to sweep" };
  }
  const common = await validateGenerateBody(body, shape);
  if (common !== null) return common;
  const index = body.attribute_index;
  if (typeof index === "boolean" || !Number.isInteger(index)) {
    return { field: "attribute_index", message: "attribute_index must be an integer" };
  }
  if ((index as number) < 0 || (index as number) >= shape.attributeCount) {
    return {
      field: "attribute_index",
      message: `attribute_index ${index} outside [0, ${shape.attributeCount - 1}]`,
    };
  }
  const strengths = body.strengths ?? [0.0, 0.25, 0.5, 0.75, 1.0];
  if (!Array.isArray(strengths) || strengths.length === 0 || !strengths.every(isNumber)) {
    return { field: "strengths", message: "strengths must be a non-empty list of numbers" };
  }
  for (let k = 0; k < strengths.length; k++) {
    const s = strengths[k]!;
    if (!(s >= 0 && s <= 1)) {
      return { field: `strengths[${k}]`, message: `strengths[${k}] = ${s} outside [0, 1]` };
    }
  }
  for (let k = 1; k < strengths.length; k++) {
    if (strengths[k]! < strengths[k - 1]!) {
      return { field: "strengths", message: "strengths must be sorted ascending" };
    }
  }
  return null;
}
