/** Session state and its portable JSON form.
 *
 * A session is everything needed to reproduce what is on screen: the base
 * layout, the effective edit history, the slider vector, and the seed. The
 * exported JSON carries the layout as base64 PNGs and the history in the
 * command-line editor's script format, so a session replayed through that
 * tool regenerates the final image byte for byte.
 */

import { GenerateResponse, Provenance, StudioClient, SweepResponse } from "./api.js";
import {
  applyEdits,
  editScriptFromJson,
  EditScriptJson,
  editScriptToJson,
  LayoutCanvas,
} from "./layout.js";
import { Bytes, bytesToB64, b64ToBytes, decodePng, encodeGrayPng } from "./png.js";
import { Outcome, SingleFlight } from "./scheduler.js";
import { ATTRIBUTE_COUNT } from "./theme.js";

export interface SessionJson {
  version: 1;
  resolution: number;
  /** Layout the session started from, before any edits. */
  base_layout_png: string;
  /** Current canvas, equal to the base with the history applied. */
  layout_png: string;
  attributes: number[];
  seed: number;
  history: EditScriptJson;
  provenance: Provenance | null;
}

function clamp01(value: number): number {
  if (Number.isNaN(value)) return 0;
  return Math.min(1, Math.max(0, value));
}

export class SessionState {
  readonly attributes: number[];
  seed = 0;
  provenance: Provenance | null = null;

  constructor(attributeCount: number = ATTRIBUTE_COUNT) {
    this.attributes = new Array<number>(attributeCount).fill(0);
  }

  setAttribute(index: number, value: number): void {
    if (index < 0 || index >= this.attributes.length) {
      throw new RangeError(`attribute index ${index} outside [0, ${this.attributes.length - 1}]`);
    }
    this.attributes[index] = clamp01(value);
  }
}

export async function exportSession(canvas: LayoutCanvas, state: SessionState): Promise<SessionJson> {
  return {
    version: 1,
    resolution: canvas.width,
    base_layout_png: bytesToB64(await encodeGrayPng(canvas.width, canvas.height, canvas.baseMap())),
    layout_png: bytesToB64(await encodeGrayPng(canvas.width, canvas.height, canvas.indexMap())),
    attributes: [...state.attributes],
    seed: state.seed,
    history: await editScriptToJson(canvas.history(), canvas.width, canvas.height, canvas.backgroundClass),
    provenance: state.provenance,
  };
}

async function decodeLayoutB64(b64: string, resolution: number): Promise<Bytes> {
  const png = await decodePng(b64ToBytes(b64));
  if (png.channels !== 1 || png.width !== resolution || png.height !== resolution) {
    throw new RangeError(
      `session layout is ${png.height}x${png.width}x${png.channels}, expected ${resolution}x${resolution}x1`,
    );
  }
  return png.data;
}

/** Rebuild a canvas and state from an exported session.
 *
 * The history is pushed through the canvas stroke by stroke so undo keeps
 * working across an import; the stored final layout must match the replayed
 * one or the file is rejected as inconsistent.
 */
export async function importSession(json: SessionJson): Promise<{ canvas: LayoutCanvas; state: SessionState }> {
  if (json.version !== 1) {
    throw new RangeError(`unsupported session version ${json.version}`);
  }
  const resolution = json.resolution;
  const base = await decodeLayoutB64(json.base_layout_png, resolution);
  const finalMap = await decodeLayoutB64(json.layout_png, resolution);
  const { edits, backgroundClass } = await editScriptFromJson(json.history);
  const replayed = applyEdits(base, edits, backgroundClass);
  if (!replayed.every((v, i) => v === finalMap[i])) {
    throw new RangeError("session file is inconsistent: history does not replay to the stored layout");
  }
  const canvas = new LayoutCanvas(resolution, resolution, { map: base, backgroundClass });
  for (const edit of edits) {
    canvas.beginStroke(edit.op, edit.classIndex);
    const pendingMask = edit.mask;
    // Stamp exactly the recorded pixels (brush geometry is not stored).
    canvas.brushSize = 1;
    for (let at = 0; at < pendingMask.length; at++) {
      if (pendingMask[at]! >= 128) {
        canvas.paintDot(at % resolution, Math.floor(at / resolution));
      }
    }
    canvas.endStroke();
  }
  const state = new SessionState(json.attributes.length);
  json.attributes.forEach((v, i) => state.setAttribute(i, v));
  state.seed = json.seed;
  state.provenance = json.provenance;
  return { canvas, state };
}

/** Wires canvas, state, client, and the single-flight scheduler together.
 *
 * Slider drags only mutate state; the release hook is what submits a
 * generation, so one release costs at most one request (bursts coalesce in
 * the scheduler's waiting slot).
 */
export class SessionController {
  readonly scheduler = new SingleFlight();
  lastImage: string | null = null;
  lastSweep: SweepResponse | null = null;

  constructor(
    readonly client: StudioClient,
    readonly canvas: LayoutCanvas,
    readonly state: SessionState,
  ) {}

  onSliderInput(index: number, value: number): void {
    this.state.setAttribute(index, value);
  }

  onSliderRelease(): Promise<Outcome<GenerateResponse>> {
    return this.generateNow();
  }

  private async buildGenerateBody(): Promise<Record<string, unknown>> {
    const meta = await this.client.meta();
    const body: Record<string, unknown> = { seed: this.state.seed };
    if (meta.variant !== "A_ONLY") {
      body.layout = bytesToB64(await encodeGrayPng(this.canvas.width, this.canvas.height, this.canvas.indexMap()));
    }
    if (meta.variant !== "L_ONLY") {
      body.attributes = [...this.state.attributes];
    }
    return body;
  }

  generateNow(): Promise<Outcome<GenerateResponse>> {
    return this.scheduler.submit(async () => {
      const response = await this.client.generate(await this.buildGenerateBody());
      this.lastImage = response.image;
      this.state.provenance = response.provenance;
      return response;
    });
  }

  runSweep(attributeIndex: number, strengths?: number[]): Promise<Outcome<SweepResponse>> {
    return this.scheduler.submit(async () => {
      const body = await this.buildGenerateBody();
      body.attribute_index = attributeIndex;
      if (strengths !== undefined) {
        body.strengths = strengths;
      }
      const response = await this.client.sweep(body);
      this.lastSweep = response;
      return response;
    });
  }

  async export(): Promise<SessionJson> {
    return exportSession(this.canvas, this.state);
  }
}
