/** Paintable layout canvas: a class-index map with undo/redo and a replayable
 * edit history.
 *
 * Every mutation flows through a stroke, and each finished stroke is recorded
 * both as an undo entry (exact pixel backup, so undo of a stroke restores the
 * map bit for bit) and as an edit in the service's script format (mask +
 * class + op). The current map therefore always equals the base map with the
 * effective history replayed on top, which is what makes exported sessions
 * reproducible through the command-line editor.
 */

import { b64ToBytes, Bytes, bytesToB64, decodePng, encodeGrayPng } from "./png.js";
import { CLASS_COUNT, UNLABELED_INDEX } from "./theme.js";

export type EditOp = "add" | "remove";

export interface LayoutEdit {
  /** 0/255 per pixel, row-major, same size as the canvas. */
  mask: Bytes;
  classIndex: number;
  op: EditOp;
}

export interface EditScriptJson {
  background_class: number;
  edits: { mask_png: string; class: number; op: string }[];
}

interface UndoEntry {
  edit: LayoutEdit;
  /** Flat indices the stroke changed, with the values they held before. */
  touched: Uint32Array;
  previous: Bytes;
}

function checkClass(classIndex: number): void {
  if (!Number.isInteger(classIndex) || classIndex < 0 || classIndex >= CLASS_COUNT) {
    throw new RangeError(`class index ${classIndex} outside [0, ${CLASS_COUNT - 1}]`);
  }
}

export class LayoutCanvas {
  readonly width: number;
  readonly height: number;
  readonly backgroundClass: number;
  activeClass = 0;
  brushSize = 2;

  private map: Bytes;
  private readonly base: Bytes;
  private undoStack: UndoEntry[] = [];
  private redoStack: UndoEntry[] = [];
  private pending: { op: EditOp; classIndex: number; mask: Bytes; order: number[]; previous: number[] } | null = null;

  constructor(width: number, height: number, options: { fill?: number; map?: Bytes; backgroundClass?: number } = {}) {
    if (!Number.isInteger(width) || !Number.isInteger(height) || width <= 0 || height <= 0) {
      throw new RangeError(`canvas size must be positive, got ${width}x${height}`);
    }
    this.width = width;
    this.height = height;
    this.backgroundClass = options.backgroundClass ?? UNLABELED_INDEX;
    checkClass(this.backgroundClass);
    if (options.map !== undefined) {
      if (options.map.length !== width * height) {
        throw new RangeError(`map length ${options.map.length} does not fit ${width}x${height}`);
      }
      for (let i = 0; i < options.map.length; i++) {
        checkClass(options.map[i]!);
      }
      this.map = options.map.slice();
    } else {
      const fill = options.fill ?? 0;
      checkClass(fill);
      this.map = new Uint8Array(width * height).fill(fill);
    }
    this.base = this.map.slice();
  }

  /** Copy of the current index map. */
  indexMap(): Bytes {
    return this.map.slice();
  }

  /** Copy of the map the session started from. */
  baseMap(): Bytes {
    return this.base.slice();
  }

  classAt(x: number, y: number): number {
    return this.map[y * this.width + x]!;
  }

  get canUndo(): boolean {
    return this.undoStack.length > 0;
  }

  get canRedo(): boolean {
    return this.redoStack.length > 0;
  }

  /** Effective edits (undone strokes excluded), oldest first. */
  history(): LayoutEdit[] {
    return this.undoStack.map((entry) => ({
      mask: entry.edit.mask.slice(),
      classIndex: entry.edit.classIndex,
      op: entry.edit.op,
    }));
  }

  beginStroke(op: EditOp = "add", classIndex?: number): void {
    if (this.pending !== null) {
      this.endStroke();
    }
    const cls = classIndex ?? (op === "add" ? this.activeClass : this.backgroundClass);
    checkClass(cls);
    this.pending = {
      op,
      classIndex: cls,
      mask: new Uint8Array(this.width * this.height),
      order: [],
      previous: [],
    };
  }

  /** Stamp the brush at (x, y); pixels outside the canvas are clipped. */
  paintDot(x: number, y: number): void {
    const stroke = this.pending;
    if (stroke === null) {
      throw new Error("paintDot outside beginStroke/endStroke");
    }
    const r = Math.max(0, this.brushSize - 1);
    const target = stroke.op === "add" ? stroke.classIndex : this.backgroundClass;
    for (let dy = -r; dy <= r; dy++) {
      for (let dx = -r; dx <= r; dx++) {
        if (dx * dx + dy * dy > r * r) continue;
        const px = Math.round(x) + dx;
        const py = Math.round(y) + dy;
        if (px < 0 || py < 0 || px >= this.width || py >= this.height) continue;
        const at = py * this.width + px;
        if (stroke.mask[at] === 0) {
          stroke.mask[at] = 255;
          stroke.order.push(at);
          stroke.previous.push(this.map[at]!);
        }
        this.map[at] = target;
      }
    }
  }

  /** Stamp along the segment from (x0, y0) to (x1, y1). */
  paintLine(x0: number, y0: number, x1: number, y1: number): void {
    const steps = Math.max(Math.abs(x1 - x0), Math.abs(y1 - y0), 1);
    for (let i = 0; i <= steps; i++) {
      this.paintDot(x0 + ((x1 - x0) * i) / steps, y0 + ((y1 - y0) * i) / steps);
    }
  }

  /** Close the stroke; returns its recorded edit, or null if nothing was painted. */
  endStroke(): LayoutEdit | null {
    const stroke = this.pending;
    this.pending = null;
    if (stroke === null || stroke.order.length === 0) {
      return null;
    }
    const entry: UndoEntry = {
      edit: { mask: stroke.mask, classIndex: stroke.classIndex, op: stroke.op },
      touched: Uint32Array.from(stroke.order),
      previous: Uint8Array.from(stroke.previous),
    };
    this.undoStack.push(entry);
    this.redoStack = [];
    return entry.edit;
  }

  /** One whole-canvas edit assigning every pixel to classIndex. */
  fillAll(classIndex: number): LayoutEdit {
    this.beginStroke("add", classIndex);
    const stroke = this.pending!;
    for (let at = 0; at < this.map.length; at++) {
      stroke.mask[at] = 255;
      stroke.order.push(at);
      stroke.previous.push(this.map[at]!);
      this.map[at] = classIndex;
    }
    return this.endStroke()!;
  }

  undo(): boolean {
    const entry = this.undoStack.pop();
    if (entry === undefined) {
      return false;
    }
    for (let i = entry.touched.length - 1; i >= 0; i--) {
      this.map[entry.touched[i]!] = entry.previous[i]!;
    }
    this.redoStack.push(entry);
    return true;
  }

  redo(): boolean {
    const entry = this.redoStack.pop();
    if (entry === undefined) {
      return false;
    }
    const target = entry.edit.op === "add" ? entry.edit.classIndex : this.backgroundClass;
    for (const at of entry.touched) {
      this.map[at] = target;
    }
    this.undoStack.push(entry);
    return true;
  }

  /** Base map with the effective history applied; always equals indexMap(). */
  replayFromBase(): Bytes {
    return applyEdits(this.base, this.history(), this.backgroundClass);
  }
}

/** Apply edits to a map the way the service does: add paints the edit's
 * class, remove paints the background class. */
export function applyEdits(map: Bytes, edits: readonly LayoutEdit[], backgroundClass: number): Bytes {
  checkClass(backgroundClass);
  const out = map.slice();
  for (const edit of edits) {
    if (edit.mask.length !== map.length) {
      throw new RangeError(`edit mask has ${edit.mask.length} pixels, layout has ${map.length}`);
    }
    checkClass(edit.classIndex);
    const target = edit.op === "add" ? edit.classIndex : backgroundClass;
    for (let at = 0; at < out.length; at++) {
      if (edit.mask[at]! >= 128) {
        out[at] = target;
      }
    }
  }
  return out;
}

// -- script transport (masks as base64 grayscale PNGs) --

export async function editScriptToJson(
  edits: readonly LayoutEdit[],
  width: number,
  height: number,
  backgroundClass: number,
): Promise<EditScriptJson> {
  const out: EditScriptJson = { background_class: backgroundClass, edits: [] };
  for (const edit of edits) {
    out.edits.push({
      mask_png: bytesToB64(await encodeGrayPng(width, height, edit.mask)),
      class: edit.classIndex,
      op: edit.op,
    });
  }
  return out;
}

export async function editScriptFromJson(
  script: EditScriptJson,
): Promise<{ edits: LayoutEdit[]; backgroundClass: number }> {
  const edits: LayoutEdit[] = [];
  for (const entry of script.edits) {
    const png = await decodePng(b64ToBytes(entry.mask_png));
    if (png.channels !== 1) {
      throw new RangeError("edit masks must be single-channel PNGs");
    }
    const mask = new Uint8Array(png.data.length);
    for (let i = 0; i < mask.length; i++) {
      mask[i] = png.data[i]! >= 128 ? 255 : 0;
    }
    if (entry.op !== "add" && entry.op !== "remove") {
      throw new RangeError(`op must be 'add' or 'remove', got '${entry.op}'`);
    }
    edits.push({ mask, classIndex: entry.class, op: entry.op });
  }
  return { edits, backgroundClass: script.background_class };
}
