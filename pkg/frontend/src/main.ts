/** DOM wiring for the studio page.
 *
 * All state and transport logic lives in the imported modules; this file only
 * translates pointer/slider events into calls on them and paints the results
 * back into the document.
 */

import { Meta, ServiceError, StudioClient } from "./api.js";
import { LayoutCanvas } from "./layout.js";
import { b64ToBytes } from "./png.js";
import { importSession, SessionController, SessionJson, SessionState } from "./session.js";
import { ATTRIBUTE_NAMES, CLASS_NAMES, cssColor, PALETTE, UNLABELED_INDEX } from "./theme.js";

const DEFAULT_SERVICE_URL = "http://127.0.0.1:8411";
const SCALE_TARGET = 420; // on-screen canvas edge, px

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing #${id}`);
  return node as T;
}

function pngUrl(b64: string): string {
  return `data:image/png;base64,${b64}`;
}

class StudioApp {
  private client: StudioClient;
  private meta: Meta | null = null;
  private canvas: LayoutCanvas;
  private state: SessionState;
  private controller: SessionController;
  private scale = 4;
  private drawing = false;
  private lastPoint: { x: number; y: number } | null = null;

  private readonly board = el<HTMLCanvasElement>("board");
  private readonly result = el<HTMLImageElement>("result");
  private readonly errorBar = el<HTMLDivElement>("error-bar");
  private readonly provenanceBar = el<HTMLDivElement>("provenance");
  private readonly sliderPane = el<HTMLDivElement>("sliders");
  private readonly palettePane = el<HTMLDivElement>("palette");
  private readonly sweepStrip = el<HTMLDivElement>("sweep-strip");

  constructor(serviceUrl: string, resolution: number) {
    this.client = new StudioClient(serviceUrl);
    this.canvas = new LayoutCanvas(resolution, resolution, { fill: 0 });
    this.state = new SessionState();
    this.controller = new SessionController(this.client, this.canvas, this.state);
  }

  async start(): Promise<void> {
    try {
      this.meta = await this.client.meta();
    } catch (err) {
      this.showError(err);
    }
    const resolution = this.meta?.resolution ?? this.canvas.width;
    if (resolution !== this.canvas.width) {
      this.canvas = new LayoutCanvas(resolution, resolution, { fill: 0 });
      this.controller = new SessionController(this.client, this.canvas, this.state);
    }
    this.scale = Math.max(1, Math.floor(SCALE_TARGET / resolution));
    this.board.width = resolution * this.scale;
    this.board.height = resolution * this.scale;
    this.buildPalette();
    this.buildSliders();
    this.bindBoard();
    this.bindControls();
    this.redraw();
    this.setStatus(
      this.meta === null
        ? `service not reachable; painting offline at ${resolution}x${resolution}`
        : `model: ${this.meta.variant} at ${resolution}x${resolution}, checkpoint ${this.meta.checkpoint_hash?.slice(0, 12)}`,
    );
  }

  private labelFor(index: number): string {
    return this.meta?.labels[index] ?? CLASS_NAMES[index] ?? `class ${index}`;
  }

  private buildPalette(): void {
    this.palettePane.replaceChildren();
    PALETTE.forEach((_, index) => {
      const swatch = document.createElement("button");
      swatch.className = "swatch";
      swatch.style.background = cssColor(index);
      swatch.title = this.labelFor(index);
      swatch.dataset.classIndex = String(index);
      if (index === this.canvas.activeClass) swatch.classList.add("active");
      swatch.addEventListener("click", () => {
        this.canvas.activeClass = index;
        this.palettePane.querySelectorAll(".swatch").forEach((s) => s.classList.remove("active"));
        swatch.classList.add("active");
        el<HTMLInputElement>("eraser").checked = false;
      });
      this.palettePane.append(swatch);
    });
  }

  private buildSliders(): void {
    const names = this.meta?.attributes ?? [...ATTRIBUTE_NAMES];
    this.sliderPane.replaceChildren();
    names.forEach((name, index) => {
      const row = document.createElement("label");
      row.className = "slider-row";
      row.dataset.attrIndex = String(index);
      const caption = document.createElement("span");
      caption.textContent = name;
      const value = document.createElement("em");
      value.textContent = "0.00";
      const input = document.createElement("input");
      input.type = "range";
      input.min = "0";
      input.max = "1";
      input.step = "0.01";
      input.value = "0";
      // Drags only move local state; the request fires on release.
      input.addEventListener("input", () => {
        this.controller.onSliderInput(index, Number(input.value));
        value.textContent = Number(input.value).toFixed(2);
      });
      input.addEventListener("change", () => {
        void this.finish(this.controller.onSliderRelease());
      });
      row.append(caption, input, value);
      this.sliderPane.append(row);
    });
  }

  private boardPoint(event: PointerEvent): { x: number; y: number } {
    const rect = this.board.getBoundingClientRect();
    return {
      x: ((event.clientX - rect.left) / rect.width) * this.canvas.width,
      y: ((event.clientY - rect.top) / rect.height) * this.canvas.height,
    };
  }

  private bindBoard(): void {
    this.board.addEventListener("pointerdown", (event) => {
      event.preventDefault();
      this.board.setPointerCapture(event.pointerId);
      this.drawing = true;
      const erasing = el<HTMLInputElement>("eraser").checked;
      this.canvas.beginStroke(erasing ? "remove" : "add");
      const p = this.boardPoint(event);
      this.canvas.paintDot(p.x, p.y);
      this.lastPoint = p;
      this.redraw();
    });
    this.board.addEventListener("pointermove", (event) => {
      if (!this.drawing) return;
      const p = this.boardPoint(event);
      if (this.lastPoint !== null) {
        this.canvas.paintLine(this.lastPoint.x, this.lastPoint.y, p.x, p.y);
      }
      this.lastPoint = p;
      this.redraw();
    });
    const finish = () => {
      if (!this.drawing) return;
      this.drawing = false;
      this.lastPoint = null;
      this.canvas.endStroke();
      this.redraw();
      if (el<HTMLInputElement>("auto").checked) {
        void this.finish(this.controller.generateNow());
      }
    };
    this.board.addEventListener("pointerup", finish);
    this.board.addEventListener("pointercancel", finish);
  }

  private bindControls(): void {
    el<HTMLInputElement>("brush").addEventListener("input", (event) => {
      this.canvas.brushSize = Number((event.target as HTMLInputElement).value);
    });
    el<HTMLInputElement>("seed").addEventListener("change", (event) => {
      this.state.seed = Math.trunc(Number((event.target as HTMLInputElement).value)) || 0;
    });
    el<HTMLButtonElement>("undo").addEventListener("click", () => {
      this.canvas.undo();
      this.redraw();
    });
    el<HTMLButtonElement>("redo").addEventListener("click", () => {
      this.canvas.redo();
      this.redraw();
    });
    document.addEventListener("keydown", (event) => {
      if (!event.ctrlKey && !event.metaKey) return;
      if (event.key === "z") {
        this.canvas.undo();
        this.redraw();
      } else if (event.key === "y") {
        this.canvas.redo();
        this.redraw();
      }
    });
    el<HTMLButtonElement>("fill").addEventListener("click", () => {
      this.canvas.fillAll(this.canvas.activeClass);
      this.redraw();
    });
    el<HTMLButtonElement>("clear").addEventListener("click", () => {
      this.canvas.fillAll(UNLABELED_INDEX);
      this.redraw();
    });
    el<HTMLButtonElement>("generate").addEventListener("click", () => {
      void this.finish(this.controller.generateNow());
    });
    el<HTMLButtonElement>("sweep").addEventListener("click", () => {
      const index = Number(el<HTMLSelectElement>("sweep-attr").value);
      void this.finishSweep(this.controller.runSweep(index));
    });
    const sweepAttr = el<HTMLSelectElement>("sweep-attr");
    (this.meta?.attributes ?? [...ATTRIBUTE_NAMES]).forEach((name, index) => {
      const option = document.createElement("option");
      option.value = String(index);
      option.textContent = name;
      sweepAttr.append(option);
    });
    el<HTMLButtonElement>("export").addEventListener("click", () => {
      void this.exportSession();
    });
    el<HTMLInputElement>("import").addEventListener("change", (event) => {
      const file = (event.target as HTMLInputElement).files?.[0];
      if (file !== undefined) void this.importSessionFile(file);
    });
  }

  private async finish(outcome: Promise<unknown>): Promise<void> {
    this.clearError();
    try {
      await outcome;
    } catch (err) {
      this.showError(err);
      return;
    }
    if (this.controller.lastImage !== null) {
      this.result.src = pngUrl(this.controller.lastImage);
    }
    const provenance = this.state.provenance;
    if (provenance !== null) {
      this.provenanceBar.textContent =
        `seed ${provenance.seed} · ${provenance.latency_ms.toFixed(1)} ms · ` +
        `checkpoint ${provenance.checkpoint_hash.slice(0, 12)}`;
    }
  }

  private async finishSweep(outcome: Promise<unknown>): Promise<void> {
    this.clearError();
    try {
      await outcome;
    } catch (err) {
      this.showError(err);
      return;
    }
    const sweep = this.controller.lastSweep;
    if (sweep === null) return;
    this.sweepStrip.replaceChildren();
    sweep.images.forEach((image, i) => {
      const cell = document.createElement("figure");
      const img = document.createElement("img");
      img.src = pngUrl(image);
      const caption = document.createElement("figcaption");
      caption.textContent = sweep.strengths[i]!.toFixed(2);
      cell.append(img, caption);
      this.sweepStrip.append(cell);
    });
  }

  private async exportSession(): Promise<void> {
    const session = await this.controller.export();
    const blob = new Blob([JSON.stringify(session, null, 2)], { type: "application/json" });
    const link = document.createElement("a");
    link.href = URL.createObjectURL(blob);
    link.download = "session.json";
    link.click();
    URL.revokeObjectURL(link.href);
  }

  private async importSessionFile(file: File): Promise<void> {
    this.clearError();
    try {
      const json = JSON.parse(await file.text()) as SessionJson;
      const { canvas, state } = await importSession(json);
      this.canvas = canvas;
      this.state = state;
      this.controller = new SessionController(this.client, this.canvas, this.state);
      this.scale = Math.max(1, Math.floor(SCALE_TARGET / canvas.width));
      this.board.width = canvas.width * this.scale;
      this.board.height = canvas.height * this.scale;
      this.buildSliders();
      this.sliderPane.querySelectorAll<HTMLInputElement>("input[type=range]").forEach((input, i) => {
        input.value = String(state.attributes[i] ?? 0);
      });
      el<HTMLInputElement>("seed").value = String(state.seed);
      if (state.provenance !== null && this.controller.lastImage === null) {
        this.provenanceBar.textContent = `imported session · seed ${state.seed}`;
      }
      this.redraw();
    } catch (err) {
      this.showError(err);
    }
  }

  private redraw(): void {
    const ctx = this.board.getContext("2d");
    if (ctx === null) return;
    const { width, height } = this.canvas;
    const map = this.canvas.indexMap();
    const pixels = new ImageData(width, height);
    for (let i = 0; i < map.length; i++) {
      const rgb = PALETTE[map[i]!]!;
      pixels.data[i * 4] = rgb[0];
      pixels.data[i * 4 + 1] = rgb[1];
      pixels.data[i * 4 + 2] = rgb[2];
      pixels.data[i * 4 + 3] = 255;
    }
    void createImageBitmap(pixels).then((bitmap) => {
      ctx.imageSmoothingEnabled = false;
      ctx.drawImage(bitmap, 0, 0, this.board.width, this.board.height);
    });
    el<HTMLButtonElement>("undo").disabled = !this.canvas.canUndo;
    el<HTMLButtonElement>("redo").disabled = !this.canvas.canRedo;
  }

  private setStatus(text: string): void {
    el<HTMLDivElement>("status").textContent = text;
  }

  private clearError(): void {
    this.errorBar.textContent = "";
    this.errorBar.hidden = true;
    this.sliderPane.querySelectorAll(".slider-row").forEach((row) => row.classList.remove("invalid"));
    this.board.classList.remove("invalid");
  }

  /** Surface a service error verbatim; 422s highlight the named control. */
  private showError(err: unknown): void {
    const message = err instanceof ServiceError ? `${err.status || "local"}: ${err.detail}` : String(err);
    this.errorBar.textContent = message;
    this.errorBar.hidden = false;
    if (err instanceof ServiceError && err.field !== null) {
      const slot = /^attributes\[(\d+)\]$/.exec(err.field);
      if (slot !== null) {
        this.sliderPane
          .querySelector(`.slider-row[data-attr-index="${slot[1]}"]`)
          ?.classList.add("invalid");
      } else if (err.field === "layout") {
        this.board.classList.add("invalid");
      }
    }
  }
}

const url = new URLSearchParams(window.location.search).get("service") ?? DEFAULT_SERVICE_URL;
void new StudioApp(url, 128).start();
