import { describe, expect, it } from "vitest";

import { StudioClient } from "../src/api.js";
import { LayoutCanvas } from "../src/layout.js";
import { exportSession, importSession, SessionController, SessionState } from "../src/session.js";
import { fakeService, untilHeld } from "./fake_service.js";

function controllerWith(options: Parameters<typeof fakeService>[0] = {}) {
  const fake = fakeService(options);
  const client = new StudioClient("http://test", fake.fetch);
  const canvas = new LayoutCanvas(16, 16, { fill: 0 });
  const controller = new SessionController(client, canvas, new SessionState());
  return { fake, canvas, controller };
}

function paint(canvas: LayoutCanvas, classIndex: number, x: number, y: number, op: "add" | "remove" = "add"): void {
  canvas.activeClass = classIndex;
  canvas.beginStroke(op);
  canvas.paintDot(x, y);
  canvas.endStroke();
}

describe("slider wiring", () => {
  it("drags touch state only; one release costs one request", async () => {
    const { fake, controller } = controllerWith();
    for (let i = 0; i < 25; i++) {
      controller.onSliderInput(3, i / 25);
    }
    expect(fake.counts.generate).toBe(0);
    const outcome = await controller.onSliderRelease();
    expect(outcome.status).toBe("done");
    expect(fake.counts.generate).toBe(1);
    expect(controller.state.attributes[3]).toBeCloseTo(24 / 25);
    expect(controller.lastImage).toBe("image-1");
    expect(controller.state.provenance?.checkpoint_hash).toBeTruthy();
  });

  it("clamps slider values into [0, 1]", () => {
    const state = new SessionState();
    state.setAttribute(0, -0.5);
    state.setAttribute(1, 1.5);
    state.setAttribute(2, NaN);
    expect(state.attributes.slice(0, 3)).toEqual([0, 1, 0]);
    state.setAttribute(1, 0.75);
    expect(state.attributes[1]).toBe(0.75);
    expect(() => state.setAttribute(40, 0)).toThrow(RangeError);
  });

  it("coalesces a burst of releases into first plus newest", async () => {
    const { fake, controller } = controllerWith({ gate: true });
    const releases = [
      controller.onSliderRelease(),
      controller.onSliderRelease(),
      controller.onSliderRelease(),
      controller.onSliderRelease(),
    ];
    await untilHeld(fake);
    fake.release();
    await releases[0];
    await untilHeld(fake);
    fake.release();
    const outcomes = await Promise.all(releases);
    expect(fake.counts.generate).toBe(2);
    expect(outcomes.map((o) => o.status)).toEqual(["done", "superseded", "superseded", "done"]);
    expect(controller.scheduler.superseded).toBe(2);
  });

  it("sweeps share the single-flight lane with generates", async () => {
    const { fake, controller } = controllerWith();
    const sweep = await controller.runSweep(5, [0, 0.5, 1]);
    expect(sweep.status).toBe("done");
    expect(fake.counts.sweep).toBe(1);
    expect(controller.lastSweep?.images.length).toBe(3);
    expect(fake.bodies[0]?.attribute_index).toBe(5);
    expect(fake.bodies[0]?.strengths).toEqual([0, 0.5, 1]);
  });
});

describe("request bodies per variant", () => {
  it("sends layout and attributes for the full model", async () => {
    const { fake, controller } = controllerWith();
    await controller.generateNow();
    const body = fake.bodies[0]!;
    expect(typeof body.layout).toBe("string");
    expect((body.attributes as number[]).length).toBe(40);
    expect(body.seed).toBe(0);
  });

  it("omits the layout for attribute-only models", async () => {
    const { fake, controller } = controllerWith({ variant: "A_ONLY" });
    await controller.generateNow();
    expect(fake.bodies[0]).not.toHaveProperty("layout");
    expect(fake.bodies[0]).toHaveProperty("attributes");
  });

  it("omits attributes for layout-only models", async () => {
    const { fake, controller } = controllerWith({ variant: "L_ONLY" });
    await controller.generateNow();
    expect(fake.bodies[0]).toHaveProperty("layout");
    expect(fake.bodies[0]).not.toHaveProperty("attributes");
  });
});

describe("session files", () => {
  async function paintedSession() {
    const canvas = new LayoutCanvas(16, 16, { fill: 0 });
    canvas.brushSize = 2;
    paint(canvas, 3, 4, 4);
    paint(canvas, 7, 10, 10);
    paint(canvas, 0, 4, 4, "remove");
    canvas.undo(); // drop the erase, keep two paints
    const state = new SessionState();
    state.setAttribute(0, 0.9);
    state.setAttribute(39, 0.1);
    state.seed = 123;
    return { canvas, state, json: await exportSession(canvas, state) };
  }

  it("exports everything needed to reproduce the screen", async () => {
    const { canvas, json } = await paintedSession();
    expect(json.version).toBe(1);
    expect(json.resolution).toBe(16);
    expect(json.history.edits.length).toBe(2);
    expect(json.history.background_class).toBe(canvas.backgroundClass);
    expect(json.seed).toBe(123);
    expect(json.attributes[0]).toBe(0.9);
  });

  it("round trips through import with undo intact", async () => {
    const { canvas, state, json } = await paintedSession();
    const back = await importSession(JSON.parse(JSON.stringify(json)) as typeof json);
    expect(back.canvas.indexMap()).toEqual(canvas.indexMap());
    expect(back.canvas.baseMap()).toEqual(canvas.baseMap());
    expect(back.canvas.history().length).toBe(2);
    expect(back.state.attributes).toEqual(state.attributes);
    expect(back.state.seed).toBe(123);
    expect(back.canvas.replayFromBase()).toEqual(back.canvas.indexMap());

    // undo still peels strokes off, newest first
    const beforeUndo = back.canvas.indexMap();
    expect(back.canvas.undo()).toBe(true);
    expect(back.canvas.indexMap()).not.toEqual(beforeUndo);
    back.canvas.undo();
    expect(back.canvas.indexMap()).toEqual(back.canvas.baseMap());
  });

  it("rejects a session whose history does not replay to its layout", async () => {
    const { json } = await paintedSession();
    const tampered = { ...json, layout_png: json.base_layout_png };
    await expect(importSession(tampered)).rejects.toThrow(/inconsistent/);
  });

  it("rejects unknown versions", async () => {
    const { json } = await paintedSession();
    const future = { ...json, version: 2 as unknown as 1 };
    await expect(importSession(future)).rejects.toThrow(/version/);
  });

  it("controller export matches the standalone exporter", async () => {
    const { controller, canvas } = controllerWith();
    paint(canvas, 5, 8, 8);
    controller.state.seed = 7;
    const json = await controller.export();
    expect(json).toEqual(await exportSession(canvas, controller.state));
  });
});
