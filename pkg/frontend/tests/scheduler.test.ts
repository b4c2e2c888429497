import { describe, expect, it } from "vitest";

import { SingleFlight } from "../src/scheduler.js";

/** A task whose completion the test controls. */
function gate<T>(value: T): { task: () => Promise<T>; open: () => void } {
  let open!: () => void;
  const wait = new Promise<void>((resolve) => {
    open = resolve;
  });
  return { task: () => wait.then(() => value), open };
}

describe("SingleFlight", () => {
  it("runs an idle submission immediately", async () => {
    const flight = new SingleFlight();
    const outcome = await flight.submit(async () => 42);
    expect(outcome).toEqual({ status: "done", value: 42 });
    expect(flight.started).toBe(1);
    expect(flight.busy).toBe(false);
  });

  it("runs at most one task at a time", async () => {
    const flight = new SingleFlight();
    let live = 0;
    let peak = 0;
    const task = async () => {
      live += 1;
      peak = Math.max(peak, live);
      await new Promise((resolve) => setTimeout(resolve, 5));
      live -= 1;
      return live;
    };
    await Promise.all([flight.submit(task), flight.submit(task), flight.submit(task)]);
    expect(peak).toBe(1);
  });

  it("parks one waiting task and runs it after the current one", async () => {
    const flight = new SingleFlight();
    const first = gate("first");
    const p1 = flight.submit(first.task);
    const p2 = flight.submit(async () => "second");
    expect(flight.busy).toBe(true);
    expect(flight.started).toBe(1);
    first.open();
    expect(await p1).toEqual({ status: "done", value: "first" });
    expect(await p2).toEqual({ status: "done", value: "second" });
    expect(flight.started).toBe(2);
  });

  it("supersedes the waiting task, never the running one", async () => {
    const flight = new SingleFlight();
    const first = gate(1);
    const p1 = flight.submit(first.task);
    const p2 = flight.submit(async () => 2);
    const p3 = flight.submit(async () => 3);
    first.open();
    expect(await p1).toEqual({ status: "done", value: 1 });
    expect(await p2).toEqual({ status: "superseded" });
    expect(await p3).toEqual({ status: "done", value: 3 });
    expect(flight.started).toBe(2); // the middle task never ran
    expect(flight.superseded).toBe(1);
  });

  it("keeps only the newest of a burst", async () => {
    const flight = new SingleFlight();
    const first = gate(0);
    const ran: number[] = [];
    const submit = (n: number) =>
      flight.submit(async () => {
        ran.push(n);
        return n;
      });
    const head = flight.submit(first.task);
    const burst = [submit(1), submit(2), submit(3), submit(4)];
    first.open();
    await head;
    const outcomes = await Promise.all(burst);
    expect(ran).toEqual([4]);
    expect(outcomes.slice(0, 3).every((o) => o.status === "superseded")).toBe(true);
    expect(outcomes[3]).toEqual({ status: "done", value: 4 });
    expect(flight.superseded).toBe(3);
  });

  it("rejects the submitter when the task throws and keeps going", async () => {
    const flight = new SingleFlight();
    const boom = flight.submit(async () => {
      throw new Error("task failed");
    });
    await expect(boom).rejects.toThrow("task failed");
    expect(flight.busy).toBe(false);
    expect(await flight.submit(async () => "recovered")).toEqual({ status: "done", value: "recovered" });
  });

  it("runs the waiting task even when the running one fails", async () => {
    const flight = new SingleFlight();
    const first = gate(null);
    const failing = flight.submit(() => first.task().then(() => Promise.reject(new Error("late failure"))));
    const queued = flight.submit(async () => "after");
    first.open();
    await expect(failing).rejects.toThrow("late failure");
    expect(await queued).toEqual({ status: "done", value: "after" });
  });
});
