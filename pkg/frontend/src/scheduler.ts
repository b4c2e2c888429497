/** Single-in-flight request scheduler.
 *
 * At most one task runs at a time. Submitting while busy queues the task in
 * the single waiting slot; a newer submission replaces whatever is waiting,
 * so a burst of slider releases costs one request now plus one for the final
 * state. Superseded tasks never run; their promises resolve with a marker
 * instead of a value so callers can tell the difference.
 */

export const SUPERSEDED: unique symbol = Symbol("superseded");

export type Outcome<T> = { status: "done"; value: T } | { status: "superseded" };

interface Waiting<T> {
  task: () => Promise<T>;
  resolve: (outcome: Outcome<T>) => void;
  reject: (err: unknown) => void;
}

export class SingleFlight {
  private running = false;
  private waiting: Waiting<unknown> | null = null;
  /** Tasks actually started, for tests and provenance displays. */
  started = 0;
  /** Submissions dropped in favor of a newer one. */
  superseded = 0;

  get busy(): boolean {
    return this.running;
  }

  /** Run the task now if idle, otherwise park it in the waiting slot. */
  submit<T>(task: () => Promise<T>): Promise<Outcome<T>> {
    return new Promise<Outcome<T>>((resolve, reject) => {
      const slot: Waiting<unknown> = {
        task: task as () => Promise<unknown>,
        resolve: resolve as (outcome: Outcome<unknown>) => void,
        reject,
      };
      if (this.running) {
        if (this.waiting !== null) {
          this.superseded += 1;
          this.waiting.resolve({ status: "superseded" });
        }
        this.waiting = slot;
        return;
      }
      void this.run(slot);
    });
  }

  private async run(slot: Waiting<unknown>): Promise<void> {
    this.running = true;
    this.started += 1;
    try {
      const value = await slot.task();
      slot.resolve({ status: "done", value });
    } catch (err) {
      slot.reject(err);
    } finally {
      this.running = false;
      const next = this.waiting;
      this.waiting = null;
      if (next !== null) {
        void this.run(next);
      }
    }
  }
}
