// Rate limiter for input events: at most one emission per interval, with
// the latest value always delivered (trailing edge) so the server ends up
// at the final slider position even during a fast waggle.

export type Clock = () => number;
export type Scheduler = (fn: () => void, delayMs: number) => unknown;

export class Throttle<T> {
  private lastEmit = -Infinity;
  private pending: T | undefined;
  private timerActive = false;

  constructor(
    private readonly intervalMs: number,
    private readonly emit: (value: T) => void,
    private readonly now: Clock = () => performance.now(),
    private readonly schedule: Scheduler = (fn, d) => setTimeout(fn, d),
  ) {
    if (intervalMs <= 0) {
      throw new Error("throttle interval must be positive");
    }
  }

  call(value: T): void {
    const t = this.now();
    if (t - this.lastEmit >= this.intervalMs && !this.timerActive) {
      this.lastEmit = t;
      this.emit(value);
      return;
    }
    this.pending = value;
    if (!this.timerActive) {
      this.timerActive = true;
      const wait = Math.max(this.lastEmit + this.intervalMs - t, 0);
      this.schedule(() => this.flush(), wait);
    }
  }

  private flush(): void {
    this.timerActive = false;
    if (this.pending !== undefined) {
      this.lastEmit = this.now();
      const value = this.pending;
      this.pending = undefined;
      this.emit(value);
    }
  }
}
