// Fixed-capacity ring buffer of (t, force, zmp, s) samples feeding the
// strip charts. Rendering walks the samples oldest to newest.

export interface Sample {
  t: number;
  f: number;
  zmp: number | null;
  s: number;
}

export class History {
  private buffer: Sample[];
  private head = 0;
  private count = 0;

  constructor(readonly capacity: number) {
    if (capacity < 1) {
      throw new Error("history capacity must be at least 1");
    }
    this.buffer = new Array(capacity);
  }

  push(sample: Sample): void {
    this.buffer[this.head] = sample;
    this.head = (this.head + 1) % this.capacity;
    this.count = Math.min(this.count + 1, this.capacity);
  }

  get length(): number {
    return this.count;
  }

  clear(): void {
    this.head = 0;
    this.count = 0;
  }

  /** Samples in insertion order, oldest first. */
  toArray(): Sample[] {
    const out: Sample[] = [];
    const start = (this.head - this.count + this.capacity) % this.capacity;
    for (let i = 0; i < this.count; i++) {
      out.push(this.buffer[(start + i) % this.capacity]);
    }
    return out;
  }
}
