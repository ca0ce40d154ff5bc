// Seeded nod scheduling: the avatar nods at randomized intervals while the
// engine is listening. A fixed per-session seed makes the schedule (and
// therefore any recorded animation) reproducible.

const MIN_GAP_MS = 900;
const MAX_GAP_MS = 2600;

/** Small fast PRNG (mulberry32); deterministic for a given seed. */
export function mulberry32(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

/** Stable 32-bit hash of the session id, used as the nod seed. */
export function seedFromSessionId(sessionId: string): number {
  let hash = 2166136261;
  for (let i = 0; i < sessionId.length; i++) {
    hash ^= sessionId.charCodeAt(i);
    hash = Math.imul(hash, 16777619);
  }
  return hash >>> 0;
}

/** The first `count` gaps (ms) between nods for this seed. */
export function nodSchedule(seed: number, count: number): number[] {
  const rand = mulberry32(seed);
  const gaps: number[] = [];
  for (let i = 0; i < count; i++) {
    gaps.push(Math.round(MIN_GAP_MS + rand() * (MAX_GAP_MS - MIN_GAP_MS)));
  }
  return gaps;
}

export type NodCallback = () => void;

/**
 * Drives nod ticks while (and only while) the session awaits customer
 * input. Stopping and restarting continues the same seeded sequence.
 */
export class NodScheduler {
  private readonly gaps: number[];
  private cursor = 0;
  private timer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    seed: number,
    private readonly onNod: NodCallback,
    scheduleLength = 256,
  ) {
    this.gaps = nodSchedule(seed, scheduleLength);
  }

  get active(): boolean {
    return this.timer !== null;
  }

  start(): void {
    if (this.timer !== null) return;
    this.arm();
  }

  stop(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
  }

  private arm(): void {
    const gap = this.gaps[this.cursor % this.gaps.length];
    this.cursor += 1;
    this.timer = setTimeout(() => {
      this.timer = null;
      this.onNod();
      this.arm();
    }, gap);
  }
}
