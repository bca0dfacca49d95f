/**
 * Async tile fetching: a small cache plus a queue that keeps at most 8
 * requests in flight and drops queued requests that scrolled out of view.
 */

const MAX_IN_FLIGHT = 8;
const CACHE_CAPACITY = 512;

type TileKey = string;

interface PendingTile {
  key: TileKey;
  url: string;
  cancelled: boolean;
}

export class TileLoader {
  private cache = new Map<TileKey, HTMLImageElement>();
  private pending = new Map<TileKey, PendingTile>();
  private queue: PendingTile[] = [];
  private inFlight = 0;

  constructor(private readonly onTile: () => void) {}

  /** Cached image if ready; otherwise queue a fetch and return null. */
  get(key: TileKey, url: string): HTMLImageElement | null {
    const hit = this.cache.get(key);
    if (hit) {
      this.cache.delete(key);
      this.cache.set(key, hit); // refresh recency
      return hit;
    }
    if (!this.pending.has(key)) {
      const entry: PendingTile = { key, url, cancelled: false };
      this.pending.set(key, entry);
      this.queue.push(entry);
      this.pump();
    }
    return null;
  }

  /** Drop queued requests not in the wanted set; in-flight ones finish. */
  retain(wanted: Set<TileKey>): void {
    for (const entry of this.queue) {
      if (!wanted.has(entry.key)) {
        entry.cancelled = true;
        this.pending.delete(entry.key);
      }
    }
    this.queue = this.queue.filter((entry) => !entry.cancelled);
  }

  private pump(): void {
    while (this.inFlight < MAX_IN_FLIGHT && this.queue.length) {
      const entry = this.queue.shift()!;
      if (entry.cancelled) continue;
      this.inFlight += 1;
      const image = new Image();
      image.onload = () => this.settle(entry, image);
      image.onerror = () => this.settle(entry, null);
      image.src = entry.url;
    }
  }

  private settle(entry: PendingTile, image: HTMLImageElement | null): void {
    this.inFlight -= 1;
    this.pending.delete(entry.key);
    if (image && !entry.cancelled) {
      this.cache.set(entry.key, image);
      while (this.cache.size > CACHE_CAPACITY) {
        const oldest = this.cache.keys().next().value as TileKey;
        this.cache.delete(oldest);
      }
      this.onTile();
    }
    this.pump();
  }
}
