import type { Delta, PlacementDto, Pt } from './types';

// Client-side rigid geometry for the optimistic overlay. This mirrors
// the server's pose math exactly (rotate about pivot, then translate;
// y-down frame, positive angles clockwise on screen) so that a pending
// local transform lands where the authoritative response will. Sizing
// never happens here.

const DEG = Math.PI / 180;

export const identityDelta = (): Delta => ({ rotation_deg: 0, pivot: { x: 0, y: 0 }, dx: 0, dy: 0 });

export function applyDelta(d: Delta, p: Pt): Pt {
  const c = Math.cos(d.rotation_deg * DEG);
  const s = Math.sin(d.rotation_deg * DEG);
  const x = p.x - d.pivot.x;
  const y = p.y - d.pivot.y;
  return {
    x: x * c - y * s + d.pivot.x + d.dx,
    y: x * s + y * c + d.pivot.y + d.dy,
  };
}

/** Delta equivalent to applying `first`, then `second` (matches the
 * server's composition of incremental edits). */
export function composeDeltas(second: Delta, first: Delta): Delta {
  const b1 = applyDelta(first, { x: 0, y: 0 });
  const b = applyDelta(second, b1);
  return {
    rotation_deg: second.rotation_deg + first.rotation_deg,
    pivot: { x: 0, y: 0 },
    dx: b.x,
    dy: b.y,
  };
}

export function transformVertices(vertices: [number, number][], d: Delta): [number, number][] {
  return vertices.map(([x, y]) => {
    const p = applyDelta(d, { x, y });
    return [p.x, p.y];
  });
}

/** Ray-casting point-in-polygon; drags may only start inside the
 * implant silhouette. */
export function pointInOutline(p: Pt, vertices: [number, number][]): boolean {
  let inside = false;
  let j = vertices.length - 1;
  for (let i = 0; i < vertices.length; i++) {
    const [xi, yi] = vertices[i];
    const [xj, yj] = vertices[j];
    if (yi > p.y !== yj > p.y && p.x < xj + ((xi - xj) * (p.y - yj)) / (yi - yj)) {
      inside = !inside;
    }
    j = i;
  }
  return inside;
}

export function outlineRadius(placement: PlacementDto): number {
  const { anchor, outline_px } = placement;
  let r = 0;
  for (const [x, y] of outline_px) {
    r = Math.max(r, Math.hypot(x - anchor.x, y - anchor.y));
  }
  return r;
}

/** Latest-only request coalescing for drag streams. Deltas are
 * incremental, so a queued-but-unsent delta is merged (composed) with
 * the next one instead of being dropped; at most one request is in
 * flight at a time. */
export class CoalescingSender {
  private inflight: Delta | null = null;
  private pending: Delta | null = null;

  constructor(
    private readonly send: (d: Delta) => Promise<PlacementDto>,
    private readonly onConfirm: (p: PlacementDto) => void,
    private readonly onError: (e: unknown) => void,
  ) {}

  /** Everything submitted but not yet confirmed by the server. */
  outstanding(): Delta | null {
    if (this.inflight && this.pending) return composeDeltas(this.pending, this.inflight);
    return this.pending ?? this.inflight;
  }

  submit(delta: Delta): void {
    this.pending = this.pending ? composeDeltas(delta, this.pending) : delta;
    void this.pump();
  }

  private async pump(): Promise<void> {
    if (this.inflight || !this.pending) return;
    this.inflight = this.pending;
    this.pending = null;
    try {
      const placement = await this.send(this.inflight);
      this.inflight = null;
      this.onConfirm(placement);
      void this.pump();
    } catch (err) {
      this.inflight = null;
      this.pending = null;
      this.onError(err);
    }
  }
}
