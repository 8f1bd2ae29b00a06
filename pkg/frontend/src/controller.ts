import { ApiClient, ApiError } from './api';
import {
  CoalescingSender,
  applyDelta,
  outlineRadius,
  pointInOutline,
  transformVertices,
} from './overlay';
import type { Delta, PlacementDto, PlanDto, PlanPayload, Pt, Seg } from './types';
import { View, defaultView, imageToScreen, screenToImage } from './view';

export type Tool = 'calibrate' | 'measure' | 'adjust';

export interface OverlayState {
  /** Last server-confirmed placement; the authority. */
  confirmed: PlacementDto;
  /** Local edits not yet confirmed (in flight or queued). */
  outstanding: Delta | null;
}

type DragMode =
  | { kind: 'draw'; seg: Seg }
  | { kind: 'translate'; lastImage: Pt }
  | { kind: 'rotate'; lastImage: Pt }
  | null;

const ROTATE_HANDLE_GAP_PX = 24;
const ROTATE_HANDLE_HIT_PX = 14;

function normalizeDeg(deg: number): number {
  while (deg > 180) deg -= 360;
  while (deg <= -180) deg += 360;
  return deg;
}

/** Drives the whole planning workflow from pointer events and form
 * submissions. Pure state + API calls: no DOM access, so the scripted
 * tests exercise exactly the code the browser runs. */
export class PlannerController {
  view: View = defaultView();
  tool: Tool = 'measure';
  side: 'left' | 'right' = 'left';

  sessionId: string | null = null;
  mmPerPx: number | null = null;

  /** Segment being drawn or last submitted, in image space. */
  segment: Seg | null = null;
  liveLengthMm: number | null = null;

  /** Display strings come verbatim from server responses. */
  sizeDisplay: string | null = null;
  measuredDisplay: string | null = null;
  banner: string | null = null;

  overlay: OverlayState | null = null;
  loadedPlan: PlanDto | null = null;
  lastPlanId: string | null = null;

  private drag: DragMode = null;
  private pendingCalibrationPx: number | null = null;
  private sender: CoalescingSender | null = null;
  private changed: () => void;

  constructor(
    readonly api: ApiClient,
    onChange: () => void = () => {},
  ) {
    this.changed = onChange;
  }

  // --- session -----------------------------------------------------------

  async openImage(image: Blob | ArrayBuffer, contentType: string): Promise<void> {
    this.sessionId = await this.api.createSession(image, contentType);
    this.mmPerPx = null;
    this.segment = null;
    this.overlay = null;
    this.sizeDisplay = null;
    this.measuredDisplay = null;
    this.banner = null;
    this.loadedPlan = null;
    this.sender = null;
    this.changed();
  }

  private requireSession(): string {
    if (!this.sessionId) throw new Error('no open session');
    return this.sessionId;
  }

  setTool(tool: Tool): void {
    if (tool === 'measure' && this.mmPerPx === null) {
      this.banner = 'Set calibration first: draw a line over the marker and enter its true length.';
      this.changed();
      return;
    }
    this.tool = tool;
    this.banner = null;
    this.changed();
  }

  // --- calibration -------------------------------------------------------

  /** Finish calibration: the user drew a line over a marker of known
   * physical length and typed the true millimetres. The client sends
   * only the resulting scale. */
  async applyCalibration(trueMm: number): Promise<void> {
    const sid = this.requireSession();
    if (this.pendingCalibrationPx === null || this.pendingCalibrationPx <= 0) {
      this.banner = 'Draw the calibration line first.';
      this.changed();
      return;
    }
    if (!(trueMm > 0)) {
      this.banner = 'Marker length must be a positive number of millimetres.';
      this.changed();
      return;
    }
    const mmPerPx = trueMm / this.pendingCalibrationPx;
    await this.api.setCalibration(sid, mmPerPx);
    this.mmPerPx = mmPerPx;
    // server invalidated sizing/placement; mirror that
    this.overlay = null;
    this.sizeDisplay = null;
    this.measuredDisplay = null;
    this.pendingCalibrationPx = null;
    this.banner = null;
    this.changed();
  }

  // --- pointer events (screen coordinates) --------------------------------

  pointerDown(sx: number, sy: number): void {
    const p = screenToImage(this.view, sx, sy);
    if (this.tool === 'calibrate' || this.tool === 'measure') {
      if (this.tool === 'measure' && this.mmPerPx === null) {
        this.banner = 'Measurement is disabled until calibration is set.';
        this.changed();
        return;
      }
      this.drag = { kind: 'draw', seg: { a: p, b: p } };
      this.segment = this.drag.seg;
      this.changed();
      return;
    }
    // adjust tool
    if (!this.overlay) return;
    if (this.hitRotateHandle(p)) {
      this.drag = { kind: 'rotate', lastImage: p };
    } else if (pointInOutline(p, this.displayedVertices() ?? [])) {
      this.drag = { kind: 'translate', lastImage: p };
    }
  }

  pointerMove(sx: number, sy: number): void {
    if (!this.drag) return;
    const p = screenToImage(this.view, sx, sy);
    if (this.drag.kind === 'draw') {
      this.drag.seg = { a: this.drag.seg.a, b: p };
      this.segment = this.drag.seg;
      this.liveLengthMm =
        this.mmPerPx === null ? null : segmentLengthPx(this.drag.seg) * this.mmPerPx;
      this.changed();
      return;
    }
    if (this.drag.kind === 'translate') {
      const delta: Delta = {
        rotation_deg: 0,
        pivot: { x: 0, y: 0 },
        dx: p.x - this.drag.lastImage.x,
        dy: p.y - this.drag.lastImage.y,
      };
      this.drag.lastImage = p;
      this.applyLocalDelta(delta);
      return;
    }
    // rotate about the template's current centre
    const anchor = this.displayedAnchor();
    if (!anchor) return;
    const prev = this.drag.lastImage;
    const angle =
      (Math.atan2(p.y - anchor.y, p.x - anchor.x) -
        Math.atan2(prev.y - anchor.y, prev.x - anchor.x)) *
      (180 / Math.PI);
    this.drag.lastImage = p;
    this.applyLocalDelta({ rotation_deg: normalizeDeg(angle), pivot: anchor, dx: 0, dy: 0 });
  }

  pointerUp(sx: number, sy: number): void {
    if (!this.drag) return;
    const mode = this.drag;
    this.drag = null;
    if (mode.kind !== 'draw') return;
    this.finishDraw(mode.seg, screenToImage(this.view, sx, sy));
  }

  private finishDraw(seg: Seg, end: Pt): void {
    const finished: Seg = { a: seg.a, b: end };
    this.segment = finished;
    this.liveLengthMm = null;
    const lengthPx = segmentLengthPx(finished);
    if (lengthPx === 0) {
      // a plain click: nothing to submit
      this.segment = null;
      this.changed();
      return;
    }
    if (this.tool === 'calibrate') {
      this.pendingCalibrationPx = lengthPx;
      this.banner = 'Enter the marker’s true length in mm to finish calibration.';
      this.changed();
      return;
    }
    void this.submitMeasurement(finished);
  }

  private async submitMeasurement(seg: Seg): Promise<void> {
    const sid = this.requireSession();
    try {
      const sizing = await this.api.submitMeasurement(
        sid,
        { ax: seg.a.x, ay: seg.a.y, bx: seg.b.x, by: seg.b.y },
        this.side,
      );
      this.sizeDisplay = String(sizing.size_mm);
      this.measuredDisplay = sizing.measured_mm.toFixed(2);
      this.overlay = { confirmed: sizing.placement, outstanding: null };
      this.sender = new CoalescingSender(
        (d) => this.api.adjustPlacement(sid, d),
        (placement) => this.reconcile(placement),
        (err) => this.placementFailed(err),
      );
      this.banner = null;
    } catch (err) {
      this.overlay = null;
      this.sizeDisplay = null;
      this.measuredDisplay = null;
      this.sender = null;
      this.banner = errorBanner(err);
    }
    this.changed();
  }

  // --- overlay adjustment --------------------------------------------------

  private applyLocalDelta(delta: Delta): void {
    if (!this.overlay || !this.sender) return;
    // optimistic: show the edit immediately, reconcile on response
    this.sender.submit(delta);
    this.overlay.outstanding = this.sender.outstanding();
    this.changed();
  }

  private reconcile(placement: PlacementDto): void {
    if (!this.overlay || !this.sender) return;
    this.overlay = { confirmed: placement, outstanding: this.sender.outstanding() };
    this.changed();
  }

  private placementFailed(err: unknown): void {
    if (err instanceof ApiError && err.body.code === 'state_error') {
      // the session lost its placement; the user must re-measure
      this.overlay = null;
      this.sender = null;
      this.banner = 'Placement is gone; draw the diameter again.';
    } else {
      if (this.overlay) this.overlay.outstanding = null;
      this.banner = errorBanner(err);
    }
    this.changed();
  }

  /** Vertices to draw right now: confirmed outline with any pending
   * local edits applied on top. */
  displayedVertices(): [number, number][] | null {
    if (!this.overlay) return null;
    const { confirmed, outstanding } = this.overlay;
    if (!outstanding) return confirmed.outline_px;
    return transformVertices(confirmed.outline_px, outstanding);
  }

  displayedAnchor(): Pt | null {
    if (!this.overlay) return null;
    const { confirmed, outstanding } = this.overlay;
    return outstanding ? applyDelta(outstanding, confirmed.anchor) : confirmed.anchor;
  }

  /** Rotate-handle position: above the cup centre along its current
   * orientation, just outside the silhouette. */
  rotateHandle(): Pt | null {
    if (!this.overlay) return null;
    const anchor = this.displayedAnchor();
    if (!anchor) return null;
    const r = outlineRadius(this.overlay.confirmed) + ROTATE_HANDLE_GAP_PX;
    const rot = this.displayedRotationDeg() * (Math.PI / 180);
    return { x: anchor.x + r * Math.sin(rot), y: anchor.y - r * Math.cos(rot) };
  }

  private displayedRotationDeg(): number {
    if (!this.overlay) return 0;
    const pending = this.overlay.outstanding?.rotation_deg ?? 0;
    return this.overlay.confirmed.pose.rotation_deg + pending;
  }

  private hitRotateHandle(p: Pt): boolean {
    const handle = this.rotateHandle();
    if (!handle) return false;
    const hitRadius = ROTATE_HANDLE_HIT_PX / this.view.zoom;
    return Math.hypot(p.x - handle.x, p.y - handle.y) <= hitRadius;
  }

  // --- plan form -----------------------------------------------------------

  async savePlan(payload: PlanPayload): Promise<void> {
    const sid = this.requireSession();
    try {
      this.lastPlanId = await this.api.savePlan(sid, payload);
      this.banner = `Saved plan ${this.lastPlanId}`;
    } catch (err) {
      this.banner = errorBanner(err);
    }
    this.changed();
  }

  async loadPlan(planId: string): Promise<void> {
    try {
      this.loadedPlan = await this.api.loadPlan(planId);
      this.banner = null;
    } catch (err) {
      this.loadedPlan = null;
      this.banner = errorBanner(err);
    }
    this.changed();
  }

  // --- helpers for rendering ------------------------------------------------

  segmentOnScreen(): { a: Pt; b: Pt } | null {
    if (!this.segment) return null;
    return {
      a: imageToScreen(this.view, this.segment.a.x, this.segment.a.y),
      b: imageToScreen(this.view, this.segment.b.x, this.segment.b.y),
    };
  }
}

function segmentLengthPx(seg: Seg): number {
  return Math.hypot(seg.b.x - seg.a.x, seg.b.y - seg.a.y);
}

function errorBanner(err: unknown): string {
  if (err instanceof ApiError) {
    if (err.body.code === 'size_out_of_range') {
      const reason = err.body.detail?.rejected_reason;
      const measured = err.body.detail?.measured_mm;
      const bound = reason === 'below_min' ? 'below minimum implant size 36 mm' : 'above maximum implant size 80 mm';
      return `Measured ${measured ?? '?'} mm is ${bound}.`;
    }
    return err.body.message;
  }
  return err instanceof Error ? err.message : String(err);
}
