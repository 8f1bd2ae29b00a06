import type { PlannerController } from './controller';
import { imageToScreen } from './view';

/** Canvas painting. Everything is drawn in screen space through the
 * view transform; the controller owns all image-space state. */
export function draw(
  ctx: CanvasRenderingContext2D,
  controller: PlannerController,
  image: HTMLImageElement | null,
): void {
  const { canvas } = ctx;
  ctx.setTransform(1, 0, 0, 1, 0, 0);
  ctx.fillStyle = '#10151c';
  ctx.fillRect(0, 0, canvas.width, canvas.height);

  const v = controller.view;
  if (image) {
    ctx.setTransform(v.zoom, 0, 0, v.zoom, v.panX, v.panY);
    ctx.drawImage(image, 0, 0);
    ctx.setTransform(1, 0, 0, 1, 0, 0);
  }

  const seg = controller.segmentOnScreen();
  if (seg) {
    ctx.strokeStyle = '#ffd166';
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.moveTo(seg.a.x, seg.a.y);
    ctx.lineTo(seg.b.x, seg.b.y);
    ctx.stroke();
    for (const p of [seg.a, seg.b]) {
      ctx.beginPath();
      ctx.arc(p.x, p.y, 3.5, 0, 2 * Math.PI);
      ctx.fillStyle = '#ffd166';
      ctx.fill();
    }
  }

  const vertices = controller.displayedVertices();
  if (vertices && vertices.length) {
    ctx.beginPath();
    vertices.forEach(([ix, iy], i) => {
      const p = imageToScreen(v, ix, iy);
      if (i === 0) ctx.moveTo(p.x, p.y);
      else ctx.lineTo(p.x, p.y);
    });
    ctx.closePath();
    ctx.fillStyle = 'rgba(56, 163, 220, 0.25)';
    ctx.fill();
    ctx.strokeStyle = '#38a3dc';
    ctx.lineWidth = 2;
    ctx.stroke();

    const anchor = controller.displayedAnchor();
    const handle = controller.rotateHandle();
    if (anchor && handle) {
      const a = imageToScreen(v, anchor.x, anchor.y);
      const h = imageToScreen(v, handle.x, handle.y);
      ctx.strokeStyle = 'rgba(56, 163, 220, 0.7)';
      ctx.lineWidth = 1;
      ctx.beginPath();
      ctx.moveTo(a.x, a.y);
      ctx.lineTo(h.x, h.y);
      ctx.stroke();
      ctx.beginPath();
      ctx.arc(h.x, h.y, 6, 0, 2 * Math.PI);
      ctx.fillStyle = '#8ecae6';
      ctx.fill();
      ctx.beginPath();
      ctx.arc(a.x, a.y, 2.5, 0, 2 * Math.PI);
      ctx.fillStyle = '#38a3dc';
      ctx.fill();
    }
  }

  const plan = controller.loadedPlan;
  if (plan && controller.mmPerPx !== null) {
    // read-only re-render of a stored plan: measurement line + cup circle
    const m = plan.measurement;
    const a = imageToScreen(v, m.ax, m.ay);
    const b = imageToScreen(v, m.bx, m.by);
    ctx.strokeStyle = '#9b5de5';
    ctx.setLineDash([6, 4]);
    ctx.beginPath();
    ctx.moveTo(a.x, a.y);
    ctx.lineTo(b.x, b.y);
    ctx.stroke();
    const anchor = imageToScreen(v, plan.placement.anchor.x, plan.placement.anchor.y);
    const radiusPx = (plan.acetabular_size / plan.calibration.mm_per_px / 2) * v.zoom;
    ctx.beginPath();
    ctx.arc(anchor.x, anchor.y, radiusPx, 0, 2 * Math.PI);
    ctx.stroke();
    ctx.setLineDash([]);
  }
}
