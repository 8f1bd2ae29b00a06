import { ApiClient } from './api';
import { PlannerController, Tool } from './controller';
import { draw } from './render';
import { panBy, zoomAt } from './view';

// DOM wiring. All planning behaviour lives in PlannerController; this
// file only forwards events and repaints.

const api = new ApiClient('');
const canvas = document.getElementById('stage') as HTMLCanvasElement;
const ctx = canvas.getContext('2d')!;
let image: HTMLImageElement | null = null;

const controller = new PlannerController(api, update);

const el = {
  file: document.getElementById('file') as HTMLInputElement,
  tools: Array.from(document.querySelectorAll<HTMLButtonElement>('button[data-tool]')),
  side: document.getElementById('side') as HTMLSelectElement,
  markerMm: document.getElementById('marker-mm') as HTMLInputElement,
  applyCal: document.getElementById('apply-cal') as HTMLButtonElement,
  status: document.getElementById('status')!,
  banner: document.getElementById('banner')!,
  size: document.getElementById('size')!,
  planForm: document.getElementById('plan-form') as HTMLFormElement,
  planId: document.getElementById('plan-id') as HTMLInputElement,
  loadPlan: document.getElementById('load-plan') as HTMLButtonElement,
};

function update(): void {
  el.banner.textContent = controller.banner ?? '';
  el.size.textContent = controller.sizeDisplay ?? '–';
  const bits: string[] = [];
  if (controller.mmPerPx !== null) bits.push(`${controller.mmPerPx.toFixed(6)} mm/px`);
  if (controller.liveLengthMm !== null) bits.push(`${controller.liveLengthMm.toFixed(2)} mm`);
  else if (controller.measuredDisplay) bits.push(`${controller.measuredDisplay} mm`);
  if (controller.overlay) {
    const imp = controller.overlay.confirmed.implant;
    bits.push(`${imp.brand} ${imp.side} ${imp.size_mm} mm`);
  }
  el.status.textContent = bits.join(' · ');
  for (const b of el.tools) b.classList.toggle('active', b.dataset.tool === controller.tool);
  draw(ctx, controller, image);
}

el.file.addEventListener('change', () => {
  const f = el.file.files?.[0];
  if (!f) return;
  void f.arrayBuffer().then(async (buf) => {
    await controller.openImage(buf, f.type || 'image/png');
    image = new Image();
    image.onload = update;
    if (controller.sessionId) image.src = api.imageUrl(controller.sessionId);
  });
});

for (const b of el.tools) {
  b.addEventListener('click', () => controller.setTool(b.dataset.tool as Tool));
}
el.side.addEventListener('change', () => {
  controller.side = el.side.value as 'left' | 'right';
});
el.applyCal.addEventListener('click', () => {
  void controller.applyCalibration(Number(el.markerMm.value));
});

function pointerPos(ev: MouseEvent): [number, number] {
  const r = canvas.getBoundingClientRect();
  return [ev.clientX - r.left, ev.clientY - r.top];
}

let panning: { x: number; y: number } | null = null;

canvas.addEventListener('pointerdown', (ev) => {
  canvas.setPointerCapture(ev.pointerId);
  const [x, y] = pointerPos(ev);
  if (ev.button === 1 || ev.shiftKey) {
    panning = { x, y };
    return;
  }
  controller.pointerDown(x, y);
  update();
});
canvas.addEventListener('pointermove', (ev) => {
  const [x, y] = pointerPos(ev);
  if (panning) {
    controller.view = panBy(controller.view, x - panning.x, y - panning.y);
    panning = { x, y };
    update();
    return;
  }
  controller.pointerMove(x, y);
  update();
});
canvas.addEventListener('pointerup', (ev) => {
  const [x, y] = pointerPos(ev);
  if (panning) {
    panning = null;
    return;
  }
  controller.pointerUp(x, y);
  update();
});
canvas.addEventListener('wheel', (ev) => {
  ev.preventDefault();
  const [x, y] = pointerPos(ev);
  controller.view = zoomAt(controller.view, x, y, ev.deltaY < 0 ? 1.15 : 1 / 1.15);
  update();
});

el.planForm.addEventListener('submit', (ev) => {
  ev.preventDefault();
  const data = new FormData(el.planForm);
  const name = String(data.get('patient_name') ?? '').trim();
  const patientId = String(data.get('patient_id') ?? '').trim();
  if (!name || !patientId) {
    controller.banner = 'Patient name and ID are required.';
    update();
    return;
  }
  void controller.savePlan({
    patient_name: name,
    gender: data.get('gender') === 'M' ? 'M' : 'F',
    patient_id: patientId,
    dob: String(data.get('dob') ?? ''),
  });
});

el.loadPlan.addEventListener('click', () => {
  if (el.planId.value.trim()) void controller.loadPlan(el.planId.value.trim());
});

update();
