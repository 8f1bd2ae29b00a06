import { readFileSync } from 'node:fs';
import { dirname, join } from 'node:path';
import { fileURLToPath } from 'node:url';

import { ApiClient, FetchLike } from '../src/api';
import { PlannerController } from '../src/controller';
import type { SizingResponse } from '../src/types';

const HERE = dirname(fileURLToPath(import.meta.url));

export function fixture<T>(name: string): T {
  return JSON.parse(readFileSync(join(HERE, 'fixtures', name), 'utf-8')) as T;
}

export interface RecordedRequest {
  method: string;
  url: string;
  body: unknown;
}

export type RouteResult = { status?: number; json: unknown } | 'hang';
export type Router = (method: string, url: string, body: unknown) => RouteResult | Promise<RouteResult>;

/** In-memory transport standing in for fetch; records every request so
 * tests can assert exactly what would go over the wire. */
export function makeTransport(route: Router): { fetchFn: FetchLike; requests: RecordedRequest[] } {
  const requests: RecordedRequest[] = [];
  const fetchFn: FetchLike = async (url, init = {}) => {
    const method = init.method ?? 'GET';
    const body = typeof init.body === 'string' ? JSON.parse(init.body) : init.body ?? null;
    requests.push({ method, url, body });
    const result = await route(method, url, body);
    if (result === 'hang') {
      return new Promise<Response>(() => {});
    }
    return new Response(JSON.stringify(result.json), {
      status: result.status ?? 200,
      headers: { 'content-type': 'application/json' },
    });
  };
  return { fetchFn, requests };
}

export const flush = () => new Promise<void>((resolve) => setTimeout(resolve, 0));

/** Standard happy-path routes up to an accepted measurement. */
export function sessionRouter(measurement: SizingResponse, placementRoute: Router | null = null): Router {
  return (method, url, body) => {
    if (method === 'POST' && url === '/sessions') return { status: 201, json: { session_id: 's-test' } };
    if (method === 'PUT' && url.endsWith('/calibration')) return { json: { ok: true } };
    if (method === 'PUT' && url.endsWith('/measurement')) return { json: measurement };
    if (method === 'PUT' && url.endsWith('/placement') && placementRoute) {
      return placementRoute(method, url, body);
    }
    throw new Error(`unrouted request: ${method} ${url}`);
  };
}

export interface Drawn {
  controller: PlannerController;
  requests: RecordedRequest[];
}

/** Script the full pointer workflow: calibrate over a 200 px marker of
 * 100 mm (scale 0.5), then draw the given image-space segment. All
 * pointer events go through the active view transform, exactly like
 * canvas events would. */
export async function drawMeasurement(
  router: Router,
  opts: { zoom?: number; panX?: number; panY?: number; from?: [number, number]; to?: [number, number] } = {},
): Promise<Drawn> {
  const { fetchFn, requests } = makeTransport(router);
  const controller = new PlannerController(new ApiClient('', fetchFn));
  await controller.openImage(new ArrayBuffer(16), 'image/png');
  controller.view = { zoom: opts.zoom ?? 1, panX: opts.panX ?? 0, panY: opts.panY ?? 0 };

  const screen = (ix: number, iy: number): [number, number] => [
    ix * controller.view.zoom + controller.view.panX,
    iy * controller.view.zoom + controller.view.panY,
  ];

  controller.setTool('calibrate');
  controller.pointerDown(...screen(30, 370));
  controller.pointerMove(...screen(130, 370));
  controller.pointerUp(...screen(230, 370)); // 200 image px over the marker
  await controller.applyCalibration(100);

  controller.setTool('measure');
  const [fx, fy] = opts.from ?? [100, 200];
  const [tx, ty] = opts.to ?? [216.56, 200];
  controller.pointerDown(...screen(fx, fy));
  controller.pointerMove(...screen((fx + tx) / 2, (fy + ty) / 2));
  controller.pointerMove(...screen(tx, ty));
  controller.pointerUp(...screen(tx, ty));
  await flush();
  return { controller, requests };
}
