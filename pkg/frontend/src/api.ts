import type {
  ApiErrorBody,
  Delta,
  PlacementDto,
  PlanDto,
  PlanPayload,
  SessionStateDto,
  SizingResponse,
} from './types';

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly body: ApiErrorBody,
  ) {
    super(body.message);
  }
}

async function toApiError(res: Response): Promise<ApiError> {
  let body: ApiErrorBody;
  try {
    body = (await res.json()) as ApiErrorBody;
  } catch {
    body = { code: 'io_error', message: `HTTP ${res.status}` };
  }
  return new ApiError(res.status, body);
}

/** Thin typed wrapper over the planning service. The server is the
 * single source of truth for sizing; nothing here computes sizes. */
export class ApiClient {
  constructor(
    private readonly base: string = '',
    private readonly fetchFn: FetchLike = (...args) => fetch(...args),
  ) {}

  private async json<T>(method: string, path: string, body?: unknown): Promise<T> {
    const res = await this.fetchFn(this.base + path, {
      method,
      headers: body === undefined ? {} : { 'Content-Type': 'application/json' },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!res.ok) throw await toApiError(res);
    return (await res.json()) as T;
  }

  async createSession(image: Blob | ArrayBuffer, contentType: string): Promise<string> {
    const res = await this.fetchFn(`${this.base}/sessions`, {
      method: 'POST',
      headers: { 'Content-Type': contentType },
      body: image as BodyInit,
    });
    if (!res.ok) throw await toApiError(res);
    const data = (await res.json()) as { session_id: string };
    return data.session_id;
  }

  getSession(sessionId: string): Promise<SessionStateDto> {
    return this.json('GET', `/sessions/${sessionId}`);
  }

  imageUrl(sessionId: string): string {
    return `${this.base}/sessions/${sessionId}/image`;
  }

  async setCalibration(sessionId: string, mmPerPx: number): Promise<void> {
    await this.json('PUT', `/sessions/${sessionId}/calibration`, { mm_per_px: mmPerPx });
  }

  submitMeasurement(
    sessionId: string,
    seg: { ax: number; ay: number; bx: number; by: number },
    side: 'left' | 'right',
  ): Promise<SizingResponse> {
    return this.json('PUT', `/sessions/${sessionId}/measurement`, { ...seg, side });
  }

  adjustPlacement(sessionId: string, delta: Delta): Promise<PlacementDto> {
    return this.json('PUT', `/sessions/${sessionId}/placement`, { delta });
  }

  async savePlan(sessionId: string, payload: PlanPayload): Promise<string> {
    const data = await this.json<{ plan_id: string }>('POST', `/sessions/${sessionId}/plan`, payload);
    return data.plan_id;
  }

  loadPlan(planId: string): Promise<PlanDto> {
    return this.json('GET', `/plans/${planId}`);
  }
}
