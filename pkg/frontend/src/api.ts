// Thin fetch client for the recourse service; every number the UI shows
// comes from these responses.

import type {
  ApiError,
  PredictResponse,
  RecordDoc,
  RecourseRequest,
  RecourseResponse,
  SchemaResponse,
} from './types';

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: typeof fetch = fetch.bind(globalThis),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    } catch (err) {
      if ((err as Error).name === 'AbortError') throw err;
      throw { status: 0, detail: `network failure: ${(err as Error).message}` } as ApiError;
    }
    const body = await response.json().catch(() => ({}));
    if (!response.ok) {
      const detail =
        typeof body.detail === 'string' ? body.detail : JSON.stringify(body.detail ?? body);
      throw { status: response.status, detail } as ApiError;
    }
    return body as T;
  }

  getSchema(): Promise<SchemaResponse> {
    return this.request<SchemaResponse>('/schema');
  }

  predict(record: RecordDoc, signal?: AbortSignal): Promise<PredictResponse> {
    return this.request<PredictResponse>('/predict', {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ record }),
      signal,
    });
  }

  recourse(payload: RecourseRequest, signal?: AbortSignal): Promise<RecourseResponse> {
    return this.request<RecourseResponse>('/recourse', {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(payload),
      signal,
    });
  }
}

export function isApiError(err: unknown): err is ApiError {
  return typeof err === 'object' && err !== null && 'status' in err && 'detail' in err;
}
