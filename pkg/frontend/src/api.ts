// Typed mirror of the service's JSON contract (schemas/api.schema.json).

export interface BatchConfigDto {
  t_pre: number;
  passes: number;
  n_v_pre: number;
}

export interface SeriesEntry {
  series_id: string;
  raw_count: number;
  t_min: number | null;
  t_max: number | null;
  preprocess_config: BatchConfigDto | null;
  segment_count: number;
}

export interface TargetGrid {
  t_min: number;
  t_max: number;
  v_min: number;
  v_max: number;
  n_t: number;
  n_v: number;
  diagonal: number;
}

export interface QueryMeta {
  path: 'raw' | 'preprocessed';
  raw_points_scanned: number;
  points_fetched: number;
  points_returned: number;
  distance_bound: number;
  elapsed_ms: number;
  aligned_from: number;
  aligned_to: number;
  target_grid: TargetGrid | null;
}

export interface QueryResponse {
  points: [number, number][];
  meta: QueryMeta;
}

export interface ApiError {
  code: string;
  message: string;
  detail?: unknown;
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    readonly baseUrl: string = '',
    private readonly fetchFn: FetchLike = (...args) => fetch(...args),
  ) {}

  async listSeries(): Promise<SeriesEntry[]> {
    const res = await this.fetchFn(`${this.baseUrl}/api/series`);
    return (await this.unwrap(res)) as SeriesEntry[];
  }

  async fetchPoints(url: string, signal?: AbortSignal): Promise<QueryResponse> {
    const res = await this.fetchFn(url, { signal });
    return (await this.unwrap(res)) as QueryResponse;
  }

  private async unwrap(res: Response): Promise<unknown> {
    const body = await res.json();
    if (!res.ok) {
      const err = body as ApiError;
      throw new Error(`${err.code ?? res.status}: ${err.message ?? 'request failed'}`);
    }
    return body;
  }
}
