// Debounced query scheduling with request coalescing.
//
// Viewport changes arrive far faster than queries should be issued, so
// requests are debounced (~50 ms). At most one request is in flight per
// controller: issuing a new one aborts its predecessor, and a monotonic
// sequence number drops any late response that would otherwise overwrite a
// newer frame.

import { ApiClient, QueryResponse } from './api.js';
import { pointsUrl, QueryMode, ViewportState } from './viewport.js';

export interface ControllerOptions {
  bucketPx?: number;
  debounceMs?: number;
  /** Force a query mode regardless of the viewport's (used by the raw overlay). */
  modeOverride?: QueryMode;
}

export class ChartController {
  onData: (response: QueryResponse, state: ViewportState) => void = () => {};
  onError: (error: unknown) => void = () => {};

  private readonly bucketPx: number;
  private readonly debounceMs: number;
  private readonly modeOverride?: QueryMode;
  private pending: ViewportState | null = null;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private inflight: AbortController | null = null;
  private issued = 0;
  private applied = 0;
  requestCount = 0;

  constructor(private readonly api: ApiClient, options: ControllerOptions = {}) {
    this.bucketPx = options.bucketPx ?? 1;
    this.debounceMs = options.debounceMs ?? 50;
    this.modeOverride = options.modeOverride;
  }

  /** Schedule a query for this viewport; earlier pending ones are coalesced. */
  request(state: ViewportState): void {
    this.pending = state;
    if (this.timer !== null) return;
    this.timer = setTimeout(() => {
      this.timer = null;
      this.firePending();
    }, this.debounceMs);
  }

  /** Issue the pending query immediately (selection changes, tests). */
  flush(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    this.firePending();
  }

  dispose(): void {
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = null;
    this.pending = null;
    this.inflight?.abort();
    this.inflight = null;
  }

  private firePending(): void {
    if (this.pending === null) return;
    const state = this.pending;
    this.pending = null;
    void this.issue(state);
  }

  private async issue(state: ViewportState): Promise<void> {
    this.inflight?.abort();
    const aborter = new AbortController();
    this.inflight = aborter;
    const id = ++this.issued;
    this.requestCount += 1;
    const url = pointsUrl(this.api.baseUrl, state, this.bucketPx, this.modeOverride);
    try {
      const response = await this.api.fetchPoints(url, aborter.signal);
      if (id <= this.applied) return; // a newer response already landed
      this.applied = id;
      this.onData(response, state);
    } catch (error) {
      if (aborter.signal.aborted) return; // superseded, not an error
      if (id <= this.applied) return;
      this.onError(error);
    } finally {
      if (this.inflight === aborter) this.inflight = null;
    }
  }
}
