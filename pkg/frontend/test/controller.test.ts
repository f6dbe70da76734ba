import { afterEach, beforeEach, describe, expect, it, vi } from 'vitest';

import { ApiClient, FetchLike, QueryResponse } from '../src/api.js';
import { ChartController } from '../src/controller.js';
import type { ViewportState } from '../src/viewport.js';

function viewport(tFrom: number, tTo: number): ViewportState {
  return {
    seriesId: 's',
    tFrom,
    tTo,
    pixelWidth: 300,
    pixelHeight: 100,
    mode: 'auto',
    overlayRaw: false,
  };
}

function queryResponse(tag: number): QueryResponse {
  return {
    points: [[tag, tag]],
    meta: {
      path: 'raw',
      raw_points_scanned: 1,
      points_fetched: 1,
      points_returned: 1,
      distance_bound: 1.0,
      elapsed_ms: 0.1,
      aligned_from: 0,
      aligned_to: 1,
      target_grid: null,
    },
  };
}

interface PendingCall {
  url: string;
  signal?: AbortSignal;
  resolve: (body: QueryResponse) => void;
}

/** Manually resolvable fetch; optionally deaf to abort to expose late responses. */
function fakeFetch(options: { honorAbort: boolean }) {
  const calls: PendingCall[] = [];
  const fetchFn: FetchLike = (url, init) =>
    new Promise((resolve, reject) => {
      const signal = init?.signal ?? undefined;
      if (options.honorAbort && signal) {
        signal.addEventListener('abort', () =>
          reject(new DOMException('aborted', 'AbortError')),
        );
      }
      calls.push({
        url: String(url),
        signal,
        resolve: (body) =>
          resolve({ ok: true, status: 200, json: async () => body } as Response),
      });
    });
  return { calls, fetchFn };
}

function flushMicrotasks(): Promise<void> {
  return new Promise((r) => setTimeout(r, 0));
}

describe('ChartController', () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it('debounces a burst of viewport changes into one request', async () => {
    const { calls, fetchFn } = fakeFetch({ honorAbort: true });
    const controller = new ChartController(new ApiClient('', fetchFn), { debounceMs: 50 });
    controller.request(viewport(0, 10));
    controller.request(viewport(0, 20));
    controller.request(viewport(0, 30));
    expect(calls.length).toBe(0);
    await vi.advanceTimersByTimeAsync(49);
    expect(calls.length).toBe(0);
    await vi.advanceTimersByTimeAsync(1);
    expect(calls.length).toBe(1);
    expect(calls[0].url).toContain('to=30'); // only the newest viewport survives
  });

  it('aborts the in-flight request when a newer one is issued', async () => {
    const { calls, fetchFn } = fakeFetch({ honorAbort: true });
    const controller = new ChartController(new ApiClient('', fetchFn), { debounceMs: 10 });
    const seen: QueryResponse[] = [];
    const errors: unknown[] = [];
    controller.onData = (r) => seen.push(r);
    controller.onError = (e) => errors.push(e);

    controller.request(viewport(0, 10));
    await vi.advanceTimersByTimeAsync(10);
    controller.request(viewport(0, 20));
    await vi.advanceTimersByTimeAsync(10);

    expect(calls.length).toBe(2);
    expect(calls[0].signal?.aborted).toBe(true);
    calls[1].resolve(queryResponse(2));
    await vi.advanceTimersByTimeAsync(1);
    expect(seen.map((r) => r.points[0][0])).toEqual([2]);
    expect(errors).toEqual([]); // the abort is not surfaced as an error
  });

  it('drops a stale response that lands after a newer one', async () => {
    // fetch ignores abort: the old response still arrives, late
    const { calls, fetchFn } = fakeFetch({ honorAbort: false });
    const controller = new ChartController(new ApiClient('', fetchFn), { debounceMs: 0 });
    const seen: number[] = [];
    controller.onData = (r) => seen.push(r.points[0][0]);

    controller.request(viewport(0, 10));
    await vi.advanceTimersByTimeAsync(0);
    controller.request(viewport(0, 20));
    await vi.advanceTimersByTimeAsync(0);
    expect(calls.length).toBe(2);

    calls[1].resolve(queryResponse(2)); // newer finishes first
    await vi.advanceTimersByTimeAsync(1);
    calls[0].resolve(queryResponse(1)); // stale straggler
    await vi.advanceTimersByTimeAsync(1);

    expect(seen).toEqual([2]); // the stale frame never overwrites the newer one
  });

  it('flush issues exactly one request per selection change', async () => {
    const { calls, fetchFn } = fakeFetch({ honorAbort: true });
    const controller = new ChartController(new ApiClient('', fetchFn), { debounceMs: 50 });
    controller.request(viewport(0, 300));
    controller.flush();
    expect(calls.length).toBe(1);
    expect(controller.requestCount).toBe(1);
    await vi.advanceTimersByTimeAsync(100);
    expect(calls.length).toBe(1); // the debounce timer did not double-fire
  });

  it('surfaces real errors but keeps quiet after supersession', async () => {
    const failing: FetchLike = async () => {
      throw new Error('boom');
    };
    const controller = new ChartController(new ApiClient('', failing), { debounceMs: 0 });
    const errors: unknown[] = [];
    controller.onError = (e) => errors.push(e);
    controller.request(viewport(0, 10));
    await vi.advanceTimersByTimeAsync(1);
    expect(errors.length).toBe(1);
  });

  it('dispose cancels pending work', async () => {
    const { calls, fetchFn } = fakeFetch({ honorAbort: true });
    const controller = new ChartController(new ApiClient('', fetchFn), { debounceMs: 50 });
    controller.request(viewport(0, 10));
    controller.dispose();
    await vi.advanceTimersByTimeAsync(100);
    expect(calls.length).toBe(0);
  });
});

describe('ChartController with real timers', () => {
  it('uses the mode override for overlay traffic', async () => {
    const { calls, fetchFn } = fakeFetch({ honorAbort: true });
    const controller = new ChartController(new ApiClient('', fetchFn), {
      debounceMs: 0,
      modeOverride: 'raw',
    });
    controller.request(viewport(0, 10));
    controller.flush();
    await flushMicrotasks();
    expect(calls[0].url).toContain('mode=raw');
  });
});
