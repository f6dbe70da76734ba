// Round-trip tests against the real service started by globalSetup (running
// over a preprocessed 100k-point reference dataset).

import { beforeAll, describe, expect, inject, it } from 'vitest';

import { ApiClient, QueryResponse } from '../src/api.js';
import { ChartController } from '../src/controller.js';
import { maxDeviationPx, PixelMapping } from '../src/geometry.js';
import { formatStats } from '../src/stats.js';
import { bucketCounts, fullExtent, ViewportState } from '../src/viewport.js';

const baseUrl = inject('baseUrl');

function viewport(tFrom: number, tTo: number, overrides: Partial<ViewportState> = {}): ViewportState {
  return {
    seriesId: 'normal',
    tFrom,
    tTo,
    pixelWidth: 300,
    pixelHeight: 100,
    mode: 'auto',
    overlayRaw: false,
    ...overrides,
  };
}

function once(controller: ChartController, state: ViewportState): Promise<QueryResponse> {
  return new Promise((resolve, reject) => {
    controller.onData = (r) => resolve(r);
    controller.onError = reject;
    controller.request(state);
    controller.flush();
  });
}

describe.skipIf(!baseUrl)('explorer against the live service', () => {
  let api: ApiClient;
  let extent: [number, number];

  beforeAll(async () => {
    api = new ApiClient(baseUrl);
    const [entry] = await api.listSeries();
    expect(entry.series_id).toBe('normal');
    expect(entry.segment_count).toBeGreaterThan(0);
    extent = fullExtent(entry);
  });

  it('full-extent viewport stays within the pixel-grid capacity', async () => {
    const state = viewport(extent[0], extent[1]);
    const response = await once(new ChartController(api), state);
    const { bucketsT, bucketsV } = bucketCounts(state);
    expect(response.meta.path).toBe('preprocessed');
    expect(response.points.length).toBeLessThanOrEqual(bucketsT * bucketsV);
    expect(response.meta.points_returned).toBe(response.points.length);
    expect(response.meta.points_fetched).toBeLessThanOrEqual(30_000);

    // the stats panel shows exactly what the API reported
    const panel = formatStats(response.meta);
    expect(panel.path).toBe(response.meta.path);
    expect(panel.bound).toBe(response.meta.distance_bound.toFixed(4));
    expect(panel.returned).toBe(response.meta.points_returned.toLocaleString('en-US'));
  });

  it('zooming below the raw cutoff flips the path indicator to raw', async () => {
    // span 100 < buckets_t * t_pre = 300
    const response = await once(new ChartController(api), viewport(0, 100));
    expect(response.meta.path).toBe('raw');
    expect(formatStats(response.meta).path).toBe('raw');
  });

  it('suppresses stale responses across real HTTP requests', async () => {
    const controller = new ChartController(api, { debounceMs: 0 });
    const applied: QueryResponse[] = [];
    controller.onData = (r) => applied.push(r);
    controller.onError = () => {};

    // fire a heavy full-extent query, then immediately supersede it
    controller.request(viewport(extent[0], extent[1]));
    controller.flush();
    controller.request(viewport(10, 20));
    controller.flush();
    await new Promise((r) => setTimeout(r, 1500));

    expect(applied.length).toBeGreaterThanOrEqual(1);
    const last = applied[applied.length - 1];
    expect(last.meta.aligned_from).toBe(10);
    expect(last.meta.aligned_to).toBe(20);
    // nothing rendered after the newest frame
    expect(applied.filter((r) => r.meta.aligned_to > 20).length).toBe(0);
  });

  it('raw overlay and filtered trace coincide within one bucket diagonal', async () => {
    // an aligned sub-range below the cutoff: the main trace takes the raw path
    const state = viewport(10, 50, { pixelWidth: 400, pixelHeight: 300 });
    const filtered = await once(new ChartController(api), state);
    expect(filtered.meta.path).toBe('raw');

    // near-raw reference: one bucket per point leaves everything retained
    const dense = await api.fetchPoints(
      `${baseUrl}/api/series/normal/points?from=10&to=50&buckets_t=8000&buckets_v=8000&mode=raw`,
    );
    expect(dense.points.length).toBeGreaterThan(filtered.points.length);

    const grid = filtered.meta.target_grid!;
    const map: PixelMapping = {
      tFrom: grid.t_min,
      tTo: grid.t_max,
      vMin: grid.v_min,
      vMax: grid.v_max,
      pixelWidth: state.pixelWidth,
      pixelHeight: state.pixelHeight,
    };
    const deviation = maxDeviationPx(dense.points, filtered.points, map);
    expect(deviation).toBeLessThanOrEqual(Math.SQRT2 + 0.01);
  });
});
