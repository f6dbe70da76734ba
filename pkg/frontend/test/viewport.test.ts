import { describe, expect, it } from 'vitest';

import type { SeriesEntry } from '../src/api.js';
import {
  bucketCounts,
  clampTo,
  fullExtent,
  panBy,
  pointsUrl,
  ViewportState,
  zoomAt,
} from '../src/viewport.js';

const state: ViewportState = {
  seriesId: 'normal',
  tFrom: 0,
  tTo: 300,
  pixelWidth: 640,
  pixelHeight: 240,
  mode: 'auto',
  overlayRaw: false,
};

describe('bucketCounts', () => {
  it('derives buckets from the canvas pixel size', () => {
    expect(bucketCounts(state)).toEqual({ bucketsT: 640, bucketsV: 240 });
    expect(bucketCounts(state, 2)).toEqual({ bucketsT: 320, bucketsV: 120 });
  });

  it('never sends fewer than one bucket', () => {
    expect(bucketCounts({ ...state, pixelWidth: 1, pixelHeight: 1 }, 4)).toEqual({
      bucketsT: 1,
      bucketsV: 1,
    });
  });

  it('a resized canvas produces different buckets, forcing a re-query', () => {
    const before = pointsUrl('', state);
    const after = pointsUrl('', { ...state, pixelWidth: 800 });
    expect(before).not.toEqual(after);
  });
});

describe('pointsUrl', () => {
  it('encodes the full query contract', () => {
    const url = pointsUrl('http://x', state);
    expect(url).toBe(
      'http://x/api/series/normal/points?from=0&to=300&buckets_t=640&buckets_v=240&mode=auto',
    );
  });

  it('supports a mode override for overlays', () => {
    expect(pointsUrl('', state, 1, 'raw')).toContain('mode=raw');
  });
});

describe('zoomAt', () => {
  it('keeps the cursor time at the same screen fraction', () => {
    const zoomed = zoomAt(state, 0.5, 100);
    const fractionBefore = (100 - state.tFrom) / (state.tTo - state.tFrom);
    const fractionAfter = (100 - zoomed.tFrom) / (zoomed.tTo - zoomed.tFrom);
    expect(fractionAfter).toBeCloseTo(fractionBefore, 12);
    expect(zoomed.tTo - zoomed.tFrom).toBeCloseTo(150, 12);
  });

  it('zooming out then in restores the span', () => {
    const out = zoomAt(state, 1.25, 200);
    const back = zoomAt(out, 0.8, 200);
    expect(back.tTo - back.tFrom).toBeCloseTo(300, 9);
  });
});

describe('panBy', () => {
  it('shifts by a fraction of the span', () => {
    const panned = panBy(state, 0.1);
    expect(panned.tFrom).toBeCloseTo(30);
    expect(panned.tTo).toBeCloseTo(330);
  });
});

describe('clampTo', () => {
  it('pulls an out-of-range window back inside the extent', () => {
    const moved = clampTo({ ...state, tFrom: 250, tTo: 550 }, [0, 300]);
    expect(moved.tFrom).toBe(0);
    expect(moved.tTo).toBe(300);
    const left = clampTo({ ...state, tFrom: -50, tTo: 50 }, [0, 300]);
    expect(left.tFrom).toBe(0);
    expect(left.tTo).toBe(100);
  });
});

describe('fullExtent', () => {
  const entry: SeriesEntry = {
    series_id: 's',
    raw_count: 10,
    t_min: 0,
    t_max: 299.997,
    preprocess_config: null,
    segment_count: 0,
  };

  it('pads past t_max so the half-open query includes the last point', () => {
    const [lo, hi] = fullExtent(entry);
    expect(lo).toBe(0);
    expect(hi).toBeGreaterThan(299.997);
  });

  it('snaps to whole batch intervals when the series is preprocessed', () => {
    const preprocessed: SeriesEntry = {
      ...entry,
      preprocess_config: { t_pre: 1.0, passes: 5, n_v_pre: 100 },
      segment_count: 300,
    };
    expect(fullExtent(preprocessed)).toEqual([0, 300]);
    // an exact-boundary t_max still keeps its last point inside the range
    expect(fullExtent({ ...preprocessed, t_max: 300 })[1]).toBeGreaterThan(300);
  });
});
