// Viewport state and the pure math behind zoom, pan, and bucket derivation.
// The bucket counts sent to the service always derive from the actual canvas
// pixel size, so what the server filters is exactly what the screen can show.

import type { SeriesEntry } from './api.js';

export type QueryMode = 'auto' | 'raw' | 'preprocessed';

export interface ViewportState {
  seriesId: string;
  tFrom: number;
  tTo: number;
  pixelWidth: number;
  pixelHeight: number;
  mode: QueryMode;
  overlayRaw: boolean;
}

export interface BucketCounts {
  bucketsT: number;
  bucketsV: number;
}

export function bucketCounts(state: ViewportState, bucketPx = 1): BucketCounts {
  return {
    bucketsT: Math.max(1, Math.floor(state.pixelWidth / bucketPx)),
    bucketsV: Math.max(1, Math.floor(state.pixelHeight / bucketPx)),
  };
}

export function pointsUrl(
  baseUrl: string,
  state: ViewportState,
  bucketPx = 1,
  modeOverride?: QueryMode,
): string {
  const { bucketsT, bucketsV } = bucketCounts(state, bucketPx);
  const params = new URLSearchParams({
    from: String(state.tFrom),
    to: String(state.tTo),
    buckets_t: String(bucketsT),
    buckets_v: String(bucketsV),
    mode: modeOverride ?? state.mode,
  });
  return `${baseUrl}/api/series/${encodeURIComponent(state.seriesId)}/points?${params}`;
}

/**
 * Full extent of a series, padded so the half-open query keeps the last
 * point. A preprocessed series snaps outward to whole batch intervals, the
 * units its queries are served in.
 */
export function fullExtent(entry: SeriesEntry): [number, number] {
  const tMin = entry.t_min ?? 0;
  const tMax = entry.t_max ?? 1;
  const pad = Math.max((tMax - tMin) * 1e-9, 1e-9);
  const tPre = entry.preprocess_config?.t_pre;
  if (tPre && entry.segment_count > 0) {
    return [Math.floor(tMin / tPre) * tPre, Math.ceil((tMax + pad) / tPre) * tPre];
  }
  return [tMin, tMax + pad];
}

/** Rescale the span by `factor`, keeping the time under the cursor fixed. */
export function zoomAt(state: ViewportState, factor: number, tCursor: number): ViewportState {
  const span = state.tTo - state.tFrom;
  const fraction = (tCursor - state.tFrom) / span;
  const newSpan = span * factor;
  const tFrom = tCursor - fraction * newSpan;
  return { ...state, tFrom, tTo: tFrom + newSpan };
}

/** Shift the window by a fraction of its span (positive moves forward in time). */
export function panBy(state: ViewportState, spanFraction: number): ViewportState {
  const shift = (state.tTo - state.tFrom) * spanFraction;
  return { ...state, tFrom: state.tFrom + shift, tTo: state.tTo + shift };
}

/** Keep the window inside the series extent without collapsing its span. */
export function clampTo(state: ViewportState, extent: [number, number]): ViewportState {
  const [lo, hi] = extent;
  let span = Math.min(state.tTo - state.tFrom, hi - lo);
  let tFrom = state.tFrom;
  if (tFrom < lo) tFrom = lo;
  if (tFrom + span > hi) tFrom = hi - span;
  return { ...state, tFrom, tTo: tFrom + span };
}
