// Canvas-free geometry used by tests and the overlay sanity check: how far,
// in pixels, does the rendered subset stray from the raw trace?

export interface PixelMapping {
  tFrom: number;
  tTo: number;
  vMin: number;
  vMax: number;
  pixelWidth: number;
  pixelHeight: number;
}

export function toPixel(point: [number, number], map: PixelMapping): [number, number] {
  const x = ((point[0] - map.tFrom) / (map.tTo - map.tFrom)) * map.pixelWidth;
  const vSpan = map.vMax - map.vMin;
  const y =
    vSpan === 0
      ? map.pixelHeight / 2
      : (1 - (point[1] - map.vMin) / vSpan) * map.pixelHeight;
  return [x, y];
}

/**
 * Max over raw points of the pixel distance to the nearest shown point.
 * For server-filtered data this stays within one bucket diagonal.
 */
export function maxDeviationPx(
  raw: [number, number][],
  shown: [number, number][],
  map: PixelMapping,
): number {
  if (raw.length === 0 || shown.length === 0) return Infinity;
  const shownPx = shown.map((p) => toPixel(p, map));
  let worst = 0;
  for (const point of raw) {
    const [x, y] = toPixel(point, map);
    let best = Infinity;
    for (const [sx, sy] of shownPx) {
      const d = Math.hypot(x - sx, y - sy);
      if (d < best) best = d;
    }
    if (best > worst) worst = best;
  }
  return worst;
}
