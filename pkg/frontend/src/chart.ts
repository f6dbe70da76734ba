// Canvas renderer: a line through the returned points plus a marker on each,
// so individual samples stay visible. All simplification happens server-side;
// nothing is decimated here.

import type { QueryResponse } from './api.js';
import { PixelMapping, toPixel } from './geometry.js';

export interface Trace {
  points: [number, number][];
  color: string;
  markerRadius: number;
}

export function mappingFor(
  response: QueryResponse,
  pixelWidth: number,
  pixelHeight: number,
): PixelMapping | null {
  const grid = response.meta.target_grid;
  if (grid === null) return null;
  return {
    tFrom: grid.t_min,
    tTo: grid.t_max,
    vMin: grid.v_min,
    vMax: grid.v_max === grid.v_min ? grid.v_min + 1 : grid.v_max,
    pixelWidth,
    pixelHeight,
  };
}

export function drawTraces(
  ctx: CanvasRenderingContext2D,
  map: PixelMapping,
  traces: Trace[],
): void {
  ctx.clearRect(0, 0, map.pixelWidth, map.pixelHeight);
  for (const trace of traces) {
    if (trace.points.length === 0) continue;
    ctx.strokeStyle = trace.color;
    ctx.fillStyle = trace.color;
    ctx.lineWidth = 1;
    ctx.beginPath();
    trace.points.forEach((p, i) => {
      const [x, y] = toPixel(p, map);
      if (i === 0) ctx.moveTo(x, y);
      else ctx.lineTo(x, y);
    });
    ctx.stroke();
    if (trace.markerRadius > 0) {
      for (const p of trace.points) {
        const [x, y] = toPixel(p, map);
        ctx.fillRect(
          x - trace.markerRadius,
          y - trace.markerRadius,
          trace.markerRadius * 2,
          trace.markerRadius * 2,
        );
      }
    }
  }
}
