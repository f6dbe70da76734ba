// DOM wiring: series picker, pan/zoom canvas, stats panel, raw overlay.

import { ApiClient, QueryResponse, SeriesEntry } from './api.js';
import { drawTraces, mappingFor } from './chart.js';
import { ChartController } from './controller.js';
import { renderStats } from './stats.js';
import {
  clampTo,
  fullExtent,
  panBy,
  QueryMode,
  ViewportState,
  zoomAt,
} from './viewport.js';

const BUCKET_PX = 1;
const MAIN_COLOR = '#4cc1ff';
const OVERLAY_COLOR = 'rgba(255, 176, 76, 0.55)';

const api = new ApiClient(new URLSearchParams(location.search).get('api') ?? '');

const picker = document.querySelector<HTMLSelectElement>('#series')!;
const modeSelect = document.querySelector<HTMLSelectElement>('#mode')!;
const overlayToggle = document.querySelector<HTMLInputElement>('#overlay')!;
const statsRoot = document.querySelector<HTMLElement>('#stats')!;
const errorBar = document.querySelector<HTMLElement>('#error')!;
const emptyState = document.querySelector<HTMLElement>('#empty')!;
const canvas = document.querySelector<HTMLCanvasElement>('#chart')!;
const ctx = canvas.getContext('2d')!;

let entries: SeriesEntry[] = [];
let state: ViewportState | null = null;
let extent: [number, number] = [0, 1];
let lastMain: QueryResponse | null = null;
let lastOverlay: QueryResponse | null = null;

const controller = new ChartController(api, { bucketPx: BUCKET_PX });
const overlayController = new ChartController(api, {
  bucketPx: BUCKET_PX,
  modeOverride: 'raw',
});

controller.onData = (response) => {
  errorBar.hidden = true;
  lastMain = response;
  renderStats(statsRoot, response.meta);
  redraw();
};
controller.onError = showError;
overlayController.onData = (response) => {
  lastOverlay = response;
  redraw();
};
overlayController.onError = showError;

function showError(error: unknown): void {
  errorBar.textContent = String(error instanceof Error ? error.message : error);
  errorBar.hidden = false; // chart keeps its last good frame
}

function redraw(): void {
  if (!lastMain || !state) return;
  const map = mappingFor(lastMain, state.pixelWidth, state.pixelHeight);
  if (!map) {
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    return;
  }
  const traces = [{ points: lastMain.points, color: MAIN_COLOR, markerRadius: 1.5 }];
  if (state.overlayRaw && lastOverlay) {
    traces.unshift({ points: lastOverlay.points, color: OVERLAY_COLOR, markerRadius: 1 });
  }
  drawTraces(ctx, map, traces);
}

function requery(): void {
  if (!state) return;
  controller.request(state);
  if (state.overlayRaw) overlayController.request(state);
  else lastOverlay = null;
}

function setViewport(next: ViewportState): void {
  state = clampTo(next, extent);
  requery();
}

function syncCanvasSize(): void {
  const rect = canvas.getBoundingClientRect();
  canvas.width = Math.max(1, Math.round(rect.width));
  canvas.height = Math.max(1, Math.round(rect.height));
  if (state) {
    setViewport({ ...state, pixelWidth: canvas.width, pixelHeight: canvas.height });
  }
}

function selectSeries(entry: SeriesEntry): void {
  extent = fullExtent(entry);
  lastMain = lastOverlay = null;
  setViewport({
    seriesId: entry.series_id,
    tFrom: extent[0],
    tTo: extent[1],
    pixelWidth: canvas.width,
    pixelHeight: canvas.height,
    mode: modeSelect.value as QueryMode,
    overlayRaw: overlayToggle.checked,
  });
  controller.flush(); // exactly one immediate request per selection change
}

picker.addEventListener('change', () => {
  const entry = entries.find((e) => e.series_id === picker.value);
  if (entry) selectSeries(entry);
});

modeSelect.addEventListener('change', () => {
  if (state) setViewport({ ...state, mode: modeSelect.value as QueryMode });
});

overlayToggle.addEventListener('change', () => {
  if (state) setViewport({ ...state, overlayRaw: overlayToggle.checked });
});

canvas.addEventListener('wheel', (event) => {
  if (!state) return;
  event.preventDefault();
  const rect = canvas.getBoundingClientRect();
  const fraction = (event.clientX - rect.left) / rect.width;
  const tCursor = state.tFrom + fraction * (state.tTo - state.tFrom);
  const factor = event.deltaY > 0 ? 1.25 : 0.8;
  setViewport(zoomAt(state, factor, tCursor));
});

let dragX: number | null = null;
canvas.addEventListener('mousedown', (event) => {
  dragX = event.clientX;
});
window.addEventListener('mouseup', () => {
  dragX = null;
});
window.addEventListener('mousemove', (event) => {
  if (dragX === null || !state) return;
  const dx = event.clientX - dragX;
  dragX = event.clientX;
  setViewport(panBy(state, -dx / canvas.width));
});

new ResizeObserver(syncCanvasSize).observe(canvas);

async function boot(): Promise<void> {
  syncCanvasSize();
  try {
    entries = await api.listSeries();
  } catch (error) {
    showError(error);
    return;
  }
  if (entries.length === 0) {
    emptyState.hidden = false;
    return;
  }
  emptyState.hidden = true;
  picker.replaceChildren(
    ...entries.map((e) => new Option(`${e.series_id} (${e.raw_count} pts)`, e.series_id)),
  );
  selectSeries(entries[0]);
}

void boot();
