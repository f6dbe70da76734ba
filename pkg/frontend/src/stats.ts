// Stats panel: the numbers an operator watches while steering the viewport.

import type { QueryMeta } from './api.js';

export interface StatsView {
  path: string;
  fetched: string;
  returned: string;
  bound: string;
  elapsed: string;
}

export function formatStats(meta: QueryMeta): StatsView {
  return {
    path: meta.path,
    fetched: meta.points_fetched.toLocaleString('en-US'),
    returned: meta.points_returned.toLocaleString('en-US'),
    bound: meta.distance_bound.toFixed(4),
    elapsed: `${meta.elapsed_ms.toFixed(1)} ms`,
  };
}

export function renderStats(root: HTMLElement, meta: QueryMeta): void {
  const view = formatStats(meta);
  const set = (name: string, value: string) => {
    const el = root.querySelector<HTMLElement>(`[data-stat="${name}"]`);
    if (el) el.textContent = value;
  };
  set('path', view.path);
  set('fetched', view.fetched);
  set('returned', view.returned);
  set('bound', view.bound);
  set('elapsed', view.elapsed);
  const badge = root.querySelector<HTMLElement>('[data-stat="path"]');
  if (badge) badge.dataset.path = meta.path;
}
