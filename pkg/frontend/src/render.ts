/** DOM rendering for the explorer: facet sidebar, results, compare drawer. */

import { CompareTable, differingRows } from './compare.js';
import { Shortlist } from './shortlist.js';
import { ExplorerState } from './state.js';
import { Entry } from './types.js';

const FACET_ORDER: Array<[string, string]> = [
  ['activity', 'Activity'],
  ['task', 'Task'],
  ['ml_task', 'ML task'],
  ['license', 'License'],
  ['tag', 'Tag'],
  ['base_model', 'Base model'],
  ['benchmark', 'Benchmark'],
  ['metadata_key', 'Metadata key'],
];

const MULTI_FIELD: Record<string, 'tasks' | 'licenses' | 'tags' | 'metadataKeys'> = {
  task: 'tasks',
  license: 'licenses',
  tag: 'tags',
  metadata_key: 'metadataKeys',
};

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderApp(
  root: HTMLElement,
  state: ExplorerState,
  shortlist: Shortlist,
  actions: {
    onCompare: (ids: string[]) => void;
  },
): void {
  root.replaceChildren();

  if (state.error) {
    const banner = el('div', 'banner error');
    banner.append(
      el('span', '', `Service unreachable (${state.error}); showing the last loaded view. `),
    );
    const retry = el('button', '', 'Retry');
    retry.addEventListener('click', () => void state.refresh());
    banner.append(retry);
    root.append(banner);
  } else if (state.viewIsStale() || state.loading) {
    root.append(el('div', 'banner', 'Loading…'));
  }

  const layout = el('div', 'layout');
  layout.append(renderSidebar(state));
  layout.append(renderResults(state, shortlist, actions));
  layout.append(renderShortlistPanel(shortlist, actions));
  root.append(layout);
}

function renderSidebar(state: ExplorerState): HTMLElement {
  const side = el('aside', 'facets');
  const search = el('input') as HTMLInputElement;
  search.placeholder = 'filter model ids…';
  search.value = state.selection.query;
  search.addEventListener('change', () => {
    void state.applySelection({ ...state.selection, query: search.value });
  });
  side.append(search);

  const clear = el('button', 'clear', 'Clear all facets');
  clear.addEventListener('click', () => void state.clearAll());
  side.append(clear);

  const benchToggle = el('label', 'facet-toggle');
  const box = el('input') as HTMLInputElement;
  box.type = 'checkbox';
  box.checked = state.selection.requiresBenchmarks;
  box.addEventListener('change', () => {
    void state.applySelection({ ...state.selection, requiresBenchmarks: box.checked });
  });
  benchToggle.append(box, el('span', '', ' has benchmark table'));
  side.append(benchToggle);

  const facets = state.view?.facets.facets ?? {};
  for (const [key, label] of FACET_ORDER) {
    const values = facets[key] ?? {};
    const names = Object.keys(values).sort();
    if (!names.length) continue;
    const group = el('div', 'facet-group');
    group.append(el('h3', '', label));
    for (const name of names) {
      const row = el('div', 'facet-value');
      const button = el('button', '', `${name}`);
      // the retained count is what makes the next narrowing step decidable
      const count = el('span', 'count', String(values[name]));
      if (isSelected(state, key, name)) button.classList.add('selected');
      button.addEventListener('click', () => void toggleFacet(state, key, name));
      row.append(button, count);
      group.append(row);
    }
    side.append(group);
  }
  return side;
}

function isSelected(state: ExplorerState, facet: string, value: string): boolean {
  const s = state.selection;
  if (facet === 'activity') return s.activity === value;
  if (facet === 'ml_task') return s.mlTask === value;
  if (facet === 'base_model') return s.baseModel === value;
  if (facet === 'benchmark') return false;
  const field = MULTI_FIELD[facet];
  return field ? s[field].includes(value) : false;
}

async function toggleFacet(state: ExplorerState, facet: string, value: string): Promise<void> {
  const s = state.selection;
  if (facet === 'activity') return state.setActivity(s.activity === value ? null : value);
  if (facet === 'ml_task') return state.applySelection({ ...s, mlTask: s.mlTask === value ? null : value });
  if (facet === 'base_model')
    return state.applySelection({ ...s, baseModel: s.baseModel === value ? null : value });
  if (facet === 'benchmark') return state.applySelection({ ...s, requiresBenchmarks: true });
  const field = MULTI_FIELD[facet];
  if (field) return state.toggleMulti(field, value);
}

function renderResults(
  state: ExplorerState,
  shortlist: Shortlist,
  actions: { onCompare: (ids: string[]) => void },
): HTMLElement {
  const main = el('main', 'results');
  const view = state.view;
  if (!view) {
    main.append(el('p', '', state.loading ? 'Loading…' : 'No data yet.'));
    return main;
  }
  main.append(el('h2', '', `${view.page.total} matching models`));
  const list = el('ul', 'entries');
  for (const entry of view.page.entries) {
    list.append(renderEntry(entry, shortlist, state));
  }
  main.append(list);

  const pager = el('div', 'pager');
  const prev = el('button', '', '← prev');
  prev.disabled = state.cursorTrail.length === 0;
  prev.addEventListener('click', () => void state.prevPage());
  const next = el('button', '', 'next →');
  next.disabled = view.page.next_cursor === null;
  next.addEventListener('click', () => void state.nextPage());
  pager.append(prev, next);
  main.append(pager);

  const compare = el('button', 'compare', 'Compare shortlist (2–4)');
  compare.disabled = shortlist.list().length < 2 || shortlist.list().length > 4;
  compare.addEventListener('click', () => actions.onCompare(shortlist.list().map((x) => x.modelId)));
  main.append(compare);
  return main;
}

function renderEntry(entry: Entry, shortlist: Shortlist, state: ExplorerState): HTMLElement {
  const item = el('li', 'entry');
  item.append(el('strong', '', entry.model_id));
  item.append(el('div', 'meta', `activities: ${entry.activities.join(', ') || '—'}`));
  item.append(el('div', 'meta', `tasks: ${entry.tasks.join(', ') || '—'}`));
  item.append(
    el(
      'div',
      'meta',
      `license: ${entry.license ?? '—'} · ml task: ${entry.ml_task ?? '—'} · benchmarks: ${
        entry.benchmarks.join(', ') || '—'
      }`,
    ),
  );
  const add = el('button', '', shortlist.has(entry.model_id) ? 'In shortlist' : 'Add to shortlist');
  add.disabled = shortlist.has(entry.model_id);
  add.addEventListener('click', () => {
    shortlist.add(entry.model_id);
    state.refresh();
  });
  item.append(add);
  return item;
}

function renderShortlistPanel(
  shortlist: Shortlist,
  actions: { onCompare: (ids: string[]) => void },
): HTMLElement {
  const panel = el('aside', 'shortlist');
  panel.append(el('h3', '', 'Shortlist'));
  const list = el('ul');
  for (const item of shortlist.list()) {
    const row = el('li');
    row.append(el('span', '', item.modelId));
    const note = el('input') as HTMLInputElement;
    note.placeholder = 'note…';
    note.value = item.note;
    note.addEventListener('change', () => shortlist.setNote(item.modelId, note.value));
    const remove = el('button', '', '✕');
    remove.addEventListener('click', () => {
      shortlist.remove(item.modelId);
      row.remove();
    });
    row.append(note, remove);
    list.append(row);
  }
  panel.append(list);
  return panel;
}

export function renderCompareTable(root: HTMLElement, table: CompareTable): void {
  root.replaceChildren();
  const highlight = differingRows(table);
  const grid = el('table', 'compare');
  const head = el('tr');
  head.append(el('th', '', 'attribute'));
  for (const column of table.columns) {
    head.append(el('th', column.found ? '' : 'missing', column.modelId));
  }
  grid.append(head);
  for (const row of table.rows) {
    const tr = el('tr', highlight.has(row) ? 'differs' : '');
    tr.append(el('th', '', row));
    for (const column of table.columns) {
      tr.append(el('td', column.found ? '' : 'missing', column.values[row] ?? '—'));
    }
    grid.append(tr);
  }
  root.append(grid);
}
