/**
 * Explorer state: the current facet selection (mirrored into the page URL),
 * the last successfully fetched view (kept for the retry banner), and the
 * result refresh loop. Rendering subscribes to change events.
 */

import { ApiClient } from './api.js';
import { paramsToSelection, selectionKey, selectionToParams } from './facetUrl.js';
import { EntriesPage, FacetCounts, FacetSelection, emptySelection } from './types.js';

export interface View {
  selection: FacetSelection;
  page: EntriesPage;
  facets: FacetCounts;
  cursorTrail: string[];
}

export type Listener = (state: ExplorerState) => void;

export class ExplorerState {
  selection: FacetSelection = emptySelection();
  view: View | null = null;
  lastGoodView: View | null = null;
  error: string | null = null;
  loading = false;
  cursorTrail: string[] = [];
  pageSize = 20;

  private listeners: Listener[] = [];
  private refreshToken = 0;

  constructor(private client: ApiClient) {}

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this);
  }

  /** Restore a selection from URL query parameters (shareable links). */
  restoreFromUrl(search: string): void {
    this.selection = paramsToSelection(new URLSearchParams(search));
  }

  urlQueryString(): string {
    return selectionToParams(this.selection).toString();
  }

  async applySelection(selection: FacetSelection): Promise<void> {
    this.selection = selection;
    this.cursorTrail = [];
    await this.refresh();
  }

  async toggleMulti(field: 'tasks' | 'licenses' | 'tags' | 'metadataKeys', value: string): Promise<void> {
    const current = new Set(this.selection[field]);
    if (current.has(value)) current.delete(value);
    else current.add(value);
    await this.applySelection({ ...this.selection, [field]: [...current].sort() });
  }

  async setActivity(activity: string | null): Promise<void> {
    await this.applySelection({ ...this.selection, activity });
  }

  async clearAll(): Promise<void> {
    await this.applySelection(emptySelection());
  }

  async nextPage(): Promise<void> {
    const cursor = this.view?.page.next_cursor;
    if (!cursor) return;
    this.cursorTrail.push(cursor);
    await this.refresh();
  }

  async prevPage(): Promise<void> {
    if (!this.cursorTrail.length) return;
    this.cursorTrail.pop();
    await this.refresh();
  }

  async refresh(): Promise<void> {
    const token = ++this.refreshToken;
    this.loading = true;
    this.error = null;
    this.emit();
    const cursor = this.cursorTrail[this.cursorTrail.length - 1] ?? null;
    try {
      const [page, facets] = await Promise.all([
        this.client.fetchEntries(this.selection, cursor, this.pageSize),
        this.client.fetchFacets(this.selection),
      ]);
      if (token !== this.refreshToken) return; // superseded by a newer refresh
      this.view = { selection: this.selection, page, facets, cursorTrail: [...this.cursorTrail] };
      this.lastGoodView = this.view;
      this.loading = false;
      this.emit();
    } catch (err) {
      if (token !== this.refreshToken) return;
      if ((err as Error).name === 'AbortError') return;
      this.loading = false;
      this.error = (err as Error).message || 'service unavailable';
      this.view = this.lastGoodView; // keep showing the cached view
      this.emit();
    }
  }

  /** True when the shown view lags behind the wanted selection (retry banner). */
  viewIsStale(): boolean {
    return this.view !== null && selectionKey(this.view.selection) !== selectionKey(this.selection);
  }
}
