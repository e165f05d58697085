/**
 * Thin client for the read-only catalogue service. Every count and entry
 * shown in the UI comes from these calls; the UI holds no filter logic of
 * its own. In-flight requests are aborted when a newer one supersedes them.
 */

import { selectionToParams } from './facetUrl.js';
import { EntriesPage, EntryDetail, FacetCounts, FacetSelection } from './types.js';

export class ApiClient {
  private readonly base: string;
  private controllers = new Map<string, AbortController>();

  constructor(baseUrl: string) {
    this.base = baseUrl.replace(/\/$/, '');
  }

  entriesUrl(selection: FacetSelection, cursor?: string | null, limit?: number): string {
    const params = selectionToParams(selection);
    if (cursor) params.set('cursor', cursor);
    if (limit) params.set('limit', String(limit));
    const qs = params.toString();
    return `${this.base}/entries${qs ? '?' + qs : ''}`;
  }

  facetsUrl(selection: FacetSelection): string {
    const qs = selectionToParams(selection).toString();
    return `${this.base}/facets${qs ? '?' + qs : ''}`;
  }

  async fetchEntries(selection: FacetSelection, cursor?: string | null, limit?: number): Promise<EntriesPage> {
    return this.getJson(this.entriesUrl(selection, cursor, limit), 'entries');
  }

  /** Follows pagination cursors until the full id list is assembled. */
  async fetchAllIds(selection: FacetSelection): Promise<{ total: number; ids: string[] }> {
    const ids: string[] = [];
    let cursor: string | null = null;
    let total = 0;
    do {
      const page: EntriesPage = await this.fetchEntries(selection, cursor, 200);
      total = page.total;
      ids.push(...page.entries.map((e) => e.model_id));
      cursor = page.next_cursor;
    } while (cursor !== null);
    return { total, ids };
  }

  async fetchFacets(selection: FacetSelection): Promise<FacetCounts> {
    return this.getJson(this.facetsUrl(selection), 'facets');
  }

  async fetchEntry(modelId: string): Promise<EntryDetail | null> {
    const url = `${this.base}/entries/${encodeURIComponent(modelId)}`;
    const resp = await fetch(url);
    if (resp.status === 404) return null;
    if (!resp.ok) throw new Error(`service returned ${resp.status} for ${url}`);
    return (await resp.json()) as EntryDetail;
  }

  async fetchAnalytics(name: 'quarterly' | 'classification' | 'attributes'): Promise<unknown> {
    return this.getJson(`${this.base}/analytics/${name}`, `analytics-${name}`);
  }

  async fetchStageReport(): Promise<{ counts: Array<[string, number]> }> {
    return this.getJson(`${this.base}/stats/stages`, 'stages');
  }

  /** GET with per-channel cancellation: a new call aborts the previous one. */
  private async getJson<T>(url: string, channel: string): Promise<T> {
    this.controllers.get(channel)?.abort();
    const controller = new AbortController();
    this.controllers.set(channel, controller);
    const resp = await fetch(url, { signal: controller.signal });
    if (!resp.ok) {
      throw new Error(`service returned ${resp.status} for ${url}`);
    }
    return (await resp.json()) as T;
  }
}
