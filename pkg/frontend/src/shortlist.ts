/**
 * Client-side shortlist: an ordered list of (model id, note) pairs kept in
 * browser local storage so it survives reloads. The service stays read-only.
 */

import { ShortlistItem } from './types.js';

const STORAGE_KEY = 'ptmcat.shortlist.v1';

export interface KeyValueStore {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
}

export class Shortlist {
  private items: ShortlistItem[] = [];

  constructor(private store: KeyValueStore) {
    const raw = store.getItem(STORAGE_KEY);
    if (raw) {
      try {
        const parsed = JSON.parse(raw) as ShortlistItem[];
        if (Array.isArray(parsed)) this.items = parsed.filter((x) => typeof x?.modelId === 'string');
      } catch {
        this.items = [];
      }
    }
  }

  list(): readonly ShortlistItem[] {
    return this.items;
  }

  has(modelId: string): boolean {
    return this.items.some((item) => item.modelId === modelId);
  }

  /** Adds once; repeated adds update nothing and keep the original position. */
  add(modelId: string, note = ''): boolean {
    if (this.has(modelId)) return false;
    this.items.push({ modelId, note });
    this.persist();
    return true;
  }

  setNote(modelId: string, note: string): void {
    const item = this.items.find((x) => x.modelId === modelId);
    if (item) {
      item.note = note;
      this.persist();
    }
  }

  remove(modelId: string): void {
    this.items = this.items.filter((x) => x.modelId !== modelId);
    this.persist();
  }

  private persist(): void {
    this.store.setItem(STORAGE_KEY, JSON.stringify(this.items));
  }
}
