/**
 * Lossless two-way mapping between a FacetSelection and URL query
 * parameters. The same parameter names the service understands are used in
 * the page URL, so a view is shareable by copying the address bar.
 */

import { FacetSelection, emptySelection } from './types.js';

const MULTI_KEYS: Array<[keyof FacetSelection, string]> = [
  ['tasks', 'task'],
  ['licenses', 'license'],
  ['tags', 'tag'],
  ['metadataKeys', 'metadata_key'],
];

export function selectionToParams(selection: FacetSelection): URLSearchParams {
  const params = new URLSearchParams();
  if (selection.activity) params.set('activity', selection.activity);
  for (const [field, key] of MULTI_KEYS) {
    for (const value of [...(selection[field] as string[])].sort()) {
      params.append(key, value);
    }
  }
  if (selection.mlTask) params.set('ml_task', selection.mlTask);
  if (selection.baseModel) params.set('base_model', selection.baseModel);
  if (selection.requiresBenchmarks) params.set('has_benchmarks', 'true');
  if (selection.query.trim()) params.set('q', selection.query.trim());
  params.sort();
  return params;
}

export function paramsToSelection(params: URLSearchParams): FacetSelection {
  const selection = emptySelection();
  selection.activity = params.get('activity');
  for (const [field, key] of MULTI_KEYS) {
    (selection[field] as string[]) = params.getAll(key).sort();
  }
  selection.mlTask = params.get('ml_task');
  selection.baseModel = params.get('base_model');
  selection.requiresBenchmarks = params.get('has_benchmarks') === 'true';
  selection.query = params.get('q') ?? '';
  return selection;
}

/** Canonical string form; equal selections produce equal strings. */
export function selectionKey(selection: FacetSelection): string {
  return selectionToParams(selection).toString();
}
