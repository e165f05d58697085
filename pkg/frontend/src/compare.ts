/**
 * Side-by-side comparison model: 2..4 entries aligned per attribute row,
 * with missing attributes and unknown ids rendered as explicit absences.
 */

import { ApiClient } from './api.js';
import { EntryDetail } from './types.js';

export const ABSENT = '—';

export interface CompareColumn {
  modelId: string;
  found: boolean;
  values: Record<string, string>;
}

export interface CompareTable {
  rows: string[];
  columns: CompareColumn[];
}

export const COMPARE_ROWS = [
  'license',
  'activities',
  'tasks',
  'base model',
  'datasets',
  'benchmarks',
  'created',
] as const;

function joinOrAbsent(values: string[]): string {
  return values.length ? [...values].sort().join(', ') : ABSENT;
}

export function columnFor(modelId: string, detail: EntryDetail | null): CompareColumn {
  if (detail === null) {
    const values: Record<string, string> = {};
    for (const row of COMPARE_ROWS) values[row] = 'not found';
    return { modelId, found: false, values };
  }
  return {
    modelId,
    found: true,
    values: {
      license: detail.license ?? ABSENT,
      activities: joinOrAbsent(detail.activities),
      tasks: joinOrAbsent(detail.tasks),
      'base model': detail.base_model ?? ABSENT,
      datasets: joinOrAbsent(detail.declared_datasets),
      benchmarks: joinOrAbsent(detail.benchmarks),
      created: detail.created_at ? detail.created_at.slice(0, 10) : ABSENT,
    },
  };
}

export async function buildCompareTable(client: ApiClient, modelIds: string[]): Promise<CompareTable> {
  if (modelIds.length < 2 || modelIds.length > 4) {
    throw new Error(`comparison takes 2 to 4 ids, got ${modelIds.length}`);
  }
  const details = await Promise.all(modelIds.map((id) => client.fetchEntry(id)));
  return {
    rows: [...COMPARE_ROWS],
    columns: modelIds.map((id, i) => columnFor(id, details[i] ?? null)),
  };
}

/** Rows where at least two found columns disagree, for highlighting. */
export function differingRows(table: CompareTable): Set<string> {
  const differing = new Set<string>();
  for (const row of table.rows) {
    const seen = new Set(
      table.columns.filter((c) => c.found).map((c) => c.values[row] ?? ABSENT),
    );
    if (seen.size > 1) differing.add(row);
  }
  return differing;
}
