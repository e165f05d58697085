import { readFileSync } from 'node:fs';
import { dirname, join } from 'node:path';
import { fileURLToPath } from 'node:url';

import { FacetSelection, emptySelection } from '../src/types.js';

export function serviceBase(): string {
  const info = join(dirname(fileURLToPath(import.meta.url)), '.service-info.json');
  return (JSON.parse(readFileSync(info, 'utf-8')) as { base: string }).base;
}

/** Deterministic PRNG so the randomized suites are reproducible. */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a |= 0;
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

// value pools drawn from the fixture catalogue
const ACTIVITIES = [
  'software-implementation',
  'software-maintenance',
  'software-design',
  'software-quality-assurance',
  'requirements-engineering',
];
const TASKS = ['code generation', 'code completion', 'code review', 'coding', 'program repair'];
const LICENSES = ['mit', 'apache-2.0', 'cc-by-4.0'];
const TAGS = ['python', 'code', 'audio'];
const METADATA_KEYS = ['co2_eq_emissions', 'license', 'tags'];
const ML_TASKS = ['text-generation', 'text2text-generation', 'audio-classification'];
const BASE_MODELS = ['bigcode/starcoderbase', 'meta-llama/Llama-2-7b-hf'];
const QUERIES = ['', 'fix', 'm4', 'codegen'];

function pick<T>(rng: () => number, pool: T[]): T {
  return pool[Math.floor(rng() * pool.length)] as T;
}

function pickSome(rng: () => number, pool: string[], maxCount: number): string[] {
  const chosen = new Set<string>();
  const count = Math.floor(rng() * (maxCount + 1));
  for (let i = 0; i < count; i++) chosen.add(pick(rng, pool));
  return [...chosen].sort();
}

export function randomSelection(rng: () => number): FacetSelection {
  const selection = emptySelection();
  if (rng() < 0.7) selection.activity = pick(rng, ACTIVITIES);
  selection.tasks = pickSome(rng, TASKS, 2);
  selection.licenses = pickSome(rng, LICENSES, 2);
  selection.tags = pickSome(rng, TAGS, 2);
  selection.metadataKeys = pickSome(rng, METADATA_KEYS, 1);
  if (rng() < 0.3) selection.mlTask = pick(rng, ML_TASKS);
  if (rng() < 0.2) selection.baseModel = pick(rng, BASE_MODELS);
  selection.requiresBenchmarks = rng() < 0.25;
  if (rng() < 0.3) selection.query = pick(rng, QUERIES);
  return selection;
}

/**
 * Reference query construction, written independently of the client's
 * serializer: plain string concatenation in a fixed field order.
 */
export function referenceQuery(selection: FacetSelection): string {
  const parts: string[] = [];
  const add = (key: string, value: string) =>
    parts.push(`${key}=${encodeURIComponent(value).replace(/%20/g, '+')}`);
  if (selection.activity) add('activity', selection.activity);
  for (const t of selection.tasks) add('task', t);
  for (const l of selection.licenses) add('license', l);
  for (const t of selection.tags) add('tag', t);
  for (const k of selection.metadataKeys) add('metadata_key', k);
  if (selection.mlTask) add('ml_task', selection.mlTask);
  if (selection.baseModel) add('base_model', selection.baseModel);
  if (selection.requiresBenchmarks) add('has_benchmarks', 'true');
  if (selection.query.trim()) add('q', selection.query.trim());
  return parts.join('&');
}

export async function directFetchIds(
  base: string,
  selection: FacetSelection,
): Promise<{ total: number; ids: string[] }> {
  const qs = referenceQuery(selection);
  const sep = qs ? `${qs}&` : '';
  const ids: string[] = [];
  let cursor: string | null = null;
  let total = 0;
  do {
    const cursorPart: string = cursor ? `&cursor=${encodeURIComponent(cursor)}` : '';
    const resp = await fetch(`${base}/entries?${sep}limit=200${cursorPart}`);
    if (!resp.ok) throw new Error(`direct query failed: ${resp.status}`);
    const body = (await resp.json()) as {
      total: number;
      entries: Array<{ model_id: string }>;
      next_cursor: string | null;
    };
    total = body.total;
    ids.push(...body.entries.map((e) => e.model_id));
    cursor = body.next_cursor;
  } while (cursor !== null);
  return { total, ids };
}
