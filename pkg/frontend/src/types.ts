/** Shared types mirroring the catalogue service's JSON wire format. */

export interface FacetSelection {
  activity: string | null;
  tasks: string[];
  licenses: string[];
  tags: string[];
  metadataKeys: string[];
  mlTask: string | null;
  baseModel: string | null;
  requiresBenchmarks: boolean;
  query: string;
}

export function emptySelection(): FacetSelection {
  return {
    activity: null,
    tasks: [],
    licenses: [],
    tags: [],
    metadataKeys: [],
    mlTask: null,
    baseModel: null,
    requiresBenchmarks: false,
    query: '',
  };
}

export interface DocStatus {
  card: string;
  abstract_with_se: boolean;
}

export interface Entry {
  model_id: string;
  created_at: string | null;
  activities: string[];
  tasks: string[];
  ml_task: string | null;
  license: string | null;
  base_model: string | null;
  declared_datasets: string[];
  benchmarks: string[];
  duplicate_role: { kind: string; original_of: string | null };
  doc_status: DocStatus | null;
  tags: string[];
  metadata_keys: string[];
}

export interface EntryDetail extends Entry {
  variants: Array<[string, number]>;
}

export interface EntriesPage {
  total: number;
  entries: Entry[];
  next_cursor: string | null;
}

export interface FacetCounts {
  total: number;
  facets: Record<string, Record<string, number>>;
}

export interface ShortlistItem {
  modelId: string;
  note: string;
}
