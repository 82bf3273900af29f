// Capacity form model: direct subset values, or the 2-additive Moebius form
// (singleton masses plus pairwise interaction masses). Validation happens
// server-side; this module only assembles request bodies and subset keys in
// the canonical order the service uses.

import type { ManualRequest } from './api.js';

/** Subset keys in mask order: names joined by commas, criteria order. */
export function subsetKeys(criteria: string[]): string[] {
  const keys: string[] = [];
  for (let mask = 0; mask < 1 << criteria.length; mask += 1) {
    keys.push(keyOf(criteria, mask));
  }
  return keys;
}

function keyOf(criteria: string[], mask: number): string {
  return criteria.filter((_, i) => mask & (1 << i)).join(',');
}

export function pairKeys(criteria: string[]): string[] {
  const keys: string[] = [];
  for (let i = 0; i < criteria.length; i += 1) {
    for (let j = i + 1; j < criteria.length; j += 1) {
      keys.push(`${criteria[i]},${criteria[j]}`);
    }
  }
  return keys;
}

export type CapacityMode = 'direct' | 'mobius';

export interface CapacityDraft {
  mode: CapacityMode;
  /** direct mode: proper non-empty subset key -> value in [0,1] */
  values: Record<string, number>;
  /** mobius mode: singleton and pair key -> mass */
  masses: Record<string, number>;
}

export function emptyDraft(criteria: string[]): CapacityDraft {
  const values: Record<string, number> = {};
  for (const key of subsetKeys(criteria)) {
    if (key !== '' && key.split(',').length < criteria.length) {
      values[key] = 0;
    }
  }
  const masses: Record<string, number> = {};
  for (const name of criteria) {
    masses[name] = 1 / criteria.length;
  }
  for (const key of pairKeys(criteria)) {
    masses[key] = 0;
  }
  return { mode: 'direct', values, masses };
}

/** The capacity part of a manual-evaluation request body. */
export function capacityBody(draft: CapacityDraft, criteria: string[]): Pick<ManualRequest, 'capacity' | 'mobius'> {
  if (draft.mode === 'mobius') {
    const mobius: Record<string, number> = {};
    for (const [key, mass] of Object.entries(draft.masses)) {
      if (mass !== 0 || key.split(',').length === 1) {
        mobius[key] = mass;
      }
    }
    return { mobius };
  }
  const values: Record<string, number> = { '': 0 };
  for (const key of subsetKeys(criteria)) {
    if (key === '') {
      continue;
    }
    values[key] = key.split(',').length === criteria.length ? 1 : (draft.values[key] ?? 0);
  }
  return { capacity: { criteria, values } };
}
