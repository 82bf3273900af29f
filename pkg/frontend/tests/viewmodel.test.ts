import { describe, expect, it } from 'vitest';

import type { SessionState } from '../src/types.js';
import { LEGAL_OPS, actionsFor, screenFor } from '../src/viewmodel.js';

const STATES: SessionState[] = [
  'Created',
  'SituationEntered',
  'AutoRecommended',
  'ManualRequired',
  'ManualEvaluated',
  'ScenarioSelected',
  'Applied',
  'ResultsRecorded',
  'Closed',
];

describe('screenFor', () => {
  it('routes every state to a screen', () => {
    for (const state of STATES) {
      expect(screenFor(state)).toBeTruthy();
    }
    expect(screenFor('ManualRequired')).toBe('manual-evaluation');
    expect(screenFor('AutoRecommended')).toBe('recommendation');
  });
});

describe('actionsFor', () => {
  it('only offers operations that are legal in the state', () => {
    for (const state of STATES) {
      for (const action of actionsFor(state)) {
        if (action.op === 'view') {
          continue; // read-only, never a transition
        }
        expect(LEGAL_OPS[state]).toContain(action.op);
      }
    }
  });

  it('shows the three-button bar on a recommendation', () => {
    const labels = actionsFor('AutoRecommended').map((a) => a.label);
    expect(labels).toEqual(['Agree', 'View case details', 'Manual choice']);
  });

  it('offers agree and back-to-manual after an evaluation', () => {
    const labels = actionsFor('ManualEvaluated').map((a) => a.label);
    expect(labels).toEqual(['Agree', 'Back to manual choice']);
  });

  it('renders nothing actionable on closed sessions', () => {
    expect(actionsFor('Closed')).toEqual([]);
  });
});
