// Maps session states to screens and to the action buttons that are legal
// there. Buttons never offer a transition the service would reject.

import type { SessionState } from './types.js';

export type Screen =
  | 'situation-entry'
  | 'recommendation'
  | 'manual-evaluation'
  | 'manual-results'
  | 'apply'
  | 'outcome-entry'
  | 'close'
  | 'closed';

export interface Action {
  id: string;
  label: string;
  /** Workflow operation the button triggers; must be legal in the state.
   * 'view' marks read-only actions (no transition), always legal. */
  op: 'situation' | 'decision' | 'manual' | 'selection' | 'apply' | 'results' | 'close' | 'view';
}

export function screenFor(state: SessionState): Screen {
  switch (state) {
    case 'Created':
    case 'SituationEntered':
      return 'situation-entry';
    case 'AutoRecommended':
      return 'recommendation';
    case 'ManualRequired':
      return 'manual-evaluation';
    case 'ManualEvaluated':
      return 'manual-results';
    case 'ScenarioSelected':
      return 'apply';
    case 'Applied':
      return 'outcome-entry';
    case 'ResultsRecorded':
      return 'close';
    case 'Closed':
      return 'closed';
  }
}

export function actionsFor(state: SessionState): Action[] {
  switch (state) {
    case 'Created':
      return [{ id: 'submit-situation', label: 'Submit', op: 'situation' }];
    case 'AutoRecommended':
      return [
        { id: 'agree', label: 'Agree', op: 'decision' },
        { id: 'view-details', label: 'View case details', op: 'view' },
        { id: 'manual-choice', label: 'Manual choice', op: 'decision' },
      ];
    case 'ManualRequired':
      return [{ id: 'evaluate', label: 'Evaluate', op: 'manual' }];
    case 'ManualEvaluated':
      return [
        { id: 'agree', label: 'Agree', op: 'selection' },
        { id: 'back-to-manual', label: 'Back to manual choice', op: 'manual' },
      ];
    case 'ScenarioSelected':
      return [{ id: 'apply', label: 'Apply', op: 'apply' }];
    case 'Applied':
      return [{ id: 'record-results', label: 'Record results', op: 'results' }];
    case 'ResultsRecorded':
      return [{ id: 'close', label: 'Close session', op: 'close' }];
    case 'SituationEntered':
    case 'Closed':
      return [];
  }
}

/** Operations the service accepts in each state (the workflow edge set). */
export const LEGAL_OPS: Record<SessionState, Action['op'][]> = {
  Created: ['situation'],
  SituationEntered: [],
  AutoRecommended: ['decision'],
  ManualRequired: ['manual'],
  ManualEvaluated: ['selection', 'manual'],
  ScenarioSelected: ['apply'],
  Applied: ['results'],
  ResultsRecorded: ['close'],
  Closed: [],
};
