// Wire types mirroring the API documents. The UI never computes scores,
// distances or consistency ratios itself; every numeric comes from these
// payloads (single source of truth).

export type SessionState =
  | 'Created'
  | 'SituationEntered'
  | 'AutoRecommended'
  | 'ManualRequired'
  | 'ManualEvaluated'
  | 'ScenarioSelected'
  | 'Applied'
  | 'ResultsRecorded'
  | 'Closed';

export interface Indicators {
  cp: number;
  cpk: number;
  ncr: number;
  encr: number;
}

export interface Recommendation {
  scenario: string;
  distance: number;
  source_case: number;
}

export interface RankedRow {
  alternative: string;
  score: number;
  rank: number;
}

export interface ManualResult {
  state: SessionState;
  criteria: string[];
  alternatives: string[];
  table: number[][];
  ranking: RankedRow[];
  best: string;
  warnings: string[];
}

export interface TransitionDoc {
  from: SessionState;
  to: SessionState;
  op: string;
  at: string;
  details: Record<string, unknown>;
}

export interface SessionDoc {
  id: number;
  context: { operation: string; characteristic: string };
  state: SessionState;
  situation: Indicators | null;
  objectives: Indicators | null;
  recommendation: Recommendation | null;
  manual: {
    capacity: CapacityDoc;
    table: TableDoc;
    ranking: RankedRow[];
    best: string;
    matrices: Record<string, MatrixDoc> | null;
    warnings: string[];
  } | null;
  selected_scenario: string | null;
  selection_source: string | null;
  observed: Indicators | null;
  period_t: Record<string, unknown> | null;
  predecessor_id: number | null;
  successor_id: number | null;
  case_id: number | null;
  audit_trail: TransitionDoc[];
  created_at: string;
  closed_at: string | null;
}

export interface SituationResponse {
  state: SessionState;
  recommendation?: Recommendation;
  warnings?: string[];
}

export interface CloseResponse {
  state: SessionState;
  status: 'satisfactory' | 'failed';
  outcome: string;
  case_id: number;
  threshold_change?: { from: number; to: number };
  successor_id?: number;
}

export interface CaseDoc {
  id: number;
  operation: string;
  characteristic: string;
  situation: Indicators;
  scenario_id: string;
  objectives: Indicators;
  observed: Indicators | null;
  origin: 'manual' | 'automatic';
  status: 'provisional' | 'satisfactory' | 'failed';
  retrieval_distance: number | null;
  created_at: string;
  closed_at: string | null;
  distance?: number;
}

export interface ConfigDoc {
  threshold: number;
  order_p: number;
  attribute_weights: number[];
  repair_delta: number;
  criteria?: string[];
}

export interface ScenarioDoc {
  id: string;
  name: string;
  description: string;
  parameters: Record<string, string>;
}

export interface CapacityDoc {
  criteria?: string[];
  values: Record<string, number>;
}

export interface TableDoc {
  criteria: string[];
  alternatives: string[];
  rows: number[][];
}

export interface MatrixDoc {
  label?: string;
  values: number[][];
}

export interface MatrixEvaluation {
  valid: boolean;
  issues: string[];
  warnings: string[];
  weights?: number[];
  method?: string;
  consistency_ratio?: number | null;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  details: unknown[];
}
