// Thin typed client over the JSON API. Keeps the raw body text of the last
// response so views can be checked byte-for-byte against the payload.

import type {
  ApiErrorBody,
  CaseDoc,
  CloseResponse,
  ConfigDoc,
  Indicators,
  ManualResult,
  MatrixEvaluation,
  ScenarioDoc,
  SessionDoc,
  SessionState,
  SituationResponse,
} from './types.js';

export class ApiError extends Error {
  constructor(
    public status: number,
    public body: ApiErrorBody,
  ) {
    super(body.message);
  }
}

export interface ManualRequest {
  matrices?: Record<string, { values: number[][]; label?: string }>;
  table?: { criteria: string[]; alternatives: string[]; rows: number[][] };
  capacity?: { criteria?: string[]; values: Record<string, number> };
  mobius?: Record<string, number>;
}

export class ApiClient {
  lastRaw = '';

  constructor(private baseUrl = '') {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      method,
      headers: body === undefined ? {} : { 'Content-Type': 'application/json' },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await response.text();
    this.lastRaw = text;
    const parsed = text ? JSON.parse(text) : null;
    if (!response.ok) {
      throw new ApiError(response.status, parsed as ApiErrorBody);
    }
    return parsed as T;
  }

  health(): Promise<{ status: string; version: string }> {
    return this.request('GET', '/api/health');
  }

  createSession(operation = '', characteristic = ''): Promise<SessionDoc> {
    return this.request('POST', '/api/sessions', { operation, characteristic });
  }

  getSession(id: number): Promise<SessionDoc> {
    return this.request('GET', `/api/sessions/${id}`);
  }

  listSessions(): Promise<{ sessions: SessionDoc[] }> {
    return this.request('GET', '/api/sessions');
  }

  submitSituation(
    id: number,
    situation: Indicators,
    objectives: Indicators,
    context?: { operation?: string; characteristic?: string },
  ): Promise<SituationResponse> {
    return this.request('POST', `/api/sessions/${id}/situation`, { ...situation, objectives, context });
  }

  decide(id: number, action: 'accept' | 'reject'): Promise<{ state: SessionState; selected_scenario?: string }> {
    return this.request('POST', `/api/sessions/${id}/decision`, { action });
  }

  manualEvaluate(id: number, body: ManualRequest): Promise<ManualResult> {
    return this.request('POST', `/api/sessions/${id}/manual`, body);
  }

  select(id: number, scenarioId: string): Promise<{ state: SessionState; selected_scenario: string }> {
    return this.request('POST', `/api/sessions/${id}/selection`, { scenario_id: scenarioId });
  }

  apply(id: number, periodT?: Record<string, unknown>): Promise<{ state: SessionState }> {
    return this.request('POST', `/api/sessions/${id}/apply`, periodT ? { period_t: periodT } : {});
  }

  recordResults(id: number, observed: Indicators): Promise<{ state: SessionState }> {
    return this.request('POST', `/api/sessions/${id}/results`, observed);
  }

  close(id: number): Promise<CloseResponse> {
    return this.request('POST', `/api/sessions/${id}/close`);
  }

  listCases(query?: Indicators): Promise<{ cases: CaseDoc[]; threshold: number }> {
    if (!query) {
      return this.request('GET', '/api/cases');
    }
    const params = new URLSearchParams({
      cp: String(query.cp),
      cpk: String(query.cpk),
      ncr: String(query.ncr),
      encr: String(query.encr),
    });
    return this.request('GET', `/api/cases?${params}`);
  }

  importCase(doc: Partial<CaseDoc>): Promise<CaseDoc> {
    return this.request('POST', '/api/cases', doc);
  }

  getConfig(): Promise<ConfigDoc> {
    return this.request('GET', '/api/config');
  }

  putConfig(update: Partial<ConfigDoc>): Promise<ConfigDoc> {
    return this.request('PUT', '/api/config', update);
  }

  listScenarios(): Promise<{ scenarios: ScenarioDoc[] }> {
    return this.request('GET', '/api/scenarios');
  }

  evaluateMatrix(values: number[][], label = ''): Promise<MatrixEvaluation> {
    return this.request('POST', '/api/mcdm/matrix', { values, label });
  }
}
