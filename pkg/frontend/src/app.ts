// Single-page console over the planning service. Optimistic UI is disabled:
// every transition round-trips to the server and the screen re-renders from
// the fresh session document.

import { ApiClient, ApiError, type ManualRequest } from './api.js';
import { capacityBody, emptyDraft, pairKeys, subsetKeys, type CapacityDraft } from './capacity.js';
import { identityMatrix } from './matrix.js';
import {
  el,
  readIndicators,
  renderCaseBrowser,
  renderError,
  renderMatrixEditor,
  renderOutcomeForm,
  renderRankedTable,
  renderRecommendation,
  renderSessionSummary,
  renderSettings,
  renderSituationForm,
  saatyDatalist,
  updateCrBadge,
} from './render.js';
import type { CaseDoc, ConfigDoc, ScenarioDoc, SessionDoc } from './types.js';
import { screenFor } from './viewmodel.js';

interface AppState {
  sessionId: number | null;
  scenarios: ScenarioDoc[];
  config: ConfigDoc;
  matrices: Record<string, number[][]>;
  capacityDraft: CapacityDraft | null;
}

export class App {
  private state: AppState = { sessionId: null, scenarios: [], config: null as unknown as ConfigDoc, matrices: {}, capacityDraft: null };

  constructor(
    private client: ApiClient,
    private root: HTMLElement,
  ) {}

  async start(): Promise<void> {
    this.state.scenarios = (await this.client.listScenarios()).scenarios;
    this.state.config = await this.client.getConfig();
    this.renderNav();
    await this.showNewSession();
  }

  private renderNav(): void {
    const nav = el(
      'nav',
      {},
      el('h1', {}, 'Quality Control Planning'),
      el('button', { 'data-nav': 'new-session', onclick: () => void this.showNewSession() }, 'New session'),
      el('button', { 'data-nav': 'cases', onclick: () => void this.showCases() }, 'Cases'),
      el('button', { 'data-nav': 'settings', onclick: () => void this.showSettings() }, 'Settings'),
    );
    this.root.append(nav, saatyDatalist(), el('main', { 'data-role': 'screen' }));
  }

  private screenHost(): HTMLElement {
    return this.root.querySelector('[data-role="screen"]') as HTMLElement;
  }

  private show(...nodes: (HTMLElement | null)[]): void {
    const host = this.screenHost();
    host.replaceChildren();
    for (const node of nodes) {
      if (node) {
        host.append(node);
      }
    }
  }

  private showError(error: unknown, host?: HTMLElement): void {
    const target = host ?? this.screenHost();
    const box = target.querySelector('[data-role="errors"]');
    const message =
      error instanceof ApiError
        ? `${error.body.message}${error.body.details.length ? ` — ${error.body.details.join('; ')}` : ''}`
        : String(error);
    if (box) {
      box.replaceChildren(renderError(message));
    } else {
      target.prepend(renderError(message));
    }
  }

  // -- screens ------------------------------------------------------------

  async showNewSession(): Promise<void> {
    const session = await this.client.createSession();
    this.state.sessionId = session.id;
    this.state.matrices = {};
    this.state.capacityDraft = null;
    await this.renderSession();
  }

  async renderSession(): Promise<void> {
    if (this.state.sessionId === null) {
      return;
    }
    const session = await this.client.getSession(this.state.sessionId);
    switch (screenFor(session.state)) {
      case 'situation-entry':
        this.show(renderSituationForm((form) => void this.submitSituation(form)));
        return;
      case 'recommendation':
        this.show(this.recommendationScreen(session));
        return;
      case 'manual-evaluation':
        this.show(this.manualScreen(session));
        return;
      case 'manual-results':
        this.show(
          session.manual
            ? renderRankedTable(
                {
                  state: session.state,
                  criteria: session.manual.table.criteria,
                  alternatives: session.manual.table.alternatives,
                  table: session.manual.table.rows,
                  ranking: session.manual.ranking,
                  best: session.manual.best,
                  warnings: session.manual.warnings,
                },
                this.state.scenarios,
                {
                  onAgree: () => void this.confirmBest(session),
                  onBack: () => void this.backToManual(session),
                },
              )
            : null,
        );
        return;
      case 'apply':
        this.show(this.applyScreen(session));
        return;
      case 'outcome-entry':
        this.show(renderOutcomeForm((form) => void this.recordResults(form)));
        return;
      case 'close':
        this.show(this.closeScreen(session));
        return;
      case 'closed':
        this.show(el('section', { class: 'screen closed' }, el('h2', {}, 'Session closed'), renderSessionSummary(session)));
        return;
    }
  }

  private recommendationScreen(session: SessionDoc): HTMLElement | null {
    if (!session.recommendation) {
      return null;
    }
    return renderRecommendation(session.recommendation, this.state.scenarios, {
      onAgree: () => void this.decide('accept'),
      onViewDetails: () => void this.showCaseDetails(session.recommendation?.source_case ?? 0),
      onManualChoice: () => void this.decide('reject'),
    });
  }

  private manualScreen(session: SessionDoc): HTMLElement {
    const criteria = this.state.config.criteria ?? ['Risk', 'Cost', 'Time'];
    const alternatives = this.state.scenarios.map((sc) => sc.id);
    if (this.state.capacityDraft === null) {
      this.state.capacityDraft = emptyDraft(criteria);
    }
    for (const criterion of criteria) {
      if (!this.state.matrices[criterion]) {
        const prior = session.manual?.matrices?.[criterion];
        this.state.matrices[criterion] = prior ? prior.values.map((r) => [...r]) : identityMatrix(alternatives.length);
      }
    }
    const editors = el('div', { class: 'matrix-editors' });
    for (const criterion of criteria) {
      editors.append(
        renderMatrixEditor(criterion, alternatives, this.state.matrices[criterion], (next) => {
          this.state.matrices[criterion] = next;
          void this.refreshBadge(criterion);
          void this.renderSession();
        }),
      );
    }
    const root = el(
      'section',
      { class: 'screen manual-evaluation' },
      el('h2', {}, 'Manual evaluation'),
      editors,
      this.capacityEditor(criteria),
      el('div', { class: 'form-errors', 'data-role': 'errors' }),
      el('button', { 'data-action': 'evaluate', onclick: () => void this.evaluate(criteria) }, 'Evaluate'),
    );
    for (const criterion of criteria) {
      void this.refreshBadge(criterion, root);
    }
    return root;
  }

  private capacityEditor(criteria: string[]): HTMLElement {
    const draft = this.state.capacityDraft as CapacityDraft;
    const container = el('div', { class: 'capacity-editor' }, el('h3', {}, 'Criteria capacity'));
    const modeRow = el('div', { class: 'capacity-mode' });
    for (const mode of ['direct', 'mobius'] as const) {
      const label = mode === 'direct' ? 'Subset values' : '2-additive Moebius';
      modeRow.append(
        el(
          'button',
          {
            'data-capacity-mode': mode,
            class: draft.mode === mode ? 'active' : '',
            onclick: () => {
              draft.mode = mode;
              void this.renderSession();
            },
          },
          label,
        ),
      );
    }
    container.append(modeRow);
    if (draft.mode === 'direct') {
      for (const key of subsetKeys(criteria)) {
        if (key === '' || key.split(',').length === criteria.length) {
          continue;
        }
        const input = el('input', {
          type: 'number',
          step: 'any',
          value: String(draft.values[key] ?? 0),
          'data-subset': key,
        }) as HTMLInputElement;
        input.addEventListener('change', () => {
          draft.values[key] = Number(input.value);
        });
        container.append(el('label', { class: 'subset' }, `value({${key}})`, input));
      }
      container.append(el('p', { class: 'hint' }, 'Empty set is 0 and the full set is 1; values must not decrease when a criterion is added.'));
    } else {
      for (const key of [...criteria, ...pairKeys(criteria)]) {
        const input = el('input', {
          type: 'number',
          step: 'any',
          value: String(draft.masses[key] ?? 0),
          'data-mass': key,
        }) as HTMLInputElement;
        input.addEventListener('change', () => {
          draft.masses[key] = Number(input.value);
        });
        container.append(el('label', { class: 'subset' }, `m({${key}})`, input));
      }
    }
    return container;
  }

  private applyScreen(session: SessionDoc): HTMLElement {
    const root = el(
      'section',
      { class: 'screen apply' },
      el('h2', {}, `Apply ${session.selected_scenario ?? ''}`),
      el('label', {}, 'Period T ', el('input', { type: 'text', 'data-field': 'period-duration', placeholder: 'e.g. 2 weeks' })),
      el('label', {}, 'Basis ', el('input', { type: 'text', 'data-field': 'period-basis', placeholder: 'e.g. production batches' })),
      el('div', { class: 'form-errors', 'data-role': 'errors' }),
    );
    root.append(
      el(
        'button',
        {
          'data-action': 'apply',
          onclick: () => {
            const duration = root.querySelector<HTMLInputElement>('[data-field="period-duration"]')?.value ?? '';
            const basis = root.querySelector<HTMLInputElement>('[data-field="period-basis"]')?.value ?? '';
            void this.apply(duration, basis);
          },
        },
        'Apply',
      ),
    );
    return root;
  }

  private closeScreen(session: SessionDoc): HTMLElement {
    const root = el(
      'section',
      { class: 'screen close' },
      el('h2', {}, 'Close session'),
      renderSessionSummary(session),
      el('div', { class: 'form-errors', 'data-role': 'errors' }),
    );
    root.append(el('button', { 'data-action': 'close', onclick: () => void this.closeSession() }, 'Close session'));
    return root;
  }

  async showCases(query?: CaseDoc['situation']): Promise<void> {
    const payload = await this.client.listCases(query);
    this.show(renderCaseBrowser(payload.cases, payload.threshold));
  }

  async showCaseDetails(caseId: number): Promise<void> {
    const payload = await this.client.listCases();
    const found = payload.cases.filter((c) => c.id === caseId);
    this.show(
      renderCaseBrowser(found, payload.threshold),
      el('button', { 'data-action': 'back', onclick: () => void this.renderSession() }, 'Back'),
    );
  }

  async showSettings(): Promise<void> {
    this.state.config = await this.client.getConfig();
    this.show(
      renderSettings(this.state.config, (form) => {
        const threshold = Number(form.querySelector<HTMLInputElement>('[data-field="threshold"]')?.value);
        const orderP = Number(form.querySelector<HTMLInputElement>('[data-field="order_p"]')?.value);
        const weightsText = form.querySelector<HTMLInputElement>('[data-field="attribute_weights"]')?.value ?? '';
        const weights = weightsText.split(',').map((x) => Number(x.trim()));
        void this.client
          .putConfig({ threshold, order_p: orderP, attribute_weights: weights })
          .then((config) => {
            this.state.config = config;
            return this.showSettings();
          })
          .catch((error) => this.showError(error, form));
      }),
    );
  }

  // -- actions ------------------------------------------------------------

  private async submitSituation(form: HTMLElement): Promise<void> {
    const situation = readIndicators(form, 'situation');
    const objectives = readIndicators(form, 'expected');
    if (!situation || !objectives) {
      this.showError('All eight indicator fields are required numbers.', form);
      return;
    }
    const operation = form.querySelector<HTMLInputElement>('[data-field="context-operation"]')?.value ?? '';
    const characteristic = form.querySelector<HTMLInputElement>('[data-field="context-characteristic"]')?.value ?? '';
    try {
      await this.client.submitSituation(this.state.sessionId as number, situation, objectives, {
        operation,
        characteristic,
      });
      await this.renderSession();
    } catch (error) {
      this.showError(error, form);
    }
  }

  private async decide(action: 'accept' | 'reject'): Promise<void> {
    try {
      await this.client.decide(this.state.sessionId as number, action);
      await this.renderSession();
    } catch (error) {
      this.showError(error);
    }
  }

  private async refreshBadge(criterion: string, host?: HTMLElement): Promise<void> {
    const matrix = this.state.matrices[criterion];
    if (!matrix) {
      return;
    }
    const payload = await this.client.evaluateMatrix(matrix, criterion);
    updateCrBadge(host ?? this.screenHost(), criterion, payload);
  }

  private async evaluate(criteria: string[]): Promise<void> {
    const body: ManualRequest = {
      matrices: Object.fromEntries(criteria.map((c) => [c, { values: this.state.matrices[c], label: c }])),
      ...capacityBody(this.state.capacityDraft as CapacityDraft, criteria),
    };
    try {
      await this.client.manualEvaluate(this.state.sessionId as number, body);
      await this.renderSession();
    } catch (error) {
      this.showError(error);
    }
  }

  private async confirmBest(session: SessionDoc): Promise<void> {
    try {
      await this.client.select(session.id, session.manual?.best ?? '');
      await this.renderSession();
    } catch (error) {
      this.showError(error);
    }
  }

  private async backToManual(_session: SessionDoc): Promise<void> {
    // Re-rendering the editors is enough: the next Evaluate call re-opens the
    // manual choice on the server (ManualEvaluated allows re-evaluation).
    const host = this.screenHost();
    const session = await this.client.getSession(this.state.sessionId as number);
    host.replaceChildren(this.manualScreen(session));
  }

  private async apply(duration: string, basis: string): Promise<void> {
    const period = duration || basis ? { duration, basis } : undefined;
    try {
      await this.client.apply(this.state.sessionId as number, period);
      await this.renderSession();
    } catch (error) {
      this.showError(error);
    }
  }

  private async recordResults(form: HTMLElement): Promise<void> {
    const observed = readIndicators(form, 'observed');
    if (!observed) {
      this.showError('All four observed indicators are required numbers.', form);
      return;
    }
    try {
      await this.client.recordResults(this.state.sessionId as number, observed);
      await this.renderSession();
    } catch (error) {
      this.showError(error, form);
    }
  }

  private async closeSession(): Promise<void> {
    try {
      const report = await this.client.close(this.state.sessionId as number);
      const summary = el(
        'section',
        { class: 'screen closed' },
        el('h2', {}, 'Revision'),
        el('p', { class: 'verdict' }, `Outcome: ${report.status}`),
        report.threshold_change
          ? el(
              'p',
              { class: 'threshold-change' },
              `Similarity threshold lowered: ${String(report.threshold_change.from)} → ${String(report.threshold_change.to)}`,
            )
          : null,
        report.successor_id
          ? el(
              'button',
              {
                'data-action': 'open-successor',
                onclick: () => {
                  this.state.sessionId = report.successor_id as number;
                  this.state.matrices = {};
                  void this.renderSession();
                },
              },
              `Revise judgments (session ${report.successor_id})`,
            )
          : null,
      );
      this.show(summary);
    } catch (error) {
      this.showError(error);
    }
  }
}

export function bootstrap(): void {
  const client = new ApiClient('');
  const root = (globalThis as { document?: Document }).document?.getElementById('app');
  if (root) {
    void new App(client, root).start();
  }
}

// Auto-start in a real browser; tests import and drive the pieces directly.
if (typeof window !== 'undefined' && typeof (globalThis as { document?: Document }).document !== 'undefined') {
  const d = (globalThis as unknown as { document: Document }).document;
  if (d.readyState === 'loading') {
    d.addEventListener('DOMContentLoaded', bootstrap);
  } else if (d.getElementById('app')) {
    bootstrap();
  }
}
