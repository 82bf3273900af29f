// DOM builders for every screen. No numeric shown here is computed locally:
// scores, ranks, distances and consistency ratios are rendered verbatim from
// API payloads.

import type {
  CaseDoc,
  ConfigDoc,
  Indicators,
  ManualResult,
  Recommendation,
  ScenarioDoc,
  SessionDoc,
} from './types.js';
import { SAATY_CHOICES, formatJudgment, parseJudgment, setJudgment } from './matrix.js';

type Handler = (event: Event) => void;

function doc(): Document {
  return (globalThis as { document?: Document }).document as Document;
}

export function el(
  tag: string,
  attrs: Record<string, string | Handler> = {},
  ...children: (Node | string | null)[]
): HTMLElement {
  const node = doc().createElement(tag);
  for (const [name, value] of Object.entries(attrs)) {
    if (typeof value === 'function') {
      node.addEventListener(name.replace(/^on/, ''), value);
    } else {
      node.setAttribute(name, value);
    }
  }
  for (const child of children) {
    if (child === null) {
      continue;
    }
    node.append(typeof child === 'string' ? doc().createTextNode(child) : child);
  }
  return node;
}

const INDICATOR_FIELDS: (keyof Indicators)[] = ['cp', 'cpk', 'ncr', 'encr'];

function indicatorInputs(prefix: string, labels: string[]): HTMLElement {
  const row = el('div', { class: 'indicator-row' });
  INDICATOR_FIELDS.forEach((field, i) => {
    row.append(
      el(
        'label',
        { class: 'indicator' },
        labels[i],
        el('input', { type: 'number', step: 'any', name: `${prefix}-${field}`, 'data-field': `${prefix}-${field}` }),
      ),
    );
  });
  return row;
}

export function readIndicators(root: HTMLElement, prefix: string): Indicators | null {
  const values: Partial<Indicators> = {};
  for (const field of INDICATOR_FIELDS) {
    const input = root.querySelector<HTMLInputElement>(`[data-field="${prefix}-${field}"]`);
    if (!input || input.value.trim() === '' || Number.isNaN(Number(input.value))) {
      return null;
    }
    values[field] = Number(input.value);
  }
  return values as Indicators;
}

/** Situation entry: current indicators, expected (objective) indicators, context. */
export function renderSituationForm(onSubmit: (root: HTMLElement) => void): HTMLElement {
  const root = el(
    'section',
    { class: 'screen situation-entry' },
    el('h2', {}, 'Enter new problem details'),
    el(
      'div',
      { class: 'context-row' },
      el('label', {}, 'Operation', el('input', { type: 'text', 'data-field': 'context-operation' })),
      el('label', {}, 'Characteristic', el('input', { type: 'text', 'data-field': 'context-characteristic' })),
    ),
    indicatorInputs('situation', ['CP', 'CPK', 'NCR', 'ENCR']),
    indicatorInputs('expected', ['Expected CP', 'Expected CPK', 'Expected NCR', 'Expected ENCR']),
    el('div', { class: 'form-errors', 'data-role': 'errors' }),
  );
  root.append(el('button', { 'data-action': 'submit-situation', onclick: () => onSubmit(root) }, 'Submit'));
  return root;
}

/** Recommendation view with the Agree / View case details / Manual choice bar. */
export function renderRecommendation(
  recommendation: Recommendation,
  scenarios: ScenarioDoc[],
  handlers: { onAgree: Handler; onViewDetails: Handler; onManualChoice: Handler },
): HTMLElement {
  const scenario = scenarios.find((sc) => sc.id === recommendation.scenario);
  const title = scenario ? `${scenario.id}-${scenario.name}` : recommendation.scenario;
  return el(
    'section',
    { class: 'screen recommendation' },
    el('p', { class: 'found' }, 'One similar case was found:'),
    el('p', { class: 'scenario' }, 'Recommended control scenario: ', el('strong', {}, title), '.'),
    el('p', { class: 'similarity' }, 'Similarity level: ', el('strong', {}, String(recommendation.distance))),
    el(
      'div',
      { class: 'actions' },
      el('button', { 'data-action': 'agree', onclick: handlers.onAgree }, 'Agree'),
      el('button', { 'data-action': 'view-details', onclick: handlers.onViewDetails }, 'View case details'),
      el('button', { 'data-action': 'manual-choice', onclick: handlers.onManualChoice }, 'Manual choice'),
    ),
  );
}

/** Ranked table (criteria columns + Score + Rank) with the best-scenario banner. */
export function renderRankedTable(
  result: ManualResult,
  scenarios: ScenarioDoc[],
  handlers?: { onAgree: Handler; onBack: Handler },
): HTMLElement {
  const header = el('tr', {}, el('th', {}, ''));
  for (const name of result.criteria) {
    header.append(el('th', {}, name));
  }
  header.append(el('th', {}, 'Score'), el('th', {}, 'Rank'));
  const table = el('table', { class: 'evaluation' }, el('thead', {}, header));
  const body = el('tbody', {});
  result.alternatives.forEach((alternative, i) => {
    const ranked = result.ranking.find((r) => r.alternative === alternative);
    const row = el('tr', {}, el('th', {}, alternative));
    for (const value of result.table[i]) {
      row.append(el('td', { class: 'priority' }, String(value)));
    }
    row.append(
      el('td', { class: 'score' }, ranked ? String(ranked.score) : ''),
      el('td', { class: 'rank' }, ranked ? String(ranked.rank) : ''),
    );
    body.append(row);
  });
  table.append(body);
  const best = scenarios.find((sc) => sc.id === result.best);
  const banner = el(
    'p',
    { class: 'banner' },
    'The best control scenario is: ',
    el('strong', {}, best ? `${best.id}, "${best.name}"` : result.best),
  );
  const root = el('section', { class: 'screen manual-results' }, el('h2', {}, 'Control Scenarios Evaluation'), table, banner);
  for (const warning of result.warnings) {
    root.append(el('p', { class: 'warning' }, warning));
  }
  if (handlers) {
    root.append(
      el(
        'div',
        { class: 'actions' },
        el('button', { 'data-action': 'agree', onclick: handlers.onAgree }, 'Agree'),
        el('button', { 'data-action': 'back-to-manual', onclick: handlers.onBack }, 'Back to manual choice'),
      ),
    );
  }
  return root;
}

/** One pairwise-matrix editor with reciprocal auto-fill and a CR badge slot. */
export function renderMatrixEditor(
  criterion: string,
  alternatives: string[],
  matrix: number[][],
  onChange: (next: number[][]) => void,
): HTMLElement {
  const table = el('table', { class: 'matrix', 'data-criterion': criterion });
  const header = el('tr', {}, el('th', {}, criterion));
  for (const alt of alternatives) {
    header.append(el('th', {}, alt));
  }
  table.append(el('thead', {}, header));
  const body = el('tbody', {});
  matrix.forEach((rowValues, i) => {
    const row = el('tr', {}, el('th', {}, alternatives[i]));
    rowValues.forEach((value, j) => {
      if (i === j) {
        row.append(el('td', { class: 'diagonal' }, '1'));
        return;
      }
      const input = el('input', {
        type: 'text',
        value: formatJudgment(value),
        'data-cell': `${i},${j}`,
        list: 'saaty-scale',
      }) as HTMLInputElement;
      input.addEventListener('change', () => {
        const parsed = parseJudgment(input.value);
        if (parsed !== null) {
          onChange(setJudgment(matrix, i, j, parsed));
        }
      });
      row.append(el('td', {}, input));
    });
    body.append(row);
  });
  table.append(body);
  const badge = el('span', { class: 'cr-badge', 'data-role': `cr-${criterion}` }, 'CR: —');
  return el('div', { class: 'matrix-editor' }, badge, table);
}

export function saatyDatalist(): HTMLElement {
  const list = el('datalist', { id: 'saaty-scale' });
  for (const choice of SAATY_CHOICES) {
    list.append(el('option', { value: choice.label }));
  }
  return list;
}

/** Badge text comes straight from the matrix-evaluation payload. */
export function updateCrBadge(root: HTMLElement, criterion: string, payload: { consistency_ratio?: number | null; valid: boolean }): void {
  const badge = root.querySelector(`[data-role="cr-${criterion}"]`);
  if (!badge) {
    return;
  }
  if (!payload.valid || payload.consistency_ratio === null || payload.consistency_ratio === undefined) {
    badge.textContent = 'CR: —';
    badge.className = 'cr-badge';
    return;
  }
  badge.textContent = `CR: ${String(payload.consistency_ratio)}`;
  badge.className = payload.consistency_ratio > 0.1 ? 'cr-badge cr-warning' : 'cr-badge cr-ok';
}

export function renderOutcomeForm(onSubmit: (root: HTMLElement) => void): HTMLElement {
  const root = el(
    'section',
    { class: 'screen outcome-entry' },
    el('h2', {}, 'Record observed results'),
    indicatorInputs('observed', ['CP', 'CPK', 'NCR', 'ENCR']),
    el('div', { class: 'form-errors', 'data-role': 'errors' }),
  );
  root.append(el('button', { 'data-action': 'record-results', onclick: () => onSubmit(root) }, 'Record results'));
  return root;
}

export function renderCaseBrowser(cases: CaseDoc[], threshold: number): HTMLElement {
  const header = el(
    'tr',
    {},
    ...['id', 'status', 'scenario', 'CP', 'CPK', 'NCR', 'ENCR', 'distance'].map((h) => el('th', {}, h)),
  );
  const body = el('tbody', {});
  for (const c of cases) {
    body.append(
      el(
        'tr',
        {},
        el('td', {}, String(c.id)),
        el('td', {}, el('span', { class: `status-badge status-${c.status}` }, c.status)),
        el('td', {}, c.scenario_id),
        el('td', {}, String(c.situation.cp)),
        el('td', {}, String(c.situation.cpk)),
        el('td', {}, String(c.situation.ncr)),
        el('td', {}, String(c.situation.encr)),
        el('td', { class: 'distance' }, c.distance === undefined ? '' : String(c.distance)),
      ),
    );
  }
  return el(
    'section',
    { class: 'screen case-browser' },
    el('h2', {}, 'Cases'),
    el('p', {}, `Similarity threshold: ${String(threshold)}`),
    el('table', { class: 'cases' }, el('thead', {}, header), body),
  );
}

export function renderSettings(config: ConfigDoc, onSave: (root: HTMLElement) => void): HTMLElement {
  const root = el(
    'section',
    { class: 'screen settings' },
    el('h2', {}, 'Settings'),
    el('label', {}, 'Similarity threshold ', el('input', { type: 'number', step: 'any', value: String(config.threshold), 'data-field': 'threshold' })),
    el('label', {}, 'Minkowski order p ', el('input', { type: 'number', step: 'any', value: String(config.order_p), 'data-field': 'order_p' })),
    el(
      'label',
      {},
      'Attribute weights (cp, cpk, ncr, encr) ',
      el('input', { type: 'text', value: config.attribute_weights.join(', '), 'data-field': 'attribute_weights' }),
    ),
    el('div', { class: 'form-errors', 'data-role': 'errors' }),
  );
  root.append(el('button', { 'data-action': 'save-settings', onclick: () => onSave(root) }, 'Save'));
  return root;
}

export function renderError(message: string): HTMLElement {
  return el('p', { class: 'error-banner' }, message);
}

export function renderSessionSummary(session: SessionDoc): HTMLElement {
  const items = el('dl', { class: 'summary' });
  const push = (term: string, value: string) => {
    items.append(el('dt', {}, term), el('dd', {}, value));
  };
  push('State', session.state);
  if (session.selected_scenario) {
    push('Selected scenario', session.selected_scenario);
  }
  if (session.case_id !== null) {
    push('Retained case', String(session.case_id));
  }
  return items;
}
