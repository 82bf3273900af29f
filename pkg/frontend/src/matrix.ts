// Pairwise-matrix editing model. The only arithmetic allowed client-side is
// the reciprocal auto-fill (cell (j,i) = 1 / cell (i,j)); weights and
// consistency ratios always come back from the service.

export interface SaatyChoice {
  label: string;
  value: number;
}

// Dropdown values 9..1/9; free text entry overrides (and the service warns
// when a judgment falls outside this scale).
export const SAATY_CHOICES: SaatyChoice[] = [
  ...[9, 8, 7, 6, 5, 4, 3, 2].map((n) => ({ label: String(n), value: n })),
  { label: '1', value: 1 },
  ...[2, 3, 4, 5, 6, 7, 8, 9].map((n) => ({ label: `1/${n}`, value: 1 / n })),
];

export function identityMatrix(n: number): number[][] {
  return Array.from({ length: n }, (_, i) => Array.from({ length: n }, (_, j) => (i === j ? 1 : 1)));
}

/** Set one judgment and auto-fill its mirror; returns a new matrix. */
export function setJudgment(matrix: number[][], row: number, col: number, value: number): number[][] {
  if (row === col || !(value > 0) || !Number.isFinite(value)) {
    return matrix.map((r) => [...r]);
  }
  const next = matrix.map((r) => [...r]);
  next[row][col] = value;
  next[col][row] = 1 / value;
  return next;
}

/** Accepts "3", "0.5" or "1/3"; null when unparseable or non-positive. */
export function parseJudgment(text: string): number | null {
  const trimmed = text.trim();
  if (!trimmed) {
    return null;
  }
  const fraction = trimmed.match(/^(\d+(?:\.\d+)?)\s*\/\s*(\d+(?:\.\d+)?)$/);
  let value: number;
  if (fraction) {
    const denominator = Number(fraction[2]);
    if (denominator === 0) {
      return null;
    }
    value = Number(fraction[1]) / denominator;
  } else {
    value = Number(trimmed);
  }
  return Number.isFinite(value) && value > 0 ? value : null;
}

/** Display helper: near-reciprocals of small integers render as "1/n". */
export function formatJudgment(value: number): string {
  for (let n = 2; n <= 9; n += 1) {
    if (Math.abs(value - 1 / n) < 1e-12) {
      return `1/${n}`;
    }
  }
  return String(value);
}

export function isReciprocal(matrix: number[][], tolerance = 1e-9): boolean {
  const n = matrix.length;
  for (let i = 0; i < n; i += 1) {
    if (Math.abs(matrix[i][i] - 1) > tolerance) {
      return false;
    }
    for (let j = i + 1; j < n; j += 1) {
      if (Math.abs(matrix[i][j] * matrix[j][i] - 1) > tolerance) {
        return false;
      }
    }
  }
  return true;
}
