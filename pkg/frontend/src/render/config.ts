// Manual and automated configuration screens plus the history view.

import { escapeHtml, num, pct, signedPct } from "../format.js";
import type { AppState, FeatureDraft } from "../state.js";
import type {
  CorrectionRecord,
  DataIssue,
  VersionSummary,
} from "../types.js";

function featureRow(name: string, entry: FeatureDraft): string {
  const id = escapeHtml(name);
  return `<tr data-feature="${id}">
    <td><label>
      <input type="checkbox" class="include-toggle" data-feature="${id}"
             ${entry.included ? "checked" : ""}>
      ${id}
    </label></td>
    <td><input type="number" class="range-lo" data-feature="${id}"
               placeholder="${num(entry.observedMin, 1)}"
               value="${entry.lo ?? ""}" ${entry.included ? "" : "disabled"}></td>
    <td><input type="number" class="range-hi" data-feature="${id}"
               placeholder="${num(entry.observedMax, 1)}"
               value="${entry.hi ?? ""}" ${entry.included ? "" : "disabled"}></td>
  </tr>`;
}

export function renderManualScreen(state: AppState): string {
  const rows = [...state.draft.entries()]
    .map(([name, entry]) => featureRow(name, entry))
    .join("\n");
  const verdict = state.mirrorVerdict();
  const advisories = verdict.warnings
    .map((w) => `<li class="advisory">${escapeHtml(w)}</li>`)
    .join("\n");
  return `<div class="manual-config" data-testid="manual-config">
    <h2>Manual Configuration</h2>
    <p class="hint">Include or exclude predictor variables and set the value
      limits used to filter training rows. The server enforces the final
      guardrails; checks here are advisory.</p>
    <table class="features">
      <thead><tr><th>Predictor</th><th>Lower limit</th><th>Upper limit</th></tr></thead>
      <tbody>${rows}</tbody>
    </table>
    <ul class="advisories" data-testid="mirror-warnings">${advisories}</ul>
    <button class="submit-manual" data-testid="submit-manual"
            ${state.pending || !verdict.ok ? "disabled" : ""}>
      Apply configuration and retrain</button>
  </div>`;
}

function impactBadge(issue: DataIssue): string {
  const cls = issue.estimated_accuracy_impact < 0 ? "down" : "up";
  return `<span class="impact ${cls}">${signedPct(issue.estimated_accuracy_impact)} accuracy</span>`;
}

function perFeatureList(issue: DataIssue): string {
  if (!issue.affected_per_feature) {
    return "";
  }
  const parts = Object.entries(issue.affected_per_feature)
    .sort((a, b) => b[1] - a[1])
    .map(([name, fraction]) => `${escapeHtml(name)} ${pct(fraction)}`);
  return `<p class="per-feature">${parts.join(", ")}</p>`;
}

export function renderIssueCard(issue: DataIssue, selected: boolean): string {
  return `<article class="issue-card" data-kind="${issue.kind}" data-testid="issue-${issue.kind}">
    <header>
      <label>
        <input type="checkbox" class="issue-toggle" data-kind="${issue.kind}"
               ${selected ? "checked" : ""}>
        <span class="kind">${issue.kind.replace(/_/g, " ")}</span>
      </label>
      ${impactBadge(issue)}
    </header>
    <p class="description">${escapeHtml(issue.description)}</p>
    <p class="affected">Affected share: ${pct(issue.affected_fraction)}</p>
    ${perFeatureList(issue)}
    <p class="correction">${escapeHtml(issue.correction_summary)}</p>
  </article>`;
}

function statsCell(value: number | null, digits = 1): string {
  return value === null ? "n/a" : num(value, digits);
}

export function renderCorrectionRecords(records: CorrectionRecord[]): string {
  if (records.length === 0) {
    return "";
  }
  const blocks = records
    .map((record) => {
      const features = Object.keys(record.before).filter((name) => {
        const before = record.before[name];
        const after = record.after[name];
        if (!before || !after) {
          return false;
        }
        return (
          before.mean !== after.mean ||
          before.min !== after.min ||
          before.max !== after.max ||
          before.missing_count !== after.missing_count
        );
      });
      const rows = features
        .map((name) => {
          const b = record.before[name]!;
          const a = record.after[name]!;
          return `<tr><td>${escapeHtml(name)}</td>
            <td>${statsCell(b.mean)} &rarr; ${statsCell(a.mean)}</td>
            <td>${statsCell(b.min)} &rarr; ${statsCell(a.min)}</td>
            <td>${statsCell(b.max)} &rarr; ${statsCell(a.max)}</td>
            <td>${b.missing_count} &rarr; ${a.missing_count}</td></tr>`;
        })
        .join("\n");
      return `<section class="correction-record" data-kind="${record.kind}">
        <h3>${record.kind.replace(/_/g, " ")}</h3>
        <p>rows ${record.rows_before} &rarr; ${record.rows_after}</p>
        <table class="before-after">
          <thead><tr><th>Feature</th><th>mean</th><th>min</th><th>max</th><th>missing</th></tr></thead>
          <tbody>${rows}</tbody>
        </table>
      </section>`;
    })
    .join("\n");
  return `<div class="correction-records" data-testid="correction-records">
    <h2>Before and after correction</h2>
    ${blocks}
  </div>`;
}

export function renderAutoScreen(
  state: AppState,
  records: CorrectionRecord[] = [],
): string {
  const issues = state.issues?.issues ?? [];
  const cards =
    issues.length === 0
      ? `<p class="empty" data-testid="no-issues">No data issues detected.</p>`
      : issues
          .map((issue) =>
            renderIssueCard(issue, state.selectedKinds.has(issue.kind)),
          )
          .join("\n");
  return `<div class="auto-config" data-testid="auto-config">
    <h2>Automated Configuration</h2>
    <p class="hint">Select the issues to rectify; the quoted impact is the
      retrained accuracy change measured for each correction.</p>
    <div class="issues">${cards}</div>
    <button class="submit-auto" data-testid="submit-auto"
            ${state.pending || state.selectedKinds.size === 0 ? "disabled" : ""}>
      Correct selected issues and retrain</button>
    ${renderCorrectionRecords(records)}
  </div>`;
}

export function renderHistory(versions: VersionSummary[]): string {
  const rows = versions
    .map(
      (v) => `<tr data-version="${v.version_id}">
      <td>${v.version_id}</td>
      <td>${v.cause}</td>
      <td>${pct(v.accuracy)}</td>
      <td>${v.accuracy_delta === null ? "" : signedPct(v.accuracy_delta)}</td>
      <td>${escapeHtml(v.summary)}</td>
      <td><button class="rollback" data-version="${v.version_id}">restore</button></td>
    </tr>`,
    )
    .join("\n");
  return `<div class="history" data-testid="history">
    <h2>Version History</h2>
    <table>
      <thead><tr><th>#</th><th>cause</th><th>accuracy</th><th>delta</th>
        <th>summary</th><th></th></tr></thead>
      <tbody>${rows}</tbody>
    </table>
  </div>`;
}
