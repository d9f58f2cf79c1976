// The five dashboard panels plus the metrics header, rendered as plain HTML
// strings from the served bundle. Every number shown here is a bundle field.

import { escapeHtml, num, pct, signedPct, threshold } from "../format.js";
import type {
  Bundle,
  DecisionRule,
  DensityDistribution,
  ImportanceEntry,
  KeyInsight,
} from "../types.js";

export function renderHeader(bundle: Bundle): string {
  const m = bundle.metrics;
  const delta =
    bundle.accuracy_delta !== undefined
      ? `<span class="delta ${bundle.accuracy_delta < 0 ? "down" : "up"}"
              data-testid="accuracy-delta">${signedPct(bundle.accuracy_delta)}</span>`
      : "";
  return `<header class="metrics" data-testid="header">
    <div class="stat"><span class="label">Prediction accuracy</span>
      <span class="value">${pct(m.holdout_accuracy)}</span>${delta}</div>
    <div class="stat"><span class="label">Training data size</span>
      <span class="value">${m.train_size}</span></div>
    <div class="stat"><span class="label">Predictor variables</span>
      <span class="value">${m.n_features}</span></div>
  </header>`;
}

function ruleText(rule: DecisionRule): string {
  if (rule.conditions.length === 0) {
    return "always";
  }
  return rule.conditions
    .map((c) => `${escapeHtml(c.feature)} ${c.op === "<=" ? "&le;" : "&gt;"} ${threshold(c.threshold)}`)
    .join(" and ");
}

export function renderTopRules(bundle: Bundle): string {
  const rows = bundle.top_rules
    .map(
      (rule) => `<li class="rule">
      <span class="conditions">if ${ruleText(rule)}</span>
      <span class="arrow">&rarr;</span>
      <span class="label">${escapeHtml(rule.predicted_label)}</span>
      <span class="meta">coverage ${pct(rule.coverage)},
        confidence ${pct(rule.confidence)}</span>
    </li>`,
    )
    .join("\n");
  return `<section class="panel" data-testid="panel-rules">
    <h2>Top Decision Rules</h2>
    <p class="panel-note">surrogate fidelity ${pct(bundle.surrogate_fidelity)}</p>
    <ol>${rows}</ol>
  </section>`;
}

function insightSentence(insight: KeyInsight, labels: [string, string]): string {
  const unit = insight.unit ? ` ${escapeHtml(insight.unit)}` : "";
  const meanOf = (label: string): string => {
    const value = insight.class_means[label];
    return value === null || value === undefined ? "n/a" : num(value, 1) + unit;
  };
  const contrast = `(${escapeHtml(labels[1])}: ${meanOf(labels[1])}, ${escapeHtml(labels[0])}: ${meanOf(labels[0])})`;
  switch (insight.direction) {
    case "higher_in_positive":
      return `${escapeHtml(insight.feature)} is higher in the positive class ${contrast}`;
    case "higher_in_negative":
      return `${escapeHtml(insight.feature)} is lower in the positive class ${contrast}`;
    default:
      return `${escapeHtml(insight.feature)} looks similar across classes ${contrast}`;
  }
}

export function renderKeyInsights(bundle: Bundle): string {
  const items = bundle.insights
    .map(
      (insight) =>
        `<li class="insight ${insight.direction}">${insightSentence(insight, bundle.target_labels)}</li>`,
    )
    .join("\n");
  return `<section class="panel" data-testid="panel-insights">
    <h2>Key Insights</h2>
    <ul>${items}</ul>
  </section>`;
}

function importanceRow(entry: ImportanceEntry, maxAbs: number): string {
  const width = maxAbs > 0 ? (entry.mean_abs_phi / maxAbs) * 100 : 0;
  return `<li class="factor">
    <span class="rank">#${entry.rank}</span>
    <span class="name">${escapeHtml(entry.feature)}</span>
    <span class="bar"><span class="fill" style="width:${width.toFixed(1)}%"></span></span>
    <span class="value">${num(entry.mean_abs_phi, 4)}</span>
  </li>`;
}

export function renderImportantFactors(bundle: Bundle): string {
  const entries = [...bundle.global_importance].sort((a, b) => a.rank - b.rank);
  const maxAbs = entries.length > 0 ? (entries[0]?.mean_abs_phi ?? 0) : 0;
  const actionable = entries.filter((e) => e.actionable);
  const fixed = entries.filter((e) => !e.actionable);
  const group = (title: string, list: ImportanceEntry[]): string =>
    `<div class="factor-group">
      <h3>${title}</h3>
      <ul>${list.map((e) => importanceRow(e, maxAbs)).join("\n")}</ul>
    </div>`;
  return `<section class="panel" data-testid="panel-importance">
    <h2>Important Risk Factors</h2>
    ${group("Actionable", actionable)}
    ${group("Non-actionable", fixed)}
  </section>`;
}

export function renderDataQuality(bundle: Bundle): string {
  const q = bundle.quality;
  const scores: Array<[string, number]> = [
    ["Completeness", q.completeness],
    ["Outlier cleanliness", q.outlier_cleanliness],
    ["Uniqueness", q.uniqueness],
    ["Class balance", q.class_balance],
  ];
  const rows = scores
    .map(
      ([label, value]) => `<li class="score">
      <span class="name">${label}</span>
      <span class="bar"><span class="fill" style="width:${(value * 100).toFixed(1)}%"></span></span>
      <span class="value">${pct(value)}</span>
    </li>`,
    )
    .join("\n");
  return `<section class="panel" data-testid="panel-quality">
    <h2>Data Quality</h2>
    <p class="composite">Overall <strong>${pct(q.composite)}</strong>
      over ${q.row_count} rows</p>
    <ul>${rows}</ul>
  </section>`;
}

function renderHistogram(dist: DensityDistribution, labels: [string, string]): string {
  const byClass = labels.map((label) => dist.counts_per_class[label] ?? []);
  const peak = Math.max(1, ...byClass.flat());
  const nBins = Math.max(byClass[0]?.length ?? 0, byClass[1]?.length ?? 0);
  const bars: string[] = [];
  for (let bin = 0; bin < nBins; bin += 1) {
    const perClass = labels
      .map((label, li) => {
        const count = byClass[li]?.[bin] ?? 0;
        const height = ((count / peak) * 100).toFixed(1);
        return `<span class="bar class-${li}" style="height:${height}%"
              title="${escapeHtml(label)}: ${count}"></span>`;
      })
      .join("");
    bars.push(`<span class="bin">${perClass}</span>`);
  }
  return `<figure class="histogram" data-feature="${escapeHtml(dist.feature)}">
    <figcaption>${escapeHtml(dist.feature)}
      <span class="missing">${dist.missing_count} missing</span></figcaption>
    <div class="bins">${bars.join("")}</div>
  </figure>`;
}

export function renderDistributions(bundle: Bundle): string {
  const figures = bundle.distributions
    .map((dist) => renderHistogram(dist, bundle.target_labels))
    .join("\n");
  return `<section class="panel" data-testid="panel-distributions">
    <h2>Data Density Distribution</h2>
    <div class="histograms">${figures}</div>
  </section>`;
}

export function renderDashboard(bundle: Bundle): string {
  return `<div class="dashboard" data-testid="dashboard">
    ${renderHeader(bundle)}
    ${renderTopRules(bundle)}
    ${renderKeyInsights(bundle)}
    ${renderImportantFactors(bundle)}
    ${renderDataQuality(bundle)}
    ${renderDistributions(bundle)}
  </div>`;
}
