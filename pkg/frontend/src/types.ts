// Typed mirror of the service's JSON contract. The UI renders these fields
// verbatim; it never recomputes accuracy, quality, or impact numbers.

export type IssueKind =
  | "duplicates"
  | "disguised_missing"
  | "outliers"
  | "class_imbalance";

export type Direction = "higher_in_positive" | "higher_in_negative" | "similar";

export interface ImportanceEntry {
  feature: string;
  mean_abs_phi: number;
  mean_signed_phi: number;
  actionable: boolean;
  rank: number;
}

export interface RuleCondition {
  feature: string;
  op: "<=" | ">";
  threshold: number;
}

export interface DecisionRule {
  conditions: RuleCondition[];
  predicted_label: string;
  coverage: number;
  confidence: number;
  score: number;
}

export interface KeyInsight {
  feature: string;
  class_means: Record<string, number | null>;
  smd: number | null;
  direction: Direction;
  unit: string | null;
}

export interface DensityDistribution {
  feature: string;
  bin_edges: number[];
  counts_per_class: Record<string, number[]>;
  missing_count: number;
}

export interface FeatureQuality {
  missing_count: number;
  missing_fraction: number;
  non_missing_count: number;
  outlier_count: number;
  outlier_fraction: number;
}

export interface DataQuality {
  completeness: number;
  outlier_cleanliness: number;
  uniqueness: number;
  class_balance: number;
  composite: number;
  per_feature: Record<string, FeatureQuality>;
  row_count: number;
  duplicate_count: number;
  class_counts: Record<string, number>;
}

export interface ModelMetrics {
  holdout_accuracy: number;
  train_size: number;
  n_features: number;
  confusion_counts: number[][];
  positive_rate: number;
}

export interface Bundle {
  v: number;
  kind: "bundle";
  target_labels: [string, string];
  global_importance: ImportanceEntry[];
  top_rules: DecisionRule[];
  surrogate_fidelity: number;
  insights: KeyInsight[];
  distributions: DensityDistribution[];
  quality: DataQuality;
  metrics: ModelMetrics;
  accuracy_delta?: number;
}

export interface DataIssue {
  kind: IssueKind;
  affected_fraction: number;
  affected_per_feature: Record<string, number> | null;
  description: string;
  estimated_accuracy_impact: number;
  correction_summary: string;
}

export interface IssuesResponse {
  base_version: number;
  issues: DataIssue[];
}

export interface VersionSummary {
  version_id: number;
  parent: number | null;
  cause: "initial" | "manual" | "automated" | "rollback";
  accuracy: number;
  accuracy_delta: number | null;
  train_size: number;
  n_features: number;
  summary: string;
}

export interface HistoryResponse {
  versions: VersionSummary[];
}

export interface ColumnStats {
  mean: number | null;
  min: number | null;
  max: number | null;
  missing_count: number;
}

export interface CorrectionRecord {
  kind: IssueKind;
  rows_before: number;
  rows_after: number;
  before: Record<string, ColumnStats>;
  after: Record<string, ColumnStats>;
}

export interface SteerResponse {
  version: VersionSummary;
  correction_records?: CorrectionRecord[];
}

export interface ProjectCreated {
  project_id: string;
  version: VersionSummary;
}

export interface ManualConfigPayload {
  included_features: string[];
  ranges: Record<string, [number, number]>;
  base_version: number;
}

export interface CorrectionPlanPayload {
  selected_kinds: IssueKind[];
  base_version: number;
  seed?: number;
}

export interface ApiErrorBody {
  error: { code: string; message: string; details?: unknown };
}
