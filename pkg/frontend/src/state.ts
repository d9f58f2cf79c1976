import type {
  Bundle,
  CorrectionPlanPayload,
  HistoryResponse,
  IssueKind,
  IssuesResponse,
  ManualConfigPayload,
} from "./types.js";

export type Screen = "dashboard" | "manual_config" | "auto_config" | "history";

export interface FeatureDraft {
  included: boolean;
  /** Observed value span of the feature, from the served histogram edges. */
  observedMin: number;
  observedMax: number;
  lo: number | null;
  hi: number | null;
}

export interface Notice {
  tone: "info" | "warn" | "error";
  code: string | null;
  text: string;
}

/** Advisory client-side mirror of the server guardrails; the server verdict
 * is always authoritative. */
export interface MirrorVerdict {
  ok: boolean;
  warnings: string[];
}

export const MIRROR_MIN_FEATURES = 2;

export class AppState {
  screen: Screen = "dashboard";
  projectId: string | null = null;
  bundle: Bundle | null = null;
  issues: IssuesResponse | null = null;
  history: HistoryResponse | null = null;
  draft: Map<string, FeatureDraft> = new Map();
  selectedKinds: Set<IssueKind> = new Set();
  pending = false;
  notice: Notice | null = null;

  get activeVersion(): number {
    const versions = this.history?.versions ?? [];
    const last = versions[versions.length - 1];
    if (!last) {
      throw new Error("no loaded history");
    }
    return last.version_id;
  }

  loadProject(
    projectId: string,
    bundle: Bundle,
    issues: IssuesResponse,
    history: HistoryResponse,
  ): void {
    this.projectId = projectId;
    this.bundle = bundle;
    this.issues = issues;
    this.history = history;
    this.selectedKinds.clear();
    this.resetDraft();
  }

  /** Single-flight gate: at most one mutating request in flight. */
  beginRequest(): boolean {
    if (this.pending) {
      return false;
    }
    this.pending = true;
    return true;
  }

  endRequest(): void {
    this.pending = false;
  }

  // -- manual configuration draft ------------------------------------------

  resetDraft(): void {
    this.draft.clear();
    if (!this.bundle) {
      return;
    }
    for (const dist of this.bundle.distributions) {
      const first = dist.bin_edges[0] ?? 0;
      const last = dist.bin_edges[dist.bin_edges.length - 1] ?? first;
      this.draft.set(dist.feature, {
        included: true,
        observedMin: first,
        observedMax: last,
        lo: null,
        hi: null,
      });
    }
  }

  toggleFeature(name: string, included: boolean): void {
    const entry = this.draft.get(name);
    if (entry) {
      entry.included = included;
    }
  }

  setRange(name: string, lo: number | null, hi: number | null): void {
    const entry = this.draft.get(name);
    if (entry) {
      entry.lo = lo;
      entry.hi = hi;
    }
  }

  /** Build the PUT payload; untouched bounds backfill from the observed span. */
  buildManualPayload(): ManualConfigPayload {
    const included: string[] = [];
    const ranges: Record<string, [number, number]> = {};
    for (const [name, entry] of this.draft) {
      if (!entry.included) {
        continue;
      }
      included.push(name);
      if (entry.lo !== null || entry.hi !== null) {
        ranges[name] = [
          entry.lo ?? entry.observedMin,
          entry.hi ?? entry.observedMax,
        ];
      }
    }
    return {
      included_features: included,
      ranges,
      base_version: this.activeVersion,
    };
  }

  mirrorVerdict(): MirrorVerdict {
    const warnings: string[] = [];
    let includedCount = 0;
    for (const [name, entry] of this.draft) {
      if (!entry.included) {
        continue;
      }
      includedCount += 1;
      const lo = entry.lo;
      const hi = entry.hi;
      if (lo !== null && hi !== null && lo > hi) {
        warnings.push(`${name}: lower limit exceeds upper limit`);
      }
      if (
        (hi !== null && hi < entry.observedMin) ||
        (lo !== null && lo > entry.observedMax)
      ) {
        warnings.push(`${name}: range excludes every observed value`);
      }
    }
    if (includedCount < MIRROR_MIN_FEATURES) {
      warnings.push(
        `at least ${MIRROR_MIN_FEATURES} features must stay included`,
      );
      return { ok: false, warnings };
    }
    return { ok: true, warnings };
  }

  // -- automated configuration ------------------------------------------------

  toggleIssue(kind: IssueKind, selected: boolean): void {
    if (selected) {
      this.selectedKinds.add(kind);
    } else {
      this.selectedKinds.delete(kind);
    }
  }

  buildCorrectionPlan(): CorrectionPlanPayload {
    const order: IssueKind[] = [
      "duplicates",
      "disguised_missing",
      "outliers",
      "class_imbalance",
    ];
    return {
      selected_kinds: order.filter((k) => this.selectedKinds.has(k)),
      base_version: this.activeVersion,
    };
  }

  // -- notices -------------------------------------------------------------------

  conflictNotice(code: string, message: string): void {
    this.notice = {
      tone: "error",
      code,
      text: `${message} The project changed underneath this screen: reload and retry.`,
    };
  }

  serverRejection(code: string, message: string): void {
    this.notice = { tone: "error", code, text: message };
  }

  info(text: string): void {
    this.notice = { tone: "info", code: null, text };
  }

  clearNotice(): void {
    this.notice = null;
  }
}
