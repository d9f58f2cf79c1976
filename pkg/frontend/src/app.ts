// Screen wiring: binds state transitions and API calls to the rendered DOM.

import { ApiClient, ApiRequestError } from "./api.js";
import { escapeHtml } from "./format.js";
import { renderDashboard } from "./render/dashboard.js";
import {
  renderAutoScreen,
  renderHistory,
  renderManualScreen,
} from "./render/config.js";
import { AppState, type Screen } from "./state.js";
import type { CorrectionRecord, IssueKind } from "./types.js";

const SCREENS: Array<[Screen, string]> = [
  ["dashboard", "Dashboard"],
  ["manual_config", "Manual configuration"],
  ["auto_config", "Automated configuration"],
  ["history", "History"],
];

export class App {
  readonly state = new AppState();
  private lastCorrectionRecords: CorrectionRecord[] = [];

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient = new ApiClient(),
  ) {}

  async open(projectId: string): Promise<void> {
    await this.refresh(projectId);
    this.render();
  }

  /** Refetch bundle, issues, and history after any steering action. */
  private async refresh(projectId: string): Promise<void> {
    const [bundle, issues, history] = await Promise.all([
      this.api.getBundle(projectId),
      this.api.getIssues(projectId),
      this.api.getVersions(projectId),
    ]);
    this.state.loadProject(projectId, bundle, issues, history);
  }

  render(): void {
    const state = this.state;
    const nav = SCREENS.map(
      ([screen, label]) =>
        `<button class="nav ${state.screen === screen ? "active" : ""}"
                 data-screen="${screen}">${label}</button>`,
    ).join("");
    const notice = state.notice
      ? `<div class="notice ${state.notice.tone}" data-testid="notice">
           ${state.notice.code ? `<code>${escapeHtml(state.notice.code)}</code> ` : ""}
           ${escapeHtml(state.notice.text)}</div>`
      : "";
    this.root.innerHTML = `<nav>${nav}</nav>${notice}<main>${this.screenHtml()}</main>`;
    this.bind();
  }

  private screenHtml(): string {
    const state = this.state;
    if (!state.bundle) {
      return `<p class="empty">No project loaded.</p>`;
    }
    switch (state.screen) {
      case "dashboard":
        return renderDashboard(state.bundle);
      case "manual_config":
        return renderManualScreen(state);
      case "auto_config":
        return renderAutoScreen(state, this.lastCorrectionRecords);
      case "history":
        return renderHistory(state.history?.versions ?? []);
    }
  }

  private bind(): void {
    for (const nav of this.root.querySelectorAll<HTMLButtonElement>("button.nav")) {
      nav.addEventListener("click", () => {
        this.state.screen = nav.dataset["screen"] as Screen;
        this.state.clearNotice();
        this.render();
      });
    }
    for (const toggle of this.root.querySelectorAll<HTMLInputElement>(".include-toggle")) {
      toggle.addEventListener("change", () => {
        this.state.toggleFeature(toggle.dataset["feature"] ?? "", toggle.checked);
        this.render();
      });
    }
    for (const input of this.root.querySelectorAll<HTMLInputElement>(".range-lo, .range-hi")) {
      input.addEventListener("change", () => {
        const feature = input.dataset["feature"] ?? "";
        const entry = this.state.draft.get(feature);
        if (!entry) {
          return;
        }
        const value = input.value === "" ? null : Number(input.value);
        if (input.classList.contains("range-lo")) {
          this.state.setRange(feature, value, entry.hi);
        } else {
          this.state.setRange(feature, entry.lo, value);
        }
        this.render();
      });
    }
    for (const toggle of this.root.querySelectorAll<HTMLInputElement>(".issue-toggle")) {
      toggle.addEventListener("change", () => {
        this.state.toggleIssue(toggle.dataset["kind"] as IssueKind, toggle.checked);
        this.render();
      });
    }
    this.root
      .querySelector<HTMLButtonElement>("button.submit-manual")
      ?.addEventListener("click", () => void this.submitManual());
    this.root
      .querySelector<HTMLButtonElement>("button.submit-auto")
      ?.addEventListener("click", () => void this.submitAuto());
    for (const button of this.root.querySelectorAll<HTMLButtonElement>("button.rollback")) {
      button.addEventListener("click", () =>
        void this.rollback(Number(button.dataset["version"])),
      );
    }
  }

  async submitManual(): Promise<void> {
    const state = this.state;
    if (!state.projectId || !state.beginRequest()) {
      return;
    }
    this.render();
    try {
      const response = await this.api.putManualConfig(
        state.projectId,
        state.buildManualPayload(),
      );
      state.endRequest();
      await this.refresh(state.projectId);
      state.info(
        `Version ${response.version.version_id} trained (${response.version.summary}).`,
      );
      state.screen = "dashboard";
    } catch (error) {
      state.endRequest();
      this.showError(error);
    }
    this.render();
  }

  async submitAuto(): Promise<void> {
    const state = this.state;
    if (!state.projectId || !state.beginRequest()) {
      return;
    }
    this.render();
    try {
      const response = await this.api.postAutoConfig(
        state.projectId,
        state.buildCorrectionPlan(),
      );
      state.endRequest();
      this.lastCorrectionRecords = response.correction_records ?? [];
      await this.refresh(state.projectId);
      state.info(`Version ${response.version.version_id} trained.`);
      state.screen = "auto_config";
    } catch (error) {
      state.endRequest();
      this.showError(error);
    }
    this.render();
  }

  async rollback(versionId: number): Promise<void> {
    const state = this.state;
    if (!state.projectId || !state.beginRequest()) {
      return;
    }
    try {
      await this.api.postRollback(state.projectId, versionId);
      state.endRequest();
      await this.refresh(state.projectId);
      state.info(`Restored version ${versionId}.`);
    } catch (error) {
      state.endRequest();
      this.showError(error);
    }
    this.render();
  }

  /** Server verdicts render verbatim by code; stale conflicts prompt a reload. */
  private showError(error: unknown): void {
    if (error instanceof ApiRequestError) {
      if (error.code === "stale_base_version" || error.code === "stale_issue") {
        this.state.conflictNotice(error.code, error.message);
      } else {
        this.state.serverRejection(error.code, error.message);
      }
      return;
    }
    this.state.serverRejection("network", String(error));
  }
}
