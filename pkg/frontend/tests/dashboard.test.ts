import { describe, expect, it } from "vitest";

import { renderDashboard, renderHeader } from "../src/render/dashboard.js";
import type { Bundle } from "../src/types.js";
import { loadFixture } from "./helpers.js";

const bundleV1 = loadFixture<Bundle>("bundle_v1.json");
const bundleV2 = loadFixture<Bundle>("bundle_v2.json");

describe("dashboard rendering", () => {
  it("renders all five panels plus the header from a recorded bundle", () => {
    const html = renderDashboard(bundleV1);
    for (const testId of [
      "header",
      "panel-rules",
      "panel-insights",
      "panel-importance",
      "panel-quality",
      "panel-distributions",
    ]) {
      expect(html).toContain(`data-testid="${testId}"`);
    }
    expect(html).toMatchSnapshot();
  });

  it("omits the delta badge when the bundle has no previous version", () => {
    expect(bundleV1.accuracy_delta).toBeUndefined();
    expect(renderHeader(bundleV1)).not.toContain("accuracy-delta");
  });

  it("shows a signed delta badge when the bundle carries one", () => {
    expect(bundleV2.accuracy_delta).toBeDefined();
    const html = renderHeader(bundleV2);
    expect(html).toContain("accuracy-delta");
    expect(html).toMatch(/[+-]\d+\.\d{2}%/);
  });

  it("displays only server-provided numbers (traceability spot checks)", () => {
    const html = renderDashboard(bundleV1);
    const accuracy = (bundleV1.metrics.holdout_accuracy * 100).toFixed(1) + "%";
    expect(html).toContain(accuracy);
    expect(html).toContain(String(bundleV1.metrics.train_size));
    expect(html).toContain(String(bundleV1.metrics.n_features));
    const composite = (bundleV1.quality.composite * 100).toFixed(1) + "%";
    expect(html).toContain(composite);
    const fidelity = (bundleV1.surrogate_fidelity * 100).toFixed(1) + "%";
    expect(html).toContain(fidelity);
    for (const entry of bundleV1.global_importance) {
      expect(html).toContain(entry.feature);
      expect(html).toContain(entry.mean_abs_phi.toFixed(4));
    }
    for (const dist of bundleV1.distributions) {
      expect(html).toContain(`${dist.missing_count} missing`);
    }
  });

  it("groups importance into actionable and non-actionable factors", () => {
    const html = renderDashboard(bundleV1);
    expect(html).toContain("<h3>Actionable</h3>");
    expect(html).toContain("<h3>Non-actionable</h3>");
    const actionableBlock = html.split("<h3>Actionable</h3>")[1]!.split("<h3>Non-actionable")[0]!;
    for (const entry of bundleV1.global_importance) {
      if (entry.actionable) {
        expect(actionableBlock).toContain(entry.feature);
      }
    }
  });

  it("renders one histogram per served feature", () => {
    const html = renderDashboard(bundleV1);
    const count = (html.match(/class="histogram"/g) ?? []).length;
    expect(count).toBe(bundleV1.distributions.length);
  });
});
