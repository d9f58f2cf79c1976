// @vitest-environment jsdom
//
// End-to-end check against a live local service: the automated screen
// applies a selected issue and its card disappears after the refresh.
// Requires the Python package to be importable; skipped otherwise.

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { createServer } from "node:net";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { App } from "../src/app.js";

const here = dirname(fileURLToPath(import.meta.url));
const engineFixtures = join(here, "..", "..", "src", "modelsteer", "fixtures");

const pythonReady =
  spawnSync("python3", ["-c", "import modelsteer"]).status === 0;

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const server = createServer();
    server.listen(0, () => {
      const address = server.address();
      if (address && typeof address === "object") {
        const port = address.port;
        server.close(() => resolve(port));
      } else {
        reject(new Error("no port"));
      }
    });
  });
}

interface Part {
  name: string;
  filename: string;
  type: string;
  data: Buffer;
}

function multipart(parts: Part[]): { body: Buffer; contentType: string } {
  const boundary = "----dashboardtest" + Math.random().toString(16).slice(2);
  const chunks: Buffer[] = [];
  for (const part of parts) {
    chunks.push(
      Buffer.from(
        `--${boundary}\r\n` +
          `Content-Disposition: form-data; name="${part.name}"; filename="${part.filename}"\r\n` +
          `Content-Type: ${part.type}\r\n\r\n`,
      ),
    );
    chunks.push(part.data, Buffer.from("\r\n"));
  }
  chunks.push(Buffer.from(`--${boundary}--\r\n`));
  return {
    body: Buffer.concat(chunks),
    contentType: `multipart/form-data; boundary=${boundary}`,
  };
}

describe.skipIf(!pythonReady)("live service integration", () => {
  let proc: ChildProcess;
  let base: string;
  let projectId: string;

  beforeAll(async () => {
    const port = await freePort();
    base = `http://127.0.0.1:${port}`;
    const dataDir = mkdtempSync(join(tmpdir(), "steer-ui-"));
    proc = spawn(
      "python3",
      ["-m", "modelsteer.cli", "serve", "--port", String(port), "--data-dir", dataDir],
      { stdio: "ignore" },
    );
    await waitForService(base);

    const { body, contentType } = multipart([
      {
        name: "csv",
        filename: "pima.csv",
        type: "text/csv",
        data: readFileSync(join(engineFixtures, "pima.csv")),
      },
      {
        name: "schema",
        filename: "pima.schema.json",
        type: "application/json",
        data: readFileSync(join(engineFixtures, "pima.schema.json")),
      },
      {
        name: "hyperparameters",
        filename: "hp.json",
        type: "application/json",
        data: readFileSync(join(engineFixtures, "default_hyperparameters.json")),
      },
    ]);
    const response = await fetch(`${base}/projects`, {
      method: "POST",
      headers: { "content-type": contentType },
      body: new Uint8Array(body),
    });
    expect(response.status).toBe(201);
    projectId = ((await response.json()) as { project_id: string }).project_id;
  });

  afterAll(() => {
    proc?.kill("SIGTERM");
  });

  it("applies a selected issue and the card disappears after refresh", async () => {
    const root = document.createElement("div");
    document.body.appendChild(root);
    const app = new App(root, new ApiClient(base));
    await app.open(projectId);

    // navigate to the automated configuration screen
    const nav = root.querySelector<HTMLButtonElement>(
      'button.nav[data-screen="auto_config"]',
    );
    expect(nav).not.toBeNull();
    nav!.click();
    expect(root.innerHTML).toContain('data-testid="issue-disguised_missing"');

    // select the issue through its checkbox and apply
    const toggle = root.querySelector<HTMLInputElement>(
      '.issue-toggle[data-kind="disguised_missing"]',
    );
    expect(toggle).not.toBeNull();
    toggle!.click();
    expect(app.state.selectedKinds.has("disguised_missing")).toBe(true);
    await app.submitAuto();

    // the corrected issue is gone from the refreshed issue list and screen
    expect(app.state.issues!.issues.map((i) => i.kind)).not.toContain(
      "disguised_missing",
    );
    expect(root.innerHTML).not.toContain('data-testid="issue-disguised_missing"');
    expect(root.innerHTML).toContain('data-testid="correction-records"');

    // the new version is active and the dashboard shows its delta
    const history = app.state.history!.versions;
    expect(history[history.length - 1]!.cause).toBe("automated");
    const dashNav = root.querySelector<HTMLButtonElement>(
      'button.nav[data-screen="dashboard"]',
    );
    dashNav!.click();
    expect(root.innerHTML).toContain('data-testid="accuracy-delta"');
  }, 120_000);

  it("surfaces a stale base version as a reload-and-retry conflict", async () => {
    const root = document.createElement("div");
    document.body.appendChild(root);
    const app = new App(root, new ApiClient(base));
    await app.open(projectId);
    // sabotage the cached history so the next mutation is stale
    app.state.history!.versions.push({
      ...app.state.history!.versions[app.state.history!.versions.length - 1]!,
      version_id: 999,
    });
    await app.submitManual();
    expect(app.state.notice?.code).toBe("stale_base_version");
    expect(root.innerHTML).toContain("reload and retry");
  }, 120_000);
});

async function waitForService(base: string): Promise<void> {
  const deadline = Date.now() + 60_000;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${base}/projects/warmup/bundle`);
      if (response.status === 404) {
        return;
      }
    } catch {
      // not listening yet
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  throw new Error("service did not become ready");
}
