import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { AppState } from "../src/state.js";
import type { Bundle, HistoryResponse, IssuesResponse } from "../src/types.js";

const here = dirname(fileURLToPath(import.meta.url));

export function fixturePath(name: string): string {
  return join(here, "fixtures", name);
}

export function loadFixture<T>(name: string): T {
  return JSON.parse(readFileSync(fixturePath(name), "utf-8")) as T;
}

export function loadedState(): AppState {
  const state = new AppState();
  state.loadProject(
    "fixture-project",
    loadFixture<Bundle>("bundle_v1.json"),
    loadFixture<IssuesResponse>("issues.json"),
    loadFixture<HistoryResponse>("history.json"),
  );
  return state;
}
