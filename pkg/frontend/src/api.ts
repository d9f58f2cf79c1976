import type {
  Bundle,
  CorrectionPlanPayload,
  HistoryResponse,
  IssuesResponse,
  ManualConfigPayload,
  ProjectCreated,
  SteerResponse,
} from "./types.js";

/** Error carrying the service's stable code so screens can branch on it. */
export class ApiRequestError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiRequestError";
  }
}

export function resolveBaseUrl(): string {
  const configured = (globalThis as Record<string, unknown>)["UI_API_BASE_URL"];
  if (typeof configured === "string" && configured.length > 0) {
    return configured.replace(/\/$/, "");
  }
  return "http://localhost:8080";
}

async function parseError(response: Response): Promise<ApiRequestError> {
  let code = "internal";
  let message = response.statusText;
  try {
    const body = (await response.json()) as {
      error?: { code?: string; message?: string };
    };
    if (body.error) {
      code = body.error.code ?? code;
      message = body.error.message ?? message;
    }
  } catch {
    // non-JSON error body; keep the status text
  }
  return new ApiRequestError(response.status, code, message);
}

export class ApiClient {
  constructor(private readonly baseUrl: string = resolveBaseUrl()) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.baseUrl + path, init);
    if (!response.ok) {
      throw await parseError(response);
    }
    return (await response.json()) as T;
  }

  private json(body: unknown, method: string): RequestInit {
    return {
      method,
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    };
  }

  createProject(form: FormData): Promise<ProjectCreated> {
    return this.request("/projects", { method: "POST", body: form });
  }

  getBundle(projectId: string): Promise<Bundle> {
    return this.request(`/projects/${projectId}/bundle`);
  }

  getIssues(projectId: string): Promise<IssuesResponse> {
    return this.request(`/projects/${projectId}/issues`);
  }

  putManualConfig(
    projectId: string,
    payload: ManualConfigPayload,
  ): Promise<SteerResponse> {
    return this.request(
      `/projects/${projectId}/config/manual`,
      this.json(payload, "PUT"),
    );
  }

  postAutoConfig(
    projectId: string,
    payload: CorrectionPlanPayload,
  ): Promise<SteerResponse> {
    return this.request(
      `/projects/${projectId}/config/auto`,
      this.json(payload, "POST"),
    );
  }

  postRollback(projectId: string, versionId: number): Promise<SteerResponse> {
    return this.request(
      `/projects/${projectId}/rollback`,
      this.json({ version_id: versionId }, "POST"),
    );
  }

  getVersions(projectId: string): Promise<HistoryResponse> {
    return this.request(`/projects/${projectId}/versions`);
  }
}
