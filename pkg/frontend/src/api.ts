// Typed client for the checker/session service.

import type {
  AgentEventDto,
  Checkpoint,
  DeploymentRecordDto,
  HealthDto,
  ScriptTurn,
  SeqEvent,
  ValidationReportDto,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public body?: unknown,
  ) {
    super(message);
  }
}

async function parseError(resp: Response): Promise<ApiError> {
  let code = "HTTP_ERROR";
  let message = resp.statusText;
  let body: unknown;
  try {
    body = await resp.json();
    const b = body as { code?: string; message?: string };
    if (b.code) code = b.code;
    if (b.message) message = b.message;
  } catch {
    // non-JSON error body; keep the status text
  }
  return new ApiError(resp.status, code, message, body);
}

export interface MessageResponse {
  events: AgentEventDto[];
  checkpoint: Checkpoint;
}

export interface ConsentResponse {
  accepted: boolean;
  deployment_id: string | null;
  result: { status: string; range_id: number; command_log: unknown[] } | null;
  checkpoint: Checkpoint;
}

export interface EventsPage {
  events: SeqEvent[];
  next: number;
}

export class ApiClient {
  constructor(public baseUrl: string) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const resp = await fetch(`${this.baseUrl}${path}`, {
      method,
      headers: body !== undefined ? { "Content-Type": "application/json" } : undefined,
      body: body !== undefined ? JSON.stringify(body) : undefined,
    });
    if (!resp.ok) throw await parseError(resp);
    return (await resp.json()) as T;
  }

  health(): Promise<HealthDto> {
    return this.request("GET", "/api/v1/healthz");
  }

  check(framework: string, descriptionText: string): Promise<ValidationReportDto> {
    return this.request("POST", `/api/v1/frameworks/${framework}/check`, {
      framework,
      description_text: descriptionText,
    });
  }

  deploy(
    framework: string,
    descriptionText: string,
    options: { target?: Record<string, unknown>; dryRun?: boolean } = {},
  ): Promise<{ deployment_id: string }> {
    return this.request("POST", `/api/v1/frameworks/${framework}/deploy`, {
      framework,
      description_text: descriptionText,
      target: options.target ?? { type: "simulated" },
      dry_run: options.dryRun ?? false,
    });
  }

  getDeployment(deploymentId: string): Promise<DeploymentRecordDto> {
    return this.request("GET", `/api/v1/deployments/${deploymentId}`);
  }

  async pollDeployment(
    deploymentId: string,
    onUpdate?: (record: DeploymentRecordDto) => void,
    intervalMs = 150,
    timeoutMs = 30_000,
  ): Promise<DeploymentRecordDto> {
    const deadline = Date.now() + timeoutMs;
    for (;;) {
      const record = await this.getDeployment(deploymentId);
      onUpdate?.(record);
      if (record.status === "succeeded" || record.status === "failed") return record;
      if (Date.now() > deadline) throw new ApiError(0, "TIMEOUT", "deployment did not finish");
      await new Promise((resolve) => setTimeout(resolve, intervalMs));
    }
  }

  createSession(options: {
    framework?: string;
    script: ScriptTurn[];
    maxRetries?: number;
  }): Promise<{ session_id: string; checkpoint: Checkpoint }> {
    return this.request("POST", "/api/v1/sessions", {
      framework: options.framework ?? "cyris",
      backend: "scripted",
      script: options.script,
      max_retries: options.maxRetries ?? 3,
    });
  }

  sendMessage(sessionId: string, text: string): Promise<MessageResponse> {
    return this.request("POST", `/api/v1/sessions/${sessionId}/messages`, { text });
  }

  getCheckpoint(sessionId: string): Promise<Checkpoint> {
    return this.request("GET", `/api/v1/sessions/${sessionId}`);
  }

  consent(sessionId: string, accept: boolean, dryRun = false): Promise<ConsentResponse> {
    return this.request("POST", `/api/v1/sessions/${sessionId}/consent`, {
      accept,
      dry_run: dryRun,
    });
  }

  getEvents(sessionId: string, after = 0): Promise<EventsPage> {
    return this.request("GET", `/api/v1/sessions/${sessionId}/events?after=${after}`);
  }
}

export interface EventStreamHandle {
  close(): void;
}

/**
 * Event delivery: server-sent events when the runtime has EventSource,
 * otherwise (and after SSE errors) cursor-based polling of the same endpoint.
 */
export function openEvents(
  client: ApiClient,
  sessionId: string,
  onEvent: (event: SeqEvent) => void,
  options: { pollIntervalMs?: number; after?: number } = {},
): EventStreamHandle {
  let cursor = options.after ?? 0;
  let closed = false;
  let timer: ReturnType<typeof setTimeout> | null = null;

  const poll = async () => {
    if (closed) return;
    try {
      const page = await client.getEvents(sessionId, cursor);
      for (const event of page.events) onEvent(event);
      cursor = page.next;
    } catch {
      // transient; next tick retries
    }
    if (!closed) timer = setTimeout(poll, options.pollIntervalMs ?? 1000);
  };

  if (typeof EventSource !== "undefined") {
    const source = new EventSource(
      `${client.baseUrl}/api/v1/sessions/${sessionId}/events?stream=sse&after=${cursor}`,
    );
    const forward = (raw: MessageEvent) => {
      try {
        const event = JSON.parse(raw.data) as SeqEvent;
        cursor = Math.max(cursor, event.seq + 1); // keep the poll fallback in sync
        onEvent(event);
      } catch {
        // malformed frame; skip
      }
    };
    // the server tags frames with their event type, so listen broadly
    for (const type of [
      "user_message",
      "agent_message",
      "tool_call",
      "tool_result",
      "draft",
      "check_result",
      "question",
      "outcome",
      "consent_request",
      "deploy_result",
    ]) {
      source.addEventListener(type, forward as EventListener);
    }
    source.onerror = () => {
      source.close();
      if (!closed) void poll(); // degrade to polling
    };
    return {
      close() {
        closed = true;
        source.close();
      },
    };
  }

  void poll();
  return {
    close() {
      closed = true;
      if (timer) clearTimeout(timer);
    },
  };
}
