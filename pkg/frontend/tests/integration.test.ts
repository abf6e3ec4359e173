// End-to-end against the real Python service with scripted sessions.

import { type ChildProcess, spawn } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync, mkdirSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient, ApiError, openEvents } from "../src/api.js";
import { activityRows, anchorLine, deriveSessionView } from "../src/state.js";
import type { ScriptTurn } from "../src/types.js";

const here = dirname(fileURLToPath(import.meta.url));
const repoRoot = join(here, "..", "..");
const basicRange = readFileSync(join(repoRoot, "tests", "data", "basic_range.yml"), "utf-8");
const noEntryPoint = basicRange.replace("            entry_point: yes\n", "");

const draft = (text: string): ScriptTurn => ({ completion: { draft: text } });
const toolCall = (name: string, args: Record<string, unknown>): ScriptTurn => ({
  completion: { tool_call: { name, arguments: args } },
});

const port = 18000 + Math.floor(Math.random() * 10_000);
let proc: ChildProcess;
let client: ApiClient;

beforeAll(async () => {
  const kbRoot = mkdtempSync(join(tmpdir(), "crforge-kb-"));
  mkdirSync(join(kbRoot, "cyris"));
  writeFileSync(join(kbRoot, "cyris", "guide.md"),
    "host_settings, guest_settings and clone_settings make up a description file.");
  writeFileSync(join(kbRoot, "cyris", "example.yml"), basicRange);

  proc = spawn(
    "python3",
    ["-m", "crforge.cli", "serve", "--listen", `127.0.0.1:${port}`, "--kb-root", kbRoot],
    { cwd: repoRoot, stdio: ["ignore", "pipe", "pipe"] },
  );
  client = new ApiClient(`http://127.0.0.1:${port}`);

  const deadline = Date.now() + 30_000;
  for (;;) {
    try {
      await client.health();
      break;
    } catch {
      if (Date.now() > deadline) throw new Error("service did not come up");
      await new Promise((resolve) => setTimeout(resolve, 200));
    }
  }
}, 40_000);

afterAll(() => {
  proc?.kill("SIGTERM");
});

describe("service basics", () => {
  it("health lists the cyris knowledge base", async () => {
    const health = await client.health();
    expect(health.frameworks).toEqual(["cyris"]);
  });

  it("check accepts the reference description and flags a missing entry point", async () => {
    const valid = await client.check("cyris", basicRange);
    expect(valid).toEqual({ status: "valid", findings: [] });

    const invalid = await client.check("cyris", noEntryPoint);
    expect(invalid.status).toBe("invalid");
    expect(invalid.findings[0].code).toBe("E_NO_ENTRY_POINT");
  });

  it("deploy refuses an invalid description with 422", async () => {
    await expect(client.deploy("cyris", noEntryPoint)).rejects.toMatchObject({
      status: 422,
      code: "INVALID_DESCRIPTION",
    });
  });
});

describe("chat panel flow", () => {
  it("streams a generation run as retrieve → draft → check activity rows", async () => {
    const created = await client.createSession({
      script: [toolCall("retrieve", { query: "description sections" }), draft(basicRange)],
    });
    const resp = await client.sendMessage(created.session_id, "one desktop VM on one host");
    const kinds = activityRows(resp.events).map((r) => r.kind);
    expect(kinds).toEqual(["user", "tool", "tool", "draft", "check", "outcome", "consent"]);
    expect(resp.checkpoint.status).toBe("awaiting_deploy_consent");
  });

  it("renders an ask_user question as a resumable choice card", async () => {
    const created = await client.createSession({
      script: [
        toolCall("ask_user", { question: "Entry point missing; assign automatically?" }),
        draft(basicRange),
      ],
    });
    const parked = await client.sendMessage(created.session_id, "range without entry point");
    const view = deriveSessionView(parked.checkpoint);
    expect(view.status).toBe("awaiting_user");
    expect(view.pendingQuestion).toContain("assign automatically");
    expect(view.deployEnabled).toBe(false);

    const resumed = await client.sendMessage(created.session_id, "yes");
    expect(deriveSessionView(resumed.checkpoint).deployEnabled).toBe(true);
  });
});

describe("preview pane", () => {
  it("shows the valid reference draft with zero findings and an enabled deploy button", async () => {
    const created = await client.createSession({ script: [draft(basicRange)] });
    const resp = await client.sendMessage(created.session_id, "go");
    const view = deriveSessionView(resp.checkpoint);
    expect(view.draft).toBe(basicRange);
    expect(view.findings).toEqual([]);
    expect(view.deployEnabled).toBe(true);
  });

  it("anchors E_NO_ENTRY_POINT at the clone host entry and disables deploy", async () => {
    const created = await client.createSession({
      script: [draft(noEntryPoint), draft(noEntryPoint), draft(noEntryPoint)],
    });
    const resp = await client.sendMessage(created.session_id, "go");
    const view = deriveSessionView(resp.checkpoint);
    expect(view.status).toBe("failed");
    expect(view.deployEnabled).toBe(false);
    expect(view.findings.map((f) => f.code)).toContain("E_NO_ENTRY_POINT");
    const finding = view.findings.find((f) => f.code === "E_NO_ENTRY_POINT")!;
    const line = anchorLine(view.draft!, finding.path);
    expect(view.draft!.split("\n")[line - 1]).toContain("- host_id: host_1");
  });
});

describe("consent gate and reload", () => {
  it("reconstructs the identical view from the checkpoint endpoint", async () => {
    const created = await client.createSession({ script: [draft(basicRange)] });
    const resp = await client.sendMessage(created.session_id, "go");
    const live = deriveSessionView(resp.checkpoint);

    const reload1 = deriveSessionView(await client.getCheckpoint(created.session_id));
    const reload2 = deriveSessionView(await client.getCheckpoint(created.session_id));
    expect(reload1).toEqual(live);
    expect(reload2).toEqual(reload1);
  });

  it("deploy dialog: consent → deployment record → live command log", async () => {
    const created = await client.createSession({ script: [draft(basicRange)] });
    await client.sendMessage(created.session_id, "go");

    const consent = await client.consent(created.session_id, true);
    expect(consent.deployment_id).toBeTruthy();
    const updates: string[] = [];
    const record = await client.pollDeployment(consent.deployment_id!, (r) =>
      updates.push(r.status),
    );
    expect(record.status).toBe("succeeded");
    expect(record.command_log.length).toBe(2);
    expect(record.command_log[0].command).toContain("upload ");
    expect(record.command_log[1].command).toContain("main.py");
    expect(updates.length).toBeGreaterThan(0);

    const after = deriveSessionView(await client.getCheckpoint(created.session_id));
    expect(after.status).toBe("done");
    expect(after.deployEnabled).toBe(false);
  });

  it("dry run returns the plan only", async () => {
    const created = await client.createSession({ script: [draft(basicRange)] });
    await client.sendMessage(created.session_id, "go");
    const consent = await client.consent(created.session_id, true, true);
    const record = await client.getDeployment(consent.deployment_id!);
    expect(record.status).toBe("succeeded");
    expect(record.dry_run).toBe(true);
    expect(record.command_log.every((entry) => entry.output === "(dry run)")).toBe(true);
  });

  it("declining consent cancels without a deployment", async () => {
    const created = await client.createSession({ script: [draft(basicRange)] });
    await client.sendMessage(created.session_id, "go");
    const consent = await client.consent(created.session_id, false);
    expect(consent.deployment_id).toBeNull();
    expect(deriveSessionView(consent.checkpoint).status).toBe("done");
  });
});

describe("event delivery", () => {
  it("pages events with a cursor", async () => {
    const created = await client.createSession({ script: [draft(basicRange)] });
    await client.sendMessage(created.session_id, "go");
    const page = await client.getEvents(created.session_id, 0);
    expect(page.events.length).toBeGreaterThan(0);
    expect(page.events[0].seq).toBe(0);
    const empty = await client.getEvents(created.session_id, page.next);
    expect(empty.events).toEqual([]);
  });

  it("openEvents falls back to polling without EventSource", async () => {
    const created = await client.createSession({ script: [draft(basicRange)] });
    await client.sendMessage(created.session_id, "go");

    const seen: string[] = [];
    await new Promise<void>((resolve) => {
      const handle = openEvents(
        client,
        created.session_id,
        (event) => {
          seen.push(event.type);
          if (event.type === "consent_request") {
            handle.close();
            resolve();
          }
        },
        { pollIntervalMs: 50 },
      );
    });
    expect(seen[0]).toBe("user_message");
    expect(seen).toContain("draft");
    expect(seen).toContain("check_result");
  });
});

describe("error surfaces", () => {
  it("unknown frameworks give a 404 ApiError", async () => {
    await expect(client.check("nautilus", basicRange)).rejects.toSatisfy(
      (err: unknown) => err instanceof ApiError && err.status === 404 && err.code === "UNKNOWN_FRAMEWORK",
    );
  });

  it("unknown sessions give a 404", async () => {
    await expect(client.getCheckpoint("nope")).rejects.toMatchObject({ status: 404 });
  });
});
