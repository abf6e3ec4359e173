// Browser console: chat panel, draft preview with anchored findings, and a
// consent-gated deploy dialog. All rendered state derives from the server
// checkpoint; after every action the checkpoint is re-fetched and re-rendered.

import { ApiClient, openEvents } from "./api.js";
import { activityRows, anchorLine, deriveSessionView } from "./state.js";
import type { SessionView } from "./state.js";
import type { AgentEventDto, DeploymentRecordDto, ScriptTurn } from "./types.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

class Console {
  private client: ApiClient;
  private sessionId: string | null = null;
  private events: AgentEventDto[] = [];
  private stream: { close(): void } | null = null;

  constructor(apiBase: string) {
    this.client = new ApiClient(apiBase);
  }

  async init(): Promise<void> {
    el<HTMLButtonElement>("new-session").onclick = () => void this.newSession();
    el<HTMLButtonElement>("send").onclick = () => void this.send();
    el<HTMLInputElement>("chat-input").addEventListener("keydown", (ev) => {
      if (ev.key === "Enter") void this.send();
    });
    el<HTMLButtonElement>("deploy").onclick = () => this.openDeployDialog();
    el<HTMLButtonElement>("deploy-confirm").onclick = () => void this.confirmDeploy(true);
    el<HTMLButtonElement>("deploy-cancel").onclick = () => void this.confirmDeploy(false);

    try {
      const health = await this.client.health();
      el("health").textContent = `service ${health.version} / frameworks: ${health.frameworks.join(", ") || "none"}`;
    } catch (err) {
      el("health").textContent = `service unreachable: ${String(err)}`;
    }

    const saved = sessionStorage.getItem("crforge-session");
    if (saved) {
      this.sessionId = saved;
      await this.reload(); // a page reload reconstructs the view from the checkpoint
      this.subscribe(0);
    }
  }

  private async newSession(): Promise<void> {
    let script: ScriptTurn[];
    try {
      script = JSON.parse(el<HTMLTextAreaElement>("script").value || "[]") as ScriptTurn[];
    } catch (err) {
      this.note(`replay script is not valid JSON: ${String(err)}`);
      return;
    }
    this.stream?.close();
    this.events = [];
    const created = await this.client.createSession({ script });
    this.sessionId = created.session_id;
    sessionStorage.setItem("crforge-session", created.session_id);
    this.render(deriveSessionView(created.checkpoint));
    this.subscribe(0);
  }

  private subscribe(after: number): void {
    if (!this.sessionId) return;
    this.stream = openEvents(
      this.client,
      this.sessionId,
      (event) => {
        this.events[event.seq] = { type: event.type, payload: event.payload };
        this.renderActivity();
      },
      { after },
    );
  }

  private async send(): Promise<void> {
    if (!this.sessionId) return;
    const input = el<HTMLInputElement>("chat-input");
    const text = input.value.trim();
    if (!text) return;
    input.value = "";
    try {
      const resp = await this.client.sendMessage(this.sessionId, text);
      this.render(deriveSessionView(resp.checkpoint));
    } catch (err) {
      this.note(String(err));
    }
  }

  private async reload(): Promise<void> {
    if (!this.sessionId) return;
    try {
      const checkpoint = await this.client.getCheckpoint(this.sessionId);
      this.render(deriveSessionView(checkpoint));
      const page = await this.client.getEvents(this.sessionId, 0);
      for (const event of page.events) {
        this.events[event.seq] = { type: event.type, payload: event.payload };
      }
      this.renderActivity();
    } catch (err) {
      this.note(String(err));
    }
  }

  private openDeployDialog(): void {
    el<HTMLDialogElement>("deploy-dialog").showModal();
  }

  private async confirmDeploy(accept: boolean): Promise<void> {
    el<HTMLDialogElement>("deploy-dialog").close();
    if (!this.sessionId) return;
    const dryRun = el<HTMLInputElement>("dry-run").checked;
    try {
      const resp = await this.client.consent(this.sessionId, accept, dryRun);
      this.render(deriveSessionView(resp.checkpoint));
      if (accept && resp.deployment_id) {
        await this.client.pollDeployment(resp.deployment_id, (record) =>
          this.renderCommandLog(record),
        );
      }
    } catch (err) {
      this.note(String(err));
    }
  }

  private note(text: string): void {
    el("notes").textContent = text;
  }

  // ---- rendering -------------------------------------------------------

  private render(view: SessionView): void {
    el("status").textContent = view.status;
    el("attempts").textContent = view.attemptBadge;
    const deploy = el<HTMLButtonElement>("deploy");
    deploy.disabled = !view.deployEnabled;

    const transcript = el("transcript");
    transcript.innerHTML = view.transcript
      .map((m) => {
        const cls = m.role === "user" ? "msg-user" : m.role === "tool" ? "msg-tool" : "msg-agent";
        const tag = m.tool_name ? ` <span class="tool-tag">${escapeHtml(m.tool_name)}</span>` : "";
        return `<div class="msg ${cls}"><b>${m.role}</b>${tag}<pre>${escapeHtml(m.content)}</pre></div>`;
      })
      .join("");
    transcript.scrollTop = transcript.scrollHeight;

    if (view.pendingQuestion) {
      el("question-card").style.display = "block";
      el("question-text").textContent = view.pendingQuestion;
    } else {
      el("question-card").style.display = "none";
    }

    this.renderPreview(view);
  }

  private renderPreview(view: SessionView): void {
    const draft = view.draft ?? "";
    const anchors = new Map<number, string[]>();
    for (const finding of view.findings) {
      const line = anchorLine(draft, finding.path);
      const list = anchors.get(line) ?? [];
      list.push(`${finding.code}: ${finding.message}`);
      anchors.set(line, list);
    }
    const lines = draft.split("\n").map((line, i) => {
      const notes = anchors.get(i + 1);
      const marker = notes
        ? `<span class="finding" title="${escapeHtml(notes.join("\n"))}">⚠</span>`
        : "";
      return `<span class="line">${escapeHtml(line)}${marker}</span>`;
    });
    el("preview").innerHTML = draft ? lines.join("\n") : "<i>no draft yet</i>";

    el("findings").innerHTML = view.findings.length
      ? view.findings
          .map(
            (f) =>
              `<tr class="sev-${f.severity}"><td>${escapeHtml(f.code)}</td>` +
              `<td>${escapeHtml(f.path)}</td><td>${escapeHtml(f.message)}</td>` +
              `<td>line ${anchorLine(draft, f.path) || "?"}</td></tr>`,
          )
          .join("")
      : `<tr><td colspan="4">no findings</td></tr>`;
  }

  private renderActivity(): void {
    const rows = activityRows(this.events.filter(Boolean));
    el("activity").innerHTML = rows
      .map((r) => `<div class="row row-${r.kind}"><span>${escapeHtml(r.label)}</span>` +
        (r.detail ? `<small>${escapeHtml(r.detail)}</small>` : "") + `</div>`)
      .join("");
  }

  private renderCommandLog(record: DeploymentRecordDto): void {
    el("deploy-status").textContent = `deployment ${record.deployment_id}: ${record.status}`;
    el("command-log").innerHTML = record.command_log
      .map(
        (entry) =>
          `<div class="cmd ${entry.exit_status === 0 ? "ok" : "err"}">$ ${escapeHtml(entry.command)}` +
          ` → ${entry.exit_status}${entry.output ? `<pre>${escapeHtml(entry.output)}</pre>` : ""}</div>`,
      )
      .join("");
  }
}

const params = new URLSearchParams(window.location.search);
const apiBase = params.get("api") ?? "http://127.0.0.1:8000";
void new Console(apiBase).init();
