// Pure view derivation: everything the console renders comes from server
// responses, so a page reload rebuilds the identical view from the checkpoint.

import type {
  AgentEventDto,
  Checkpoint,
  SyntaxFinding,
  TranscriptMessage,
} from "./types.js";

export interface SessionView {
  sessionId: string;
  status: string;
  transcript: TranscriptMessage[];
  draft: string | null;
  findings: SyntaxFinding[];
  attemptBadge: string;
  pendingQuestion: string | null;
  deployEnabled: boolean;
}

export function deriveSessionView(cp: Checkpoint): SessionView {
  // deploy enabled ⇔ latest report valid ∧ session awaiting consent
  const report = cp.memory.latest_report;
  const deployEnabled =
    report !== null && report.status === "valid" && cp.status === "awaiting_deploy_consent";
  return {
    sessionId: cp.session_id,
    status: cp.status,
    transcript: cp.transcript,
    draft: cp.memory.latest_description,
    findings: report ? report.findings : [],
    attemptBadge: `${cp.loop_state.attempt_counter}/${cp.loop_state.max_retries}`,
    pendingQuestion: cp.pending_question,
    deployEnabled,
  };
}

export type ActivityKind =
  | "user"
  | "agent"
  | "tool"
  | "draft"
  | "check"
  | "question"
  | "outcome"
  | "consent"
  | "deploy";

export interface ActivityRow {
  kind: ActivityKind;
  label: string;
  detail?: string;
}

export function activityRows(events: AgentEventDto[]): ActivityRow[] {
  const rows: ActivityRow[] = [];
  for (const event of events) {
    const p = event.payload;
    switch (event.type) {
      case "user_message":
        rows.push({ kind: "user", label: String(p.text ?? "") });
        break;
      case "agent_message":
        rows.push({ kind: "agent", label: String(p.text ?? "") });
        break;
      case "tool_call":
        rows.push({
          kind: "tool",
          label: `tool: ${String(p.name)}`,
          detail: JSON.stringify(p.arguments ?? {}),
        });
        break;
      case "tool_result":
        if (p.name === "retrieve") {
          rows.push({ kind: "tool", label: `retrieve returned ${Number(p.count ?? 0)} chunks` });
        }
        break;
      case "draft":
        rows.push({ kind: "draft", label: `draft (attempt ${Number(p.attempt ?? 0)})` });
        break;
      case "check_result": {
        const report = p.report as { status?: string; findings?: unknown[] } | undefined;
        rows.push({
          kind: "check",
          label: `check: ${report?.status ?? "?"}`,
          detail: `${report?.findings?.length ?? 0} finding(s)`,
        });
        break;
      }
      case "question":
        rows.push({ kind: "question", label: String(p.question ?? "") });
        break;
      case "outcome":
        rows.push({
          kind: "outcome",
          label: `outcome: ${String(p.result)} in ${Number(p.iterations_used ?? 0)} iteration(s)`,
        });
        break;
      case "consent_request":
        rows.push({ kind: "consent", label: String(p.question ?? "deploy?") });
        break;
      case "deploy_result":
        rows.push({ kind: "deploy", label: `deployment ${String(p.status)}` });
        break;
    }
  }
  return rows;
}

interface PathSegment {
  name: string;
  index: number | null;
}

function parsePath(path: string): PathSegment[] {
  const segments: PathSegment[] = [];
  for (const raw of path.split(".")) {
    if (!raw) continue;
    const match = /^([^[\]]+)(?:\[(\d+)\])?$/.exec(raw);
    if (!match) continue;
    segments.push({ name: match[1], index: match[2] !== undefined ? Number(match[2]) : null });
  }
  return segments;
}

/**
 * Best-effort line anchor (1-based) for a finding path inside a draft.
 * Walks the document: each segment advances to the line holding `name:`;
 * an [i] suffix then advances to the (i+1)-th `- ` list item after it.
 * Returns 0 when the path cannot be located.
 */
export function anchorLine(draftText: string, path: string): number {
  const lines = draftText.split("\n");
  let cursor = 0;
  for (const segment of parsePath(path)) {
    const keyRe = new RegExp(`(^|\\s|- )${segment.name}:`);
    let found = -1;
    for (let i = cursor; i < lines.length; i++) {
      if (keyRe.test(lines[i])) {
        found = i;
        break;
      }
    }
    if (found < 0) return 0;
    cursor = found;
    if (segment.index !== null) {
      let remaining = segment.index + 1;
      let itemLine = -1;
      for (let i = cursor + 1; i < lines.length; i++) {
        if (/^\s*- /.test(lines[i])) {
          remaining -= 1;
          if (remaining === 0) {
            itemLine = i;
            break;
          }
        }
      }
      if (itemLine < 0) return 0;
      cursor = itemLine;
    }
  }
  return cursor + 1;
}
