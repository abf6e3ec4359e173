// Wire types mirroring the service JSON.

export type Role = "user" | "agent" | "tool";

export interface TranscriptMessage {
  role: Role;
  content: string;
  tool_name?: string;
  tool_payload?: unknown;
}

export interface SyntaxFinding {
  code: string;
  path: string;
  message: string;
  severity: "error" | "warning";
}

export interface ValidationReportDto {
  status: "valid" | "invalid";
  findings: SyntaxFinding[];
}

export interface OutcomeDto {
  result: "success" | "failed_syntax" | "failed_token_limit" | "cancelled";
  iterations_used: number;
  final_description: string | null;
  report: ValidationReportDto | null;
}

export interface LoopState {
  attempt_counter: number;
  max_retries: number;
}

export interface MemoryDto {
  latest_intent: string | null;
  latest_description: string | null;
  latest_report: ValidationReportDto | null;
}

export type SessionStatus =
  | "idle"
  | "generating"
  | "awaiting_user"
  | "awaiting_deploy_consent"
  | "deploying"
  | "done"
  | "failed";

export interface Checkpoint {
  session_id: string;
  framework_name: string;
  system_prompt?: string;
  engine_owns_loop?: boolean;
  status: SessionStatus;
  pending_question: string | null;
  transcript: TranscriptMessage[];
  memory: MemoryDto;
  loop_state: LoopState;
  last_outcome: OutcomeDto | null;
}

export interface AgentEventDto {
  type: string;
  payload: Record<string, unknown>;
}

export interface SeqEvent extends AgentEventDto {
  seq: number;
}

export interface CommandLogEntry {
  command: string;
  exit_status: number;
  output: string;
}

export interface DeploymentRecordDto {
  deployment_id: string;
  framework: string;
  status: "pending" | "running" | "succeeded" | "failed";
  dry_run: boolean;
  range_id: number;
  command_log: CommandLogEntry[];
  created_at: string;
}

export interface HealthDto {
  version: string;
  frameworks: string[];
}

export interface ScriptTurn {
  expect_role?: Role;
  completion: Record<string, unknown>;
}
