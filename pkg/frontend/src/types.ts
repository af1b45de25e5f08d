// JSON shapes served by the docweave HTTP API.

export type Stage = 'Topic' | 'Spec' | 'Style' | 'Doc';

export interface ChatRecord {
  time: number;
  message: string;
  target: 'spec' | 'doc';
  ops: Record<string, unknown>[];
}

export interface SessionView {
  id: string;
  created_at: number;
  topic: string | null;
  stage: Stage;
  document_stale: boolean;
  has_spec: boolean;
  has_palette: boolean;
  has_selection: boolean;
  has_document: boolean;
  has_eval: boolean;
  chat_log: ChatRecord[];
}

export interface Domain {
  type: 'range' | 'enum' | 'unbounded';
  lo?: number;
  hi?: number;
  step?: number;
  options?: string[];
}

export interface StateVariable {
  name: string;
  kind: 'controlled' | 'derived' | 'constant';
  control?: string;
  domain?: Domain;
  default?: unknown;
  derivation?: string;
  depends_on?: string[];
  value?: unknown;
}

export interface Transition {
  trigger: string;
  affects: string[];
  effect: string;
}

export interface InteractionSpec {
  state: StateVariable[];
  render: string[];
  transitions: Transition[];
  constraint: string;
}

export interface KnowledgeUnit {
  id: string;
  summary: string;
  text_description: string;
  interaction: InteractionSpec;
}

export interface DocSpec {
  topic: string;
  units: KnowledgeUnit[];
}

export interface ValidationIssue {
  code: string;
  unit_id: string | null;
  variable: string | null;
  message: string;
}

export interface SpecResponse {
  spec: DocSpec;
  validation: { ok: boolean; issues: ValidationIssue[] };
}

export interface StyleOption {
  id: string;
  label: string;
  description: string;
}

export interface StyleDimension {
  id: string;
  label: string;
  options: StyleOption[];
}

export interface StylePalette {
  writing: StyleDimension[];
  interaction: StyleDimension[];
}

export type Choice =
  | { mode: 'option'; option_id: string }
  | { mode: 'auto' }
  | { mode: 'custom'; text: string };

export interface StyleSelection {
  choices: Record<string, Choice>;
}

export interface DocumentView {
  html: string;
  total_chars: number;
  total_seconds: number;
  sections: string[];
  stale: boolean;
}

export interface EvalReport {
  if_score: number;
  num_elements: number;
  num_responsive: number;
  eff: number;
  cr: number;
  id_score: number;
  iq: number;
  flags: string[];
}

export interface ChatResponse {
  ops: Record<string, unknown>[];
  spec?: DocSpec;
  document?: { html: string; total_chars: number };
  document_stale: boolean;
}

export interface ProgressEvent {
  seq: number;
  session_id: string;
  stage: string;
  unit_id: string | null;
  step: 'text' | 'viz' | null;
  status: 'started' | 'finished' | 'failed' | 'complete';
  detail: string;
}
