/** Payload shapes exchanged with the decision-support API. */

export type SessionStateName =
  | "information"
  | "retrieved"
  | "designed"
  | "chosen"
  | "reviewed"
  | "retained";

export type ReviewVerdict = "accepted" | "revised" | "rejected";

export interface ApiErrorBody {
  code: string;
  message: string;
  details?: unknown;
}

export interface Envelope<T> {
  request_id: string;
  payload?: T;
  error?: ApiErrorBody;
}

export interface AttributeInfo {
  index: number;
  name: string;
  kind: "count" | "continuous";
  missing_code_is_zero: boolean;
  bin_count: number;
}

export interface CriterionConfig {
  name: string;
  direction: "maximize" | "minimize";
  weight: number;
  scale: string[];
}

export interface CriteriaConfig {
  criteria: CriterionConfig[];
  concordance_threshold: number;
  discordance_threshold: number;
}

export interface ServerConfig {
  schema: AttributeInfo[];
  class_labels: Record<string, string>;
  criteria_config: CriteriaConfig;
  k_default: number;
  acceptance_radius: number;
}

export interface NeighborView {
  case_id: string;
  distance: number;
  rank: number;
  diagnosis?: 0 | 1;
  actions?: string[];
  descriptors?: number[];
}

export interface OutrankingView {
  actions: string[];
  concordance: number[][];
  discordance: number[][];
  c_hat: number;
  d_hat: number;
  edges: [number, number][];
}

export interface KernelView {
  members: string[];
  collapsed_cycles: string[][];
}

export interface PerformanceCell {
  action: string;
  criterion: string;
  label: string;
}

export interface RetainedCaseInfo {
  id: string;
  actions: string[];
  diagnosis: number;
}

export interface SessionView {
  id: string;
  state: SessionStateName;
  case: { id: string; descriptors: number[]; discretized: number[] | null };
  physician_actions: string[];
  acceptance_radius: number;
  neighbors: NeighborView[];
  pooled_actions: string[];
  performance_input: PerformanceCell[];
  criteria_config: CriteriaConfig;
  outranking: OutrankingView | null;
  proposal: KernelView | null;
  chosen_action: string | null;
  override_flag: boolean;
  review: ReviewVerdict | null;
  retained_case_id: string | null;
  outcome_note: string | null;
  casebase_version: number;
  retained_case?: RetainedCaseInfo;
}

export interface HealthInfo {
  status: string;
  casebase_version: number;
  case_count: number;
}

export interface CasebaseStats {
  version: number;
  case_count: number;
  class_counts: Record<string, number>;
  discretized: boolean;
}
