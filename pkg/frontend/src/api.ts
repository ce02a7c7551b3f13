// Typed client for the review service.  The dashboard performs no verdict
// logic of its own: every state change round-trips through these calls and
// displayed numbers come verbatim from the payloads.

export interface SemEdit {
  id: string;
  kind: string;
  semantic: boolean;
  behaviour: string;
  likelihood: number;
  dependency: string;
  precedent: string;
}

export interface CotResponse {
  target_behaviour: string;
  has_compile_error: boolean;
  behaviour_change: string;
  behaviour_confidence: number;
  sem_edits: SemEdit[];
  counterfactual_fix: string;
  reasoning_chain: string[];
  reflection: string;
  bisect_mark: string;
}

export interface QueueItem {
  sample_id: string;
  diff_text: string;
  target_behaviour: string;
  machine_response: CotResponse | null;
  machine_confidence: number;
  review_state: string;
  category: string;
  version: number;
  note?: string | null;
}

export interface Verdict {
  mark: string;
  confidence: number;
  reason: string;
  latency: number;
  samples: CotResponse[];
}

export interface SessionStep {
  step_number: number;
  commit_index: number;
  commit: string;
  elapsed: number;
  prompt_hash: string | null;
  verdict: Verdict;
}

export interface SessionSummary {
  session_id: string;
  mode: string;
  target_behaviour: string;
  steps: number;
  result: SessionResult;
}

export interface SessionResult {
  kind: "localized" | "range" | "aborted";
  index?: number;
  lo_index?: number;
  hi_index?: number;
  reason?: string;
}

export interface SessionDetail {
  session_id: string;
  mode: string;
  target_behaviour: string;
  commits: string[];
  known_good: number;
  known_bad: number;
  result: SessionResult;
  steps: SessionStep[];
}

export type ReviewAction = "accept" | "correct" | "discard";

export interface ReviewOutcome {
  status: number;
  body: QueueItem | { detail: unknown };
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async getJson<T>(path: string): Promise<T> {
    const response = await this.fetchFn(this.base + path);
    if (!response.ok) {
      throw new Error(`GET ${path} failed with ${response.status}`);
    }
    return (await response.json()) as T;
  }

  listQueue(): Promise<QueueItem[]> {
    return this.getJson<QueueItem[]>("/api/queue");
  }

  listSessions(): Promise<SessionSummary[]> {
    return this.getJson<SessionSummary[]>("/api/sessions");
  }

  getSession(sessionId: string): Promise<SessionDetail> {
    return this.getJson<SessionDetail>(`/api/sessions/${sessionId}`);
  }

  async review(
    sampleId: string,
    action: ReviewAction,
    version: number,
    correctedResponse?: CotResponse,
    reviewer = "dashboard",
  ): Promise<ReviewOutcome> {
    const payload: Record<string, unknown> = { action, version, reviewer };
    if (correctedResponse !== undefined) {
      payload.corrected_response = correctedResponse;
    }
    const response = await this.fetchFn(
      `${this.base}/api/samples/${sampleId}/review`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(payload),
      },
    );
    return { status: response.status, body: await response.json() };
  }
}
