/**
 * Typed client for the annotation service wire API.
 *
 * The console never computes costs or counts itself: every number shown in
 * the UI is fetched from one of these endpoints.
 */

export interface TaskInfo {
  task_id: string;
  label_set: string[];
  field_schema: string[];
  instruction_text: string;
}

export interface ClaimedItem {
  instance_id: string;
  fields: Record<string, string>;
  claim_token: string;
  lease_seconds: number;
  lease_expires_at: number; // epoch seconds, service clock
  escalated: boolean;
}

export interface Ledger {
  task_id: string;
  total: number;
  pending: number;
  claimed: number;
  labeled: number;
  human_cost_accrued: number | null;
  llm_cost_accrued: number | null;
  alignment: number | null;
}

export interface ParetoPoint {
  strategy: string;
  llm_fraction: number;
  total_cost: number;
  quality: number;
  efficient: boolean;
}

export interface ParetoAnalysis {
  points: ParetoPoint[];
  frontier: ParetoPoint[];
}

export class StaleClaimError extends Error {}
export class ServiceError extends Error {
  constructor(message: string, readonly status: number) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    readonly serviceUrl: string,
    readonly taskId: string,
    readonly annotatorId: string,
  ) {}

  private url(path: string): string {
    return `${this.serviceUrl.replace(/\/$/, "")}/tasks/${this.taskId}${path}`;
  }

  private async getJson<T>(path: string): Promise<T> {
    const resp = await fetch(this.url(path));
    if (!resp.ok) throw new ServiceError(`GET ${path} -> ${resp.status}`, resp.status);
    return (await resp.json()) as T;
  }

  taskInfo(): Promise<TaskInfo> {
    return this.getJson<TaskInfo>("");
  }

  /** Claim the next pending item; null when the queue is drained. */
  async claimNext(leaseSeconds?: number): Promise<ClaimedItem | null> {
    const params = new URLSearchParams({ annotator_id: this.annotatorId });
    if (leaseSeconds !== undefined) params.set("lease_seconds", String(leaseSeconds));
    const resp = await fetch(this.url(`/queue/next?${params}`));
    if (resp.status === 204) return null;
    if (!resp.ok) throw new ServiceError(`claim -> ${resp.status}`, resp.status);
    return (await resp.json()) as ClaimedItem;
  }

  async submit(claimToken: string, label: string): Promise<void> {
    const resp = await fetch(this.url("/annotations"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({
        claim_token: claimToken,
        label,
        annotator_id: this.annotatorId,
      }),
    });
    if (resp.status === 409) throw new StaleClaimError("claim expired or already used");
    if (!resp.ok) throw new ServiceError(`submit -> ${resp.status}`, resp.status);
  }

  ledger(): Promise<Ledger> {
    return this.getJson<Ledger>("/ledger");
  }

  /** Pareto analysis is optional server-side; null when not configured. */
  async pareto(): Promise<ParetoAnalysis | null> {
    const resp = await fetch(this.url("/pareto"));
    if (resp.status === 404) return null;
    if (!resp.ok) throw new ServiceError(`pareto -> ${resp.status}`, resp.status);
    return (await resp.json()) as ParetoAnalysis;
  }
}
