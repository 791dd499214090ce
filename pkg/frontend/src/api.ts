// Typed client for the annotation service HTTP JSON API.

export type Round = "first" | "second" | "tiebreak";
export type StanceLabel = "against" | "favor" | "none";

export interface TaskView {
  instance_id: string;
  target: string;
  round: Round;
  lines: { author: string; text: string }[];
  image_refs: string[];
  captions: string[];
  lease_expiry: number;
}

export interface Progress {
  instances: number;
  records_per_round: Record<Round, number>;
  per_annotator: Record<string, number>;
  resolved: number;
  awaiting_tiebreak: number;
  unresolved: string[];
  active_leases: number;
}

export interface AgreementReport {
  per_target_kappa: Record<string, number | null>;
  counted_pairs: Record<string, number>;
  resolved: number;
  unresolved: number;
}

/** Error carrying the service's machine-readable category (e.g. LeaseInvalid). */
export class ApiError extends Error {
  constructor(
    public readonly category: string,
    public readonly status: number,
    detail: string,
  ) {
    super(`${category}: ${detail}`);
    this.name = "ApiError";
  }
}

async function parseError(response: Response): Promise<never> {
  let category = "HttpError";
  let detail = `status ${response.status}`;
  try {
    const body = (await response.json()) as { error?: string; detail?: string };
    if (body.error) category = body.error;
    if (body.detail) detail = body.detail;
  } catch {
    // non-JSON error body: keep the generic category
  }
  throw new ApiError(category, response.status, detail);
}

/** What the session and view actually depend on; tests substitute fakes. */
export interface AnnotationClient {
  nextTask(annotator: string): Promise<TaskView | null>;
  submitLabel(
    annotator: string,
    instanceId: string,
    label: StanceLabel,
    visionRelated: boolean,
  ): Promise<void>;
  progress(): Promise<Progress>;
  imageUrl(ref: string): string;
}

export class AnnotationApi implements AnnotationClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  async nextTask(annotator: string): Promise<TaskView | null> {
    const response = await this.fetchImpl(
      `${this.baseUrl}/api/tasks/next?annotator=${encodeURIComponent(annotator)}`,
    );
    if (!response.ok) await parseError(response);
    const body = (await response.json()) as { task: TaskView | null };
    return body.task;
  }

  async submitLabel(
    annotator: string,
    instanceId: string,
    label: StanceLabel,
    visionRelated: boolean,
  ): Promise<void> {
    const response = await this.fetchImpl(
      `${this.baseUrl}/api/tasks/${encodeURIComponent(instanceId)}/label` +
        `?annotator=${encodeURIComponent(annotator)}`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ label, vision_related: visionRelated }),
      },
    );
    if (!response.ok) await parseError(response);
  }

  async progress(): Promise<Progress> {
    const response = await this.fetchImpl(`${this.baseUrl}/api/progress`);
    if (!response.ok) await parseError(response);
    return (await response.json()) as Progress;
  }

  async agreement(): Promise<AgreementReport> {
    const response = await this.fetchImpl(`${this.baseUrl}/api/agreement`);
    if (!response.ok) await parseError(response);
    return (await response.json()) as AgreementReport;
  }

  /** Image refs are stored relative to the data root (usually images/...),
   *  while the service mounts that directory under /img/. */
  imageUrl(ref: string): string {
    const rel = ref.startsWith("images/") ? ref.slice("images/".length) : ref;
    return `${this.baseUrl}/img/${rel}`;
  }
}
