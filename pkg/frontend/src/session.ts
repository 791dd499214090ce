// Annotation session state machine, kept free of DOM concerns so the review
// gate and the single-POST guarantee are directly testable.
//
// Two invariants live here:
//   1. Review gate: a label can only be submitted after the full conversation
//      path has rendered AND every post image has finished loading.
//   2. One user action produces at most one label POST; repeat calls while a
//      submission is in flight are dropped.

import { AnnotationClient, ApiError, Progress, StanceLabel, TaskView } from "./api.js";

export type Phase = "idle" | "loading" | "reviewing" | "submitting" | "empty" | "error";

export interface SessionEvents {
  onTask(task: TaskView): void;
  onEmpty(): void;
  onGateChange(open: boolean): void;
  onProgress(progress: Progress | null, stale: boolean): void;
  onError(message: string, retryable: boolean): void;
  onReloadPrompt(message: string): void;
}

export class AnnotatorSession {
  phase: Phase = "idle";
  task: TaskView | null = null;
  visionRelated = false;

  private pathRendered = false;
  private imagesLoaded = false;
  private inFlight = false;
  private lastProgress: Progress | null = null;

  /** Count of label POSTs actually issued; tests assert on this. */
  postCount = 0;

  constructor(
    private readonly api: AnnotationClient,
    readonly annotatorId: string,
    private readonly events: SessionEvents,
  ) {}

  get gateOpen(): boolean {
    return this.task !== null && this.pathRendered && this.imagesLoaded;
  }

  get canSubmit(): boolean {
    return this.gateOpen && !this.inFlight && this.phase === "reviewing";
  }

  async loadNext(): Promise<void> {
    this.phase = "loading";
    this.task = null;
    this.visionRelated = false;
    this.closeGate();
    try {
      const task = await this.api.nextTask(this.annotatorId);
      if (task === null) {
        this.phase = "empty";
        this.events.onEmpty();
        return;
      }
      this.task = task;
      this.phase = "reviewing";
      this.events.onTask(task);
    } catch (err) {
      // no partial task is ever shown
      this.task = null;
      this.phase = "error";
      this.events.onError(describe(err), true);
    }
  }

  /** The view calls this once the conversation lines are in the document. */
  markPathRendered(): void {
    this.pathRendered = true;
    this.maybeOpenGate();
  }

  /** The view calls this once every image has fired load (or there are none). */
  markImagesLoaded(): void {
    this.imagesLoaded = true;
    this.maybeOpenGate();
  }

  toggleVision(): void {
    this.visionRelated = !this.visionRelated;
  }

  /**
   * Submit the current task's label. Returns true when a POST was issued.
   * Calls while the gate is closed or another submission is in flight are
   * dropped, which is what makes double activation harmless.
   */
  async submit(label: StanceLabel): Promise<boolean> {
    if (!this.canSubmit || this.task === null) return false;
    const task = this.task;
    this.inFlight = true;
    this.phase = "submitting";
    try {
      this.postCount += 1;
      await this.api.submitLabel(this.annotatorId, task.instance_id, label, this.visionRelated);
    } catch (err) {
      if (err instanceof ApiError && err.category === "LeaseInvalid") {
        this.phase = "error";
        this.events.onReloadPrompt(
          "Your lease on this task expired; reload to pick it up again.");
        return true;
      }
      if (err instanceof ApiError && err.category === "AlreadyLabeled") {
        await this.loadNext(); // stale view of a task we already labeled
        return true;
      }
      this.phase = "error";
      this.events.onError(describe(err), true);
      return true;
    } finally {
      this.inFlight = false;
    }
    await this.refreshProgress();
    await this.loadNext();
    return true;
  }

  /** Progress is advisory: failures surface the last known values, marked stale. */
  async refreshProgress(): Promise<void> {
    try {
      this.lastProgress = await this.api.progress();
      this.events.onProgress(this.lastProgress, false);
    } catch {
      this.events.onProgress(this.lastProgress, true);
    }
  }

  private closeGate(): void {
    this.pathRendered = false;
    this.imagesLoaded = false;
    this.events.onGateChange(false);
  }

  private maybeOpenGate(): void {
    if (this.gateOpen) this.events.onGateChange(true);
  }
}

function describe(err: unknown): string {
  return err instanceof Error ? err.message : String(err);
}
