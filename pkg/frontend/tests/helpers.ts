import { AnnotationClient, Progress, StanceLabel, TaskView } from "../src/api.js";
import { AnnotatorSession, SessionEvents } from "../src/session.js";

export function taskFixture(overrides: Partial<TaskView> = {}): TaskView {
  return {
    instance_id: "i000",
    target: "tesla",
    round: "first",
    lines: [
      { author: "op", text: "the post text" },
      { author: "u2", text: "a reply" },
      { author: "u3", text: "the focus comment" },
    ],
    image_refs: ["images/a.png", "images/b.png"],
    captions: ["a red square", "a blue square"],
    lease_expiry: Date.now() / 1000 + 1800,
    ...overrides,
  };
}

export function progressFixture(): Progress {
  return {
    instances: 3,
    records_per_round: { first: 1, second: 0, tiebreak: 0 },
    per_annotator: { tester: 1 },
    resolved: 0,
    awaiting_tiebreak: 0,
    unresolved: [],
    active_leases: 1,
  };
}

/** Scriptable in-memory client; records every call for assertions. */
export class FakeClient implements AnnotationClient {
  tasks: (TaskView | null)[] = [taskFixture(), null];
  submitCalls: { instanceId: string; label: StanceLabel; visionRelated: boolean }[] = [];
  submitError: Error | null = null;
  nextTaskError: Error | null = null;
  progressError: Error | null = null;
  submitDelayMs = 0;

  async nextTask(_annotator: string): Promise<TaskView | null> {
    if (this.nextTaskError) throw this.nextTaskError;
    const next = this.tasks.shift();
    return next === undefined ? null : next;
  }

  async submitLabel(
    _annotator: string,
    instanceId: string,
    label: StanceLabel,
    visionRelated: boolean,
  ): Promise<void> {
    if (this.submitDelayMs > 0) {
      await new Promise((resolve) => setTimeout(resolve, this.submitDelayMs));
    }
    if (this.submitError) throw this.submitError;
    this.submitCalls.push({ instanceId, label, visionRelated });
  }

  async progress(): Promise<Progress> {
    if (this.progressError) throw this.progressError;
    return progressFixture();
  }

  imageUrl(ref: string): string {
    return `/img/${ref.replace(/^images\//, "")}`;
  }
}

export interface EventLog {
  tasks: TaskView[];
  empties: number;
  gateChanges: boolean[];
  progress: { stale: boolean }[];
  errors: string[];
  reloadPrompts: string[];
}

export function eventRecorder(): { events: SessionEvents; log: EventLog } {
  const log: EventLog = {
    tasks: [], empties: 0, gateChanges: [], progress: [], errors: [], reloadPrompts: [],
  };
  const events: SessionEvents = {
    onTask: (task) => { log.tasks.push(task); },
    onEmpty: () => { log.empties += 1; },
    onGateChange: (open) => { log.gateChanges.push(open); },
    onProgress: (_p, stale) => { log.progress.push({ stale }); },
    onError: (message) => { log.errors.push(message); },
    onReloadPrompt: (message) => { log.reloadPrompts.push(message); },
  };
  return { events, log };
}

export function sessionWith(client: FakeClient): { session: AnnotatorSession; log: EventLog } {
  const { events, log } = eventRecorder();
  return { session: new AnnotatorSession(client, "tester", events), log };
}
