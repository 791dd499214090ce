// End-to-end acceptance: drive the real session logic against a live
// annotation service. Spawns `stancebench annotate-serve` on a generated toy
// dataset, leases a task, submits a label through the AnnotatorSession, and
// checks the record is retrievable via GET /api/progress.

import { ChildProcess, execFileSync, spawn } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { AnnotationApi } from "../src/api.js";
import { AnnotatorSession } from "../src/session.js";
import { eventRecorder } from "./helpers.js";

let server: ChildProcess | null = null;
let baseUrl = "";

async function waitForLine(proc: ChildProcess, pattern: RegExp, timeoutMs: number): Promise<RegExpMatchArray> {
  return new Promise((resolve, reject) => {
    const timer = setTimeout(
      () => reject(new Error(`server did not announce itself within ${timeoutMs}ms`)),
      timeoutMs,
    );
    let buffer = "";
    proc.stdout!.on("data", (chunk: Buffer) => {
      buffer += chunk.toString();
      const match = buffer.match(pattern);
      if (match) {
        clearTimeout(timer);
        resolve(match);
      }
    });
    proc.on("exit", (code) => {
      clearTimeout(timer);
      reject(new Error(`server exited early with code ${code}: ${buffer}`));
    });
  });
}

beforeAll(async () => {
  const dataDir = mkdtempSync(join(tmpdir(), "stancebench-ui-"));
  execFileSync("python3", [
    "-c",
    "import sys; from stancebench.synth import make_toy_dataset; " +
      "make_toy_dataset(sys.argv[1], targets=('tesla',), per_target=3, seed=0)",
    dataDir,
  ]);
  server = spawn("python3", [
    "-m", "stancebench.cli", "annotate-serve",
    "--in", join(dataDir, "instances.jsonl"),
    "--port", "0",
    "--log", join(dataDir, "annotations.jsonl"),
    "--data", dataDir,
  ], { stdio: ["ignore", "pipe", "pipe"] });
  const match = await waitForLine(server, /http:\/\/127\.0\.0\.1:(\d+)/, 30_000);
  baseUrl = `http://127.0.0.1:${match[1]}`;
});

afterAll(() => {
  server?.kill();
});

describe("live annotate-serve round trip", () => {
  it("leases, submits through the session, and finds the record in progress", async () => {
    const api = new AnnotationApi(baseUrl);
    const { events, log } = eventRecorder();
    const session = new AnnotatorSession(api, "ui-tester", events);

    await session.loadNext();
    expect(session.task).not.toBeNull();
    const firstInstance = session.task!.instance_id;
    expect(session.task!.lines.length).toBeGreaterThan(0);
    expect(session.task!.round).toBe("first");

    // the full context is servable: every referenced image resolves over HTTP
    for (const ref of session.task!.image_refs) {
      const imgResponse = await fetch(api.imageUrl(ref));
      expect(imgResponse.status).toBe(200);
    }

    // simulate the view completing its render, then submit
    session.markPathRendered();
    session.markImagesLoaded();
    expect(session.canSubmit).toBe(true);
    const posted = await session.submit("favor");
    expect(posted).toBe(true);

    // the session auto-advanced to a different task
    expect(session.task).not.toBeNull();
    expect(session.task!.instance_id).not.toBe(firstInstance);

    // and the record is retrievable via the progress endpoint
    const progress = await api.progress();
    expect(progress.per_annotator["ui-tester"]).toBe(1);
    expect(progress.records_per_round.first).toBe(1);
    expect(log.progress.some((entry) => !entry.stale)).toBe(true);
  });

  it("a second annotator gets the second pass of the same instance", async () => {
    const api = new AnnotationApi(baseUrl);
    const { events } = eventRecorder();
    const session = new AnnotatorSession(api, "ui-tester-2", events);
    await session.loadNext();
    expect(session.task).not.toBeNull();
    // lowest-id instance already has a first-round record from the previous test
    expect(session.task!.round).toBe("second");
  });
});
