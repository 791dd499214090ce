import { describe, expect, it } from "vitest";

import { ApiError } from "../src/api.js";
import { FakeClient, sessionWith, taskFixture } from "./helpers.js";

describe("review gate", () => {
  it("refuses to submit until the path and the images have rendered", async () => {
    const client = new FakeClient();
    const { session } = sessionWith(client);
    await session.loadNext();

    expect(session.canSubmit).toBe(false);
    expect(await session.submit("favor")).toBe(false);

    session.markPathRendered();
    expect(session.canSubmit).toBe(false);
    expect(await session.submit("favor")).toBe(false);

    session.markImagesLoaded();
    expect(session.canSubmit).toBe(true);
    expect(client.submitCalls.length).toBe(0); // nothing slipped through early

    expect(await session.submit("favor")).toBe(true);
    expect(client.submitCalls.length).toBe(1);
    expect(client.submitCalls[0]).toMatchObject({ instanceId: "i000", label: "favor" });
  });

  it("closes the gate again for every newly loaded task", async () => {
    const client = new FakeClient();
    client.tasks = [taskFixture(), taskFixture({ instance_id: "i001" }), null];
    const { session, log } = sessionWith(client);
    await session.loadNext();
    session.markPathRendered();
    session.markImagesLoaded();
    await session.submit("none");
    // the second task is loaded automatically and must be gated anew
    expect(session.task?.instance_id).toBe("i001");
    expect(session.canSubmit).toBe(false);
    expect(log.gateChanges[log.gateChanges.length - 1]).toBe(false);
  });
});

describe("single-POST guarantee", () => {
  it("a burst of submits issues exactly one POST", async () => {
    const client = new FakeClient();
    client.submitDelayMs = 20;
    const { session } = sessionWith(client);
    await session.loadNext();
    session.markPathRendered();
    session.markImagesLoaded();

    const results = await Promise.all([
      session.submit("favor"),
      session.submit("favor"),
      session.submit("against"),
    ]);
    expect(client.submitCalls.length).toBe(1);
    expect(results.filter(Boolean).length).toBe(1);
    expect(session.postCount).toBe(1);
  });
});

describe("error handling", () => {
  it("expired lease raises the reload prompt and stops", async () => {
    const client = new FakeClient();
    client.submitError = new ApiError("LeaseInvalid", 409, "lease expired");
    const { session, log } = sessionWith(client);
    await session.loadNext();
    session.markPathRendered();
    session.markImagesLoaded();
    await session.submit("favor");
    expect(log.reloadPrompts.length).toBe(1);
    expect(session.phase).toBe("error");
  });

  it("AlreadyLabeled refreshes onto the next task", async () => {
    const client = new FakeClient();
    client.tasks = [taskFixture(), taskFixture({ instance_id: "i001" }), null];
    client.submitError = new ApiError("AlreadyLabeled", 409, "duplicate");
    const { session } = sessionWith(client);
    await session.loadNext();
    session.markPathRendered();
    session.markImagesLoaded();
    await session.submit("favor");
    expect(session.task?.instance_id).toBe("i001");
  });

  it("network failure on load shows a retry and never a partial task", async () => {
    const client = new FakeClient();
    client.nextTaskError = new Error("connection refused");
    const { session, log } = sessionWith(client);
    await session.loadNext();
    expect(session.task).toBe(null);
    expect(session.phase).toBe("error");
    expect(log.errors.length).toBe(1);
    expect(log.tasks.length).toBe(0);
  });

  it("empty queue reports the empty state", async () => {
    const client = new FakeClient();
    client.tasks = [null];
    const { session, log } = sessionWith(client);
    await session.loadNext();
    expect(session.phase).toBe("empty");
    expect(log.empties).toBe(1);
  });

  it("progress failures surface last-known values marked stale", async () => {
    const client = new FakeClient();
    const { session, log } = sessionWith(client);
    await session.refreshProgress();
    expect(log.progress[0]).toEqual({ stale: false });
    client.progressError = new Error("offline");
    await session.refreshProgress();
    expect(log.progress[1]).toEqual({ stale: true });
  });
});

describe("vision toggle", () => {
  it("travels with the submitted record", async () => {
    const client = new FakeClient();
    const { session } = sessionWith(client);
    await session.loadNext();
    session.markPathRendered();
    session.markImagesLoaded();
    session.toggleVision();
    await session.submit("against");
    expect(client.submitCalls[0]).toMatchObject({ visionRelated: true });
  });
});
