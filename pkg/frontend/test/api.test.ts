import { describe, expect, it } from "vitest";

import { ApiClient, QueueItem } from "../src/api.js";
import { applyReviewOutcome, initialState } from "../src/queue.js";

// In-memory stand-in for the review service with the same optimistic
// versioning semantics: the version must match and pending samples only.
class FakeServer {
  samples = new Map<string, QueueItem>();
  requests: Array<{ url: string; method: string; body?: unknown }> = [];

  constructor(items: QueueItem[]) {
    for (const item of items) {
      this.samples.set(item.sample_id, { ...item });
    }
  }

  fetch = async (url: string, init?: RequestInit): Promise<Response> => {
    const method = init?.method ?? "GET";
    const body = init?.body ? JSON.parse(String(init.body)) : undefined;
    this.requests.push({ url, method, body });
    if (url.endsWith("/api/queue")) {
      const pending = [...this.samples.values()].filter(
        (s) => s.review_state === "pending",
      );
      return json(200, pending);
    }
    const match = url.match(/\/api\/samples\/([^/]+)\/review$/);
    if (match && method === "POST") {
      const sample = this.samples.get(match[1]);
      if (!sample) return json(404, { detail: "no such sample" });
      if (body.version !== sample.version) {
        return json(409, { detail: "stale version" });
      }
      if (sample.review_state !== "pending") {
        return json(409, { detail: "not reviewable" });
      }
      const target = { accept: "accepted", correct: "corrected", discard: "discarded" }[
        body.action as string
      ];
      if (!target) return json(422, { detail: "unknown action" });
      const updated = {
        ...sample,
        review_state: target,
        version: sample.version + 1,
      };
      this.samples.set(sample.sample_id, updated);
      return json(200, updated);
    }
    return json(404, { detail: "unknown endpoint" });
  };
}

function json(status: number, payload: unknown): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

function pendingItem(id: string, confidence: number): QueueItem {
  return {
    sample_id: id,
    diff_text: "=== f.py\n+ x = 1",
    target_behaviour: "t",
    machine_response: null,
    machine_confidence: confidence,
    review_state: "pending",
    category: "",
    version: 1,
  };
}

describe("ApiClient against the versioned fake server", () => {
  it("lists the pending queue", async () => {
    const server = new FakeServer([pendingItem("s1", 0.4)]);
    const client = new ApiClient("", server.fetch);
    const queue = await client.listQueue();
    expect(queue).toHaveLength(1);
    expect(queue[0].sample_id).toBe("s1");
  });

  it("sends action, version and reviewer in the review POST", async () => {
    const server = new FakeServer([pendingItem("s1", 0.4)]);
    const client = new ApiClient("", server.fetch);
    const outcome = await client.review("s1", "accept", 1);
    expect(outcome.status).toBe(200);
    const post = server.requests.find((r) => r.method === "POST");
    expect(post?.body).toMatchObject({
      action: "accept",
      version: 1,
      reviewer: "dashboard",
    });
  });

  it("two clients double-submitting yield exactly one 200 and one 409", async () => {
    const server = new FakeServer([pendingItem("s1", 0.4)]);
    const alice = new ApiClient("", server.fetch);
    const bob = new ApiClient("", server.fetch);
    // both loaded the queue at version 1
    const [fromAlice, fromBob] = await Promise.all([
      alice.listQueue(),
      bob.listQueue(),
    ]);
    const [first, second] = [
      await alice.review("s1", "accept", fromAlice[0].version),
      await bob.review("s1", "discard", fromBob[0].version),
    ];
    const statuses = [first.status, second.status].sort();
    expect(statuses).toEqual([200, 409]);
    // the losing client refreshes and sees the winner's state
    const state = applyReviewOutcome(
      initialState(fromBob),
      "s1",
      second,
    );
    expect(state.notice).toContain("another reviewer");
    const refreshed = await bob.listQueue();
    expect(refreshed).toHaveLength(0); // accepted samples leave the queue
  });

  it("a valid correction lands as corrected", async () => {
    const server = new FakeServer([pendingItem("s1", 0.4)]);
    const client = new ApiClient("", server.fetch);
    const outcome = await client.review("s1", "correct", 1, {
      target_behaviour: "t",
      has_compile_error: false,
      behaviour_change: "mod",
      behaviour_confidence: 55,
      sem_edits: [],
      counterfactual_fix: "",
      reasoning_chain: ["fixed"],
      reflection: "",
      bisect_mark: "bad",
    });
    expect(outcome.status).toBe(200);
    expect((outcome.body as QueueItem).review_state).toBe("corrected");
    const post = server.requests.find((r) => r.method === "POST");
    expect((post?.body as { corrected_response: { bisect_mark: string } })
      .corrected_response.bisect_mark).toBe("bad");
  });
});
