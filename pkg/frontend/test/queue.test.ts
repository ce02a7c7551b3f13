import { describe, expect, it } from "vitest";

import { QueueItem } from "../src/api.js";
import {
  applyReviewOutcome,
  initialState,
  replaceItem,
  sortQueue,
} from "../src/queue.js";

function item(id: string, confidence: number, version = 1): QueueItem {
  return {
    sample_id: id,
    diff_text: "=== f.py\n+ x = 1",
    target_behaviour: "t",
    machine_response: null,
    machine_confidence: confidence,
    review_state: "pending",
    category: "Structural Refactor",
    version,
  };
}

describe("sortQueue", () => {
  it("orders by ascending confidence", () => {
    const sorted = sortQueue([item("a", 0.8), item("b", 0.2), item("c", 0.5)]);
    expect(sorted.map((i) => i.sample_id)).toEqual(["b", "c", "a"]);
  });

  it("breaks ties by sample id", () => {
    const sorted = sortQueue([item("z", 0.5), item("a", 0.5)]);
    expect(sorted.map((i) => i.sample_id)).toEqual(["a", "z"]);
  });
});

describe("applyReviewOutcome", () => {
  it("removes the row after a 200", () => {
    const state = initialState([item("a", 0.2), item("b", 0.4)]);
    const next = applyReviewOutcome(state, "a", {
      status: 200,
      body: { ...item("a", 0.2, 2), review_state: "accepted" },
    });
    expect(next.items.map((i) => i.sample_id)).toEqual(["b"]);
    expect(next.notice).toContain("accepted");
  });

  it("flags the row for refresh after a 409", () => {
    const state = initialState([item("a", 0.2)]);
    const next = applyReviewOutcome(state, "a", {
      status: 409,
      body: { detail: "stale" },
    });
    expect(next.items).toHaveLength(1);
    expect(next.notice).toContain("another reviewer");
  });

  it("surfaces validation errors without dropping the row", () => {
    const state = initialState([item("a", 0.2)]);
    const next = applyReviewOutcome(state, "a", {
      status: 422,
      body: { detail: { field: "behaviour_confidence", reason: "maximum 100" } },
    });
    expect(next.items).toHaveLength(1);
    expect(next.notice).toContain("behaviour_confidence");
  });
});

describe("replaceItem", () => {
  it("swaps in the server's current pending copy, re-sorted", () => {
    const state = initialState([item("a", 0.2), item("b", 0.4)]);
    const next = replaceItem(state, "a", item("a", 0.9, 3));
    expect(next.items.map((i) => i.sample_id)).toEqual(["b", "a"]);
    expect(next.items[1].version).toBe(3);
  });

  it("drops the row when the sample left the queue", () => {
    const state = initialState([item("a", 0.2)]);
    const next = replaceItem(state, "a", {
      ...item("a", 0.2, 2),
      review_state: "accepted",
    });
    expect(next.items).toHaveLength(0);
  });
});
