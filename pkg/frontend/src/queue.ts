// Pure state transitions for the review queue.  The server owns the
// truth; this module only decides what the table shows next after each
// API outcome, including the optimistic-version conflict path where a
// 409 swaps in the server's current copy instead of silently retrying.

import { QueueItem, ReviewOutcome } from "./api.js";

export interface QueueState {
  items: QueueItem[];
  notice: string | null;
}

export function sortQueue(items: QueueItem[]): QueueItem[] {
  return [...items].sort(
    (a, b) =>
      a.machine_confidence - b.machine_confidence ||
      a.sample_id.localeCompare(b.sample_id),
  );
}

export function initialState(items: QueueItem[]): QueueState {
  return { items: sortQueue(items), notice: null };
}

export function applyReviewOutcome(
  state: QueueState,
  sampleId: string,
  outcome: ReviewOutcome,
): QueueState {
  if (outcome.status === 200) {
    const updated = outcome.body as QueueItem;
    const items = state.items.filter((item) => item.sample_id !== sampleId);
    return {
      items,
      notice: `${sampleId}: recorded as ${updated.review_state}`,
    };
  }
  if (outcome.status === 409) {
    // another reviewer got there first; the row must refresh rather
    // than keep a stale version number
    return {
      items: state.items.map((item) =>
        item.sample_id === sampleId ? { ...item, stale: true } as QueueItem : item,
      ),
      notice: `${sampleId}: changed by another reviewer, refreshing`,
    };
  }
  const detail = JSON.stringify((outcome.body as { detail: unknown }).detail);
  return { ...state, notice: `${sampleId}: rejected (${detail})` };
}

export function replaceItem(
  state: QueueState,
  sampleId: string,
  fresh: QueueItem | null,
): QueueState {
  const without = state.items.filter((item) => item.sample_id !== sampleId);
  if (fresh === null || fresh.review_state !== "pending") {
    return { items: without, notice: state.notice };
  }
  return { items: sortQueue([...without, fresh]), notice: state.notice };
}
