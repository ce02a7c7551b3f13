// View model for the session timeline: one entry per probe with the
// verdict and expandable reasoning, plus a final banner describing the
// localization (or the flaky range / abort).

import { SessionDetail, SessionStep } from "./api.js";

export interface TimelineEntry {
  stepNumber: number;
  commit: string;
  commitShort: string;
  mark: string;
  confidence: number;
  reason: string;
  reasoningChain: string[];
}

export interface ResultBanner {
  kind: string;
  text: string;
  commits: string[]; // linked commits: one for a point, two for a range
}

export function timelineEntries(detail: SessionDetail): TimelineEntry[] {
  return detail.steps.map((step: SessionStep) => ({
    stepNumber: step.step_number,
    commit: step.commit,
    commitShort: step.commit.slice(0, 10),
    mark: step.verdict.mark,
    confidence: step.verdict.confidence,
    reason: step.verdict.reason,
    reasoningChain:
      step.verdict.samples.length > 0
        ? step.verdict.samples[0].reasoning_chain
        : [],
  }));
}

export function resultBanner(detail: SessionDetail): ResultBanner {
  const result = detail.result;
  if (result.kind === "localized") {
    const commit = detail.commits[result.index ?? 0];
    return {
      kind: "localized",
      text: `First bad commit: ${commit.slice(0, 10)} (index ${result.index})`,
      commits: [commit],
    };
  }
  if (result.kind === "range") {
    const lo = detail.commits[result.lo_index ?? 0];
    const hi = detail.commits[result.hi_index ?? 0];
    return {
      kind: "range",
      text:
        `Flaky region: ${lo.slice(0, 10)}..${hi.slice(0, 10)} ` +
        `(indices ${result.lo_index}..${result.hi_index})`,
      commits: [lo, hi],
    };
  }
  return {
    kind: "aborted",
    text: `Aborted: ${result.reason ?? "unknown"}`,
    commits: [],
  };
}
