import { describe, expect, it } from "vitest";

import {
  canSubmitCorrection,
  validateResponseDocument,
} from "../src/schema.js";

const VALID = {
  target_behaviour: "greeting prints the trimmed name",
  has_compile_error: false,
  behaviour_change: "intro",
  behaviour_confidence: 92,
  sem_edits: [
    {
      id: "edit-1",
      kind: "modify",
      semantic: true,
      behaviour: "name untrimmed",
      likelihood: 4,
      dependency: "banner writer",
      precedent: "input().strip()",
    },
  ],
  counterfactual_fix: "restore .strip()",
  reasoning_chain: ["step one", "step two"],
  reflection: "confident",
  bisect_mark: "bad",
};

describe("validateResponseDocument", () => {
  it("accepts a conformant document", () => {
    expect(validateResponseDocument(VALID)).toEqual([]);
  });

  it("blocks confidence 150 before submit", () => {
    const doc = { ...VALID, behaviour_confidence: 150 };
    const errors = validateResponseDocument(doc);
    expect(errors).toContainEqual({
      field: "behaviour_confidence",
      reason: "maximum 100",
    });
    expect(canSubmitCorrection(doc)).toBe(false);
  });

  it("blocks negative confidence", () => {
    const errors = validateResponseDocument({
      ...VALID,
      behaviour_confidence: -1,
    });
    expect(errors).toContainEqual({
      field: "behaviour_confidence",
      reason: "minimum 0",
    });
  });

  it("requires every field", () => {
    const { bisect_mark, ...rest } = VALID;
    expect(validateResponseDocument(rest)).toContainEqual({
      field: "bisect_mark",
      reason: "missing",
    });
  });

  it("rejects extra properties", () => {
    expect(validateResponseDocument({ ...VALID, extra: 1 })).toContainEqual({
      field: "extra",
      reason: "unexpected property",
    });
  });

  it("rejects out-of-vocabulary change types", () => {
    const errors = validateResponseDocument({
      ...VALID,
      behaviour_change: "rewrite",
    });
    expect(errors.some((e) => e.field === "behaviour_change")).toBe(true);
  });

  it("rejects malformed sem_edits entries", () => {
    const errors = validateResponseDocument({
      ...VALID,
      sem_edits: [{ id: "only-id" }],
    });
    expect(errors.some((e) => e.field.startsWith("sem_edits[0]."))).toBe(true);
  });

  it("rejects non-integer likelihood", () => {
    const edited = {
      ...VALID,
      sem_edits: [{ ...VALID.sem_edits[0], likelihood: 2.5 }],
    };
    expect(
      validateResponseDocument(edited).some(
        (e) => e.field === "sem_edits[0].likelihood",
      ),
    ).toBe(true);
  });
});

describe("canSubmitCorrection", () => {
  it("allows a valid document with a chosen verdict", () => {
    expect(canSubmitCorrection(VALID)).toBe(true);
  });

  it("keeps submit disabled while the verdict is unchosen", () => {
    expect(canSubmitCorrection({ ...VALID, bisect_mark: "" })).toBe(false);
  });
});
