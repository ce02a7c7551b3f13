// Client-side pre-validation of the response document, mirroring the
// server's field rules so reviewers get instant feedback.  The server
// stays authoritative: anything accepted here is still re-validated on
// submit.

export interface FieldError {
  field: string;
  reason: string;
}

export const BEHAVIOUR_CHANGE_VALUES = ["intro", "del", "mod", "no-effect"];
export const BISECT_MARK_VALUES = ["good", "bad"];

export const RESPONSE_FIELDS = [
  "target_behaviour",
  "has_compile_error",
  "behaviour_change",
  "behaviour_confidence",
  "sem_edits",
  "counterfactual_fix",
  "reasoning_chain",
  "reflection",
  "bisect_mark",
] as const;

const SEM_EDIT_FIELDS = [
  "id",
  "kind",
  "semantic",
  "behaviour",
  "likelihood",
  "dependency",
  "precedent",
] as const;

function isInteger(value: unknown): boolean {
  return typeof value === "number" && Number.isInteger(value);
}

function checkString(errors: FieldError[], field: string, value: unknown): void {
  if (typeof value !== "string") {
    errors.push({ field, reason: "expected a string" });
  }
}

export function validateResponseDocument(doc: unknown): FieldError[] {
  const errors: FieldError[] = [];
  if (typeof doc !== "object" || doc === null || Array.isArray(doc)) {
    return [{ field: "$", reason: "expected an object" }];
  }
  const record = doc as Record<string, unknown>;
  for (const field of RESPONSE_FIELDS) {
    if (!(field in record)) {
      errors.push({ field, reason: "missing" });
    }
  }
  for (const key of Object.keys(record)) {
    if (!(RESPONSE_FIELDS as readonly string[]).includes(key)) {
      errors.push({ field: key, reason: "unexpected property" });
    }
  }
  if (errors.length > 0) {
    return errors;
  }
  checkString(errors, "target_behaviour", record.target_behaviour);
  if (typeof record.has_compile_error !== "boolean") {
    errors.push({ field: "has_compile_error", reason: "expected a boolean" });
  }
  if (
    typeof record.behaviour_change !== "string" ||
    !BEHAVIOUR_CHANGE_VALUES.includes(record.behaviour_change)
  ) {
    errors.push({
      field: "behaviour_change",
      reason: `expected one of ${BEHAVIOUR_CHANGE_VALUES.join(", ")}`,
    });
  }
  const confidence = record.behaviour_confidence;
  if (!isInteger(confidence)) {
    errors.push({ field: "behaviour_confidence", reason: "expected an integer" });
  } else if ((confidence as number) < 0) {
    errors.push({ field: "behaviour_confidence", reason: "minimum 0" });
  } else if ((confidence as number) > 100) {
    errors.push({ field: "behaviour_confidence", reason: "maximum 100" });
  }
  if (!Array.isArray(record.sem_edits)) {
    errors.push({ field: "sem_edits", reason: "expected an array" });
  } else {
    record.sem_edits.forEach((entry, i) => {
      if (typeof entry !== "object" || entry === null || Array.isArray(entry)) {
        errors.push({ field: `sem_edits[${i}]`, reason: "expected an object" });
        return;
      }
      const edit = entry as Record<string, unknown>;
      for (const field of SEM_EDIT_FIELDS) {
        if (!(field in edit)) {
          errors.push({ field: `sem_edits[${i}].${field}`, reason: "missing" });
        }
      }
      for (const key of Object.keys(edit)) {
        if (!(SEM_EDIT_FIELDS as readonly string[]).includes(key)) {
          errors.push({
            field: `sem_edits[${i}].${key}`,
            reason: "unexpected property",
          });
        }
      }
      if ("semantic" in edit && typeof edit.semantic !== "boolean") {
        errors.push({ field: `sem_edits[${i}].semantic`, reason: "expected a boolean" });
      }
      if ("likelihood" in edit && !isInteger(edit.likelihood)) {
        errors.push({ field: `sem_edits[${i}].likelihood`, reason: "expected an integer" });
      }
    });
  }
  checkString(errors, "counterfactual_fix", record.counterfactual_fix);
  if (!Array.isArray(record.reasoning_chain)) {
    errors.push({ field: "reasoning_chain", reason: "expected an array" });
  } else {
    record.reasoning_chain.forEach((step, i) => {
      if (typeof step !== "string") {
        errors.push({ field: `reasoning_chain[${i}]`, reason: "expected a string" });
      }
    });
  }
  checkString(errors, "reflection", record.reflection);
  if (
    typeof record.bisect_mark !== "string" ||
    !BISECT_MARK_VALUES.includes(record.bisect_mark)
  ) {
    errors.push({ field: "bisect_mark", reason: "expected good or bad" });
  }
  return errors;
}

// Submit eligibility for the correction form: all fields valid AND a
// verdict actually chosen (an empty mark keeps the button disabled).
export function canSubmitCorrection(doc: unknown): boolean {
  if (typeof doc !== "object" || doc === null) {
    return false;
  }
  const mark = (doc as Record<string, unknown>).bisect_mark;
  if (mark !== "good" && mark !== "bad") {
    return false;
  }
  return validateResponseDocument(doc).length === 0;
}
