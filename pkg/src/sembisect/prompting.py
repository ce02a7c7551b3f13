"""Prompt assembly for the commit classifier.

A prompt is a fixed scaffold: preamble explaining the diff markers,
the response-document skeleton, optional worked examples (oldest
first), the annotated diff under test, and a closing instruction.
Assembly is deterministic; equal inputs yield byte-equal text.

The total size is bounded by a character budget.  When the assembled
text exceeds it, worked examples are evicted oldest first; if the text
is still too large with none left, BudgetExceeded is raised.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

from .annotate import AnnotatedDiff, render
from .errors import SembisectError
from .schema import (
    CotResponse,
    SchemaViolation,
    serialize_response,
    validate_document,
)

if TYPE_CHECKING:  # pragma: no cover
    from .labeling import LabeledSample

PROMPT_FORMAT_VERSION = "bisect-prompt/1"
DEFAULT_CHAR_BUDGET = 24_000

Exemplar = tuple[str, CotResponse]  # (annotated diff text, reviewed response)


class BudgetExceeded(SembisectError):
    pass


_PREAMBLE = """\
You are a precise code-change analyst assisting a commit bisection.
Below is a behaviour under investigation, followed by the line-annotated
difference between one revision and its immediate predecessor in the
traversal.  Marker legend: lines starting with "+ " were added, lines
starting with "- " were deleted, lines starting with "~ " kept their
content but moved to a different position in the file, and lines
indented with two spaces are unchanged context.

Work through the questions below in order: first decide whether the new
revision even compiles; then whether the described behaviour changed and
how confident you are; list every semantic edit hypothesis you can
support with evidence from the diff; propose the fix that would avert
the failing behaviour; lay out your reasoning step by step; reflect on
the limits of your analysis; and only then commit to the final verdict.
"""

_SKELETON = """\
Fill in every field of this response document and output nothing else:
{
  "target_behaviour": "<short restatement of the behaviour under test>",
  "has_compile_error": <true|false>,
  "behaviour_change": "<one of: intro, del, mod, no-effect>",
  "behaviour_confidence": <integer 0-100>,
  "sem_edits": [
    {
      "id": "<edit identifier>",
      "kind": "<kind of edit>",
      "semantic": <true|false>,
      "behaviour": "<behaviour label after the edit>",
      "likelihood": <integer score>,
      "dependency": "<dependency context for the edit>",
      "precedent": "<preceding code context>"
    }
  ],
  "counterfactual_fix": "<fix that would avert the failing behaviour>",
  "reasoning_chain": ["<step 1>", "<step 2>", "<...>"],
  "reflection": "<self-assessment of confidence or limitations>",
  "bisect_mark": "<good|bad>"
}
"""

_FINAL_INSTRUCTION = (
    "Emit only the completed response document for the diff above."
)


@dataclass(frozen=True)
class PromptTemplate:
    target_behaviour: str
    question_block: str
    exemplars: tuple[Exemplar, ...]
    diff_text: str
    text: str
    char_budget: int


def _exemplar_section(index: int, exemplar: Exemplar) -> str:
    diff_text, response = exemplar
    return (
        f"Worked example {index + 1}:\n"
        f"{diff_text}\n"
        f"Completed document:\n"
        f"{serialize_response(response)}\n"
    )


def _assemble(target: str, exemplars: tuple[Exemplar, ...], diff_text: str) -> str:
    parts = [_PREAMBLE, _SKELETON]
    for i, ex in enumerate(exemplars):
        parts.append(_exemplar_section(i, ex))
    parts.append(f"Behaviour under test: {target}\n")
    parts.append(f"Commit diff:\n{diff_text or '(no changes)'}\n")
    parts.append(_FINAL_INSTRUCTION)
    return "\n".join(parts)


def build_prompt(
    target: str,
    diff: AnnotatedDiff | str,
    exemplars: list[Exemplar] | tuple[Exemplar, ...] = (),
    char_budget: int = DEFAULT_CHAR_BUDGET,
) -> PromptTemplate:
    """Assemble the classification prompt for one commit diff.

    `diff` may be an AnnotatedDiff or its already-rendered text (the
    form stored alongside labeled samples).
    """
    if not target:
        raise ValueError("target behaviour must be non-empty")
    for _, response in exemplars:
        validate_document(response.to_document())
    diff_text = diff if isinstance(diff, str) else render(diff)
    kept = tuple(exemplars)
    text = _assemble(target, kept, diff_text)
    while len(text) > char_budget and kept:
        kept = kept[1:]  # evict oldest first
        text = _assemble(target, kept, diff_text)
    if len(text) > char_budget:
        raise BudgetExceeded(
            f"prompt is {len(text)} chars with no exemplars left; "
            f"budget is {char_budget}"
        )
    return PromptTemplate(
        target_behaviour=target,
        question_block=_SKELETON,
        exemplars=kept,
        diff_text=diff_text,
        text=text,
        char_budget=char_budget,
    )


def validate_exemplar(sample: "LabeledSample") -> bool:
    """Whether a reviewed sample may enter the few-shot pool.

    True iff the sample was accepted or corrected by a reviewer and the
    response that would be shown (the correction, when present) is
    schema-valid.
    """
    if sample.review_state not in ("accepted", "corrected"):
        return False
    response = sample.corrected_response or sample.machine_response
    if response is None:
        return False
    try:
        validate_document(response.to_document())
    except SchemaViolation:
        return False
    return True
