"""The structured response document emitted by the classifier.

A response carries nine required fields, ending in the binary
`bisect_mark` verdict.  Validation is strict: required fields, value
ranges, fixed vocabularies, and no extra properties anywhere.  The
accepted `behaviour_change` vocabulary is {intro, del, mod, no-effect},
one label per change class.

Documents arriving from a model are rarely bare JSON, so extraction
scans the raw text first: fenced code blocks take priority, then the
first balanced top-level `{...}` block that parses as JSON.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from .errors import SembisectError

BEHAVIOUR_CHANGE_VALUES = ("intro", "del", "mod", "no-effect")
BISECT_MARK_VALUES = ("good", "bad")

RESPONSE_FIELDS = (
    "target_behaviour",
    "has_compile_error",
    "behaviour_change",
    "behaviour_confidence",
    "sem_edits",
    "counterfactual_fix",
    "reasoning_chain",
    "reflection",
    "bisect_mark",
)

SEM_EDIT_FIELDS = (
    "id",
    "kind",
    "semantic",
    "behaviour",
    "likelihood",
    "dependency",
    "precedent",
)


class NoDocumentFound(SembisectError):
    pass


class SchemaViolation(SembisectError):
    def __init__(self, field: str, reason: str):
        self.field = field
        self.reason = reason
        super().__init__(f"{field}: {reason}")


@dataclass(frozen=True)
class SemEdit:
    id: str
    kind: str
    semantic: bool
    behaviour: str
    likelihood: int
    dependency: str
    precedent: str

    def to_document(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "semantic": self.semantic,
            "behaviour": self.behaviour,
            "likelihood": self.likelihood,
            "dependency": self.dependency,
            "precedent": self.precedent,
        }


@dataclass(frozen=True)
class CotResponse:
    target_behaviour: str
    has_compile_error: bool
    behaviour_change: str
    behaviour_confidence: int
    sem_edits: tuple[SemEdit, ...]
    counterfactual_fix: str
    reasoning_chain: tuple[str, ...]
    reflection: str
    bisect_mark: str

    def to_document(self) -> dict:
        return {
            "target_behaviour": self.target_behaviour,
            "has_compile_error": self.has_compile_error,
            "behaviour_change": self.behaviour_change,
            "behaviour_confidence": self.behaviour_confidence,
            "sem_edits": [e.to_document() for e in self.sem_edits],
            "counterfactual_fix": self.counterfactual_fix,
            "reasoning_chain": list(self.reasoning_chain),
            "reflection": self.reflection,
            "bisect_mark": self.bisect_mark,
        }


def serialize_response(response: CotResponse) -> str:
    """Canonical single-line JSON form; stable byte-for-byte."""
    return json.dumps(response.to_document(), ensure_ascii=False, separators=(",", ":"))


def _is_integer(value) -> bool:
    # Follows JSON Schema semantics: true/false are not integers, whole
    # floats are.
    if isinstance(value, bool):
        return False
    if isinstance(value, int):
        return True
    return isinstance(value, float) and value.is_integer()


def _check_string(field: str, value) -> None:
    if not isinstance(value, str):
        raise SchemaViolation(field, "expected a string")


def _check_bool(field: str, value) -> None:
    if not isinstance(value, bool):
        raise SchemaViolation(field, "expected a boolean")


def _check_sem_edit(index: int, entry) -> SemEdit:
    where = f"sem_edits[{index}]"
    if not isinstance(entry, dict):
        raise SchemaViolation(where, "expected an object")
    for name in SEM_EDIT_FIELDS:
        if name not in entry:
            raise SchemaViolation(f"{where}.{name}", "missing")
    for name in entry:
        if name not in SEM_EDIT_FIELDS:
            raise SchemaViolation(f"{where}.{name}", "unexpected property")
    _check_string(f"{where}.id", entry["id"])
    _check_string(f"{where}.kind", entry["kind"])
    _check_bool(f"{where}.semantic", entry["semantic"])
    _check_string(f"{where}.behaviour", entry["behaviour"])
    if not _is_integer(entry["likelihood"]):
        raise SchemaViolation(f"{where}.likelihood", "expected an integer")
    _check_string(f"{where}.dependency", entry["dependency"])
    _check_string(f"{where}.precedent", entry["precedent"])
    return SemEdit(
        id=entry["id"],
        kind=entry["kind"],
        semantic=entry["semantic"],
        behaviour=entry["behaviour"],
        likelihood=int(entry["likelihood"]),
        dependency=entry["dependency"],
        precedent=entry["precedent"],
    )


def validate_document(doc) -> CotResponse:
    """Check every constraint and return the typed response.

    Raises SchemaViolation naming the first offending field (fields are
    checked in schema order, extra properties last).
    """
    if not isinstance(doc, dict):
        raise SchemaViolation("$", "expected an object")
    for name in RESPONSE_FIELDS:
        if name not in doc:
            raise SchemaViolation(name, "missing")
    for name in doc:
        if name not in RESPONSE_FIELDS:
            raise SchemaViolation(name, "unexpected property")
    _check_string("target_behaviour", doc["target_behaviour"])
    _check_bool("has_compile_error", doc["has_compile_error"])
    _check_string("behaviour_change", doc["behaviour_change"])
    if doc["behaviour_change"] not in BEHAVIOUR_CHANGE_VALUES:
        raise SchemaViolation(
            "behaviour_change",
            "unknown value, expected one of " + ", ".join(BEHAVIOUR_CHANGE_VALUES),
        )
    conf = doc["behaviour_confidence"]
    if not _is_integer(conf):
        raise SchemaViolation("behaviour_confidence", "expected an integer")
    if conf < 0:
        raise SchemaViolation("behaviour_confidence", "minimum 0")
    if conf > 100:
        raise SchemaViolation("behaviour_confidence", "maximum 100")
    if not isinstance(doc["sem_edits"], list):
        raise SchemaViolation("sem_edits", "expected an array")
    sem_edits = tuple(
        _check_sem_edit(i, entry) for i, entry in enumerate(doc["sem_edits"])
    )
    _check_string("counterfactual_fix", doc["counterfactual_fix"])
    chain = doc["reasoning_chain"]
    if not isinstance(chain, list):
        raise SchemaViolation("reasoning_chain", "expected an array")
    for i, step in enumerate(chain):
        _check_string(f"reasoning_chain[{i}]", step)
    _check_string("reflection", doc["reflection"])
    _check_string("bisect_mark", doc["bisect_mark"])
    if doc["bisect_mark"] not in BISECT_MARK_VALUES:
        raise SchemaViolation(
            "bisect_mark", "unknown value, expected good or bad"
        )
    return CotResponse(
        target_behaviour=doc["target_behaviour"],
        has_compile_error=doc["has_compile_error"],
        behaviour_change=doc["behaviour_change"],
        behaviour_confidence=int(conf),
        sem_edits=sem_edits,
        counterfactual_fix=doc["counterfactual_fix"],
        reasoning_chain=tuple(chain),
        reflection=doc["reflection"],
        bisect_mark=doc["bisect_mark"],
    )


def is_valid_document(doc) -> bool:
    try:
        validate_document(doc)
        return True
    except SchemaViolation:
        return False


_FENCE_RE = re.compile(r"```[a-zA-Z0-9_-]*\n(.*?)```", re.DOTALL)


def _balanced_blocks(text: str):
    """Yield top-level {...} substrings, string- and escape-aware."""
    depth = 0
    start = -1
    in_string = False
    escaped = False
    for pos, ch in enumerate(text):
        if in_string:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                in_string = False
            continue
        if ch == '"':
            if depth > 0:
                in_string = True
        elif ch == "{":
            if depth == 0:
                start = pos
            depth += 1
        elif ch == "}":
            if depth > 0:
                depth -= 1
                if depth == 0:
                    yield text[start : pos + 1]


def extract_document(raw: str) -> dict:
    """Pull the first JSON document out of possibly prose-wrapped output."""
    candidates: list[str] = []
    for fenced in _FENCE_RE.findall(raw):
        candidates.extend(_balanced_blocks(fenced))
    candidates.extend(_balanced_blocks(raw))
    for block in candidates:
        try:
            doc = json.loads(block)
        except json.JSONDecodeError:
            continue
        if isinstance(doc, dict):
            return doc
    raise NoDocumentFound("no JSON document found in model output")


def parse_response(raw: str) -> CotResponse:
    """Extract and validate the response document from raw model output."""
    return validate_document(extract_document(raw))
