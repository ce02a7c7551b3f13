"""Correct-and-commit labeling workflow.

Diffs are auto-labeled by the oracle; verdicts at or above the
confidence gate become auto-accepted samples, everything else queues
for human review.  A reviewer may accept, correct, or discard a queued
or auto-accepted sample; discarded is terminal.  Accepted and corrected
samples feed the few-shot exemplar pool and the exported fine-tuning
dataset (the training loop itself lives elsewhere).

The sample store keeps one JSON record per sample plus an append-only
audit log.  Reviews use optimistic versioning: a stale version is
rejected and the sample left untouched.
"""

from __future__ import annotations

import datetime as dt
import hashlib
import json
import os
import threading
from dataclasses import dataclass, replace

from .annotate import AnnotatedDiff, render
from .errors import SembisectError, StorageFailure
from .oracle import MARK_SKIP, Verdict
from .prompting import Exemplar, build_prompt, validate_exemplar
from .schema import CotResponse, validate_document

SAMPLE_FORMAT = "sample/1"
DATASET_FORMAT = "jsonl-v1"

STATE_AUTO_ACCEPTED = "auto-accepted"
STATE_PENDING = "pending"
STATE_ACCEPTED = "accepted"
STATE_CORRECTED = "corrected"
STATE_DISCARDED = "discarded"

REVIEWABLE_STATES = (STATE_PENDING, STATE_AUTO_ACCEPTED)
EXPORTABLE_STATES = (STATE_ACCEPTED, STATE_CORRECTED, STATE_AUTO_ACCEPTED)

ACTION_ACCEPT = "accept"
ACTION_CORRECT = "correct"
ACTION_DISCARD = "discard"

DEFAULT_CONFIDENCE_GATE = 0.8
DEFAULT_LICENSE_ALLOW_LIST = frozenset({"MIT", "Apache-2.0"})
DEFAULT_MIN_STARS = 1000
DEFAULT_ACTIVITY_WINDOW_DAYS = 365


class UnknownSample(SembisectError):
    pass


class InvalidTransition(SembisectError):
    pass


class StaleVersion(SembisectError):
    pass


@dataclass(frozen=True)
class Provenance:
    repo: str
    commit: str


@dataclass(frozen=True)
class LabeledSample:
    sample_id: str
    diff_text: str
    target_behaviour: str
    machine_response: CotResponse | None  # None when the oracle failed
    machine_confidence: float
    review_state: str
    corrected_response: CotResponse | None
    category: str
    provenance: Provenance
    version: int
    note: str | None = None

    def active_response(self) -> CotResponse | None:
        return self.corrected_response or self.machine_response


def sample_id_for(provenance: Provenance, diff_text: str, target: str) -> str:
    digest = hashlib.sha256(
        "\x1f".join([provenance.repo, provenance.commit, target, diff_text]).encode()
    )
    return digest.hexdigest()[:16]


def _sample_to_dict(sample: LabeledSample) -> dict:
    return {
        "format": SAMPLE_FORMAT,
        "sample_id": sample.sample_id,
        "diff_text": sample.diff_text,
        "target_behaviour": sample.target_behaviour,
        "machine_response": (
            sample.machine_response.to_document()
            if sample.machine_response
            else None
        ),
        "machine_confidence": sample.machine_confidence,
        "review_state": sample.review_state,
        "corrected_response": (
            sample.corrected_response.to_document()
            if sample.corrected_response
            else None
        ),
        "category": sample.category,
        "provenance": {
            "repo": sample.provenance.repo,
            "commit": sample.provenance.commit,
        },
        "version": sample.version,
        "note": sample.note,
    }


def _sample_from_dict(doc: dict) -> LabeledSample:
    return LabeledSample(
        sample_id=doc["sample_id"],
        diff_text=doc["diff_text"],
        target_behaviour=doc["target_behaviour"],
        machine_response=(
            validate_document(doc["machine_response"])
            if doc.get("machine_response")
            else None
        ),
        machine_confidence=doc["machine_confidence"],
        review_state=doc["review_state"],
        corrected_response=(
            validate_document(doc["corrected_response"])
            if doc.get("corrected_response")
            else None
        ),
        category=doc.get("category", ""),
        provenance=Provenance(**doc["provenance"]),
        version=doc["version"],
        note=doc.get("note"),
    )


class SampleStore:
    """Directory of per-sample records plus an append-only audit log.

    Concurrent readers are safe; writers serialize through one lock and
    reviews are guarded by the sample's version counter.
    """

    def __init__(self, root: str):
        self.root = root
        os.makedirs(root, exist_ok=True)
        self._lock = threading.Lock()

    def _path(self, sample_id: str) -> str:
        return os.path.join(self.root, f"{sample_id}.json")

    def _audit_path(self) -> str:
        return os.path.join(self.root, "audit.log")

    def _write(self, sample: LabeledSample) -> None:
        try:
            with open(self._path(sample.sample_id), "w", encoding="utf-8") as fh:
                json.dump(_sample_to_dict(sample), fh, ensure_ascii=False, indent=2)
                fh.write("\n")
        except OSError as exc:
            raise StorageFailure(f"cannot write sample: {exc}") from exc

    def _audit(self, event: dict) -> None:
        event = {"at": dt.datetime.now(dt.timezone.utc).isoformat(), **event}
        try:
            with open(self._audit_path(), "a", encoding="utf-8") as fh:
                fh.write(json.dumps(event, ensure_ascii=False) + "\n")
        except OSError as exc:
            raise StorageFailure(f"cannot append audit log: {exc}") from exc

    def put(self, sample: LabeledSample) -> None:
        with self._lock:
            self._write(sample)

    def get(self, sample_id: str) -> LabeledSample:
        path = self._path(sample_id)
        if not os.path.exists(path):
            raise UnknownSample(sample_id)
        try:
            with open(path, encoding="utf-8") as fh:
                return _sample_from_dict(json.load(fh))
        except (OSError, json.JSONDecodeError, KeyError) as exc:
            raise StorageFailure(f"cannot read sample {sample_id}: {exc}") from exc

    def all_samples(self) -> list[LabeledSample]:
        samples = []
        for name in sorted(os.listdir(self.root)):
            if name.endswith(".json"):
                samples.append(self.get(name[: -len(".json")]))
        return samples

    def pending(self) -> list[LabeledSample]:
        queue = [s for s in self.all_samples() if s.review_state == STATE_PENDING]
        queue.sort(key=lambda s: (s.machine_confidence, s.sample_id))
        return queue

    def review(
        self,
        sample_id: str,
        action: str,
        reviewer: str,
        version: int,
        corrected_response: CotResponse | dict | None = None,
    ) -> LabeledSample:
        """Apply one review action under optimistic versioning."""
        with self._lock:
            sample = self.get(sample_id)
            if version != sample.version:
                raise StaleVersion(
                    f"sample {sample_id} is at version {sample.version}, "
                    f"review supplied {version}"
                )
            if sample.review_state not in REVIEWABLE_STATES:
                raise InvalidTransition(
                    f"cannot {action} a sample in state {sample.review_state}"
                )
            if action == ACTION_ACCEPT:
                updated = replace(
                    sample,
                    review_state=STATE_ACCEPTED,
                    version=sample.version + 1,
                )
            elif action == ACTION_CORRECT:
                if corrected_response is None:
                    raise InvalidTransition("correct requires a replacement response")
                if isinstance(corrected_response, CotResponse):
                    corrected_response = corrected_response.to_document()
                corrected = validate_document(corrected_response)
                updated = replace(
                    sample,
                    review_state=STATE_CORRECTED,
                    corrected_response=corrected,
                    version=sample.version + 1,
                )
            elif action == ACTION_DISCARD:
                updated = replace(
                    sample,
                    review_state=STATE_DISCARDED,
                    version=sample.version + 1,
                )
            else:
                raise InvalidTransition(f"unknown review action {action!r}")
            self._write(updated)
            self._audit(
                {
                    "sample_id": sample_id,
                    "reviewer": reviewer,
                    "action": action,
                    "from_state": sample.review_state,
                    "to_state": updated.review_state,
                    "version": updated.version,
                }
            )
            return updated


def review(
    store: SampleStore,
    sample_id: str,
    action: str,
    reviewer: str,
    version: int,
    corrected_response=None,
) -> LabeledSample:
    return store.review(sample_id, action, reviewer, version, corrected_response)


def auto_label(
    diffs: list[AnnotatedDiff | str],
    target: str,
    oracle,
    *,
    threshold: float = DEFAULT_CONFIDENCE_GATE,
    categories: list[str] | None = None,
    provenances: list[Provenance] | None = None,
    exemplars: tuple[Exemplar, ...] = (),
    store: SampleStore | None = None,
) -> list[LabeledSample]:
    """Label each diff with the oracle and gate by confidence.

    `oracle` is a classify capability: PromptTemplate -> Verdict.  A
    per-diff oracle failure yields a pending sample with a note rather
    than silently dropping the diff.
    """
    samples: list[LabeledSample] = []
    for pos, diff in enumerate(diffs):
        diff_text = diff if isinstance(diff, str) else render(diff)
        category = categories[pos] if categories else ""
        provenance = (
            provenances[pos] if provenances else Provenance("unknown", f"diff-{pos}")
        )
        prompt = build_prompt(target, diff_text, exemplars)
        note = None
        try:
            verdict: Verdict = oracle(prompt)
        except Exception as exc:  # noqa: BLE001 - failures become pending samples
            verdict = None
            note = f"oracle error: {exc}"
        if verdict is None or verdict.mark == MARK_SKIP or not verdict.samples:
            response = verdict.samples[0] if verdict and verdict.samples else None
            confidence = verdict.confidence if verdict else 0.0
            if note is None:
                note = f"oracle returned no usable verdict ({verdict.reason})"
            state = STATE_PENDING
        else:
            majority = [s for s in verdict.samples if s.bisect_mark == verdict.mark]
            response = majority[0] if majority else verdict.samples[0]
            confidence = verdict.confidence
            state = (
                STATE_AUTO_ACCEPTED if confidence >= threshold else STATE_PENDING
            )
        sample = LabeledSample(
            sample_id=sample_id_for(provenance, diff_text, target),
            diff_text=diff_text,
            target_behaviour=target,
            machine_response=response,
            machine_confidence=confidence,
            review_state=state,
            corrected_response=None,
            category=category,
            provenance=provenance,
            version=1,
            note=note,
        )
        samples.append(sample)
        if store is not None:
            store.put(sample)
    return samples


def export_dataset(store: SampleStore, fmt: str, out_path: str) -> int:
    """Write accepted/corrected/auto-accepted samples as training records.

    One JSON record per line, ordered by sample id; repeated exports of
    an unchanged store are byte-identical.  Returns the record count.
    """
    if fmt != DATASET_FORMAT:
        raise ValueError(f"unknown export format {fmt!r}")
    records = []
    for sample in sorted(store.all_samples(), key=lambda s: s.sample_id):
        if sample.review_state not in EXPORTABLE_STATES:
            continue
        response = sample.active_response()
        if response is None:
            continue
        prompt = build_prompt(sample.target_behaviour, sample.diff_text)
        records.append(
            {
                "format": DATASET_FORMAT,
                "prompt": prompt.text,
                "completion": json.dumps(
                    response.to_document(), ensure_ascii=False, separators=(",", ":")
                ),
                "category": sample.category,
                "provenance": {
                    "repo": sample.provenance.repo,
                    "commit": sample.provenance.commit,
                },
            }
        )
    try:
        with open(out_path, "w", encoding="utf-8") as fh:
            for record in records:
                fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True))
                fh.write("\n")
    except OSError as exc:
        raise StorageFailure(f"cannot write dataset: {exc}") from exc
    return len(records)


@dataclass(frozen=True)
class RepoDescriptor:
    name: str
    path: str
    stars: int
    last_activity: dt.date
    license_id: str


def harvest_candidates(
    repos: list[RepoDescriptor],
    *,
    min_stars: int = DEFAULT_MIN_STARS,
    max_age_days: int = DEFAULT_ACTIVITY_WINDOW_DAYS,
    allowed_licenses: frozenset[str] = DEFAULT_LICENSE_ALLOW_LIST,
    today: dt.date | None = None,
) -> list[tuple[RepoDescriptor, tuple[str, str]]]:
    """Adjacent-commit pairs from repositories passing the intake filter.

    Keeps repositories with at least `min_stars` stars, activity within
    the window, and a licence on the allow-list.  Descriptors whose path
    is empty pass the filter but contribute no pairs (metadata-only
    candidates).
    """
    from .repo import first_parent_history

    today = today or dt.date.today()
    pairs: list[tuple[RepoDescriptor, tuple[str, str]]] = []
    for descriptor in repos:
        if descriptor.stars < min_stars:
            continue
        if (today - descriptor.last_activity).days > max_age_days:
            continue
        if descriptor.license_id not in allowed_licenses:
            continue
        if not descriptor.path:
            continue
        history = first_parent_history(descriptor.path)
        for older, newer in zip(history, history[1:]):
            pairs.append((descriptor, (older, newer)))
    return pairs


class ExemplarPool:
    """Few-shot exemplars per category with bounded, recency-kept slots."""

    def __init__(self, capacity_per_category: int = 4):
        self.capacity = capacity_per_category
        self._by_category: dict[str, list[LabeledSample]] = {}

    def add(self, sample: LabeledSample) -> None:
        if not validate_exemplar(sample):
            raise ValueError(
                "only schema-valid accepted/corrected samples may join the pool"
            )
        bucket = self._by_category.setdefault(sample.category, [])
        bucket[:] = [s for s in bucket if s.sample_id != sample.sample_id]
        bucket.append(sample)
        if len(bucket) > self.capacity:
            del bucket[0]  # oldest out

    def members(self) -> list[LabeledSample]:
        return [s for bucket in self._by_category.values() for s in bucket]

    def select(self, category: str, limit: int = 4) -> list[Exemplar]:
        """Category-matching exemplars first, most recent first."""
        matching = list(reversed(self._by_category.get(category, [])))
        others = [
            s
            for cat, bucket in sorted(self._by_category.items())
            if cat != category
            for s in reversed(bucket)
        ]
        chosen = (matching + others)[:limit]
        return [(s.diff_text, s.active_response()) for s in chosen]
