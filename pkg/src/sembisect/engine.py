"""Binary search over a commit sequence driven by oracle verdicts.

Two modes:

* classic - textbook bisect.  Assumes the oracle is monotone (every
  commit before the fault is good, every commit from it onward is bad)
  and trusts each verdict unconditionally.  A Skip verdict aborts the
  session, mirroring plain `git bisect` with an undecidable predicate.

* robust - tolerates unjudgeable commits and occasional flipped
  verdicts.  Skips defer the probed commit and deflect to the nearest
  untested neighbour of the midpoint.  A good/bad verdict whose
  confidence falls below the suspicion bar is immediately re-queried up
  to `requery_limit` times and the per-commit majority wins.  If the
  surviving evidence ever places a good above a bad, the commits
  involved are re-queried once more under the same budget; if the
  contradiction survives, the session ends with a Range covering the
  flaky region instead of fabricating a point answer.

With a clean oracle the robust mode never re-queries, so it probes the
same midpoints as classic and returns the identical result.

The engine asks the oracle one commit index at a time; each call is
recorded as a numbered step, so a stored session can be replayed
verdict-for-verdict.
"""

from __future__ import annotations

import json
import os
import time
import uuid
from dataclasses import dataclass

from .errors import StorageFailure
from .oracle import MARK_BAD, MARK_GOOD, MARK_SKIP, Verdict
from .repo import CommitId, CommitSequence
from .schema import validate_document

SESSION_FORMAT = "session/1"

MODE_CLASSIC = "classic"
MODE_ROBUST = "robust"

ABORT_SKIP_IN_CLASSIC = "skip-in-classic"
ABORT_EXHAUSTED_SKIPS = "exhausted-skips"


@dataclass(frozen=True)
class RobustPolicy:
    requery_limit: int = 2
    suspect_confidence: float = 0.9


@dataclass(frozen=True)
class BisectStep:
    step_number: int
    commit_index: int
    verdict: Verdict
    elapsed: float
    prompt_hash: str | None = None


@dataclass(frozen=True)
class Localized:
    index: int


@dataclass(frozen=True)
class Range:
    lo_index: int
    hi_index: int

    def __post_init__(self):
        if self.lo_index >= self.hi_index:
            raise ValueError("range must span at least two commits")


@dataclass(frozen=True)
class Aborted:
    reason: str


Result = Localized | Range | Aborted


@dataclass
class BisectSession:
    sequence: CommitSequence
    target_behaviour: str
    steps: list[BisectStep]
    result: Result
    mode: str


class _Recorder:
    def __init__(self, oracle):
        self.oracle = oracle
        self.steps: list[BisectStep] = []

    def probe(self, index: int) -> Verdict:
        started = time.perf_counter()
        verdict = self.oracle(index)
        elapsed = time.perf_counter() - started
        self.steps.append(
            BisectStep(
                step_number=len(self.steps) + 1,
                commit_index=index,
                verdict=verdict,
                elapsed=elapsed,
                prompt_hash=getattr(self.oracle, "last_prompt_hash", None),
            )
        )
        return verdict


def run_classic(seq: CommitSequence, oracle, target: str) -> BisectSession:
    """Plain binary search; endpoints are trusted and never queried."""
    recorder = _Recorder(oracle)
    lo, hi = seq.known_good, seq.known_bad
    result: Result | None = None
    while hi - lo > 1:
        mid = (lo + hi) // 2
        verdict = recorder.probe(mid)
        if verdict.mark == MARK_SKIP:
            result = Aborted(ABORT_SKIP_IN_CLASSIC)
            break
        if verdict.mark == MARK_GOOD:
            lo = mid
        else:
            hi = mid
    if result is None:
        result = Localized(hi)
    return BisectSession(seq, target, recorder.steps, result, MODE_CLASSIC)


class _MarkBook:
    """Raw verdict marks per commit plus derived majority marks."""

    def __init__(self):
        self.raw: dict[int, list[str]] = {}

    def add(self, index: int, mark: str) -> None:
        if mark != MARK_SKIP:
            self.raw.setdefault(index, []).append(mark)

    def effective(self, index: int) -> str | None:
        marks = self.raw.get(index, [])
        good = marks.count(MARK_GOOD)
        bad = marks.count(MARK_BAD)
        if good == bad:
            return None
        return MARK_GOOD if good > bad else MARK_BAD

    def effective_marks(self) -> dict[int, str]:
        out = {}
        for index in self.raw:
            mark = self.effective(index)
            if mark is not None:
                out[index] = mark
        return out

    def live_conflict_indices(self) -> set[int]:
        """Commits involved in an unexplained good-above-bad violation.

        A recorded mark counts as live evidence unless the commit's own
        majority already outvoted it; a flake that lost its per-commit
        vote does not keep accusing other commits.
        """
        good_at = set()
        bad_at = set()
        for i, marks in self.raw.items():
            effective = self.effective(i)
            if MARK_GOOD in marks and effective != MARK_BAD:
                good_at.add(i)
            if MARK_BAD in marks and effective != MARK_GOOD:
                bad_at.add(i)
        involved: set[int] = set()
        for g in good_at:
            for b in bad_at:
                if g > b:
                    involved.add(g)
                    involved.add(b)
        return involved


def _flaky_range(seq: CommitSequence, effective: dict[int, str]) -> Range:
    """Last prefix-consistent good + 1 .. first suffix-consistent bad."""
    goods = {i for i, m in effective.items() if m == MARK_GOOD}
    bads = {i for i, m in effective.items() if m == MARK_BAD}
    min_bad = min(bads) if bads else seq.known_bad
    max_good = max(goods) if goods else seq.known_good
    last_consistent_good = max(
        [seq.known_good] + [g for g in goods if g < min_bad]
    )
    first_consistent_bad = min(
        [seq.known_bad] + [b for b in bads if b > max_good]
    )
    return Range(last_consistent_good + 1, first_consistent_bad)


def run_robust(
    seq: CommitSequence,
    oracle,
    target: str,
    policy: RobustPolicy = RobustPolicy(),
) -> BisectSession:
    recorder = _Recorder(oracle)
    book = _MarkBook()
    deferred: set[int] = set()  # skipped or unresolvable commits
    corroborated: set[int] = set()
    adjudicated: set[int] = set()

    def requery(index: int) -> None:
        for _ in range(policy.requery_limit):
            book.add(index, recorder.probe(index).mark)

    def bounds() -> tuple[int, int] | None:
        effective = book.effective_marks()
        goods = [i for i, m in effective.items() if m == MARK_GOOD]
        bads = [i for i, m in effective.items() if m == MARK_BAD]
        if goods and bads and max(goods) > min(bads):
            return None  # contradiction survives majority voting
        lo = max([seq.known_good] + goods)
        hi = min([seq.known_bad] + bads)
        return lo, hi

    result: Result | None = None
    lo, hi = seq.known_good, seq.known_bad
    while hi - lo > 1:
        mid = (lo + hi) // 2
        candidates = [
            i
            for i in range(lo + 1, hi)
            if i not in deferred and book.effective(i) is None
        ]
        if not candidates:
            result = Aborted(ABORT_EXHAUSTED_SKIPS)
            break
        index = min(candidates, key=lambda i: (abs(i - mid), i))
        verdict = recorder.probe(index)
        if verdict.mark == MARK_SKIP:
            deferred.add(index)
            continue
        book.add(index, verdict.mark)
        if (
            verdict.confidence < policy.suspect_confidence
            and index not in corroborated
        ):
            corroborated.add(index)
            requery(index)
            if book.effective(index) is None:
                deferred.add(index)  # majority tied; treat as unjudgeable
        conflicted = book.live_conflict_indices()
        fresh = conflicted - adjudicated
        if fresh:
            for i in sorted(fresh):
                requery(i)
            adjudicated |= conflicted
        if conflicted:
            ties = [i for i in conflicted if book.effective(i) is None]
            if ties or bounds() is None:
                result = _flaky_range(seq, book.effective_marks())
                break
        new_bounds = bounds()
        if new_bounds is None:
            result = _flaky_range(seq, book.effective_marks())
            break
        lo, hi = new_bounds
    if result is None:
        result = Localized(hi)
    return BisectSession(seq, target, recorder.steps, result, MODE_ROBUST)


def result_to_dict(result: Result) -> dict:
    if isinstance(result, Localized):
        return {"kind": "localized", "index": result.index}
    if isinstance(result, Range):
        return {
            "kind": "range",
            "lo_index": result.lo_index,
            "hi_index": result.hi_index,
        }
    return {"kind": "aborted", "reason": result.reason}


def result_from_dict(doc: dict) -> Result:
    kind = doc["kind"]
    if kind == "localized":
        return Localized(doc["index"])
    if kind == "range":
        return Range(doc["lo_index"], doc["hi_index"])
    if kind == "aborted":
        return Aborted(doc["reason"])
    raise ValueError(f"unknown result kind {kind!r}")


def _verdict_to_dict(verdict: Verdict) -> dict:
    return {
        "mark": verdict.mark,
        "confidence": verdict.confidence,
        "reason": verdict.reason,
        "latency": verdict.latency,
        "samples": [s.to_document() for s in verdict.samples],
    }


def _verdict_from_dict(doc: dict) -> Verdict:
    return Verdict(
        mark=doc["mark"],
        confidence=doc["confidence"],
        samples=tuple(validate_document(d) for d in doc["samples"]),
        latency=doc["latency"],
        reason=doc["reason"],
    )


class SessionStore:
    """One newline-delimited file per session: header, then one step each."""

    def __init__(self, root: str):
        self.root = root
        os.makedirs(root, exist_ok=True)

    def _path(self, session_id: str) -> str:
        return os.path.join(self.root, f"{session_id}.ndjson")

    def save(self, session: BisectSession) -> str:
        session_id = uuid.uuid4().hex[:12]
        while os.path.exists(self._path(session_id)):
            session_id = uuid.uuid4().hex[:12]
        header = {
            "record": "header",
            "format": SESSION_FORMAT,
            "session_id": session_id,
            "mode": session.mode,
            "target_behaviour": session.target_behaviour,
            "repo_path": session.sequence.repo_path,
            "commits": [c.value for c in session.sequence.commits],
            "known_good": session.sequence.known_good,
            "known_bad": session.sequence.known_bad,
            "result": result_to_dict(session.result),
            "step_count": len(session.steps),
        }
        lines = [json.dumps(header, ensure_ascii=False)]
        for step in session.steps:
            lines.append(
                json.dumps(
                    {
                        "record": "step",
                        "step_number": step.step_number,
                        "commit_index": step.commit_index,
                        "elapsed": step.elapsed,
                        "prompt_hash": step.prompt_hash,
                        "verdict": _verdict_to_dict(step.verdict),
                    },
                    ensure_ascii=False,
                )
            )
        try:
            with open(self._path(session_id), "w", encoding="utf-8") as fh:
                fh.write("\n".join(lines) + "\n")
        except OSError as exc:
            raise StorageFailure(f"cannot persist session: {exc}") from exc
        return session_id

    def list_ids(self) -> list[str]:
        try:
            names = sorted(os.listdir(self.root))
        except OSError as exc:
            raise StorageFailure(f"cannot list sessions: {exc}") from exc
        return [n[: -len(".ndjson")] for n in names if n.endswith(".ndjson")]

    def load(self, session_id: str) -> BisectSession:
        path = self._path(session_id)
        if not os.path.exists(path):
            raise StorageFailure(f"no such session: {session_id}")
        try:
            with open(path, encoding="utf-8") as fh:
                records = [json.loads(line) for line in fh if line.strip()]
        except (OSError, json.JSONDecodeError) as exc:
            raise StorageFailure(f"cannot read session {session_id}: {exc}") from exc
        header = records[0]
        if header.get("format") != SESSION_FORMAT:
            raise StorageFailure(
                f"unsupported session format {header.get('format')!r}"
            )
        steps = [
            BisectStep(
                step_number=r["step_number"],
                commit_index=r["commit_index"],
                verdict=_verdict_from_dict(r["verdict"]),
                elapsed=r["elapsed"],
                prompt_hash=r.get("prompt_hash"),
            )
            for r in records[1:]
        ]
        seq = CommitSequence(
            commits=tuple(CommitId(v) for v in header["commits"]),
            known_good=header["known_good"],
            known_bad=header["known_bad"],
            repo_path=header["repo_path"],
        )
        return BisectSession(
            sequence=seq,
            target_behaviour=header["target_behaviour"],
            steps=steps,
            result=result_from_dict(header["result"]),
            mode=header["mode"],
        )


def record_session(session: BisectSession, sink: SessionStore) -> str:
    """Persist one completed session; returns its store id."""
    return sink.save(session)


class _ReplayOracle:
    """Feeds back the recorded verdicts, checking probe order as it goes."""

    def __init__(self, steps: list[BisectStep]):
        self._steps = steps
        self._cursor = 0

    def __call__(self, index: int) -> Verdict:
        if self._cursor >= len(self._steps):
            raise ValueError("replay ran past the recorded steps")
        step = self._steps[self._cursor]
        if step.commit_index != index:
            raise ValueError(
                f"replay diverged: step {step.step_number} probed "
                f"{step.commit_index}, replay asked for {index}"
            )
        self._cursor += 1
        return step.verdict


def replay_session(
    session: BisectSession, policy: RobustPolicy = RobustPolicy()
) -> Result:
    """Re-run the search against the recorded verdicts."""
    oracle = _ReplayOracle(session.steps)
    if session.mode == MODE_CLASSIC:
        rerun = run_classic(session.sequence, oracle, session.target_behaviour)
    else:
        rerun = run_robust(
            session.sequence, oracle, session.target_behaviour, policy
        )
    return rerun.result
