"""Scoring and statistics for completed bisect sessions.

A session is scored all-or-nothing: it counts as successful only when
every step's verdict matches the ground truth; one wrong verdict
invalidates the whole session.  Ground truth comes from scripted
fixtures or adjudicated logs supplied by the caller; it is never
inferred here.

The Wilcoxon signed-rank test is exact (full sign enumeration) for up
to twelve nonzero differences and falls back to a normal approximation
with continuity correction and tie-variance adjustment beyond that.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

from .errors import SembisectError

OUTCOMES_FORMAT = "outcomes/1"

EXACT_ENUMERATION_LIMIT = 12

# Bisect target taxonomy used to bucket sessions for the category table.
CATEGORIES = (
    "Display / Output Introduction",
    "Input Handling Introduction",
    "State-Transition Logic",
    "Decision-Making Rules",
    "Structural Refactor",
    "Robustness / Error Handling",
    "Flow-Control / Session Loop",
    "Runtime-Launch Safeguard",
    "Documentation / Cosmetic",
)


class NoSteps(SembisectError):
    pass


class AllZeroDifferences(SembisectError):
    pass


@dataclass(frozen=True)
class SessionOutcome:
    session_id: str
    category: str
    step_verdict_correct: tuple[bool, ...]
    wall_time: float
    steps: int

    def __post_init__(self):
        if self.steps != len(self.step_verdict_correct):
            raise ValueError("steps must equal the length of the step list")
        if self.wall_time < 0:
            raise ValueError("wall_time must be non-negative")


@dataclass(frozen=True)
class CategoryRow:
    category: str
    total: int
    successes: int
    percent: float


@dataclass(frozen=True)
class CategoryTable:
    rows: tuple[CategoryRow, ...]
    totals: CategoryRow


def score_session(outcome: SessionOutcome) -> bool:
    """True iff every step verdict was correct."""
    if not outcome.step_verdict_correct:
        warnings.warn(
            f"session {outcome.session_id} has no steps; scored as success",
            stacklevel=2,
        )
        return True
    return all(outcome.step_verdict_correct)


def _percent(successes: int, total: int) -> float:
    if total == 0:
        return 0.0
    raw = Decimal(100 * successes) / Decimal(total)
    return float(raw.quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


def build_table(outcomes: list[SessionOutcome]) -> CategoryTable:
    """Per-category success counts with percentages to one decimal."""
    grouped: dict[str, list[SessionOutcome]] = {}
    for outcome in outcomes:
        grouped.setdefault(outcome.category, []).append(outcome)
    ordered = [c for c in CATEGORIES if c in grouped]
    ordered += sorted(c for c in grouped if c not in CATEGORIES)
    rows = []
    for category in ordered:
        bucket = grouped[category]
        successes = sum(1 for o in bucket if score_session(o))
        rows.append(
            CategoryRow(category, len(bucket), successes, _percent(successes, len(bucket)))
        )
    total = sum(r.total for r in rows)
    successes = sum(r.successes for r in rows)
    totals = CategoryRow("Total", total, successes, _percent(successes, total))
    return CategoryTable(tuple(rows), totals)


def avg_time_per_step(outcomes: list[SessionOutcome]) -> float:
    """Pooled seconds per step: total wall time over total steps."""
    total_steps = sum(o.steps for o in outcomes)
    if total_steps == 0:
        raise NoSteps("no steps across the supplied outcomes")
    return sum(o.wall_time for o in outcomes) / total_steps


def _midranks(values: list[float]) -> list[float]:
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        rank = (i + j) / 2 + 1  # mid-rank of the tied block, 1-based
        for k in range(i, j + 1):
            ranks[order[k]] = rank
        i = j + 1
    return ranks


def _normal_cdf(z: float) -> float:
    return 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))


def wilcoxon_signed_rank(
    paired_diffs: list[float], sidedness: str = "two"
) -> tuple[float, float]:
    """Paired signed-rank test; returns (W, p).

    Zero differences are dropped.  |differences| are ranked with
    mid-ranks for ties; W = min(W+, W-).  The one-sided p-value is the
    lesser-tail probability of the observed statistic (the test in the
    observed direction); the two-sided p doubles it, capped at 1.

    Exact by enumerating all 2^m sign assignments for m <= 12; normal
    approximation with continuity correction and tie-adjusted variance
    otherwise.
    """
    if sidedness not in ("one", "two"):
        raise ValueError("sidedness must be 'one' or 'two'")
    diffs = [d for d in paired_diffs if d != 0]
    if not diffs:
        raise AllZeroDifferences("every paired difference is zero")
    m = len(diffs)
    ranks = _midranks([abs(d) for d in diffs])
    w_plus = sum(r for r, d in zip(ranks, diffs) if d > 0)
    w_minus = sum(r for r, d in zip(ranks, diffs) if d < 0)
    statistic = min(w_plus, w_minus)

    if m <= EXACT_ENUMERATION_LIMIT:
        eps = 1e-9
        hits = 0
        for mask in range(1 << m):
            total = 0.0
            for i in range(m):
                if mask & (1 << i):
                    total += ranks[i]
            if total <= statistic + eps:
                hits += 1
        p_one = hits / (1 << m)
    else:
        mu = m * (m + 1) / 4.0
        tie_counts: dict[float, int] = {}
        for r in ranks:
            tie_counts[r] = tie_counts.get(r, 0) + 1
        tie_adjust = sum(t**3 - t for t in tie_counts.values()) / 48.0
        sigma = math.sqrt(m * (m + 1) * (2 * m + 1) / 24.0 - tie_adjust)
        z = (statistic - mu + 0.5) / sigma
        p_one = _normal_cdf(z)
    p_one = min(max(p_one, 0.0), 1.0)
    if sidedness == "one":
        return statistic, p_one
    return statistic, min(1.0, 2.0 * p_one)


def load_outcomes(path: str) -> list[SessionOutcome]:
    """Read an outcomes file (one JSON record per line)."""
    outcomes = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            doc = json.loads(line)
            if doc.get("format") not in (None, OUTCOMES_FORMAT):
                raise ValueError(f"unsupported outcomes format {doc.get('format')!r}")
            outcomes.append(
                SessionOutcome(
                    session_id=doc["session_id"],
                    category=doc["category"],
                    step_verdict_correct=tuple(doc["step_verdict_correct"]),
                    wall_time=doc["wall_time"],
                    steps=doc["steps"],
                )
            )
    return outcomes


def render_table(table: CategoryTable, title: str = "") -> str:
    """Aligned text rendering of a category table."""
    rows = list(table.rows) + [table.totals]
    width = max(len(r.category) for r in rows)
    lines = []
    if title:
        lines.append(title)
    header = f"{'Category'.ljust(width)}  Total  Success      %"
    lines.append(header)
    lines.append("-" * len(header))
    for r in table.rows:
        lines.append(
            f"{r.category.ljust(width)}  {r.total:5d}  {r.successes:7d}  {r.percent:5.1f}"
        )
    lines.append("-" * len(header))
    t = table.totals
    lines.append(
        f"{t.category.ljust(width)}  {t.total:5d}  {t.successes:7d}  {t.percent:5.1f}"
    )
    return "\n".join(lines)


def table_records(table: CategoryTable) -> list[dict]:
    """Machine-readable rows, plot-ready."""
    records = [
        {
            "category": r.category,
            "total": r.total,
            "successes": r.successes,
            "percent": r.percent,
        }
        for r in table.rows
    ]
    records.append(
        {
            "category": table.totals.category,
            "total": table.totals.total,
            "successes": table.totals.successes,
            "percent": table.totals.percent,
        }
    )
    return records


def outcome_from_session(
    session, session_id: str, category: str, truth: dict[int, str]
) -> SessionOutcome:
    """Score a stored bisect session against supplied ground-truth marks.

    `truth` maps commit index to the correct mark ("good"/"bad"); it
    comes from scripted fixtures or human adjudication, never from the
    session itself.  Skip verdicts count as incorrect steps: the commit
    had a true mark the oracle failed to produce.
    """
    flags = tuple(
        step.verdict.mark == truth[step.commit_index] for step in session.steps
    )
    return SessionOutcome(
        session_id=session_id,
        category=category,
        step_verdict_correct=flags,
        wall_time=sum(step.elapsed for step in session.steps),
        steps=len(session.steps),
    )


def paired_time_differences(
    baseline: list[SessionOutcome], variant: list[SessionOutcome]
) -> list[float]:
    """Wall-time differences (baseline - variant), paired by session id."""
    by_id = {o.session_id: o for o in variant}
    diffs = []
    for outcome in baseline:
        other = by_id.get(outcome.session_id)
        if other is not None:
            diffs.append(outcome.wall_time - other.wall_time)
    return diffs
