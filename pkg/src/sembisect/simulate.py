"""Seeded synthetic noisy-oracle experiments.

Models a predicate that misbehaves inside a flaky region around the
true first-bad commit: each call on an in-region commit flips its
verdict with a fixed probability, independently per call, so repeated
queries of the same commit can disagree.  Verdict confidence reflects
the flakiness: in-region verdicts report lower confidence than
out-of-region ones whenever the flip probability is nonzero.

Everything is driven by an explicit seed; two runs with the same seed
produce byte-identical reports.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .engine import (
    Localized,
    Range,
    RobustPolicy,
    run_classic,
    run_robust,
)
from .oracle import MARK_BAD, MARK_GOOD, REASON_CONSENSUS, Verdict
from .repo import CommitId, CommitSequence

OUT_OF_REGION_CONFIDENCE = 0.95
IN_REGION_CONFIDENCE = 0.84


@dataclass(frozen=True)
class NoiseModel:
    flip_probability: float
    flaky_region_width: int

    def confidence_at(self, in_region: bool) -> float:
        if in_region and self.flip_probability > 0:
            return IN_REGION_CONFIDENCE
        return OUT_OF_REGION_CONFIDENCE


def synthetic_sequence(n_commits: int) -> CommitSequence:
    commits = tuple(CommitId(f"{i:040x}") for i in range(n_commits + 1))
    return CommitSequence(
        commits=commits,
        known_good=0,
        known_bad=n_commits,
        repo_path="<synthetic>",
    )


class NoisyOracle:
    """Per-call noisy predicate around a fixed first-bad commit."""

    def __init__(self, first_bad: int, noise: NoiseModel, rng: random.Random):
        self.first_bad = first_bad
        self.noise = noise
        self.rng = rng
        half = noise.flaky_region_width // 2
        self.region = range(
            first_bad - half, first_bad - half + noise.flaky_region_width
        )

    def __call__(self, index: int) -> Verdict:
        truth = MARK_GOOD if index < self.first_bad else MARK_BAD
        in_region = index in self.region
        mark = truth
        if in_region and self.rng.random() < self.noise.flip_probability:
            mark = MARK_BAD if truth == MARK_GOOD else MARK_GOOD
        return Verdict(
            mark=mark,
            confidence=self.noise.confidence_at(in_region),
            samples=(),
            latency=0.0,
            reason=REASON_CONSENSUS,
        )


@dataclass(frozen=True)
class SimulationReport:
    sessions: int
    n_commits: int
    flip_probability: float
    flaky_region_width: int
    requery_limit: int
    seed: int
    classic_exact: int
    classic_aborted: int
    robust_exact: int
    robust_correct_range: int
    robust_aborted: int
    classic_steps_total: int
    robust_steps_total: int

    @property
    def classic_success_rate(self) -> float:
        return self.classic_exact / self.sessions

    @property
    def robust_success_rate(self) -> float:
        """Exact localizations plus ranges that contain the true fault."""
        return (self.robust_exact + self.robust_correct_range) / self.sessions


def run_noise_experiment(
    *,
    n_commits: int = 32,
    flip_probability: float = 0.1,
    flaky_region_width: int = 5,
    sessions: int = 1000,
    seed: int = 0,
    requery_limit: int = 2,
) -> SimulationReport:
    """Classic vs robust success over seeded noisy sessions."""
    noise = NoiseModel(flip_probability, flaky_region_width)
    policy = RobustPolicy(requery_limit=requery_limit)
    seq = synthetic_sequence(n_commits)
    picker = random.Random(seed)
    classic_exact = classic_aborted = 0
    robust_exact = robust_correct_range = robust_aborted = 0
    classic_steps = robust_steps = 0
    for run_index in range(sessions):
        first_bad = picker.randrange(
            2 + flaky_region_width // 2, n_commits - flaky_region_width // 2 - 1
        )
        # Integer-derived per-session seeds: string/tuple hashes are salted
        # per process and would break cross-run determinism.
        base = seed * 1_000_003 + run_index * 2
        classic_session = run_classic(
            seq,
            NoisyOracle(first_bad, noise, random.Random(base)),
            "synthetic behaviour",
        )
        robust_session = run_robust(
            seq,
            NoisyOracle(first_bad, noise, random.Random(base + 1)),
            "synthetic behaviour",
            policy,
        )
        classic_steps += len(classic_session.steps)
        robust_steps += len(robust_session.steps)
        cres, rres = classic_session.result, robust_session.result
        if isinstance(cres, Localized) and cres.index == first_bad:
            classic_exact += 1
        elif not isinstance(cres, Localized):
            classic_aborted += 1
        if isinstance(rres, Localized):
            if rres.index == first_bad:
                robust_exact += 1
        elif isinstance(rres, Range):
            if rres.lo_index <= first_bad <= rres.hi_index:
                robust_correct_range += 1
        else:
            robust_aborted += 1
    return SimulationReport(
        sessions=sessions,
        n_commits=n_commits,
        flip_probability=flip_probability,
        flaky_region_width=flaky_region_width,
        requery_limit=requery_limit,
        seed=seed,
        classic_exact=classic_exact,
        classic_aborted=classic_aborted,
        robust_exact=robust_exact,
        robust_correct_range=robust_correct_range,
        robust_aborted=robust_aborted,
        classic_steps_total=classic_steps,
        robust_steps_total=robust_steps,
    )


def render_report(report: SimulationReport) -> str:
    """Deterministic text report; byte-identical for equal seeds."""
    lines = [
        "Noisy-oracle simulation",
        f"sessions            : {report.sessions}",
        f"commits per session : {report.n_commits}",
        f"flip probability    : {report.flip_probability}",
        f"flaky region width  : {report.flaky_region_width}",
        f"requery limit       : {report.requery_limit}",
        f"seed                : {report.seed}",
        "",
        f"classic exact localizations : {report.classic_exact}"
        f" ({100.0 * report.classic_success_rate:.1f}%)",
        f"classic aborted             : {report.classic_aborted}",
        f"classic total steps         : {report.classic_steps_total}",
        "",
        f"robust exact localizations  : {report.robust_exact}",
        f"robust correct ranges       : {report.robust_correct_range}",
        f"robust aborted              : {report.robust_aborted}",
        f"robust success rate         : {100.0 * report.robust_success_rate:.1f}%",
        f"robust total steps          : {report.robust_steps_total}",
    ]
    return "\n".join(lines) + "\n"
