"""Command-line entry point.

Subcommands: run, label, export, eval, simulate, serve.  Every workflow
is runnable fully offline with the mock oracle backend and fixture
repositories.  Failures exit nonzero with a stable per-class code and a
machine-readable `error: <Class>: <detail>` line on stderr.
"""

from __future__ import annotations

import argparse
import datetime as dt
import hashlib
import json
import sys

from . import engine, evaluate, labeling, repo, simulate
from .annotate import annotate
from .config import ConfigError, RunConfig, load_config
from .errors import SembisectError
from .oracle import HttpChatBackend, MockBackend, classify
from .prompting import build_prompt

EXIT_CODES: dict[str, int] = {
    "ConfigError": 2,
    "RepoNotFound": 3,
    "RevisionNotFound": 4,
    "NotAnAncestor": 5,
    "EmptyRange": 6,
    "IndexOutOfRange": 7,
    "CheckoutFailure": 8,
    "Timeout": 9,
    "TransportError": 10,
    "MalformedResponse": 11,
    "ScriptExhausted": 12,
    "NoDocumentFound": 13,
    "SchemaViolation": 14,
    "BudgetExceeded": 15,
    "UnknownSample": 16,
    "InvalidTransition": 17,
    "StaleVersion": 18,
    "StorageFailure": 19,
    "NoSteps": 20,
    "AllZeroDifferences": 21,
    "AbortedSession": 22,
}


class CommitOracle:
    """Classify capability over commit indices for the bisect engine."""

    def __init__(self, seq: repo.CommitSequence, config: RunConfig, backend):
        self.seq = seq
        self.config = config
        self.backend = backend
        self.last_prompt_hash: str | None = None

    def __call__(self, index: int):
        raw = repo.snapshot_diff(self.seq, index)
        prompt = build_prompt(
            self.config.target_behaviour,
            annotate(raw),
            char_budget=self.config.prompt_char_budget,
        )
        self.last_prompt_hash = hashlib.sha256(prompt.text.encode()).hexdigest()
        return classify(self.config.oracle, prompt, self.backend)


def _make_backend(config: RunConfig):
    if config.oracle_backend == "mock":
        if not config.mock_script:
            raise ConfigError("mock backend requires oracle.mock_script")
        return MockBackend.from_file(config.mock_script)
    return HttpChatBackend(config.oracle)


def cmd_run(args) -> int:
    config = load_config(
        args.config,
        {
            "repo_path": args.repo,
            "good_rev": args.good,
            "bad_rev": args.bad,
            "target_behaviour": args.target,
            "mode": args.mode,
            "sessions_dir": args.out,
        },
    )
    if not config.repo_path or not config.good_rev or not config.bad_rev:
        raise ConfigError("run needs --repo, --good and --bad (or config values)")
    if not config.target_behaviour:
        raise ConfigError("run needs --target (or config run.target_behaviour)")
    seq = repo.linearize(config.repo_path, config.good_rev, config.bad_rev)
    oracle = CommitOracle(seq, config, _make_backend(config))
    if config.mode == engine.MODE_CLASSIC:
        session = engine.run_classic(seq, oracle, config.target_behaviour)
    else:
        session = engine.run_robust(
            seq, oracle, config.target_behaviour, config.policy
        )
    store = engine.SessionStore(config.sessions_dir)
    session_id = engine.record_session(session, store)
    result = session.result
    if isinstance(result, engine.Localized):
        commit = seq.commits[result.index]
        print(f"Localized {commit.value} (index {result.index})")
        print(f"session: {session_id}")
        return 0
    if isinstance(result, engine.Range):
        lo = seq.commits[result.lo_index]
        hi = seq.commits[result.hi_index]
        print(
            f"Range {lo.value}..{hi.value} "
            f"(indices {result.lo_index}..{result.hi_index})"
        )
        print(f"session: {session_id}")
        return 0
    print(f"Aborted: {result.reason}", file=sys.stderr)
    print(f"error: AbortedSession: {result.reason}", file=sys.stderr)
    print(f"session: {session_id}")
    return EXIT_CODES["AbortedSession"]


def _load_descriptors(path: str) -> list[labeling.RepoDescriptor]:
    with open(path, encoding="utf-8") as fh:
        entries = json.load(fh)
    return [
        labeling.RepoDescriptor(
            name=e["name"],
            path=e.get("path", ""),
            stars=e["stars"],
            last_activity=dt.date.fromisoformat(e["last_activity"]),
            license_id=e["license"],
        )
        for e in entries
    ]


def cmd_label(args) -> int:
    config = load_config(args.config, {"target_behaviour": args.target})
    if not config.target_behaviour:
        raise ConfigError("label needs --target (or config run.target_behaviour)")
    descriptors = _load_descriptors(args.repos)
    pairs = labeling.harvest_candidates(descriptors)
    if args.limit:
        pairs = pairs[: args.limit]
    backend = _make_backend(config)
    store = labeling.SampleStore(args.store or config.samples_dir)
    diffs, provenances = [], []
    for descriptor, (older, newer) in pairs:
        seq = repo.linearize(descriptor.path, older, newer)
        raw = repo.snapshot_diff(seq, len(seq.commits) - 1)
        diffs.append(annotate(raw))
        provenances.append(labeling.Provenance(descriptor.name, newer))
    samples = labeling.auto_label(
        diffs,
        config.target_behaviour,
        lambda prompt: classify(config.oracle, prompt, backend),
        threshold=config.labeling_threshold,
        provenances=provenances,
        store=store,
    )
    auto = sum(1 for s in samples if s.review_state == labeling.STATE_AUTO_ACCEPTED)
    print(f"labeled {len(samples)} diffs: {auto} auto-accepted, "
          f"{len(samples) - auto} pending review")
    return 0


def cmd_export(args) -> int:
    config = load_config(args.config, {})
    store = labeling.SampleStore(args.store or config.samples_dir)
    count = labeling.export_dataset(store, args.format, args.out)
    print(f"wrote {count} records to {args.out}")
    return 0


def cmd_eval(args) -> int:
    outcomes = evaluate.load_outcomes(args.outcomes)
    table = evaluate.build_table(outcomes)
    print(f"runs: {len(outcomes)} (run count is data-driven)")
    print(evaluate.render_table(table, title="Bisect success by category"))
    try:
        avg = evaluate.avg_time_per_step(outcomes)
        print(f"avg time/step: {avg:.3f}s")
    except evaluate.NoSteps:
        avg = None
        print("avg time/step: n/a (no steps)")
    report: dict = {
        "runs": len(outcomes),
        "table": evaluate.table_records(table),
        "avg_time_per_step": avg,
    }
    if args.compare:
        variant = evaluate.load_outcomes(args.compare)
        vtable = evaluate.build_table(variant)
        print()
        print(evaluate.render_table(vtable, title="Comparison variant"))
        diffs = evaluate.paired_time_differences(outcomes, variant)
        statistic, p_value = evaluate.wilcoxon_signed_rank(diffs, "one")
        print(
            f"paired Wilcoxon signed-rank over {len(diffs)} runs "
            f"(wall-time differences): W={statistic:g}, one-sided p={p_value:.6g}"
        )
        report["compare_table"] = evaluate.table_records(vtable)
        report["wilcoxon"] = {
            "pairs": len(diffs),
            "statistic": statistic,
            "p_one_sided": p_value,
        }
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
        print(f"report written to {args.out}")
    return 0


def cmd_simulate(args) -> int:
    report = simulate.run_noise_experiment(
        n_commits=args.commits,
        flip_probability=args.flip_prob,
        flaky_region_width=args.region_width,
        sessions=args.sessions,
        seed=args.seed,
        requery_limit=args.requery_limit,
    )
    text = simulate.render_report(report)
    print(text, end="")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(
        samples_dir=args.store,
        sessions_dir=args.sessions,
        frontend_dir=args.frontend,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sembisect",
        description="Semantic bisect: LLM-classified commit verdicts over git history.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="bisect a repository for a behaviour change")
    p_run.add_argument("--config")
    p_run.add_argument("--repo")
    p_run.add_argument("--good")
    p_run.add_argument("--bad")
    p_run.add_argument("--target")
    p_run.add_argument("--mode", choices=["classic", "robust"])
    p_run.add_argument("--out", help="sessions directory")
    p_run.set_defaults(func=cmd_run)

    p_label = sub.add_parser("label", help="auto-label harvested commit diffs")
    p_label.add_argument("--config")
    p_label.add_argument("--repos", required=True, help="repo descriptor JSON file")
    p_label.add_argument("--target")
    p_label.add_argument("--store", help="sample store directory")
    p_label.add_argument("--limit", type=int, default=0)
    p_label.set_defaults(func=cmd_label)

    p_export = sub.add_parser("export", help="export the reviewed dataset")
    p_export.add_argument("--config")
    p_export.add_argument("--store", help="sample store directory")
    p_export.add_argument("--out", required=True)
    p_export.add_argument("--format", default=labeling.DATASET_FORMAT)
    p_export.set_defaults(func=cmd_export)

    p_eval = sub.add_parser("eval", help="score session outcomes")
    p_eval.add_argument("--outcomes", required=True)
    p_eval.add_argument("--compare", help="second outcomes file for a paired test")
    p_eval.add_argument("--out", help="write a JSON report here")
    p_eval.set_defaults(func=cmd_eval)

    p_sim = sub.add_parser("simulate", help="seeded noisy-oracle experiment")
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--flip-prob", type=float, default=0.1)
    p_sim.add_argument("--region-width", type=int, default=5)
    p_sim.add_argument("--sessions", type=int, default=1000)
    p_sim.add_argument("--commits", type=int, default=32)
    p_sim.add_argument("--requery-limit", type=int, default=2)
    p_sim.add_argument("--out")
    p_sim.set_defaults(func=cmd_simulate)

    p_serve = sub.add_parser("serve", help="HTTP API + review dashboard")
    p_serve.add_argument("--store", default="samples")
    p_serve.add_argument("--sessions", default="sessions")
    p_serve.add_argument("--frontend", default="")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8047)
    p_serve.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SembisectError as exc:
        name = type(exc).__name__
        print(f"error: {name}: {exc}", file=sys.stderr)
        return EXIT_CODES.get(name, 1)
    except OSError as exc:
        print(f"error: StorageFailure: {exc}", file=sys.stderr)
        return EXIT_CODES["StorageFailure"]


if __name__ == "__main__":
    sys.exit(main())
