#!/usr/bin/env python3
"""Build a small demo repository plus a canned oracle script.

The repository is a linear chain of commits evolving a greeting
program; one commit drops the .strip() on the user's name, which is the
behaviour regression the demo bisects for.  A matching mock-oracle
script and a run config are written next to the repository so the whole
`run` workflow works offline:

    python3 scripts/make_fixture_repo.py /tmp/demo
    sembisect run --config /tmp/demo/config.yaml
"""

import json
import pathlib
import subprocess
import sys

# Program versions, committed in order.  The regression lands at index
# BAD_INDEX (0-based within this list).
VERSIONS = [
    'def greet():\n    name = input().strip()\n    print(f"Hello, {name}!")\n',
    'BANNER = "v2"\n\ndef greet():\n    name = input().strip()\n    print(f"Hello, {name}!")\n',
    'BANNER = "v2"\n\ndef greet():\n    name = input().strip()\n    print(f"Hello, {name}!")\n    print("bye")\n',
    'BANNER = "v2"\n\ndef greet():\n    name = input()\n    print(f"Hello, {name}!")\n    print("bye")\n',
    'BANNER = "v3"\n\ndef greet():\n    name = input()\n    print(f"Hello, {name}!")\n    print("bye")\n',
    'BANNER = "v3"\n\ndef greet():\n    name = input()\n    print(f"Hello, {name}!")\n    print("goodbye")\n',
]
BAD_INDEX = 3

_GOOD_DOC = {
    "target_behaviour": "greeting prints the trimmed name",
    "has_compile_error": False,
    "behaviour_change": "no-effect",
    "behaviour_confidence": 93,
    "sem_edits": [],
    "counterfactual_fix": "",
    "reasoning_chain": ["No edit in this diff touches the name handling."],
    "reflection": "The change is unrelated to the target behaviour.",
    "bisect_mark": "good",
}

_BAD_DOC = {
    "target_behaviour": "greeting prints the trimmed name",
    "has_compile_error": False,
    "behaviour_change": "intro",
    "behaviour_confidence": 95,
    "sem_edits": [
        {
            "id": "edit-1",
            "kind": "modify",
            "semantic": True,
            "behaviour": "name is no longer trimmed before printing",
            "likelihood": 5,
            "dependency": "input() feeds the banner line directly",
            "precedent": "name = input().strip()",
        }
    ],
    "counterfactual_fix": "Reinstate .strip() on the input",
    "reasoning_chain": [
        "The diff removes .strip() from the input call.",
        "Padded names now reach the banner verbatim.",
    ],
    "reflection": "Direct hit on the reported behaviour.",
    "bisect_mark": "bad",
}


def git(repo, *args):
    subprocess.run(["git", "-C", str(repo), *args], check=True, capture_output=True)


def build_repo(root: pathlib.Path) -> list[str]:
    repo = root / "repo"
    repo.mkdir(parents=True)
    git(repo, "init", "-q")
    git(repo, "config", "user.email", "fixture@example.invalid")
    git(repo, "config", "user.name", "Fixture")
    ids = []
    for i, body in enumerate(VERSIONS):
        (repo / "greet.py").write_text(body, encoding="utf-8")
        git(repo, "add", "greet.py")
        git(repo, "commit", "-q", "-m", f"version {i}")
        out = subprocess.run(
            ["git", "-C", str(repo), "rev-parse", "HEAD"],
            check=True,
            capture_output=True,
            text=True,
        )
        ids.append(out.stdout.strip())
    return ids


def mock_script() -> list[str]:
    """Canned verdicts for the probe order of a robust/classic run.

    The engine probes midpoints of (0, 5): 2 (good), then 3 (bad), which
    collapses the interval.  Three samples per probe (samples_k=3).
    """
    probes = [2, 3]
    outputs = []
    for index in probes:
        doc = _GOOD_DOC if index < BAD_INDEX else _BAD_DOC
        outputs.extend([json.dumps(doc)] * 3)
    return outputs


def main(dest: str):
    root = pathlib.Path(dest)
    ids = build_repo(root)
    (root / "oracle_script.json").write_text(
        json.dumps(mock_script(), indent=2) + "\n", encoding="utf-8"
    )
    config = f"""\
run:
  repo_path: {root / 'repo'}
  good_rev: {ids[0]}
  bad_rev: {ids[-1]}
  target_behaviour: greeting prints the trimmed name
  mode: robust
paths:
  sessions_dir: {root / 'sessions'}
  samples_dir: {root / 'samples'}
oracle:
  backend: mock
  mock_script: {root / 'oracle_script.json'}
  samples_k: 3
  confidence_threshold: 0.8
"""
    (root / "config.yaml").write_text(config, encoding="utf-8")
    print(f"fixture repo at {root / 'repo'}")
    print(f"expected first-bad commit: {ids[BAD_INDEX]} (index {BAD_INDEX})")
    print(f"run it with: sembisect run --config {root / 'config.yaml'}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "demo-fixture")
