import json
import pathlib
import subprocess

import pytest

from sembisect.oracle import (
    MARK_SKIP,
    REASON_CONSENSUS,
    REASON_TIE,
    Verdict,
)
from sembisect.schema import CotResponse, validate_document

REPO_ROOT = pathlib.Path(__file__).resolve().parent.parent
FIXTURES = REPO_ROOT / "fixtures"


@pytest.fixture(scope="session")
def golden_document() -> dict:
    with open(FIXTURES / "golden" / "cot_response.json", encoding="utf-8") as fh:
        return json.load(fh)


@pytest.fixture(scope="session")
def golden_response(golden_document) -> CotResponse:
    return validate_document(golden_document)


def make_verdict(mark: str, confidence: float = 0.95) -> Verdict:
    reason = REASON_TIE if mark == MARK_SKIP else REASON_CONSENSUS
    if mark == MARK_SKIP:
        confidence = 0.0
    return Verdict(mark, confidence, (), 0.0, reason)


def make_response(bisect_mark: str, confidence: int = 90, **overrides) -> CotResponse:
    doc = {
        "target_behaviour": "test behaviour",
        "has_compile_error": False,
        "behaviour_change": "mod",
        "behaviour_confidence": confidence,
        "sem_edits": [],
        "counterfactual_fix": "",
        "reasoning_chain": ["a step"],
        "reflection": "ok",
        "bisect_mark": bisect_mark,
    }
    doc.update(overrides)
    return validate_document(doc)


def git(repo: pathlib.Path, *args: str) -> str:
    result = subprocess.run(
        ["git", "-C", str(repo), *args],
        check=True,
        capture_output=True,
        text=True,
    )
    return result.stdout


def init_repo(path: pathlib.Path) -> pathlib.Path:
    path.mkdir(parents=True, exist_ok=True)
    git(path, "init", "-q")
    git(path, "config", "user.email", "t@example.invalid")
    git(path, "config", "user.name", "T")
    return path


def commit_file(repo: pathlib.Path, name: str, content: str, message: str) -> str:
    (repo / name).write_text(content, encoding="utf-8")
    git(repo, "add", name)
    git(repo, "commit", "-q", "-m", message)
    return git(repo, "rev-parse", "HEAD").strip()


def commit_bytes(repo: pathlib.Path, name: str, content: bytes, message: str) -> str:
    (repo / name).write_bytes(content)
    git(repo, "add", name)
    git(repo, "commit", "-q", "-m", message)
    return git(repo, "rev-parse", "HEAD").strip()
