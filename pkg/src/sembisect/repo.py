"""Reading a git repository into an ordered commit sequence.

The traversal follows first-parent links only, matching how a mainline
history is bisected; merged-in side branches are collapsed into their
merge commit.  File contents are read straight from the object store
(`git show`), so the user's working tree is never touched.
"""

from __future__ import annotations

import os
import subprocess
from dataclasses import dataclass, field

from .errors import SembisectError


class RepoNotFound(SembisectError):
    pass


class RevisionNotFound(SembisectError):
    pass


class NotAnAncestor(SembisectError):
    pass


class EmptyRange(SembisectError):
    pass


class IndexOutOfRange(SembisectError):
    pass


class CheckoutFailure(SembisectError):
    pass


@dataclass(frozen=True)
class CommitId:
    value: str

    def __post_init__(self):
        if len(self.value) < 7 or any(
            c not in "0123456789abcdef" for c in self.value
        ):
            raise ValueError(f"not a commit id: {self.value!r}")

    def short(self) -> str:
        return self.value[:10]


@dataclass(frozen=True)
class CommitSequence:
    commits: tuple[CommitId, ...]  # index 0 = oldest
    known_good: int
    known_bad: int
    repo_path: str

    def __post_init__(self):
        if not self.commits:
            raise ValueError("commit sequence must be non-empty")
        if not 0 <= self.known_good < self.known_bad < len(self.commits):
            raise ValueError("endpoint labels out of order or out of range")
        if len({c.value for c in self.commits}) != len(self.commits):
            raise ValueError("commit sequence contains duplicates")

    def __len__(self) -> int:
        return len(self.commits)


@dataclass(frozen=True)
class FileDiff:
    path: str
    old_lines: tuple[str, ...]
    new_lines: tuple[str, ...]


@dataclass(frozen=True)
class RawDiff:
    files: tuple[FileDiff, ...]
    binary_paths: tuple[str, ...] = field(default=())


def _git(repo_path: str, *args: str) -> str:
    result = subprocess.run(
        ["git", "-C", repo_path, *args],
        capture_output=True,
        text=True,
    )
    if result.returncode != 0:
        raise subprocess.CalledProcessError(
            result.returncode, result.args, result.stdout, result.stderr
        )
    return result.stdout


def _resolve(repo_path: str, rev: str) -> str:
    try:
        return _git(repo_path, "rev-parse", "--verify", f"{rev}^{{commit}}").strip()
    except subprocess.CalledProcessError as exc:
        raise RevisionNotFound(f"cannot resolve revision {rev!r}: {exc.stderr.strip()}")


def _check_repo(repo_path: str) -> None:
    if not os.path.isdir(repo_path):
        raise RepoNotFound(f"no such directory: {repo_path}")
    try:
        _git(repo_path, "rev-parse", "--git-dir")
    except (subprocess.CalledProcessError, FileNotFoundError) as exc:
        raise RepoNotFound(f"not a git repository: {repo_path}") from exc


def linearize(repo_path: str, good_rev: str, bad_rev: str) -> CommitSequence:
    """First-parent path from good_rev to bad_rev inclusive, oldest first.

    good_rev must sit on the first-parent history of bad_rev; a revision
    reachable only through a side branch has no first-parent path to the
    tip and is reported as NotAnAncestor.
    """
    _check_repo(repo_path)
    good = _resolve(repo_path, good_rev)
    bad = _resolve(repo_path, bad_rev)
    if good == bad:
        raise EmptyRange(f"good and bad both resolve to {good}")
    out = _git(repo_path, "rev-list", "--first-parent", bad)
    chain = out.split()
    try:
        cut = chain.index(good)
    except ValueError:
        probe = subprocess.run(
            ["git", "-C", repo_path, "merge-base", "--is-ancestor", good, bad],
            capture_output=True,
        )
        if probe.returncode == 0:
            raise NotAnAncestor(
                f"{good_rev} is reachable from {bad_rev} only through a "
                f"side branch; it is not on the first-parent history"
            )
        raise NotAnAncestor(f"{good_rev} is not an ancestor of {bad_rev}")
    path = list(reversed(chain[: cut + 1]))  # good .. bad, oldest first
    commits = tuple(CommitId(v) for v in path)
    return CommitSequence(
        commits=commits,
        known_good=0,
        known_bad=len(commits) - 1,
        repo_path=os.path.abspath(repo_path),
    )


def first_parent_history(
    repo_path: str, rev: str = "HEAD", limit: int | None = None
) -> list[str]:
    """First-parent commit ids reachable from rev, oldest first."""
    _check_repo(repo_path)
    tip = _resolve(repo_path, rev)
    args = ["rev-list", "--first-parent"]
    if limit is not None:
        args.append(f"--max-count={limit}")
    args.append(tip)
    return list(reversed(_git(repo_path, *args).split()))


def _changed_paths(repo_path: str, old: str, new: str) -> tuple[list[str], list[str]]:
    """(text paths, binary paths) changed between two commits."""
    out = _git(repo_path, "diff", "--numstat", "--no-renames", old, new)
    text_paths: list[str] = []
    binary_paths: list[str] = []
    for line in out.splitlines():
        if not line.strip():
            continue
        added, deleted, path = line.split("\t", 2)
        if added == "-" and deleted == "-":
            binary_paths.append(path)
        else:
            text_paths.append(path)
    return text_paths, binary_paths


def _file_lines(repo_path: str, rev: str, path: str) -> tuple[str, ...]:
    proc = subprocess.run(
        ["git", "-C", repo_path, "show", f"{rev}:{path}"],
        capture_output=True,
    )
    if proc.returncode != 0:
        stderr = proc.stderr.decode("utf-8", "replace")
        if "does not exist" in stderr or "exists on disk, but not in" in stderr:
            return ()
        raise CheckoutFailure(f"cannot read {path} at {rev}: {stderr.strip()}")
    return tuple(proc.stdout.decode("utf-8", "replace").splitlines())


def snapshot_diff(seq: CommitSequence, index: int) -> RawDiff:
    """Per-file old/new line lists between commits index-1 and index."""
    if index < 1 or index >= len(seq.commits):
        raise IndexOutOfRange(
            f"index {index} has no predecessor in a sequence of {len(seq.commits)}"
        )
    old = seq.commits[index - 1].value
    new = seq.commits[index].value
    try:
        text_paths, binary_paths = _changed_paths(seq.repo_path, old, new)
    except subprocess.CalledProcessError as exc:
        raise CheckoutFailure(f"git diff failed: {exc.stderr}") from exc
    files = tuple(
        FileDiff(
            path=path,
            old_lines=_file_lines(seq.repo_path, old, path),
            new_lines=_file_lines(seq.repo_path, new, path),
        )
        for path in text_paths
    )
    return RawDiff(files=files, binary_paths=tuple(binary_paths))
