"""Line-level diff annotation.

Each changed file is reduced to one record per line, tagged:

  added      line exists only in the new revision
  deleted    line exists only in the old revision
  relocated  content preserved (after whitespace normalization) but the
             line sits at a different position in the file
  unchanged  content and position preserved, or content trivial

Relocation is detected within a single file; a line moved across files
shows up as deleted + added.  Lines whose normalized form is empty or
pure punctuation (closing braces and the like) are never tagged
relocated; matching those would be noise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

TAG_ADDED = "added"
TAG_DELETED = "deleted"
TAG_RELOCATED = "relocated"
TAG_UNCHANGED = "unchanged"

_PUNCT = set("{}()[];,.:")

# O(len(old) * len(new)) alignment after prefix/suffix stripping; fine for
# commit-sized diffs, pathological for whole-file rewrites of huge files.
_MAX_ALIGN_CELLS = 16_000_000


def normalize(line: str) -> str:
    """Collapse whitespace runs to single spaces and trim the ends.

    Idempotent: normalize(normalize(s)) == normalize(s).
    """
    return " ".join(line.split())


def is_trivial(normalized: str) -> bool:
    """Empty or punctuation-only content carries no relocation signal."""
    return normalized == "" or all(ch in _PUNCT for ch in normalized)


@dataclass(frozen=True)
class AnnotatedLine:
    tag: str
    text: str
    old_index: int | None  # 0-based position in the old file
    new_index: int | None  # 0-based position in the new file


@dataclass(frozen=True)
class FileAnnotation:
    path: str
    lines: tuple[AnnotatedLine, ...]


@dataclass(frozen=True)
class TagCounts:
    added: int = 0
    deleted: int = 0
    relocated: int = 0
    unchanged: int = 0


@dataclass(frozen=True)
class AnnotatedDiff:
    files: tuple[FileAnnotation, ...]
    stats: TagCounts
    binary_paths: tuple[str, ...] = field(default=())

    def is_empty(self) -> bool:
        return not self.files and not self.binary_paths


def _lcs_pairs(old: list[str], new: list[str]) -> list[tuple[int, int]]:
    """Longest common subsequence of the two line lists, as index pairs."""
    lo = 0
    while lo < len(old) and lo < len(new) and old[lo] == new[lo]:
        lo += 1
    hi = 0
    while (
        hi < len(old) - lo
        and hi < len(new) - lo
        and old[len(old) - 1 - hi] == new[len(new) - 1 - hi]
    ):
        hi += 1
    prefix = [(i, i) for i in range(lo)]
    suffix = [
        (len(old) - hi + k, len(new) - hi + k) for k in range(hi)
    ]
    a = old[lo : len(old) - hi]
    b = new[lo : len(new) - hi]
    if not a or not b:
        return prefix + suffix
    if len(a) * len(b) > _MAX_ALIGN_CELLS:
        raise ValueError(
            f"diff too large to align ({len(a)}x{len(b)} lines)"
        )
    # Token interning keeps the DP comparisons cheap.
    table: dict[str, int] = {}
    ta = [table.setdefault(s, len(table)) for s in a]
    tb = [table.setdefault(s, len(table)) for s in b]
    n, m = len(ta), len(tb)
    dp = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        row, below = dp[i], dp[i + 1]
        for j in range(m - 1, -1, -1):
            if ta[i] == tb[j]:
                row[j] = below[j + 1] + 1
            else:
                bj = below[j]
                rj = row[j + 1]
                row[j] = bj if bj >= rj else rj
    pairs = []
    i = j = 0
    while i < n and j < m:
        if ta[i] == tb[j]:
            pairs.append((lo + i, lo + j))
            i += 1
            j += 1
        elif dp[i + 1][j] >= dp[i][j + 1]:
            i += 1
        else:
            j += 1
    return prefix + pairs + suffix


def _pair_residuals(
    old_residual: list[int],
    new_residual: list[int],
    old_norm: list[str],
    new_norm: list[str],
) -> list[tuple[int, int]]:
    """Injective matching of leftover lines with equal normalized content.

    Pairs are taken in order of smallest displacement |old - new|, ties
    broken by the smaller old index, so the matching is deterministic and
    locality-preserving.
    """
    by_content: dict[str, tuple[list[int], list[int]]] = {}
    for i in old_residual:
        norm = old_norm[i]
        if is_trivial(norm):
            continue
        by_content.setdefault(norm, ([], []))[0].append(i)
    for j in new_residual:
        norm = new_norm[j]
        if is_trivial(norm):
            continue
        if norm in by_content:
            by_content[norm][1].append(j)
    pairs: list[tuple[int, int]] = []
    for norm, (olds, news) in by_content.items():
        if not news:
            continue
        candidates = sorted(
            ((abs(i - j), i, j) for i in olds for j in news),
            key=lambda t: (t[0], t[1], t[2]),
        )
        used_old: set[int] = set()
        used_new: set[int] = set()
        for _, i, j in candidates:
            if i in used_old or j in used_new:
                continue
            pairs.append((i, j))
            used_old.add(i)
            used_new.add(j)
    return pairs


def _annotate_file(path: str, old: list[str], new: list[str]) -> FileAnnotation:
    old_norm = [normalize(s) for s in old]
    new_norm = [normalize(s) for s in new]
    aligned = _lcs_pairs(old_norm, new_norm)
    matched_old = {i for i, _ in aligned}
    matched_new = {j for _, j in aligned}
    residual_old = [i for i in range(len(old)) if i not in matched_old]
    residual_new = [j for j in range(len(new)) if j not in matched_new]
    moved = _pair_residuals(residual_old, residual_new, old_norm, new_norm)
    moved_old = {i for i, _ in moved}
    moved_new = {j for _, j in moved}

    by_new: dict[int, AnnotatedLine] = {}
    for i, j in aligned:
        if i != j and not is_trivial(new_norm[j]):
            tag = TAG_RELOCATED
        else:
            tag = TAG_UNCHANGED
        by_new[j] = AnnotatedLine(tag, new[j], i, j)
    for i, j in moved:
        tag = TAG_UNCHANGED if i == j else TAG_RELOCATED
        by_new[j] = AnnotatedLine(tag, new[j], i, j)
    for j in residual_new:
        if j not in moved_new:
            by_new[j] = AnnotatedLine(TAG_ADDED, new[j], None, j)

    # Deletions are anchored after the nearest aligned line above them in
    # the old file, so they read in place when the file is emitted in
    # new-file order.
    anchor_of: dict[int, int] = {}  # old index of aligned line -> new index
    for i, j in aligned:
        anchor_of[i] = j
    aligned_old_sorted = sorted(anchor_of)
    deletions_after: dict[int, list[AnnotatedLine]] = {}
    for i in residual_old:
        if i in moved_old:
            continue
        anchor = -1
        for k in aligned_old_sorted:
            if k < i:
                anchor = anchor_of[k]
            else:
                break
        deletions_after.setdefault(anchor, []).append(
            AnnotatedLine(TAG_DELETED, old[i], i, None)
        )

    lines: list[AnnotatedLine] = list(deletions_after.get(-1, []))
    for j in range(len(new)):
        lines.append(by_new[j])
        lines.extend(deletions_after.get(j, []))
    return FileAnnotation(path, tuple(lines))


def annotate(diff) -> AnnotatedDiff:
    """Annotate a RawDiff (see sembisect.repo) file by file."""
    files = tuple(
        _annotate_file(f.path, f.old_lines, f.new_lines) for f in diff.files
    )
    counts = {TAG_ADDED: 0, TAG_DELETED: 0, TAG_RELOCATED: 0, TAG_UNCHANGED: 0}
    for fa in files:
        for line in fa.lines:
            counts[line.tag] += 1
    stats = TagCounts(
        added=counts[TAG_ADDED],
        deleted=counts[TAG_DELETED],
        relocated=counts[TAG_RELOCATED],
        unchanged=counts[TAG_UNCHANGED],
    )
    return AnnotatedDiff(files, stats, tuple(diff.binary_paths))


_PREFIX = {
    TAG_ADDED: "+ ",
    TAG_DELETED: "- ",
    TAG_RELOCATED: "~ ",
    TAG_UNCHANGED: "  ",
}


def render(diff: AnnotatedDiff) -> str:
    """One line per AnnotatedLine, grouped under `=== <path>` headers.

    This text is embedded verbatim into prompts, so its shape is part of
    the prompt format and must stay stable.
    """
    out: list[str] = []
    for fa in diff.files:
        out.append(f"=== {fa.path}")
        for line in fa.lines:
            out.append(_PREFIX[line.tag] + line.text)
    for path in diff.binary_paths:
        out.append(f"=== {path}")
        out.append("  (binary file changed)")
    return "\n".join(out)
