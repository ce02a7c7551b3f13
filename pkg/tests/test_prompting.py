import pathlib

import pytest

from conftest import make_response
from sembisect.annotate import annotate
from sembisect.prompting import (
    BudgetExceeded,
    build_prompt,
    validate_exemplar,
)
from sembisect.labeling import LabeledSample, Provenance
from sembisect.repo import FileDiff, RawDiff
from sembisect.schema import RESPONSE_FIELDS

DIFF = annotate(
    RawDiff(files=(FileDiff("greet.py", ("print('hi')",), ("print('hello')",)),))
)
EMPTY = annotate(RawDiff(files=()))


def test_skeleton_names_each_field_exactly_once():
    prompt = build_prompt("greeting output", DIFF)
    for field in RESPONSE_FIELDS:
        assert prompt.text.count(f'"{field}"') == 1, field


def test_empty_diff_prompt_is_well_formed():
    prompt = build_prompt("greeting output", EMPTY)
    assert "(no changes)" in prompt.text
    assert prompt.diff_text == ""


def test_prompt_contains_diff_and_target():
    prompt = build_prompt("greeting output", DIFF)
    assert "=== greet.py" in prompt.text
    assert "Behaviour under test: greeting output" in prompt.text


def test_determinism_byte_equal():
    a = build_prompt("greeting output", DIFF)
    b = build_prompt("greeting output", DIFF)
    assert a.text == b.text
    assert a == b


def test_prompt_format_snapshot():
    # the prompt text is part of the stored-fixture contract; changing it
    # means regenerating fixtures/golden/prompt_snapshot.txt deliberately
    snapshot_diff = annotate(
        RawDiff(
            files=(
                FileDiff(
                    "greet.py",
                    (
                        "def greet():",
                        "    name = input().strip()",
                        "    print(name)",
                    ),
                    (
                        "def greet():",
                        "    name = input()",
                        "    print(name)",
                        "    print('bye')",
                    ),
                ),
            )
        )
    )
    prompt = build_prompt("greeting prints the trimmed name", snapshot_diff)
    frozen = (
        pathlib.Path(__file__).resolve().parent.parent
        / "fixtures"
        / "golden"
        / "prompt_snapshot.txt"
    ).read_text(encoding="utf-8")
    assert prompt.text == frozen


def test_rejects_empty_target():
    with pytest.raises(ValueError):
        build_prompt("", DIFF)


def big_exemplar(i, size=10_000):
    response = make_response("good", reflection=f"exemplar {i}")
    filler = "x" * (size - 1)
    return (f"{i}" + filler, response)


def test_budget_evicts_oldest_exemplar():
    exemplars = [big_exemplar(i) for i in range(3)]
    base = len(build_prompt("greeting output", DIFF).text)
    # each exemplar adds its diff text plus a fixed wrapper; recompute the
    # arithmetic independently of the eviction loop
    one = len(build_prompt("greeting output", DIFF, exemplars[:1]).text)
    per_exemplar = one - base
    assert base + 3 * per_exemplar > 25_000
    assert base + 2 * per_exemplar <= 25_000
    prompt = build_prompt("greeting output", DIFF, exemplars, char_budget=25_000)
    assert len(prompt.exemplars) == 2
    assert prompt.exemplars == tuple(exemplars[1:])  # oldest evicted
    assert len(prompt.text) <= 25_000


def test_budget_exceeded_without_exemplars():
    huge = annotate(
        RawDiff(files=(FileDiff("big.py", (), tuple(f"line {i}" for i in range(3000))),))
    )
    with pytest.raises(BudgetExceeded):
        build_prompt("greeting output", huge, char_budget=2_000)


def sample_with(state, response=None, corrected=None):
    return LabeledSample(
        sample_id="s1",
        diff_text="=== f.py\n+ x = 1",
        target_behaviour="t",
        machine_response=response,
        machine_confidence=0.9,
        review_state=state,
        corrected_response=corrected,
        category="Structural Refactor",
        provenance=Provenance("r", "c"),
        version=1,
    )


def test_accepted_valid_sample_is_exemplar():
    assert validate_exemplar(sample_with("accepted", make_response("good")))


def test_discarded_sample_is_not_exemplar():
    assert not validate_exemplar(sample_with("discarded", make_response("good")))


def test_pending_and_auto_accepted_are_not_exemplars():
    assert not validate_exemplar(sample_with("pending", make_response("good")))
    assert not validate_exemplar(sample_with("auto-accepted", make_response("good")))


def test_corrected_sample_uses_the_correction():
    corrected = make_response("bad", confidence=70)
    assert validate_exemplar(
        sample_with("corrected", make_response("good"), corrected)
    )


def test_corrupted_correction_fails_validation():
    corrected = make_response("bad")
    broken = corrected.__class__(**{**corrected.__dict__, "bisect_mark": "ugly"})
    assert not validate_exemplar(sample_with("corrected", make_response("good"), broken))


def test_exemplars_render_into_prompt():
    response = make_response("good")
    prompt = build_prompt("greeting output", DIFF, [("=== d.py\n+ y = 2", response)])
    assert "Worked example 1:" in prompt.text
    assert "=== d.py" in prompt.text
    assert '"bisect_mark":"good"' in prompt.text
