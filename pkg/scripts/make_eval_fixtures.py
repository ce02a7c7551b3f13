#!/usr/bin/env python3
"""Regenerate the bundled evaluation fixture logs.

Two outcome files with the category split of the success-rate table
(23/31 and 25/31) and SYNTHETIC wall times constructed so the paired
signed-rank test on the 31 shared runs lands below p=0.01.  The timing
numbers demonstrate the report plumbing; they are not measurements.
"""

import json
import pathlib
import random

HERE = pathlib.Path(__file__).resolve().parent.parent
OUT = HERE / "fixtures" / "eval"

# (category, total, baseline successes, fine-tuned successes)
# Fine-tuned totals must land on 25/31 = 80.6% with Robustness at 2/4 and
# Runtime-Launch at 1/4; the remaining success is docked from the noisy
# cosmetic class to make the columns add up.
SPLIT = [
    ("Display / Output Introduction", 3, 3, 3),
    ("Input Handling Introduction", 3, 3, 3),
    ("State-Transition Logic", 3, 3, 3),
    ("Decision-Making Rules", 4, 4, 4),
    ("Structural Refactor", 4, 4, 4),
    ("Robustness / Error Handling", 4, 0, 2),
    ("Flow-Control / Session Loop", 3, 3, 3),
    ("Runtime-Launch Safeguard", 4, 0, 1),
    ("Documentation / Cosmetic", 3, 3, 2),
]


def outcome(session_id, category, success, steps, wall_time):
    flags = [True] * steps
    if not success:
        flags[steps // 2] = False
    return {
        "format": "outcomes/1",
        "session_id": session_id,
        "category": category,
        "step_verdict_correct": flags,
        "wall_time": round(wall_time, 2),
        "steps": steps,
    }


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    rng = random.Random(20240131)
    baseline, finetuned = [], []
    run = 0
    for category, total, base_ok, fine_ok in SPLIT:
        for i in range(total):
            run += 1
            session_id = f"run-{run:03d}"
            steps = rng.choice([4, 5, 5, 6])
            base_time = rng.uniform(55.0, 95.0) * steps
            # synthetic improvement: the variant run is consistently faster
            fine_time = base_time * rng.uniform(0.45, 0.8)
            baseline.append(
                outcome(session_id, category, i < base_ok, steps, base_time)
            )
            finetuned.append(
                outcome(session_id, category, i < fine_ok, steps, fine_time)
            )
    for name, rows in [
        ("baseline_outcomes.ndjson", baseline),
        ("finetuned_outcomes.ndjson", finetuned),
    ]:
        path = OUT / name
        with open(path, "w", encoding="utf-8") as fh:
            for row in rows:
                fh.write(json.dumps(row, ensure_ascii=False) + "\n")
        print(f"wrote {path} ({len(rows)} outcomes)")


if __name__ == "__main__":
    main()
