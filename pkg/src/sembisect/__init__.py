"""Semantic bisect: noise-tolerant fault localization over commit history.

A classifier judges each probed commit's annotated diff against a
target behaviour; the engine binary-searches the history on those
verdicts, tolerating skips and flipped answers; reviewed verdicts feed
a fine-tuning dataset through the labeling pipeline.
"""

__version__ = "0.1.0"
