"""Small argument checks shared by the estimators and the CLI."""

from __future__ import annotations

import numbers

SEGMENTATION_MODES = ("literal", "camel")


def check_segmentation(mode) -> str:
    if mode not in SEGMENTATION_MODES:
        raise ValueError(
            f"segmentation must be one of {SEGMENTATION_MODES}, got {mode!r}")
    return mode


def check_min_items(value) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError(f"min_items must be an integer, got {type(value).__name__}")
    if value < 1:
        raise ValueError(f"min_items must be >= 1, got {value}")
    return int(value)


def check_consistent_length(X, y):
    if len(X) != len(y):
        raise ValueError(f"X has {len(X)} samples but y has {len(y)}")
    if len(X) == 0:
        raise ValueError("empty training set")
