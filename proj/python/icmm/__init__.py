"""Spike-and-slab GLM fitting by iterated conditional modes/medians."""

from ._core import (
    InputError,
    estimated_fdr,
    fit,
    posterior_median,
    select_at_fdr,
    simulate,
    threshold,
)

__all__ = [
    "InputError",
    "estimated_fdr",
    "fit",
    "posterior_median",
    "select_at_fdr",
    "simulate",
    "threshold",
]
