"""Selmer groups and quartic solubility for the congruent number curves."""

from ._core import (
    QUERY_HEIGHT,
    SWEEP_HEIGHT,
    classify,
    csv_header,
    is_squarefree,
    jacobi,
    rank_bounds,
    sel2,
    selmer,
    sweep,
)

__all__ = [
    "QUERY_HEIGHT",
    "SWEEP_HEIGHT",
    "classify",
    "csv_header",
    "is_squarefree",
    "jacobi",
    "rank_bounds",
    "sel2",
    "selmer",
    "sweep",
]
