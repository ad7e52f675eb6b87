"""Oracle, corpus, identity check, validity sweep and table reproduction."""

from __future__ import annotations

from ..reference import ReferenceIntegral, reference_integral
from .corpus import CorpusMember, generate_corpus
from .identity import check_identity, default_x_grid, kernel_weighted_mean
from .sweep import SweepReport, render_report_text, sweep_theorems
from .table1 import PRINTED, Table1Row, reproduce_table1

__all__ = [
    "CorpusMember",
    "PRINTED",
    "ReferenceIntegral",
    "SweepReport",
    "Table1Row",
    "check_identity",
    "default_x_grid",
    "generate_corpus",
    "kernel_weighted_mean",
    "reference_integral",
    "render_report_text",
    "reproduce_table1",
    "sweep_theorems",
]
