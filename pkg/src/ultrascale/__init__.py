"""ultrascale: numerical calculus of ultradifferentiable growth scales.

Weight sequences and their conditions live in `seqcore`, ordered families in
`wmatrix`, weight functions and Young conjugates in `conjugate`, generating
functions and scale conditions in `scales`, regularity-loss maps in
`iterates`, spectral growth experiments in `probe`, and the declarative job
runner in `cli`.
"""

from . import cli, conjugate, iterates, probe, scales, seqcore, trend, wmatrix
from .seqcore import (
    BJSigma,
    Custom,
    DoubleExp,
    Gevrey,
    LogWeightSeq,
    LQR,
    NQR,
    Relation,
    RelationReport,
    SeqProperty,
    Status,
    Verdict,
    build_sequence,
    check_property,
    compare_sequences,
    interpolate_sequence,
    om7seq_at,
    verify_split_inequality,
)

__version__ = "0.1.0"

__all__ = [
    "cli", "conjugate", "iterates", "probe", "scales", "seqcore", "trend", "wmatrix",
    "BJSigma", "Custom", "DoubleExp", "Gevrey", "LQR", "NQR",
    "LogWeightSeq", "Relation", "RelationReport", "SeqProperty", "Status", "Verdict",
    "build_sequence", "check_property", "compare_sequences",
    "interpolate_sequence", "om7seq_at", "verify_split_inequality",
    "__version__",
]
