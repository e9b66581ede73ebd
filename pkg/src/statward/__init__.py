"""statward: statistical p-quasi-Cauchy sequences and the functions that preserve them.

Sequences are described by a small spec language and evaluated lazily with
exact rational arithmetic where possible.  Classifiers turn a finite prefix
into a three-valued verdict; the theorem harness runs property checks over
fixture corpora; the CLI wraps it all with JSON/CSV reports.
"""
__version__ = "0.1.0"

from .classify import (  # noqa: E402
    INCONCLUSIVE, SATISFIED, VIOLATED, ClassifierConfig, ClassVerdict, classify_bounded,
    classify_cauchy_prefix, classify_quasi_cauchy, classify_slowly_oscillating,
    classify_stat_p_quasi_cauchy, estimate_statistical_limit, full_profile,
)
from .continuity import (  # noqa: E402
    algebra_identity_checks, lattice_report, preservation_check, theorem4_suite, theorem6_adversary,
    uniform_continuity_probe, violation_witness_search,
)
from .density import exceedance_curve, exceedance_curves, gap_curves, limit_verdict  # noqa: E402
from .expr import FunctionSpec, eval_function, format_expr, parse_function  # noqa: E402
from .numeric import Approx, DomainViolation  # noqa: E402
from .seqdsl import parse_sequence  # noqa: E402
from .sequences import (  # noqa: E402
    SequenceSpec, SequenceStream, build_stream, combine, delta_stream, interleave_blocks, repeat_each,
    shifted, subsequence,
)
from .theorems import (  # noqa: E402
    bisection_selector, check_bounded_implies_stat_p_ward_compact, check_inclusion_decomposition,
    check_vector_space_closure, witness_no_stat_p_qc_subsequence,
)

__all__ = [
    "INCONCLUSIVE", "SATISFIED", "VIOLATED", "Approx", "ClassVerdict", "ClassifierConfig", "DomainViolation",
    "FunctionSpec", "SequenceSpec", "SequenceStream", "algebra_identity_checks", "bisection_selector",
    "build_stream", "check_bounded_implies_stat_p_ward_compact", "check_inclusion_decomposition",
    "check_vector_space_closure", "classify_bounded", "classify_cauchy_prefix", "classify_quasi_cauchy",
    "classify_slowly_oscillating", "classify_stat_p_quasi_cauchy", "combine", "delta_stream",
    "estimate_statistical_limit", "eval_function", "exceedance_curve", "exceedance_curves", "format_expr",
    "full_profile", "gap_curves", "interleave_blocks", "lattice_report", "limit_verdict", "parse_function",
    "parse_sequence", "preservation_check", "repeat_each", "shifted", "subsequence", "theorem4_suite",
    "theorem6_adversary", "uniform_continuity_probe", "violation_witness_search",
    "witness_no_stat_p_qc_subsequence",
]
