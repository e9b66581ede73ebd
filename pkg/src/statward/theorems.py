"""Executable checks for the structural results about statistically p-quasi-Cauchy sequences.

Each check runs on a finite prefix and returns a report object that records
what was compared, so a failure points at a concrete index.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import numeric
from .classify import (
    ClassifierConfig, ClassVerdict, classify_bounded, classify_cauchy_prefix,
    classify_stat_p_quasi_cauchy,
)
from .density import GapView, exceedance_flags
from .sequences import (
    SequenceStream, SubsequenceSelector, Theorem1Witness, build_stream, combine,
    exact_values, subsequence,
)

__all__ = [
    "ApproxValuesRejected", "PreconditionNotMet", "BisectionExhausted", "InclusionCheckResult",
    "ClosureReport", "WitnessReport", "CompactnessReport", "STOCK_SELECTORS",
    "check_inclusion_decomposition", "inclusion_checks", "check_vector_space_closure", "subsequence",
    "SubsequenceSelector", "witness_no_stat_p_qc_subsequence", "exact_density_curve",
    "bisection_selector", "check_bounded_implies_stat_p_ward_compact",
]


class ApproxValuesRejected(ValueError):
    """The check needs exact rational terms."""


class PreconditionNotMet(ValueError):
    def __init__(self, message, verdicts=None):
        super().__init__(message)
        self.verdicts = verdicts or []


class BisectionExhausted(ValueError):
    pass


def _stream(x) -> SequenceStream:
    return x if isinstance(x, SequenceStream) else build_stream(x)


# inclusion decomposition ------------------------------------------------------

@dataclass
class InclusionCheckResult:
    """lhs[i] = #{k <= n_i : |a_{k+p} - a_k| >= eps};
    rhs[i] = sum over i' < p of #{k <= n_i : |a_{k+i'+1} - a_{k+i'}| >= eps/p}."""

    source: str
    p: int
    epsilon: Fraction
    n: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray

    @property
    def holds(self) -> np.ndarray:
        return self.lhs <= self.rhs

    @property
    def all_hold(self) -> bool:
        return bool(self.holds.all())

    @property
    def violations(self) -> list:
        return [int(n) for n in self.n[~self.holds]]

    def rows(self):
        for n, a, b, h in zip(self.n, self.lhs, self.rhs, self.holds):
            yield [int(n), int(a), int(b), bool(h)]

    def to_dict(self) -> dict:
        return {"sequence": self.source, "p": self.p, "epsilon": self.epsilon,
                "samples": len(self.n), "holds": self.all_hold,
                "violations": self.violations[:20]}


INCLUSION_CSV_COLUMNS = ("n", "lhs", "rhs", "holds")


def _exact_flags(values, eps, bands=None):
    exceeds, ambiguous = exceedance_flags(values, eps, bands)
    if ambiguous.any():  # cannot happen for rationals; guard anyway
        raise ApproxValuesRejected("undecidable comparison among exact values")
    return exceeds


def check_inclusion_decomposition(stream, p: int, epsilon, N: int,
                                  sample_stride: int = 1) -> InclusionCheckResult:
    """Compare the p-gap exceedance count against the sum of p shifted one-gap counts."""
    return inclusion_checks(stream, p, [epsilon], N, sample_stride)[0]


def inclusion_checks(stream, p: int, epsilons, N: int, sample_stride: int = 1) -> list:
    """:func:`check_inclusion_decomposition` for several thresholds sharing one pass over the prefix."""
    if not isinstance(p, int) or p < 2:
        raise ValueError("p must be an integer >= 2")
    eps_list = [numeric.parse_rational(e) for e in epsilons]
    if any(e <= 0 for e in eps_list):
        raise ValueError("epsilon must be positive")
    stream = _stream(stream)
    a = stream.prefix(N + p)
    if not exact_values(a):
        raise ApproxValuesRejected(f"{stream.spec} has non-rational terms")
    signed = numeric.signed_bands(a)
    d_p, d_1 = GapView(a, p, N), GapView(a, 1, N + p - 1)
    bands_p, bands_1 = numeric.gap_magnitude_bands(signed, p, N), numeric.gap_magnitude_bands(signed, 1, N + p - 1)
    ns = np.arange(sample_stride, N + 1, sample_stride, dtype=np.int64)
    if len(ns) == 0 or ns[-1] != N:
        ns = np.append(ns, N)
    out = []
    for eps in eps_list:
        lhs_cum = np.cumsum(_exact_flags(d_p, eps, bands_p), dtype=np.int64)
        one = np.concatenate(([0], np.cumsum(_exact_flags(d_1, eps / p, bands_1), dtype=np.int64)))
        # shift i counts k = 1..n of gap k+i, i.e. one-gaps i+1 .. n+i
        rhs = sum(one[ns + i] - one[i] for i in range(p))
        out.append(InclusionCheckResult(str(stream.spec), p, eps, ns, lhs_cum[ns - 1], rhs))
    return out


# vector space closure ---------------------------------------------------------

@dataclass
class ClosureReport:
    p: int
    scalar: Fraction
    inputs: list
    sum_verdict: ClassVerdict
    scaled_verdict: ClassVerdict

    @property
    def breach(self) -> bool:
        return self.sum_verdict.violated or self.scaled_verdict.violated

    @property
    def holds(self) -> bool:
        return self.sum_verdict.satisfied and self.scaled_verdict.satisfied

    def to_dict(self) -> dict:
        return {"p": self.p, "scalar": self.scalar, "inputs": self.inputs,
                "sum": self.sum_verdict.to_dict(), "scaled": self.scaled_verdict.to_dict(),
                "breach": self.breach}


def check_vector_space_closure(spec_a, spec_b, scalar, p: int,
                               cfg: ClassifierConfig = ClassifierConfig()) -> ClosureReport:
    """StatPQC(p) verdicts of a + b and scalar * a, given both inputs pass."""
    a, b = _stream(spec_a), _stream(spec_b)
    c = numeric.parse_rational(scalar)
    pre = [classify_stat_p_quasi_cauchy(s, p, cfg) for s in (a, b)]
    bad = [str(s.spec) for s, v in zip((a, b), pre) if not v.satisfied]
    if bad:
        raise PreconditionNotMet(f"inputs not StatPQuasiCauchy(p={p}) at this config: {bad}", pre)
    total = classify_stat_p_quasi_cauchy(combine(a, b, 1, 1), p, cfg)
    scaled = classify_stat_p_quasi_cauchy(combine(a, a, c, 0), p, cfg)
    return ClosureReport(p, c, [str(a.spec), str(b.spec)], total, scaled)


# escaping witness ---------------------------------------------------------------

STOCK_SELECTORS = (SubsequenceSelector("identity"), SubsequenceSelector("evens"),
                   SubsequenceSelector("squares-skip"))


def exact_density_curve(stream, gap: int, epsilon, N: int) -> np.ndarray:
    """Exact counts #{k <= n : |a_{k+gap} - a_k| >= eps} for every n <= N."""
    values = _stream(stream).prefix(N + gap)
    diffs = [values[k + gap] - values[k] for k in range(N)]
    exceeds, ambiguous = exceedance_flags(diffs, numeric.parse_rational(epsilon))
    if ambiguous.any():
        raise ApproxValuesRejected("exact density curve needs exact terms")
    return np.cumsum(exceeds, dtype=np.int64)


@dataclass
class WitnessReport:
    p: int
    direction: str
    rows: list = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return all(r["density_one"] and r["all_violated"] for r in self.rows)

    def to_dict(self) -> dict:
        return {"p": self.p, "direction": self.direction, "holds": self.holds, "selectors": self.rows}


def witness_no_stat_p_qc_subsequence(p: int, direction: str = "above",
                                     selectors: Optional[Sequence[SubsequenceSelector]] = None,
                                     cfg: ClassifierConfig = ClassifierConfig(),
                                     classify: bool = True) -> WitnessReport:
    """Run the escaping sequence through each selector.

    For every selected subsequence the exact one-step exceedance count at
    eps = p/2 and at eps = p must equal n for every n <= cfg.N, and the
    StatPQC(q) verdicts for q = 1..p must be Violated.
    """
    selectors = list(selectors) if selectors else list(STOCK_SELECTORS)
    base = build_stream(Theorem1Witness(p, direction))
    report = WitnessReport(p, direction)
    full = np.arange(1, cfg.N + 1, dtype=np.int64)
    for sel in selectors:
        sub = subsequence(base, sel)
        row = {"selector": sel.method}
        ok = True
        for label, eps in (("half_p", Fraction(p, 2)), ("p", Fraction(p))):
            counts = exact_density_curve(sub, 1, eps, cfg.N)
            short = np.flatnonzero(counts != full)
            row[f"density_at_{label}"] = {"epsilon": eps, "exact_one": len(short) == 0,
                                          "first_short_n": int(short[0]) + 1 if len(short) else None}
            ok = ok and len(short) == 0
        row["density_one"] = ok
        if classify:
            verdicts = [classify_stat_p_quasi_cauchy(sub, q, cfg) for q in range(1, p + 1)]
            row["verdicts"] = {f"p={q}": v.status for q, v in enumerate(verdicts, 1)}
            row["all_violated"] = all(v.violated for v in verdicts)
        else:
            row["all_violated"] = True
        report.rows.append(row)
    return report


# bounded => compact via bisection -------------------------------------------------

_signed_bands = numeric.signed_bands


def _inside(values, bands, lo: Fraction, hi: Fraction) -> np.ndarray:
    """Provable membership of each value in [lo, hi]; undecidable counts as outside."""
    low, high = bands
    flo, fhi = float(lo), float(hi)
    pad = 2.0 ** -50 * max(abs(flo), abs(fhi), 1e-300)
    sure_in = (low >= flo + pad) & (high <= fhi - pad)
    sure_out = (high < flo - pad) | (low > fhi + pad)
    out = sure_in.copy()
    seen = {}
    for i in np.flatnonzero(~(sure_in | sure_out)):
        v = values[i]
        if v not in seen:
            a, b = numeric.compare(v, lo), numeric.compare(v, hi)
            seen[v] = a is not None and b is not None and a >= 0 and b <= 0
        out[i] = seen[v]
    return out


@dataclass
class BisectionResult:
    interval: tuple
    depth: int
    indices: tuple
    path: list

    @property
    def selector(self) -> SubsequenceSelector:
        return SubsequenceSelector("bisection-convergent", self.indices)


def bisection_selector(stream, bound, width, scan_limit: int, need: int,
                       late_fraction=Fraction(1, 2), density_floor=Fraction(1, 1000)) -> BisectionResult:
    """Halve [-bound, bound] until it is at most ``width`` wide.

    A half qualifies when it holds at least ``density_floor`` of the late part
    of the scanned prefix (a stand-in for "infinitely many terms"); failing
    that, any late term at all.  The lower half wins ties.
    """
    stream = _stream(stream)
    B = Fraction(bound)
    if B <= 0:
        B = Fraction(1)
    depth = max(0, math.ceil(math.log2(2 * B / Fraction(width))))
    while 2 * B / 2 ** depth > width:
        depth += 1
    values = stream.prefix(scan_limit)
    bands = _signed_bands(values)
    late_start = int(scan_limit * (1 - Fraction(late_fraction)))
    late = slice(late_start, scan_limit)
    late_size = scan_limit - late_start
    lo, hi = -B, B
    path = []
    for step in range(depth):
        mid = (lo + hi) / 2
        halves = [(lo, mid), (mid, hi)]
        counts = [int(_inside(values[late], (bands[0][late], bands[1][late]), a, b).sum())
                  for a, b in halves]
        pick = next((i for i, c in enumerate(counts) if c >= density_floor * late_size), None)
        if pick is None:
            pick = next((i for i, c in enumerate(counts) if c >= 1), None)
        if pick is None:
            raise BisectionExhausted(f"no late prefix term left in [{lo}, {hi}] at depth {step}")
        lo, hi = halves[pick]
        path.append({"depth": step + 1, "interval": (lo, hi), "late_count": counts[pick]})
    members = np.flatnonzero(_inside(values, bands, lo, hi)) + 1
    if len(members) < need:
        raise BisectionExhausted(
            f"only {len(members)} of the first {scan_limit} terms lie in [{lo}, {hi}], need {need}")
    return BisectionResult((lo, hi), depth, tuple(int(k) for k in members), path)


@dataclass
class CompactnessReport:
    source: str
    interval: tuple
    depth: int
    selected: int
    cauchy: ClassVerdict
    verdicts: dict

    @property
    def holds(self) -> bool:
        return self.cauchy.satisfied and all(v.satisfied for v in self.verdicts.values())

    def to_dict(self) -> dict:
        return {"sequence": self.source, "interval": list(self.interval), "depth": self.depth,
                "selected_terms": self.selected, "cauchy_prefix": self.cauchy.to_dict(),
                "stat_p_quasi_cauchy": {k: v.to_dict() for k, v in self.verdicts.items()},
                "holds": self.holds}


def check_bounded_implies_stat_p_ward_compact(spec, p_list=(1, 2), cfg: ClassifierConfig = ClassifierConfig(),
                                              scan_factor: int = 8) -> CompactnessReport:
    """Extract a convergent subsequence of a bounded sequence and classify it.

    The final interval width is half the smaller of the tolerance and the
    smallest grid epsilon, so the subsequence's tail diameter clears both.
    """
    stream = _stream(spec)
    p_list = sorted(set(p_list))
    bounded = classify_bounded(stream, cfg)
    if not bounded.satisfied:
        raise PreconditionNotMet(f"{stream.spec} is not Bounded at this config", [bounded])
    bound = Fraction(math.ceil(numeric.to_float(abs(bounded.witness["bound"])) * (1 + 2.0 ** -40)) or 1)
    width = min(cfg.tolerance, cfg.eps_grid.values[-1]) / 2
    need = cfg.N + max(p_list) + 1
    result = bisection_selector(stream, bound, width, scan_factor * cfg.N, need,
                                density_floor=cfg.tolerance)
    sub = subsequence(stream, result.selector)
    cauchy = classify_cauchy_prefix(sub, cfg)
    verdicts = {f"p={p}": classify_stat_p_quasi_cauchy(sub, p, cfg) for p in p_list}
    return CompactnessReport(str(stream.spec), result.interval, result.depth, len(result.indices),
                             cauchy, verdicts)
