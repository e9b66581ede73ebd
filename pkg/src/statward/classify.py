"""Finite-prefix verdicts for the sequence classes.

Every verdict is a proxy computed from the first ``N`` terms (a few more when
a difference or window needs them) and carries the configuration it was
computed under: "Satisfied at (N, tolerance)" is the actual claim.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional

import numpy as np

from . import numeric
from .density import (
    DEFAULT_N, DEFAULT_TAIL_FRACTION, DEFAULT_TOLERANCE, EpsilonGrid, InsufficientData,
    curve_from_flags, default_stride, exceedance_flags, gap_values, limit_verdict,
    tail_window,
)
from .sequences import SequenceStream, build_stream

SATISFIED = "satisfied"
VIOLATED = "violated"
INCONCLUSIVE = "inconclusive"

DEFAULT_LAMBDAS = (Fraction(3, 2), Fraction(11, 10), Fraction(101, 100), Fraction(1001, 1000))


@dataclass(frozen=True)
class ClassifierConfig:
    N: int = DEFAULT_N
    eps_grid: EpsilonGrid = field(default_factory=EpsilonGrid)
    lambda_grid: tuple = DEFAULT_LAMBDAS
    tail_fraction: Fraction = DEFAULT_TAIL_FRACTION
    tolerance: Fraction = DEFAULT_TOLERANCE
    sample_stride: Optional[int] = None

    def __post_init__(self):
        if not isinstance(self.eps_grid, EpsilonGrid):
            object.__setattr__(self, "eps_grid", EpsilonGrid(tuple(self.eps_grid)))
        lams = tuple(numeric.parse_rational(x) for x in self.lambda_grid)
        if not lams or any(x <= 1 for x in lams):
            raise ValueError("lambda grid values must exceed 1")
        if any(b >= a for a, b in zip(lams, lams[1:])):
            raise ValueError("lambda grid must decrease strictly toward 1")
        object.__setattr__(self, "lambda_grid", lams)
        object.__setattr__(self, "tail_fraction", numeric.parse_rational(self.tail_fraction))
        object.__setattr__(self, "tolerance", numeric.parse_rational(self.tolerance))
        if self.N < 1 or self.tolerance <= 0 or not 0 < self.tail_fraction < 1:
            raise ValueError("N and tolerance must be positive and tail fraction in (0, 1)")

    @property
    def stride(self) -> int:
        return self.sample_stride or default_stride(self.N)

    def with_(self, **changes) -> "ClassifierConfig":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "eps_grid": [str(e) for e in self.eps_grid],
            "lambda_grid": [str(x) for x in self.lambda_grid],
            "tail_fraction": str(self.tail_fraction),
            "tolerance": str(self.tolerance),
            "sample_stride": self.stride,
        }


@dataclass
class ClassVerdict:
    label: str
    status: str
    witness: Optional[dict] = None
    reason: str = ""
    config: dict = field(default_factory=dict)
    details: list = field(default_factory=list)

    @property
    def satisfied(self) -> bool:
        return self.status == SATISFIED

    @property
    def violated(self) -> bool:
        return self.status == VIOLATED

    def to_dict(self) -> dict:
        out = {"class": self.label, "status": self.status}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.reason:
            out["reason"] = self.reason
        if self.details:
            out["details"] = self.details
        out["config"] = self.config
        return out


@dataclass
class StatLimitEstimate:
    candidate: object
    exception_density: list = field(default_factory=list)


def _stream(x) -> SequenceStream:
    return x if isinstance(x, SequenceStream) else build_stream(x)


def _per_epsilon(values, cfg: ClassifierConfig, N: int, bands=None):
    """Limit verdicts of the exceedance density of ``values`` at every grid epsilon."""
    if bands is None:
        bands = numeric.magnitude_bands(values)
    rows = []
    for eps in cfg.eps_grid:
        exceeds, ambiguous = exceedance_flags(values, eps, bands)
        curve = curve_from_flags(exceeds, ambiguous, eps, N, cfg.stride)
        try:
            lv = limit_verdict(curve, cfg.tail_fraction, cfg.tolerance)
        except InsufficientData as exc:
            rows.append({"epsilon": eps, "status": "inconclusive", "reason": str(exc)})
            continue
        row = {"epsilon": eps, "status": lv.status, "tail_max_density": lv.max_density,
               "tail_min_density": lv.min_density}
        if lv.estimate is not None:
            row["tail_density"] = lv.estimate
        if lv.reason:
            row["reason"] = lv.reason
        rows.append(row)
    return rows


def _verdict_from_rows(label, rows, cfg, note=""):
    if all(r["status"] == "zero" for r in rows):
        return ClassVerdict(label, SATISFIED, reason=note, config=cfg.to_dict(), details=rows)
    failing = [r for r in rows if r["status"] == "positive"]
    if failing:
        worst = failing[-1]  # grid decreases, so the last failing epsilon is the smallest
        witness = {"epsilon": worst["epsilon"], "tail_density": worst["tail_density"],
                   "failing_epsilons": [r["epsilon"] for r in failing]}
        return ClassVerdict(label, VIOLATED, witness=witness, reason=note, config=cfg.to_dict(),
                            details=rows)
    reasons = sorted({r.get("reason", "") for r in rows if r["status"] == "inconclusive"})
    return ClassVerdict(label, INCONCLUSIVE, reason="; ".join(filter(None, reasons)),
                        config=cfg.to_dict(), details=rows)


def classify_stat_p_quasi_cauchy(stream, p: int, cfg: ClassifierConfig = ClassifierConfig()) -> ClassVerdict:
    """Statistically p-quasi-Cauchy: the exceedance density of |a_{k+p} - a_k| tends to 0 for every eps."""
    stream = _stream(stream)
    values, bands = gap_values(stream, p, cfg.N)
    return _verdict_from_rows(f"StatPQuasiCauchy(p={p})", _per_epsilon(values, cfg, cfg.N, bands), cfg)


def _last_index(flags) -> int:
    nz = np.flatnonzero(flags)
    return int(nz[-1]) + 1 if len(nz) else 0


def classify_quasi_cauchy(stream, cfg: ClassifierConfig = ClassifierConfig(), p: int = 1) -> ClassVerdict:
    """Differences a_{k+p} - a_k eventually below every grid eps, before the tail window starts.

    ``p = 1`` is plain quasi-Cauchy; larger ``p`` gives the pointwise p-gap variant.
    """
    stream = _stream(stream)
    values, bands = gap_values(stream, p, cfg.N)
    start, _ = tail_window(cfg.N, cfg.tail_fraction)
    rows = []
    for eps in cfg.eps_grid:
        exceeds, ambiguous = exceedance_flags(values, eps, bands)
        last = _last_index(exceeds)
        last_any = _last_index(exceeds | ambiguous)
        if last_any < start:
            rows.append({"epsilon": eps, "status": "zero", "settles_after": last_any})
        elif last >= start:
            rows.append({"epsilon": eps, "status": "positive", "index": last,
                         "difference": numeric.format_value(values[last - 1])})
        else:
            rows.append({"epsilon": eps, "status": "inconclusive", "index": last_any,
                         "reason": "ambiguous comparison in tail window"})
    label = "QuasiCauchy" if p == 1 else f"PQuasiCauchy(p={p})"
    if all(r["status"] == "zero" for r in rows):
        return ClassVerdict(label, SATISFIED, config=cfg.to_dict(), details=rows)
    bad = [r for r in rows if r["status"] == "positive"]
    if bad:
        w = bad[-1]
        return ClassVerdict(label, VIOLATED, witness={"epsilon": w["epsilon"], "index": w["index"],
                                                      "difference": w["difference"]},
                            config=cfg.to_dict(), details=rows)
    return ClassVerdict(label, INCONCLUSIVE, reason="ambiguous comparison in tail window",
                        config=cfg.to_dict(), details=rows)


def _spread(values):
    """Diameter of ``values`` via midpoints, the slack from error radii, and arg extremes."""
    mids = [numeric.midpoint(v) for v in values]
    slack = max((Fraction(*v.rad.as_integer_ratio()) for v in values if isinstance(v, numeric.Approx)),
                default=Fraction(0))
    i_min = min(range(len(mids)), key=mids.__getitem__)
    i_max = max(range(len(mids)), key=mids.__getitem__)
    return mids[i_max] - mids[i_min], 2 * slack, i_min, i_max


def classify_cauchy_prefix(stream, cfg: ClassifierConfig = ClassifierConfig()) -> ClassVerdict:
    """Prefix proxy for Cauchy: the tail-window diameter is below every grid eps."""
    stream = _stream(stream)
    start, end = tail_window(cfg.N, cfg.tail_fraction)
    smallest = cfg.eps_grid.values[-1]
    note = "prefix proxy: tail-window diameter"
    # one look-ahead term so the window covers every difference the quasi-Cauchy test sees
    lo, hi = stream.enclosure(end + 1)
    lo, hi = lo[start - 1:], hi[start - 1:]
    if np.isfinite(lo).all() and np.isfinite(hi).all():
        upper = float(np.nextafter(hi.max() - lo.min(), np.inf))
        lower = float(np.nextafter(lo.max() - hi.min(), -np.inf))
        mid = (lo + hi) / 2
        i_min, i_max = int(np.argmin(mid)), int(np.argmax(mid))
        failing = [e for e in cfg.eps_grid if lower >= e]
        if upper < smallest or failing:
            diameter = numeric.midpoint(stream.term(start + i_max)) - numeric.midpoint(stream.term(start + i_min))
            witness = {"diameter": diameter, "window": (start, end + 1),
                       "indices": (start + i_min, start + i_max)}
            if not failing:
                return ClassVerdict("CauchyPrefix", SATISFIED, witness=witness, reason=note,
                                    config=cfg.to_dict())
            witness["epsilon"] = failing[-1]
            return ClassVerdict("CauchyPrefix", VIOLATED, witness=witness, reason=note, config=cfg.to_dict())
    diameter, slack, i_min, i_max = _spread(stream.terms(start, end + 2))
    witness = {"diameter": diameter, "window": (start, end + 1),
               "indices": (start + i_min, start + i_max)}
    if diameter + slack < smallest:
        return ClassVerdict("CauchyPrefix", SATISFIED, witness=witness, reason=note, config=cfg.to_dict())
    failing = [e for e in cfg.eps_grid if diameter - slack >= e]
    if not failing:
        return ClassVerdict("CauchyPrefix", INCONCLUSIVE, witness=witness,
                            reason="diameter within rounding slack of the smallest epsilon",
                            config=cfg.to_dict())
    witness["epsilon"] = failing[-1]
    return ClassVerdict("CauchyPrefix", VIOLATED, witness=witness, reason=note, config=cfg.to_dict())


def _clusters(values, width):
    """Best window [v_i, v_j] of the sorted values with v_j - v_i <= width.

    Returns (count, i, j) of the most populated window, ties to the smaller start.
    """
    best = (0, 0, 0)
    j = 0
    m = len(values)
    for i in range(m):
        if j < i:
            j = i
        while j + 1 < m and values[j + 1] - values[i] <= width:
            j += 1
        if j - i + 1 > best[0]:
            best = (j - i + 1, i, j)
    return best


def estimate_statistical_limit(stream, cfg: ClassifierConfig = ClassifierConfig()):
    """Histogram-sweep candidate for the statistical limit, then a density check.

    The candidate is the midpoint of the most populated window of width
    ``tolerance`` among tail terms, provided it holds at least a
    ``1 - tolerance`` fraction of them.
    """
    stream = _stream(stream)
    start, end = tail_window(cfg.N, cfg.tail_fraction)
    tail = sorted((numeric.midpoint(v) for v in stream.terms(start, end + 1)))
    m = len(tail)
    tol = cfg.tolerance
    count, i, j = _clusters(tail, tol)
    label = "StatConvergent"
    if Fraction(count, m) < 1 - tol:
        first = {"value": (tail[i] + tail[j]) / 2, "frequency": Fraction(count, m)}
        rest = tail[:i] + tail[j + 1:]
        c2, i2, j2 = _clusters(rest, tol) if rest else (0, 0, 0)
        witness = {"max_cluster": first}
        if c2:
            second = {"value": (rest[i2] + rest[j2]) / 2, "frequency": Fraction(c2, m)}
            if first["frequency"] >= Fraction(1, 4) and second["frequency"] >= Fraction(1, 4):
                pair = sorted([first, second], key=lambda d: d["value"])
                witness = {"bimodal": pair}
            else:
                witness["second_cluster"] = second
        verdict = ClassVerdict(label, VIOLATED, witness=witness,
                               reason="no candidate limit: tail terms do not concentrate",
                               config=cfg.to_dict())
        return StatLimitEstimate(None), verdict
    L = (tail[i] + tail[j]) / 2
    values = [v - L for v in stream.prefix(cfg.N)]
    rows = _per_epsilon(values, cfg, cfg.N)
    verdict = _verdict_from_rows(f"StatConvergent(L={L})", rows, cfg)
    verdict.witness = dict(verdict.witness or {}, candidate=L)
    estimate = StatLimitEstimate(L, [(r["epsilon"], r.get("tail_max_density")) for r in rows])
    return estimate, verdict


def _float_terms(stream, n):
    out = np.empty(n)
    for i, v in enumerate(stream.prefix(n)):
        out[i] = numeric.to_float(v)
    return out


def classify_slowly_oscillating(stream, cfg: ClassifierConfig = ClassifierConfig()) -> ClassVerdict:
    """Window maxima max_{n < k <= floor(lambda n)} |a_k - a_n| over the tail, for each lambda.

    Satisfied when the maxima improve monotonically as lambda decreases and
    fall below the tolerance at the smallest lambda.
    """
    stream = _stream(stream)
    lams = cfg.lambda_grid
    top = math.floor(lams[0] * cfg.N)
    a = _float_terms(stream, top)
    start, end = tail_window(cfg.N, cfg.tail_fraction)
    samples = [n for n in range(start, end + 1, max(1, (end - start) // 200))]
    rows = []
    for lam in lams:
        best = (-1.0, 0, 0)
        for n in samples:
            hi = math.floor(lam * n)
            if hi <= n:
                continue
            window = np.abs(a[n:hi] - a[n - 1])
            idx = int(np.argmax(window))
            if window[idx] > best[0]:
                best = (float(window[idx]), n, n + 1 + idx)
        rows.append({"lambda": lam, "window_max": best[0], "n": best[1], "k": best[2]})
    tol = float(cfg.tolerance)
    maxima = [r["window_max"] for r in rows]
    monotone = all(b <= a_ * (1 + 1e-12) + 1e-300 for a_, b in zip(maxima, maxima[1:]))
    last = rows[-1]
    label = "SlowlyOscillating"
    if last["window_max"] >= tol:
        return ClassVerdict(label, VIOLATED, witness=last, config=cfg.to_dict(), details=rows)
    if monotone:
        return ClassVerdict(label, SATISFIED, config=cfg.to_dict(), details=rows)
    return ClassVerdict(label, INCONCLUSIVE, reason="window maxima not monotone in lambda",
                        config=cfg.to_dict(), details=rows)


def classify_bounded(stream, cfg: ClassifierConfig = ClassifierConfig()) -> ClassVerdict:
    """Running max of |a_k| must stop growing (beyond tolerance) inside the tail window."""
    stream = _stream(stream)
    values = stream.prefix(cfg.N)
    _, hi = numeric.magnitude_bands(values)
    start, _ = tail_window(cfg.N, cfg.tail_fraction)
    head_max = float(hi[:start - 1].max()) if start > 1 else 0.0
    i_max = int(np.argmax(hi))
    bound = abs(values[i_max])
    total_max = float(hi[i_max])
    note = "prefix proxy: running maximum of |a_k|"
    if total_max <= head_max + float(cfg.tolerance) * max(1.0, head_max):
        return ClassVerdict("Bounded", SATISFIED, witness={"bound": bound, "index": i_max + 1},
                            reason=note, config=cfg.to_dict())
    running = np.maximum.accumulate(hi)
    records = np.flatnonzero(running[start - 1:] > np.concatenate(([head_max], running[start - 1:-1])))
    escapes = [int(r) + start for r in records]
    witness = {"escape_indices": escapes[:5] + (escapes[-5:] if len(escapes) > 5 else []),
               "escape_count": len(escapes), "head_max": head_max, "prefix_max": bound}
    return ClassVerdict("Bounded", VIOLATED, witness=witness, reason=note, config=cfg.to_dict())


@dataclass
class ProfileReport:
    source: str
    verdicts: dict
    config: dict

    def to_dict(self) -> dict:
        return {"sequence": self.source, "config": self.config,
                "verdicts": [v.to_dict() for v in self.verdicts.values()]}


def full_profile(stream, p_list, cfg: ClassifierConfig = ClassifierConfig()) -> ProfileReport:
    """All class verdicts plus statistical p-quasi-Cauchyness for each p in ``p_list``."""
    p_list = list(p_list)
    if not p_list:
        raise ValueError("p_list must be nonempty")
    stream = _stream(stream)
    jobs = [
        ("Bounded", lambda: classify_bounded(stream, cfg)),
        ("CauchyPrefix", lambda: classify_cauchy_prefix(stream, cfg)),
        ("QuasiCauchy", lambda: classify_quasi_cauchy(stream, cfg)),
        ("StatConvergent", lambda: estimate_statistical_limit(stream, cfg)[1]),
        ("SlowlyOscillating", lambda: classify_slowly_oscillating(stream, cfg)),
    ]
    for p in p_list:
        jobs.append((f"StatPQuasiCauchy(p={p})", lambda p=p: classify_stat_p_quasi_cauchy(stream, p, cfg)))
    verdicts = {}
    for key, job in jobs:
        try:
            verdicts[key] = job()
        except (ValueError, ArithmeticError, IndexError) as exc:
            verdicts[key] = ClassVerdict(key, INCONCLUSIVE, reason=f"{type(exc).__name__}: {exc}",
                                         config=cfg.to_dict())
    return ProfileReport(str(stream.spec), verdicts, cfg.to_dict())
