"""Sequence-preservation tests for real functions.

A function is judged on a corpus: it "preserves" a class when every corpus
input in the class is mapped to an image in the target class at the given
prefix configuration.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.stats import qmc

from . import numeric
from .classify import (
    INCONCLUSIVE, SATISFIED, VIOLATED, ClassifierConfig, ClassVerdict, classify_cauchy_prefix,
    classify_quasi_cauchy, classify_slowly_oscillating, classify_stat_p_quasi_cauchy,
)
from .density import gap_curves, tail_window
from .expr import BinOp, Call, Const, FunctionSpec, Interval, eval_function, parse_function
from .numeric import DomainViolation
from .sequences import Explicit, Mapped, SequenceStream, build_stream, interleave_blocks
from .theorems import PreconditionNotMet


class InsufficientWitnesses(ValueError):
    pass


def _fn(f) -> FunctionSpec:
    return parse_function(f) if isinstance(f, str) else f


def _stream(x) -> SequenceStream:
    return x if isinstance(x, SequenceStream) else build_stream(x)


def map_stream(fspec, stream) -> SequenceStream:
    """Termwise image f(a_k); a term outside the domain raises DomainViolation with its index."""
    stream = _stream(stream)
    reuse = [stream]
    return build_stream(Mapped(_fn(fspec), stream.spec), reuse)


# preservation -------------------------------------------------------------------

def preservation_check(fspec, seq, p: int, cfg: ClassifierConfig = ClassifierConfig(),
                       check_input: bool = True) -> ClassVerdict:
    """StatPQC(p) verdict of the image of a StatPQC(p) input."""
    f, s = _fn(fspec), _stream(seq)
    if check_input:
        pre = classify_stat_p_quasi_cauchy(s, p, cfg)
        if not pre.satisfied:
            raise PreconditionNotMet(f"input {s.spec} is {pre.status} for StatPQuasiCauchy(p={p})", [pre])
    verdict = classify_stat_p_quasi_cauchy(map_stream(f, s), p, cfg)
    verdict.reason = (verdict.reason + "; " if verdict.reason else "") + f"image of {s.spec} under {f}"
    return verdict


@dataclass
class SuiteReport:
    name: str
    cells: list = field(default_factory=list)
    skipped: list = field(default_factory=list)
    config: dict = field(default_factory=dict)

    @property
    def breaches(self) -> list:
        return [c for c in self.cells if c["status"] == VIOLATED]

    @property
    def ok(self) -> bool:
        return not self.breaches

    def to_dict(self) -> dict:
        return {"suite": self.name, "cells": self.cells, "skipped": self.skipped,
                "breaches": len(self.breaches), "config": self.config}


def theorem4_suite(corpus_f, corpus_s, p_list=(1, 2, 3), cfg: ClassifierConfig = ClassifierConfig()) -> SuiteReport:
    """Uniformly continuous f maps pointwise p-quasi-Cauchy inputs to StatPQC(p) images.

    Inputs whose p-gaps do not settle inside the prefix are skipped (the
    precondition); any Violated image is a breach.
    """
    report = SuiteReport("theorem4", config=cfg.to_dict())
    fs = [_fn(f) for f in corpus_f]
    streams = [_stream(s) for s in corpus_s]
    for p in p_list:
        for s in streams:
            pre = classify_quasi_cauchy(s, cfg, p=p)
            if not pre.satisfied:
                report.skipped.append({"sequence": str(s.spec), "p": p, "reason": f"input {pre.status}"})
                continue
            for f in fs:
                cell = {"function": str(f), "sequence": str(s.spec), "p": p}
                try:
                    v = classify_stat_p_quasi_cauchy(map_stream(f, s), p, cfg)
                    cell["status"] = v.status
                    if v.witness:
                        cell["witness"] = v.witness
                except DomainViolation as exc:
                    cell["status"] = INCONCLUSIVE
                    cell["reason"] = str(exc)
                report.cells.append(cell)
    return report


# uniform continuity probe ---------------------------------------------------------

DEFAULT_DELTAS = tuple(Fraction(1, 10 ** k) for k in range(1, 7))
PROBE_WINDOW = 10


@dataclass
class ModulusCurve:
    deltas: list
    modulus: list
    pairs: list
    window: tuple

    def rows(self):
        for d, m, pair in zip(self.deltas, self.modulus, self.pairs):
            yield [str(d), m, pair[0], pair[1]]


def _window(domain: Interval, width=PROBE_WINDOW):
    lo = float(domain.lo) if domain.lo is not None else -float(width)
    hi = float(domain.hi) if domain.hi is not None else float(width)
    if domain.lo is None and domain.hi is not None:
        lo = hi - 2 * width
    if domain.hi is None and domain.lo is not None:
        hi = lo + 2 * width
    return lo, hi


def _clip_open(x, domain: Interval, lo, hi):
    """Keep points strictly inside open ends and within closed ones."""
    lo_in = np.nextafter(lo, np.inf) if domain.lo is None or not domain.lo_closed else lo
    hi_in = np.nextafter(hi, -np.inf) if domain.hi is None or not domain.hi_closed else hi
    return np.clip(x, lo_in, hi_in)


def _probe_pairs(domain, delta, count, seed=0):
    lo, hi = _window(domain)
    width = hi - lo
    halton = qmc.Halton(d=2, scramble=False, seed=seed).random(count + 1)[1:]
    base = lo + halton[:, 0] * width
    offset = (2 * halton[:, 1] - 1) * delta
    # pairs hugging each end, at scales from delta down to delta^3
    t = np.geomspace(delta ** 3, delta, max(8, count // 8))
    frac = halton[: len(t), 1]
    xs = np.concatenate([base, lo + t, hi - t])
    ys = np.concatenate([base + offset, lo + t + delta * frac, hi - t - delta * frac])
    xs, ys = _clip_open(xs, domain, lo, hi), _clip_open(ys, domain, lo, hi)
    keep = np.abs(xs - ys) <= delta
    return xs[keep], ys[keep]


def uniform_continuity_probe(fspec, delta_grid=DEFAULT_DELTAS, samples_per_delta: int = 4096,
                             cfg: ClassifierConfig = ClassifierConfig()):
    """Sampled modulus of continuity and a verdict on its value at the smallest delta.

    Satisfied iff modulus(min delta) < tolerance * scale, scale = max(1, sampled
    range of f).  Unbounded domains are probed on a window and come back
    Inconclusive.
    """
    f = _fn(fspec)
    g = f.compile()
    deltas = sorted(Fraction(d) for d in delta_grid)
    mods, pairs = [], []
    values_seen = []
    for d in deltas:
        xs, ys = _probe_pairs(f.domain, float(d), samples_per_delta)
        fx, fy = g(xs), g(ys)
        gap = np.abs(fx - fy)
        ok = np.isfinite(gap)
        values_seen.extend(fx[np.isfinite(fx)][:: max(1, len(fx) // 512)])
        if not ok.any():
            raise DomainViolation(f"no sample of {f} evaluates inside its domain")
        i = int(np.nanargmax(np.where(ok, gap, -1)))
        mods.append(float(gap[i]))
        pairs.append((float(xs[i]), float(ys[i])))
    # a pair within delta is also within every larger delta
    for i in range(1, len(mods)):
        if mods[i] < mods[i - 1]:
            mods[i], pairs[i] = mods[i - 1], pairs[i - 1]
    curve = ModulusCurve([str(d) for d in deltas], mods, pairs, _window(f.domain))
    scale = max(1.0, float(np.ptp(values_seen))) if values_seen else 1.0
    threshold = float(cfg.tolerance) * scale
    witness = {"delta": str(deltas[0]), "modulus": mods[0], "pair": pairs[0], "scale": scale}
    if not f.domain.bounded:
        return curve, ClassVerdict("UniformContinuity", INCONCLUSIVE, witness=witness,
                                   reason=f"unbounded domain probed on window {curve.window}",
                                   config=cfg.to_dict())
    status = SATISFIED if mods[0] < threshold else VIOLATED
    return curve, ClassVerdict("UniformContinuity", status, witness=witness,
                               reason="sampled modulus at the smallest delta", config=cfg.to_dict())


# witness pairs ---------------------------------------------------------------------

@dataclass
class WitnessPair:
    n: int
    alpha: Fraction
    beta: Fraction
    gap: object  # |f(alpha) - f(beta)|, exact or Approx

    def to_dict(self):
        return {"n": self.n, "alpha": self.alpha, "beta": self.beta, "gap": numeric.format_value(self.gap)}


_SHRINK = (0.5, 0.75, 0.875, 0.9375)


class _Finder:
    """Deterministic float search for pairs |x - y| < delta with |f(x) - f(y)| >= eps0."""

    def __init__(self, f: FunctionSpec, uniform=4096):
        self.f = f
        self.g = f.compile()
        self.lo, self.hi = _window(f.domain)
        self.uniform = self.lo + (self.hi - self.lo) * (np.arange(1, uniform + 1) / (uniform + 1))

    def bases(self, delta):
        ends = []
        span = self.hi - self.lo
        steps = max(8, int(math.ceil(math.log(span / delta ** 2) / math.log(1.05))))
        t = np.geomspace(delta ** 2, span, steps)
        if self.f.domain.lo is not None:
            ends.append(self.lo + t)
        if self.f.domain.hi is not None:
            ends.append(self.hi - t)
        return np.concatenate(ends + [self.uniform])

    def candidates(self, delta, eps0, xs=None):
        """Float pairs (x, y, gap) at every base point whose float values are trustworthy."""
        xs = self.bases(delta) if xs is None else xs
        xs = xs[self.stable(xs, eps0)]
        out_x, out_y = [], []
        for s in _SHRINK:
            for sign in (1.0, -1.0):
                out_x.append(xs)
                out_y.append(xs + sign * s * delta)
        x, y = np.concatenate(out_x), np.concatenate(out_y)
        inside = (x > self.lo) & (x < self.hi) & (y > self.lo) & (y < self.hi)
        x, y = x[inside], y[inside]
        gap = np.abs(self.g(x) - self.g(y))
        ok = np.isfinite(gap) & self.stable(y, eps0)
        return x[ok], y[ok], gap[ok]

    def stable(self, x, eps0):
        """Points where a few ulps of input noise move f by far less than eps0.

        Elsewhere float64 values of f are noise and only waste exact checks.
        """
        u = 8 * np.finfo(float).eps
        fx = self.g(x)
        wobble = np.maximum(np.abs(self.g(x * (1 + u)) - fx), np.abs(self.g(x * (1 - u)) - fx))
        return wobble < 1e-3 * float(eps0)

    def refine(self, x, y, delta):
        """Golden-section on the base point with the offset held fixed."""
        h = y - x
        lo = max(self.lo, min(x, x + h) - delta) - min(0.0, h)
        hi = min(self.hi, max(x, x + h) + delta) - max(0.0, h)
        if not lo < hi:
            return x, y
        g = self.g
        res = minimize_scalar(lambda t: -abs(float(g(t)) - float(g(t + h))), bracket=None,
                              bounds=(lo, hi), method="bounded", options={"xatol": delta * 1e-6})
        t = float(res.x)
        if np.isfinite(res.fun) and -res.fun > abs(float(g(x)) - float(g(y))):
            return t, t + h
        return x, y


def _verify(f, n, x, y, eps0):
    a, b = Fraction(x), Fraction(y)
    if not abs(a - b) < Fraction(1, n):
        return None
    try:
        fa, fb = eval_function(f, a), eval_function(f, b)
    except DomainViolation:
        return None
    if f.domain.contains(a) is not True or f.domain.contains(b) is not True:
        return None
    gap = fb - fa
    if numeric.abs_at_least(gap, eps0) is not True:
        return None
    if numeric.compare(gap, 0) == -1:  # orient so f(alpha) <= f(beta)
        a, b, gap = b, a, -gap
    return WitnessPair(n, a, b, gap)


def _pick(finder, f, n, x, y, gap, eps0, prefer, band, tries):
    good = gap >= float(eps0) * (1 + 1e-9)
    x, y, gap = x[good], y[good], gap[good]
    if prefer is not None:
        key = np.abs(np.minimum(x, y) - prefer)
        if band is not None:
            m, half = band
            fx, fy = finder.g(x), finder.g(y)
            banded = (np.minimum(fx, fy) <= m - half) & (np.maximum(fx, fy) >= m + half)
            key = key + np.where(banded, 0.0, np.inf)
            keep = np.isfinite(key)
            x, y, key = x[keep], y[keep], key[keep]
        order = np.argsort(key, kind="stable")
    else:
        order = np.argsort(-gap, kind="stable")
    for i in order[:tries]:
        pair = _verify(f, n, float(x[i]), float(y[i]), eps0)
        if pair is not None:
            return pair
    return None


def _search_one(finder, f, n, delta, eps0, prefer=None, band=None, tries=12, chunk=128):
    bases = finder.bases(delta)
    if prefer is not None:
        # scan outward from the accumulation point; most blocks stop in the first chunk
        bases = bases[np.argsort(np.abs(bases - prefer), kind="stable")]
        for start in range(0, len(bases), chunk):
            x, y, gap = finder.candidates(delta, eps0, bases[start:start + chunk])
            pair = _pick(finder, f, n, x, y, gap, eps0, prefer, band, tries)
            if pair is not None:
                return pair
        band = None
    x, y, gap = finder.candidates(delta, eps0, bases)
    if len(gap) == 0:
        return None
    if not (gap >= float(eps0)).any():
        i = int(np.argmax(gap))
        rx, ry = finder.refine(float(x[i]), float(y[i]), delta)
        return _verify(f, n, rx, ry, eps0)
    return _pick(finder, f, n, x, y, gap, eps0, prefer, band, tries)


def violation_witness_search(fspec, eps0, max_n: int) -> list:
    """Pairs with |alpha - beta| < 1/n and |f(alpha) - f(beta)| >= eps0, searched at delta = 1/(2n).

    Only pairs verified with exact or rigorous interval arithmetic are kept,
    so an empty list is a legitimate answer.
    """
    f = _fn(fspec)
    eps0 = numeric.parse_rational(eps0) if not isinstance(eps0, float) else Fraction(str(eps0))
    finder = _Finder(f)
    out = []
    for n in range(1, max_n + 1):
        pair = _search_one(finder, f, n, 1.0 / (2 * n), eps0)
        if pair is not None:
            out.append(pair)
    return out


# adversarial interleave -------------------------------------------------------------

@dataclass
class AdversaryReport:
    function: str
    p: int
    eps0: Fraction
    pairs: int
    input_verdict: ClassVerdict
    image_verdict: ClassVerdict
    tail_density: Fraction
    config: dict
    first_pairs: list = field(default_factory=list)

    @property
    def holds(self) -> bool:
        tol = Fraction(self.config["tolerance"])
        return (self.input_verdict.satisfied and self.image_verdict.violated
                and self.tail_density >= 1 - tol)

    def to_dict(self) -> dict:
        return {"function": self.function, "p": self.p, "eps0": self.eps0, "pairs": self.pairs,
                "input": self.input_verdict.to_dict(), "image": self.image_verdict.to_dict(),
                "tail_min_density": self.tail_density, "holds": self.holds,
                "first_pairs": [w.to_dict() for w in self.first_pairs], "config": self.config}


def _accumulation_point(finder, f, delta, eps0):
    """Where violations concentrate: the best pair at a tiny delta, snapped to a nearby endpoint."""
    x, y, gap = finder.candidates(delta, eps0)
    if len(gap) == 0 or gap.max() < eps0:
        return None
    i = int(np.argmax(gap))
    c = float(min(x[i], y[i]))
    span = finder.hi - finder.lo
    for end, finite in ((finder.lo, f.domain.lo is not None), (finder.hi, f.domain.hi is not None)):
        if finite and abs(c - end) < 1e-6 * span:
            return end
    return c


def theorem6_adversary(fspec, p: int, eps0, cfg: ClassifierConfig = ClassifierConfig()) -> AdversaryReport:
    """Interleave witness pairs into a StatPQC(p) input whose image is not StatPQC(p).

    Block j holds p copies of alpha_j then p copies of beta_j, with
    |alpha_j - beta_j| < 1/j^3 (a refinement of the 1/n condition).  The
    alphas are steered toward one accumulation point so the input settles,
    and pairs straddling the midline of f there are preferred so both kinds of
    block boundary carry a jump of at least eps0.
    """
    f = _fn(fspec)
    eps0 = numeric.parse_rational(eps0) if not isinstance(eps0, float) else Fraction(str(eps0))
    blocks = cfg.N // (2 * p) + 2
    finder = _Finder(f, uniform=1024)
    tiny = 1.0 / (2 * blocks ** 3)
    c = _accumulation_point(finder, f, tiny, eps0)
    if c is None:
        raise InsufficientWitnesses(f"no pair with gap >= {eps0} found for {f} at delta {tiny:.3g}")
    near = finder.bases(tiny)
    near = near[np.argsort(np.abs(near - c))[:256]]
    fv = finder.g(near)
    fv = fv[np.isfinite(fv)]
    band = ((float(fv.max()) + float(fv.min())) / 2, float(eps0) / 2) if len(fv) else None
    alphas, betas, witnesses = [], [], []
    for j in range(1, blocks + 1):
        pair = _search_one(finder, f, j ** 3, 1.0 / (2 * j ** 3), eps0, prefer=c, band=band)
        if pair is None:
            raise InsufficientWitnesses(f"no verified pair for block {j} of {blocks}")
        alphas.append(pair.alpha)
        betas.append(pair.beta)
        if j <= 5:
            witnesses.append(pair)
    a = build_stream(Explicit(tuple(alphas)))
    b = build_stream(Explicit(tuple(betas)))
    x = interleave_blocks(a, b, p)
    input_verdict = classify_stat_p_quasi_cauchy(x, p, cfg)
    image = map_stream(f, x)
    image_verdict = classify_stat_p_quasi_cauchy(image, p, cfg)
    curve = gap_curves(image, p, [eps0], cfg.N, cfg.stride)[0]
    start, _ = tail_window(cfg.N, cfg.tail_fraction)
    tail = [Fraction(int(c_), int(n)) for n, c_ in zip(curve.n, curve.count) if n >= start]
    return AdversaryReport(str(f), p, eps0, len(alphas), input_verdict, image_verdict, min(tail),
                           cfg.to_dict(), witnesses)


# algebra identities ---------------------------------------------------------------------

def _intersect(a: Interval, b: Interval) -> Interval:
    def pick_lo(x, y):
        if x[0] is None:
            return y
        if y[0] is None:
            return x
        if x[0] != y[0]:
            return max(x, y, key=lambda t: t[0])
        return (x[0], x[1] and y[1])

    def pick_hi(x, y):
        if x[0] is None:
            return y
        if y[0] is None:
            return x
        if x[0] != y[0]:
            return min(x, y, key=lambda t: t[0])
        return (x[0], x[1] and y[1])

    lo = pick_lo((a.lo, a.lo_closed), (b.lo, b.lo_closed))
    hi = pick_hi((a.hi, a.hi_closed), (b.hi, b.hi_closed))
    return Interval(lo[0], hi[0], lo[1], hi[1])


def rational_samples(domain: Interval, count: int, window=PROBE_WINDOW) -> list:
    """``count`` evenly spaced interior rationals of the domain (a window if unbounded)."""
    lo = domain.lo if domain.lo is not None else (domain.hi - 2 * window if domain.hi is not None else -window)
    hi = domain.hi if domain.hi is not None else lo + 2 * window
    lo, hi = Fraction(lo), Fraction(hi)
    return [lo + (hi - lo) * Fraction(i, count + 1) for i in range(1, count + 1)]


@dataclass
class IdentityTally:
    """Outcome of comparing two function specs at sample points."""

    exact: int = 0
    enclosed: int = 0
    failures: list = field(default_factory=list)

    def to_dict(self):
        return {"exact": self.exact, "enclosed": self.enclosed, "failures": self.failures[:10]}


@dataclass
class AlgebraReport:
    f: str
    g: str
    samples: int
    abs_form: IdentityTally
    linear_form: IdentityTally
    reverse_triangle_checked: int = 0
    reverse_triangle_failures: list = field(default_factory=list)

    @property
    def max_identity_exact(self) -> int:
        return self.abs_form.exact

    @property
    def holds(self) -> bool:
        return not self.abs_form.failures and not self.reverse_triangle_failures

    def to_dict(self) -> dict:
        return {"f": self.f, "g": self.g, "samples": self.samples,
                "abs_form": self.abs_form.to_dict(), "linear_form": self.linear_form.to_dict(),
                "reverse_triangle_checked": self.reverse_triangle_checked,
                "reverse_triangle_failures": self.reverse_triangle_failures[:10], "holds": self.holds}


def max_identity_sides(f: FunctionSpec, g: FunctionSpec, domain: Interval):
    """max(f, g), (|f - g| + |f + g|) / 2 and (f + g + |f - g|) / 2 as function specs.

    The second form equals max(|f|, |g|), so it matches max(f, g) only where
    that maximum is attained by a nonnegative value (for instance f, g >= 0);
    the third form is the identity valid everywhere.
    """
    two = Const(Fraction(2))
    lhs = FunctionSpec(Call("max", (f.ast, g.ast)), domain)
    diff = Call("abs", (BinOp("-", f.ast, g.ast),))
    total = Call("abs", (BinOp("+", f.ast, g.ast),))
    abs_form = FunctionSpec(BinOp("/", BinOp("+", diff, total), two), domain)
    linear = FunctionSpec(BinOp("/", BinOp("+", BinOp("+", f.ast, g.ast), diff), two), domain)
    return lhs, abs_form, linear


def _compare_at(lhs, rhs, xs) -> IdentityTally:
    tally = IdentityTally()
    for x in xs:
        u, v = eval_function(lhs, x), eval_function(rhs, x)
        if numeric.is_exact(u) and numeric.is_exact(v):
            if u == v:
                tally.exact += 1
            else:
                tally.failures.append({"x": x, "lhs": u, "rhs": v})
        elif (numeric.as_approx(u) - numeric.as_approx(v)).contains(0):
            tally.enclosed += 1
        else:
            tally.failures.append({"x": x, "lhs": numeric.format_value(u), "rhs": numeric.format_value(v)})
    return tally


def algebra_identity_checks(f, g, sample_count: int = 100, stream=None, p: int = 2,
                            k_max: int = 1000) -> AlgebraReport:
    """max{f, g} against (|f - g| + |f + g|)/2 and (f + g + |f - g|)/2 on rational samples,
    plus ||f(a_{k+p})| - |f(a_k)|| <= |f(a_{k+p}) - f(a_k)| for k <= k_max along ``stream``."""
    f, g = _fn(f), _fn(g)
    domain = _intersect(f.domain, g.domain)
    lhs, abs_form, linear = max_identity_sides(f, g, domain)
    xs = rational_samples(domain, sample_count)
    report = AlgebraReport(str(f), str(g), sample_count, _compare_at(lhs, abs_form, xs),
                           _compare_at(lhs, linear, xs))
    if stream is not None:
        image = map_stream(f, stream).prefix(k_max + p)
        bad = []
        for k in range(k_max):
            a, b = image[k + p], image[k]
            left, right = abs(abs(a) - abs(b)), abs(a - b)
            if numeric.is_exact(left) and numeric.is_exact(right):
                ok = left <= right
            else:
                ok = numeric.compare(numeric.as_approx(left) - numeric.as_approx(right), 0) != 1
            if not ok:
                bad.append(k + 1)
        report.reverse_triangle_checked = k_max
        report.reverse_triangle_failures = bad
    return report


# the implication lattice ---------------------------------------------------------------

CELLS = ("Ds_p", "Ds_p_c", "Ds", "c", "d", "e")
CELL_TITLES = {
    "Ds_p": "StatPQC(p) -> StatPQC(p)",
    "Ds_p_c": "StatPQC(p) -> convergent",
    "Ds": "StatPQC(1) -> StatPQC(1)",
    "c": "convergent -> convergent",
    "d": "convergent -> StatPQC(p)",
    "e": "slowly oscillating -> StatPQC(p)",
}
# antecedent cell Satisfied and consequent Violated contradicts the stated arrows
ARROWS = (("Ds_p_c", "Ds_p"), ("Ds_p", "d"), ("Ds_p_c", "c"), ("c", "d"), ("Ds_p", "Ds"))
# stated without proof, so reported but not treated as a contradiction
OPEN_ARROWS = (("Ds_p", "e"),)


@dataclass
class LatticeReport:
    p: int
    rows: list
    corpus: list
    config: dict

    @property
    def contradictions(self) -> list:
        return [(r["function"], a, b) for r in self.rows for a, b in r["arrow_flags"]]

    def to_dict(self) -> dict:
        return {"p": self.p, "corpus": self.corpus, "config": self.config, "rows": self.rows,
                "contradictions": [list(c) for c in self.contradictions]}

    def table(self) -> str:
        head = ["function"] + list(CELLS)
        lines = [head]
        for r in self.rows:
            lines.append([r["function"]] + [r["cells"][c]["status"] for c in CELLS])
        widths = [max(len(str(line[i])) for line in lines) for i in range(len(head))]
        out = ["  ".join(str(v).ljust(w) for v, w in zip(line, widths)).rstrip() for line in lines]
        out.insert(1, "  ".join("-" * w for w in widths))
        legend = [f"{c}: {CELL_TITLES[c]}" for c in CELLS]
        return "\n".join(out + [""] + legend)


def _merge(statuses):
    if not statuses:
        return INCONCLUSIVE
    if VIOLATED in statuses:
        return VIOLATED
    if all(s == SATISFIED for s in statuses):
        return SATISFIED
    return INCONCLUSIVE


def lattice_report(functions, sequences, p: int = 2, cfg: ClassifierConfig = ClassifierConfig()) -> LatticeReport:
    """Fill the six preservation cells for each function over the sequence corpus."""
    streams = [_stream(s) for s in sequences]
    classes = {"statp": [], "stat1": [], "conv": [], "slow": []}
    for i, s in enumerate(streams):
        if classify_stat_p_quasi_cauchy(s, p, cfg).satisfied:
            classes["statp"].append(i)
        if classify_stat_p_quasi_cauchy(s, 1, cfg).satisfied:
            classes["stat1"].append(i)
        if classify_cauchy_prefix(s, cfg).satisfied:
            classes["conv"].append(i)
        if classify_slowly_oscillating(s, cfg).satisfied:
            classes["slow"].append(i)
    judges = {
        "statp": lambda im: classify_stat_p_quasi_cauchy(im, p, cfg),
        "stat1": lambda im: classify_stat_p_quasi_cauchy(im, 1, cfg),
        "conv": lambda im: classify_cauchy_prefix(im, cfg),
    }
    # cell -> (input class, image judge)
    jobs = {"Ds_p": ("statp", "statp"), "Ds_p_c": ("statp", "conv"), "Ds": ("stat1", "stat1"),
            "c": ("conv", "conv"), "d": ("conv", "statp"), "e": ("slow", "statp")}
    rows = []
    for f in (_fn(x) for x in functions):
        seen = {}

        def judge(i, kind):
            # None marks an input outside the domain of f
            if (i, kind) not in seen:
                try:
                    seen[i, kind] = judges[kind](map_stream(f, streams[i])).status
                except DomainViolation:
                    seen[i, kind] = None
            return seen[i, kind]

        cells = {}
        for cell, (cls, kind) in jobs.items():
            evidence = [{"sequence": str(streams[i].spec), "status": judge(i, kind)} for i in classes[cls]]
            evidence = [e for e in evidence if e["status"] is not None]
            cells[cell] = {"status": _merge([e["status"] for e in evidence]), "inputs": evidence}

        def flagged(arrows):
            return [(a, b) for a, b in arrows if cells[a]["status"] == SATISFIED and cells[b]["status"] == VIOLATED]

        rows.append({"function": str(f), "cells": cells, "arrow_flags": flagged(ARROWS),
                     "open_flags": flagged(OPEN_ARROWS)})
    return LatticeReport(p, rows, [str(s.spec) for s in streams], cfg.to_dict())
