"""Command-line front end.

Every command prints (or writes with ``--out``) one report.  JSON reports
carry ``schema: 1``, a timestamp and the fully resolved run configuration;
CSV and table output carry the rows only.

Exit codes: 0 success, 1 usage or input error, 2 a theorem suite found a
violation.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional

from . import __version__, numeric
from .classify import (
    ClassifierConfig, classify_bounded, classify_cauchy_prefix, classify_quasi_cauchy,
    classify_slowly_oscillating, classify_stat_p_quasi_cauchy, estimate_statistical_limit, full_profile,
)
from .continuity import (
    DEFAULT_DELTAS, InsufficientWitnesses, preservation_check, theorem6_adversary, uniform_continuity_probe,
    violation_witness_search,
)
from .density import CSV_COLUMNS, DEFAULT_EPSILONS, gap_curves
from .expr import GRAMMAR_HINT as FUNCTION_GRAMMAR
from .expr import parse_function
from .harness import SUITE_COLUMNS, SUITES, run_suite, suite_config
from .lexer import DSLSyntaxError
from .numeric import DomainViolation
from .reports import envelope, to_csv, to_json, to_table, write_atomic
from .seqdsl import GRAMMAR_HINT as SEQUENCE_GRAMMAR
from .seqdsl import parse_sequence
from .sequences import MalformedSpec, build_stream
from .theorems import PreconditionNotMet

COMMANDS = ("classify", "profile", "density", "preserve", "probe", "witness", "theorems")
CLASSES = ("stat-pqc", "quasi-cauchy", "cauchy", "stat-limit", "slowly-oscillating", "bounded")
CONFIG_KEYS = ("N", "tol", "tail", "eps", "stride", "p", "format", "seq", "fn")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _int_list(text):
    try:
        vals = [int(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not vals or any(v < 1 for v in vals):
        raise argparse.ArgumentTypeError("p values must be positive integers")
    return vals


def _rational(text):
    try:
        return numeric.parse_rational(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected a rational like 1/2 or 0.25, got {text!r}")


def _rational_list(text):
    return [_rational(t) for t in str(text).split(",") if t.strip()]


@dataclass
class RunConfig:
    command: str
    seq: Optional[str] = None
    fn: Optional[str] = None
    p: list = field(default_factory=lambda: [1])
    N: int = 100_000
    tolerance: Fraction = Fraction(1, 1000)
    tail_fraction: Fraction = Fraction(1, 5)
    eps: list = field(default_factory=lambda: list(DEFAULT_EPSILONS))
    stride: Optional[int] = None
    out: Optional[str] = None
    format: str = "json"
    extra: dict = field(default_factory=dict)
    explicit: tuple = ()

    def classifier(self) -> ClassifierConfig:
        grid = sorted(set(self.eps), reverse=True)
        return ClassifierConfig(N=self.N, eps_grid=tuple(grid), tolerance=self.tolerance,
                                tail_fraction=self.tail_fraction, sample_stride=self.stride)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("out")
        d.pop("explicit")
        d["tolerance"] = str(self.tolerance)
        d["tail_fraction"] = str(self.tail_fraction)
        d["eps"] = [str(e) for e in self.eps]
        d["extra"] = {k: str(v) if isinstance(v, Fraction) else v for k, v in self.extra.items()}
        return d


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--N", type=int, help="prefix length (default 100000)")
    common.add_argument("--tol", type=_rational, help="tolerance (default 1/1000)")
    common.add_argument("--tail", type=_rational, help="tail fraction (default 1/5)")
    common.add_argument("--eps", type=_rational_list, help="comma-separated epsilon grid")
    common.add_argument("--stride", type=int, help="curve sample stride")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv", "table"), help="report format (default json)")
    common.add_argument("--config", help="key=value file; explicit flags win")

    parser = _Parser(prog="statward", description="Statistical p-quasi-Cauchy sequence diagnostics.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    c = sub.add_parser("classify", parents=[common], help="one class verdict per p")
    c.add_argument("--seq", help="sequence DSL text")
    c.add_argument("--p", type=_int_list, help="p or comma-separated p list (default 1)")
    c.add_argument("--class", dest="cls", choices=CLASSES, default="stat-pqc")

    c = sub.add_parser("profile", parents=[common], help="all class verdicts")
    c.add_argument("--seq")
    c.add_argument("--p", type=_int_list)

    c = sub.add_parser("density", parents=[common], help="exceedance curves of |a_{k+p} - a_k|")
    c.add_argument("--seq")
    c.add_argument("--p", type=_int_list)

    c = sub.add_parser("preserve", parents=[common], help="StatPQC(p) verdict of f applied to a sequence")
    c.add_argument("--fn")
    c.add_argument("--seq")
    c.add_argument("--p", type=_int_list)

    c = sub.add_parser("probe", parents=[common], help="sampled modulus of continuity")
    c.add_argument("--fn")
    c.add_argument("--deltas", type=_rational_list, help="comma-separated delta grid")
    c.add_argument("--samples", type=int, default=4096)

    c = sub.add_parser("witness", parents=[common], help="pairs breaking uniform continuity")
    c.add_argument("--fn")
    c.add_argument("--eps0", type=_rational, default=Fraction(9, 10))
    c.add_argument("--max-n", type=int, default=100)
    c.add_argument("--adversary", action="store_true", help="also build the interleaved adversary")
    c.add_argument("--p", type=_int_list)

    c = sub.add_parser("theorems", parents=[common], help="run theorem suites")
    c.add_argument("--suite", choices=SUITES + ("all",), default="all")
    c.add_argument("--trials", type=int)
    c.add_argument("--seed", type=int, default=0)
    return parser


def _read_config(path) -> dict:
    out = {}
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}")
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}; known: {', '.join(CONFIG_KEYS)}")
        out[key] = value
    return out


def resolve(args) -> RunConfig:
    """Explicit flags, then the config file, then defaults."""
    file = _read_config(args.config) if getattr(args, "config", None) else {}
    convert = {"N": int, "tol": _rational, "tail": _rational, "eps": _rational_list, "stride": int,
               "p": _int_list, "format": str, "seq": str, "fn": str}

    def pick(flag, key=None):
        key = key or flag
        value = getattr(args, flag, None)
        if value is not None:
            given.append(key)
            return value
        if key in file:
            given.append(key)
            try:
                return convert[key](file[key])
            except (argparse.ArgumentTypeError, ValueError) as exc:
                raise UsageError(f"config {key}: {exc}")
        return None

    given = []
    rc = RunConfig(args.command)
    rc.seq, rc.fn = pick("seq"), pick("fn")
    rc.p = pick("p") or [1]
    N = pick("N")
    rc.N = 100_000 if N is None else N
    rc.tolerance = pick("tol", "tol") or rc.tolerance
    rc.tail_fraction = pick("tail") or rc.tail_fraction
    rc.eps = pick("eps") or rc.eps
    rc.stride = pick("stride")
    rc.format = pick("format") or "json"
    rc.out = args.out
    rc.explicit = tuple(given)
    if rc.N < 1:
        raise UsageError("--N must be positive")
    return rc


def _need(value, flag, hint):
    if not value:
        raise UsageError(f"{flag} is required\n{hint}")
    return value


def _sequence(rc):
    try:
        return parse_sequence(_need(rc.seq, "--seq", SEQUENCE_GRAMMAR))
    except (DSLSyntaxError, MalformedSpec) as exc:
        raise UsageError(f"--seq: {exc}\n{SEQUENCE_GRAMMAR}")


def _function(rc):
    try:
        return parse_function(_need(rc.fn, "--fn", FUNCTION_GRAMMAR))
    except DSLSyntaxError as exc:
        raise UsageError(f"--fn: {exc}\n{FUNCTION_GRAMMAR}")


# commands --------------------------------------------------------------------------

def _verdict_rows(verdicts):
    for v in verdicts:
        w = v.witness or {}
        yield [v.label, v.status, w.get("epsilon", ""), v.reason]


VERDICT_COLUMNS = ("class", "status", "epsilon", "reason")


def cmd_classify(args, rc):
    spec = _sequence(rc)
    stream, cfg = build_stream(spec), rc.classifier()
    rc.extra["class"] = args.cls
    if args.cls == "stat-pqc":
        verdicts = [classify_stat_p_quasi_cauchy(stream, p, cfg) for p in rc.p]
    elif args.cls == "quasi-cauchy":
        verdicts = [classify_quasi_cauchy(stream, cfg, p=p) for p in rc.p]
    elif args.cls == "cauchy":
        verdicts = [classify_cauchy_prefix(stream, cfg)]
    elif args.cls == "stat-limit":
        est, v = estimate_statistical_limit(stream, cfg)
        if est is not None and est.candidate is not None:
            v.details = list(v.details) + [{"candidate": est.candidate}]
        verdicts = [v]
    elif args.cls == "slowly-oscillating":
        verdicts = [classify_slowly_oscillating(stream, cfg)]
    else:
        verdicts = [classify_bounded(stream, cfg)]
    body = {"sequence": str(spec), "verdicts": [v.to_dict() for v in verdicts]}
    return body, VERDICT_COLUMNS, list(_verdict_rows(verdicts)), 0


def cmd_profile(args, rc):
    spec = _sequence(rc)
    if args.p is None and rc.p == [1]:
        rc.p = [1, 2, 3]
    rep = full_profile(build_stream(spec), rc.p, rc.classifier())
    return rep.to_dict(), VERDICT_COLUMNS, list(_verdict_rows(rep.verdicts.values())), 0


DENSITY_COLUMNS = ("p", "epsilon") + CSV_COLUMNS + ("density",)


def cmd_density(args, rc):
    spec = _sequence(rc)
    stream, cfg = build_stream(spec), rc.classifier()
    rows, curves = [], []
    for p in rc.p:
        for curve in gap_curves(stream, p, rc.eps, rc.N, cfg.stride, source=str(spec)):
            pts = [[n, c, a, d] for n, c, a, d in curve.points()]
            curves.append({"p": p, "epsilon": curve.epsilon, "n": [r[0] for r in pts],
                           "count": [r[1] for r in pts], "ambiguous": [r[2] for r in pts],
                           "density": [r[3] for r in pts]})
            rows.extend([p, curve.epsilon, n, c, a, d.numerator, d.denominator, d] for n, c, a, d in pts)
    return {"sequence": str(spec), "curves": curves}, DENSITY_COLUMNS, rows, 0


def cmd_preserve(args, rc):
    f = _function(rc)
    spec = _sequence(rc)
    stream, cfg = build_stream(spec), rc.classifier()
    verdicts = [preservation_check(f, stream, p, cfg) for p in rc.p]
    body = {"function": str(f), "sequence": str(spec), "verdicts": [v.to_dict() for v in verdicts]}
    return body, VERDICT_COLUMNS, list(_verdict_rows(verdicts)), 0


PROBE_COLUMNS = ("delta", "modulus", "x", "y")


def cmd_probe(args, rc):
    f = _function(rc)
    deltas = args.deltas or list(DEFAULT_DELTAS)
    rc.extra.update(deltas=[str(d) for d in deltas], samples=args.samples)
    curve, verdict = uniform_continuity_probe(f, deltas, args.samples, rc.classifier())
    body = {"function": str(f), "verdict": verdict.to_dict(),
            "modulus": [{"delta": d, "modulus": m, "pair": list(pair)}
                        for d, m, pair in zip(curve.deltas, curve.modulus, curve.pairs)]}
    return body, PROBE_COLUMNS, list(curve.rows()), 0


WITNESS_COLUMNS = ("n", "alpha", "beta", "gap")


def cmd_witness(args, rc):
    f = _function(rc)
    rc.extra.update(eps0=str(args.eps0), max_n=args.max_n, adversary=args.adversary)
    pairs = violation_witness_search(f, args.eps0, args.max_n)
    body = {"function": str(f), "eps0": args.eps0, "pairs": [w.to_dict() for w in pairs]}
    code = 0
    if args.adversary:
        try:
            rep = theorem6_adversary(f, rc.p[0], args.eps0, rc.classifier())
            body["adversary"] = rep.to_dict()
        except InsufficientWitnesses as exc:
            body["adversary"] = {"status": "insufficient witnesses", "reason": str(exc)}
    rows = [[w.n, w.alpha, w.beta, w.gap] for w in pairs]
    return body, WITNESS_COLUMNS, rows, code


def cmd_theorems(args, rc):
    cfg = rc.classifier()
    names = SUITES if args.suite == "all" else (args.suite,)
    rc.extra.update(suite=args.suite, trials=args.trials, seed=args.seed)
    results = [run_suite(name, suite_config(name, cfg, rc.explicit), args.trials, args.seed) for name in names]
    body = {"suites": [r.to_dict() for r in results],
            "violations": sum(r.violations for r in results)}
    rows = [row for r in results for row in r.rows()]
    return body, SUITE_COLUMNS, rows, 2 if body["violations"] else 0


HANDLERS = {"classify": cmd_classify, "profile": cmd_profile, "density": cmd_density,
            "preserve": cmd_preserve, "probe": cmd_probe, "witness": cmd_witness, "theorems": cmd_theorems}


def render(rc: RunConfig, body, columns, rows) -> str:
    if rc.format == "csv":
        return to_csv(columns, rows)
    if rc.format == "table":
        return to_table(columns, rows)
    return to_json(envelope(rc.command, rc.to_dict(), body))


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            raise UsageError(f"choose a command: {', '.join(COMMANDS)}")
        rc = resolve(args)
        body, columns, rows, code = HANDLERS[args.command](args, rc)
    except UsageError as exc:
        print(f"statward: error: {exc}", file=sys.stderr)
        print(parser.format_usage().rstrip(), file=sys.stderr)
        return 1
    except (PreconditionNotMet, DomainViolation, ValueError) as exc:
        print(f"statward: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    text = render(rc, body, columns, rows)
    if rc.out:
        write_atomic(rc.out, text)
    else:
        sys.stdout.write(text)
    return code


def main() -> None:
    sys.exit(run())
