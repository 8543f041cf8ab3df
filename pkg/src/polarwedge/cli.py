"""Command-line front end: parse germs, run the pipelines, write reports."""
from __future__ import annotations

import argparse
import csv
import json
import sys
import warnings
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Sequence

from .algebra import AlgebraError, AlgebraicNumber, MPoly, NumberField, Q, TruncSeries, format_mpoly

SCHEMA = "polarwedge-report/1"
VERSION = "0.1.0"
EXIT_OK, EXIT_FAIL, EXIT_UNDECIDED, EXIT_INPUT = 0, 1, 2, 3
SUBCOMMANDS = ("analyze", "assumptions", "metric", "vf", "mostowski", "full")


# ---------------------------------------------------------------------------
# Germ parser


class ParseError(ValueError):
    def __init__(self, msg: str, column: int | None = None, unknown: Sequence[str] = ()):
        self.column = column
        self.unknown = tuple(unknown)
        where = f" at column {column}" if column is not None else ""
        super().__init__(f"{msg}{where}")


_GAUSS = None


def gaussian_unit() -> AlgebraicNumber:
    """The element i of Q(i), pinned to the root with positive imaginary part."""
    global _GAUSS
    if _GAUSS is None:
        for idx in (0, 1):
            fld = NumberField.from_minpoly([1, 0, 1], idx)
            if fld.generator_value(20).imag > 0:
                _GAUSS = AlgebraicNumber.generator(fld)
                break
    return _GAUSS


def _is_param(name: str) -> bool:
    return name == "t" or (name.startswith("t") and name[1:].isdigit() and name[1] != "0")


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.toks: list[tuple[str, str, int]] = []
        i = 0
        while i < len(text):
            ch = text[i]
            if ch.isspace():
                i += 1
            elif ch.isdigit():
                j = i
                while j < len(text) and text[j].isdigit():
                    j += 1
                self.toks.append(("num", text[i:j], i + 1))
                i = j
            elif ch.isalpha() or ch == "_":
                j = i
                while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                    j += 1
                self.toks.append(("id", text[i:j], i + 1))
                i = j
            elif ch == "*" and text[i:i + 2] == "**":
                self.toks.append(("op", "^", i + 1))
                i += 2
            elif ch in "+-*/^()":
                self.toks.append(("op", ch, i + 1))
                i += 1
            else:
                raise ParseError(f"unexpected character {ch!r}", i + 1)
        self.toks.append(("end", "", len(text) + 1))
        self.pos = 0

    @property
    def peek(self):
        return self.toks[self.pos]

    def take(self):
        tok = self.toks[self.pos]
        self.pos += 1
        return tok


class _Parser:
    """expr := term (('+'|'-') term)*;  term := unary (('*'|'/') unary)*;
    unary := ('+'|'-') unary | power;  power := atom ('^' INT)?;
    atom := INT | IDENT | '(' expr ')'."""

    def __init__(self, text: str, variables: tuple):
        self.lex = _Lexer(text)
        self.vars = variables
        self.unknown: list[str] = []

    def parse(self) -> MPoly:
        if self.lex.peek[0] == "end":
            raise ParseError("empty expression", 1)
        out = self.expr()
        kind, val, col = self.lex.peek
        if kind != "end":
            raise ParseError(f"unexpected {val!r}", col)
        if self.unknown:
            raise ParseError("unknown identifiers: " + ", ".join(sorted(set(self.unknown))), None, self.unknown)
        return out

    def expr(self) -> MPoly:
        acc = self.term()
        while self.lex.peek[:2] in (("op", "+"), ("op", "-")):
            op = self.lex.take()[1]
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self) -> MPoly:
        acc = self.unary()
        while self.lex.peek[:2] in (("op", "*"), ("op", "/")):
            _, op, col = self.lex.take()
            rhs = self.unary()
            if op == "*":
                acc = acc * rhs
            else:
                if rhs.used_vars() or rhs.is_zero():
                    raise ParseError("division only by a nonzero constant", col)
                acc = acc * MPoly.const(1 / rhs.constant_term(), self.vars)
        return acc

    def unary(self) -> MPoly:
        if self.lex.peek[:2] == ("op", "-"):
            self.lex.take()
            return -self.unary()
        if self.lex.peek[:2] == ("op", "+"):
            self.lex.take()
            return self.unary()
        return self.power()

    def power(self) -> MPoly:
        base = self.atom()
        if self.lex.peek[:2] == ("op", "^"):
            self.lex.take()
            kind, val, col = self.lex.take()
            if kind != "num":
                raise ParseError("exponent must be a non-negative integer", col)
            return base ** int(val)
        return base

    def atom(self) -> MPoly:
        kind, val, col = self.lex.take()
        if kind == "num":
            return MPoly.const(Q(int(val)), self.vars)
        if kind == "id":
            if val == "i":
                return MPoly.const(gaussian_unit(), self.vars)
            if val in ("x", "y", "z") or _is_param(val):
                return MPoly.var(val, self.vars)
            self.unknown.append(val)
            return MPoly.zero(self.vars)
        if (kind, val) == ("op", "("):
            inner = self.expr()
            k2, v2, c2 = self.lex.take()
            if (k2, v2) != ("op", ")"):
                raise ParseError("expected ')'", c2)
            return inner
        raise ParseError("unexpected end of input" if kind == "end" else f"unexpected {val!r}", col)


def parse_germ(text: str) -> MPoly:
    """Exact polynomial in x, y, z and parameters t, t1, t2, ... from infix text."""
    names = set()
    for tok in _Lexer(text).toks:
        if tok[0] == "id" and (_is_param(tok[1])):
            names.add(tok[1])
    params = tuple(sorted(names, key=lambda s: (len(s), s)))
    p = _Parser(text, ("x", "y", "z") + params).parse()
    return p


def print_germ(p: MPoly) -> str:
    return format_mpoly(p)


# ---------------------------------------------------------------------------
# Configuration and manifests


@dataclass
class JobConfig:
    germ: str = ""
    trunc: int = 24
    prec: int = 200  # bits
    eps: Fraction | None = None
    chain_c: float = 2.0
    samples: int = 1000
    seed: int = 0
    scales: tuple = (4, 20)
    filtration: str = "auto"  # auto | with-polar | without-polar | both | plain
    arcs: list = field(default_factory=list)  # (n, y text, z text or "")
    params: int = 0

    @property
    def dps(self) -> int:
        return max(30, int(self.prec * 0.30103))

    def validate(self) -> "JobConfig":
        if self.trunc <= 0 or self.prec <= 0 or self.samples <= 0:
            raise ParseError("truncation, precision and sample counts must be positive")
        if self.chain_c <= 1:
            raise ParseError("chain constant must exceed 1")
        if self.eps is not None and self.eps <= 0:
            raise ParseError("eps must be positive")
        lo, hi = self.scales
        if not (0 < lo < hi):
            raise ParseError("scales must be 0 < lo < hi")
        return self

    def echo(self) -> dict:
        d = asdict(self)
        d["eps"] = None if self.eps is None else str(self.eps)
        d["scales"] = list(self.scales)
        d["arcs"] = [list(a) for a in self.arcs]
        return d


def parse_scales(text: str) -> tuple:
    try:
        lo, hi = (int(v) for v in text.replace("..", ":").split(":"))
    except ValueError as exc:
        raise ParseError(f"bad scale range {text!r}; expected lo:hi") from exc
    return lo, hi


def read_manifest(path: str, cfg: JobConfig | None = None) -> JobConfig:
    """Line-oriented key = value file; '#' starts a comment; 'arc' may repeat."""
    cfg = cfg or JobConfig()
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParseError(f"manifest line {lineno}: expected key = value")
            key, val = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            try:
                if key == "germ":
                    cfg.germ = val
                elif key in ("trunc", "prec", "samples", "seed"):
                    setattr(cfg, key, int(val))
                elif key == "eps":
                    cfg.eps = Fraction(val)
                elif key == "chain_c":
                    cfg.chain_c = float(val)
                elif key == "scales":
                    cfg.scales = parse_scales(val)
                elif key == "filtration":
                    cfg.filtration = val
                elif key == "arc":
                    parts = [p.strip() for p in val.split("|")]
                    cfg.arcs.append((int(parts[0]), parts[1], parts[2] if len(parts) > 2 else ""))
                else:
                    raise ParseError(f"manifest line {lineno}: unknown key {key!r}")
            except (ValueError, IndexError) as exc:
                if isinstance(exc, ParseError):
                    raise
                raise ParseError(f"manifest line {lineno}: {exc}") from exc
    return cfg


# ---------------------------------------------------------------------------
# Reports


def _num(value, provenance: str = "exact", ci=None) -> dict:
    out = {"value": value, "provenance": provenance}
    if ci is not None:
        out["ci"] = [float(ci[0]), float(ci[1])]
    return out


def _fit(fit) -> dict:
    return _num(round(fit.exponent, 6), "fitted", (round(fit.ci[0], 6), round(fit.ci[1], 6)))


@dataclass
class Stage:
    name: str
    status: str = "pass"  # pass | fail | undecided | skipped | error
    verdicts: list = field(default_factory=list)
    tables: dict = field(default_factory=dict)
    reason: str = ""
    headline: str = ""

    def add(self, name: str, status: str, provenance: str = "exact", detail: str = "", **values):
        self.verdicts.append({"name": name, "status": status, "provenance": provenance,
                              "detail": detail, **values})

    def settle(self) -> "Stage":
        if self.status in ("skipped", "error"):
            return self
        sts = {v["status"] for v in self.verdicts}
        self.status = "fail" if "fail" in sts else ("undecided" if "undecided" in sts else "pass")
        return self


@dataclass
class Report:
    config: dict
    germ: str
    stages: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    table: list = field(default_factory=list)  # (stage, series, condition, scale, constant)

    def to_dict(self) -> dict:
        return {"schema": SCHEMA, "tool_version": VERSION, "config": self.config, "germ": self.germ,
                "stages": [asdict(s) for s in self.stages], "warnings": sorted(set(self.warnings))}

    def exit_code(self) -> int:
        sts = {s.status for s in self.stages}
        if "fail" in sts or "error" in sts:
            return EXIT_FAIL
        if "undecided" in sts:
            return EXIT_UNDECIDED
        return EXIT_OK

    def summary(self) -> str:
        lines = [f"germ: {self.germ}"]
        for s in self.stages:
            lines.append(f"[{s.status.upper()}] {s.name}" + (f" ({s.reason})" if s.reason else ""))
            if s.headline:
                lines.append(f"    {s.headline}")
            for v in s.verdicts:
                tag = " [HEURISTIC]" if v["provenance"] == "heuristic" else ""
                lines.append(f"    {v['status']:9s} {v['name']}{tag} {v['detail']}".rstrip())
        for w in sorted(set(self.warnings)):
            lines.append(f"warning: {w}")
        return "\n".join(lines)


PROVENANCES = ("exact", "fitted", "heuristic")
STAGE_STATUS = ("pass", "fail", "undecided", "skipped", "error")


def validate_report(doc: dict) -> list[str]:
    """Structural check of a report document; returns the list of problems (empty when valid).

    Every number outside the config echo must sit in a {"value", "provenance"} record.
    """
    problems = []
    for key in ("schema", "tool_version", "config", "germ", "stages", "warnings"):
        if key not in doc:
            problems.append(f"missing key {key!r}")
    if doc.get("schema") != SCHEMA:
        problems.append(f"schema is {doc.get('schema')!r}, expected {SCHEMA!r}")

    def walk(node, path, inside_value=False):
        if isinstance(node, bool) or node is None or isinstance(node, str):
            return
        if isinstance(node, (int, float)):
            if not inside_value:
                problems.append(f"{path}: bare number without provenance")
            return
        if isinstance(node, dict):
            if "value" in node:
                if node.get("provenance") not in PROVENANCES:
                    problems.append(f"{path}: bad provenance {node.get('provenance')!r}")
                walk(node["value"], f"{path}.value", True)
                if "ci" in node:
                    ci = node["ci"]
                    if not (isinstance(ci, list) and len(ci) == 2):
                        problems.append(f"{path}.ci: expected a pair")
                return
            for k, v in node.items():
                walk(v, f"{path}.{k}", inside_value)
            return
        if isinstance(node, (list, tuple)):
            for i, v in enumerate(node):
                walk(v, f"{path}[{i}]", inside_value)
            return
        problems.append(f"{path}: unexpected type {type(node).__name__}")

    for i, st in enumerate(doc.get("stages", [])):
        where = f"stages[{i}]"
        if st.get("status") not in STAGE_STATUS:
            problems.append(f"{where}: bad status {st.get('status')!r}")
        for j, v in enumerate(st.get("verdicts", [])):
            if v.get("provenance") not in PROVENANCES:
                problems.append(f"{where}.verdicts[{j}]: bad provenance {v.get('provenance')!r}")
        walk(st.get("tables", {}), f"{where}.tables")
        walk([{k: x for k, x in v.items() if k not in ("name", "status", "provenance", "detail")}
              for v in st.get("verdicts", [])], f"{where}.verdicts")
    return problems


# ---------------------------------------------------------------------------
# Stages


class _Context:
    def __init__(self, cfg: JobConfig, f: MPoly):
        self.cfg, self.f = cfg, f
        self.system = None
        self.system_error: str | None = None

    def wedge_system(self):
        if self.system is None and self.system_error is None:
            from .polar import polar_wedge_system

            try:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore")
                    self.system = polar_wedge_system(self.f, self.cfg.trunc)
            except AlgebraError as exc:
                self.system_error = str(exc)
        return self.system


def stage_analyze(ctx: _Context, rep: Report) -> Stage:
    from .polar import contact_table, key_identity_residual

    st = Stage("analyze")
    S = ctx.wedge_system()
    if S is None:
        st.status, st.reason = "error", ctx.system_error
        return st
    N = ctx.cfg.trunc
    st.tables["n"] = _num(S.n)
    st.tables["singular_locus"] = _num(S.singular_locus_text())
    st.tables["polar_wedges"] = _num(len(S.polar))
    st.tables["branches"] = [{"label": b.label, "kind": b.kind, "n": _num(b.own_ram),
                              "m": _num(b.m if b.m is not None else "inf"), "field": b.coeff_field,
                              "y": str(b.y.to_mpoly()), "z": str(b.z.to_mpoly())} for b in S.branches]
    labels = [b.label for b in S.branches]
    st.tables["contacts"] = {"labels": labels,
                             "k": [[None if v is None else _num(v) for v in row] for row in contact_table(S)]}
    st.tables["epsilon"] = _num(str(S.epsilon))
    ms = ", ".join(f"{b.label}: m={b.m_label}" for b in S.polar) or "none"
    st.headline = (f"n = {S.n}; polar wedges: {len(S.polar)} ({ms}); "
                   f"singular locus: {S.singular_locus_text()}")
    rep.warnings.extend(S.notes)
    for br in S.polar:
        ki = key_identity_residual(br, S.F, S.FZ, N)
        status = "pass" if ki.passed(N) else ("undecided" if not ki.exact else "fail")
        st.add(f"key identity on {br.label}", status, "exact",
               f"order {ki.order} (window {ki.window}), route {ki.route}",
               order=_num(ki.order), numeric_error=_num(ki.numeric_max_error, "heuristic"))
    checks = S.contacts.get("checks", {})
    for label, ok in checks.get("Y_structure", {}).items():
        st.add(f"Y structure on {label}", "pass" if ok else "fail")
    for key in ("distinct_m_bound", "singular_distance", "transversal"):
        for a, b, ok in checks.get(key, []):
            st.add(f"{key} {a}-{b}", "pass" if ok else "fail")
    for br in S.polar:
        cert = br.certificates
        bad = [k for k, v in cert.items() if v is False]
        st.add(f"wedge exponent {br.label}", "fail" if bad else "pass", "exact",
               f"m = {br.m_label}" + (f"; failed: {', '.join(bad)}" if bad else ""), m=_num(br.m))
    return st.settle()


def stage_assumptions(ctx: _Context, rep: Report) -> Stage:
    from .assumptions import check_no_vertical_limit_tangents, exact_checks

    st = Stage("assumptions")
    try:
        verdicts = exact_checks(ctx.f, ctx.cfg.trunc)
        verdicts.append(check_no_vertical_limit_tangents(ctx.f, samples=min(ctx.cfg.samples, 1000),
                                                         seed=ctx.cfg.seed))
    except AlgebraError as exc:
        st.status, st.reason = "error", str(exc)
        return st
    for v in verdicts:
        st.add(v.name, v.status, v.provenance, v.detail)
        if v.provenance == "heuristic":
            rep.warnings.append(f"{v.name} is a sampled (heuristic) check")
    return st.settle()


def stage_metric(ctx: _Context, rep: Report) -> Stage:
    from .metric import ArcGerm, verify_arc_orders, verify_distance_formulas

    st = Stage("metric")
    S = ctx.wedge_system()
    if S is None:
        st.status, st.reason = "skipped", f"no wedge system: {ctx.system_error}"
        return st
    if S.polar:
        dr = verify_distance_formulas(S, pairs=ctx.cfg.samples, seed=ctx.cfg.seed, dps=ctx.cfg.dps,
                                      eps=ctx.cfg.eps)
        for fs in dr.stats:
            st.add(f"distance formula {fs.formula} on {fs.pair}", "pass" if fs.passed else "fail", "fitted",
                   f"ratios in [{fs.ratio_min:.3g}, {fs.ratio_max:.3g}] over {fs.count} pairs",
                   min_ratio=_num(fs.ratio_min, "fitted"), max_ratio=_num(fs.ratio_max, "fitted"))
    for n, ytext, ztext in ctx.cfg.arcs:
        y = _arc_series(ytext)
        z = _arc_series(ztext) if ztext else None
        arc = ArcGerm(n, y, z, f=ctx.f)
        ar = verify_arc_orders(arc, S, ctx.cfg.scales, dps=ctx.cfg.dps)
        status = {"pass": "pass", "fail": "fail"}.get(ar.status, "undecided")
        for label, (l, lt) in ar.exponents.items():
            f3, fp = ar.fits[label]
            st.add(f"arc ({n}; {ytext}) against {label}", status, "fitted", f"l = {l:.3f}, projected {lt:.3f}",
                   order=_num(round(l, 6), "fitted", (f3.ci[0] / n, f3.ci[1] / n)))
    if not st.verdicts:
        st.add("distance formulas", "pass", "exact", "no polar wedges: nothing to sample")
    return st.settle()


def _arc_series(text: str) -> TruncSeries:
    p = _Parser(text.replace("s", "x"), ("x", "y", "z")).parse()
    terms = {(e[0], ()): c for e, c in p.terms.items()}
    return TruncSeries(terms, 1, 1 << 30)


def stage_vf(ctx: _Context, rep: Report) -> Stage:
    from .strat import vf_report

    st = Stage("vf")
    S = ctx.wedge_system()
    if S is None:
        st.status, st.reason = "skipped", f"no wedge system: {ctx.system_error}"
        return st
    sr = vf_report(S, seed=ctx.cfg.seed)
    for v in sr.verdicts:
        st.add(v.name, "pass" if v.passed else "fail", v.provenance, v.detail)
    st.tables["extension"] = {"L": _num(sr.L), "K": _num(sr.K), "C": _num(round(sr.C, 6), "fitted")}
    wit = sr.witness
    st.tables["witness"] = {"verdict": wit.verdict, "reason": wit.reason, "branch": wit.branch,
                           "predicted_exponent": None if wit.predicted_exponent is None else str(wit.predicted_exponent)}
    if wit.fit is not None:
        st.tables["witness"]["witness_exponent"] = _fit(wit.fit)
        for row in wit.rows:
            rep.table.append(("vf", "witness", "L1/L", row.x0, row.ratio))
        ok = abs(wit.fit.exponent - float(wit.predicted_exponent)) <= 0.3
        st.add("witness growth matches m/n - 1", "pass" if ok else "fail", "fitted",
               f"{wit.fit.describe()} vs {wit.predicted_exponent}")
    if wit.verdict == "NOT-LIPSCHITZ":
        rep.warnings.append("isolated singularity with m > n: {X minus 0, 0} is not a Lipschitz stratification")
    return st.settle()


def _filtrations(ctx: _Context):
    from .strat import Filtration, Hypersurface, LinearStratum, filtration_from_system

    S = ctx.wedge_system()
    choice = ctx.cfg.filtration
    names = ("x", "y", "z") + tuple(v for v in ctx.f.used_vars() if v not in ("x", "y", "z"))
    if S is None or choice == "plain":
        return [(Filtration(Hypersurface(ctx.f, names), [LinearStratum(len(names), len(names) - 3)], "plain"), S)]
    if choice == "auto":
        choice = "both" if S.polar and S.singular else "without-polar"
    out = []
    if choice in ("without-polar", "both"):
        out.append((filtration_from_system(S, with_polar=False, names=names), S))
    if choice in ("with-polar", "both"):
        out.append((filtration_from_system(S, with_polar=True, names=names), S))
    return out


def stage_mostowski(ctx: _Context, rep: Report) -> Stage:
    from .strat import mostowski_check

    st = Stage("mostowski")
    try:
        filts = _filtrations(ctx)
    except AlgebraError as exc:
        st.status, st.reason = "error", str(exc)
        return st
    auto = ctx.cfg.filtration == "auto" and len(filts) > 1
    for filt, S in filts:
        mr = mostowski_check(filt, S, ctx.cfg.chain_c, ctx.cfg.scales, ctx.cfg.seed, ctx.cfg.dps)
        stable = mr.rerun is None or mr.rerun.verdict == mr.verdict
        fits = {k: _fit(v) for k, v in mr.fits.items()}
        st.tables[filt.label] = {"verdict": mr.verdict, "c": _num(mr.c), "fits": fits,
                                 "chains": _num(mr.chains), "rejected": _num(mr.rejected),
                                 "skipped": _num(mr.skipped),
                                 "rerun": None if mr.rerun is None else {
                                     "c": _num(mr.rerun.c), "verdict": mr.rerun.verdict,
                                     "fits": {k: _fit(v) for k, v in mr.rerun.fits.items()}}}
        worst = max(mr.fits, key=lambda k: mr.fits[k].exponent)
        detail = (f"{mr.verdict}; worst {worst}: {mr.fits[worst].describe()}; "
                  f"stable under c={mr.rerun.c if mr.rerun else mr.c}: {stable}")
        if auto and filt.label == "without polar":
            # informative run: records whether the polar curve must be added as a stratum
            needed = mr.verdict != "LIPSCHITZ-CONSISTENT"
            st.add("polar curve required", "pass", "fitted", f"{'yes' if needed else 'no'}; without polar: {detail}")
        else:
            st.add(f"Mostowski conditions ({filt.label})",
                   "pass" if mr.verdict == "LIPSCHITZ-CONSISTENT" else "fail", "fitted", detail)
        if not stable:
            rep.warnings.append(f"Mostowski verdict for {filt.label} changes with the chain constant")
        rep.table.extend(("mostowski",) + row[:1] + row[2:] for row in mr.table())
    return st.settle()


def stage_full(ctx: _Context, rep: Report) -> list[Stage]:
    stages = [stage_analyze(ctx, rep), stage_assumptions(ctx, rep)]
    if stages[0].status == "error":
        rest = [Stage(n, "skipped", reason="analyze failed") for n in ("metric", "vf", "mostowski")]
        return stages + rest
    stages += [stage_metric(ctx, rep), stage_vf(ctx, rep), stage_mostowski(ctx, rep)]
    vf_stage, mo = stages[3], stages[4]
    pred = vf_stage.tables.get("witness", {}).get("predicted_exponent")
    for label, tab in mo.tables.items():
        if pred is not None and tab["verdict"] == "NOT-LIPSCHITZ":
            worst = max(v["value"] for v in tab["fits"].values())
            rep.warnings.append(f"cross-check: Mostowski growth {worst:.3f} ({label}) vs witness rate {pred}")
    return stages


STAGES = {"analyze": stage_analyze, "assumptions": stage_assumptions, "metric": stage_metric,
          "vf": stage_vf, "mostowski": stage_mostowski}


def run(subcommand: str, cfg: JobConfig) -> Report:
    if subcommand not in SUBCOMMANDS:
        raise ParseError(f"unknown subcommand {subcommand!r}")
    cfg.validate()
    f = parse_germ(cfg.germ)
    cfg.params = len([v for v in f.used_vars() if v not in ("x", "y", "z")])
    rep = Report(cfg.echo(), print_germ(f))
    ctx = _Context(cfg, f)
    if subcommand == "full":
        rep.stages = stage_full(ctx, rep)
    else:
        rep.stages = [STAGES[subcommand](ctx, rep)]
    return rep


# ---------------------------------------------------------------------------
# Entry point


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="polarwedge", description="Polar wedges and Lipschitz stratification checks")
    ap.add_argument("subcommand", choices=SUBCOMMANDS)
    src = ap.add_mutually_exclusive_group(required=True)
    src.add_argument("--germ", help="polynomial in x, y, z, t1.., e.g. 'z^2 - (y^3 + y^2*x^2)'")
    src.add_argument("--manifest", help="key = value file (germ, arcs, filtration, config)")
    ap.add_argument("--trunc", type=int, help="series truncation order N")
    ap.add_argument("--prec", type=int, help="working precision in bits")
    ap.add_argument("--eps", help="wedge width, e.g. 1/8")
    ap.add_argument("--chain-c", type=float, help="chain constant c > 1")
    ap.add_argument("--samples", type=int, help="sample pairs per formula")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--scales", help="dyadic range lo:hi for s = 2^-k")
    ap.add_argument("--filtration", choices=("auto", "with-polar", "without-polar", "both", "plain"))
    ap.add_argument("--json-out", help="write the structured report here")
    ap.add_argument("--table-out", help="write (stage, series, condition, scale, constant) CSV here")
    return ap


def config_from_args(ns: argparse.Namespace) -> JobConfig:
    cfg = read_manifest(ns.manifest) if ns.manifest else JobConfig(germ=ns.germ)
    for key in ("trunc", "prec", "samples", "seed", "filtration"):
        if getattr(ns, key) is not None:
            setattr(cfg, key, getattr(ns, key))
    if ns.chain_c is not None:
        cfg.chain_c = ns.chain_c
    if ns.eps is not None:
        try:
            cfg.eps = Fraction(ns.eps)
        except ValueError as exc:
            raise ParseError(f"bad eps {ns.eps!r}") from exc
    if ns.scales is not None:
        cfg.scales = parse_scales(ns.scales)
    return cfg


def main(argv: Sequence[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(ns)
        rep = run(ns.subcommand, cfg)
    except (ParseError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(rep.summary())
    if ns.json_out:
        doc = rep.to_dict()
        problems = validate_report(doc)
        if problems:
            raise RuntimeError("report failed validation: " + "; ".join(problems[:5]))
        with open(ns.json_out, "w") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True, default=str)
    if ns.table_out:
        with open(ns.table_out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["stage", "series", "condition", "scale", "constant"])
            w.writerows(rep.table)
    return rep.exit_code()
