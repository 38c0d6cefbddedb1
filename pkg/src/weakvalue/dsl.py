"""Line-oriented scenario language (``.wks`` files).

A file starts with the header ``wks 1``; after that there is one statement
per line and ``#`` starts a comment::

    basis <Name> <label>+
    ket <name> : <Basis> = <coef>|<label>> ( (+|-) <coef>|<label>> )*
    op <name> = proj <ket>
    op <name> = proj <Basis>|<label>>
    op <name> = <op> + <op>
    op <name> = <real> * <op>
    unitary <name> : <Basis> -> <Basis> = bs <q> <r> <beta>
    unitary <name> : <Basis> -> <Basis> = rows [ <coef>, ... ; ... ]
    weak <op> pre <ket> post <ket> [via <unitary>]
    abl  <op> pre <ket> post <ket> [via <unitary>]

A coefficient is one token: ``a``, ``ai`` or ``a+bi`` (``i`` alone is also
accepted, and an omitted coefficient means 1).  The leading sign of the
first term belongs to its coefficient, so ``-1+2i|A>`` has amplitude
``-1+2i``; later terms need an explicit ``+`` or ``-`` separator.  Kets are
normalized on evaluation.  A ``bs`` unitary uses the first domain label as
the ``I`` arm and the first codomain label as the ``B`` port.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import EvalError, WeakValueError
from .hilbert import (Basis, OperatorMatrix, StateVector, normalize, projector,
                      projector_onto)
from .measure import PrePost, abl_probability, spectral_data, weak_value
from .scenarios import BeamSplitter, QueryFailure, ScenarioReport

HEADER = "wks 1"
BS_TOL = 1e-6
ROWS_TOL = 1e-6
KEYWORDS = frozenset({"wks", "basis", "ket", "op", "unitary", "weak", "abl",
                      "proj", "bs", "rows", "pre", "post", "via"})

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")
_LABEL = re.compile(r"[^\s|<>#,;\[\]=:]+")
_COEF_RUN = re.compile(r"[0-9.eEi+-]*")
_REAL = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_REAL_LIT = re.compile(rf"[+-]?{_REAL}")
_IMAG_LIT = re.compile(rf"([+-]?)({_REAL})?i")
_CPLX_LIT = re.compile(rf"([+-]?{_REAL})([+-])({_REAL})?i")


class ParseError(WeakValueError):
    code = "parse_error"

    def __init__(self, line: int, column: int, message: str, offending_text: str,
                 source_line: str = ""):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.message = message
        self.offending_text = offending_text
        self.source_line = source_line

    def render(self, filename: str = "<wks>") -> str:
        caret = " " * (self.column - 1) + "^"
        return (f"{filename}:{self.line}:{self.column}: error: {self.message}\n"
                f"    {self.source_line}\n    {caret}")


@dataclass(frozen=True)
class BasisDecl:
    line: int
    name: str
    labels: tuple[str, ...]


@dataclass(frozen=True)
class KetDecl:
    line: int
    name: str
    basis: str
    terms: tuple[tuple[complex, str], ...]


@dataclass(frozen=True)
class OpDecl:
    line: int
    name: str
    kind: str  # "proj", "proj_label", "sum" or "scale"
    args: tuple


@dataclass(frozen=True)
class UnitaryDecl:
    line: int
    name: str
    domain: str
    codomain: str
    kind: str  # "bs" or "rows"
    params: tuple


@dataclass(frozen=True)
class Query:
    line: int
    kind: str  # "weak" or "abl"
    op: str
    pre: str
    post: str
    via: str | None = None


Statement = Union[BasisDecl, KetDecl, OpDecl, UnitaryDecl, Query]


@dataclass(frozen=True)
class Program:
    statements: tuple[Statement, ...] = ()

    @property
    def queries(self) -> tuple[Query, ...]:
        return tuple(s for s in self.statements if isinstance(s, Query))


def parse_complex(text: str) -> complex | None:
    """Value of a coefficient token, or None when malformed."""
    if text in ("", "+"):
        return 1.0
    if text == "-":
        return -1.0
    if _REAL_LIT.fullmatch(text):
        return complex(float(text))
    m = _IMAG_LIT.fullmatch(text)
    if m:
        im = float(m.group(2)) if m.group(2) else 1.0
        return complex(0.0, -im if m.group(1) == "-" else im)
    m = _CPLX_LIT.fullmatch(text)
    if m:
        im = float(m.group(3)) if m.group(3) else 1.0
        return complex(float(m.group(1)), -im if m.group(2) == "-" else im)
    return None


@dataclass
class _Sym:
    kind: str  # basis, ket, op, unitary
    basis: Basis
    out_basis: Basis | None = None


class _Line:
    """Cursor over one source line; positions are 0-based, columns 1-based."""

    def __init__(self, lineno: int, text: str):
        self.lineno = lineno
        self.text = text
        self.pos = 0

    def error(self, message: str, pos: int | None = None, token: str | None = None) -> ParseError:
        pos = self.pos if pos is None else pos
        pos = min(pos, max(len(self.text) - 1, 0))
        if token is None:
            m = re.compile(r"\S+").match(self.text, pos)
            token = m.group(0) if m else ""
        return ParseError(self.lineno, pos + 1, message, token, self.text)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def peek(self, s: str) -> bool:
        self.skip_ws()
        return self.text.startswith(s, self.pos)

    def expect(self, s: str) -> None:
        if not self.peek(s):
            raise self.error(f"expected {s!r}")
        self.pos += len(s)

    def _match(self, pattern: re.Pattern, what: str) -> tuple[str, int]:
        self.skip_ws()
        m = pattern.match(self.text, self.pos)
        if not m or not m.group(0):
            raise self.error(f"expected {what}")
        start = self.pos
        self.pos = m.end()
        return m.group(0), start

    def name(self, what: str = "a name") -> tuple[str, int]:
        return self._match(_NAME, what)

    def label(self) -> tuple[str, int]:
        return self._match(_LABEL, "a basis label")

    def keyword(self, word: str) -> bool:
        self.skip_ws()
        m = _NAME.match(self.text, self.pos)
        if m and m.group(0) == word:
            self.pos = m.end()
            return True
        return False

    def coef(self) -> complex:
        self.skip_ws()
        start = self.pos
        m = _COEF_RUN.match(self.text, self.pos)
        run = m.group(0)
        value = parse_complex(run)
        if value is None:
            raise self.error(f"malformed complex literal {run!r}", start, run)
        self.pos = m.end()
        return value

    def real(self, what: str = "a real number") -> float:
        self.skip_ws()
        start = self.pos
        m = re.compile(r"\S+").match(self.text, self.pos)
        tok = m.group(0) if m else ""
        lit = _REAL_LIT.match(tok)
        if not lit:
            raise self.error(f"expected {what}", start, tok)
        self.pos = start + lit.end()
        return float(lit.group(0))

    def finish(self) -> None:
        if not self.at_end():
            raise self.error("unexpected trailing text")


class _Parser:
    def __init__(self):
        self.symbols: dict[str, _Sym] = {}
        self.statements: list[Statement] = []

    def declare(self, ln: _Line, name: str, pos: int, sym: _Sym) -> None:
        if name in KEYWORDS:
            raise ln.error(f"{name!r} is a reserved word", pos, name)
        if name in self.symbols:
            raise ln.error(f"{name!r} is already declared", pos, name)
        self.symbols[name] = sym

    def lookup(self, ln: _Line, kind: str) -> tuple[str, _Sym, int]:
        name, pos = ln.name(f"a {kind} name")
        sym = self.symbols.get(name)
        if sym is None:
            raise ln.error(f"undeclared name {name!r}", pos, name)
        if sym.kind != kind:
            raise ln.error(f"{name!r} is a {sym.kind}, expected a {kind}", pos, name)
        return name, sym, pos

    def statement(self, ln: _Line) -> None:
        head, pos = ln.name("a statement")
        handler = getattr(self, f"_st_{head}", None)
        if handler is None or head == "wks":
            raise ln.error(f"unknown statement {head!r}", pos, head)
        self.statements.append(handler(ln))
        ln.finish()

    def _st_basis(self, ln: _Line) -> BasisDecl:
        name, pos = ln.name("a basis name")
        labels = []
        while not ln.at_end():
            lab, lpos = ln.label()
            if lab in labels:
                raise ln.error(f"duplicate label {lab!r}", lpos, lab)
            labels.append(lab)
        if not labels:
            raise ln.error("a basis needs at least one label")
        self.declare(ln, name, pos, _Sym("basis", Basis(labels)))
        return BasisDecl(ln.lineno, name, tuple(labels))

    def _st_ket(self, ln: _Line) -> KetDecl:
        name, pos = ln.name("a ket name")
        ln.expect(":")
        bname, bsym, _ = self.lookup(ln, "basis")
        ln.expect("=")
        terms = []
        while True:
            sign = 1.0
            if terms:
                if ln.at_end():
                    break
                if ln.peek("+"):
                    ln.pos += 1
                elif ln.peek("-"):
                    ln.pos += 1
                    sign = -1.0
                else:
                    raise ln.error("expected '+' or '-' between terms")
            c = ln.coef()
            ln.expect("|")
            lab, lpos = ln.label()
            if lab not in bsym.basis.labels:
                raise ln.error(f"label {lab!r} is not in basis {bname!r}", lpos, lab)
            if ln.text.startswith(">", ln.pos):
                ln.pos += 1
            else:
                raise ln.error("expected '>'")
            terms.append((sign * c, lab))
        self.declare(ln, name, pos, _Sym("ket", bsym.basis))
        return KetDecl(ln.lineno, name, bname, tuple(terms))

    def _st_op(self, ln: _Line) -> OpDecl:
        name, pos = ln.name("an operator name")
        ln.expect("=")
        ln.skip_ws()
        if ln.keyword("proj"):
            ln.skip_ws()
            target, tpos = ln.name("a ket or basis name")
            sym = self.symbols.get(target)
            if sym is not None and sym.kind == "basis":
                ln.expect("|")
                lab, lpos = ln.label()
                if lab not in sym.basis.labels:
                    raise ln.error(f"label {lab!r} is not in basis {target!r}", lpos, lab)
                ln.expect(">")
                decl = OpDecl(ln.lineno, name, "proj_label", (target, lab))
            else:
                ln.pos = tpos
                kname, sym, _ = self.lookup(ln, "ket")
                decl = OpDecl(ln.lineno, name, "proj", (kname,))
            basis = sym.basis
        elif ln.pos < len(ln.text) and ln.text[ln.pos] in "+-.0123456789":
            a = ln.real("a real scale factor")
            ln.expect("*")
            oname, osym, _ = self.lookup(ln, "op")
            decl = OpDecl(ln.lineno, name, "scale", (a, oname))
            basis = osym.basis
        else:
            lname, lsym, _ = self.lookup(ln, "op")
            ln.expect("+")
            rname, rsym, rpos = self.lookup(ln, "op")
            if rsym.basis != lsym.basis:
                raise ln.error(f"dimension mismatch: {lname!r} and {rname!r} act on "
                               "different bases", rpos, rname)
            decl = OpDecl(ln.lineno, name, "sum", (lname, rname))
            basis = lsym.basis
        self.declare(ln, name, pos, _Sym("op", basis))
        return decl

    def _st_unitary(self, ln: _Line) -> UnitaryDecl:
        name, pos = ln.name("a unitary name")
        ln.expect(":")
        dname, dsym, _ = self.lookup(ln, "basis")
        ln.expect("->")
        cname, csym, cpos = self.lookup(ln, "basis")
        n = dsym.basis.dim
        if csym.basis.dim != n:
            raise ln.error(f"dimension mismatch: {dname!r} has {n} labels, "
                           f"{cname!r} has {csym.basis.dim}", cpos, cname)
        ln.expect("=")
        ln.skip_ws()
        kpos = ln.pos
        if ln.keyword("bs"):
            if n != 2:
                raise ln.error("dimension mismatch: bs needs two-label bases", kpos, "bs")
            ln.skip_ws()
            qpos = ln.pos
            q, r, beta = ln.real("q"), ln.real("r"), ln.real("beta")
            if abs(q * q + r * r - 1.0) > BS_TOL:
                raise ln.error(f"bs parameters violate q^2 + r^2 = 1 "
                               f"(got {q * q + r * r!r})", qpos)
            decl = UnitaryDecl(ln.lineno, name, dname, cname, "bs", (q, r, beta))
        elif ln.keyword("rows"):
            decl = UnitaryDecl(ln.lineno, name, dname, cname, "rows", self._rows(ln, n))
        else:
            raise ln.error("expected 'bs' or 'rows'")
        self.declare(ln, name, pos, _Sym("unitary", dsym.basis, csym.basis))
        return decl

    def _rows(self, ln: _Line, n: int) -> tuple[tuple[complex, ...], ...]:
        ln.skip_ws()
        start = ln.pos
        ln.expect("[")
        rows: list[list[complex]] = [[]]
        while True:
            rows[-1].append(ln.coef())
            if ln.peek(","):
                ln.pos += 1
            elif ln.peek(";"):
                ln.pos += 1
                rows.append([])
            elif ln.peek("]"):
                ln.pos += 1
                break
            else:
                raise ln.error("expected ',', ';' or ']'")
        if len(rows) != n or any(len(r) != n for r in rows):
            shape = "x".join(str(len(r)) for r in rows)
            raise ln.error(f"dimension mismatch: expected a {n}x{n} matrix, rows have "
                           f"lengths {shape}", start)
        m = np.array(rows, dtype=complex)
        if np.max(np.abs(m.conj().T @ m - np.eye(n))) > ROWS_TOL:
            raise ln.error("rows do not form a unitary matrix", start)
        return tuple(tuple(r) for r in rows)

    def _query(self, ln: _Line, kind: str) -> Query:
        oname, osym, opos = self.lookup(ln, "op")
        if not ln.keyword("pre"):
            raise ln.error("expected 'pre'")
        pname, psym, _ = self.lookup(ln, "ket")
        if not ln.keyword("post"):
            raise ln.error("expected 'post'")
        fname, fsym, fpos = self.lookup(ln, "ket")
        via = None
        target = psym.basis
        if ln.keyword("via"):
            via, vsym, vpos = self.lookup(ln, "unitary")
            if vsym.basis != psym.basis:
                raise ln.error(f"dimension mismatch: {via!r} does not act on the basis "
                               f"of {pname!r}", vpos, via)
            target = vsym.out_basis
        if osym.basis != psym.basis:
            raise ln.error(f"dimension mismatch: {oname!r} and {pname!r} use different "
                           "bases", opos, oname)
        if fsym.basis != target:
            raise ln.error(f"dimension mismatch: post-selected ket {fname!r} is not in "
                           "the evolved basis", fpos, fname)
        return Query(ln.lineno, kind, oname, pname, fname, via)

    def _st_weak(self, ln: _Line) -> Query:
        return self._query(ln, "weak")

    def _st_abl(self, ln: _Line) -> Query:
        return self._query(ln, "abl")


def _strip_comment(text: str) -> str:
    i = text.find("#")
    return text if i < 0 else text[:i]


def parse(source: str) -> Program:
    """Parse ``.wks`` text.  Blank or comment-only source gives an empty Program.

    Raises
    ------
    ParseError
        With the 1-based line and column of the first problem.
    """
    parser = _Parser()
    seen_header = False
    for lineno, raw in enumerate(source.splitlines(), start=1):
        text = _strip_comment(raw).rstrip()
        if not text.strip():
            continue
        ln = _Line(lineno, text)
        if not seen_header:
            ln.skip_ws()
            if text.split() != HEADER.split():
                raise ln.error(f"missing version header {HEADER!r}")
            seen_header = True
            continue
        parser.statement(ln)
    return Program(tuple(parser.statements))


def _build_unitary(decl: UnitaryDecl, bases: dict[str, Basis]) -> OperatorMatrix:
    dom, cod = bases[decl.domain], bases[decl.codomain]
    if decl.kind == "bs":
        q, r, beta = decl.params
        scale = math.hypot(q, r)
        return BeamSplitter(q / scale, r / scale, beta).unitary(dom, cod)
    # snap to the nearest unitary; parse already bounded the deviation
    w, _, vh = np.linalg.svd(np.array(decl.params, dtype=complex))
    return OperatorMatrix(dom, w @ vh, cod)


def evaluate(program: Program, name: str = "run") -> ScenarioReport:
    """Run every query in order.

    Results are keyed ``"<query index>:<op name>"``; undefined queries become
    :class:`QueryFailure` entries.
    """
    bases: dict[str, Basis] = {}
    kets: dict[str, StateVector] = {}
    ops: dict[str, OperatorMatrix] = {}
    unitaries: dict[str, OperatorMatrix] = {}
    report = ScenarioReport(name)
    first_prob = None
    qi = 0
    try:
        for st in program.statements:
            if isinstance(st, BasisDecl):
                bases[st.name] = Basis(st.labels)
            elif isinstance(st, KetDecl):
                coeffs: dict[str, complex] = {}
                for c, lab in st.terms:
                    coeffs[lab] = coeffs.get(lab, 0) + c
                ket = StateVector.from_dict(bases[st.basis], coeffs)
                kets[st.name] = normalize(ket)
            elif isinstance(st, OpDecl):
                if st.kind == "proj":
                    ops[st.name] = projector_onto(kets[st.args[0]])
                elif st.kind == "proj_label":
                    ops[st.name] = projector(bases[st.args[0]], st.args[1])
                elif st.kind == "sum":
                    ops[st.name] = ops[st.args[0]] + ops[st.args[1]]
                else:
                    ops[st.name] = ops[st.args[1]] * st.args[0]
            elif isinstance(st, UnitaryDecl):
                unitaries[st.name] = _build_unitary(st, bases)
            else:
                key = f"{qi}:{st.op}"
                qi += 1
                pp = PrePost(kets[st.pre], kets[st.post],
                             unitaries[st.via] if st.via else None)
                op = ops[st.op]
                try:
                    if st.kind == "weak":
                        report.weak_values[key] = weak_value(op, pp)
                    else:
                        report.abl[key] = abl_probability(spectral_data(op), pp)
                except WeakValueError as exc:
                    fail = QueryFailure.from_exc(exc)
                    (report.weak_values if st.kind == "weak" else report.abl)[key] = fail
                prob = abs(pp.amplitude()) ** 2
                if first_prob is None:
                    first_prob = prob
                report.notes.append(f"query {key} (line {st.line}): {st.kind}, "
                                    f"post-selection probability {prob:.11e}")
    except (KeyError, ValueError, WeakValueError) as exc:
        raise EvalError(f"line {st.line}: {exc}") from exc
    report.post_selection_probability = first_prob or 0.0
    return report


def run_source(source: str, name: str = "run") -> ScenarioReport:
    return evaluate(parse(source), name)
