"""Scenario files: tokenizer, recursive-descent parser and exporter.

Grammar (``#`` starts a comment that runs to end of line)::

    file       = "scenario" STRING { statement } ;
    statement  = var | order | spacetime | dist ;
    var        = "var" IDENT "{" "alphabet" ":" INT "}" ;
    order      = "order" "{" edge { ";" edge } [";"] "}" ;
    edge       = IDENT "->" IDENT ;
    spacetime  = "spacetime" "{" point { ";" point } [";"] "}" ;
    point      = IDENT ":" "(" NUM { "," NUM } ")" ;
    dist       = "dist" "{" entry { entry } "}" ;
    entry      = "(" assign { "," assign } ")" ":" prob ;
    assign     = IDENT "=" INT ;
    prob       = INT "/" INT | FLOAT ;

Rational probabilities give an exact table.  A single FLOAT anywhere
makes the whole table approximate (rationals are converted to floats).
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import FreeChoiceError, NotNormalized
from .order import from_edges
from .prob import DistributionError, VariableSpec, make_joint
from .scenarios import Scenario
from .spacetime import SpacetimeEvent, derive_order

__all__ = [
    "Diagnostic",
    "ScenarioError",
    "ScenarioFile",
    "ScenarioSemanticError",
    "ScenarioSyntaxError",
    "export_scenario",
    "parse_scenario",
    "parse_scenario_file",
]

MAX_ERRORS = 5


@dataclass(frozen=True)
class Diagnostic:
    line: int
    column: int
    message: str
    hint: str = ""

    def __str__(self):
        text = f"{self.line}:{self.column}: {self.message}"
        return f"{text} (hint: {self.hint})" if self.hint else text


class ScenarioError(FreeChoiceError, ValueError):
    kind = "error"

    def __init__(self, diagnostics: list[Diagnostic], path: str | None = None):
        self.diagnostics = list(diagnostics)
        self.path = path
        super().__init__(self._render())

    def _render(self):
        prefix = f"{self.path}:" if self.path else ""
        return "\n".join(f"{prefix}{d} [{self.kind}]" for d in self.diagnostics)

    @property
    def line(self):
        return self.diagnostics[0].line

    @property
    def column(self):
        return self.diagnostics[0].column


class ScenarioSyntaxError(ScenarioError):
    kind = "syntax error"


class ScenarioSemanticError(ScenarioError):
    kind = "semantic error"


# -- tokenizer ---------------------------------------------------------------


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<newline>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<float>-?(?:\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+[eE][+-]?\d+))
  | (?P<int>-?\d+)
  | (?P<arrow>->)
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
  | (?P<punct>[{}();:,=/])
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, line_start, pos = 1, 0, 0
    errors = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if not m:
            errors.append(Diagnostic(line, col, f"unexpected character {text[pos]!r}"))
            if len(errors) >= MAX_ERRORS:
                break
            pos += 1
            continue
        kind = m.lastgroup
        if kind == "newline":
            line += 1
            line_start = m.end()
        elif kind == "punct":
            tokens.append(Token(m.group(), m.group(), line, col))
        elif kind not in ("ws", "comment"):
            tokens.append(Token(kind, m.group(), line, col))
        pos = m.end()
    if errors:
        raise ScenarioSyntaxError(errors)
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


# -- parser --------------------------------------------------------------------


class _Abort(Exception):
    pass


@dataclass
class _Ast:
    name: str = ""
    name_tok: Token | None = None
    vars: list = field(default_factory=list)  # (name_tok, int_tok)
    orders: list = field(default_factory=list)  # (kw_tok, [(from_tok, to_tok)])
    spacetimes: list = field(default_factory=list)  # (kw_tok, [(label_tok, [num_tok])])
    dists: list = field(default_factory=list)  # (kw_tok, [(lparen_tok, [(name_tok, int_tok)], prob)])


_DESCRIBE = {"ident": "identifier", "int": "integer", "float": "number", "string": "string", "eof": "end of file", "arrow": "'->'"}


def _describe(tok: Token) -> str:
    if tok.kind == "eof":
        return "end of file"
    return repr(tok.text)


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.pos = 0
        self.errors: list[Diagnostic] = []

    @property
    def cur(self) -> Token:
        return self.toks[self.pos]

    def advance(self) -> Token:
        tok = self.toks[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def fail(self, expected: str, hint: str = "") -> None:
        tok = self.cur
        self.errors.append(
            Diagnostic(tok.line, tok.col, f"expected {expected}, found {_describe(tok)}", hint)
        )
        raise _Abort

    def expect(self, kind: str, hint: str = "") -> Token:
        if self.cur.kind != kind:
            self.fail(_DESCRIBE.get(kind, repr(kind)), hint)
        return self.advance()

    def expect_word(self, word: str, hint: str = "") -> Token:
        if self.cur.kind != "ident" or self.cur.text != word:
            self.fail(repr(word), hint)
        return self.advance()

    def recover(self, depth: int) -> None:
        """Skip to just past the ``}`` closing the block we were in."""
        while self.cur.kind != "eof":
            tok = self.advance()
            if tok.kind == "{":
                depth += 1
            elif tok.kind == "}":
                depth -= 1
                if depth <= 0:
                    return

    # -- grammar ----------------------------------------------------------

    def parse_file(self) -> _Ast:
        ast = _Ast()
        try:
            self.expect_word("scenario", 'files start with: scenario "name"')
            tok = self.expect("string", 'give the scenario a quoted name, e.g. scenario "bell"')
            ast.name = json.loads(tok.text)
            ast.name_tok = tok
        except _Abort:
            # Resynchronize on the next statement keyword.
            while self.cur.kind != "eof" and not (
                self.cur.kind == "ident" and self.cur.text in ("var", "order", "spacetime", "dist")
            ):
                self.advance()
        while self.cur.kind != "eof" and len(self.errors) < MAX_ERRORS:
            self.statement(ast)
        return ast

    def statement(self, ast: _Ast) -> None:
        tok = self.cur
        depth = 0
        try:
            if tok.kind != "ident" or tok.text not in ("var", "order", "spacetime", "dist"):
                self.fail("'var', 'order', 'spacetime' or 'dist'")
            self.advance()
            if tok.text == "var":
                name = self.expect("ident", "var NAME { alphabet: K }")
                self.expect("{")
                depth = 1
                self.expect_word("alphabet", "var NAME { alphabet: K }")
                self.expect(":")
                k = self.expect("int", "alphabet size is a positive integer")
                self.expect("}")
                ast.vars.append((name, k))
            elif tok.text == "order":
                self.expect("{")
                depth = 1
                edges = self.separated(self.edge)
                ast.orders.append((tok, edges))
            elif tok.text == "spacetime":
                self.expect("{")
                depth = 1
                points = self.separated(self.point)
                ast.spacetimes.append((tok, points))
            else:
                self.expect("{")
                depth = 1
                entries = [self.entry()]
                while self.cur.kind == "(":
                    entries.append(self.entry())
                self.expect("}", "each dist entry looks like (A=0, B=1): 1/4")
                ast.dists.append((tok, entries))
        except _Abort:
            if depth:
                self.recover(depth)
            else:
                self.advance()

    def separated(self, item):
        items = [item()]
        while self.cur.kind == ";":
            self.advance()
            if self.cur.kind == "}":
                break
            items.append(item())
        self.expect("}", "separate items with ';'")
        return items

    def edge(self):
        a = self.expect("ident", "edges look like A -> X")
        self.expect("arrow", "edges look like A -> X")
        b = self.expect("ident", "edges look like A -> X")
        return a, b

    def point(self):
        label = self.expect("ident", "points look like A: (t, x)")
        self.expect(":")
        self.expect("(")
        nums = [self.number()]
        while self.cur.kind == ",":
            self.advance()
            nums.append(self.number())
        self.expect(")", "close the coordinate list")
        return label, nums

    def number(self) -> Token:
        if self.cur.kind not in ("int", "float"):
            self.fail("number")
        return self.advance()

    def entry(self):
        lp = self.expect("(", "each dist entry looks like (A=0, B=1): 1/4")
        assigns = [self.assign()]
        while self.cur.kind == ",":
            self.advance()
            assigns.append(self.assign())
        self.expect(")")
        self.expect(":")
        return lp, assigns, self.prob()

    def assign(self):
        name = self.expect("ident", "assignments look like A=0")
        self.expect("=")
        value = self.expect("int", "outcomes are nonnegative integers")
        return name, value

    def prob(self):
        if self.cur.kind == "float":
            return self.advance(), None
        num = self.expect("int", "probabilities are written 1/4 or 0.25")
        self.expect("/", "integer probabilities need a denominator, e.g. 1/1")
        den = self.expect("int")
        return num, den


# -- semantic analysis ----------------------------------------------------------


@dataclass(frozen=True)
class ScenarioFile:
    path: str | None
    parsed: Scenario
    source_span_map: dict[str, tuple[int, int]]


class _Checker:
    def __init__(self):
        self.errors: list[Diagnostic] = []

    def error(self, tok: Token, message: str, hint: str = ""):
        if len(self.errors) < MAX_ERRORS:
            self.errors.append(Diagnostic(tok.line, tok.col, message, hint))


def _analyze(ast: _Ast, eof: Token) -> tuple[Scenario, dict[str, tuple[int, int]]]:
    ck = _Checker()
    specs: list[VariableSpec] = []
    spans: dict[str, tuple[int, int]] = {}
    for name_tok, k_tok in ast.vars:
        name, k = name_tok.text, int(k_tok.text)
        if name in spans:
            line, col = spans[name]
            ck.error(name_tok, f"variable {name} already declared at {line}:{col}")
            continue
        if k < 1:
            ck.error(k_tok, f"alphabet of {name} must be at least 1, got {k}")
            continue
        spans[name] = (name_tok.line, name_tok.col)
        specs.append(VariableSpec(name, k))
    labels = [v.name for v in specs]
    if not ast.vars:
        ck.error(eof, "scenario declares no variables", "add: var A { alphabet: 2 }")

    blocks = [(t, "order") for t, _ in ast.orders] + [(t, "spacetime") for t, _ in ast.spacetimes]
    blocks.sort(key=lambda b: (b[0].line, b[0].col))
    if not blocks:
        ck.error(eof, "missing causal structure", "add an 'order { ... }' or 'spacetime { ... }' block")
    for tok, kind in blocks[1:]:
        ck.error(tok, f"conflicting block '{kind}': a scenario has exactly one order or spacetime block")
    if len(ast.dists) > 1:
        ck.error(ast.dists[1][0], "duplicate 'dist' block")

    order = None
    embedding = None
    if ast.orders and not ast.spacetimes and len(ast.orders) == 1:
        edges = []
        for a, b in ast.orders[0][1]:
            ok = True
            for t in (a, b):
                if t.text not in spans:
                    ck.error(t, f"unknown variable {t.text} in order", f"declare it: var {t.text} {{ alphabet: 2 }}")
                    ok = False
            if ok:
                edges.append((a.text, b.text))
        order = from_edges(labels, edges)
    elif ast.spacetimes and not ast.orders and len(ast.spacetimes) == 1:
        kw, points = ast.spacetimes[0]
        events = []
        seen: dict[str, Token] = {}
        dims = None
        for label, nums in points:
            if label.text not in spans:
                ck.error(label, f"unknown variable {label.text} in spacetime", f"declare it: var {label.text} {{ alphabet: 2 }}")
                continue
            if label.text in seen:
                ck.error(label, f"duplicate event label {label.text}")
                continue
            seen[label.text] = label
            if not 2 <= len(nums) <= 4:
                ck.error(label, f"event {label.text} needs a time and 1 to 3 spatial coordinates")
                continue
            if dims is None:
                dims = len(nums)
            elif len(nums) != dims:
                ck.error(label, f"event {label.text} has {len(nums) - 1} spatial coordinates, earlier events have {dims - 1}")
                continue
            t, *x = (float(n.text) for n in nums)
            events.append(SpacetimeEvent(label.text, t, tuple(x)))
        missing = [lab for lab in labels if lab not in seen]
        if missing:
            ck.error(kw, f"no event coordinates for {', '.join(missing)}")
        if not ck.errors:
            by_label = {e.label: e for e in events}
            embedding = tuple(by_label[lab] for lab in labels)
            order = derive_order(embedding)

    dist = None
    if len(ast.dists) == 1 and not ck.errors:
        dist = _build_dist(ck, ast.dists[0], specs)

    if ck.errors:
        raise ScenarioSemanticError(ck.errors)
    return Scenario(ast.name, order, dist, embedding), spans


def _build_dist(ck: _Checker, block, specs: list[VariableSpec]):
    kw, entries = block
    index = {v.name: i for i, v in enumerate(specs)}
    approx = any(den is None for _, _, (_, den) in entries)
    table = {}
    where = {}
    for lp, assigns, (num, den) in entries:
        values = [None] * len(specs)
        bad = False
        for name_tok, val_tok in assigns:
            i = index.get(name_tok.text)
            if i is None:
                ck.error(name_tok, f"unknown variable {name_tok.text} in dist")
                bad = True
                continue
            if values[i] is not None:
                ck.error(name_tok, f"variable {name_tok.text} assigned twice in one entry")
                bad = True
                continue
            v = int(val_tok.text)
            if not 0 <= v < specs[i].cardinality:
                ck.error(val_tok, f"{name_tok.text}={v} outside alphabet 0..{specs[i].cardinality - 1}")
                bad = True
                continue
            values[i] = v
        missing = [specs[i].name for i, v in enumerate(values) if v is None and specs[i].name not in {t.text for t, _ in assigns}]
        if missing:
            ck.error(lp, f"entry does not assign {', '.join(missing)}", "every variable must be assigned in every entry")
            bad = True
        if den is None:
            p = float(num.text)
            if not 0.0 <= p <= 1.0:
                ck.error(num, f"probability {num.text} outside [0, 1]")
                bad = True
        else:
            n, d = int(num.text), int(den.text)
            if d <= 0:
                ck.error(den, "denominator must be positive")
                bad = True
                p = None
            else:
                p = Fraction(n, d)
                if not 0 <= p <= 1:
                    ck.error(num, f"probability {n}/{d} outside [0, 1]")
                    bad = True
                elif approx:
                    p = float(p)
        if bad:
            continue
        key = tuple(values)
        if key in table:
            line, col = where[key]
            ck.error(lp, f"duplicate entry for this outcome (first given at {line}:{col})")
            continue
        table[key] = p
        where[key] = (lp.line, lp.col)
    if ck.errors:
        return None
    try:
        return make_joint(specs, table, mode="approx" if approx else "exact")
    except NotNormalized as exc:
        ck.error(kw, f"NotNormalized: probabilities sum to {exc.actual_sum}", "entries must sum to 1")
    except DistributionError as exc:
        ck.error(kw, str(exc))
    return None


def _parse(text: str) -> tuple[Scenario, dict[str, tuple[int, int]]]:
    tokens = tokenize(text)
    parser = _Parser(tokens)
    ast = parser.parse_file()
    if parser.errors:
        raise ScenarioSyntaxError(parser.errors[:MAX_ERRORS])
    return _analyze(ast, tokens[-1])


def parse_scenario(text: str) -> Scenario:
    """Parse scenario-file text; raises ScenarioSyntaxError or ScenarioSemanticError."""
    return _parse(text)[0]


def parse_scenario_file(path: str | os.PathLike) -> ScenarioFile:
    path = os.fspath(path)
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        scenario, spans = _parse(text)
    except ScenarioError as exc:
        exc.path = path
        exc.args = (exc._render(),)
        raise
    return ScenarioFile(path, scenario, spans)


# -- export ----------------------------------------------------------------------


def _num(x: float) -> str:
    return repr(float(x))


def _prob(p) -> str:
    if isinstance(p, Fraction):
        return f"{p.numerator}/{p.denominator}"
    return repr(float(p))


def export_scenario(sc: Scenario) -> str:
    """Scenario-file text that parses back to an equal scenario."""
    out = [f"scenario {json.dumps(sc.name)}", ""]
    specs = sc.distribution.variables if sc.distribution is not None else [VariableSpec(lab, 1) for lab in sc.labels]
    for v in specs:
        out.append(f"var {v.name} {{ alphabet: {v.cardinality} }}")
    out.append("")
    if sc.embedding is not None:
        pts = [f"  {e.label}: ({', '.join(_num(c) for c in (e.t, *e.x))})" for e in sc.embedding]
        out.append("spacetime {\n" + ";\n".join(pts) + "\n}")
    else:
        edges = sc.order.edges() or [(sc.labels[0], sc.labels[0])]
        out.append("order {\n" + ";\n".join(f"  {a} -> {b}" for a, b in edges) + "\n}")
    if sc.distribution is not None:
        d = sc.distribution
        out.append("")
        out.append("dist {")
        for outcome, p in d.items():
            if p != 0:
                assign = ", ".join(f"{n}={x}" for n, x in zip(d.names, outcome))
                out.append(f"  ({assign}): {_prob(p)}")
        out.append("}")
    return "\n".join(out) + "\n"
