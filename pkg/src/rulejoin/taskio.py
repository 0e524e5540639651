"""Reading and writing tasks in a Prolog-like surface syntax.

Three file kinds: bias declarations (head_pred/body_pred/max_* directives),
background knowledge (ground facts plus optional rules), and examples
(pos/neg wrapped ground atoms). Ground list literals like [a,b] are sugar:
they desugar to interned l_* constants plus head/2 and tail/2 cell facts,
so printed files never contain a list literal. A file may use explicit l_*
constants or list sugar, but not both; that keeps the interned namespace
collision-free without breaking reparsing of printed output.
"""

import json
import re
from dataclasses import asdict, dataclass

from .engine import CoverageTester, FactStore
from .generate import Bias
from .logic import (
    Atom,
    Const,
    PredicateSymbol,
    Rule,
    Var,
    format_atom,
    format_rule,
    is_safe,
)

HEAD_PRED = PredicateSymbol("head", 2)
TAIL_PRED = PredicateSymbol("tail", 2)
NIL = "l_nil"


class ParseError(ValueError):
    def __init__(self, msg, line=None, col=None):
        loc = f"line {line}, column {col}: " if line is not None else ""
        super().__init__(loc + msg)
        self.line = line
        self.col = col


class TaskError(ValueError):
    """Cross-file inconsistency (examples vs bias vs background)."""


@dataclass
class Token:
    kind: str  # name | var | int | punct | end
    value: str
    line: int
    col: int


_WORD = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_INT = re.compile(r"-?\d+")


def tokenize(text):
    toks = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line, col = line + 1, 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "%":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if text.startswith(":-", i):
            toks.append(Token("punct", ":-", line, col))
            i += 2
            col += 2
            continue
        if ch in "()[],.|":
            toks.append(Token("punct", ch, line, col))
            i += 1
            col += 1
            continue
        m = _WORD.match(text, i)
        if m:
            word = m.group()
            kind = "var" if word[0].isupper() or word[0] == "_" else "name"
            toks.append(Token(kind, word, line, col))
            i = m.end()
            col += len(word)
            continue
        m = _INT.match(text, i)
        if m:
            toks.append(Token("int", m.group(), line, col))
            i = m.end()
            col += len(m.group())
            continue
        raise ParseError(f"unexpected character {ch!r}", line, col)
    toks.append(Token("end", "", line, col))
    return toks


def list_constant(items):
    return "l_" + "_".join(items) if items else NIL


class ListInterner:
    """Shared store of desugared list cells across the files of one task."""

    def __init__(self):
        self.cells = FactStore()
        self._seen = set()

    def intern(self, items):
        rest = tuple(items)
        name = list_constant(rest)
        while rest and rest not in self._seen:
            self._seen.add(rest)
            self.cells.add(HEAD_PRED, (list_constant(rest), rest[0]))
            self.cells.add(TAIL_PRED, (list_constant(rest), list_constant(rest[1:])))
            rest = rest[1:]
        return name


_CANON_LETTER = re.compile(r"^[A-Z]$")
_CANON_NUMBERED = re.compile(r"^V(\d+)$")


class _VarMap:
    """Variable names to indices. Printed names (A..Z, V26...) keep their
    canonical index so parse(print(rule)) is the identity; anything else gets
    the smallest free index in first-occurrence order."""

    def __init__(self):
        self.by_name = {}

    def index(self, name):
        if name in self.by_name:
            return self.by_name[name]
        want = None
        if _CANON_LETTER.match(name):
            want = ord(name) - ord("A")
        else:
            m = _CANON_NUMBERED.match(name)
            if m and int(m.group(1)) >= 26:
                want = int(m.group(1))
        if want is None or want in self.by_name.values():
            want = 0
            while want in self.by_name.values():
                want += 1
        self.by_name[name] = want
        return want


class _Parser:
    def __init__(self, text, interner=None):
        self.toks = tokenize(text)
        self.pos = 0
        self.interner = interner
        self.sugar_tok = None
        self.l_const_tok = None

    def peek(self):
        return self.toks[self.pos]

    def take(self):
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, tok.line, tok.col)

    def expect(self, value):
        tok = self.take()
        if tok.kind != "punct" or tok.value != value:
            self.error(f"expected {value!r}, found {tok.value!r}", tok)
        return tok

    def at_end(self):
        return self.peek().kind == "end"

    def _constant(self, tok):
        if tok.value.startswith("l_") and self.l_const_tok is None:
            self.l_const_tok = tok
        return tok.value

    def parse_term(self, varmap=None):
        tok = self.take()
        if tok.kind == "name":
            return Const(self._constant(tok))
        if tok.kind == "int":
            return Const(tok.value)
        if tok.kind == "var":
            if varmap is None:
                self.error("variable not allowed in ground context", tok)
            return Var(varmap.index(tok.value))
        if tok.kind == "punct" and tok.value == "[":
            return Const(self.parse_list(tok))
        self.error(f"expected a term, found {tok.value!r}", tok)

    def parse_list(self, open_tok):
        if self.interner is None:
            self.error("list literal not allowed here", open_tok)
        if self.sugar_tok is None:
            self.sugar_tok = open_tok
        items = []
        if self.peek().value == "]":
            self.take()
            return self.interner.intern(items)
        while True:
            tok = self.take()
            if tok.kind not in ("name", "int"):
                self.error("list elements must be plain constants", tok)
            items.append(tok.value)
            tok = self.take()
            if tok.value == "]":
                return self.interner.intern(items)
            if tok.value == "|":
                self.error("list tails are not supported", tok)
            if tok.value != ",":
                self.error(f"expected ',' or ']', found {tok.value!r}", tok)

    def parse_atom(self, varmap=None):
        tok = self.take()
        if tok.kind != "name":
            self.error(f"expected a predicate name, found {tok.value!r}", tok)
        args = []
        if self.peek().value == "(":
            self.take()
            while True:
                args.append(self.parse_term(varmap))
                nxt = self.take()
                if nxt.value == ")":
                    break
                if nxt.value != ",":
                    self.error(f"expected ',' or ')', found {nxt.value!r}", nxt)
        return Atom(PredicateSymbol(tok.value, len(args)), tuple(args))

    def parse_clause(self, allow_rules=True):
        """One `head.` or `head :- b1,...,bn.` clause; returns (head, body)."""
        first = self.peek()
        varmap = _VarMap() if allow_rules else None
        head = self.parse_atom(varmap)
        tok = self.take()
        if tok.value == ".":
            return head, None
        if tok.value != ":-":
            self.error(f"expected '.' or ':-', found {tok.value!r}", tok)
        if not allow_rules:
            self.error("rules are not allowed in this file", first)
        body = [self.parse_atom(varmap)]
        while True:
            tok = self.take()
            if tok.value == ".":
                return head, tuple(body)
            if tok.value != ",":
                self.error(f"expected ',' or '.', found {tok.value!r}", tok)
            body.append(self.parse_atom(varmap))

    def check_l_collision(self):
        if self.sugar_tok and self.l_const_tok:
            self.error(
                "explicit l_* constants cannot be mixed with list sugar",
                self.l_const_tok,
            )


def _ground_args(atom, parser, tok):
    for t in atom.args:
        if isinstance(t, Var):
            parser.error("expected a ground atom", tok)
    return tuple(t.symbol for t in atom.args)


def parse_bias(text):
    p = _Parser(text)
    head = None
    body = []
    settings = {}
    recursion = None
    allow_splittable = None
    constants = []
    while not p.at_end():
        tok = p.peek()
        name_atom, rule_body = p.parse_clause(allow_rules=False)
        args = _ground_args(name_atom, p, tok)
        d = name_atom.pred.name
        if d == "head_pred":
            if head is not None:
                p.error("duplicate head_pred declaration", tok)
            if len(args) != 2 or not args[1].lstrip("-").isdigit():
                p.error("head_pred expects (name, arity)", tok)
            head = PredicateSymbol(args[0], int(args[1]))
        elif d == "body_pred":
            if len(args) != 2 or not args[1].lstrip("-").isdigit():
                p.error("body_pred expects (name, arity)", tok)
            body.append(PredicateSymbol(args[0], int(args[1])))
        elif d in ("max_vars", "max_body", "max_rules"):
            if d in settings:
                p.error(f"duplicate {d} setting", tok)
            if len(args) != 1 or not args[0].lstrip("-").isdigit():
                p.error(f"{d} expects a single integer", tok)
            settings[d] = int(args[0])
        elif d == "enable_recursion":
            if recursion is not None:
                p.error("duplicate enable_recursion setting", tok)
            if args not in (("true",), ("false",)):
                p.error("enable_recursion expects true or false", tok)
            recursion = args == ("true",)
        elif d == "allow_splittable":
            if allow_splittable is not None:
                p.error("duplicate allow_splittable setting", tok)
            if args not in (("true",), ("false",)):
                p.error("allow_splittable expects true or false", tok)
            allow_splittable = args == ("true",)
        elif d == "constant":
            if len(args) != 3 or not args[1].lstrip("-").isdigit():
                p.error("constant expects (pred, argpos, symbol)", tok)
            constants.append((args[0], int(args[1]), args[2], tok))
        else:
            p.error(f"unknown bias directive {d!r}", tok)
    if head is None:
        raise ParseError("missing head_pred declaration")
    if not body:
        raise ParseError("missing body_pred declarations")
    pool = {}
    declared = {head} | set(body)
    for pred_name, pos, symbol, tok in constants:
        matches = [q for q in declared if q.name == pred_name]
        if not matches:
            p.error(f"constant declared for unknown predicate {pred_name!r}", tok)
        if len(matches) > 1:
            p.error(f"predicate name {pred_name!r} is ambiguous", tok)
        pool.setdefault((matches[0], pos), []).append(symbol)
    pool = {k: tuple(sorted(set(v))) for k, v in pool.items()}
    return Bias(
        head,
        tuple(body),
        max_vars=settings.get("max_vars", 3),
        max_body=settings.get("max_body", 3),
        max_rules=settings.get("max_rules", 1),
        enable_recursion=bool(recursion),
        constant_pool=pool,
        allow_splittable=bool(allow_splittable),
    )


def parse_bk(text, interner=None):
    """Background file: ground facts (lists allowed) and optional rules."""
    interner = interner if interner is not None else ListInterner()
    p = _Parser(text, interner)
    facts = FactStore()
    rules = []
    while not p.at_end():
        tok = p.peek()
        head, body = p.parse_clause()
        if body is None:
            facts.add(head.pred, _ground_args(head, p, tok))
        else:
            rules.append(Rule(head, body))
    p.check_l_collision()
    return facts, tuple(rules)


def parse_exs(text, interner=None):
    interner = interner if interner is not None else ListInterner()
    p = _Parser(text, interner)
    pos, neg = [], []
    seen = {}
    while not p.at_end():
        tok = p.take()
        if tok.kind != "name" or tok.value not in ("pos", "neg"):
            p.error("expected pos(atom) or neg(atom)", tok)
        p.expect("(")
        inner = p.parse_atom()
        p.expect(")")
        p.expect(".")
        ex = (inner.pred, _ground_args(inner, p, tok))
        if ex in seen:
            if seen[ex] != tok.value:
                p.error(f"example {format_atom(inner)} is both pos and neg", tok)
            p.error(f"duplicate example {format_atom(inner)}", tok)
        seen[ex] = tok.value
        (pos if tok.value == "pos" else neg).append(ex)
    p.check_l_collision()
    return pos, neg


def parse_program(text):
    """A learned or hand-written hypothesis: safe rules only."""
    p = _Parser(text)
    rules = []
    while not p.at_end():
        tok = p.peek()
        head, body = p.parse_clause()
        if body is None:
            p.error("expected a rule, not a fact", tok)
        r = Rule(head, body)
        if not is_safe(r):
            p.error("unsafe rule: head variable missing from body", tok)
        rules.append(r)
    return tuple(rules)


@dataclass
class TaskSpec:
    bias: Bias
    bk_facts: FactStore
    bk_rules: tuple
    pos: list
    neg: list


def load_task(bias_text, bk_text, exs_text):
    bias = parse_bias(bias_text)
    interner = ListInterner()
    bk_facts, bk_rules = parse_bk(bk_text, interner)
    pos, neg = parse_exs(exs_text, interner)
    for atom in interner.cells.atoms():
        bk_facts.add(*atom)

    target = bias.head_pred
    for pred, _ in pos + neg:
        if pred != target:
            raise TaskError(
                f"example predicate {pred.name}/{pred.arity} does not match "
                f"declared head {target.name}/{target.arity}"
            )
    if not pos:
        raise TaskError("no positive examples")
    if target in bk_facts.preds():
        raise TaskError(f"head predicate {target.name} has background facts")
    for r in bk_rules:
        if r.head.pred == target or any(b.pred == target for b in r.body):
            raise TaskError(f"head predicate {target.name} occurs in background rule")
    return TaskSpec(bias, bk_facts, bk_rules, pos, neg)


# -- printing ------------------------------------------------------------------


def ground_atom_str(pred, args):
    if not args:
        return pred.name
    return f"{pred.name}({','.join(args)})"


def format_fact(pred, args):
    return ground_atom_str(pred, args) + "."


def print_bk(facts, rules=()):
    lines = [format_fact(*atom) for atom in facts.atoms()]
    lines += [format_rule(r) for r in rules]
    return "\n".join(lines) + "\n"


def print_exs(pos, neg):
    lines = [f"pos({ground_atom_str(*e)})." for e in pos]
    lines += [f"neg({ground_atom_str(*e)})." for e in neg]
    return "\n".join(lines) + "\n"


def print_bias(bias):
    lines = [f"head_pred({bias.head_pred.name},{bias.head_pred.arity})."]
    lines += [f"body_pred({q.name},{q.arity})." for q in bias.body_preds]
    lines.append(f"max_vars({bias.max_vars}).")
    lines.append(f"max_body({bias.max_body}).")
    lines.append(f"max_rules({bias.max_rules}).")
    lines.append(f"enable_recursion({'true' if bias.enable_recursion else 'false'}).")
    if bias.allow_splittable:
        lines.append("allow_splittable(true).")
    for (pred, pos_), symbols in sorted(
        bias.constant_pool.items(), key=lambda kv: (kv[0][0].name, kv[0][1])
    ):
        lines += [f"constant({pred.name},{pos_},{s})." for s in symbols]
    return "\n".join(lines) + "\n"


def print_program(program):
    return "\n".join(format_rule(r) for r in program.rules) + "\n"


def stats_json(stats):
    return json.dumps(asdict(stats))


def evaluate(program, bk_facts, bk_rules, pos, neg):
    """Accuracy on held-out examples; a missing program predicts all-negative."""
    total = len(pos) + len(neg)
    if total == 0:
        return 1.0
    if program is None or not program.rules:
        return len(neg) / total
    tester = CoverageTester(bk_facts, bk_rules, pos, neg)
    cov = tester.coverage(program)
    return (cov.tp + (len(neg) - cov.fp)) / total
