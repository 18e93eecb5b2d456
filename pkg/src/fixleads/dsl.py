"""Parser and elaborator for the `.evt` specification language.

The surface syntax declares one system per file: variables over finite
domains, an optional invariant, an init predicate, guarded events, variant
functions and liveness properties.  Parsing yields a plain AST; elaboration
enumerates the state space and evaluates every guard, action, predicate and
variant per state, producing the relational objects the engines work on.

A `[]` between actions inside one event merges the outcomes into a single
event's relation (internal nondeterminism).  That is not the same as
declaring two events: fairness is granted per event, so an event made of
two branches is only guaranteed to run *some* branch fairly, never a
specific one.  Split into separate events when each branch must be treated
as its own helpful step.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

from .events import Event, EventSystem, ModelError
from .exprs import (
    And,
    Arith,
    BoolLit,
    Cmp,
    EvalError,
    Expr,
    IntLit,
    Name,
    Not,
    Or,
    eval_expr,
    to_text,
)
from .states import (
    DEFAULT_STATE_CAP,
    SpaceError,
    StateSet,
    StateSpace,
    VarDecl,
    eval_pred,
)
from .variants import VariantError, VariantFn


class DslError(Exception):
    """Syntax or elaboration failure, with source position when known."""

    def __init__(self, message: str, line: Optional[int] = None, col: Optional[int] = None):
        if line is not None:
            message = f"{line}:{col}: {message}"
        super().__init__(message)
        self.line = line
        self.col = col


# --- AST -------------------------------------------------------------------


@dataclass(frozen=True)
class Domain:
    kind: str  # 'range' | 'bool' | 'enum'
    lo: int = 0
    hi: int = 0
    names: Tuple[str, ...] = ()


@dataclass(frozen=True)
class VarDeclAst:
    name: str
    domain: Domain
    line: int = 0


@dataclass(frozen=True)
class Assign:
    var: str
    expr: Expr


@dataclass(frozen=True)
class ChooseAssign:
    var: str
    choices: Tuple[Expr, ...]


AssignItem = Union[Assign, ChooseAssign]


@dataclass(frozen=True)
class ActionAst:
    """One action branch: skip is the empty assignment list."""

    assigns: Tuple[AssignItem, ...]


@dataclass(frozen=True)
class EventAst:
    name: str
    guard: Optional[Expr]
    actions: Tuple[ActionAst, ...]
    line: int = 0


@dataclass(frozen=True)
class VariantAst:
    name: str
    expr: Expr
    line: int = 0


@dataclass(frozen=True)
class PropertyAst:
    name: str
    kind: str  # 'ensures' | 'leadsto'
    p: Expr
    q: Expr
    assumption: str  # 'mp' | 'wf'
    via: Optional[str] = None  # helpful event, ensures only
    using: Optional[str] = None  # variant name, leadsto only
    with_si: bool = False
    line: int = 0


@dataclass
class SpecAst:
    name: str
    vars: List[VarDeclAst] = field(default_factory=list)
    invariant: Optional[Expr] = None
    init: Optional[Expr] = None
    events: List[EventAst] = field(default_factory=list)
    variants: List[VariantAst] = field(default_factory=list)
    properties: List[PropertyAst] = field(default_factory=list)


# --- Tokenizer -------------------------------------------------------------

_KEYWORDS = {
    "system", "var", "invariant", "init", "event", "when", "then", "skip",
    "variant", "property", "ensures", "leadsto", "via", "under", "using",
    "with", "si", "mp", "wf", "bool", "true", "false", "not", "and", "or",
}

_SYMBOLS = [
    ":in", ":=", "..", "[]", "!=", "<=", ">=",
    "{", "}", "(", ")", ",", ":", "=", "<", ">", "+", "-", "*",
]


@dataclass(frozen=True)
class Token:
    kind: str  # 'ident' | 'int' | 'keyword' | symbol itself | 'eof'
    text: str
    line: int
    col: int


def tokenize(text: str) -> List[Token]:
    toks: List[Token] = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "#":  # comment to end of line
            while i < n and text[i] != "\n":
                i += 1
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(Token("int", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = "keyword" if word in _KEYWORDS else "ident"
            toks.append(Token(kind, word, line, col))
            col += j - i
            i = j
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                toks.append(Token(sym, sym, line, col))
                col += len(sym)
                i += len(sym)
                break
        else:
            raise DslError(f"unexpected character {c!r}", line, col)
    toks.append(Token("eof", "", line, col))
    return toks


# --- Parser ----------------------------------------------------------------


class _Parser:
    def __init__(self, toks: List[Token]):
        self.toks = toks
        self.pos = 0

    def peek(self) -> Token:
        return self.toks[self.pos]

    def next(self) -> Token:
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def fail(self, expected: str) -> DslError:
        tok = self.peek()
        got = tok.text if tok.kind != "eof" else "end of input"
        return DslError(f"expected {expected}, got {got!r}", tok.line, tok.col)

    def expect(self, kind: str, text: Optional[str] = None) -> Token:
        tok = self.peek()
        if tok.kind != kind or (text is not None and tok.text != text):
            raise self.fail(text or kind)
        return self.next()

    def at_keyword(self, *words: str) -> bool:
        tok = self.peek()
        return tok.kind == "keyword" and tok.text in words

    def expect_keyword(self, word: str) -> Token:
        if not self.at_keyword(word):
            raise self.fail(f"'{word}'")
        return self.next()

    def ident(self) -> Token:
        tok = self.peek()
        if tok.kind != "ident":
            raise self.fail("an identifier")
        return self.next()

    # spec := "system" IDENT item*
    def spec(self) -> SpecAst:
        self.expect_keyword("system")
        ast = SpecAst(self.ident().text)
        seen: Dict[str, Token] = {}
        while self.peek().kind != "eof":
            self.item(ast, seen)
        return ast

    def _declare(self, kind: str, tok: Token, seen: Dict[str, Token]) -> None:
        key = f"{kind}:{tok.text}"
        if key in seen:
            raise DslError(f"duplicate {kind} {tok.text!r}", tok.line, tok.col)
        seen[key] = tok

    def item(self, ast: SpecAst, seen: Dict[str, Token]) -> None:
        if self.at_keyword("var"):
            self.next()
            name = self.ident()
            self._declare("var", name, seen)
            self.expect(":")
            ast.vars.append(VarDeclAst(name.text, self.domain(), name.line))
        elif self.at_keyword("invariant"):
            tok = self.next()
            if ast.invariant is not None:
                raise DslError("duplicate invariant", tok.line, tok.col)
            ast.invariant = self.pred()
        elif self.at_keyword("init"):
            tok = self.next()
            if ast.init is not None:
                raise DslError("duplicate init", tok.line, tok.col)
            ast.init = self.pred()
        elif self.at_keyword("event"):
            self.next()
            name = self.ident()
            self._declare("event", name, seen)
            guard = None
            if self.at_keyword("when"):
                self.next()
                guard = self.pred()
            self.expect_keyword("then")
            actions = [self.action()]
            while self.peek().kind == "[]":
                self.next()
                actions.append(self.action())
            ast.events.append(EventAst(name.text, guard, tuple(actions), name.line))
        elif self.at_keyword("variant"):
            self.next()
            name = self.ident()
            self._declare("variant", name, seen)
            self.expect(":=")
            ast.variants.append(VariantAst(name.text, self.expr(), name.line))
        elif self.at_keyword("property"):
            self.next()
            name = self.ident()
            self._declare("property", name, seen)
            self.expect(":")
            ast.properties.append(self.prop(name))
        else:
            raise self.fail("'var', 'invariant', 'init', 'event', 'variant' or 'property'")

    def domain(self) -> Domain:
        tok = self.peek()
        if self.at_keyword("bool"):
            self.next()
            return Domain("bool")
        if tok.kind == "{":
            self.next()
            names = [self.ident().text]
            while self.peek().kind == ",":
                self.next()
                names.append(self.ident().text)
            self.expect("}")
            return Domain("enum", names=tuple(names))
        lo = self.int_lit()
        self.expect("..")
        hi = self.int_lit()
        if lo > hi:
            raise DslError(f"empty range {lo}..{hi}", tok.line, tok.col)
        return Domain("range", lo, hi)

    def int_lit(self) -> int:
        sign = 1
        if self.peek().kind == "-":
            self.next()
            sign = -1
        return sign * int(self.expect("int").text)

    def action(self) -> ActionAst:
        if self.at_keyword("skip"):
            self.next()
            return ActionAst(())
        assigns = [self.assign()]
        while self.peek().kind == ",":
            self.next()
            assigns.append(self.assign())
        names = [a.var for a in assigns]
        if len(set(names)) != len(names):
            tok = self.peek()
            raise DslError("variable assigned twice in one action", tok.line, tok.col)
        return ActionAst(tuple(assigns))

    def assign(self) -> AssignItem:
        var = self.ident()
        if self.peek().kind == ":in":
            self.next()
            self.expect("{")
            choices = [self.expr()]
            while self.peek().kind == ",":
                self.next()
                choices.append(self.expr())
            self.expect("}")
            return ChooseAssign(var.text, tuple(choices))
        self.expect(":=")
        return Assign(var.text, self.expr())

    def prop(self, name: Token) -> PropertyAst:
        if self.at_keyword("ensures"):
            self.next()
            p = self.braced_pred()
            q = self.braced_pred()
            via = None
            if self.at_keyword("via"):
                self.next()
                via = self.ident().text
            self.expect_keyword("under")
            assumption = self.assumption()
            return PropertyAst(name.text, "ensures", p, q, assumption, via=via, line=name.line)
        if self.at_keyword("leadsto"):
            self.next()
            p = self.braced_pred()
            q = self.braced_pred()
            self.expect_keyword("under")
            assumption = self.assumption()
            using = None
            with_si = False
            if self.at_keyword("using"):
                self.next()
                using = self.ident().text
            if self.at_keyword("with"):
                self.next()
                self.expect_keyword("si")
                with_si = True
            return PropertyAst(
                name.text, "leadsto", p, q, assumption,
                using=using, with_si=with_si, line=name.line,
            )
        raise self.fail("'ensures' or 'leadsto'")

    def assumption(self) -> str:
        if self.at_keyword("mp", "wf"):
            return self.next().text
        raise self.fail("'mp' or 'wf'")

    def braced_pred(self) -> Expr:
        self.expect("{")
        p = self.pred()
        self.expect("}")
        return p

    # predicates and expressions, lowest precedence first
    def pred(self) -> Expr:
        return self.or_expr()

    def expr(self) -> Expr:
        return self.or_expr()

    def or_expr(self) -> Expr:
        e = self.and_expr()
        while self.at_keyword("or"):
            self.next()
            e = Or(e, self.and_expr())
        return e

    def and_expr(self) -> Expr:
        e = self.not_expr()
        while self.at_keyword("and"):
            self.next()
            e = And(e, self.not_expr())
        return e

    def not_expr(self) -> Expr:
        if self.at_keyword("not"):
            self.next()
            return Not(self.not_expr())
        return self.cmp_expr()

    def cmp_expr(self) -> Expr:
        e = self.sum_expr()
        tok = self.peek()
        if tok.kind in ("=", "!=", "<", "<=", ">", ">="):
            self.next()
            return Cmp(tok.kind, e, self.sum_expr())
        return e

    def sum_expr(self) -> Expr:
        e = self.term_expr()
        while self.peek().kind in ("+", "-"):
            op = self.next().kind
            e = Arith(op, e, self.term_expr())
        return e

    def term_expr(self) -> Expr:
        e = self.unary_expr()
        while self.peek().kind == "*":
            self.next()
            e = Arith("*", e, self.unary_expr())
        return e

    def unary_expr(self) -> Expr:
        if self.peek().kind == "-":
            self.next()
            return Arith("-", IntLit(0), self.unary_expr())
        return self.atom()

    def atom(self) -> Expr:
        tok = self.peek()
        if tok.kind == "int":
            self.next()
            return IntLit(int(tok.text))
        if self.at_keyword("true"):
            self.next()
            return BoolLit(True)
        if self.at_keyword("false"):
            self.next()
            return BoolLit(False)
        if tok.kind == "ident":
            self.next()
            return Name(tok.text)
        if tok.kind == "(":
            self.next()
            e = self.pred()
            self.expect(")")
            return e
        raise self.fail("an expression")


def parse(text: str) -> SpecAst:
    return _Parser(tokenize(text)).spec()


# --- Printer ---------------------------------------------------------------


def print_spec(ast: SpecAst) -> str:
    """Concrete syntax for an AST; parse(print_spec(parse(t))) is stable."""
    lines = [f"system {ast.name}"]
    for v in ast.vars:
        d = v.domain
        if d.kind == "bool":
            dom = "bool"
        elif d.kind == "enum":
            dom = "{" + ", ".join(d.names) + "}"
        else:
            dom = f"{d.lo} .. {d.hi}"
        lines.append(f"var {v.name} : {dom}")
    if ast.invariant is not None:
        lines.append(f"invariant {to_text(ast.invariant)}")
    if ast.init is not None:
        lines.append(f"init {to_text(ast.init)}")
    for e in ast.events:
        head = f"event {e.name}"
        if e.guard is not None:
            head += f" when {to_text(e.guard)}"
        lines.append(head + " then " + " [] ".join(_action_text(a) for a in e.actions))
    for v in ast.variants:
        lines.append(f"variant {v.name} := {to_text(v.expr)}")
    for p in ast.properties:
        lines.append(f"property {p.name} : {_prop_text(p)}")
    return "\n".join(lines) + "\n"


def _action_text(a: ActionAst) -> str:
    if not a.assigns:
        return "skip"
    parts = []
    for item in a.assigns:
        if isinstance(item, Assign):
            parts.append(f"{item.var} := {to_text(item.expr)}")
        else:
            opts = ", ".join(to_text(c) for c in item.choices)
            parts.append(f"{item.var} :in {{{opts}}}")
    return ", ".join(parts)


def _prop_text(p: PropertyAst) -> str:
    out = f"{p.kind} {{{to_text(p.p)}}} {{{to_text(p.q)}}}"
    if p.kind == "ensures" and p.via is not None:
        out += f" via {p.via}"
    out += f" under {p.assumption}"
    if p.kind == "leadsto":
        if p.using is not None:
            out += f" using {p.using}"
        if p.with_si:
            out += " with si"
    return out


# --- Elaboration -----------------------------------------------------------


@dataclass
class Property:
    """An elaborated property: predicate sets plus how to check them."""

    name: str
    kind: str
    p: StateSet
    q: StateSet
    assumption: str
    via: Optional[str] = None
    using: Optional[str] = None
    with_si: bool = False


@dataclass
class Elaborated:
    system: EventSystem
    properties: List[Property]
    variants: Dict[str, VariantFn]
    has_init: bool


def elaborate(ast: SpecAst, cap: int = DEFAULT_STATE_CAP) -> Elaborated:
    if not ast.vars:
        raise DslError(f"system {ast.name!r} declares no variables")
    decls = [VarDecl(v.name, _domain_values(v.domain)) for v in ast.vars]
    try:
        space = StateSpace(decls, ast.invariant, cap)
    except (SpaceError, EvalError) as exc:
        raise DslError(str(exc)) from exc
    # keyed by (type, value) so bool domains do not admit 0/1 via int equality
    domains = {
        v.name: {(type(val), val) for val in d.domain}
        for v, d in zip(ast.vars, decls)
    }

    events = [_elaborate_event(space, domains, e) for e in ast.events]
    if not events:
        raise DslError(f"system {ast.name!r} declares no events")

    if ast.init is not None:
        init = _pred_set(space, ast.init, "init")
        has_init = True
    else:
        init = space.empty()
        has_init = False
    try:
        system = EventSystem(space, events, init, name=ast.name)
    except ModelError as exc:
        raise DslError(str(exc)) from exc

    variants: Dict[str, VariantFn] = {}
    for v in ast.variants:
        table = {}
        for i in range(space.size):
            env = space.state_of(i)
            try:
                val = eval_expr(v.expr, env, space.constants)
            except EvalError as exc:
                raise DslError(f"variant {v.name!r}: {exc}", v.line, 1) from exc
            if type(val) is not int:
                raise DslError(
                    f"variant {v.name!r} is not an integer at {env!r}", v.line, 1
                )
            table[i] = val
        try:
            variants[v.name] = VariantFn(space, table, v.name)
        except VariantError as exc:
            raise DslError(f"variant {v.name!r}: {exc}", v.line, 1) from exc

    event_names = {e.name for e in events}
    props: List[Property] = []
    for p in ast.properties:
        if p.via is not None and p.via not in event_names:
            raise DslError(f"property {p.name!r} names unknown event {p.via!r}", p.line, 1)
        if p.using is not None and p.using not in variants:
            raise DslError(f"property {p.name!r} names unknown variant {p.using!r}", p.line, 1)
        props.append(
            Property(
                p.name, p.kind,
                _pred_set(space, p.p, f"property {p.name!r}"),
                _pred_set(space, p.q, f"property {p.name!r}"),
                p.assumption, p.via, p.using, p.with_si,
            )
        )
    return Elaborated(system, props, variants, has_init)


def _domain_values(d: Domain) -> tuple:
    if d.kind == "bool":
        return (False, True)
    if d.kind == "enum":
        return d.names
    return tuple(range(d.lo, d.hi + 1))


def _pred_set(space: StateSpace, pred: Expr, what: str) -> StateSet:
    try:
        return eval_pred(space, pred)
    except EvalError as exc:
        raise DslError(f"{what}: {exc}") from exc


def _elaborate_event(space: StateSpace, domains: Dict[str, set], e: EventAst) -> Event:
    guard = _pred_set(space, e.guard, f"event {e.name!r}") if e.guard is not None else space.universe()
    rel: Dict[int, int] = {}
    for i in guard:
        env = space.state_of(i)
        image = 0
        for action in e.actions:
            image |= _action_successors(space, domains, e, env, action)
        rel[i] = image
    try:
        return Event(e.name, guard, rel)
    except ModelError as exc:
        raise DslError(str(exc), e.line, 1) from exc


def _action_successors(space, domains, e: EventAst, env: dict, action: ActionAst) -> int:
    """Successor mask of one action branch at one pre-state (parallel assigns;
    a :in assignment fans out over every listed value)."""
    per_assign: List[List[Tuple[str, object]]] = []
    for item in action.assigns:
        if item.var not in domains:
            raise DslError(
                f"event {e.name!r} assigns undeclared variable {item.var!r}", e.line, 1
            )
        exprs = (item.expr,) if isinstance(item, Assign) else item.choices
        options = []
        for ex in exprs:
            try:
                val = eval_expr(ex, env, space.constants)
            except EvalError as exc:
                raise DslError(f"event {e.name!r}: {exc}", e.line, 1) from exc
            if (type(val), val) not in domains[item.var]:
                raise DslError(
                    f"event {e.name!r} assigns {item.var} := {val!r}, "
                    f"outside its domain (at state {env!r})",
                    e.line, 1,
                )
            options.append((item.var, val))
        per_assign.append(options)
    mask = 0
    for combo in itertools.product(*per_assign):
        succ = dict(env)
        succ.update(combo)
        try:
            mask |= 1 << space.index_of(succ)
        except SpaceError as exc:
            raise DslError(
                f"event {e.name!r} leaves the invariant at state {env!r}", e.line, 1
            ) from exc
    return mask


def load_file(path: str, cap: int = DEFAULT_STATE_CAP) -> Elaborated:
    with open(path, encoding="utf-8") as fh:
        return elaborate(parse(fh.read()), cap)
