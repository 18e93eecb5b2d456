"""Integer/boolean expression AST shared by predicates, actions and variants.

Values are plain ints, bools, or enumeration literals (strings).  Evaluation
is always against a full assignment of the declared variables, so every
operation is total or raises :class:`EvalError`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

Value = Union[int, bool, str]


class EvalError(Exception):
    """Unknown identifier or type mismatch during expression evaluation."""


@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class BoolLit:
    value: bool


@dataclass(frozen=True)
class Name:
    ident: str


@dataclass(frozen=True)
class Arith:
    op: str  # '+', '-', '*'
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Cmp:
    op: str  # '=', '!=', '<', '<=', '>', '>='
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Not:
    operand: "Expr"


@dataclass(frozen=True)
class And:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Or:
    left: "Expr"
    right: "Expr"


Expr = Union[IntLit, BoolLit, Name, Arith, Cmp, Not, And, Or]

TRUE = BoolLit(True)
FALSE = BoolLit(False)


def _is_int(v: Value) -> bool:
    return type(v) is int


def eval_expr(node: Expr, env: dict, constants: frozenset = frozenset()) -> Value:
    """Evaluate ``node`` under ``env``; ``constants`` are enum literals."""
    if isinstance(node, IntLit):
        return node.value
    if isinstance(node, BoolLit):
        return node.value
    if isinstance(node, Name):
        if node.ident in env:
            return env[node.ident]
        if node.ident in constants:
            return node.ident
        raise EvalError(f"unknown identifier {node.ident!r}")
    if isinstance(node, Arith):
        lv = eval_expr(node.left, env, constants)
        rv = eval_expr(node.right, env, constants)
        if not (_is_int(lv) and _is_int(rv)):
            raise EvalError(f"arithmetic {node.op!r} needs integers, got {lv!r}, {rv!r}")
        if node.op == "+":
            return lv + rv
        if node.op == "-":
            return lv - rv
        if node.op == "*":
            return lv * rv
        raise EvalError(f"bad arithmetic operator {node.op!r}")
    if isinstance(node, Cmp):
        lv = eval_expr(node.left, env, constants)
        rv = eval_expr(node.right, env, constants)
        if node.op in ("=", "!="):
            if type(lv) is not type(rv):
                raise EvalError(f"cannot compare {lv!r} with {rv!r}")
            return (lv == rv) if node.op == "=" else (lv != rv)
        if not (_is_int(lv) and _is_int(rv)):
            raise EvalError(f"ordering {node.op!r} needs integers, got {lv!r}, {rv!r}")
        if node.op == "<":
            return lv < rv
        if node.op == "<=":
            return lv <= rv
        if node.op == ">":
            return lv > rv
        if node.op == ">=":
            return lv >= rv
        raise EvalError(f"bad comparison operator {node.op!r}")
    if isinstance(node, Not):
        v = eval_expr(node.operand, env, constants)
        if not isinstance(v, bool):
            raise EvalError(f"'not' needs a boolean, got {v!r}")
        return not v
    if isinstance(node, And):
        lv = eval_expr(node.left, env, constants)
        if not isinstance(lv, bool):
            raise EvalError(f"'and' needs booleans, got {lv!r}")
        return lv and eval_bool(node.right, env, constants)
    if isinstance(node, Or):
        lv = eval_expr(node.left, env, constants)
        if not isinstance(lv, bool):
            raise EvalError(f"'or' needs booleans, got {lv!r}")
        return lv or eval_bool(node.right, env, constants)
    raise EvalError(f"bad expression node {node!r}")


def eval_bool(node: Expr, env: dict, constants: frozenset = frozenset()) -> bool:
    v = eval_expr(node, env, constants)
    if not isinstance(v, bool):
        raise EvalError(f"expected a boolean expression, got {v!r}")
    return v


_PREC = {Or: 1, And: 2, Not: 3, Cmp: 4, Arith: 5}


def to_text(node: Expr) -> str:
    """Render an expression back to concrete syntax (parse/print round-trips)."""

    def render(n: Expr, parent_prec: int) -> str:
        if isinstance(n, IntLit):
            return str(n.value)
        if isinstance(n, BoolLit):
            return "true" if n.value else "false"
        if isinstance(n, Name):
            return n.ident
        if isinstance(n, Not):
            s = "not " + render(n.operand, _PREC[Not])
            prec = _PREC[Not]
        elif isinstance(n, And):
            s = render(n.left, _PREC[And]) + " and " + render(n.right, _PREC[And] + 1)
            prec = _PREC[And]
        elif isinstance(n, Or):
            s = render(n.left, _PREC[Or]) + " or " + render(n.right, _PREC[Or] + 1)
            prec = _PREC[Or]
        elif isinstance(n, Cmp):
            s = render(n.left, _PREC[Cmp] + 1) + f" {n.op} " + render(n.right, _PREC[Cmp] + 1)
            prec = _PREC[Cmp]
        elif isinstance(n, Arith):
            # '+'/'-' associate left; '*' binds tighter
            lp = 5 if n.op in "+-" else 6
            s = render(n.left, lp) + f" {n.op} " + render(n.right, lp + 1)
            prec = lp
        else:
            raise EvalError(f"bad expression node {n!r}")
        return f"({s})" if prec < parent_prec else s

    return render(node, 0)
