"""Tiny arithmetic expression language for boundary data in config files.

Grammar: numeric literals, one free variable, ``pi``, the functions
``cos sin exp log abs sqrt``, arithmetic ``+ - * /`` and powers written
either ``^`` or ``**``.  Compiled through the ``ast`` module against a
whitelist; anything outside the grammar raises ConfigurationError naming
the offending token.  Compiled callables are numpy-vectorized.
"""

from __future__ import annotations

import ast
from typing import Callable

import numpy as np

from .errors import ConfigurationError

_FUNCS = {
    "cos": np.cos,
    "sin": np.sin,
    "exp": np.exp,
    "log": np.log,
    "abs": np.abs,
    "sqrt": np.sqrt,
}

_ALLOWED_BIN = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow, ast.BitXor)
_ALLOWED_UNARY = (ast.UAdd, ast.USub)


def _compile_node(node: ast.AST, var: str) -> Callable:
    if isinstance(node, ast.Expression):
        return _compile_node(node.body, var)
    if isinstance(node, ast.Constant):
        if not isinstance(node.value, (int, float)):
            raise ConfigurationError(
                f"expression literal {node.value!r} is not numeric")
        val = float(node.value)
        return lambda x: val
    if isinstance(node, ast.Name):
        if node.id == var:
            return lambda x: x
        if node.id == "pi":
            return lambda x: np.pi
        raise ConfigurationError(
            f"unknown name {node.id!r} in expression (variable is {var!r})")
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, _ALLOWED_UNARY):
        inner = _compile_node(node.operand, var)
        if isinstance(node.op, ast.USub):
            return lambda x: -inner(x)
        return inner
    if isinstance(node, ast.BinOp) and isinstance(node.op, _ALLOWED_BIN):
        left = _compile_node(node.left, var)
        right = _compile_node(node.right, var)
        op = node.op
        if isinstance(op, ast.Add):
            return lambda x: left(x) + right(x)
        if isinstance(op, ast.Sub):
            return lambda x: left(x) - right(x)
        if isinstance(op, ast.Mult):
            return lambda x: left(x) * right(x)
        if isinstance(op, ast.Div):
            return lambda x: left(x) / right(x)
        # ^ and ** both mean power
        return lambda x: left(x) ** right(x)
    if isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCS:
            name = getattr(node.func, "id", "<expr>")
            raise ConfigurationError(
                f"unknown function {name!r}; allowed: {sorted(_FUNCS)}")
        if len(node.args) != 1 or node.keywords:
            raise ConfigurationError(
                f"function {node.func.id!r} takes exactly one argument")
        inner = _compile_node(node.args[0], var)
        fn = _FUNCS[node.func.id]
        return lambda x: fn(inner(x))
    raise ConfigurationError(
        f"unsupported syntax in expression: {ast.dump(node)[:80]}")


def parse_expression(text: str, var: str = "theta") -> Callable:
    """Compile ``text`` into a vectorized callable of one variable.

    ``theta`` may also be spelled ``t`` or the given ``var`` name; the
    variable of a radius expression is conventionally ``a``.
    """
    if not isinstance(text, str) or not text.strip():
        raise ConfigurationError(f"expression must be a nonempty string, got {text!r}")
    # '^' means power with mathematical precedence, so rewrite before the
    # parser can give it Python's (lower) xor precedence
    source = text.strip().replace("^", "**")
    try:
        tree = ast.parse(source, mode="eval")
    except SyntaxError as exc:
        raise ConfigurationError(f"cannot parse expression {text!r}: {exc.msg}") from None
    # accept 'theta' and 't' interchangeably for angle expressions
    aliases = {var}
    if var == "theta":
        aliases.add("t")
    for node in ast.walk(tree):
        if isinstance(node, ast.Name) and node.id in aliases:
            node.id = var
    fn = _compile_node(tree, var)

    def call(x):
        out = fn(np.asarray(x, dtype=float))
        return np.broadcast_to(np.asarray(out, dtype=float), np.shape(x)).copy() \
            if np.ndim(out) == 0 and np.ndim(x) > 0 else out

    call.source = text  # type: ignore[attr-defined]
    return call
