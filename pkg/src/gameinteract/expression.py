"""Expression trees over player variables.

Leaves reference variables by index; internal nodes are one of ``add``,
``mul``, ``and``, ``or`` (any arity >= 2) or ``pow`` (exactly two
arguments, base then exponent). ``and``/``or`` treat nonzero as true and
return 0.0 or 1.0. Powers follow the ``0 ** 0 == 1`` convention.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import FormatError

OPS = ("add", "mul", "and", "or", "pow")


@dataclass(frozen=True)
class Var:
    index: int

    def to_json(self) -> dict:
        return {"var": self.index}

    def variables(self) -> set[int]:
        return {self.index}

    def __str__(self) -> str:
        return f"x{self.index}"


@dataclass(frozen=True)
class Node:
    op: str
    args: tuple

    def __post_init__(self):
        if self.op not in OPS:
            raise FormatError(f"unknown operator {self.op!r}")
        if self.op == "pow" and len(self.args) != 2:
            raise FormatError(f"pow takes exactly 2 arguments, got {len(self.args)}")
        if len(self.args) < 2:
            raise FormatError(f"{self.op} needs at least 2 arguments, got {len(self.args)}")

    def to_json(self) -> dict:
        return {"op": self.op, "args": [a.to_json() for a in self.args]}

    def variables(self) -> set[int]:
        out: set[int] = set()
        for a in self.args:
            out |= a.variables()
        return out

    def __str__(self) -> str:
        sym = {"add": " + ", "mul": "*", "and": " & ", "or": " | ", "pow": "^"}[self.op]
        return "(" + sym.join(str(a) for a in self.args) + ")"


def var(i: int) -> Var:
    return Var(int(i))


def add(*args) -> Node:
    return Node("add", tuple(args))


def mul(*args) -> Node:
    return Node("mul", tuple(args))


def and_(*args) -> Node:
    return Node("and", tuple(args))


def or_(*args) -> Node:
    return Node("or", tuple(args))


def pow_(base, exponent) -> Node:
    return Node("pow", (base, exponent))


def parse(obj) -> Var | Node:
    """Build a tree from its JSON form (``{"var": i}`` or ``{"op", "args"}``)."""
    if not isinstance(obj, dict):
        raise FormatError(f"expression node must be an object, got {type(obj).__name__}")
    if "var" in obj:
        if set(obj) != {"var"}:
            raise FormatError(f"variable leaf has extra keys: {sorted(set(obj) - {'var'})}")
        idx = obj["var"]
        if not isinstance(idx, int) or isinstance(idx, bool) or idx < 0:
            raise FormatError(f"variable index must be a non-negative int, got {idx!r}")
        return Var(idx)
    if "op" not in obj or "args" not in obj:
        raise FormatError("operator node needs 'op' and 'args'")
    if not isinstance(obj["args"], list):
        raise FormatError("'args' must be a list")
    return Node(obj["op"], tuple(parse(a) for a in obj["args"]))


def evaluate(tree: Var | Node, x: np.ndarray) -> np.ndarray:
    """Evaluate on a (batch, n) matrix of variable values."""
    if isinstance(tree, Var):
        return x[:, tree.index]
    vals = [evaluate(a, x) for a in tree.args]
    op = tree.op
    if op == "add":
        out = vals[0].copy()
        for v in vals[1:]:
            out += v
        return out
    if op == "mul":
        out = vals[0].copy()
        for v in vals[1:]:
            out *= v
        return out
    if op == "and":
        out = vals[0] != 0
        for v in vals[1:]:
            out &= v != 0
        return out.astype(float)
    if op == "or":
        out = vals[0] != 0
        for v in vals[1:]:
            out |= v != 0
        return out.astype(float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        return np.power(vals[0], vals[1])
