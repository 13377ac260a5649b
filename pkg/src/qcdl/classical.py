"""Boolean expression IR and its compilation to reversible circuits.

A classical function is a list of boolean expressions over input variables.
`lift` turns it into gates acting on quantum wires: one fresh ancilla per
operator node, written by {not, CNOT, signed Toffoli} only, so the result
stays classically simulable.  `classical_to_reversible` wraps lift in a
compute/copy/uncompute sandwich giving the standard reversible embedding
(x, y) -> (x, y XOR f(x)) with every scratch wire asserted back to |0>.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

from . import builder
from .builder import BuildContext, QubitRef
from .ir import neg, pos


class ClassicalError(Exception):
    pass


# ---------------------------------------------------------------------------
# expressions

@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Const:
    value: bool


@dataclass(frozen=True)
class Not:
    child: "ClassicalExpr"


@dataclass(frozen=True)
class And:
    left: "ClassicalExpr"
    right: "ClassicalExpr"


@dataclass(frozen=True)
class Or:
    left: "ClassicalExpr"
    right: "ClassicalExpr"


@dataclass(frozen=True)
class Xor:
    left: "ClassicalExpr"
    right: "ClassicalExpr"


ClassicalExpr = Union[Var, Const, Not, And, Or, Xor]


def _children(e: ClassicalExpr) -> tuple:
    if isinstance(e, Not):
        return (e.child,)
    if isinstance(e, (And, Or, Xor)):
        return (e.left, e.right)
    return ()


def max_var(e: ClassicalExpr) -> int:
    """Largest variable index used, -1 if none."""
    if isinstance(e, Var):
        return e.index
    return max((max_var(c) for c in _children(e)), default=-1)


def operator_nodes(e: ClassicalExpr) -> int:
    """Count of non-Var nodes — the ancilla budget of lift."""
    own = 0 if isinstance(e, Var) else 1
    return own + sum(operator_nodes(c) for c in _children(e))


@dataclass(frozen=True)
class ClassicalFunc:
    """n-input, m-output boolean function."""

    arity_in: int
    outputs: tuple[ClassicalExpr, ...]

    def __post_init__(self):
        object.__setattr__(self, "outputs", tuple(self.outputs))
        if self.arity_in < 0:
            raise ClassicalError("negative input arity")
        for e in self.outputs:
            if max_var(e) >= self.arity_in:
                raise ClassicalError(
                    f"variable v{max_var(e)} out of range for arity {self.arity_in}")


# ---------------------------------------------------------------------------
# evaluation

def eval_expr(e: ClassicalExpr, bits: Sequence[bool]) -> bool:
    if isinstance(e, Var):
        return bool(bits[e.index])
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Not):
        return not eval_expr(e.child, bits)
    if isinstance(e, And):
        return eval_expr(e.left, bits) and eval_expr(e.right, bits)
    if isinstance(e, Or):
        return eval_expr(e.left, bits) or eval_expr(e.right, bits)
    if isinstance(e, Xor):
        return eval_expr(e.left, bits) != eval_expr(e.right, bits)
    raise ClassicalError(f"not an expression: {e!r}")


def evaluate(f: ClassicalFunc, input) -> str:
    """Evaluate on a bit string (or boolean sequence); returns a bit string."""
    bits = [c == "1" for c in input] if isinstance(input, str) else [bool(b) for b in input]
    if isinstance(input, str) and set(input) - {"0", "1"}:
        raise ClassicalError("input must consist of 0/1 characters")
    if len(bits) != f.arity_in:
        raise ClassicalError(f"expected {f.arity_in} input bits, got {len(bits)}")
    return "".join("1" if eval_expr(e, bits) else "0" for e in f.outputs)


# ---------------------------------------------------------------------------
# circuit lifting

def lift(ctx: BuildContext, f: ClassicalFunc, inputs: Sequence[QubitRef]) -> list[QubitRef]:
    """Compile f onto quantum wires.

    Var leaves reuse the input wires directly; every operator node allocates
    one fresh |0> ancilla and writes its value:

      Xor   CNOT from each child
      And   Toffoli on positive controls
      Or    Toffoli on negative controls, then not (De Morgan)
      Not   CNOT from the child, then not
      Const not if the constant is True

    Returns the root wires, one per output.  Inputs are left unchanged.
    """
    ins = list(inputs)
    if len(ins) != f.arity_in:
        raise ClassicalError(f"expected {f.arity_in} input wires, got {len(ins)}")
    if len({r.wire for r in ins}) != len(ins):
        raise ClassicalError("input wires must be distinct")
    return [_lift_node(ctx, e, ins) for e in f.outputs]


def _lift_node(ctx: BuildContext, e: ClassicalExpr, ins: list[QubitRef]) -> QubitRef:
    if isinstance(e, Var):
        return ins[e.index]
    if isinstance(e, Const):
        w = builder.qinit_bool(ctx, False)
        if e.value:
            builder.qnot(ctx, w)
        return w
    if isinstance(e, Not):
        c = _lift_node(ctx, e.child, ins)
        w = builder.qinit_bool(ctx, False)
        builder.qnot(ctx, w, controls=[c])
        builder.qnot(ctx, w)
        return w
    l = _lift_node(ctx, e.left, ins)
    r = _lift_node(ctx, e.right, ins)
    w = builder.qinit_bool(ctx, False)
    if isinstance(e, Xor):
        if l.wire == r.wire:
            return w  # x xor x = 0, the fresh wire already holds it
        builder.qnot(ctx, w, controls=[l])
        builder.qnot(ctx, w, controls=[r])
    elif isinstance(e, And):
        if l.wire == r.wire:
            builder.qnot(ctx, w, controls=[l])  # x and x = x
        else:
            builder.gate(ctx, "not", [w], controls=[pos(l), pos(r)])
    elif isinstance(e, Or):
        if l.wire == r.wire:
            builder.qnot(ctx, w, controls=[l])
        else:
            builder.gate(ctx, "not", [w], controls=[neg(l), neg(r)])
            builder.qnot(ctx, w)
    else:
        raise ClassicalError(f"not an expression: {e!r}")
    return w


def classical_to_reversible(ctx: BuildContext, f: ClassicalFunc,
                            x: Sequence[QubitRef], y: Sequence[QubitRef]) -> None:
    """Emit the reversible embedding (x, y) -> (x, y XOR f(x)): lift f, CNOT
    each result into the matching y wire, then uncompute the lift so only the
    inputs and targets survive."""
    xs, ys = list(x), list(y)
    if len(ys) != len(f.outputs):
        raise ClassicalError(f"expected {len(f.outputs)} target wires, got {len(ys)}")
    overlap = {r.wire for r in xs} & {r.wire for r in ys}
    if overlap:
        raise ClassicalError(f"inputs and targets share wire {min(overlap)}")

    def compute():
        return lift(ctx, f, xs)

    def use(outs):
        for o, yi in zip(outs, ys):
            builder.qnot(ctx, yi, controls=[o])

    builder.with_computed(ctx, compute, use)


# ---------------------------------------------------------------------------
# textual expression format

_ATOMS = {"0": Const(False), "1": Const(True),
          "false": Const(False), "true": Const(True)}
_OPS = {"not": 1, "and": 2, "or": 2, "xor": 2}


def parse_expr(text: str) -> ClassicalExpr:
    """Prefix notation: `v3`, `0`, `1`, `true`, `false`, `(not e)`,
    `(and e e)`, `(or e e)`, `(xor e e)`."""
    tokens = text.replace("(", " ( ").replace(")", " ) ").split()
    if not tokens:
        raise ClassicalError("empty expression")
    expr, rest = _parse_tokens(tokens)
    if rest:
        raise ClassicalError(f"trailing input after expression: {' '.join(rest)}")
    return expr


def _parse_tokens(tokens: list[str]) -> tuple[ClassicalExpr, list[str]]:
    if not tokens:
        raise ClassicalError("unexpected end of expression")
    head, rest = tokens[0], tokens[1:]
    if head == "(":
        if not rest:
            raise ClassicalError("unexpected end of expression")
        op, rest = rest[0], rest[1:]
        arity = _OPS.get(op)
        if arity is None:
            raise ClassicalError(f"unknown operator {op!r}")
        args = []
        for _ in range(arity):
            arg, rest = _parse_tokens(rest)
            args.append(arg)
        if not rest or rest[0] != ")":
            raise ClassicalError(f"expected ')' to close ({op} ...)")
        rest = rest[1:]
        if op == "not":
            return Not(args[0]), rest
        cls = {"and": And, "or": Or, "xor": Xor}[op]
        return cls(args[0], args[1]), rest
    if head == ")":
        raise ClassicalError("unexpected ')'")
    if head in _ATOMS:
        return _ATOMS[head], rest
    if head.startswith("v") and head[1:].isdigit():
        return Var(int(head[1:])), rest
    raise ClassicalError(f"unrecognized token {head!r}")


def render_expr(e: ClassicalExpr) -> str:
    if isinstance(e, Var):
        return f"v{e.index}"
    if isinstance(e, Const):
        return "1" if e.value else "0"
    if isinstance(e, Not):
        return f"(not {render_expr(e.child)})"
    name = {And: "and", Or: "or", Xor: "xor"}[type(e)]
    return f"({name} {render_expr(e.left)} {render_expr(e.right)})"
