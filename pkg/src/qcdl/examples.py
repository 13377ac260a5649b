"""Built-in example circuits: the small teaching circuits, the parity oracle,
a binary-welded-tree diffusion step, and a ripple-carry adder.

Each example is registered with a parameter schema so the CLI and service can
list and build them uniformly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import builder, classical, qdata, registry, transforms
from .builder import BuildContext, QubitRef
from .ir import Circuit, neg, pos


# ---------------------------------------------------------------------------
# small teaching circuits

def _mycirc_gates(ctx: BuildContext, a: QubitRef, b: QubitRef) -> None:
    builder.hadamard(ctx, a)
    builder.hadamard(ctx, b)
    builder.controlled_not(ctx, a, b)


def mycirc() -> Circuit:
    """Two hadamards and a controlled-not."""
    ctx = builder.new_context()
    a = builder.input_qubit(ctx)
    b = builder.input_qubit(ctx)
    _mycirc_gates(ctx, a, b)
    return builder.finalize(ctx, [a, b])


def mycirc2() -> Circuit:
    """mycirc twice (arguments swapped the second time), the whole block
    controlled by a third qubit."""
    ctx = builder.new_context()
    a = builder.input_qubit(ctx)
    b = builder.input_qubit(ctx)
    c = builder.input_qubit(ctx)

    def block():
        _mycirc_gates(ctx, a, b)
        _mycirc_gates(ctx, b, a)

    builder.with_controls(ctx, [c], block)
    return builder.finalize(ctx, [a, b, c])


def mycirc3() -> Circuit:
    """Doubly-controlled hadamard built with a scoped ancilla."""
    ctx = builder.new_context()
    a = builder.input_qubit(ctx)
    b = builder.input_qubit(ctx)
    c = builder.input_qubit(ctx)

    def body(x: QubitRef):
        builder.qnot(ctx, x, controls=[a, b])
        builder.hadamard(ctx, c, controls=[x])
        builder.qnot(ctx, x, controls=[a, b])

    builder.with_ancilla(ctx, body)
    return builder.finalize(ctx, [a, b, c])


def timestep() -> Circuit:
    """mycirc, a Toffoli, then mycirc undone — the compute/act/uncompute
    sandwich, so the net effect on (a, b) is identity."""
    ctx = builder.new_context()
    a = builder.input_qubit(ctx)
    b = builder.input_qubit(ctx)
    c = builder.input_qubit(ctx)
    builder.with_computed(
        ctx,
        lambda: _mycirc_gates(ctx, a, b),
        lambda _: builder.qnot(ctx, c, controls=[a, b]),
    )
    return builder.finalize(ctx, [a, b, c])


def timestep2() -> Circuit:
    """timestep over the binary gate set."""
    return transforms.decompose(timestep(), transforms.DecomposeTarget.BINARY)


# ---------------------------------------------------------------------------
# parity oracle

def parity(n: int) -> classical.ClassicalFunc:
    """n-ary xor as a right fold; n = 1 degenerates to the bare variable."""
    if n < 1:
        raise ValueError("parity needs at least one input")
    expr: classical.ClassicalExpr = classical.Var(n - 1)
    for i in range(n - 2, -1, -1):
        expr = classical.Xor(classical.Var(i), expr)
    return classical.ClassicalFunc(n, (expr,))


def parity_lifted(n: int) -> Circuit:
    """The parity oracle as a bare lifted circuit: scratch ancillas stay live
    (inputs first, then scratch, result wire last)."""
    ctx = builder.new_context()
    ins = [builder.input_qubit(ctx) for _ in range(n)]
    classical.lift(ctx, parity(n), ins)
    return builder.finalize(ctx, [QubitRef(w) for w in ctx.live])


def parity_reversible(n: int) -> Circuit:
    """(x, y) -> (x, y xor parity(x)) with all scratch uncomputed."""
    ctx = builder.new_context()
    ins = [builder.input_qubit(ctx) for _ in range(n)]
    target = builder.input_qubit(ctx)
    classical.classical_to_reversible(ctx, parity(n), ins, [target])
    return builder.finalize(ctx, ins + [target])


def oracle_lifted(expr: classical.ClassicalExpr, n: int | None = None) -> Circuit:
    f = _func_for(expr, n)
    ctx = builder.new_context()
    ins = [builder.input_qubit(ctx) for _ in range(f.arity_in)]
    classical.lift(ctx, f, ins)
    return builder.finalize(ctx, [QubitRef(w) for w in ctx.live])


def oracle_reversible(expr: classical.ClassicalExpr, n: int | None = None) -> Circuit:
    f = _func_for(expr, n)
    ctx = builder.new_context()
    ins = [builder.input_qubit(ctx) for _ in range(f.arity_in)]
    target = builder.input_qubit(ctx)
    classical.classical_to_reversible(ctx, f, ins, [target])
    return builder.finalize(ctx, ins + [target])


def _func_for(expr: classical.ClassicalExpr, n: int | None) -> classical.ClassicalFunc:
    arity = classical.max_var(expr) + 1 if n is None else n
    return classical.ClassicalFunc(arity, (expr,))


# ---------------------------------------------------------------------------
# binary-welded-tree diffusion step

# control polarities as read off the published figure (low resolution, so
# kept editable in one place): filled dots on a-wires, empty on b-wires and
# on the conjugating not of r; the rotation's own control on r is filled
BWT_POLARITY = {"a": True, "b": False, "r_conj": False, "r_rot": True}


def bwt_diffusion(n: int, t: float = 1.0) -> Circuit:
    """Diffusion step over 2n wire pairs (a_i, b_i) plus a root indicator r.

    W entangles each pair; the forward not-chain folds the pair pattern into
    a scratch qubit; the phase rotation exp(-iZt) acts on the scratch wire,
    conjugated by a not on the r condition; the chain and the pairing are
    then undone in mirror order.  The whole circuit is a palindrome, so its
    reversal equals the circuit with t negated.
    """
    if n < 1:
        raise ValueError("bwt_diffusion needs n >= 1")
    ctx = builder.new_context()
    pairs = [(builder.input_qubit(ctx), builder.input_qubit(ctx))
             for _ in range(2 * n)]
    r = builder.input_qubit(ctx)
    sign_a = pos if BWT_POLARITY["a"] else neg
    sign_b = pos if BWT_POLARITY["b"] else neg
    sign_rc = pos if BWT_POLARITY["r_conj"] else neg
    sign_rr = pos if BWT_POLARITY["r_rot"] else neg

    for a, b in pairs:
        builder.gate(ctx, "W", [a, b])

    def body(anc: QubitRef):
        for a, b in pairs:
            builder.qnot(ctx, anc, controls=[sign_a(a), sign_b(b)])
        builder.qnot(ctx, anc, controls=[sign_rc(r)])
        builder.gate(ctx, "exp(-iZt)", [anc], params=[t], controls=[sign_rr(r)])
        builder.qnot(ctx, anc, controls=[sign_rc(r)])
        for a, b in reversed(pairs):
            builder.qnot(ctx, anc, controls=[sign_a(a), sign_b(b)])

    builder.with_ancilla(ctx, body)
    for a, b in reversed(pairs):
        builder.gate(ctx, "W_inv", [a, b])
    return builder.finalize(ctx, [w for p in pairs for w in p] + [r])


def register_w() -> None:
    """Register the W gate and its adjoint: identity on |00> and |11>,
    hadamard-like mixing on the odd-parity subspace.  The matrix is real
    symmetric, so W_inv shares it; the two names exist so circuits display
    the forward and reverse passes distinctly."""
    s = 1.0 / math.sqrt(2.0)
    w = np.array([[1, 0, 0, 0],
                  [0, s, s, 0],
                  [0, s, -s, 0],
                  [0, 0, 0, 1]], dtype=complex)
    registry.register_gate("W", 2, w, inverse=registry.InverseNamed("W_inv"))
    registry.register_gate("W_inv", 2, w, inverse=registry.InverseNamed("W"))


# ---------------------------------------------------------------------------
# ripple-carry adder

def adder(l: int) -> Circuit:
    """In-place addition over two little-endian registers:
    (a, b) -> (a, a + b mod 2^l), one scratch carry wire.

    Majority/unmajority construction: the forward chain leaves the running
    carry on the a wires, the backward chain restores a and writes the sum
    into b.  No carry-out wire, so the sum is modular.
    """
    if l < 1:
        raise ValueError("adder needs l >= 1")
    ctx = builder.new_context()
    a = qdata.QDInt(tuple(builder.input_qubit(ctx) for _ in range(l)))
    b = qdata.QDInt(tuple(builder.input_qubit(ctx) for _ in range(l)))

    def maj(x, y, z):
        builder.qnot(ctx, y, controls=[z])
        builder.qnot(ctx, x, controls=[z])
        builder.gate(ctx, "not", [z], controls=[pos(x), pos(y)])

    def uma(x, y, z):
        builder.gate(ctx, "not", [z], controls=[pos(x), pos(y)])
        builder.qnot(ctx, x, controls=[z])
        builder.qnot(ctx, y, controls=[x])

    def body(carry: QubitRef):
        triples = []
        prev = carry
        for i in range(l):
            triples.append((prev, b.qubits[i], a.qubits[i]))
            prev = a.qubits[i]
        for x, y, z in triples:
            maj(x, y, z)
        for x, y, z in reversed(triples):
            uma(x, y, z)

    builder.with_ancilla(ctx, body)
    return builder.finalize(ctx, list(a.qubits) + list(b.qubits))


# ---------------------------------------------------------------------------
# registry

@dataclass(frozen=True)
class ExampleSpec:
    name: str
    description: str
    params: tuple[str, ...]  # accepted parameter/flag names
    build: Callable[[dict], Circuit] = field(compare=False)


def _param(p: dict, key: str, default, cast):
    # explicit zero must reach the generator's own validation, so no `or`
    value = p.get(key)
    return default if value is None else cast(value)


def _build_parity(p: dict) -> Circuit:
    n = _param(p, "n", 4, int)
    if p.get("reversible") and p.get("oracle_only"):
        raise ValueError("choose one of --reversible / --oracle-only")
    if p.get("reversible"):
        return parity_reversible(n)
    return parity_lifted(n)


def _build_oracle(p: dict) -> Circuit:
    text = p.get("expr")
    if not text:
        raise ValueError("the oracle example needs --expr")
    expr = classical.parse_expr(text)
    n = _param(p, "n", None, int)
    if p.get("reversible") and p.get("oracle_only"):
        raise ValueError("choose one of --reversible / --oracle-only")
    if p.get("reversible"):
        return oracle_reversible(expr, n)
    return oracle_lifted(expr, n)


EXAMPLES: dict[str, ExampleSpec] = {}


def _register(spec: ExampleSpec) -> None:
    EXAMPLES[spec.name] = spec


_register(ExampleSpec("mycirc", "two hadamards and a controlled-not", (),
                      lambda p: mycirc()))
_register(ExampleSpec("mycirc2", "mycirc twice under a block control", (),
                      lambda p: mycirc2()))
_register(ExampleSpec("mycirc3", "controlled hadamard via a scoped ancilla", (),
                      lambda p: mycirc3()))
_register(ExampleSpec("timestep", "compute/act/uncompute sandwich", (),
                      lambda p: timestep()))
_register(ExampleSpec("timestep2", "timestep over the binary gate set", (),
                      lambda p: timestep2()))
_register(ExampleSpec("parity", "n-ary xor oracle (lifted; --reversible for the embedding)",
                      ("n", "reversible", "oracle_only"), _build_parity))
_register(ExampleSpec("oracle", "lift an --expr boolean expression",
                      ("expr", "n", "reversible", "oracle_only"), _build_oracle))
_register(ExampleSpec("bwt-diffusion", "welded-tree diffusion step (W gates, 2n pairs)",
                      ("n", "t"),
                      lambda p: bwt_diffusion(_param(p, "n", 1, int),
                                              _param(p, "t", 1.0, float))))
_register(ExampleSpec("adder", "in-place ripple-carry adder over two l-bit registers",
                      ("l",),
                      lambda p: adder(_param(p, "l", 3, int))))


def build_example(name: str, params: dict | None = None) -> Circuit:
    spec = EXAMPLES.get(name)
    if spec is None:
        raise KeyError(f"unknown example {name!r}")
    return spec.build(params or {})
