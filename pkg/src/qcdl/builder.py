"""Procedural circuit construction: wires held in Python variables, gates
emitted one at a time into a mutable build context.

Typical use::

    ctx = new_context()
    a = input_qubit(ctx)
    b = input_qubit(ctx)
    hadamard(ctx, a)
    hadamard(ctx, b)
    controlled_not(ctx, a, b)      # not on a, controlled by b
    circ = finalize(ctx, [a, b])

Block operators (`with_controls`, `with_ancilla`, `with_computed`, `box`) take
the body as a callable so entry/exit bookkeeping brackets it.  A context with
an `Interactive` backend additionally feeds every emitted gate to a simulator
on demand, which is what makes `dynamic_lift` possible: a measured bit's
concrete value can steer the rest of generation.

Every emit is validated incrementally (liveness, wire kinds, no duplicate
wires per gate), so errors surface at the offending call, not at finalize.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from . import ir, sim, transforms
from .ir import (Call, ClassicalGate, Circuit, Comment, Discard, Gate, Init,
                 Measure, SignedControl, SubroutineDef, TermAssert, Unitary,
                 WireKind)


class BuildError(Exception):
    pass


@dataclass(frozen=True)
class QubitRef:
    """Handle to a live quantum wire."""
    wire: int


@dataclass(frozen=True)
class BitRef:
    """Handle to a live classical wire."""
    wire: int


class RecordOnly:
    """Backend that only records gates (the default)."""


class Interactive:
    """Backend that owns a simulator session; enables dynamic_lift.

    Contexts on this backend take no circuit inputs: every wire must be
    created by an init so the simulator always knows its state.
    """

    def __init__(self, seed: int = 0, session: sim.Session | None = None, **kwargs):
        self.seed = seed
        self.session = session if session is not None else sim.interactive_session(seed, **kwargs)


class BuildContext:
    def __init__(self, backend: RecordOnly | Interactive | None = None):
        self.backend = backend if backend is not None else RecordOnly()
        self.next_id = 0
        self.live: dict[int, WireKind] = {}
        self.inputs: list[tuple[int, WireKind]] = []
        self.gates: list[Gate] = []
        self.control_stack: list[tuple[SignedControl, ...]] = []
        self.subroutines: dict[str, SubroutineDef] = {}
        self._boxed: dict[str, Callable] = {}
        self._flushed = 0
        self._lift_count = 0

    def fresh(self) -> int:
        w = self.next_id
        self.next_id += 1
        return w


def new_context(backend: RecordOnly | Interactive | None = None) -> BuildContext:
    return BuildContext(backend)


# ---------------------------------------------------------------------------
# argument normalization

def _wire_of(x) -> int:
    if isinstance(x, (QubitRef, BitRef)):
        return x.wire
    if isinstance(x, int) and not isinstance(x, bool):
        return x
    raise BuildError(f"not a wire reference: {x!r}")


def _as_control(c) -> SignedControl:
    if isinstance(c, SignedControl):
        return c
    return SignedControl(_wire_of(c))


def _ref_for(ctx: BuildContext, wire: int) -> QubitRef | BitRef:
    return QubitRef(wire) if ctx.live[wire] == WireKind.QUANTUM else BitRef(wire)


# ---------------------------------------------------------------------------
# emission core

def _active_controls(ctx: BuildContext) -> tuple[SignedControl, ...]:
    return tuple(c for frame in ctx.control_stack for c in frame)


def _require_live(ctx: BuildContext, wire: int, kind: WireKind | None = None) -> None:
    have = ctx.live.get(wire)
    if have is None:
        raise BuildError(f"wire {wire} is not live")
    if kind is not None and have != kind:
        raise BuildError(f"wire {wire} is {have.value}, expected {kind.value}")


def _check_gate(ctx: BuildContext, gate: Gate) -> None:
    if isinstance(gate, Unitary):
        # checked before the duplicate-wire test: merging a block control into
        # the gate would otherwise mask this with a less helpful message
        blocked = {c.wire for c in _active_controls(ctx)} & set(gate.targets)
        if blocked:
            raise BuildError(f"wire {min(blocked)} is a control of the enclosing "
                             "block and cannot be a target inside it")
    wires = ir.gate_wires(gate)
    if len(set(wires)) != len(wires):
        raise BuildError(f"duplicate wire in one gate: {wires}")
    if isinstance(gate, Unitary):
        for w in gate.targets:
            _require_live(ctx, w, WireKind.QUANTUM)
        for c in gate.controls:
            _require_live(ctx, c.wire, WireKind.QUANTUM)
        for c in gate.classical_controls:
            _require_live(ctx, c.wire, WireKind.CLASSICAL)
    elif isinstance(gate, Init):
        if gate.wire in ctx.live:
            raise BuildError(f"wire {gate.wire} is already live")
    elif isinstance(gate, (TermAssert,)):
        _require_live(ctx, gate.wire, gate.kind)
    elif isinstance(gate, Discard):
        _require_live(ctx, gate.wire)
    elif isinstance(gate, Measure):
        _require_live(ctx, gate.wire, WireKind.QUANTUM)
    elif isinstance(gate, ClassicalGate):
        for w in gate.targets + gate.sources:
            _require_live(ctx, w, WireKind.CLASSICAL)
    elif isinstance(gate, Comment):
        for w, _ in gate.labels:
            _require_live(ctx, w)
    elif isinstance(gate, Call):
        for c in gate.controls:
            _require_live(ctx, c.wire)


def _apply_effects(ctx: BuildContext, gate: Gate) -> None:
    if isinstance(gate, Init):
        ctx.live[gate.wire] = gate.kind
    elif isinstance(gate, (TermAssert, Discard)):
        del ctx.live[gate.wire]
    elif isinstance(gate, Measure):
        ctx.live[gate.wire] = WireKind.CLASSICAL
    elif isinstance(gate, Call):
        sub = ctx.subroutines[gate.subroutine].circuit
        outs = set(gate.outputs)
        for w in gate.inputs:
            if w not in outs:
                del ctx.live[w]
        for w, (_, k) in zip(gate.outputs, sub.outputs):
            ctx.live[w] = k


def _emit(ctx: BuildContext, gate: Gate, decorate: bool = True) -> None:
    if decorate:
        extra = _active_controls(ctx)
        if extra:
            if isinstance(gate, Unitary):
                q = list(gate.controls)
                c = list(gate.classical_controls)
                for ec in extra:
                    _require_live(ctx, ec.wire)
                    if ctx.live[ec.wire] == WireKind.QUANTUM:
                        q.append(ec)
                    else:
                        c.append(ec)
                gate = Unitary(gate.name, gate.targets, gate.params, tuple(q), tuple(c))
            elif isinstance(gate, Call):
                gate = Call(gate.subroutine, gate.inputs, gate.outputs,
                            gate.controls + extra)
            elif isinstance(gate, Comment):
                pass
            else:
                raise BuildError(
                    f"{type(gate).__name__} is not controllable inside with_controls")
    _check_gate(ctx, gate)
    _apply_effects(ctx, gate)
    ctx.gates.append(gate)


def _flush(ctx: BuildContext) -> None:
    if isinstance(ctx.backend, Interactive) and ctx._flushed < len(ctx.gates):
        segment = ctx.gates[ctx._flushed:]
        ctx._flushed = len(ctx.gates)
        ctx.backend.session.run_gates(segment, ctx.subroutines)


# ---------------------------------------------------------------------------
# wire creation

def input_qubit(ctx: BuildContext) -> QubitRef:
    """Declare a quantum wire present at the circuit boundary."""
    return _input(ctx, WireKind.QUANTUM)


def input_bit(ctx: BuildContext) -> BitRef:
    return _input(ctx, WireKind.CLASSICAL)


def _input(ctx: BuildContext, kind: WireKind):
    if isinstance(ctx.backend, Interactive):
        raise BuildError("interactive contexts take no circuit inputs; "
                         "initialize wires with qinit_bool/cinit_bool instead")
    w = ctx.fresh()
    ctx.live[w] = kind
    ctx.inputs.append((w, kind))
    return QubitRef(w) if kind == WireKind.QUANTUM else BitRef(w)


def qinit_bool(ctx: BuildContext, value: bool) -> QubitRef:
    """Allocate a fresh qubit in |value>."""
    w = ctx.fresh()
    _emit(ctx, Init(w, WireKind.QUANTUM, bool(value)))
    return QubitRef(w)


def cinit_bool(ctx: BuildContext, value: bool) -> BitRef:
    w = ctx.fresh()
    _emit(ctx, Init(w, WireKind.CLASSICAL, bool(value)))
    return BitRef(w)


# ---------------------------------------------------------------------------
# gates

def gate(ctx: BuildContext, name: str, targets: Sequence, params: Sequence[float] = (),
         controls: Sequence = ()) -> None:
    """Emit a named unitary.  Unknown names are allowed (opaque gates); they
    only become a problem if something later needs a matrix or an inverse."""
    twires = tuple(_wire_of(t) for t in targets)
    ctrls = tuple(_as_control(c) for c in controls)
    quantum = tuple(c for c in ctrls if ctx.live.get(c.wire) == WireKind.QUANTUM)
    classical = tuple(c for c in ctrls if ctx.live.get(c.wire) == WireKind.CLASSICAL)
    if len(quantum) + len(classical) != len(ctrls):
        dead = [c.wire for c in ctrls if c.wire not in ctx.live]
        raise BuildError(f"control wire {dead[0]} is not live")
    _emit(ctx, Unitary(name, twires, tuple(float(p) for p in params),
                       quantum, classical))


def hadamard(ctx: BuildContext, q, controls: Sequence = ()) -> None:
    gate(ctx, "H", [q], controls=controls)


def qnot(ctx: BuildContext, q, controls: Sequence = ()) -> None:
    gate(ctx, "not", [q], controls=controls)


def controlled_not(ctx: BuildContext, target, control) -> None:
    """not on `target`, conditioned on `control`.  Target comes first."""
    qnot(ctx, target, controls=[control])


def classical_gate(ctx: BuildContext, name: str, target, sources: Sequence = ()) -> None:
    _emit(ctx, ClassicalGate(name, (_wire_of(target),),
                             tuple(_wire_of(s) for s in sources)))


def comment_with_label(ctx: BuildContext, text: str, wires: Sequence = (),
                       labels: Sequence[str] = ()) -> None:
    """Drop an annotation into the gate stream; labels name wires at this point."""
    ws = [_wire_of(w) for w in wires]
    if len(ws) != len(labels):
        raise BuildError(f"{len(ws)} wires but {len(labels)} labels")
    _emit(ctx, Comment(text, tuple(zip(ws, labels))))


def measure(ctx: BuildContext, q) -> BitRef:
    """Turn a qubit into a classical bit (same wire id, kind flips)."""
    if _active_controls(ctx):
        raise BuildError("Measure is not controllable inside with_controls")
    w = _wire_of(q)
    _emit(ctx, Measure(w))
    return BitRef(w)


def discard(ctx: BuildContext, x) -> None:
    if _active_controls(ctx):
        raise BuildError("Discard is not controllable inside with_controls")
    _emit(ctx, Discard(_wire_of(x)))


# ---------------------------------------------------------------------------
# block operators

def with_controls(ctx: BuildContext, controls: Sequence, body: Callable[[], object]):
    """Run `body`, attaching the given signed controls to every gate it emits.
    Gates that cannot carry controls (inits, terminations, measurements)
    are rejected while the block is active."""
    frame = tuple(_as_control(c) for c in controls)
    for c in frame:
        _require_live(ctx, c.wire)
    ctx.control_stack.append(frame)
    try:
        return body()
    finally:
        ctx.control_stack.pop()


def with_ancilla(ctx: BuildContext, body: Callable[[QubitRef], object]):
    """Scoped scratch qubit: born in |0>, handed to `body`, asserted back to
    |0> and removed afterwards.  The simulator checks the assertion."""
    w = ctx.fresh()
    _emit(ctx, Init(w, WireKind.QUANTUM, False))
    result = body(QubitRef(w))
    if w not in ctx.live:
        raise BuildError(f"ancilla {w} was terminated inside its own scope")
    _emit(ctx, TermAssert(w, WireKind.QUANTUM, False))
    return result


def with_ancilla_init(ctx: BuildContext, values: Sequence[bool],
                      body: Callable[[list[QubitRef]], object]):
    """Scoped ancilla register initialized to `values`; termination asserts
    the same values, innermost first."""
    refs = []
    for v in values:
        w = ctx.fresh()
        _emit(ctx, Init(w, WireKind.QUANTUM, bool(v)))
        refs.append(QubitRef(w))
    result = body(list(refs))
    for v, r in reversed(list(zip(values, refs))):
        if r.wire not in ctx.live:
            raise BuildError(f"ancilla {r.wire} was terminated inside its own scope")
        _emit(ctx, TermAssert(r.wire, WireKind.QUANTUM, bool(v)))
    return result


def with_computed(ctx: BuildContext, compute: Callable[[], object],
                  use: Callable[[object], object]):
    """compute; use; uncompute.

    Records the gates `compute` emits, runs `use` on its return value, then
    replays the recorded segment inverted, so every intermediate `compute`
    created is returned to its initial state and deallocated.  `compute`
    must stay reversible: no measurement, discard, or dynamic lifting.
    """
    mark = len(ctx.gates)
    lifts = ctx._lift_count
    intermediate = compute()
    if ctx._lift_count != lifts:
        raise BuildError("dynamic lifting inside a computed segment")
    segment = list(ctx.gates[mark:])
    result = use(intermediate)
    new_defs: dict[str, SubroutineDef] = {}
    try:
        inverse = transforms.reverse_gates(segment, ctx.subroutines, new_defs)
    except transforms.TransformError as e:
        raise BuildError(f"compute segment is not reversible: {e}")
    _merge_defs(ctx, new_defs)
    for g in inverse:
        _emit(ctx, g, decorate=False)
    return result


def _merge_defs(ctx: BuildContext, new_defs: dict[str, SubroutineDef]) -> None:
    for name, sub in new_defs.items():
        have = ctx.subroutines.get(name)
        if have is None:
            ctx.subroutines[name] = sub
        elif have.circuit != sub.circuit:
            raise BuildError(f'subroutine name "{name}" already bound to a different body')


# ---------------------------------------------------------------------------
# boxed subcircuits

def box(ctx: BuildContext, name: str, f: Callable, inputs: Sequence) -> list:
    """Generate `f`'s circuit once under `name` and emit a Call gate.

    `f(sub_ctx, refs)` receives a fresh context plus formal input refs
    matching the kinds of `inputs`, and returns the refs to expose as the
    subroutine's outputs.  Later boxes of the same name reuse the stored
    body; a different body under the same name is an error.  Controls from
    enclosing with_controls blocks attach to the Call gate itself.
    """
    refs = [inputs] if isinstance(inputs, (QubitRef, BitRef)) else list(inputs)
    in_ids = [_wire_of(r) for r in refs]
    for w in in_ids:
        _require_live(ctx, w)
    kinds = [ctx.live[w] for w in in_ids]

    existing = ctx.subroutines.get(name)
    if existing is None or ctx._boxed.get(name) is not f:
        generated = _generate_sub(ctx, name, f, kinds)
        if existing is None:
            ctx.subroutines[name] = generated
            ctx._boxed[name] = f
        elif existing.circuit != generated.circuit:
            raise BuildError(f'box "{name}" is already bound to a different body')
        else:
            ctx._boxed[name] = f
    sub = ctx.subroutines[name].circuit
    if tuple(k for _, k in sub.inputs) != tuple(kinds):
        raise BuildError(f'box "{name}" input kinds do not match its definition')

    sub_in = [w for w, _ in sub.inputs]
    out_ids = []
    for sw, _ in sub.outputs:
        if sw in sub_in:
            out_ids.append(in_ids[sub_in.index(sw)])
        else:
            out_ids.append(ctx.fresh())
    _emit(ctx, Call(name, tuple(in_ids), tuple(out_ids)))
    return [_ref_for(ctx, w) for w in out_ids]


def _generate_sub(ctx: BuildContext, name: str, f: Callable,
                  kinds: list[WireKind]) -> SubroutineDef:
    sub_ctx = BuildContext(RecordOnly())
    # shared flat namespace: nested boxes land in the caller's table
    sub_ctx.subroutines = ctx.subroutines
    sub_ctx._boxed = ctx._boxed
    formals = [input_qubit(sub_ctx) if k == WireKind.QUANTUM else input_bit(sub_ctx)
               for k in kinds]
    returned = f(sub_ctx, formals)
    if returned is None:
        returned = []
    elif isinstance(returned, (QubitRef, BitRef)):
        returned = [returned]
    out_ids = [_wire_of(r) for r in returned]
    for w in out_ids:
        if w not in sub_ctx.live:
            raise BuildError(f'box "{name}" returned dead wire {w}')
    dangling = [w for w in sub_ctx.live if w not in out_ids]
    if dangling:
        raise BuildError(f'box "{name}" leaves dangling wire {dangling[0]}')
    body = Circuit(inputs=tuple(sub_ctx.inputs), gates=tuple(sub_ctx.gates),
                   outputs=tuple((w, sub_ctx.live[w]) for w in out_ids))
    return SubroutineDef(name, body)


# ---------------------------------------------------------------------------
# dynamic lifting

def dynamic_lift(ctx: BuildContext, b) -> bool:
    """Read a measured bit's concrete value during generation.

    Requires the Interactive backend; the emitted gate prefix is flushed to
    the session (each gate exactly once) and the bit's value is returned, so
    subsequent generation can branch on it.
    """
    if not isinstance(ctx.backend, Interactive):
        raise BuildError("dynamic lifting unavailable on a record-only context")
    w = _wire_of(b)
    _require_live(ctx, w, WireKind.CLASSICAL)
    _flush(ctx)
    ctx._lift_count += 1
    try:
        return ctx.backend.session.bit(w)
    except sim.SimulationError as e:
        raise BuildError(str(e))


# ---------------------------------------------------------------------------
# finalization

def finalize(ctx: BuildContext, outputs: Iterable) -> Circuit:
    """Seal the context into an immutable circuit whose outputs are the given
    refs in order.  Every still-live wire must be listed."""
    wires = [_wire_of(o) for o in outputs]
    if len(set(wires)) != len(wires):
        raise BuildError("duplicate wire in outputs")
    for w in wires:
        _require_live(ctx, w)
    dangling = [w for w in ctx.live if w not in wires]
    if dangling:
        raise BuildError(f"dangling wire {dangling[0]} is live but not an output")
    _flush(ctx)
    circuit = Circuit(inputs=tuple(ctx.inputs), gates=tuple(ctx.gates),
                      outputs=tuple((w, ctx.live[w]) for w in wires),
                      subroutines=dict(ctx.subroutines))
    problems = ir.validate(circuit)
    if problems:
        raise BuildError(f"finalized circuit failed validation: {problems[0]}")
    return circuit
