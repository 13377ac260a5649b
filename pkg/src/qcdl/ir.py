"""Circuit data model: wires, gates, circuits, and structural validation.

A circuit is an immutable value: an ordered gate list between typed input and
output wire interfaces, plus a flat table of named subroutines for boxed
(hierarchical) structure.  Wire liveness follows the extended circuit model:
wires are born as circuit inputs or by Init, die at TermAssert or Discard,
and Measure turns a quantum wire into a classical one without changing its id.

Contents:
    WireKind, SignedControl, pos, neg
    Unitary, Init, TermAssert, Discard, Measure, ClassicalGate, Call, Comment
    Circuit, SubroutineDef
    validate, concat, identity
    births, remap_wires, extend_for_births, gate_wires, max_wire_id
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable


class CircuitError(Exception):
    """Structural error while composing circuits."""


class WireKind(Enum):
    QUANTUM = "Qbit"
    CLASSICAL = "Cbit"


@dataclass(frozen=True)
class SignedControl:
    """A condition wire: positive fires on 1 / |1>, negative on 0 / |0>."""

    wire: int
    positive: bool = True


def pos(wire) -> SignedControl:
    """Positive control on a wire id or anything with a .wire attribute."""
    return SignedControl(getattr(wire, "wire", wire), True)


def neg(wire) -> SignedControl:
    """Negative control on a wire id or anything with a .wire attribute."""
    return SignedControl(getattr(wire, "wire", wire), False)


def _tup(xs) -> tuple:
    return xs if isinstance(xs, tuple) else tuple(xs)


@dataclass(frozen=True)
class Unitary:
    """A named gate applied to target wires, under signed controls.

    The name is an opaque registry key; the circuit model does not interpret
    it.  Quantum controls and classical controls are kept separate because
    they validate against different wire kinds.
    """

    name: str
    targets: tuple[int, ...]
    params: tuple[float, ...] = ()
    controls: tuple[SignedControl, ...] = ()
    classical_controls: tuple[SignedControl, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "targets", _tup(self.targets))
        object.__setattr__(self, "params", _tup(self.params))
        object.__setattr__(self, "controls", _tup(self.controls))
        object.__setattr__(self, "classical_controls", _tup(self.classical_controls))


@dataclass(frozen=True)
class Init:
    """Bring a fresh wire to life in a known basis state."""

    wire: int
    kind: WireKind
    value: bool


@dataclass(frozen=True)
class TermAssert:
    """Terminate a wire, asserting it is in the stated basis state."""

    wire: int
    kind: WireKind
    value: bool


@dataclass(frozen=True)
class Discard:
    """Terminate a wire without asserting anything about its state."""

    wire: int


@dataclass(frozen=True)
class Measure:
    """Collapse a quantum wire; the same id continues as a classical wire."""

    wire: int


CLASSICAL_GATE_NAMES = ("not", "xor", "and", "or", "copy")

# name -> (min_sources, max_sources); every classical gate has exactly 1 target
_CLASSICAL_ARITY = {
    "not": (0, 0),
    "xor": (1, None),
    "and": (1, None),
    "or": (1, None),
    "copy": (1, 1),
}


@dataclass(frozen=True)
class ClassicalGate:
    """Boolean gate on classical wires.

    not: target flips.  xor: target ^= parity(sources).  and/or: target is
    overwritten with the conjunction/disjunction of sources.  copy: target is
    overwritten with the single source.  Only not and xor are reversible.
    """

    name: str
    targets: tuple[int, ...]
    sources: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "targets", _tup(self.targets))
        object.__setattr__(self, "sources", _tup(self.sources))


@dataclass(frozen=True)
class Call:
    """Invocation of a named subroutine.

    inputs/outputs map caller wires positionally onto the subroutine's input
    and output interfaces.  A caller wire appearing in both lists passes
    through the call under the same id.
    """

    subroutine: str
    inputs: tuple[int, ...]
    outputs: tuple[int, ...]
    controls: tuple[SignedControl, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "inputs", _tup(self.inputs))
        object.__setattr__(self, "outputs", _tup(self.outputs))
        object.__setattr__(self, "controls", _tup(self.controls))


@dataclass(frozen=True)
class Comment:
    """Zero-semantics annotation; labels attach text to live wires."""

    text: str
    labels: tuple[tuple[int, str], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple((w, s) for w, s in self.labels))


Gate = Unitary | Init | TermAssert | Discard | Measure | ClassicalGate | Call | Comment


@dataclass(frozen=True)
class Circuit:
    """Immutable circuit value; inputs/outputs are (wire id, kind) pairs."""

    inputs: tuple[tuple[int, WireKind], ...]
    gates: tuple[Gate, ...]
    outputs: tuple[tuple[int, WireKind], ...]
    subroutines: dict[str, "SubroutineDef"] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple((w, k) for w, k in self.inputs))
        object.__setattr__(self, "gates", _tup(self.gates))
        object.__setattr__(self, "outputs", tuple((w, k) for w, k in self.outputs))


@dataclass(frozen=True)
class SubroutineDef:
    """A named circuit body.  Nested tables are empty: the namespace is flat,
    owned by the top-level circuit."""

    name: str
    circuit: Circuit


def identity(kinds: Iterable[WireKind]) -> Circuit:
    """Gateless circuit over fresh wires 0..k-1 of the given kinds."""
    interface = tuple((i, k) for i, k in enumerate(kinds))
    return Circuit(inputs=interface, gates=(), outputs=interface)


# ---------------------------------------------------------------------------
# generic wire plumbing, shared by concat / inlining / simulation

def births(gate: Gate) -> tuple[int, ...]:
    """Wires this gate brings to life."""
    if isinstance(gate, Init):
        return (gate.wire,)
    if isinstance(gate, Call):
        ins = set(gate.inputs)
        return tuple(w for w in gate.outputs if w not in ins)
    return ()


def gate_wires(gate: Gate) -> tuple[int, ...]:
    """Every wire the gate touches, in field order."""
    if isinstance(gate, Unitary):
        return (
            gate.targets
            + tuple(c.wire for c in gate.controls)
            + tuple(c.wire for c in gate.classical_controls)
        )
    if isinstance(gate, (Init, TermAssert, Discard, Measure)):
        return (gate.wire,)
    if isinstance(gate, ClassicalGate):
        return gate.targets + gate.sources
    if isinstance(gate, Call):
        seen = gate.inputs + tuple(w for w in gate.outputs if w not in gate.inputs)
        return seen + tuple(c.wire for c in gate.controls)
    if isinstance(gate, Comment):
        return tuple(w for w, _ in gate.labels)
    raise TypeError(f"not a gate: {gate!r}")


def extend_for_births(gate: Gate, mapping: dict[int, int], alloc: Callable[[], int]) -> None:
    """Assign fresh target ids for wires this gate is about to create."""
    for w in births(gate):
        if w not in mapping:
            mapping[w] = alloc()


def remap_wires(gate: Gate, mapping: dict[int, int]) -> Gate:
    """Rewrite every wire id through the mapping (must be total for the gate)."""
    m = mapping.__getitem__

    def mc(cs):
        return tuple(SignedControl(m(c.wire), c.positive) for c in cs)

    if isinstance(gate, Unitary):
        return Unitary(gate.name, tuple(m(w) for w in gate.targets), gate.params,
                       mc(gate.controls), mc(gate.classical_controls))
    if isinstance(gate, Init):
        return Init(m(gate.wire), gate.kind, gate.value)
    if isinstance(gate, TermAssert):
        return TermAssert(m(gate.wire), gate.kind, gate.value)
    if isinstance(gate, Discard):
        return Discard(m(gate.wire))
    if isinstance(gate, Measure):
        return Measure(m(gate.wire))
    if isinstance(gate, ClassicalGate):
        return ClassicalGate(gate.name, tuple(m(w) for w in gate.targets),
                             tuple(m(w) for w in gate.sources))
    if isinstance(gate, Call):
        return Call(gate.subroutine, tuple(m(w) for w in gate.inputs),
                    tuple(m(w) for w in gate.outputs), mc(gate.controls))
    if isinstance(gate, Comment):
        return Comment(gate.text, tuple((m(w), s) for w, s in gate.labels))
    raise TypeError(f"not a gate: {gate!r}")


def max_wire_id(circuit: Circuit) -> int:
    """Largest wire id used by the main body (-1 if the circuit is empty)."""
    top = -1
    for w, _ in circuit.inputs:
        top = max(top, w)
    for g in circuit.gates:
        for w in gate_wires(g):
            top = max(top, w)
    for w, _ in circuit.outputs:
        top = max(top, w)
    return top


# ---------------------------------------------------------------------------
# validation

def validate(circuit: Circuit) -> list[str]:
    """Collect every structural violation; an empty list means well-formed.

    Violations are data, not exceptions: callers that require validity raise
    on a non-empty result.
    """
    out: list[str] = []
    table = circuit.subroutines

    for name, sub in table.items():
        if sub.name != name:
            out.append(f'subroutine "{name}": table key differs from def name "{sub.name}"')
        if sub.circuit.subroutines:
            out.append(f'subroutine "{name}": nested subroutine table must be empty')

    _check_acyclic(circuit, out)
    _body_violations(circuit, table, "main", out)
    for name in sorted(table):
        _body_violations(table[name].circuit, table, f'subroutine "{name}"', out)
    return out


def _check_acyclic(circuit: Circuit, out: list[str]) -> None:
    table = circuit.subroutines
    edges = {
        name: sorted({g.subroutine for g in sub.circuit.gates if isinstance(g, Call)})
        for name, sub in table.items()
    }
    state: dict[str, int] = {}  # 1 = on stack, 2 = done

    def visit(name: str, trail: list[str]) -> None:
        if state.get(name) == 2 or name not in table:
            return
        if state.get(name) == 1:
            cycle = trail[trail.index(name):] + [name]
            out.append("subroutine call graph has a cycle: " + " -> ".join(cycle))
            return
        state[name] = 1
        for callee in edges[name]:
            visit(callee, trail + [name])
        state[name] = 2

    for name in sorted(table):
        visit(name, [])


def _body_violations(circuit: Circuit, table: dict[str, SubroutineDef],
                     where: str, out: list[str]) -> None:
    live: dict[int, WireKind] = {}
    seen: set[int] = set()

    for w, k in circuit.inputs:
        if w < 0:
            out.append(f"{where}: input wire id {w} is negative")
        if w in live:
            out.append(f"{where}: duplicate input wire {w}")
        live[w] = k
        seen.add(w)

    for i, g in enumerate(circuit.gates):
        tag = f"{where}: gate {i}"

        def need(w: int, kind: WireKind | None, role: str) -> bool:
            if w not in live:
                out.append(f"{tag}: {role} wire {w} is not live")
                return False
            if kind is not None and live[w] != kind:
                out.append(f"{tag}: {role} wire {w} is {live[w].value}, expected {kind.value}")
                return False
            return True

        def no_dups(wires: tuple[int, ...]) -> None:
            if len(set(wires)) != len(wires):
                dup = sorted(w for w in set(wires) if wires.count(w) > 1)
                out.append(f"{tag}: wire {dup[0]} appears more than once")

        if isinstance(g, Unitary):
            if not g.targets:
                out.append(f"{tag}: unitary gate with no targets")
            for w in g.targets:
                need(w, WireKind.QUANTUM, "target")
            for c in g.controls:
                need(c.wire, WireKind.QUANTUM, "control")
            for c in g.classical_controls:
                need(c.wire, WireKind.CLASSICAL, "classical control")
            no_dups(gate_wires(g))
        elif isinstance(g, Init):
            if g.wire in seen:
                out.append(f"{tag}: wire id {g.wire} reused")
            else:
                live[g.wire] = g.kind
                seen.add(g.wire)
        elif isinstance(g, TermAssert):
            if need(g.wire, g.kind, "terminated"):
                del live[g.wire]
        elif isinstance(g, Discard):
            if need(g.wire, None, "discarded"):
                del live[g.wire]
        elif isinstance(g, Measure):
            if need(g.wire, WireKind.QUANTUM, "measured"):
                live[g.wire] = WireKind.CLASSICAL
        elif isinstance(g, ClassicalGate):
            if g.name not in _CLASSICAL_ARITY:
                out.append(f'{tag}: unknown classical gate "{g.name}"')
            else:
                lo, hi = _CLASSICAL_ARITY[g.name]
                if len(g.targets) != 1:
                    out.append(f'{tag}: classical gate "{g.name}" takes exactly one target')
                if len(g.sources) < lo or (hi is not None and len(g.sources) > hi):
                    out.append(f'{tag}: classical gate "{g.name}" has {len(g.sources)} sources')
            for w in g.targets + g.sources:
                need(w, WireKind.CLASSICAL, "operand")
            no_dups(g.targets + g.sources)
        elif isinstance(g, Call):
            sub = table.get(g.subroutine)
            if sub is None:
                out.append(f'{tag}: call to unknown subroutine "{g.subroutine}"')
                continue
            sig_in = sub.circuit.inputs
            sig_out = sub.circuit.outputs
            if len(g.inputs) != len(sig_in):
                out.append(f'{tag}: call passes {len(g.inputs)} inputs, '
                           f'"{g.subroutine}" takes {len(sig_in)}')
                continue
            if len(g.outputs) != len(sig_out):
                out.append(f'{tag}: call binds {len(g.outputs)} outputs, '
                           f'"{g.subroutine}" yields {len(sig_out)}')
                continue
            no_dups(g.inputs)
            no_dups(g.outputs)
            for w, (_, k) in zip(g.inputs, sig_in):
                need(w, k, "call input")
            interface = set(g.inputs) | set(g.outputs)
            ctrl_wires = tuple(c.wire for c in g.controls)
            no_dups(ctrl_wires)
            for c in g.controls:
                need(c.wire, None, "call control")
                if c.wire in interface:
                    out.append(f"{tag}: control wire {c.wire} overlaps the call interface")
            outset = set(g.outputs)
            for w in g.inputs:
                if w not in outset and w in live:
                    del live[w]
            for w, (_, k) in zip(g.outputs, sig_out):
                if w in live and w not in g.inputs:
                    out.append(f"{tag}: call output wire {w} collides with a live wire")
                elif w not in live and w in seen and w not in g.inputs:
                    out.append(f"{tag}: wire id {w} reused")
                live[w] = k
                seen.add(w)
        elif isinstance(g, Comment):
            for w, _ in g.labels:
                need(w, None, "labelled")
        else:
            out.append(f"{tag}: unknown gate type {type(g).__name__}")

    declared: set[int] = set()
    for w, k in circuit.outputs:
        if w in declared:
            out.append(f"{where}: duplicate output wire {w}")
        declared.add(w)
        if w not in live:
            out.append(f"{where}: output wire {w} is not live at the end")
        elif live[w] != k:
            out.append(f"{where}: output wire {w} is {live[w].value}, declared {k.value}")
    for w in sorted(live):
        if w not in declared:
            out.append(f"{where}: wire {w} is live at the end but not an output")


# ---------------------------------------------------------------------------
# composition

def concat(a: Circuit, b: Circuit) -> Circuit:
    """Sequential composition: feed a's outputs into b's inputs positionally.

    b's wires are renamed into a's id space; subroutine tables are merged and
    a same-name entry must have a structurally identical body.
    """
    if len(a.outputs) != len(b.inputs):
        raise CircuitError(
            f"cannot concat: {len(a.outputs)} outputs feed {len(b.inputs)} inputs")
    for (aw, ak), (bw, bk) in zip(a.outputs, b.inputs):
        if ak != bk:
            raise CircuitError(
                f"cannot concat: output wire {aw} is {ak.value}, input wire {bw} is {bk.value}")

    mapping = {bw: aw for (aw, _), (bw, _) in zip(a.outputs, b.inputs)}
    top = max([max_wire_id(a)] + list(mapping.values()))
    counter = [top]

    def alloc() -> int:
        counter[0] += 1
        return counter[0]

    gates = list(a.gates)
    for g in b.gates:
        extend_for_births(g, mapping, alloc)
        try:
            gates.append(remap_wires(g, mapping))
        except KeyError as e:
            raise CircuitError(f"second circuit uses wire {e.args[0]} before creating it")

    table = dict(a.subroutines)
    for name, sub in b.subroutines.items():
        if name in table and table[name].circuit != sub.circuit:
            raise CircuitError(f'subroutine "{name}" has two different bodies')
        table.setdefault(name, sub)

    outputs = tuple((mapping[w], k) for w, k in b.outputs)
    return Circuit(inputs=a.inputs, gates=tuple(gates), outputs=outputs, subroutines=table)
