"""Whole-circuit operators: reversal, gate-set decomposition, rule-driven
rewriting, call inlining, and hierarchical gate counting.

All operators are pure functions from circuits to circuits (or to reports);
subroutine tables are transformed alongside the main body.  Gate counting is
hierarchical: each subroutine is counted once and multiplied through its call
sites, so counts stay cheap even when full inlining would be astronomically
large.  Counts are exact integers.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from . import ir
from .ir import (Call, ClassicalGate, Circuit, Comment, Discard, Gate, Init,
                 Measure, SignedControl, SubroutineDef, TermAssert, Unitary,
                 WireKind)
from .registry import (InverseNamed, InverseRule, ParamNegate,  # shared inverse metadata
                       SelfInverse, inverse_rule)


class TransformError(Exception):
    pass


# ---------------------------------------------------------------------------
# reversal

def _reversed_name(name: str) -> str:
    return name[:-4] if name.endswith("_inv") else name + "_inv"


def _invert_unitary(gate: Unitary) -> Unitary:
    rule = inverse_rule(gate.name)
    if rule is None:
        raise TransformError(f'no inverse registered for gate "{gate.name}"')
    if isinstance(rule, SelfInverse):
        return gate
    if isinstance(rule, InverseNamed):
        return Unitary(rule.name, gate.targets, gate.params,
                       gate.controls, gate.classical_controls)
    return Unitary(gate.name, gate.targets, tuple(-p for p in gate.params),
                   gate.controls, gate.classical_controls)


def reverse_gates(gates: Sequence[Gate], table: Mapping[str, SubroutineDef],
                  new_defs: dict[str, SubroutineDef]) -> list[Gate]:
    """Invert a gate segment in place-reversed order.

    Reversed subroutine bodies are materialized into `new_defs` under the
    "_inv"-flipped name.  Raises on irreversible gates.
    """
    out: list[Gate] = []
    for g in reversed(gates):
        if isinstance(g, Unitary):
            out.append(_invert_unitary(g))
        elif isinstance(g, Init):
            out.append(TermAssert(g.wire, g.kind, g.value))
        elif isinstance(g, TermAssert):
            out.append(Init(g.wire, g.kind, g.value))
        elif isinstance(g, ClassicalGate):
            if g.name not in ("not", "xor"):
                raise TransformError(f'classical gate "{g.name}" is irreversible')
            out.append(g)
        elif isinstance(g, (Measure, Discard)):
            raise TransformError(f"{type(g).__name__} gates cannot be reversed")
        elif isinstance(g, Comment):
            out.append(g)
        elif isinstance(g, Call):
            rname = _ensure_reversed_def(g.subroutine, table, new_defs)
            out.append(Call(rname, inputs=g.outputs, outputs=g.inputs,
                            controls=g.controls))
        else:
            raise TransformError(f"cannot reverse {type(g).__name__}")
    return out


def _ensure_reversed_def(name: str, table: Mapping[str, SubroutineDef],
                         new_defs: dict[str, SubroutineDef]) -> str:
    rname = _reversed_name(name)
    if rname in new_defs:
        return rname
    sub = table.get(name)
    if sub is None:
        raise TransformError(f'call to unknown subroutine "{name}"')
    body = sub.circuit
    new_defs[rname] = SubroutineDef(rname, Circuit((), (), ()))  # cycle guard
    rev = reverse_gates(body.gates, table, new_defs)
    new_defs[rname] = SubroutineDef(
        rname, Circuit(inputs=body.outputs, gates=tuple(rev), outputs=body.inputs))
    return rname


def reverse_circuit(circuit: Circuit) -> Circuit:
    """Mirror a measurement-free circuit: gate order flips, each gate is
    inverted, Init and TermAssert trade places, and every subroutine gains a
    reversed body under its "_inv"-flipped name."""
    new_defs: dict[str, SubroutineDef] = {}
    for name in circuit.subroutines:
        _ensure_reversed_def(name, circuit.subroutines, new_defs)
    gates = reverse_gates(circuit.gates, circuit.subroutines, new_defs)
    return Circuit(inputs=circuit.outputs, gates=tuple(gates),
                   outputs=circuit.inputs, subroutines=new_defs)


# ---------------------------------------------------------------------------
# decomposition

class DecomposeTarget:
    TOFFOLI = "toffoli"
    BINARY = "binary"


def _toffoli_network(c1: SignedControl, c2: SignedControl, t: int) -> list[Gate]:
    """Doubly controlled not as the 6-CNOT, 7-T/T_inv, 2-H network.
    Controls must be positive."""
    a, b = c1.wire, c2.wire

    def cx(ctl: int, tgt: int) -> Unitary:
        return Unitary("not", (tgt,), controls=(SignedControl(ctl),))

    return [
        Unitary("H", (t,)),
        cx(b, t),
        Unitary("T_inv", (t,)),
        cx(a, t),
        Unitary("T", (t,)),
        cx(b, t),
        Unitary("T_inv", (t,)),
        cx(a, t),
        Unitary("T", (b,)),
        Unitary("T", (t,)),
        cx(a, b),
        Unitary("H", (t,)),
        Unitary("T", (a,)),
        Unitary("T_inv", (b,)),
        cx(a, b),
    ]


def _conjugate_negatives(gate: Unitary) -> list[Gate]:
    """Flip negative controls positive by sandwiching X on the control wire."""
    negatives = [c.wire for c in gate.controls if not c.positive]
    if not negatives:
        return [gate]
    flipped = Unitary(gate.name, gate.targets, gate.params,
                      tuple(SignedControl(c.wire) for c in gate.controls),
                      gate.classical_controls)
    wrap = [Unitary("not", (w,)) for w in negatives]
    return wrap + [flipped] + list(reversed(wrap))


def _reduce_controls(gate: Unitary, allowed: int,
                     alloc: Callable[[], int]) -> tuple[list[Gate], Unitary, list[Gate]]:
    """Fold control conjunctions into clean ancillas until at most `allowed`
    controls remain.  Classical controls ride on the central gate only: the
    ancilla chain is self-inverse, so gating just the center is equivalent."""
    controls = list(gate.controls)
    compute: list[Gate] = []
    uncompute: list[Gate] = []
    while len(controls) > allowed:
        c1, c2 = controls[0], controls[1]
        anc = alloc()
        toffoli = Unitary("not", (anc,), controls=(c1, c2))
        compute += [Init(anc, WireKind.QUANTUM, False), toffoli]
        uncompute = [toffoli, TermAssert(anc, WireKind.QUANTUM, False)] + uncompute
        controls = [SignedControl(anc)] + controls[2:]
    center = Unitary(gate.name, gate.targets, gate.params, tuple(controls),
                     gate.classical_controls)
    return compute, center, uncompute


def _binary_expand(gate: Gate) -> list[Gate]:
    if not isinstance(gate, Unitary):
        return [gate]
    pieces = _conjugate_negatives(gate)
    out: list[Gate] = []
    for p in pieces:
        if (isinstance(p, Unitary) and p.name in ("not", "X")
                and len(p.controls) == 2):
            out.extend(_toffoli_network(p.controls[0], p.controls[1], p.targets[0]))
        else:
            out.append(p)
    return out


def _decompose_unitary(gate: Unitary, target: str,
                       alloc: Callable[[], int]) -> list[Gate]:
    n_targets = len(gate.targets)
    if target == DecomposeTarget.TOFFOLI:
        allowed = 3 - n_targets
    elif n_targets == 1:
        allowed = 2 if gate.name in ("not", "X") else 1
    else:
        allowed = 0
    if allowed < 0 or (n_targets > (3 if target == DecomposeTarget.TOFFOLI else 2)):
        raise TransformError(
            f'gate "{gate.name}" on {n_targets} targets has no {target} decomposition')
    if len(gate.controls) > allowed and allowed == 0 and n_targets >= 2:
        raise TransformError(
            f'controlled "{gate.name}" on {n_targets} targets has no {target} decomposition')
    compute, center, uncompute = _reduce_controls(gate, allowed, alloc)
    seq: list[Gate] = compute + [center] + uncompute
    if target == DecomposeTarget.BINARY:
        expanded: list[Gate] = []
        for g in seq:
            expanded.extend(_binary_expand(g))
        seq = expanded
    return seq


def decompose(circuit: Circuit, target: str) -> Circuit:
    """Rewrite into the Toffoli gate set (every gate touches at most 3 wires)
    or the binary set (at most 2).  Negative controls compile by X
    conjugation, wide control fans by clean-ancilla Toffoli chains, and
    Toffolis themselves (binary target) by the standard T-network.  Calls are
    left in place; their bodies are decomposed in the table."""
    if target not in (DecomposeTarget.TOFFOLI, DecomposeTarget.BINARY):
        raise TransformError(f"unknown decompose target {target!r}")

    def run(c: Circuit) -> Circuit:
        counter = [ir.max_wire_id(c)]

        def alloc() -> int:
            counter[0] += 1
            return counter[0]

        gates: list[Gate] = []
        for g in c.gates:
            if isinstance(g, Unitary):
                gates.extend(_decompose_unitary(g, target, alloc))
            else:
                gates.append(g)
        return Circuit(c.inputs, tuple(gates), c.outputs, c.subroutines)

    table = {name: SubroutineDef(name, run(sub.circuit))
             for name, sub in circuit.subroutines.items()}
    top = run(circuit)
    return Circuit(top.inputs, top.gates, top.outputs, table)


# ---------------------------------------------------------------------------
# rule-driven rewriting

@dataclass(frozen=True)
class TransformRule:
    """Matches unitaries by name / target count / control count (None matches
    anything) and replaces each match with the rewrite's output.  The rewrite
    receives the matched gate and a fresh wire allocator for scoped ancillas."""

    rewrite: Callable[[Unitary, Callable[[], int]], Sequence[Gate]]
    name: str | None = None
    n_targets: int | None = None
    n_controls: int | None = None

    def matches(self, gate: Unitary) -> bool:
        if self.name is not None and gate.name != self.name:
            return False
        if self.n_targets is not None and len(gate.targets) != self.n_targets:
            return False
        if self.n_controls is not None and len(gate.controls) != self.n_controls:
            return False
        return True


def transform(circuit: Circuit, rules: Sequence[TransformRule]) -> Circuit:
    """Apply the first matching rule to every unitary (single pass, no
    refixpointing); the result is re-validated."""

    def run(c: Circuit) -> Circuit:
        counter = [ir.max_wire_id(c)]

        def alloc() -> int:
            counter[0] += 1
            return counter[0]

        gates: list[Gate] = []
        for g in c.gates:
            replaced = False
            if isinstance(g, Unitary):
                for rule in rules:
                    if rule.matches(g):
                        gates.extend(rule.rewrite(g, alloc))
                        replaced = True
                        break
            if not replaced:
                gates.append(g)
        return Circuit(c.inputs, tuple(gates), c.outputs, c.subroutines)

    table = {name: SubroutineDef(name, run(sub.circuit))
             for name, sub in circuit.subroutines.items()}
    top = run(circuit)
    result = Circuit(top.inputs, top.gates, top.outputs, table)
    problems = ir.validate(result)
    if problems:
        raise TransformError("rule output is not a valid circuit: " + problems[0])
    return result


# ---------------------------------------------------------------------------
# inlining

def inline_all(circuit: Circuit) -> Circuit:
    """Expand every call recursively with fresh internal wire ids.  Controls
    carried by a call are pushed onto each inlined gate; pushing onto a
    non-controllable gate (Init, TermAssert, Measure, Discard, classical
    gates) is an error."""
    counter = [ir.max_wire_id(circuit)]

    def alloc() -> int:
        counter[0] += 1
        return counter[0]

    kinds: dict[int, WireKind] = {w: k for w, k in circuit.inputs}
    out: list[Gate] = []
    _expand(circuit.gates, circuit.subroutines, None, (), kinds, out, alloc)
    result = Circuit(circuit.inputs, tuple(out), circuit.outputs, {})
    problems = ir.validate(result)
    if problems:
        raise TransformError("inlined circuit is not valid: " + problems[0])
    return result


def _push_controls(gate: Gate, extra: tuple[SignedControl, ...],
                   kinds: Mapping[int, WireKind]) -> Gate:
    if isinstance(gate, Comment):
        return gate
    if isinstance(gate, Call):
        return Call(gate.subroutine, gate.inputs, gate.outputs, gate.controls + extra)
    if isinstance(gate, Unitary):
        quantum = list(gate.controls)
        classical = list(gate.classical_controls)
        for c in extra:
            if kinds[c.wire] == WireKind.QUANTUM:
                quantum.append(c)
            else:
                classical.append(c)
        return Unitary(gate.name, gate.targets, gate.params,
                       tuple(quantum), tuple(classical))
    raise TransformError(
        f"control pushed onto non-controllable {type(gate).__name__} while inlining")


def _track_kinds(gate: Gate, kinds: dict[int, WireKind],
                 table: Mapping[str, SubroutineDef]) -> None:
    if isinstance(gate, Init):
        kinds[gate.wire] = gate.kind
    elif isinstance(gate, Measure):
        kinds[gate.wire] = WireKind.CLASSICAL
    elif isinstance(gate, Call):
        sub = table[gate.subroutine]
        for w, (_, k) in zip(gate.outputs, sub.circuit.outputs):
            kinds[w] = k


def _expand(gates: Sequence[Gate], table: Mapping[str, SubroutineDef],
            rename: dict[int, int] | None, extra: tuple[SignedControl, ...],
            kinds: dict[int, WireKind], out: list[Gate],
            alloc: Callable[[], int]) -> None:
    for g in gates:
        if rename is not None:
            ir.extend_for_births(g, rename, alloc)
            try:
                g = ir.remap_wires(g, rename)
            except KeyError as e:
                raise TransformError(f"wire {e.args[0]} used before creation while inlining")
        if isinstance(g, Call):
            sub = table.get(g.subroutine)
            if sub is None:
                raise TransformError(f'call to unknown subroutine "{g.subroutine}"')
            body = sub.circuit
            inner: dict[int, int] = {}
            for (sw, _), cw in zip(body.inputs, g.inputs):
                inner[sw] = cw
            for (sw, _), cw in zip(body.outputs, g.outputs):
                if sw in inner and inner[sw] != cw:
                    raise TransformError(
                        f'call to "{g.subroutine}" binds wire {sw} inconsistently')
                inner[sw] = cw
            _expand(body.gates, table, inner, extra + g.controls, kinds, out, alloc)
        else:
            if extra:
                g = _push_controls(g, extra, kinds)
            _track_kinds(g, kinds, table)
            out.append(g)


# ---------------------------------------------------------------------------
# gate counting

@dataclass
class GateCountReport:
    """Exact gate tallies keyed by (name, positive controls, negative
    controls), plus interface and width totals.  Entries are ordered by key."""

    entries: dict[tuple[str, int, int], int]
    total: int
    inputs: int
    outputs: int
    max_wires: int
    aggregate: bool


def _count_key(gate: Gate) -> tuple[str, int, int] | None:
    if isinstance(gate, Comment):
        return None
    if isinstance(gate, Unitary):
        cs = gate.controls + gate.classical_controls
        a = sum(1 for c in cs if c.positive)
        return (gate.name, a, len(cs) - a)
    if isinstance(gate, Init):
        return ("Init1" if gate.value else "Init0", 0, 0)
    if isinstance(gate, TermAssert):
        return ("Term1" if gate.value else "Term0", 0, 0)
    if isinstance(gate, Measure):
        return ("Meas", 0, 0)
    if isinstance(gate, Discard):
        return ("Discard", 0, 0)
    if isinstance(gate, ClassicalGate):
        return (gate.name, 0, 0)
    raise TypeError(f"uncountable gate {type(gate).__name__}")


def _call_split(call: Call) -> tuple[int, int]:
    a = sum(1 for c in call.controls if c.positive)
    return a, len(call.controls) - a


def gate_count(circuit: Circuit, aggregate: bool = True) -> GateCountReport:
    """Count gates without inlining.

    Aggregate mode resolves calls hierarchically: each subroutine is counted
    once, and a call adds the callee's tally shifted by the call's own control
    split, times one per call site, so deep call trees with huge multiplicity
    stay linear in the sum of subroutine sizes.  Non-aggregate mode counts a
    call as a single entry under the subroutine's name.
    """
    table = circuit.subroutines
    memo_counts: dict[str, dict[tuple[str, int, int], int]] = {}
    memo_width: dict[str, int] = {}

    def counts_of(name: str) -> dict[tuple[str, int, int], int]:
        if name not in memo_counts:
            memo_counts[name] = _tally(table[name].circuit)
        return memo_counts[name]

    def width_of(name: str) -> int:
        if name not in memo_width:
            memo_width[name] = _width(table[name].circuit)
        return memo_width[name]

    def _tally(c: Circuit) -> dict[tuple[str, int, int], int]:
        acc: dict[tuple[str, int, int], int] = {}
        for g in c.gates:
            if isinstance(g, Call):
                if g.subroutine not in table:
                    raise TransformError(f'call to unknown subroutine "{g.subroutine}"')
                if aggregate:
                    da, db = _call_split(g)
                    for (nm, a, b), n in counts_of(g.subroutine).items():
                        key = (nm, a + da, b + db)
                        acc[key] = acc.get(key, 0) + n
                else:
                    da, db = _call_split(g)
                    key = (g.subroutine, da, db)
                    acc[key] = acc.get(key, 0) + 1
            else:
                key = _count_key(g)
                if key is not None:
                    acc[key] = acc.get(key, 0) + 1
        return acc

    def _width(c: Circuit) -> int:
        live = {w for w, _ in c.inputs}
        top = len(live)
        for g in c.gates:
            if isinstance(g, Init):
                live.add(g.wire)
            elif isinstance(g, (TermAssert, Discard)):
                live.discard(g.wire)
            elif isinstance(g, Call):
                if aggregate:
                    top = max(top, len(live) - len(set(g.inputs)) + width_of(g.subroutine))
                outs = set(g.outputs)
                for w in g.inputs:
                    if w not in outs:
                        live.discard(w)
                live |= outs
            top = max(top, len(live))
        return top

    entries = _tally(circuit)
    ordered = {k: entries[k] for k in sorted(entries)}
    return GateCountReport(
        entries=ordered,
        total=sum(entries.values()),
        inputs=len(circuit.inputs),
        outputs=len(circuit.outputs),
        max_wires=_width(circuit),
        aggregate=aggregate,
    )
