"""Circuit execution: dense state-vector simulation and classical-basis replay.

The state vector holds only the currently live quantum wires.  Init tensors a
qubit in, TermAssert projects one out (raising if the asserted state does not
hold up to tolerance), Measure samples, collapses, and moves the wire's value
into the classical bit store.  Amplitude indexing follows the live order with
the most recently initialized qubit as the lowest-order index bit.

Measurement randomness comes from a 64-bit SplitMix generator, one draw per
Measure (and per Discard of a quantum wire) in program order, so a run is a
pure function of (circuit, input, seed).
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import ir, registry
from .ir import (Call, ClassicalGate, Circuit, Comment, Discard, Gate, Init,
                 Measure, SignedControl, SubroutineDef, TermAssert, Unitary,
                 WireKind)
from .registry import RegistryError, register_gate  # re-exported surface

DEFAULT_ASSERT_EPS = 1e-9
DEFAULT_QUBIT_CAP = 20
_NORM_TOL = 1e-9
_TMP_BASE = 2 ** 48  # call-internal temporaries live above ordinary wire ids


class SimulationError(Exception):
    pass


class TermAssertionError(SimulationError):
    """An assertive termination found probability mass outside the asserted state."""


class SplitMix64:
    """SplitMix64: increment 0x9E3779B97F4A7C15, mix constants
    0xBF58476D1CE4E5B9 and 0x94D049BB133111EB, final xorshift 31."""

    _MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self._state = seed & self._MASK

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & self._MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & self._MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & self._MASK
        return z ^ (z >> 31)

    def next_float(self) -> float:
        """Uniform in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * 2.0 ** -53


@dataclass
class RunResult:
    """Final state of one run: classical wire values, live quantum wire order,
    and the amplitude vector over those wires."""

    bits: dict[int, bool]
    wires: tuple[int, ...]
    amplitudes: np.ndarray


class StateVector:
    """Mutable simulation engine over dynamically live wires."""

    def __init__(self, eps: float = DEFAULT_ASSERT_EPS, qubit_cap: int = DEFAULT_QUBIT_CAP,
                 rng: SplitMix64 | None = None):
        self.order: list[int] = []
        self.amps: np.ndarray = np.ones(1, dtype=np.complex128)
        self.bits: dict[int, bool] = {}
        self.eps = eps
        self.qubit_cap = qubit_cap
        self.rng = rng or SplitMix64(0)
        self._tmp_next = _TMP_BASE

    # -- wire bookkeeping ---------------------------------------------------

    def fresh_tmp(self) -> int:
        self._tmp_next += 1
        return self._tmp_next

    def _axis(self, wire: int) -> int:
        try:
            return self.order.index(wire)
        except ValueError:
            raise SimulationError(f"wire {wire} is not a live quantum wire")

    def relabel(self, old: int, new: int) -> None:
        if new in self.order or new in self.bits:
            raise SimulationError(f"cannot relabel wire {old}: id {new} is in use")
        if old in self.bits:
            self.bits[new] = self.bits.pop(old)
        else:
            self.order[self._axis(old)] = new

    # -- state evolution ----------------------------------------------------

    def init_quantum(self, wire: int, value: bool) -> None:
        if wire in self.order or wire in self.bits:
            raise SimulationError(f"Init on a wire that is already live: {wire}")
        if len(self.order) + 1 > self.qubit_cap:
            raise SimulationError(f"qubit cap {self.qubit_cap} exceeded")
        basis = np.array([0, 1] if value else [1, 0], dtype=np.complex128)
        self.amps = np.kron(self.amps, basis)
        self.order.append(wire)

    def init_classical(self, wire: int, value: bool) -> None:
        if wire in self.order or wire in self.bits:
            raise SimulationError(f"Init on a wire that is already live: {wire}")
        self.bits[wire] = value

    def apply(self, matrix: np.ndarray, targets: Sequence[int],
              controls: Sequence[SignedControl] = ()) -> None:
        k = len(targets)
        if matrix.shape != (2 ** k, 2 ** k):
            raise SimulationError(
                f"matrix of shape {matrix.shape} applied to {k} targets")
        n = len(self.order)
        t_axes = [self._axis(w) for w in targets]
        psi = self.amps.reshape([2] * n)
        index: list = [slice(None)] * n
        fixed: list[int] = []
        for c in controls:
            a = self._axis(c.wire)
            index[a] = 1 if c.positive else 0
            fixed.append(a)
        sub = psi[tuple(index)]
        shift = sorted(fixed)
        sub_axes = [a - sum(1 for f in shift if f < a) for a in t_axes]
        op = matrix.reshape([2] * (2 * k))
        res = np.tensordot(op, sub, axes=(list(range(k, 2 * k)), sub_axes))
        res = np.moveaxis(res, list(range(k)), sub_axes)
        psi[tuple(index)] = res
        norm = float(np.vdot(self.amps, self.amps).real)
        if abs(norm - 1.0) > _NORM_TOL * 100:
            raise SimulationError(f"state norm drifted to {norm}")

    def _prob_of(self, axis: int, value: int) -> float:
        psi = self.amps.reshape([2] * len(self.order))
        branch = np.take(psi, value, axis=axis)
        return float(np.vdot(branch, branch).real)

    def _project(self, axis: int, value: int, prob: float) -> None:
        psi = self.amps.reshape([2] * len(self.order))
        branch = np.take(psi, value, axis=axis)
        self.amps = (branch / np.sqrt(prob)).reshape(-1)
        self.order.pop(axis)

    def term_assert_quantum(self, wire: int, value: bool) -> None:
        axis = self._axis(wire)
        p_bad = self._prob_of(axis, 0 if value else 1)
        if p_bad >= self.eps:
            raise TermAssertionError(
                f"TermAssert: qubit {wire} not in |{int(value)}> (p = {p_bad:.6g})")
        self._project(axis, 1 if value else 0, 1.0 - p_bad)

    def term_assert_classical(self, wire: int, value: bool) -> None:
        if wire not in self.bits:
            raise SimulationError(f"wire {wire} is not a live classical wire")
        if self.bits[wire] != value:
            raise TermAssertionError(
                f"TermAssert: bit {wire} is {int(self.bits[wire])}, expected {int(value)}")
        del self.bits[wire]

    def _sample(self, axis: int) -> bool:
        p1 = self._prob_of(axis, 1)
        outcome = self.rng.next_float() < p1
        self._project(axis, 1 if outcome else 0, p1 if outcome else 1.0 - p1)
        return outcome

    def measure(self, wire: int) -> bool:
        outcome = self._sample(self._axis(wire))
        self.bits[wire] = outcome
        return outcome

    def discard(self, wire: int) -> None:
        if wire in self.bits:
            del self.bits[wire]
        else:
            self._sample(self._axis(wire))


# ---------------------------------------------------------------------------
# gate dispatch

def _split_controls(sv: StateVector, controls: Sequence[SignedControl]):
    quantum, classical = [], []
    for c in controls:
        if c.wire in sv.order:
            quantum.append(c)
        elif c.wire in sv.bits:
            classical.append(c)
        else:
            raise SimulationError(f"control wire {c.wire} is not live")
    return quantum, classical


def _classical_controls_pass(sv: StateVector, controls: Sequence[SignedControl]) -> bool:
    for c in controls:
        if c.wire not in sv.bits:
            raise SimulationError(f"classical control wire {c.wire} has no value")
        if sv.bits[c.wire] != c.positive:
            return False
    return True


def _exec_gate(sv: StateVector, gate: Gate, table: Mapping[str, SubroutineDef]) -> None:
    if isinstance(gate, Unitary):
        if not _classical_controls_pass(sv, gate.classical_controls):
            return
        matrix = registry.gate_matrix(gate.name, gate.params)
        sv.apply(matrix, gate.targets, gate.controls)
    elif isinstance(gate, Init):
        if gate.kind == WireKind.QUANTUM:
            sv.init_quantum(gate.wire, gate.value)
        else:
            sv.init_classical(gate.wire, gate.value)
    elif isinstance(gate, TermAssert):
        if gate.kind == WireKind.QUANTUM:
            sv.term_assert_quantum(gate.wire, gate.value)
        else:
            sv.term_assert_classical(gate.wire, gate.value)
    elif isinstance(gate, Discard):
        sv.discard(gate.wire)
    elif isinstance(gate, Measure):
        sv.measure(gate.wire)
    elif isinstance(gate, ClassicalGate):
        _exec_classical(sv.bits, gate)
    elif isinstance(gate, Call):
        _exec_call(sv, gate, table)
    elif isinstance(gate, Comment):
        pass
    else:
        raise SimulationError(f"cannot execute {type(gate).__name__}")


def _exec_classical(bits: dict[int, bool], gate: ClassicalGate) -> None:
    for w in gate.targets + gate.sources:
        if w not in bits:
            raise SimulationError(f"wire {w} is not a live classical wire")
    (t,) = gate.targets
    vals = [bits[s] for s in gate.sources]
    if gate.name == "not":
        bits[t] = not bits[t]
    elif gate.name == "xor":
        acc = False
        for v in vals:
            acc ^= v
        bits[t] = bits[t] ^ acc
    elif gate.name == "and":
        bits[t] = all(vals)
    elif gate.name == "or":
        bits[t] = any(vals)
    elif gate.name == "copy":
        bits[t] = vals[0]
    else:
        raise SimulationError(f'unknown classical gate "{gate.name}"')


def _attach_call_controls(sv: StateVector, gate: Gate,
                          controls: tuple[SignedControl, ...]) -> Gate:
    if isinstance(gate, Unitary):
        quantum, classical = _split_controls(sv, controls)
        return Unitary(gate.name, gate.targets, gate.params,
                       gate.controls + tuple(quantum),
                       gate.classical_controls + tuple(classical))
    if isinstance(gate, Call):
        return Call(gate.subroutine, gate.inputs, gate.outputs,
                    gate.controls + controls)
    if isinstance(gate, Comment):
        return gate
    raise SimulationError(
        f"{type(gate).__name__} inside a controlled subroutine call is not controllable")


def _exec_call(sv: StateVector, call: Call, table: Mapping[str, SubroutineDef]) -> None:
    sub = table.get(call.subroutine)
    if sub is None:
        raise SimulationError(f'call to unknown subroutine "{call.subroutine}"')
    body = sub.circuit
    rename = {sw: cw for (sw, _), cw in zip(body.inputs, call.inputs)}
    for g in body.gates:
        ir.extend_for_births(g, rename, sv.fresh_tmp)
        try:
            mapped = ir.remap_wires(g, rename)
        except KeyError as e:
            raise SimulationError(
                f'subroutine "{call.subroutine}" uses wire {e.args[0]} before creating it')
        if call.controls:
            mapped = _attach_call_controls(sv, mapped, call.controls)
        _exec_gate(sv, mapped, table)
    for (sw, _), cw in zip(body.outputs, call.outputs):
        current = rename[sw]
        if current != cw:
            sv.relabel(current, cw)


# ---------------------------------------------------------------------------
# whole-circuit runs

def _input_bools(circuit: Circuit, value) -> dict[int, bool]:
    wires = [w for w, _ in circuit.inputs]
    if value is None:
        return {w: False for w in wires}
    if isinstance(value, str):
        if len(value) != len(wires) or set(value) - {"0", "1"}:
            raise SimulationError(
                f"input string must be {len(wires)} characters of 0/1")
        return {w: c == "1" for w, c in zip(wires, value)}
    if isinstance(value, Mapping):
        bad = set(value) - set(wires)
        if bad:
            raise SimulationError(f"input refers to non-input wires {sorted(bad)}")
        return {w: bool(value.get(w, False)) for w in wires}
    seq = list(value)
    if len(seq) != len(wires):
        raise SimulationError(f"input has {len(seq)} values for {len(wires)} input wires")
    return {w: bool(v) for w, v in zip(wires, seq)}


def simulate(circuit: Circuit, input=None, seed: int = 0, *,
             eps: float = DEFAULT_ASSERT_EPS, qubit_cap: int = DEFAULT_QUBIT_CAP,
             _rng: SplitMix64 | None = None) -> RunResult:
    """Run a circuit on a basis assignment (None, bit string, sequence, or
    wire->bool mapping) or, when every input is quantum, a raw amplitude
    vector over the inputs in interface order."""
    sv = StateVector(eps, qubit_cap, _rng or SplitMix64(seed))
    sv._tmp_next = max(_TMP_BASE, ir.max_wire_id(circuit) + 1)
    if isinstance(input, np.ndarray):
        if any(k != WireKind.QUANTUM for _, k in circuit.inputs):
            raise SimulationError("amplitude input requires all-quantum inputs")
        n = len(circuit.inputs)
        amps = np.asarray(input, dtype=np.complex128).reshape(-1)
        if amps.shape != (2 ** n,):
            raise SimulationError(f"amplitude input must have length {2 ** n}")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > 1e-6:
            raise SimulationError(f"amplitude input has norm {norm}")
        if n > sv.qubit_cap:
            raise SimulationError(f"qubit cap {sv.qubit_cap} exceeded")
        sv.order = [w for w, _ in circuit.inputs]
        sv.amps = amps / np.sqrt(norm)
    else:
        values = _input_bools(circuit, input)
        for w, k in circuit.inputs:
            if k == WireKind.QUANTUM:
                sv.init_quantum(w, values[w])
            else:
                sv.init_classical(w, values[w])
    for gate in circuit.gates:
        _exec_gate(sv, gate, circuit.subroutines)
    # put amplitude axes in interface order so results are comparable
    qouts = [w for w, k in circuit.outputs if k == WireKind.QUANTUM]
    if sv.order and set(qouts) == set(sv.order) and sv.order != qouts:
        perm = [sv.order.index(w) for w in qouts]
        sv.amps = np.transpose(sv.amps.reshape([2] * len(sv.order)), perm).reshape(-1)
        sv.order = qouts
    return RunResult(bits=dict(sv.bits), wires=tuple(sv.order), amplitudes=sv.amps.copy())


def run_shots(circuit: Circuit, input=None, shots: int = 1, seed: int = 0,
              **kwargs) -> dict[str, int]:
    """Repeated runs off one generator stream; counts classical output patterns."""
    rng = SplitMix64(seed)
    counts: Counter[str] = Counter()
    for _ in range(shots):
        result = simulate(circuit, input, _rng=rng, **kwargs)
        pattern = "".join(
            "1" if result.bits[w] else "0"
            for w, k in circuit.outputs if k == WireKind.CLASSICAL)
        counts[pattern] += 1
    return dict(counts)


def output_bitstring(result: RunResult, circuit: Circuit) -> str:
    """Read every output wire as a definite bit; quantum outputs require the
    final state to be a basis state (within tolerance)."""
    index = None
    n = len(result.wires)
    if n:
        index = int(np.argmax(np.abs(result.amplitudes)))
        weight = abs(result.amplitudes[index]) ** 2
        if weight < 1.0 - 1e-9:
            raise SimulationError(
                f"final state is not a basis state (max weight {weight:.6g})")
    chars = []
    for w, k in circuit.outputs:
        if k == WireKind.CLASSICAL:
            chars.append("1" if result.bits[w] else "0")
        else:
            p = result.wires.index(w)
            chars.append("1" if (index >> (n - 1 - p)) & 1 else "0")
    return "".join(chars)


# ---------------------------------------------------------------------------
# classical-basis replay

def boolean_simulate(circuit: Circuit, input=None) -> str:
    """Replay a circuit that preserves the classical basis; returns the output
    bit string.  Any unitary other than not/X raises."""
    bits = _input_bools(circuit, input)
    counter = [max(_TMP_BASE, ir.max_wire_id(circuit) + 1)]

    def fresh() -> int:
        counter[0] += 1
        return counter[0]

    _bool_exec(bits, circuit.gates, circuit.subroutines, fresh)
    missing = [w for w, _ in circuit.outputs if w not in bits]
    if missing:
        raise SimulationError(f"output wires {missing} have no value")
    return "".join("1" if bits[w] else "0" for w, _ in circuit.outputs)


def _bool_exec(bits: dict[int, bool], gates, table, fresh) -> None:
    for g in gates:
        if isinstance(g, Unitary):
            if g.name not in ("not", "X"):
                raise SimulationError(f'gate "{g.name}" is not classically simulable')
            if len(g.targets) != 1 or g.params:
                raise SimulationError('malformed "not" gate')
            controls = g.controls + g.classical_controls
            for c in controls:
                if c.wire not in bits:
                    raise SimulationError(f"control wire {c.wire} is not live")
            if all(bits[c.wire] == c.positive for c in controls):
                t = g.targets[0]
                if t not in bits:
                    raise SimulationError(f"target wire {t} is not live")
                bits[t] = not bits[t]
        elif isinstance(g, Init):
            if g.wire in bits:
                raise SimulationError(f"Init on a wire that is already live: {g.wire}")
            bits[g.wire] = g.value
        elif isinstance(g, TermAssert):
            if g.wire not in bits:
                raise SimulationError(f"wire {g.wire} is not live")
            if bits[g.wire] != g.value:
                raise TermAssertionError(
                    f"TermAssert: wire {g.wire} is {int(bits[g.wire])}, "
                    f"expected {int(g.value)}")
            del bits[g.wire]
        elif isinstance(g, Discard):
            if g.wire not in bits:
                raise SimulationError(f"wire {g.wire} is not live")
            del bits[g.wire]
        elif isinstance(g, Measure):
            pass  # value is already definite; only the kind changes
        elif isinstance(g, ClassicalGate):
            _exec_classical(bits, g)
        elif isinstance(g, Call):
            sub = table.get(g.subroutine)
            if sub is None:
                raise SimulationError(f'call to unknown subroutine "{g.subroutine}"')
            for c in g.controls:
                if c.wire not in bits:
                    raise SimulationError(f"control wire {c.wire} is not live")
            if not all(bits[c.wire] == c.positive for c in g.controls):
                continue
            body = sub.circuit
            rename = {sw: cw for (sw, _), cw in zip(body.inputs, g.inputs)}
            renamed = []
            for inner in body.gates:
                ir.extend_for_births(inner, rename, fresh)
                try:
                    renamed.append(ir.remap_wires(inner, rename))
                except KeyError as e:
                    raise SimulationError(
                        f'subroutine "{g.subroutine}" uses wire {e.args[0]} '
                        f"before creating it")
            _bool_exec(bits, renamed, table, fresh)
            for (sw, _), cw in zip(body.outputs, g.outputs):
                current = rename[sw]
                if current != cw:
                    if cw in bits:
                        raise SimulationError(f"wire id {cw} is already in use")
                    bits[cw] = bits.pop(current)
        elif isinstance(g, Comment):
            pass
        else:
            raise SimulationError(f"cannot execute {type(g).__name__}")


# ---------------------------------------------------------------------------
# interactive execution (backend for dynamic lifting)

class Session:
    """Incremental executor: feed gate segments, then read measured bits."""

    def __init__(self, seed: int = 0, *, eps: float = DEFAULT_ASSERT_EPS,
                 qubit_cap: int = DEFAULT_QUBIT_CAP):
        self._sv = StateVector(eps, qubit_cap, SplitMix64(seed))

    def run_gates(self, gates: Sequence[Gate],
                  subroutines: Mapping[str, SubroutineDef] | None = None) -> None:
        table = subroutines or {}
        for g in gates:
            _exec_gate(self._sv, g, table)

    def bit(self, wire: int) -> bool:
        if wire not in self._sv.bits:
            raise SimulationError(f"bit {wire} has no value yet")
        return self._sv.bits[wire]

    def result(self) -> RunResult:
        sv = self._sv
        return RunResult(bits=dict(sv.bits), wires=tuple(sv.order),
                         amplitudes=sv.amps.copy())


def interactive_session(seed: int = 0, **kwargs) -> Session:
    return Session(seed, **kwargs)
