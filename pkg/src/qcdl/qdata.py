"""Structured wire data: shape trees over qubits/bits, generic init, measure,
and controlled-not, plus fixed-width integer registers.

A piece of data is a Python tree: tuples for heterogeneous products, lists
for homogeneous sequences (the length is a generation-time parameter), plain
booleans / IntM for classical parameter values, QubitRef / QDInt for quantum
wires, BitRef / CInt for classical wires.  `shape_of` erases the payload and
keeps the tree skeleton; integer registers share one shape regardless of
whether they hold parameters, qubits, or bits.

Registers are little-endian: bit 0 is the least significant.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import builder
from .builder import BitRef, BuildContext, QubitRef


class QDataError(Exception):
    pass


# ---------------------------------------------------------------------------
# shapes

@dataclass(frozen=True)
class QubitLeaf:
    pass


@dataclass(frozen=True)
class BitLeaf:
    pass


@dataclass(frozen=True)
class TupleShape:
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))


@dataclass(frozen=True)
class ListShape:
    element: object  # None when length == 0
    length: int


@dataclass(frozen=True)
class IntRegShape:
    width: int


# ---------------------------------------------------------------------------
# integer registers

@dataclass(frozen=True)
class IntM:
    """Classical parameter integer of fixed width."""

    width: int
    value: int

    def __post_init__(self):
        if self.width < 0:
            raise QDataError("negative register width")
        if not 0 <= self.value < 2 ** self.width:
            raise QDataError(f"value {self.value} does not fit in {self.width} bits")

    def bits(self) -> list[bool]:
        return [bool((self.value >> i) & 1) for i in range(self.width)]


@dataclass(frozen=True)
class QDInt:
    """Quantum integer register (list of qubits, LSB first)."""

    qubits: tuple[QubitRef, ...]

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(self.qubits))

    @property
    def width(self) -> int:
        return len(self.qubits)


@dataclass(frozen=True)
class CInt:
    """Classical integer register (list of bits, LSB first)."""

    bits: tuple[BitRef, ...]

    def __post_init__(self):
        object.__setattr__(self, "bits", tuple(self.bits))

    @property
    def width(self) -> int:
        return len(self.bits)


# ---------------------------------------------------------------------------
# traversal

def shape_of(d) -> object:
    if isinstance(d, QubitRef):
        return QubitLeaf()
    if isinstance(d, (BitRef, bool)):
        return BitLeaf()
    if isinstance(d, IntM):
        return IntRegShape(d.width)
    if isinstance(d, QDInt):
        return IntRegShape(d.width)
    if isinstance(d, CInt):
        return IntRegShape(d.width)
    if isinstance(d, tuple):
        return TupleShape(tuple(shape_of(x) for x in d))
    if isinstance(d, list):
        if not d:
            return ListShape(None, 0)
        shapes = [shape_of(x) for x in d]
        if any(s != shapes[0] for s in shapes):
            raise QDataError("list elements have differing shapes")
        return ListShape(shapes[0], len(d))
    raise QDataError(f"not wire data: {d!r}")


def leaves(d) -> list:
    """Leaf payloads left to right (refs for wire data, booleans for
    parameter data; registers yield LSB first)."""
    if isinstance(d, (QubitRef, BitRef, bool)):
        return [d]
    if isinstance(d, IntM):
        return list(d.bits())
    if isinstance(d, QDInt):
        return list(d.qubits)
    if isinstance(d, CInt):
        return list(d.bits)
    if isinstance(d, (tuple, list)):
        out = []
        for x in d:
            out.extend(leaves(x))
        return out
    raise QDataError(f"not wire data: {d!r}")


def _wire_leaves(d) -> list[int]:
    ws = []
    for leaf in leaves(d):
        if isinstance(leaf, bool):
            raise QDataError("expected wire data, found a parameter boolean")
        ws.append(leaf.wire)
    return ws


# ---------------------------------------------------------------------------
# generic operations

def qinit(ctx: BuildContext, value):
    """Allocate fresh qubits following the structure of a parameter value:
    booleans become qubits, IntM becomes QDInt, tuples and lists recurse."""
    if isinstance(value, bool):
        return builder.qinit_bool(ctx, value)
    if isinstance(value, IntM):
        return QDInt(tuple(builder.qinit_bool(ctx, b) for b in value.bits()))
    if isinstance(value, tuple):
        return tuple(qinit(ctx, v) for v in value)
    if isinstance(value, list):
        shape_of(value)  # homogeneity check
        return [qinit(ctx, v) for v in value]
    raise QDataError(f"cannot qinit from {value!r}")


def measure(ctx: BuildContext, q):
    """Measure every qubit leaf; the result has the same structure with
    classical leaves."""
    if isinstance(q, QubitRef):
        return builder.measure(ctx, q)
    if isinstance(q, QDInt):
        return CInt(tuple(builder.measure(ctx, x) for x in q.qubits))
    if isinstance(q, tuple):
        return tuple(measure(ctx, x) for x in q)
    if isinstance(q, list):
        return [measure(ctx, x) for x in q]
    raise QDataError(f"cannot measure {q!r}")


def controlled_not(ctx: BuildContext, target, control) -> None:
    """Apply not to each target leaf, controlled by the matching control
    leaf.  The two trees must have identical shapes and disjoint wires."""
    if shape_of(target) != shape_of(control):
        raise QDataError("target and control shapes differ")
    t_wires = _wire_leaves(target)
    c_wires = _wire_leaves(control)
    overlap = set(t_wires) & set(c_wires)
    if overlap:
        raise QDataError(f"target and control share wire {min(overlap)}")
    for t, c in zip(t_wires, c_wires):
        builder.qnot(ctx, t, controls=[c])


def int_value(bits: Sequence[bool]) -> int:
    """Little-endian bit sequence to integer."""
    return sum(1 << i for i, b in enumerate(bits) if b)
