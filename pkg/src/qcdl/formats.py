"""Text serialization, parsing, and report rendering.

The text format is line-oriented: an `Inputs:` header, one gate per line, an
`Outputs:` footer, then one block per subroutine (sorted by name).  It is the
package's stable interchange format; FORMAT.md in the repository root holds
the grammar and the golden corpus freezes the byte-level layout.

    Inputs: 0:Qbit, 1:Qbit
    QGate["H"](0)
    QGate["not"](0) ctrls=[+1]
    Outputs: 0:Qbit, 1:Qbit

parse(serialize(c)) reproduces c structurally, and parse validates before
returning.
"""
from __future__ import annotations

import re
from typing import Sequence

from . import ir
from .ir import (Call, ClassicalGate, Circuit, Comment, Discard, Gate, Init,
                 Measure, SignedControl, SubroutineDef, TermAssert, Unitary,
                 WireKind)
from .transforms import GateCountReport


class FormatError(Exception):
    pass


class ParseError(FormatError):
    def __init__(self, message: str, line: int = 0):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


_KIND_TAG = {WireKind.QUANTUM: "Qbit", WireKind.CLASSICAL: "Cbit"}
_TAG_KIND = {v: k for k, v in _KIND_TAG.items()}


# ---------------------------------------------------------------------------
# serialization

def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _iface(pairs) -> str:
    if not pairs:
        return "none"
    return ", ".join(f"{w}:{_KIND_TAG[k]}" for w, k in pairs)


def _ctrl_text(cs: Sequence[SignedControl]) -> str:
    return "[" + ",".join(("+" if c.positive else "-") + str(c.wire) for c in cs) + "]"


def _wires_text(ws: Sequence[int]) -> str:
    return "(" + ",".join(str(w) for w in ws) + ")"


def _gate_line(g: Gate, kinds: dict[int, WireKind]) -> str:
    if isinstance(g, Unitary):
        s = f"QGate[{_quote(g.name)}]"
        if g.params:
            s += "(" + ",".join(repr(p) for p in g.params) + ")"
        s += _wires_text(g.targets)
        if g.controls:
            s += " ctrls=" + _ctrl_text(g.controls)
        if g.classical_controls:
            s += " cctrls=" + _ctrl_text(g.classical_controls)
        return s
    if isinstance(g, Init):
        tag = "Q" if g.kind == WireKind.QUANTUM else "C"
        return f"{tag}Init{int(g.value)}({g.wire})"
    if isinstance(g, TermAssert):
        tag = "Q" if g.kind == WireKind.QUANTUM else "C"
        return f"{tag}Term{int(g.value)}({g.wire})"
    if isinstance(g, Discard):
        tag = "Q" if kinds.get(g.wire) == WireKind.QUANTUM else "C"
        return f"{tag}Discard({g.wire})"
    if isinstance(g, Measure):
        return f"QMeas({g.wire})"
    if isinstance(g, ClassicalGate):
        s = f"CGate[{_quote(g.name)}]" + _wires_text(g.targets)
        if g.sources:
            s += _wires_text(g.sources)
        return s
    if isinstance(g, Call):
        s = f"Call[{_quote(g.subroutine)}]" + _wires_text(g.inputs) + _wires_text(g.outputs)
        if g.controls:
            s += " ctrls=" + _ctrl_text(g.controls)
        return s
    if isinstance(g, Comment):
        s = f"Comment[{_quote(g.text)}]"
        if g.labels:
            s += "(" + ",".join(f"{w}:{_quote(t)}" for w, t in g.labels) + ")"
        return s
    raise FormatError(f"cannot serialize {type(g).__name__}")


def _track_kinds(g: Gate, kinds: dict[int, WireKind],
                 table: dict[str, SubroutineDef]) -> None:
    if isinstance(g, Init):
        kinds[g.wire] = g.kind
    elif isinstance(g, Measure):
        kinds[g.wire] = WireKind.CLASSICAL
    elif isinstance(g, Call) and g.subroutine in table:
        sub = table[g.subroutine].circuit
        for w, (_, k) in zip(g.outputs, sub.outputs):
            kinds[w] = k


def _body_lines(circ: Circuit, table: dict[str, SubroutineDef]) -> list[str]:
    kinds = dict(circ.inputs)
    lines = ["Inputs: " + _iface(circ.inputs)]
    for g in circ.gates:
        lines.append(_gate_line(g, kinds))
        _track_kinds(g, kinds, table)
    lines.append("Outputs: " + _iface(circ.outputs))
    return lines


def serialize(circuit: Circuit) -> str:
    lines = _body_lines(circuit, circuit.subroutines)
    for name in sorted(circuit.subroutines):
        lines.append("")
        lines.append(f"Subroutine: {_quote(name)}")
        lines.extend(_body_lines(circuit.subroutines[name].circuit,
                                 circuit.subroutines))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# parsing

def _scan_quoted(s: str, i: int, lineno: int) -> tuple[str, int]:
    if i >= len(s) or s[i] != '"':
        raise ParseError("expected opening quote", lineno)
    out, i = [], i + 1
    while i < len(s):
        ch = s[i]
        if ch == "\\":
            if i + 1 >= len(s):
                break
            out.append(s[i + 1])
            i += 2
        elif ch == '"':
            return "".join(out), i + 1
        else:
            out.append(ch)
            i += 1
    raise ParseError("unterminated string", lineno)


def _scan_group(s: str, i: int, lineno: int) -> tuple[str, int]:
    """Return the raw text inside a (...) group, honoring quoted strings."""
    if i >= len(s) or s[i] != "(":
        raise ParseError("expected '('", lineno)
    start = i + 1
    i = start
    while i < len(s):
        ch = s[i]
        if ch == '"':
            _, i = _scan_quoted(s, i, lineno)
        elif ch == ")":
            return s[start:i], i + 1
        else:
            i += 1
    raise ParseError("unterminated group", lineno)


def _parse_ints(raw: str, lineno: int) -> tuple[int, ...]:
    raw = raw.strip()
    if not raw:
        return ()
    out = []
    for tok in raw.split(","):
        tok = tok.strip()
        if not re.fullmatch(r"\d+", tok):
            raise ParseError(f"malformed wire id {tok!r}", lineno)
        out.append(int(tok))
    return tuple(out)


def _parse_params(raw: str, lineno: int) -> tuple[float, ...]:
    raw = raw.strip()
    if not raw:
        return ()
    out = []
    for tok in raw.split(","):
        try:
            out.append(float(tok.strip()))
        except ValueError:
            raise ParseError(f"malformed parameter {tok.strip()!r}", lineno)
    return tuple(out)


def _parse_controls(raw: str, lineno: int) -> tuple[SignedControl, ...]:
    raw = raw.strip()
    if not raw:
        return ()
    out = []
    for tok in raw.split(","):
        tok = tok.strip()
        if not re.fullmatch(r"[+-]\d+", tok):
            raise ParseError(f"malformed control token {tok!r}", lineno)
        out.append(SignedControl(int(tok[1:]), tok[0] == "+"))
    return tuple(out)


_SIMPLE_RE = re.compile(r"(Q|C)(Init|Term)([01])\((\d+)\)$")
_DISCARD_RE = re.compile(r"(Q|C)Discard\((\d+)\)$")
_MEAS_RE = re.compile(r"QMeas\((\d+)\)$")
_CTRLS_RE = re.compile(r" ctrls=\[([^\]]*)\]")
_CCTRLS_RE = re.compile(r" cctrls=\[([^\]]*)\]")


def _parse_gate(line: str, lineno: int) -> Gate:
    m = _SIMPLE_RE.fullmatch(line)
    if m:
        kind = _TAG_KIND[m.group(1) + "bit"]
        ctor = Init if m.group(2) == "Init" else TermAssert
        return ctor(int(m.group(4)), kind, m.group(3) == "1")
    m = _DISCARD_RE.fullmatch(line)
    if m:
        return Discard(int(m.group(2)))
    m = _MEAS_RE.fullmatch(line)
    if m:
        return Measure(int(m.group(1)))
    for head in ("QGate", "CGate", "Call", "Comment"):
        if line.startswith(head + "["):
            return _parse_named(head, line, lineno)
    raise ParseError(f"unrecognized gate line {line!r}", lineno)


def _parse_named(head: str, line: str, lineno: int) -> Gate:
    name, i = _scan_quoted(line, len(head) + 1, lineno)
    if i >= len(line) or line[i] != "]":
        raise ParseError("expected ']' after name", lineno)
    i += 1
    groups = []
    while i < len(line) and line[i] == "(":
        raw, i = _scan_group(line, i, lineno)
        groups.append(raw)
    tail = line[i:]
    ctrls_m = _CTRLS_RE.search(tail)
    cctrls_m = _CCTRLS_RE.search(tail)
    expect = ""
    if ctrls_m:
        expect += ctrls_m.group(0)
    if cctrls_m:
        expect += cctrls_m.group(0)
    if tail != expect:
        raise ParseError(f"unexpected trailing text {tail.strip()!r}", lineno)
    ctrls = _parse_controls(ctrls_m.group(1), lineno) if ctrls_m else ()
    cctrls = _parse_controls(cctrls_m.group(1), lineno) if cctrls_m else ()

    if head == "QGate":
        if len(groups) == 1:
            params, targets = (), _parse_ints(groups[0], lineno)
        elif len(groups) == 2:
            params, targets = _parse_params(groups[0], lineno), _parse_ints(groups[1], lineno)
        else:
            raise ParseError("QGate takes (params)(targets) or (targets)", lineno)
        return Unitary(name, targets, params, ctrls, cctrls)
    if cctrls:
        raise ParseError(f"{head} cannot carry cctrls", lineno)
    if head == "CGate":
        if ctrls:
            raise ParseError("CGate cannot carry ctrls", lineno)
        if len(groups) == 1:
            targets, sources = _parse_ints(groups[0], lineno), ()
        elif len(groups) == 2:
            targets, sources = _parse_ints(groups[0], lineno), _parse_ints(groups[1], lineno)
        else:
            raise ParseError("CGate takes (targets) or (targets)(sources)", lineno)
        return ClassicalGate(name, targets, sources)
    if head == "Call":
        if len(groups) != 2:
            raise ParseError("Call takes (inputs)(outputs)", lineno)
        return Call(name, _parse_ints(groups[0], lineno),
                    _parse_ints(groups[1], lineno), ctrls)
    # Comment
    if ctrls:
        raise ParseError("Comment cannot carry ctrls", lineno)
    if len(groups) > 1:
        raise ParseError("Comment takes at most one label group", lineno)
    labels = []
    if groups:
        raw = groups[0].strip()
        j = 0
        while j < len(raw):
            m = re.match(r"\s*(\d+):", raw[j:])
            if not m:
                raise ParseError("malformed label list", lineno)
            wire = int(m.group(1))
            j += m.end()
            text, j2 = _scan_quoted(raw, j, lineno)
            labels.append((wire, text))
            j = j2
            m = re.match(r"\s*,", raw[j:])
            if m:
                j += m.end()
            elif raw[j:].strip():
                raise ParseError("malformed label list", lineno)
            else:
                break
    return Comment(name, tuple(labels))


def _parse_iface(line: str, header: str, lineno: int):
    if not line.startswith(header):
        raise ParseError(f"expected {header!r}", lineno)
    rest = line[len(header):].strip()
    if rest == "none":
        return ()
    pairs = []
    for tok in rest.split(","):
        tok = tok.strip()
        m = re.fullmatch(r"(\d+):(Qbit|Cbit)", tok)
        if not m:
            raise ParseError(f"malformed interface entry {tok!r}", lineno)
        pairs.append((int(m.group(1)), _TAG_KIND[m.group(2)]))
    return tuple(pairs)


class _Lines:
    def __init__(self, text: str):
        self.lines = text.splitlines()
        self.pos = 0

    def peek(self) -> str | None:
        while self.pos < len(self.lines) and not self.lines[self.pos].strip():
            self.pos += 1
        return self.lines[self.pos] if self.pos < len(self.lines) else None

    def take(self) -> tuple[str, int]:
        line = self.peek()
        if line is None:
            raise ParseError("unexpected end of input", len(self.lines))
        self.pos += 1
        return line, self.pos  # 1-based line number


def _parse_body(src: _Lines):
    line, n = src.take()
    inputs = _parse_iface(line, "Inputs:", n)
    gates = []
    while True:
        line, n = src.take()
        if line.startswith("Outputs:"):
            outputs = _parse_iface(line, "Outputs:", n)
            return inputs, tuple(gates), outputs
        gates.append(_parse_gate(line, n))


def parse(text: str, check: bool = True) -> Circuit:
    """Parse the text format back into a circuit; syntax errors carry the
    line number, and the result must validate unless `check` is off."""
    src = _Lines(text)
    inputs, gates, outputs = _parse_body(src)
    subs: dict[str, SubroutineDef] = {}
    while src.peek() is not None:
        line, n = src.take()
        if not line.startswith("Subroutine: "):
            raise ParseError(f"expected a subroutine block, found {line!r}", n)
        name, i = _scan_quoted(line, len("Subroutine: "), n)
        if line[i:].strip():
            raise ParseError("trailing text after subroutine name", n)
        if name in subs:
            raise ParseError(f"duplicate subroutine {name!r}", n)
        s_in, s_gates, s_out = _parse_body(src)
        subs[name] = SubroutineDef(name, Circuit(s_in, s_gates, s_out))
    circuit = Circuit(inputs, gates, outputs, subs)
    if check:
        problems = ir.validate(circuit)
        if problems:
            raise ParseError("circuit does not validate: " + problems[0])
    return circuit


# ---------------------------------------------------------------------------
# gate-count report

def render_counts(report: GateCountReport) -> str:
    """Fixed layout: header, right-aligned counts, quoted names, `controls a`
    when only positive controls, `controls a+b` when negatives are present."""
    lines = ["Aggregated gate count:" if report.aggregate else "Gate count:"]
    if report.entries:
        width = max(len(str(n)) for n in report.entries.values())
        for (name, a, b), count in report.entries.items():
            suffix = ""
            if b:
                suffix = f", controls {a}+{b}"
            elif a:
                suffix = f", controls {a}"
            lines.append(f'{count:>{width}}: "{name}"{suffix}')
    lines.append(f"Total gates: {report.total}")
    lines.append(f"Inputs: {report.inputs}")
    lines.append(f"Outputs: {report.outputs}")
    lines.append(f"Qubits in circuit: {report.max_wires}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# ascii rendering

_GLYPHS = {
    "dot": "•", "odot": "○", "oplus": "⊕",
    "qwire": "─", "cwire": "═", "vert": "│",
    "ket": ("|0⟩", "|1⟩"), "term": ("|0⟩", "|1⟩"),
    "discard": "⊣",
}
_PLAIN = {
    "dot": "*", "odot": "o", "oplus": "+",
    "qwire": "-", "cwire": "=", "vert": "|",
    "ket": ("|0>", "|1>"), "term": ("|0>", "|1>"),
    "discard": "-|",
}


def render_ascii(circuit: Circuit, width: int = 100, plain: bool = False) -> str:
    """One row per wire, one column per gate, time running left to right.
    Quantum wires are single lines, classical wires double; controls are
    filled/empty dots; inits attach to the wire on the right only, asserted
    terminations on the left only.  Requires a flattened circuit (no calls)."""
    if any(isinstance(g, Call) for g in circuit.gates):
        raise FormatError("render_ascii needs a flattened circuit (inline calls first)")
    g = _PLAIN if plain else _GLYPHS

    rows: dict[int, int] = {}
    for w, _ in circuit.inputs:
        rows[w] = len(rows)
    for gate_ in circuit.gates:
        for w in ir.gate_wires(gate_):
            if w not in rows:
                rows[w] = len(rows)
    nrows = len(rows)
    if nrows == 0:
        return "(no wires)\n"

    live: dict[int, WireKind] = dict(circuit.inputs)
    # per column and row: (cell text, attach mode) where attach is "both",
    # "right" (init), or "left" (term/discard); wire char per row underneath
    columns: list[tuple[list[tuple[str, str]], list[str]]] = []

    def wire_chars() -> list[str]:
        state = [" "] * nrows
        for w, k in live.items():
            state[rows[w]] = g["qwire"] if k == WireKind.QUANTUM else g["cwire"]
        return state

    for gate_ in circuit.gates:
        if isinstance(gate_, Comment):
            continue
        cells: list[tuple[str, str]] = [("", "both")] * nrows
        span = None
        if isinstance(gate_, Unitary):
            marked = []
            for t in gate_.targets:
                box = g["oplus"] if gate_.name in ("not", "X") and len(
                    gate_.targets) == 1 else f"[{gate_.name}]"
                cells[rows[t]] = (box, "both")
                marked.append(rows[t])
            for c in list(gate_.controls) + list(gate_.classical_controls):
                cells[rows[c.wire]] = (g["dot"] if c.positive else g["odot"], "both")
                marked.append(rows[c.wire])
            if len(marked) > 1:
                span = (min(marked), max(marked))
        elif isinstance(gate_, Init):
            live[gate_.wire] = gate_.kind
            cells[rows[gate_.wire]] = (g["ket"][int(gate_.value)], "right")
        elif isinstance(gate_, TermAssert):
            cells[rows[gate_.wire]] = (g["term"][int(gate_.value)], "left")
        elif isinstance(gate_, Discard):
            cells[rows[gate_.wire]] = (g["discard"], "left")
        elif isinstance(gate_, Measure):
            cells[rows[gate_.wire]] = ("[M]", "both")
        elif isinstance(gate_, ClassicalGate):
            marked = []
            for t in gate_.targets:
                cells[rows[t]] = (f"[{gate_.name}]", "both")
                marked.append(rows[t])
            for s in gate_.sources:
                cells[rows[s]] = (g["dot"], "both")
                marked.append(rows[s])
            if len(marked) > 1:
                span = (min(marked), max(marked))
        state = wire_chars()
        if span:
            for r in range(span[0] + 1, span[1]):
                if cells[r][0] == "":
                    cells[r] = (g["vert"], "both")
        columns.append((cells, state))
        if isinstance(gate_, (TermAssert, Discard)):
            del live[gate_.wire]
        elif isinstance(gate_, Measure):
            live[gate_.wire] = WireKind.CLASSICAL

    id_width = max(len(str(w)) for w in rows)
    labels = [""] * nrows
    for w, r in rows.items():
        labels[r] = f"{w:>{id_width}}: "
    plen = id_width + 2

    rendered_cols: list[tuple[int, list[str]]] = []
    for cells, state in columns:
        cw = max(max((len(c) for c, _ in cells), default=0), 1) + 2
        col_rows = []
        for r in range(nrows):
            cell, attach = cells[r]
            col_rows.append(_pad_cell(cell, attach, cw, state[r]))
        rendered_cols.append((cw, col_rows))

    banks: list[list[tuple[int, list[str]]]] = [[]]
    used = plen
    for cw, col_rows in rendered_cols:
        if banks[-1] and used + cw > width:
            banks.append([])
            used = plen
        banks[-1].append((cw, col_rows))
        used += cw

    out = []
    for bi, bank in enumerate(banks):
        if bi:
            out.append("")
        for r in range(nrows):
            line = labels[r]
            for _, col_rows in bank:
                line += col_rows[r]
            out.append(line.rstrip())
    return "\n".join(out) + "\n"


def _pad_cell(cell: str, attach: str, width: int, wire_ch: str) -> str:
    if not cell:
        return wire_ch * width
    pad = width - len(cell)
    left = pad // 2
    right = pad - left
    lfill = wire_ch if attach in ("both", "left") and wire_ch != " " else " "
    rfill = wire_ch if attach in ("both", "right") and wire_ch != " " else " "
    return lfill * left + cell + rfill * right
