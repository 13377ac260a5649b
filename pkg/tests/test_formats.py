"""Text serialization grammar, parsing, and the two renderers."""
import numpy as np
import pytest

from qcdl import builder, examples, formats, ir, registry, transforms
from qcdl.formats import (
    FormatError,
    ParseError,
    parse,
    render_ascii,
    render_counts,
    serialize,
)
from conftest import golden


# ---------------------------------------------------------------------------
# golden listings

def test_listing_goldens():
    assert serialize(examples.mycirc()) == golden("mycirc.txt")
    assert serialize(examples.mycirc2()) == golden("mycirc2.txt")
    assert serialize(examples.mycirc3()) == golden("mycirc3.txt")
    assert serialize(examples.timestep()) == golden("timestep.txt")


def test_count_goldens():
    rep = transforms.gate_count(examples.mycirc())
    assert render_counts(rep) == golden("counts_mycirc.txt")
    rep = transforms.gate_count(examples.bwt_diffusion(1))
    assert render_counts(rep) == golden("counts_bwt1.txt")


def test_ascii_goldens():
    assert render_ascii(examples.mycirc()) == golden("ascii_mycirc.txt")
    assert render_ascii(examples.mycirc3()) == golden("ascii_mycirc3.txt")
    assert render_ascii(examples.mycirc3(), plain=True) == \
        golden("ascii_mycirc3_plain.txt")


# ---------------------------------------------------------------------------
# serialization shape

def test_empty_circuit_listing():
    ctx = builder.new_context()
    c = builder.finalize(ctx, [])
    assert serialize(c) == "Inputs: none\nOutputs: none\n"


def test_listing_ends_with_newline():
    for c in (examples.mycirc(), examples.mycirc3()):
        assert serialize(c).endswith("\n")


def test_discard_lines_track_wire_kind():
    ctx = builder.new_context()
    a = builder.input_qubit(ctx)
    b = builder.input_qubit(ctx)
    m = builder.measure(ctx, b)
    builder.discard(ctx, a)
    builder.discard(ctx, m)
    keep = builder.qinit_bool(ctx, True)
    c = builder.finalize(ctx, [keep])
    text = serialize(c)
    assert "QDiscard(0)" in text
    assert "CDiscard(1)" in text
    assert "QMeas(1)" in text
    assert "QInit1(2)" in text


def test_subroutine_blocks_sorted_and_separated():
    ctx = builder.new_context()
    q = builder.input_qubit(ctx)

    def f(sub, ins):
        builder.qnot(sub, ins[0])
        return ins

    def g(sub, ins):
        builder.hadamard(sub, ins[0])
        return ins

    builder.box(ctx, "zeta", f, [q])
    builder.box(ctx, "alpha", g, [q])
    c = builder.finalize(ctx, [q])
    text = serialize(c)
    alpha = text.index('Subroutine: "alpha"')
    zeta = text.index('Subroutine: "zeta"')
    assert alpha < zeta
    # a blank line opens each block
    assert '\n\nSubroutine: "alpha"\n' in text
    assert '\n\nSubroutine: "zeta"\n' in text


def test_quoting_round_trip():
    registry.register_gate('na"me\\x', 1, np.eye(2))
    ctx = builder.new_context()
    q = builder.input_qubit(ctx)
    builder.gate(ctx, 'na"me\\x', [q])
    builder.comment_with_label(ctx, 'say "hi"\\n', [q], ['l"bl'])
    c = builder.finalize(ctx, [q])
    text = serialize(c)
    assert r'QGate["na\"me\\x"](0)' in text
    assert parse(text) == c


# ---------------------------------------------------------------------------
# parsing

def test_parse_round_trips_examples():
    circuits = [
        examples.mycirc(),
        examples.mycirc2(),
        examples.mycirc3(),
        examples.timestep(),
        examples.bwt_diffusion(2, 0.7),
        examples.adder(2),
        examples.parity_reversible(3),
    ]
    for c in circuits:
        assert parse(serialize(c)) == c


def test_parse_error_reports_line():
    with pytest.raises(ParseError, match="line 2: expected opening quote"):
        parse('Inputs: none\nQGate[x](0)\nOutputs: none\n')


def test_parse_error_control_token():
    with pytest.raises(ParseError, match="malformed control token '\\*3'"):
        parse('Inputs: 0:Qbit\nQGate["not"](0) ctrls=[*3]\nOutputs: 0:Qbit\n')


def test_parse_checks_circuit():
    bad = 'Inputs: 0:Qbit\nQGate["not"](1)\nOutputs: 0:Qbit\n'
    with pytest.raises(ParseError, match="circuit does not validate"):
        parse(bad)
    # check=False defers validation to the caller
    c = parse(bad, check=False)
    assert ir.validate(c) != []


def test_parse_duplicate_subroutine():
    text = (
        "Inputs: none\nOutputs: none\n"
        '\nSubroutine: "s"\nInputs: 0:Qbit\nOutputs: 0:Qbit\n'
        '\nSubroutine: "s"\nInputs: 0:Qbit\nOutputs: 0:Qbit\n'
    )
    with pytest.raises(ParseError, match="duplicate subroutine 's'"):
        parse(text)


def test_parse_missing_headers():
    with pytest.raises(ParseError):
        parse('QGate["not"](0)\n')
    with pytest.raises(ParseError):
        parse("Inputs: 0:Qbit\n")


def test_parse_tolerates_missing_trailing_newline():
    c = examples.mycirc()
    text = serialize(c)
    assert parse(text.rstrip("\n")) == c


# ---------------------------------------------------------------------------
# count rendering

def test_render_counts_headers():
    c = examples.mycirc()
    agg = render_counts(transforms.gate_count(c, aggregate=True))
    assert agg.startswith("Aggregated gate count:\n")
    flat = render_counts(transforms.gate_count(c, aggregate=False))
    assert flat.startswith("Gate count:\n")


def test_render_counts_control_suffixes():
    ctx = builder.new_context()
    qs = [builder.input_qubit(ctx) for _ in range(3)]
    builder.qnot(ctx, qs[0], controls=[qs[1]])
    builder.qnot(ctx, qs[0], controls=[ir.neg(qs[1]), ir.pos(qs[2])])
    builder.hadamard(ctx, qs[1])
    c = builder.finalize(ctx, qs)
    out = render_counts(transforms.gate_count(c))
    assert '1: "H"\n' in out
    assert '1: "not", controls 1\n' in out
    assert '1: "not", controls 1+1\n' in out
    assert "Total gates: 3" in out
    assert "Qubits in circuit: 3" in out


def test_render_counts_right_aligns():
    ctx = builder.new_context()
    q = builder.input_qubit(ctx)
    for _ in range(12):
        builder.hadamard(ctx, q)
    builder.qnot(ctx, q)
    c = builder.finalize(ctx, [q])
    out = render_counts(transforms.gate_count(c))
    lines = out.splitlines()
    assert '12: "H"' in lines
    assert ' 1: "not"' in lines


# ---------------------------------------------------------------------------
# wire diagrams

def test_ascii_marks_measurement_kind_change():
    ctx = builder.new_context()
    q = builder.input_qubit(ctx)
    r = builder.input_qubit(ctx)
    builder.hadamard(ctx, q)
    b = builder.measure(ctx, q)
    builder.gate(ctx, "not", [r], controls=[b])
    c = builder.finalize(ctx, [b, r])
    art = render_ascii(c, plain=True)
    line = next(l for l in art.splitlines() if l.startswith("0:"))
    assert "[M]" in line
    before, after = line.split("[M]")
    # single line going in, double line in the columns that follow
    assert "-" in before and "=" not in before
    assert "=" in after


def test_ascii_init_and_term_attach():
    ctx = builder.new_context()
    q = builder.input_qubit(ctx)

    def body(a):
        builder.controlled_not(ctx, a, q)
        builder.controlled_not(ctx, a, q)

    builder.with_ancilla(ctx, body)
    c = builder.finalize(ctx, [q])
    art = render_ascii(c, plain=True)
    anc = next(l for l in art.splitlines() if l.startswith("1:"))
    # born mid-line, dies mid-line: state glyphs bound the wire
    assert anc.index("|0>") < anc.rindex("|0>")
    assert not anc.rstrip().endswith("-")


def test_ascii_controls_and_banks():
    c = examples.mycirc2()
    wide = render_ascii(c, plain=True)
    narrow = render_ascii(c, width=24, plain=True)
    assert wide.count("0:") == 1
    assert narrow.count("0:") > 1  # wrapped into banks
    assert "*" in wide  # positive control dot

    ctx = builder.new_context()
    a = builder.input_qubit(ctx)
    b = builder.input_qubit(ctx)
    builder.qnot(ctx, a, controls=[ir.neg(b)])
    neg_c = builder.finalize(ctx, [a, b])
    assert "o" in render_ascii(neg_c, plain=True)  # negative control dot


def test_ascii_rejects_calls():
    ctx = builder.new_context()
    q = builder.input_qubit(ctx)

    def f(sub, ins):
        builder.qnot(sub, ins[0])
        return ins

    builder.box(ctx, "flip", f, [q])
    c = builder.finalize(ctx, [q])
    with pytest.raises(FormatError, match="inline calls first"):
        render_ascii(c)


def test_ascii_unicode_and_plain_share_layout():
    c = examples.mycirc()
    u = render_ascii(c).splitlines()
    p = render_ascii(c, plain=True).splitlines()
    assert len(u) == len(p)
