"""Acceptance suite: one test per shipping criterion.

Each test prints a single verdict line (visible under `pytest -v -s` or on
failure) and enforces its own wall-clock budget, so a regression in either
behavior or asymptotics fails the same gate.
"""

import math
import random
import re
import time
from contextlib import contextmanager

import numpy as np

from conftest import golden
from qcdl import builder, classical, examples, formats, ir, registry, sim, transforms
from qcdl.builder import QubitRef
from qcdl.ir import (
    Call,
    Circuit,
    Comment,
    Init,
    SubroutineDef,
    TermAssert,
    Unitary,
    WireKind,
    neg,
    pos,
)

Q = WireKind.QUANTUM


@contextmanager
def budget(label: str, seconds: float):
    start = time.monotonic()
    yield
    elapsed = time.monotonic() - start
    verdict = "pass" if elapsed < seconds else "OVER BUDGET"
    print(f"{label}: {verdict} ({elapsed:.2f}s of {seconds:g}s)")
    assert elapsed < seconds, \
        f"{label}: {elapsed:.2f}s exceeds the {seconds:g}s budget"


# ---------------------------------------------------------------------------
# random generators (seeded per test; all single-qubit-target families)

GATE_POOL = ("not", "X", "Y", "Z", "H", "S", "S_inv", "T", "T_inv", "exp(-iZt)")


def random_unitary_circuit(rng: random.Random, n_qubits: int, n_gates: int,
                           max_controls: int = 3) -> Circuit:
    ctx = builder.new_context()
    qs = [builder.input_qubit(ctx) for _ in range(n_qubits)]
    for _ in range(n_gates):
        name = rng.choice(GATE_POOL)
        target = rng.randrange(n_qubits)
        others = [w for w in range(n_qubits) if w != target]
        rng.shuffle(others)
        n_ctrl = rng.randint(0, min(max_controls, len(others)))
        controls = [pos(w) if rng.random() < 0.5 else neg(w)
                    for w in others[:n_ctrl]]
        params = (rng.uniform(-math.pi, math.pi),) if name == "exp(-iZt)" else ()
        builder.gate(ctx, name, [qs[target]], params=params, controls=controls)
    return builder.finalize(ctx, qs)


def random_expr(rng: random.Random, n_vars: int, depth: int) -> classical.ClassicalExpr:
    # leaf probability grows with depth; depth is hard-capped at 10
    if depth >= 10 or rng.random() < 0.28 + 0.07 * depth:
        if rng.random() < 0.12:
            return classical.Const(rng.random() < 0.5)
        return classical.Var(rng.randrange(n_vars))
    op = rng.randrange(4)
    if op == 0:
        return classical.Not(random_expr(rng, n_vars, depth + 1))
    cls = (classical.And, classical.Or, classical.Xor)[op - 1]
    return cls(random_expr(rng, n_vars, depth + 1),
               random_expr(rng, n_vars, depth + 1))


# ---------------------------------------------------------------------------
# criteria

def test_c01_listing_fidelity():
    with budget("C1 listing fidelity", 1.0):
        for name in ("mycirc", "mycirc2", "mycirc3", "timestep"):
            built = examples.build_example(name, {})
            assert formats.serialize(built) == golden(f"{name}.txt"), name


def test_c02_parity_oracle_reproduction():
    with budget("C2 parity oracle reproduction", 1.0):
        c = examples.parity_lifted(4)
        wires = {w for w, _ in c.inputs}
        for g in c.gates:
            wires.update(ir.gate_wires(g))
        assert len(wires) == 7
        assert len(c.inputs) == 4
        # 4 inputs pass through, 2 scratch wires stay live, result wire last
        assert len(c.outputs) == 7
        for x in range(16):
            bits = f"{x:04b}"
            out = sim.boolean_simulate(c, bits)
            assert out[:4] == bits
            assert out[-1] == str(bits.count("1") % 2)


def test_c03_reversibilization():
    with budget("C3 reversibilization", 5.0):
        for n in range(1, 9):
            c = examples.parity_reversible(n)
            for v in range(2 ** (n + 1)):
                bits = f"{v:0{n + 1}b}"
                x, y = bits[:n], int(bits[n])
                out = sim.boolean_simulate(c, bits)  # raises on TermAssert failure
                assert out == x + str(y ^ (x.count("1") % 2))


def test_c04_random_oracle_equivalence():
    with budget("C4 random-oracle equivalence", 30.0):
        rng = random.Random(404)
        for _ in range(200):
            n = rng.randint(1, 8)
            expr = random_expr(rng, n, 0)
            while classical.operator_nodes(expr) > 40:
                expr = random_expr(rng, n, 0)
            f = classical.ClassicalFunc(n, (expr,))

            ctx = builder.new_context()
            ins = [builder.input_qubit(ctx) for _ in range(n)]
            root = classical.lift(ctx, f, ins)[0].wire
            lifted = builder.finalize(ctx, [QubitRef(w) for w in ctx.live])
            inits = sum(isinstance(g, Init) for g in lifted.gates)
            assert inits == classical.operator_nodes(expr)

            root_pos = [w for w, _ in lifted.outputs].index(root)
            rev = examples.oracle_reversible(expr, n)
            for v in range(2 ** n):
                x = f"{v:0{n}b}"
                fx = classical.evaluate(f, x)
                assert sim.boolean_simulate(lifted, x)[root_pos] == fx
                for y in ("0", "1"):
                    flipped = "1" if (y == "1") != (fx == "1") else "0"
                    assert sim.boolean_simulate(rev, x + y) == x + flipped


def test_c05_transform_soundness():
    with budget("C5 transform soundness", 60.0):
        rng = random.Random(505)
        nrng = np.random.default_rng(505)
        cases = [examples.timestep()]
        for _ in range(50):
            cases.append(random_unitary_circuit(
                rng, rng.randint(2, 5), rng.randint(5, 15)))
        for c in cases:
            n = len(c.inputs)
            dim = 2 ** n
            states = []
            for _ in range(10):
                psi = nrng.normal(size=dim) + 1j * nrng.normal(size=dim)
                states.append(psi / np.linalg.norm(psi))
            reference = [sim.simulate(c, psi).amplitudes for psi in states]
            for target, width in (("binary", 2), ("toffoli", 3)):
                dec = transforms.decompose(c, target)
                for g in dec.gates:
                    if not isinstance(g, Comment):
                        assert len(ir.gate_wires(g)) <= width
                for psi, ref in zip(states, reference):
                    got = sim.simulate(dec, psi).amplitudes
                    assert abs(np.vdot(ref, got)) >= 1 - 1e-9


def _ancilla_involution_case(rng: random.Random) -> Circuit:
    ctx = builder.new_context()
    q = builder.input_qubit(ctx)

    def body(a):
        builder.qnot(ctx, a, controls=[q])
        builder.gate(ctx, "exp(-iZt)", [a], params=(rng.uniform(-1, 1),))
        builder.qnot(ctx, a, controls=[q])

    builder.with_ancilla(ctx, body)
    return builder.finalize(ctx, [q])


def _boxed_involution_case(tag: int) -> Circuit:
    ctx = builder.new_context()
    qs = [builder.input_qubit(ctx) for _ in range(2)]

    def step(sub, formals):
        builder.hadamard(sub, formals[0])
        builder.gate(sub, "T", [formals[1]], controls=[pos(formals[0].wire)])
        return formals

    builder.box(ctx, f"step{tag}", step, qs)
    builder.box(ctx, f"step{tag}", step, qs)
    return builder.finalize(ctx, qs)


def test_c06_reversal():
    with budget("C6 reversal", 30.0):
        rng = random.Random(606)
        for case in range(1000):
            if case % 10 == 9:
                c = _boxed_involution_case(case)
            elif case % 5 == 4:
                c = _ancilla_involution_case(rng)
            else:
                c = random_unitary_circuit(rng, rng.randint(1, 6),
                                           rng.randint(3, 12))
            assert transforms.reverse_circuit(transforms.reverse_circuit(c)) == c
        for _ in range(20):
            n = rng.randint(2, 5)
            c = random_unitary_circuit(rng, n, rng.randint(5, 12))
            round_trip = ir.concat(c, transforms.reverse_circuit(c))
            for v in range(2 ** n):
                r = sim.simulate(round_trip, f"{v:0{n}b}")
                assert abs(abs(r.amplitudes[v]) - 1) <= 1e-9


def test_c07_hierarchical_counting_at_scale():
    with budget("C7 hierarchical counting", 1.0):
        table = {"s0": SubroutineDef(
            "s0", Circuit(((0, Q),), (Unitary("H", (0,)),), ((0, Q),)))}
        for k in range(1, 5):
            body = Circuit(((0, Q),),
                           tuple(Call(f"s{k - 1}", (0,), (0,)) for _ in range(100)),
                           ((0, Q),))
            table[f"s{k}"] = SubroutineDef(f"s{k}", body)
        top = Circuit(((0, Q),),
                      tuple(Call("s4", (0,), (0,)) for _ in range(100)),
                      ((0, Q),), table)
        assert ir.validate(top) == []
        report = transforms.gate_count(top)
        assert report.total == 10 ** 10
        assert report.entries == {("H", 0, 0): 10 ** 10}
        assert report.max_wires == 1

        # a small nest must count identically with and without inlining
        leaf = Circuit(((0, Q), (1, Q)),
                       (Unitary("H", (0,)), Unitary("not", (1,), controls=(pos(0),))),
                       ((0, Q), (1, Q)))
        mid = Circuit(((0, Q), (1, Q)),
                      tuple(Call("leaf", (0, 1), (0, 1)) for _ in range(3)),
                      ((0, Q), (1, Q)))
        small = Circuit(
            ((0, Q), (1, Q), (2, Q)),
            (Unitary("T", (2,)),)
            + tuple(Call("mid", (0, 1), (0, 1)) for _ in range(3))
            + (Call("mid", (0, 1), (0, 1), controls=(pos(2),)),),
            ((0, Q), (1, Q), (2, Q)),
            {"leaf": SubroutineDef("leaf", leaf), "mid": SubroutineDef("mid", mid)})
        agg = transforms.gate_count(small)
        flat = transforms.gate_count(transforms.inline_all(small))
        assert agg.entries == flat.entries
        assert agg.total == flat.total
        assert agg.max_wires == flat.max_wires


def test_c08_count_report_format():
    with budget("C8 count report format", 1.0):
        mycirc_report = formats.render_counts(transforms.gate_count(examples.mycirc()))
        assert mycirc_report == golden("counts_mycirc.txt")
        bwt_report = formats.render_counts(
            transforms.gate_count(examples.bwt_diffusion(1)))
        assert bwt_report == golden("counts_bwt1.txt")
        assert ", controls 1+1" in bwt_report
        assert re.search(r", controls \d\n", bwt_report)


def test_c09_assertive_termination_semantics():
    with budget("C9 assertive termination", 1.0):
        bad = Circuit((), (Init(0, Q, False), Unitary("not", (0,)),
                           TermAssert(0, Q, False)), ())
        try:
            sim.simulate(bad)
            raise AssertionError("TermAssert on |1> did not raise")
        except sim.TermAssertionError as e:
            reported = float(re.search(r"\(p = ([^)]+)\)", str(e)).group(1))
            assert abs(reported - 1.0) <= 1e-9

        saved = dict(registry._REGISTRY)
        try:
            examples.register_w()
            clean = [examples.mycirc3(), examples.timestep(), examples.timestep2(),
                     examples.bwt_diffusion(1),
                     examples.adder(2),
                     examples.parity_reversible(3),
                     examples.oracle_reversible(
                         classical.parse_expr("(or v0 (and v1 (not v2)))"))]
            for c in clean:
                sim.simulate(c)  # TermAssertionError here fails the criterion
        finally:
            registry._REGISTRY.clear()
            registry._REGISTRY.update(saved)


def test_c10_dynamic_lifting():
    with budget("C10 dynamic lifting", 5.0):
        tails = set()
        for seed in range(100):
            ctx = builder.new_context(builder.Interactive(seed=seed))
            q = builder.qinit_bool(ctx, False)
            builder.hadamard(ctx, q)
            b = builder.measure(ctx, q)
            v = builder.dynamic_lift(ctx, b)
            q2 = builder.qinit_bool(ctx, v)
            if v:
                builder.qnot(ctx, q2)
            c = builder.finalize(ctx, [q2, b])

            live = ctx.backend.session.result()
            assert live.wires == (q2.wire,)
            assert abs(live.amplitudes[0] - 1) <= 1e-9

            replay = sim.simulate(c, seed=seed)  # same stream, same branch
            assert abs(replay.amplitudes[0] - 1) <= 1e-9
            assert replay.bits[b.wire] is v

            measure_at = next(i for i, g in enumerate(c.gates)
                              if isinstance(g, ir.Measure))
            tails.add(tuple(type(g).__name__ for g in c.gates[measure_at + 1:]))
        assert tails == {("Init",), ("Init", "Unitary")}


def test_c11_measurement_statistics():
    with budget("C11 measurement statistics", 5.0):
        ctx = builder.new_context()
        q = builder.qinit_bool(ctx, False)
        builder.hadamard(ctx, q)
        b = builder.measure(ctx, q)
        c = builder.finalize(ctx, [b])
        counts = sim.run_shots(c, shots=10000, seed=0)
        assert set(counts) <= {"0", "1"}
        assert sum(counts.values()) == 10000
        ones = counts.get("1", 0) / 10000
        assert 0.47 <= ones <= 0.53


def test_c12_adder():
    with budget("C12 adder", 10.0):
        for l in range(1, 5):
            c = examples.adder(l)
            r = transforms.reverse_circuit(c)
            assert transforms.reverse_circuit(r) == c
            for a in range(2 ** l):
                abits = f"{a:0{l}b}"[::-1]  # little-endian registers
                for b in range(2 ** l):
                    bbits = f"{b:0{l}b}"[::-1]
                    total = (a + b) % 2 ** l
                    tbits = f"{total:0{l}b}"[::-1]
                    assert sim.boolean_simulate(c, abits + bbits) == abits + tbits
                    diff = (b - a) % 2 ** l
                    dbits = f"{diff:0{l}b}"[::-1]
                    assert sim.boolean_simulate(r, abits + bbits) == abits + dbits


def _random_grammar_circuit(seed: int) -> Circuit:
    rng = random.Random(seed)
    ctx = builder.new_context()
    live_q = [builder.input_qubit(ctx) for _ in range(rng.randint(1, 4))]
    live_b = [builder.input_bit(ctx) for _ in range(rng.randint(0, 2))]
    for step in range(rng.randint(4, 14)):
        roll = rng.random()
        if roll < 0.40 and live_q:
            name = rng.choice(GATE_POOL)
            t = rng.choice(live_q)
            others = [q for q in live_q if q.wire != t.wire]
            rng.shuffle(others)
            ctrls = [pos(q.wire) if rng.random() < 0.5 else neg(q.wire)
                     for q in others[:rng.randint(0, 2)]]
            if live_b and rng.random() < 0.4:
                bc = rng.choice(live_b)
                ctrls.append(pos(bc.wire) if rng.random() < 0.5 else neg(bc.wire))
            params = (rng.uniform(-math.pi, math.pi),) if name == "exp(-iZt)" else ()
            builder.gate(ctx, name, [t], params=params, controls=ctrls)
        elif roll < 0.50:
            live_q.append(builder.qinit_bool(ctx, rng.random() < 0.5))
        elif roll < 0.58:
            live_b.append(builder.cinit_bool(ctx, rng.random() < 0.5))
        elif roll < 0.66 and len(live_q) > 1:
            live_b.append(builder.measure(ctx, live_q.pop(rng.randrange(len(live_q)))))
        elif roll < 0.72 and live_b:
            builder.discard(ctx, live_b.pop(rng.randrange(len(live_b))))
        elif roll < 0.76 and len(live_q) > 1:
            builder.discard(ctx, live_q.pop(rng.randrange(len(live_q))))
        elif roll < 0.82 and live_q:
            w = rng.choice(live_q)
            builder.comment_with_label(ctx, f'mark "{step}"', [w], [f"w{step}"])
        elif roll < 0.90 and live_q:
            tgt = rng.choice(live_q)

            def body(a, _t=tgt):
                builder.qnot(ctx, a, controls=[_t])
                builder.qnot(ctx, a, controls=[_t])

            builder.with_ancilla(ctx, body)
        elif live_q:
            who = rng.choice(live_q)

            def blk(sub, formals):
                builder.hadamard(sub, formals[0])
                builder.gate(sub, "S", [formals[0]])
                return formals

            if rng.random() < 0.3 and len(live_q) > 1:
                other = rng.choice([q for q in live_q if q.wire != who.wire])
                builder.with_controls(ctx, [other],
                                      lambda: builder.box(ctx, f"b{step}", blk, [who]))
            else:
                builder.box(ctx, f"b{step}", blk, [who])
    if len(live_b) >= 2:
        t = builder.cinit_bool(ctx, False)
        builder.classical_gate(ctx, rng.choice(("and", "or", "xor")), t, live_b[:2])
        live_b.append(t)
    return builder.finalize(ctx, live_q + live_b)


def test_c13_serialization():
    with budget("C13 serialization", 10.0):
        for seed in range(1000):
            c = _random_grammar_circuit(seed)
            assert formats.parse(formats.serialize(c)) == c
        # golden files stay stable
        assert formats.serialize(examples.mycirc()) == golden("mycirc.txt")
        assert formats.serialize(examples.mycirc2()) == golden("mycirc2.txt")
        assert formats.serialize(examples.mycirc3()) == golden("mycirc3.txt")
        assert formats.serialize(examples.timestep()) == golden("timestep.txt")
        assert formats.render_ascii(examples.mycirc()) == golden("ascii_mycirc.txt")
        assert formats.render_ascii(examples.mycirc3()) == golden("ascii_mycirc3.txt")
        assert formats.render_ascii(examples.mycirc3(), plain=True) == \
            golden("ascii_mycirc3_plain.txt")


def test_c14_simulator_agreement():
    with budget("C14 simulator agreement", 30.0):
        corpus = [examples.parity_reversible(n) for n in range(1, 7)]
        corpus += [examples.parity_lifted(n) for n in range(1, 5)]
        corpus += [examples.adder(l) for l in range(1, 5)]
        for text in ("(xor (and v0 v1) (or v2 (not v0)))",
                     "(not (xor v0 (xor v1 v2)))",
                     "(and (or v0 v1) (xor v2 v3))"):
            corpus.append(examples.oracle_reversible(classical.parse_expr(text)))
        rng = random.Random(1414)
        checked = 0
        for c in corpus:
            if ir.max_wire_id(c) + 1 > 12:
                continue
            checked += 1
            k = len(c.inputs)
            if k <= 8:
                input_pool = [f"{v:0{k}b}" for v in range(2 ** k)]
            else:
                input_pool = ["".join(rng.choice("01") for _ in range(k))
                              for _ in range(64)]
            for bits in input_pool:
                fast = sim.boolean_simulate(c, bits)
                full = sim.output_bitstring(sim.simulate(c, bits), c)
                assert fast == full
        assert checked >= 12  # the 12-wire cap must not hollow out the corpus
