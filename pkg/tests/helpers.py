"""Seeded generators shared by the property and acceptance tests."""

import random

from qcdl import builder, classical, ir

# single-qubit pool; every name here is registered with an exact inverse
GATE_1Q = ["H", "not", "X", "Z", "T", "T_inv", "S", "S_inv"]
# basis-preserving subset, safe for the boolean simulator
GATE_CLASSICAL = ["not", "X"]


def random_expr(rand: random.Random, n_vars: int, max_depth: int) -> classical.ClassicalExpr:
    if max_depth <= 0 or rand.random() < 0.3:
        if rand.random() < 0.15:
            return classical.Const(rand.random() < 0.5)
        return classical.Var(rand.randrange(n_vars))
    kind = rand.choice(["not", "and", "or", "xor"])
    if kind == "not":
        return classical.Not(random_expr(rand, n_vars, max_depth - 1))
    left = random_expr(rand, n_vars, max_depth - 1)
    right = random_expr(rand, n_vars, max_depth - 1)
    ctor = {"and": classical.And, "or": classical.Or, "xor": classical.Xor}[kind]
    return ctor(left, right)


def _signed(rand: random.Random, ref) -> ir.SignedControl:
    return ir.pos(ref) if rand.random() < 0.75 else ir.neg(ref)


def _pick_controls(rand: random.Random, qubits, bits, avoid, max_n: int = 2):
    pool = [q for q in qubits if q.wire not in avoid]
    out = [_signed(rand, q)
           for q in rand.sample(pool, min(len(pool), rand.randint(0, max_n)))]
    if bits and rand.random() < 0.25:
        cpool = [b for b in bits if b.wire not in avoid]
        out += [_signed(rand, b)
                for b in rand.sample(cpool, min(len(cpool), rand.randint(1, 2)))]
    return out


def random_circuit(rand: random.Random, *, reversible: bool = False,
                   quantum_only: bool = False, classical_only: bool = False,
                   allow_calls: bool = True, max_inputs: int = 4,
                   n_ops: int | None = None):
    """A valid random circuit built through the public builder API.

    reversible: no measure/discard and only self-reversible classical gates,
    so the result survives reverse_circuit and c;reverse(c) is the identity.
    quantum_only: quantum inputs only and no classical wires at all (needed
    when tests feed raw amplitude vectors).
    classical_only: restrict unitaries to not/X so the boolean simulator can
    replay the circuit.
    """
    ctx = builder.new_context()
    qubits = [builder.input_qubit(ctx) for _ in range(rand.randint(1, max_inputs))]
    bits = [] if quantum_only else [builder.input_bit(ctx)
                                    for _ in range(rand.randint(0, 2))]
    gen = _Gen(rand, reversible=reversible, quantum_only=quantum_only,
               classical_only=classical_only, allow_calls=allow_calls)
    for _ in range(n_ops if n_ops is not None else rand.randint(1, 12)):
        gen.step(ctx, qubits, bits)
    return builder.finalize(ctx, qubits + bits)


class _Gen:
    def __init__(self, rand: random.Random, *, reversible, quantum_only,
                 classical_only, allow_calls):
        self.rand = rand
        self.reversible = reversible
        self.quantum_only = quantum_only
        self.classical_only = classical_only
        self.allow_calls = allow_calls
        self.pool = GATE_CLASSICAL if classical_only else GATE_1Q
        self.boxes: list[tuple[str, object, int]] = []
        self.n_subs = 0

    def step(self, ctx, qubits, bits) -> None:
        rand = self.rand
        ops = ["1q", "1q", "1q", "qinit", "with_controls", "with_ancilla",
               "with_computed", "comment"]
        if self.allow_calls:
            ops += ["box", "box"]
        if not self.quantum_only:
            ops += ["cinit"]
            if len(bits) >= 2:
                ops += ["cgate"]
            if not self.reversible:
                if len(qubits) >= 2:
                    ops += ["measure"]
                if bits:
                    ops += ["discard"]
        getattr(self, "_op_" + rand.choice(ops))(ctx, qubits, bits)

    def _gate_name(self) -> str:
        return self.rand.choice(self.pool)

    def _op_1q(self, ctx, qubits, bits) -> None:
        rand = self.rand
        target = rand.choice(qubits)
        ctrls = _pick_controls(rand, qubits, bits, {target.wire})
        if not self.classical_only and rand.random() < 0.1:
            builder.gate(ctx, "exp(-iZt)", [target],
                         params=[round(rand.uniform(-2.0, 2.0), 3)],
                         controls=ctrls)
        else:
            builder.gate(ctx, self._gate_name(), [target], controls=ctrls)

    def _op_qinit(self, ctx, qubits, bits) -> None:
        qubits.append(builder.qinit_bool(ctx, self.rand.random() < 0.5))

    def _op_cinit(self, ctx, qubits, bits) -> None:
        bits.append(builder.cinit_bool(ctx, self.rand.random() < 0.5))

    def _op_measure(self, ctx, qubits, bits) -> None:
        q = qubits.pop(self.rand.randrange(len(qubits)))
        bits.append(builder.measure(ctx, q))

    def _op_discard(self, ctx, qubits, bits) -> None:
        builder.discard(ctx, bits.pop(self.rand.randrange(len(bits))))

    def _op_cgate(self, ctx, qubits, bits) -> None:
        rand = self.rand
        name = rand.choice(["not", "xor"] if self.reversible
                           else ["not", "xor", "and", "or", "copy"])
        target = rand.choice(bits)
        others = [b for b in bits if b.wire != target.wire]
        if name == "not":
            builder.classical_gate(ctx, name, target)
        else:
            k = 1 if name == "copy" else rand.randint(1, min(2, len(others)))
            builder.classical_gate(ctx, name, target, rand.sample(others, k))

    def _op_with_controls(self, ctx, qubits, bits) -> None:
        rand = self.rand
        frame = _pick_controls(rand, qubits, bits, set(), max_n=2)
        free = [q for q in qubits if q.wire not in {c.wire for c in frame}]
        if not frame or not free:
            return
        def body():
            for _ in range(rand.randint(1, 2)):
                builder.gate(ctx, self._gate_name(), [rand.choice(free)])
        builder.with_controls(ctx, frame, body)

    def _op_with_ancilla(self, ctx, qubits, bits) -> None:
        rand = self.rand
        # the scratch wire only ever controls, so it provably ends in |0>
        def body(anc):
            for _ in range(rand.randint(1, 2)):
                builder.gate(ctx, self._gate_name(), [rand.choice(qubits)],
                             controls=[_signed(rand, anc)])
        builder.with_ancilla(ctx, body)

    def _op_with_computed(self, ctx, qubits, bits) -> None:
        rand = self.rand
        plan = [(self._gate_name(), rand.randrange(len(qubits)))
                for _ in range(rand.randint(1, 3))]
        use_plan = [(self._gate_name(), rand.randrange(len(qubits)))
                    for _ in range(rand.randint(1, 2))]
        def compute():
            for name, i in plan:
                builder.gate(ctx, name, [qubits[i]])
        def use(_):
            for name, i in use_plan:
                builder.gate(ctx, name, [qubits[i]])
        builder.with_computed(ctx, compute, use)

    def _op_box(self, ctx, qubits, bits) -> None:
        rand = self.rand
        reusable = [b for b in self.boxes if b[2] <= len(qubits)]
        if reusable and rand.random() < 0.4:
            name, f, arity = rand.choice(reusable)
        else:
            arity = rand.randint(1, min(2, len(qubits)))
            plan = [(self._gate_name(), rand.randrange(arity))
                    for _ in range(rand.randint(1, 3))]
            def f(sub, ins, _plan=plan):
                for gate_name, i in _plan:
                    builder.gate(sub, gate_name, [ins[i]])
                return ins
            name = f"sub{self.n_subs}"
            self.n_subs += 1
            self.boxes.append((name, f, arity))
        builder.box(ctx, name, f, rand.sample(qubits, arity))

    def _op_comment(self, ctx, qubits, bits) -> None:
        rand = self.rand
        marked = rand.sample(qubits, min(len(qubits), rand.randint(0, 2)))
        builder.comment_with_label(ctx, "checkpoint", marked,
                                   [f"w{i}" for i in range(len(marked))])
