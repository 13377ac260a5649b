"""Endpoint handlers and the FastAPI application.

Every handler is an ordinary function so the command-line driver can invoke
it without a network hop; `create_app` mounts the same handlers over HTTP.
Domain failures become 400 responses whose body says whether the request
itself was malformed (`bad-request`) or the circuit work failed (`domain`).
"""

from contextlib import contextmanager

import numpy as np
from fastapi import FastAPI, HTTPException

from .. import builder, classical, formats, ir, registry, sim, transforms
from .. import examples as examples_mod
from ..qdata import QDataError
from . import models

_BAD_REQUEST = (ValueError, KeyError, classical.ClassicalError)
_DOMAIN = (ir.CircuitError, builder.BuildError, transforms.TransformError,
           formats.FormatError, sim.SimulationError, registry.RegistryError,
           QDataError)


@contextmanager
def _translated():
    try:
        yield
    except _BAD_REQUEST as e:
        msg = e.args[0] if e.args else str(e)
        raise HTTPException(400, detail={"kind": "bad-request",
                                         "message": str(msg)}) from e
    except _DOMAIN as e:
        raise HTTPException(400, detail={"kind": "domain",
                                         "message": str(e)}) from e


def list_examples() -> models.ExampleList:
    return models.ExampleList(examples=[
        models.ExampleInfo(name=s.name, description=s.description,
                           params=list(s.params))
        for s in examples_mod.EXAMPLES.values()])


def build_example(req: models.BuildRequest) -> models.CircuitText:
    with _translated():
        if req.with_w:
            examples_mod.register_w()
        circuit = examples_mod.build_example(req.name, dict(req.params))
        return models.CircuitText(text=formats.serialize(circuit))


def validate(req: models.ValidateRequest) -> models.ValidateResponse:
    with _translated():
        circuit = formats.parse(req.text, check=False)
        problems = ir.validate(circuit)
        return models.ValidateResponse(
            ok=not problems, problems=problems,
            gates=len(circuit.gates), inputs=len(circuit.inputs),
            outputs=len(circuit.outputs), subroutines=len(circuit.subroutines))


_TARGETS = {"toffoli": transforms.DecomposeTarget.TOFFOLI,
            "binary": transforms.DecomposeTarget.BINARY}


def transform(req: models.TransformRequest) -> models.CircuitText:
    with _translated():
        circuit = formats.parse(req.text)
        if req.reverse:
            circuit = transforms.reverse_circuit(circuit)
        if req.decompose != "none":
            circuit = transforms.decompose(circuit, _TARGETS[req.decompose])
        if req.inline:
            circuit = transforms.inline_all(circuit)
        return models.CircuitText(text=formats.serialize(circuit))


def gatecount(req: models.GateCountRequest) -> models.GateCountResponse:
    with _translated():
        circuit = formats.parse(req.text)
        report = transforms.gate_count(circuit, aggregate=req.aggregate)
        entries = [models.CountEntry(name=name, controls=a,
                                     classical_controls=b, count=cnt)
                   for (name, a, b), cnt in report.entries.items()]
        return models.GateCountResponse(
            entries=entries, total=report.total, inputs=report.inputs,
            outputs=report.outputs, max_wires=report.max_wires,
            report=formats.render_counts(report))


def render(req: models.RenderRequest) -> models.RenderResponse:
    with _translated():
        circuit = formats.parse(req.text)
        if req.format == "text":
            out = formats.serialize(circuit)
        elif req.format == "ascii":
            out = formats.render_ascii(circuit, width=req.width,
                                       plain=req.plain)
        else:
            report = transforms.gate_count(circuit, aggregate=req.aggregate)
            out = formats.render_counts(report)
        return models.RenderResponse(output=out)


def _result_text(result: sim.RunResult) -> str:
    lines = []
    if result.bits:
        pairs = ", ".join(f"{w}={int(v)}" for w, v in sorted(result.bits.items()))
        lines.append(f"Bits: {pairs}")
    else:
        lines.append("Bits: none")
    if result.wires:
        lines.append("Qubits: " + ", ".join(str(w) for w in result.wires))
        n = len(result.wires)
        for i, amp in enumerate(result.amplitudes):
            if abs(amp) < 1e-9:
                continue
            lines.append(f"|{i:0{n}b}> {amp.real:+.6f}{amp.imag:+.6f}i")
    else:
        lines.append("Qubits: none")
    return "\n".join(lines) + "\n"


def simulate(req: models.SimulateRequest) -> models.SimulateResponse:
    with _translated():
        circuit = formats.parse(req.text)
        if req.shots > 1:
            counts = sim.run_shots(circuit, req.input, shots=req.shots,
                                   seed=req.seed)
            text = f"Shots: {req.shots}\n" + "".join(
                f"{pattern}: {counts[pattern]}\n" for pattern in sorted(counts))
            return models.SimulateResponse(bits={}, wires=[], amplitudes=[],
                                           counts=counts, text=text)
        result = sim.simulate(circuit, req.input, seed=req.seed)
        amps = [models.Amplitude(index=i, re=float(a.real), im=float(a.imag))
                for i, a in enumerate(np.asarray(result.amplitudes))
                if abs(a) >= 1e-9]
        return models.SimulateResponse(bits=result.bits,
                                       wires=list(result.wires),
                                       amplitudes=amps,
                                       text=_result_text(result))


def boolean_simulate(req: models.BooleanSimulateRequest) -> models.BooleanSimulateResponse:
    with _translated():
        circuit = formats.parse(req.text)
        return models.BooleanSimulateResponse(
            output=sim.boolean_simulate(circuit, req.input))


def lift_expr(req: models.LiftRequest) -> models.CircuitText:
    with _translated():
        expr = classical.parse_expr(req.expr)
        if req.reversible:
            circuit = examples_mod.oracle_reversible(expr, req.n)
        else:
            circuit = examples_mod.oracle_lifted(expr, req.n)
        return models.CircuitText(text=formats.serialize(circuit))


def create_app() -> FastAPI:
    app = FastAPI(title="qcdl", version="0.1.0",
                  description="circuit toolkit service")
    app.get("/examples", response_model=models.ExampleList)(list_examples)
    app.post("/examples/build", response_model=models.CircuitText)(build_example)
    app.post("/circuits/validate", response_model=models.ValidateResponse)(validate)
    app.post("/circuits/transform", response_model=models.CircuitText)(transform)
    app.post("/circuits/gatecount", response_model=models.GateCountResponse)(gatecount)
    app.post("/circuits/render", response_model=models.RenderResponse)(render)
    app.post("/circuits/simulate", response_model=models.SimulateResponse)(simulate)
    app.post("/circuits/boolean-simulate",
             response_model=models.BooleanSimulateResponse)(boolean_simulate)
    app.post("/oracles/lift", response_model=models.CircuitText)(lift_expr)
    return app


app = create_app()
