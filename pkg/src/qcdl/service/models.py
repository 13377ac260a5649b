"""Request and response bodies.

Circuits travel as their canonical text serialization; the text grammar is
the one interchange format, so every endpoint that takes or returns a
circuit takes or returns that string.
"""

from typing import Literal

from pydantic import BaseModel, Field


class ExampleInfo(BaseModel):
    name: str
    description: str
    params: list[str]


class ExampleList(BaseModel):
    examples: list[ExampleInfo]


class BuildRequest(BaseModel):
    name: str
    # generator parameters (n, l, t, expr, reversible, oracle_only)
    params: dict[str, bool | int | float | str] = Field(default_factory=dict)
    # register the W matrix and its inverse metadata before building
    with_w: bool = False


class CircuitText(BaseModel):
    text: str


class ValidateRequest(BaseModel):
    text: str


class ValidateResponse(BaseModel):
    ok: bool
    problems: list[str]
    gates: int
    inputs: int
    outputs: int
    subroutines: int


class TransformRequest(BaseModel):
    text: str
    reverse: bool = False
    decompose: Literal["none", "toffoli", "binary"] = "none"
    inline: bool = False


class GateCountRequest(BaseModel):
    text: str
    aggregate: bool = True


class CountEntry(BaseModel):
    name: str
    controls: int
    classical_controls: int
    count: int


class GateCountResponse(BaseModel):
    entries: list[CountEntry]
    total: int
    inputs: int
    outputs: int
    max_wires: int
    report: str


class RenderRequest(BaseModel):
    text: str
    format: Literal["text", "ascii", "gatecount"] = "text"
    plain: bool = False
    width: int = Field(default=100, ge=20)
    aggregate: bool = True


class RenderResponse(BaseModel):
    output: str


class SimulateRequest(BaseModel):
    text: str
    input: str | None = None
    seed: int = 0
    shots: int = Field(default=1, ge=1)


class Amplitude(BaseModel):
    index: int
    re: float
    im: float


class SimulateResponse(BaseModel):
    bits: dict[int, bool]
    wires: list[int]
    # non-negligible amplitudes over `wires`, basis index ascending
    amplitudes: list[Amplitude]
    counts: dict[str, int] | None = None
    text: str


class BooleanSimulateRequest(BaseModel):
    text: str
    input: str | None = None


class BooleanSimulateResponse(BaseModel):
    output: str


class LiftRequest(BaseModel):
    expr: str
    n: int | None = Field(default=None, ge=1)
    reversible: bool = False


class ErrorBody(BaseModel):
    kind: Literal["bad-request", "domain"]
    message: str
