"""Circuit-description toolkit: explicit gate-list IR, a procedural builder
with scoped ancillas and boxed subroutines, whole-circuit transforms,
reversible synthesis of boolean expressions, and seeded simulation."""

from .builder import (
    BitRef,
    BuildContext,
    BuildError,
    Interactive,
    QubitRef,
    RecordOnly,
    new_context,
)
from .classical import ClassicalError, ClassicalFunc, parse_expr
from .formats import FormatError, ParseError, parse, render_ascii, render_counts, serialize
from .ir import Circuit, CircuitError, SignedControl, SubroutineDef, WireKind
from .sim import (
    RunResult,
    SimulationError,
    TermAssertionError,
    boolean_simulate,
    run_shots,
    simulate,
)
from .transforms import (
    DecomposeTarget,
    TransformError,
    decompose,
    gate_count,
    inline_all,
    reverse_circuit,
)

__version__ = "0.1.0"

__all__ = [
    "BitRef", "BuildContext", "BuildError", "Circuit", "CircuitError",
    "ClassicalError", "ClassicalFunc", "DecomposeTarget", "FormatError",
    "Interactive", "ParseError", "QubitRef", "RecordOnly", "RunResult",
    "SignedControl", "SimulationError", "SubroutineDef", "TermAssertionError",
    "TransformError", "WireKind", "boolean_simulate", "decompose",
    "gate_count", "inline_all", "new_context", "parse", "parse_expr",
    "render_ascii", "render_counts", "reverse_circuit", "run_shots",
    "serialize", "simulate", "__version__",
]
