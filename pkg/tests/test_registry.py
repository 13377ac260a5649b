import numpy as np
import pytest

from qcdl import registry
from qcdl.registry import InverseNamed, ParamNegate, RegistryError, SelfInverse


def test_default_gates_present():
    for name in ["not", "X", "H", "T", "T_inv", "S", "S_inv", "exp(-iZt)"]:
        assert registry.has_gate(name)
        assert registry.gate_arity(name) == 1


def test_unknown_gate():
    assert not registry.has_gate("FROB")
    with pytest.raises(RegistryError, match='unregistered gate "FROB"'):
        registry.gate_matrix("FROB")


def test_matrix_lookup_and_unitarity_of_defaults():
    for name in ["not", "H", "T", "S"]:
        m = registry.gate_matrix(name)
        assert np.allclose(m.conj().T @ m, np.eye(2))


def test_parameterized_rotation():
    m = registry.gate_matrix("exp(-iZt)", (0.5,))
    assert np.allclose(m, np.diag([np.exp(-0.5j), np.exp(0.5j)]))
    with pytest.raises(RegistryError, match="exactly one parameter"):
        registry.gate_matrix("exp(-iZt)", ())
    with pytest.raises(RegistryError, match="takes no parameters"):
        registry.gate_matrix("H", (1.0,))


def test_register_rejects_non_unitary():
    with pytest.raises(RegistryError, match="not unitary"):
        registry.register_gate("bad", 1, np.array([[1, 1], [0, 1]]))
    with pytest.raises(RegistryError, match="does not fit arity"):
        registry.register_gate("bad", 2, np.eye(2))


def test_reregistration_same_arity_only():
    registry.register_gate("tmp_probe", 1, np.eye(2))
    registry.register_gate("tmp_probe", 1, np.diag([1, -1]))  # allowed
    with pytest.raises(RegistryError, match="already registered with arity"):
        registry.register_gate("tmp_probe", 2, np.eye(4))


def test_inverse_rules():
    assert isinstance(registry.inverse_rule("H"), SelfInverse)
    rule = registry.inverse_rule("T")
    assert isinstance(rule, InverseNamed) and rule.name == "T_inv"
    assert isinstance(registry.inverse_rule("exp(-iZt)"), ParamNegate)
    assert registry.inverse_rule("no_such_gate") is None
