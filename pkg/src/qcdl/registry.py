"""Gate definitions shared by the simulator and the circuit transforms.

Each named gate carries a matrix builder (params -> unitary) and an inverse
rule used by circuit reversal.  Names are verbatim keys: "not" is the
controlled-not family target, "H" is Hadamard, "exp(-iZt)" is the
single-qubit Z rotation diag(e^{-it}, e^{it}) whose inverse negates the
parameter.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np


class RegistryError(Exception):
    pass


@dataclass(frozen=True)
class SelfInverse:
    pass


@dataclass(frozen=True)
class InverseNamed:
    name: str


@dataclass(frozen=True)
class ParamNegate:
    pass


InverseRule = SelfInverse | InverseNamed | ParamNegate

_UNITARY_TOL = 1e-9


@dataclass
class GateDef:
    name: str
    arity: int  # number of target wires
    builder: Callable[[tuple[float, ...]], np.ndarray]
    inverse: InverseRule


_REGISTRY: dict[str, GateDef] = {}


def _check_unitary(name: str, matrix: np.ndarray, arity: int) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=np.complex128)
    dim = 2 ** arity
    if matrix.shape != (dim, dim):
        raise RegistryError(
            f'gate "{name}": matrix shape {matrix.shape} does not fit arity {arity}')
    err = np.abs(matrix.conj().T @ matrix - np.eye(dim)).max()
    if err >= _UNITARY_TOL:
        raise RegistryError(f'gate "{name}": matrix is not unitary (deviation {err:.3e})')
    return matrix


def register_gate(name: str, arity: int, matrix, inverse: InverseRule = SelfInverse()) -> None:
    """Register or re-register a gate.

    `matrix` is either a constant array (checked for unitarity now; such gates
    take no params) or a callable params -> array (each built matrix is
    checked at use).  Re-registering under the same name requires the same
    arity.
    """
    existing = _REGISTRY.get(name)
    if existing is not None and existing.arity != arity:
        raise RegistryError(
            f'gate "{name}" already registered with arity {existing.arity}, not {arity}')
    if callable(matrix):
        fn = matrix

        def builder(params: tuple[float, ...], _fn=fn, _name=name, _arity=arity):
            return _check_unitary(_name, _fn(params), _arity)
    else:
        const = _check_unitary(name, matrix, arity)

        def builder(params: tuple[float, ...], _m=const, _name=name):
            if params:
                raise RegistryError(f'gate "{_name}" takes no parameters')
            return _m
    _REGISTRY[name] = GateDef(name, arity, builder, inverse)


def has_gate(name: str) -> bool:
    return name in _REGISTRY


def gate_arity(name: str) -> int:
    return _definition(name).arity


def gate_matrix(name: str, params: tuple[float, ...] = ()) -> np.ndarray:
    return _definition(name).builder(tuple(params))


def inverse_rule(name: str) -> InverseRule | None:
    d = _REGISTRY.get(name)
    return d.inverse if d else None


def _definition(name: str) -> GateDef:
    d = _REGISTRY.get(name)
    if d is None:
        raise RegistryError(f'unregistered gate "{name}"')
    return d


_X = np.array([[0, 1], [1, 0]])
_S = np.diag([1, 1j])
_T = np.diag([1, np.exp(1j * math.pi / 4)])


def _z_rotation(params: tuple[float, ...]) -> np.ndarray:
    if len(params) != 1:
        raise RegistryError('gate "exp(-iZt)" takes exactly one parameter')
    t = params[0]
    return np.diag([np.exp(-1j * t), np.exp(1j * t)])


register_gate("not", 1, _X)
register_gate("X", 1, _X)
register_gate("Y", 1, np.array([[0, -1j], [1j, 0]]))
register_gate("Z", 1, np.diag([1, -1]))
register_gate("H", 1, np.array([[1, 1], [1, -1]]) / math.sqrt(2))
register_gate("S", 1, _S, InverseNamed("S_inv"))
register_gate("S_inv", 1, _S.conj().T, InverseNamed("S"))
register_gate("T", 1, _T, InverseNamed("T_inv"))
register_gate("T_inv", 1, _T.conj().T, InverseNamed("T"))
register_gate("exp(-iZt)", 1, _z_rotation, ParamNegate())
