"""Circuit-family value types shared by the sampler, evaluator and codec."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .gch import GchBasis

COMPUTATIONAL = 0
HADAMARD = 1


@dataclass(frozen=True, order=True)
class CnotGate:
    control: int
    target: int

    def __post_init__(self):
        if self.control == self.target:
            raise ValueError("control and target must differ")


@dataclass(frozen=True)
class Layer:
    """Parallel CNOTs with pairwise disjoint endpoints, kept sorted."""

    gates: tuple[CnotGate, ...]

    def __post_init__(self):
        if list(self.gates) != sorted(set(self.gates)):
            raise ValueError("layer gates must be sorted and distinct")
        ends = [q for g in self.gates for q in (g.control, g.target)]
        if len(ends) != len(set(ends)):
            raise ValueError("layer gates must not share qubits")


@dataclass(frozen=True)
class ConstituentCircuit:
    layers: tuple[Layer, ...]
    marked: tuple[int, ...]
    measured: tuple[int, ...]
    # one flag per measured qubit, same order: COMPUTATIONAL or HADAMARD
    measurement_basis: tuple[int, ...]

    def __post_init__(self):
        if not self.layers:
            raise ValueError("a constituent circuit needs at least one layer")
        if list(self.marked) != sorted(set(self.marked)):
            raise ValueError("marked positions must be sorted and distinct")
        if list(self.measured) != sorted(set(self.measured)) or not set(self.measured) <= set(self.marked):
            raise ValueError("measured positions must be a sorted subset of marked")
        if len(self.marked) != len(self.layers[-1].gates):
            raise ValueError("one marked qubit per final-layer gate")
        final_ends = {q for g in self.layers[-1].gates for q in (g.control, g.target)}
        if not set(self.marked) <= final_ends:
            raise ValueError("marked qubits must be final-layer endpoints")
        if len(self.measurement_basis) != len(self.measured) or set(self.measurement_basis) - {0, 1}:
            raise ValueError("need one basis flag per measured qubit")

    @property
    def gate_count(self) -> int:
        return sum(len(layer.gates) for layer in self.layers)


@dataclass(frozen=True)
class CircuitFamily:
    """The n constituent circuits sampled for one basis.

    ``basis`` records where the family came from; it is not part of the wire
    encoding and does not take part in equality.
    """

    n: int
    circuits: tuple[ConstituentCircuit, ...]
    basis: Optional[GchBasis] = field(default=None, compare=False)

    def __post_init__(self):
        if len(self.circuits) != self.n:
            raise ValueError(f"expected {self.n} constituent circuits, got {len(self.circuits)}")
        for circ in self.circuits:
            for layer in circ.layers:
                for g in layer.gates:
                    if not (1 <= g.control <= self.n and 1 <= g.target <= self.n):
                        raise ValueError(f"gate {g} outside 1..{self.n}")

    @property
    def gate_count(self) -> int:
        return sum(c.gate_count for c in self.circuits)
