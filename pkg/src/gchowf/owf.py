"""Basis-seeded circuit families and the classical-classical OWF built on them.

A family is sampled from a ChaCha20 stream keyed by SHA-256 of the basis
bytes, so every state of one basis meets the same circuits. Sampling works on
a kind-level skeleton of the state (C, H of unknown sign, H known to be |+>,
GHZ block) and only places gates that keep *every* state of the basis in GCH
form.
"""

from __future__ import annotations

import functools
import hashlib
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import statevector as sv
from .circuits import COMPUTATIONAL, HADAMARD, CircuitFamily, CnotGate, ConstituentCircuit, Layer
from .encoding import bits_to_bytes, bytes_to_bits, decode_state, encode_circuit_family
from .errors import IncompatiblePair, OffBasisInput, SamplingExhausted, UnsupportedSize
from .gch import (
    GchBasis,
    GchState,
    Single,
    apply_cnot_symbolic,
    basis_of,
    canonical_basis_bytes,
    to_statevector,
)
from .prng import PrngStream

LAYER_RETRIES = 100
CIRCUIT_RETRIES = 1000
DENSE_CAP = 10

_OUTCOME_CODE = {Single.ZERO: "00", Single.ONE: "01", Single.PLUS: "10", Single.MINUS: "11"}


def check_size(n: int) -> None:
    if n < 4 or n % 2:
        raise UnsupportedSize(f"n must be even and >= 4, got {n}")


def measured_count(n: int) -> int:
    return n // 2 - 1


def output_length(n: int) -> int:
    """|y| in bits: n circuits x (n/2 - 1) measured qubits x 2 bits."""
    return n * measured_count(n) * 2


def seed_from_basis(basis: GchBasis) -> PrngStream:
    return PrngStream(hashlib.sha256(canonical_basis_bytes(basis)).digest())


# -- kind-level skeleton -----------------------------------------------------

_C, _H, _P = "C", "H", "P"  # C qubit, H qubit of unknown sign, H qubit known to be |+>


class _Skeleton:
    """Structure shared by all states of a basis as gates are applied."""

    def __init__(self, basis: GchBasis):
        self.n = basis.n
        self.kind: list = [None] + [k if isinstance(k, str) else ("B", k) for k in basis.kinds]
        self.members = {("B", i): set(ps) for i, ps in enumerate(basis.blocks)}
        self._next = len(basis.blocks)

    def copy(self) -> "_Skeleton":
        new = object.__new__(_Skeleton)
        new.n = self.n
        new.kind = list(self.kind)
        new.members = {k: set(v) for k, v in self.members.items()}
        new._next = self._next
        return new

    def singleton(self, q: int) -> bool:
        return isinstance(self.kind[q], str)

    def compatible(self, c: int, t: int) -> bool:
        kc, kt = self.kind[c], self.kind[t]
        if kc == _C:
            return True
        if kc in (_H, _P):
            return kt in (_H, _P) or (kt == _C and kc == _P)
        # GHZ control
        return kt in (_C, _P) or kt == kc

    def marked_after(self, c: int, t: int) -> Optional[int]:
        """Endpoint left as a C/H singleton by CNOT(c->t): target first, else control."""
        kc, kt = self.kind[c], self.kind[t]
        if kc == _C:
            return t if isinstance(kt, str) else c
        if isinstance(kc, str):
            return t if kt in (_H, _P) else None
        if kt == _C:
            return None
        return t

    def apply(self, c: int, t: int) -> None:
        kc, kt = self.kind[c], self.kind[t]
        if kc == _C:
            return
        if isinstance(kc, str):
            if kt in (_H, _P):
                if kt == _H:
                    self.kind[c] = _H
                return
            key = ("B", self._next)  # |+> control, C target
            self._next += 1
            self.members[key] = {c, t}
            self.kind[c] = self.kind[t] = key
            return
        if kt == _P:
            return
        if kt == _C:
            self.members[kc].add(t)
            self.kind[t] = kc
            return
        group = self.members[kc]  # same block: target detaches
        group.discard(t)
        self.kind[t] = _C
        if len(group) == 1:
            (survivor,) = group
            self.kind[survivor] = _P
            del self.members[kc]

    def measurement_flag(self, q: int) -> int:
        return COMPUTATIONAL if self.kind[q] == _C else HADAMARD


class _DeadEnd(Exception):
    pass


def _sample_layer(skel: _Skeleton, stream: PrngStream, final: bool):
    n = skel.n
    need = measured_count(n)
    for _ in range(LAYER_RETRIES):
        work = skel.copy()
        order = list(range(1, n + 1))
        stream.shuffle(order)
        used: set[int] = set()
        gates = []
        for p in order:
            if p in used:
                continue
            options = []
            for q in order:
                if q == p or q in used:
                    continue
                for c, t in ((p, q), (q, p)):
                    if work.compatible(c, t) and (not final or work.marked_after(c, t) is not None):
                        options.append((c, t))
            if not options:
                continue
            c, t = options[stream.randbelow(len(options))]
            work.apply(c, t)
            used.update((c, t))
            gates.append(CnotGate(c, t))
        if not gates:
            continue
        gates.sort()
        # re-derive in canonical order, the order evaluation uses
        check = skel.copy()
        marked = []
        ok = True
        for g in gates:
            if not check.compatible(g.control, g.target):
                ok = False
                break
            if final:
                m = check.marked_after(g.control, g.target)
                if m is None:
                    ok = False
                    break
            check.apply(g.control, g.target)
            if final:
                marked.append(m)
        if not ok:
            continue
        if final:
            marked = [m for m in marked if check.singleton(m)]
            if len(marked) != len(gates) or len(marked) < need:
                continue
        return Layer(tuple(gates)), check, sorted(marked)
    raise _DeadEnd


def sample_constituent_circuit(basis: GchBasis, stream: PrngStream) -> ConstituentCircuit:
    """One constituent circuit: n layers of compatible parallel CNOTs plus readout."""
    n = basis.n
    check_size(n)
    for _ in range(CIRCUIT_RETRIES):
        skel = _Skeleton(basis)
        layers = []
        try:
            for depth in range(n):
                layer, skel, marked = _sample_layer(skel, stream, final=depth == n - 1)
                layers.append(layer)
        except _DeadEnd:
            continue
        measured = tuple(sorted(stream.sample(marked, measured_count(n))))
        flags = tuple(skel.measurement_flag(q) for q in measured)
        return ConstituentCircuit(tuple(layers), tuple(marked), measured, flags)
    raise SamplingExhausted(f"no constituent circuit for basis {basis} after {CIRCUIT_RETRIES} attempts")


@functools.lru_cache(maxsize=4096)
def sample_circuit_family(basis: GchBasis) -> CircuitFamily:
    """The family for ``basis``; circuit i (1-based) uses substream i of the basis seed."""
    check_size(basis.n)
    root = seed_from_basis(basis)
    circuits = tuple(sample_constituent_circuit(basis, root.substream(i)) for i in range(1, basis.n + 1))
    return CircuitFamily(basis.n, circuits, basis)


# -- evaluation --------------------------------------------------------------

def _run_layers(state: GchState, layers) -> GchState:
    for layer in layers:
        for g in layer.gates:
            state = apply_cnot_symbolic(state, g.control, g.target)
    return state


def eval_constituent(state: GchState, circuit: ConstituentCircuit) -> tuple[str, GchState]:
    """Outcome bits (2 per measured qubit) and the state after the reverse circuit."""
    try:
        mid = _run_layers(state, circuit.layers)
    except IncompatiblePair as exc:
        raise OffBasisInput(f"input does not fit the circuit: {exc}") from None
    out = []
    for q, flag in zip(circuit.measured, circuit.measurement_basis):
        lab = mid.label(q)
        if not isinstance(lab, Single) or (lab.kind == "C") != (flag == COMPUTATIONAL):
            raise OffBasisInput(f"measured qubit {q} is not an eigenstate of its measurement")
        out.append(_OUTCOME_CODE[lab])
    restored = _run_layers(mid, reversed(circuit.layers))
    return "".join(out), restored


@dataclass(frozen=True)
class OwfOutput:
    """y' = y (zero-padded to a byte) followed by the circuit-family encoding."""

    n: int
    y: str
    circuit_bytes: bytes

    def __post_init__(self):
        if len(self.y) != output_length(self.n):
            raise ValueError(f"|y| must be {output_length(self.n)} bits for n={self.n}")

    @property
    def y_prime(self) -> bytes:
        return bits_to_bytes(self.y) + self.circuit_bytes

    @classmethod
    def from_bytes(cls, data: bytes, n: int) -> "OwfOutput":
        ylen = output_length(n)
        split = (ylen + 7) // 8
        if len(data) < split:
            raise ValueError("y' shorter than its y field")
        bits = bytes_to_bits(data[:split])
        if "1" in bits[ylen:]:
            raise ValueError("non-zero padding after y")
        return cls(n, bits[:ylen], bytes(data[split:]))


def eval_family_with(family: CircuitFamily, state: GchState) -> str:
    """y for ``state`` under a given family; raises OffBasisInput if it does not fit."""
    if family.n != state.n:
        raise OffBasisInput("qubit counts differ")
    if family.basis is not None and family.basis != basis_of(state):
        raise OffBasisInput(f"state basis {basis_of(state)} differs from family basis {family.basis}")
    parts = []
    for circ in family.circuits:
        bits, restored = eval_constituent(state, circ)
        if restored != state:
            raise AssertionError("reverse circuit did not restore the input")
        parts.append(bits)
    return "".join(parts)


def eval_family(state: GchState) -> OwfOutput:
    """Sample (or reuse) the family of the state's basis and evaluate it."""
    check_size(state.n)
    family = sample_circuit_family(basis_of(state))
    return OwfOutput(state.n, eval_family_with(family, state), encode_circuit_family(family))


def cc_owf(x: str, n: int) -> OwfOutput:
    """Classical-classical OWF: decode, find basis, sample family, evaluate, append encoding."""
    check_size(n)
    return eval_family(decode_state(x, n))


# -- dense simulation --------------------------------------------------------

def _dense_run(family: CircuitFamily, vec: np.ndarray, choose: Callable[[float], int]) -> str:
    n = family.n
    out = []
    for circ in family.circuits:
        for layer in circ.layers:
            for g in layer.gates:
                vec = sv.apply_cnot(vec, n, g.control, g.target)
        for q, flag in zip(circ.measured, circ.measurement_basis):
            if flag == HADAMARD:
                vec = sv.apply_h(vec, n, q)
            outcome = choose(sv.prob_one(vec, n, q))
            vec = sv.project(vec, n, q, outcome)
            if flag == HADAMARD:
                vec = sv.apply_h(vec, n, q)
            out.append(f"{flag}{outcome}")
        for layer in reversed(circ.layers):
            for g in layer.gates:
                vec = sv.apply_cnot(vec, n, g.control, g.target)
    return "".join(out)


def off_basis_sample(family: CircuitFamily, state: GchState, randomness: PrngStream) -> str:
    """One Born-rule sample of y with projective measurements and collapse."""
    sv.check_size(state.n, DENSE_CAP)
    vec = to_statevector(state).amplitudes.copy()

    def choose(p1: float) -> int:
        u = randomness.random()
        if p1 < sv.TOL:
            return 0
        if p1 > 1 - sv.TOL:
            return 1
        return 1 if u < p1 else 0

    return _dense_run(family, vec, choose)


def born_readout(family: CircuitFamily, state: GchState) -> str:
    """Deterministic dense readout; raises OffBasisInput if any outcome is random."""
    sv.check_size(state.n, DENSE_CAP)

    def choose(p1: float) -> int:
        if p1 < sv.TOL:
            return 0
        if p1 > 1 - sv.TOL:
            return 1
        raise OffBasisInput(f"outcome probability {p1:.6f} is not deterministic")

    return _dense_run(family, to_statevector(state).amplitudes.copy(), choose)
