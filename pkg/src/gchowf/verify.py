"""Inversion oracles, collision census, reduction harnesses and attack demos."""

from __future__ import annotations

import functools
import json
import time
from dataclasses import dataclass, field
from itertools import islice
from typing import Callable, Iterator, Mapping, Optional, Sequence, Union

import numpy as np

from . import statevector as sv
from .circuits import CircuitFamily
from .encoding import (
    count_width,
    decode_state,
    encode_circuit_family,
    encode_state,
    encoding_length,
    sample_uniform_state,
    validate_encoding,
)
from .errors import DimensionMismatch, GchError, TooLarge
from .gch import GchState, basis_of, iter_states, to_statevector
from .owf import (
    OwfOutput,
    cc_owf,
    check_size,
    eval_family,
    eval_family_with,
    sample_circuit_family,
)
from .prng import PrngStream

FULL_ENUM_CAP = 4

Inverter = Callable[[int, OwfOutput], Optional[str]]


def _canonical(encodings) -> list[str]:
    return sorted(encodings, key=lambda e: (len(e), e))


def iter_valid_encodings_raw(n: int) -> Iterator[str]:
    """Every valid encoding, found by scanning all raw layouts of every length."""
    head = 2 * n + count_width(n)
    for count in range(n):
        length = encoding_length(n, count)
        # the count field is fixed by the length, so only vary the other bits
        tail = length - head
        count_bits = format(count, "b").zfill(count_width(n)) if count_width(n) else ""
        for prefix in range(1 << (2 * n)):
            pre = format(prefix, "b").zfill(2 * n) + count_bits
            for rest in range(1 << tail):
                enc = pre + (format(rest, "b").zfill(tail) if tail else "")
                if validate_encoding(enc, n)[0]:
                    yield enc


def _iter_candidates(n: int, cap: Optional[int]) -> Iterator[str]:
    if n > FULL_ENUM_CAP and cap is None:
        raise TooLarge("n", n, FULL_ENUM_CAP)
    states = iter_states(n) if cap is None else islice(iter_states(n), cap)
    return (encode_state(s) for s in states)


@functools.lru_cache(maxsize=8)
def _output_table(n: int) -> dict[bytes, tuple[str, ...]]:
    table: dict[bytes, list[str]] = {}
    for x in _iter_candidates(n, None):
        table.setdefault(cc_owf(x, n).y_prime, []).append(x)
    return {k: tuple(_canonical(v)) for k, v in table.items()}


def _as_bytes(y_prime: Union[OwfOutput, bytes]) -> bytes:
    return y_prime.y_prime if isinstance(y_prime, OwfOutput) else bytes(y_prime)


def brute_force_invert(y_prime: Union[OwfOutput, bytes], n: int, cap: Optional[int] = None) -> list[str]:
    """All valid encodings x with cc_owf(x, n) == y_prime, canonically ordered.

    Full enumeration is allowed for n <= 4; larger n needs ``cap``, the number
    of candidate encodings to try.
    """
    check_size(n)
    target = _as_bytes(y_prime)
    if cap is None and n <= FULL_ENUM_CAP:
        return list(_output_table(n).get(target, ()))
    return _canonical(x for x in _iter_candidates(n, cap) if cc_owf(x, n).y_prime == target)


def exhaustive_inverter(n: int, out: OwfOutput) -> Optional[str]:
    hits = brute_force_invert(out, n)
    return hits[0] if hits else None


@dataclass
class InversionCensus:
    n: int
    inputs: int
    preimages: dict[bytes, tuple[str, ...]]
    collisions: int
    cross_basis_collisions: int
    per_basis: dict[str, dict] = field(default_factory=dict)

    @property
    def outputs(self) -> int:
        return len(self.preimages)

    def to_json(self) -> str:
        doc = {
            "n": self.n,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "collisions": self.collisions,
            "cross_basis_collisions": self.cross_basis_collisions,
        }
        return json.dumps(doc, sort_keys=True)

    def to_text(self) -> str:
        lines = [
            f"n={self.n}",
            f"inputs={self.inputs}",
            f"outputs={self.outputs}",
            f"collisions={self.collisions}",
            f"cross_basis_collisions={self.cross_basis_collisions}",
        ]
        return "\n".join(lines)


def collision_census(n: int = 4) -> InversionCensus:
    """Group every valid input by its output and count colliding pairs."""
    check_size(n)
    if n > FULL_ENUM_CAP:
        raise TooLarge("n", n, FULL_ENUM_CAP)
    table = _output_table(n)
    collisions = cross = 0
    per_basis: dict[str, dict] = {}
    for out, xs in table.items():
        bases = [basis_of(decode_state(x, n)) for x in xs]
        collisions += len(xs) * (len(xs) - 1) // 2
        for i in range(len(xs)):
            for j in range(i + 1, len(xs)):
                cross += bases[i] != bases[j]
        for b in set(bases):
            row = per_basis.setdefault(str(b), {"inputs": 0, "outputs": 0})
            row["outputs"] += 1
            row["inputs"] += bases.count(b)
    inputs = sum(len(v) for v in table.values())
    return InversionCensus(n, inputs, dict(table), collisions, cross, per_basis)


# -- reductions ---------------------------------------------------------------

@dataclass(frozen=True)
class CompositionInstance:
    """f(x) = f2(f1(x)) with f1 into m-qubit states and f2 out of them."""

    f1: Callable[[str], GchState]
    f2: Callable[[GchState], OwfOutput]
    n: int
    m: int

    def __call__(self, x: str) -> OwfOutput:
        return self.f2(self.f1(x))


def algorithm1_instance(n: int) -> CompositionInstance:
    return CompositionInstance(lambda x: decode_state(x, n), eval_family, n, n)


def reduction_thm1(a: Inverter, instance: CompositionInstance, y: OwfOutput) -> Optional[GchState]:
    """Invert f2 with an inverter for f: run it, then map its answer through f1."""
    x = a(instance.n, y)
    if x is None:
        return None
    try:
        if instance(x) != y:
            return None
        psi = instance.f1(x)
    except GchError:
        return None
    return psi


def reduction_thm3(family: CircuitFamily, y: str, a: Inverter) -> Optional[GchState]:
    """Invert one sampled quantum-classical instance (family, y) via the classical function."""
    out = OwfOutput(family.n, y, encode_circuit_family(family))
    x = a(family.n, out)
    if x is None:
        return None
    try:
        state = decode_state(x, family.n)
        if eval_family_with(family, state) != y:
            return None
    except GchError:
        return None
    return state


# -- attacks on naive constructions -------------------------------------------

Gate = tuple  # ("h", q) or ("cx", control, target), 1-based


def _check_gates(u: Sequence[Gate], n: int) -> None:
    for g in u:
        if g[0] == "h" and len(g) == 2 and 1 <= g[1] <= n:
            continue
        if g[0] == "cx" and len(g) == 3 and g[1] != g[2] and all(1 <= q <= n for q in g[1:]):
            continue
        raise DimensionMismatch(f"gate {g} does not act on {n} qubits")


def run_circuit(u: Sequence[Gate], vec: np.ndarray, n: int) -> np.ndarray:
    for g in u:
        vec = sv.apply_h(vec, n, g[1]) if g[0] == "h" else sv.apply_cnot(vec, n, g[1], g[2])
    return vec


def _undo(u: Sequence[Gate], vec: np.ndarray, n: int) -> np.ndarray:
    # H and CNOT are self-inverse
    return run_circuit(list(reversed(u)), vec, n)


def reverse_circuit_attack(u: Sequence[Gate], outcome: str) -> sv.Statevector:
    """Input state recovered from the full measurement record of ``u``."""
    n = len(outcome)
    if n < 1 or set(outcome) - {"0", "1"}:
        raise DimensionMismatch("outcome must be a non-empty bitstring")
    _check_gates(u, n)
    return sv.Statevector(n, _undo(u, sv.basis_state(outcome), n))


def substitute_attack(u: Sequence[Gate], partial_outcome: Mapping[int, int], n: int) -> sv.Statevector:
    """Like the reverse attack, with |0> standing in for unmeasured qubits."""
    if any(not 1 <= q <= n for q in partial_outcome):
        raise DimensionMismatch(f"measured qubits outside 1..{n}")
    _check_gates(u, n)
    bits = "".join(str(partial_outcome.get(q, 0)) for q in range(1, n + 1))
    return sv.Statevector(n, _undo(u, sv.basis_state(bits), n))


def outcome_probability(u: Sequence[Gate], state: sv.Statevector, outcome: Mapping[int, int]) -> float:
    """Probability that running ``u`` on ``state`` then measuring gives ``outcome``."""
    n = state.n
    psi = run_circuit(u, state.amplitudes, n).reshape([2] * n)
    sel = tuple(outcome.get(q, slice(None)) for q in range(1, n + 1))
    return float(np.sum(np.abs(psi[sel]) ** 2))


def _random_circuit(stream: PrngStream, n: int, max_gates: int) -> list[Gate]:
    u = []
    for _ in range(stream.randbelow(max_gates + 1)):
        if n == 1 or stream.randbelow(2):
            u.append(("h", 1 + stream.randbelow(n)))
        else:
            c, t = stream.sample(range(1, n + 1), 2)
            u.append(("cx", c, t))
    return u


def random_attack_instance(stream: PrngStream, max_n: int = 6, partial: bool = False, max_gates: int = 8):
    """(u, outcome, n) whose measured qubits read deterministically.

    The input is a random product of |0>, |1>, |+>, |->; draws are repeated
    until the chosen measurement is deterministic. ``outcome`` maps qubit to bit.
    """
    while True:
        n = 1 + stream.randbelow(max_n)
        u = _random_circuit(stream, n, max_gates)
        glyphs = "".join("01+-"[stream.randbelow(4)] for _ in range(n))
        vec = to_statevector(GchState.product(glyphs)).amplitudes
        probs = np.abs(run_circuit(u, vec, n).reshape([2] * n)) ** 2
        qubits = list(range(1, n + 1))
        if partial:
            k = 1 + stream.randbelow(n)
            qubits = sorted(stream.sample(qubits, k))
        drop = tuple(q - 1 for q in range(1, n + 1) if q not in qubits)
        marginal = probs.sum(axis=drop) if drop else probs
        idx = int(np.argmax(marginal))
        if marginal.reshape(-1)[idx] > 1 - sv.TOL:
            bits = np.unravel_index(idx, marginal.shape)
            return u, {q: int(b) for q, b in zip(qubits, bits)}, n


def attack_trials(method: str, trials: int, stream: PrngStream, max_n: int = 6) -> float:
    """Success rate of ``method`` ("reverse" or "substitute") on random eligible instances."""
    wins = 0
    for _ in range(trials):
        if method == "reverse":
            u, outcome, n = random_attack_instance(stream, max_n)
            guess = reverse_circuit_attack(u, "".join(str(outcome[q]) for q in range(1, n + 1)))
        elif method == "substitute":
            u, outcome, n = random_attack_instance(stream, max_n, partial=True)
            guess = substitute_attack(u, outcome, n)
        else:
            raise ValueError(f"unknown attack method {method!r}")
        wins += outcome_probability(u, guess, outcome) > 1 - sv.TOL
    return wins / trials


# -- size profile ---------------------------------------------------------------

def size_profile(n_values: Sequence[int], seed: int = 0) -> list[dict]:
    """Gate counts and sampling time for one stream-chosen basis per n."""
    rows = []
    root = PrngStream.from_int(seed)
    for n in n_values:
        check_size(n)
        if n > 32:
            raise TooLarge("n", n, 32)
        _, state = sample_uniform_state(n, root.substream(n))
        basis = basis_of(state)
        start = time.perf_counter()
        family = sample_circuit_family.__wrapped__(basis)
        elapsed = time.perf_counter() - start
        rows.append({
            "n": n,
            "basis": str(basis),
            "gates": family.gate_count,
            "bound": n ** 3 // 2,
            "layers": [len(c.layers) for c in family.circuits],
            "seconds": elapsed,
        })
    return rows
