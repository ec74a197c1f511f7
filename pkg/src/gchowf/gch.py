"""Symbolic GCH states: products of C qubits, H qubits and GHZ blocks.

Positions are 1-based. A GHZ block on positions ``(p1 < p2 < ...)`` with bits
``x`` stands for ``(|x> + |x̄>)/sqrt(2)``; the canonical representative has
``x[0] == "0"``. Global phase is ignored throughout.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterable, Iterator, Mapping, Sequence, Union

import numpy as np

from . import statevector as sv
from .errors import DimensionMismatch, IncompatiblePair, TooLarge
from .prng import PrngStream


class Single(enum.Enum):
    ZERO = "0"
    ONE = "1"
    PLUS = "+"
    MINUS = "-"

    @property
    def kind(self) -> str:
        return "C" if self in (Single.ZERO, Single.ONE) else "H"

    @property
    def bit(self) -> int:
        """Computational value for C qubits, sign bit for H qubits."""
        return 1 if self in (Single.ONE, Single.MINUS) else 0

    @classmethod
    def of(cls, kind: str, bit: int) -> "Single":
        if kind == "C":
            return cls.ONE if bit else cls.ZERO
        return cls.MINUS if bit else cls.PLUS


_SINGLE_VEC = {
    Single.ZERO: np.array([1, 0], dtype=complex),
    Single.ONE: np.array([0, 1], dtype=complex),
    Single.PLUS: np.array([1, 1], dtype=complex) / np.sqrt(2),
    Single.MINUS: np.array([1, -1], dtype=complex) / np.sqrt(2),
}


@dataclass(frozen=True)
class GhzMember:
    block: int


Label = Union[Single, GhzMember]


@dataclass(frozen=True)
class GhzBlock:
    positions: tuple[int, ...]
    bits: str

    def bit_at(self, pos: int) -> int:
        return int(self.bits[self.positions.index(pos)])

    def __str__(self):
        return "G{" + ",".join(map(str, self.positions)) + "}:" + self.bits


def _complement(bits: str) -> str:
    return bits.translate(str.maketrans("01", "10"))


@dataclass(frozen=True)
class GchState:
    """Canonical GCH state value. Use :meth:`build` or :meth:`parse` to create one."""

    n: int
    labels: tuple[Label, ...]
    blocks: tuple[GhzBlock, ...] = ()

    def __post_init__(self):
        if self.n < 1 or len(self.labels) != self.n:
            raise ValueError("labels must cover positions 1..n")
        seen = set()
        prev_first = 0
        for i, blk in enumerate(self.blocks):
            ps = blk.positions
            if len(ps) < 2 or len(blk.bits) != len(ps):
                raise ValueError(f"bad block {blk}")
            if list(ps) != sorted(set(ps)) or ps[0] < 1 or ps[-1] > self.n:
                raise ValueError(f"block positions must be increasing within 1..n: {blk}")
            if blk.bits[0] != "0" or set(blk.bits) - {"0", "1"}:
                raise ValueError(f"block bits not canonical: {blk}")
            if ps[0] <= prev_first:
                raise ValueError("blocks must be ordered by smallest position")
            prev_first = ps[0]
            for p in ps:
                if self.labels[p - 1] != GhzMember(i):
                    raise ValueError(f"position {p} is not labelled as member of block {i}")
                seen.add(p)
        for p, lab in enumerate(self.labels, 1):
            if isinstance(lab, GhzMember):
                if p not in seen:
                    raise ValueError(f"position {p} points at block {lab.block} that lacks it")
            elif not isinstance(lab, Single):
                raise ValueError(f"bad label {lab!r}")

    @classmethod
    def build(
        cls,
        n: int,
        singles: Mapping[int, Union[Single, str]],
        blocks: Iterable[tuple[Sequence[int], Union[str, Mapping[int, int]]]] = (),
    ) -> "GchState":
        """Canonicalize a state given singleton labels and ``(positions, bits)`` blocks.

        Block bits may be a string aligned with ``positions`` or a mapping
        position -> bit; either member of the complement pair is accepted.
        """
        labels: list = [None] * n
        for p, lab in singles.items():
            labels[p - 1] = lab if isinstance(lab, Single) else Single(lab)
        canon = []
        for positions, bits in blocks:
            if isinstance(bits, str):
                bitmap = {p: int(b) for p, b in zip(positions, bits)}
                if len(bits) != len(positions):
                    raise ValueError("block bits and positions differ in length")
            else:
                bitmap = dict(bits)
            ps = tuple(sorted(bitmap))
            if len(ps) != len(tuple(positions)):
                raise ValueError("repeated position inside a block")
            s = "".join(str(bitmap[p]) for p in ps)
            if s[0] == "1":
                s = _complement(s)
            canon.append(GhzBlock(ps, s))
        canon.sort(key=lambda b: b.positions[0])
        for i, blk in enumerate(canon):
            for p in blk.positions:
                if not 1 <= p <= n or labels[p - 1] is not None:
                    raise ValueError(f"position {p} out of range or assigned twice")
                labels[p - 1] = GhzMember(i)
        if any(lab is None for lab in labels):
            raise ValueError("positions not covered: %s" % [i + 1 for i, l in enumerate(labels) if l is None])
        return cls(n, tuple(labels), tuple(canon))

    @classmethod
    def product(cls, glyphs: str) -> "GchState":
        """Product of singletons from glyphs, e.g. ``"01+-"``."""
        return cls.build(len(glyphs), {i: g for i, g in enumerate(glyphs, 1)})

    @classmethod
    def parse(cls, text: str) -> "GchState":
        """Inverse of ``str()``: singleton glyphs ``0 1 + -`` and ``G{p,...}:bits`` tokens.

        Singleton glyphs fill the lowest position not yet claimed.
        """
        tokens = text.split()
        blocks = []
        claimed = set()
        pending = []
        for tok in tokens:
            m = re.fullmatch(r"G\{(\d+(?:,\d+)+)\}:([01]+)", tok)
            if m:
                ps = [int(p) for p in m.group(1).split(",")]
                blocks.append((ps, m.group(2)))
                claimed.update(ps)
            elif tok in ("0", "1", "+", "-"):
                pending.append(tok)
            else:
                raise ValueError(f"bad token {tok!r}")
        n = len(claimed) + len(pending)
        free = iter(p for p in range(1, n + 1) if p not in claimed)
        singles = {next(free): g for g in pending}
        return cls.build(n, singles, blocks)

    def label(self, pos: int) -> Label:
        return self.labels[pos - 1]

    def block_of(self, pos: int) -> GhzBlock:
        return self.blocks[self.labels[pos - 1].block]

    def __str__(self):
        toks = []
        for p, lab in enumerate(self.labels, 1):
            if isinstance(lab, Single):
                toks.append(lab.value)
            elif self.blocks[lab.block].positions[0] == p:
                toks.append(str(self.blocks[lab.block]))
        return " ".join(toks)

    def _parts(self):
        singles = {p: lab for p, lab in enumerate(self.labels, 1) if isinstance(lab, Single)}
        blocks = [dict(zip(b.positions, map(int, b.bits))) for b in self.blocks]
        return singles, blocks


@dataclass(frozen=True)
class GchBasis:
    """Value-erased structure of a state: per-position ``"C"``, ``"H"`` or block index."""

    n: int
    kinds: tuple[Union[str, int], ...]
    blocks: tuple[tuple[int, ...], ...] = ()

    def __str__(self):
        toks = []
        for p, k in enumerate(self.kinds, 1):
            if isinstance(k, str):
                toks.append(k)
            elif self.blocks[k][0] == p:
                toks.append("G{" + ",".join(map(str, self.blocks[k])) + "}")
        return " ".join(toks)


def basis_of(state: GchState) -> GchBasis:
    kinds = tuple(lab.kind if isinstance(lab, Single) else lab.block for lab in state.labels)
    return GchBasis(state.n, kinds, tuple(b.positions for b in state.blocks))


def canonical_basis_bytes(basis: GchBasis) -> bytes:
    """``n`` as big-endian u16, then one big-endian u16 per position: 0 = C, 1 = H, 2 + k = block k."""
    out = bytearray(basis.n.to_bytes(2, "big"))
    for k in basis.kinds:
        code = 0 if k == "C" else 1 if k == "H" else 2 + k
        out += code.to_bytes(2, "big")
    return bytes(out)


# -- CNOT rewriting ---------------------------------------------------------

def _incompatibility(state: GchState, c: int, t: int):
    """None if CNOT(c->t) keeps the state in GCH form, else a reason string."""
    lc, lt = state.labels[c - 1], state.labels[t - 1]
    if isinstance(lc, Single):
        if lc.kind == "C":
            return None
        if isinstance(lt, Single):
            if lt.kind == "H" or lc is Single.PLUS:
                return None
            return "|-> control on C target gives a relative phase"
        return "H control on GHZ target gives four branches"
    if isinstance(lt, Single):
        if lt is Single.MINUS:
            return "GHZ control on |-> target gives a relative phase"
        return None
    if lt.block == lc.block:
        return None
    return "control and target in different GHZ blocks"


def _rebuild(n, singles, blocks):
    return GchState.build(n, singles, ((tuple(b), b) for b in blocks))


def is_compatible(state: GchState, control: int, target: int) -> bool:
    _check_pair(state.n, control, target)
    return _incompatibility(state, control, target) is None


def _check_pair(n, control, target):
    if control == target or not (1 <= control <= n and 1 <= target <= n):
        raise DimensionMismatch(f"bad CNOT({control}->{target}) on {n} qubits")


def apply_cnot_symbolic(state: GchState, control: int, target: int) -> GchState:
    """Return the canonical GCH state CNOT(control->target)|state>."""
    _check_pair(state.n, control, target)
    reason = _incompatibility(state, control, target)
    if reason:
        raise IncompatiblePair(control, target, reason)
    c, t = control, target
    lc, lt = state.labels[c - 1], state.labels[t - 1]

    if isinstance(lc, Single) and lc.kind == "C":
        if lc is Single.ZERO or (isinstance(lt, Single) and lt.kind == "H"):
            return state
        singles, blocks = state._parts()
        if isinstance(lt, Single):
            singles[t] = Single.of("C", 1 - lt.bit)
        else:
            blocks[lt.block][t] ^= 1
        return _rebuild(state.n, singles, blocks)

    if isinstance(lc, Single):  # H control
        if isinstance(lt, Single) and lt.kind == "H":
            if lt is Single.PLUS:
                return state
            singles, blocks = state._parts()
            singles[c] = Single.of("H", 1 - lc.bit)
            return _rebuild(state.n, singles, blocks)
        singles, blocks = state._parts()  # |+> control, C target
        v = singles.pop(t).bit
        del singles[c]
        blocks.append({c: 0, t: v})
        return _rebuild(state.n, singles, blocks)

    blk = lc.block
    if isinstance(lt, Single) and lt is Single.PLUS:
        return state
    singles, blocks = state._parts()
    bits = blocks[blk]
    if isinstance(lt, Single):  # C target joins the block
        bits[t] = singles.pop(t).bit ^ bits[c]
    else:  # same block: target detaches
        singles[t] = Single.of("C", bits.pop(t) ^ bits[c])
        if len(bits) == 1:
            (survivor,) = bits
            singles[survivor] = Single.PLUS
            del blocks[blk]
    return _rebuild(state.n, singles, blocks)


# -- dense bridge -----------------------------------------------------------

def to_statevector(state: GchState, max_qubits: int = sv.MAX_QUBITS) -> sv.Statevector:
    n = state.n
    sv.check_size(n, max_qubits)
    order: list[int] = []
    vec = np.ones(1, dtype=complex)
    for p, lab in enumerate(state.labels, 1):
        if isinstance(lab, Single):
            vec = np.kron(vec, _SINGLE_VEC[lab])
            order.append(p)
    for blk in state.blocks:
        local = np.zeros(1 << len(blk.positions), dtype=complex)
        x = int(blk.bits, 2)
        local[x] = local[x ^ ((1 << len(blk.bits)) - 1)] = 1 / np.sqrt(2)
        vec = np.kron(vec, local)
        order.extend(blk.positions)
    axes = np.argsort(order)
    amps = vec.reshape([2] * n).transpose(axes).reshape(-1)
    return sv.Statevector(n, amps)


def inner_product(s1: GchState, s2: GchState, max_qubits: int = sv.MAX_QUBITS) -> complex:
    """<s1|s2>, exact product formula when the block partitions coincide."""
    if s1.n != s2.n:
        raise DimensionMismatch("states have different qubit counts")
    if [b.positions for b in s1.blocks] == [b.positions for b in s2.blocks]:
        out = 1.0 + 0j
        for a, b in zip(s1.labels, s2.labels):
            if isinstance(a, Single):
                out *= np.vdot(_SINGLE_VEC[a], _SINGLE_VEC[b])
        for b1, b2 in zip(s1.blocks, s2.blocks):
            if b1.bits != b2.bits:
                return 0j
        return complex(out)
    v1 = to_statevector(s1, max_qubits).amplitudes
    v2 = to_statevector(s2, max_qubits).amplitudes
    return complex(np.vdot(v1, v2))


def swap_pass_probability(s1: GchState, s2: GchState) -> float:
    return (1.0 + abs(inner_product(s1, s2)) ** 2) / 2.0


def swap_test(s1: GchState, s2: GchState, k: int, randomness: PrngStream) -> bool:
    """Pass iff k independent swap-test trials all measure the ancilla as |0>.

    Stops drawing at the first failed trial.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    p = swap_pass_probability(s1, s2)
    for _ in range(k):
        if not randomness.random() < p:
            return False
    return True


# -- enumeration ------------------------------------------------------------

STATE_ENUM_CAP = 6
BASIS_ENUM_CAP = 8


def _partitions(remaining: tuple[int, ...]) -> Iterator[list[tuple[int, ...]]]:
    """Set partitions of ``remaining``; each part lists its smallest element first."""
    if not remaining:
        yield []
        return
    first, rest = remaining[0], remaining[1:]
    for size in range(0, len(rest) + 1):
        for others in combinations(rest, size):
            left = tuple(p for p in rest if p not in others)
            for tail in _partitions(left):
                yield [(first,) + others] + tail


def iter_states(n: int) -> Iterator[GchState]:
    """Every canonical n-qubit GCH state exactly once (no size cap)."""
    for parts in _partitions(tuple(range(1, n + 1))):
        singles = [p[0] for p in parts if len(p) == 1]
        groups = [p for p in parts if len(p) > 1]
        glyph_choices = product("01+-", repeat=len(singles))
        bit_choices = [["0" + "".join(b) for b in product("01", repeat=len(g) - 1)] for g in groups]
        glyph_choices = list(glyph_choices)
        for bits in product(*bit_choices):
            for glyphs in glyph_choices:
                yield GchState.build(n, dict(zip(singles, glyphs)), zip(groups, bits))


def enumerate_states(n: int) -> list[GchState]:
    if n > STATE_ENUM_CAP:
        raise TooLarge("n", n, STATE_ENUM_CAP)
    return list(iter_states(n))


def iter_bases(n: int) -> Iterator[GchBasis]:
    for parts in _partitions(tuple(range(1, n + 1))):
        singles = [p[0] for p in parts if len(p) == 1]
        groups = sorted((tuple(sorted(p)) for p in parts if len(p) > 1), key=lambda g: g[0])
        for ks in product("CH", repeat=len(singles)):
            kinds: list = [None] * n
            for p, k in zip(singles, ks):
                kinds[p - 1] = k
            for i, g in enumerate(groups):
                for p in g:
                    kinds[p - 1] = i
            yield GchBasis(n, tuple(kinds), tuple(groups))


def enumerate_bases(n: int) -> list[GchBasis]:
    if n > BASIS_ENUM_CAP:
        raise TooLarge("n", n, BASIS_ENUM_CAP)
    return list(iter_bases(n))


def states_of_basis(basis: GchBasis) -> Iterator[GchState]:
    """All states whose basis is ``basis``."""
    singles = [p for p, k in enumerate(basis.kinds, 1) if isinstance(k, str)]
    bit_choices = [["0" + "".join(b) for b in product("01", repeat=len(g) - 1)] for g in basis.blocks]
    for bits in product(*bit_choices):
        for vals in product((0, 1), repeat=len(singles)):
            yield GchState.build(
                basis.n,
                {p: Single.of(basis.kinds[p - 1], v) for p, v in zip(singles, vals)},
                zip(basis.blocks, bits),
            )


def random_state_of_basis(basis: GchBasis, randomness: PrngStream) -> GchState:
    singles = {
        p: Single.of(k, randomness.randbelow(2)) for p, k in enumerate(basis.kinds, 1) if isinstance(k, str)
    }
    blocks = []
    for g in basis.blocks:
        rest = randomness.randbelow(1 << (len(g) - 1))
        blocks.append((g, "0" + format(rest, "b").zfill(len(g) - 1)))
    return GchState.build(basis.n, singles, blocks)
