"""Bit-exact codecs for GCH states and circuit families.

State layout (MSB first, qubit 1 first)::

    [init: n][hadamard: n][count: clog2(n+1)][count x (control-1, target-1): clog2(n) bits each]

Circuit-family layout::

    [n: u16] then per circuit, padded to a byte boundary:
    [layers: u16] per layer [gates: u8] per gate [control-1: u16][target-1: u16]
    [marked mask: n][measured mask: n][basis flag per measured qubit]
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Iterable, Optional

from .circuits import CircuitFamily, CnotGate, ConstituentCircuit, Layer
from .errors import InvalidEncoding, MalformedCircuitEncoding, RetriesExhausted
from .gch import GchState, Single, apply_cnot_symbolic
from .prng import PrngStream


def clog2(k: int) -> int:
    """ceil(log2(k)) for k >= 1."""
    return (k - 1).bit_length()


def bits_to_bytes(bits: str) -> bytes:
    """MSB-first packing, zero-padded to a whole byte."""
    if not bits:
        return b""
    pad = -len(bits) % 8
    return int(bits + "0" * pad, 2).to_bytes((len(bits) + pad) // 8, "big")


def bytes_to_bits(data: bytes) -> str:
    return "".join(format(b, "08b") for b in data)


# -- state encoding ----------------------------------------------------------

def index_width(n: int) -> int:
    return clog2(n)


def count_width(n: int) -> int:
    return clog2(n + 1)


def encoding_length(n: int, cnot_count: int) -> int:
    return 2 * n + count_width(n) + cnot_count * 2 * index_width(n)


@dataclass(frozen=True)
class StateEncoding:
    n: int
    init_bits: str
    hadamard_bits: str
    cnot_pairs: tuple[tuple[int, int], ...]  # 1-based (control, target)

    @property
    def bits(self) -> str:
        iw = index_width(self.n)
        out = [self.init_bits, self.hadamard_bits, format(len(self.cnot_pairs), "b").zfill(count_width(self.n))]
        for c, t in self.cnot_pairs:
            if iw:
                out.append(format(c - 1, "b").zfill(iw) + format(t - 1, "b").zfill(iw))
        return "".join(out)


def _parse_layout(enc: str, n: int) -> StateEncoding:
    if n < 1:
        raise InvalidEncoding("LengthMismatch", "n must be >= 1")
    if set(enc) - {"0", "1"}:
        raise InvalidEncoding("LengthMismatch", "encoding must be a string of 0/1")
    cw, iw = count_width(n), index_width(n)
    head = 2 * n + cw
    if len(enc) < head:
        raise InvalidEncoding("LengthMismatch", f"need at least {head} bits, got {len(enc)}")
    count = int(enc[2 * n:head], 2) if cw else 0
    if count > n - 1:
        raise InvalidEncoding("CountOverflow", f"{count} CNOTs but at most {n - 1} allowed")
    if len(enc) != encoding_length(n, count):
        raise InvalidEncoding("LengthMismatch", f"expected {encoding_length(n, count)} bits, got {len(enc)}")
    pairs = []
    for i in range(count):
        off = head + 2 * iw * i
        pairs.append((int(enc[off:off + iw], 2) + 1, int(enc[off + iw:off + 2 * iw], 2) + 1))
    return StateEncoding(n, enc[:n], enc[n:2 * n], tuple(pairs))


def _check_rules(layout: StateEncoding) -> None:
    n = layout.n
    init, had = layout.init_bits, layout.hadamard_bits
    targets = set()
    prev = None
    for c, t in layout.cnot_pairs:
        if c > n or t > n:
            raise InvalidEncoding("PositionOutOfRange", f"pair ({c},{t}) outside 1..{n}")
        if c == t:
            raise InvalidEncoding("SelfLoop", f"pair ({c},{t})")
        if prev is not None and (c, t) <= prev:
            raise InvalidEncoding("UnsortedPairs", f"pair ({c},{t}) after {prev}")
        prev = (c, t)
        if had[c - 1] != "1" or init[c - 1] != "0":
            raise InvalidEncoding("ControlNotPlus", f"control {c} is not |+>")
        # a control has hadamard bit 1 and a target 0, so no qubit can be both
        if had[t - 1] != "0":
            raise InvalidEncoding("TargetHasHadamard", f"target {t}")
        if t in targets:
            raise InvalidEncoding("DuplicateTarget", f"target {t}")
        targets.add(t)
        if c > t:
            raise InvalidEncoding("ControlNotSmallest", f"control {c} is above its target {t}")


def validate_encoding(enc: str, n: int) -> tuple[bool, Optional[str]]:
    """(True, None) if ``enc`` decodes; otherwise (False, name of first violated rule)."""
    try:
        _check_rules(_parse_layout(enc, n))
    except InvalidEncoding as exc:
        return False, exc.rule
    return True, None


def decode_state(enc: str, n: int) -> GchState:
    """Build the GCH state described by a state encoding."""
    layout = _parse_layout(enc, n)
    _check_rules(layout)
    singles = {}
    for p in range(1, n + 1):
        kind = "H" if layout.hadamard_bits[p - 1] == "1" else "C"
        singles[p] = Single.of(kind, int(layout.init_bits[p - 1]))
    state = GchState.build(n, singles)
    for c, t in layout.cnot_pairs:
        state = apply_cnot_symbolic(state, c, t)
    return state


def encode_state(state: GchState) -> str:
    n = state.n
    init = ["0"] * n
    had = ["0"] * n
    pairs = []
    for p, lab in enumerate(state.labels, 1):
        if isinstance(lab, Single):
            init[p - 1] = str(lab.bit)
            had[p - 1] = "1" if lab.kind == "H" else "0"
    for blk in state.blocks:
        head = blk.positions[0]
        had[head - 1] = "1"
        for p, b in zip(blk.positions[1:], blk.bits[1:]):
            init[p - 1] = b
            pairs.append((head, p))
    return StateEncoding(n, "".join(init), "".join(had), tuple(sorted(pairs))).bits


def state_to_bytes(state: GchState) -> bytes:
    return bits_to_bytes(encode_state(state))


def state_bits_from_bytes(data: bytes, n: int) -> str:
    """Strip the byte padding from a packed state encoding."""
    bits = bytes_to_bits(data)
    cw = count_width(n)
    head = 2 * n + cw
    if len(bits) < head:
        raise InvalidEncoding("LengthMismatch", f"need at least {head} bits, got {len(bits)}")
    count = int(bits[2 * n:head], 2) if cw else 0
    if count > n - 1:
        raise InvalidEncoding("CountOverflow", f"{count} CNOTs but at most {n - 1} allowed")
    length = encoding_length(n, count)
    if len(data) != (length + 7) // 8 or "1" in bits[length:]:
        raise InvalidEncoding("LengthMismatch", f"{len(data)} bytes do not hold a {length}-bit encoding")
    return bits[:length]


# -- uniform sampling --------------------------------------------------------

def _state_count_table(n: int) -> list[int]:
    """table[m] = number of GCH states on m labelled qubits."""
    table = [1]
    for m in range(1, n + 1):
        total = 4 * table[m - 1]
        for j in range(2, m + 1):
            total += comb(m - 1, j - 1) * (1 << (j - 1)) * table[m - j]
        table.append(total)
    return table


def count_states(n: int) -> int:
    return _state_count_table(n)[n]


def sample_uniform_state(n: int, randomness: PrngStream, method: str = "exact",
                         max_rejections: int = 10**6) -> tuple[str, GchState]:
    """Uniformly random valid encoding and its state.

    ``method="exact"`` draws the state directly from the counted structure
    (smallest unassigned qubit: singleton or block of size j). ``"rejection"``
    draws raw bits for the longest layout, keeps the bits a shorter encoding
    does not use only if they are zero, and retries until valid; it is exact
    too but only practical for tiny n.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if method == "rejection":
        return _sample_by_rejection(n, randomness, max_rejections)
    if method != "exact":
        raise ValueError(f"unknown method {method!r}")
    table = _state_count_table(n)
    remaining = list(range(1, n + 1))
    singles, blocks = {}, []
    while remaining:
        m = len(remaining)
        head, rest = remaining[0], remaining[1:]
        r = randomness.randbelow(table[m])
        size = 1
        acc = 4 * table[m - 1]
        while r >= acc:
            size += 1
            acc += comb(m - 1, size - 1) * (1 << (size - 1)) * table[m - size]
        if size == 1:
            singles[head] = "01+-"[randomness.randbelow(4)]
            remaining = rest
            continue
        others = randomness.sample(rest, size - 1)
        members = [head] + sorted(others)
        tail = format(randomness.randbelow(1 << (size - 1)), "b").zfill(size - 1)
        blocks.append((members, "0" + tail))
        remaining = [p for p in rest if p not in others]
    state = GchState.build(n, singles, blocks)
    return encode_state(state), state


def _sample_by_rejection(n, randomness, max_rejections):
    longest = encoding_length(n, n - 1)
    nbytes = (longest + 7) // 8
    for _ in range(max_rejections):
        raw = bytes_to_bits(randomness.read(nbytes))[:longest]
        cw = count_width(n)
        count = int(raw[2 * n:2 * n + cw], 2) if cw else 0
        if count > n - 1:
            continue
        length = encoding_length(n, count)
        if "1" in raw[length:]:
            continue
        ok, _ = validate_encoding(raw[:length], n)
        if ok:
            return raw[:length], decode_state(raw[:length], n)
    raise RetriesExhausted(f"no valid encoding after {max_rejections} draws")


# -- circuit family encoding -------------------------------------------------

class _BitWriter:
    def __init__(self):
        self.parts: list[str] = []

    def put(self, value: int, width: int):
        if value < 0 or value >> width:
            raise ValueError(f"{value} does not fit in {width} bits")
        if width:
            self.parts.append(format(value, "b").zfill(width))

    def put_bits(self, bits: str):
        self.parts.append(bits)

    def pad(self):
        used = sum(map(len, self.parts))
        self.parts.append("0" * (-used % 8))

    def getvalue(self) -> bytes:
        return bits_to_bytes("".join(self.parts))


def encode_circuit_family(family: CircuitFamily) -> bytes:
    n = family.n
    w = _BitWriter()
    w.put(n, 16)
    for circ in family.circuits:
        w.put(len(circ.layers), 16)
        for layer in circ.layers:
            w.put(len(layer.gates), 8)
            for g in layer.gates:
                w.put(g.control - 1, 16)
                w.put(g.target - 1, 16)
        w.put_bits("".join("1" if p in circ.marked else "0" for p in range(1, n + 1)))
        w.put_bits("".join("1" if p in circ.measured else "0" for p in range(1, n + 1)))
        w.put_bits("".join(str(f) for f in circ.measurement_basis))
        w.pad()
    return w.getvalue()


class _BitReader:
    def __init__(self, data: bytes):
        self.data = data
        self.bits = bytes_to_bits(data)
        self.pos = 0

    def take(self, width: int) -> str:
        if self.pos + width > len(self.bits):
            raise MalformedCircuitEncoding(self.pos // 8, "truncated input")
        out = self.bits[self.pos:self.pos + width]
        self.pos += width
        return out

    def uint(self, width: int) -> int:
        return int(self.take(width), 2) if width else 0

    def align(self):
        rest = -self.pos % 8
        if "1" in self.take(rest):
            raise MalformedCircuitEncoding(self.pos // 8, "non-zero padding")


def decode_circuit_family(enc: bytes) -> CircuitFamily:
    r = _BitReader(enc)
    n = r.uint(16)
    if n < 1:
        raise MalformedCircuitEncoding(0, "n must be positive")
    circuits = []
    for _ in range(n):
        start = r.pos // 8
        layers = []
        for _ in range(r.uint(16)):
            gates = []
            for _ in range(r.uint(8)):
                off = r.pos // 8
                c, t = r.uint(16) + 1, r.uint(16) + 1
                if c > n or t > n or c == t:
                    raise MalformedCircuitEncoding(off, f"bad gate ({c},{t}) for n={n}")
                gates.append(CnotGate(c, t))
            try:
                layers.append(Layer(tuple(gates)))
            except ValueError as exc:
                raise MalformedCircuitEncoding(start, str(exc)) from None
        marked = tuple(p for p, b in enumerate(r.take(n), 1) if b == "1")
        measured = tuple(p for p, b in enumerate(r.take(n), 1) if b == "1")
        flags = tuple(int(b) for b in r.take(len(measured)))
        r.align()
        try:
            circuits.append(ConstituentCircuit(tuple(layers), marked, measured, flags))
        except ValueError as exc:
            raise MalformedCircuitEncoding(start, str(exc)) from None
    if r.pos != len(r.bits):
        raise MalformedCircuitEncoding(r.pos // 8, "trailing bytes")
    return CircuitFamily(n, tuple(circuits))


# -- text I/O ----------------------------------------------------------------

def format_hex_record(n: int, data: bytes) -> str:
    return f"n={n}\n0x{data.hex()}"


def parse_hex(text: str) -> bytes:
    text = text.strip()
    if not text.lower().startswith("0x"):
        raise ValueError(f"hex value must start with 0x: {text!r}")
    body = text[2:]
    if len(body) % 2:
        raise ValueError("hex value needs an even number of digits")
    return bytes.fromhex(body)


def parse_hex_records(lines: Iterable[str]) -> list[tuple[int, bytes]]:
    """Read ``n=<int>`` header lines followed by ``0x`` hex lines."""
    out = []
    n = None
    for raw in lines:
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("n="):
            n = int(line[2:])
            continue
        if n is None:
            raise ValueError("hex record before any n=<int> header")
        out.append((n, parse_hex(line)))
    return out
