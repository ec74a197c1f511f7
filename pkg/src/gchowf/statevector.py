"""Dense statevector routines used as an independent oracle at small n.

Qubit 1 is the most significant bit of the amplitude index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, TooLarge

TOL = 1e-9
MAX_QUBITS = 14

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


@dataclass(frozen=True, eq=False)
class Statevector:
    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (1 << self.n,):
            raise DimensionMismatch(f"expected {1 << self.n} amplitudes, got {amps.shape}")
        if abs(np.vdot(amps, amps).real - 1.0) > TOL:
            raise ValueError("statevector is not normalized")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def equals_up_to_phase(self, other: "Statevector", tol: float = TOL) -> bool:
        return self.n == other.n and equal_up_to_phase(self.amplitudes, other.amplitudes, tol)

    def probability_of_bits(self, bits: str) -> float:
        return float(abs(self.amplitudes[int(bits, 2)]) ** 2)


def check_size(n: int, cap: int = MAX_QUBITS) -> None:
    if n > cap:
        raise TooLarge("n", n, cap)


def basis_state(bits: str) -> np.ndarray:
    vec = np.zeros(1 << len(bits), dtype=complex)
    vec[int(bits, 2) if bits else 0] = 1.0
    return vec


def apply_cnot(vec: np.ndarray, n: int, control: int, target: int) -> np.ndarray:
    """CNOT on 1-based qubit positions; returns a new array."""
    if not (1 <= control <= n and 1 <= target <= n) or control == target:
        raise DimensionMismatch(f"bad CNOT({control}->{target}) on {n} qubits")
    psi = vec.reshape([2] * n).copy()
    c, t = control - 1, target - 1
    sel = [slice(None)] * n
    sel[c] = 1
    axis = t if t < c else t - 1
    psi[tuple(sel)] = np.flip(psi[tuple(sel)], axis=axis).copy()
    return psi.reshape(-1)


def apply_h(vec: np.ndarray, n: int, qubit: int) -> np.ndarray:
    if not 1 <= qubit <= n:
        raise DimensionMismatch(f"bad H({qubit}) on {n} qubits")
    psi = np.tensordot(_H, vec.reshape([2] * n), axes=([1], [qubit - 1]))
    return np.moveaxis(psi, 0, qubit - 1).reshape(-1)


def prob_one(vec: np.ndarray, n: int, qubit: int) -> float:
    psi = vec.reshape([2] * n)
    sel = [slice(None)] * n
    sel[qubit - 1] = 1
    return float(np.sum(np.abs(psi[tuple(sel)]) ** 2))


def project(vec: np.ndarray, n: int, qubit: int, outcome: int) -> np.ndarray:
    """Collapse ``qubit`` onto ``outcome`` and renormalize."""
    psi = vec.reshape([2] * n).copy()
    sel = [slice(None)] * n
    sel[qubit - 1] = 1 - outcome
    psi[tuple(sel)] = 0
    out = psi.reshape(-1)
    norm = np.linalg.norm(out)
    if norm < TOL:
        raise ValueError("projection onto a zero-probability outcome")
    return out / norm


def equal_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float = TOL) -> bool:
    if a.shape != b.shape:
        return False
    overlap = np.vdot(a, b)
    if abs(overlap) < tol:
        return False
    phase = overlap / abs(overlap)
    return bool(np.max(np.abs(a * phase - b)) <= tol)


def phase_key(vec: np.ndarray, decimals: int = 9) -> tuple:
    """Hashable key identifying a vector up to global phase."""
    idx = int(np.argmax(np.abs(vec) > 1e-6))
    v = vec * (abs(vec[idx]) / vec[idx])
    # + 0.0 folds -0.0 into 0.0
    return tuple(np.round(v.real, decimals) + 0.0) + tuple(np.round(v.imag, decimals) + 0.0)
