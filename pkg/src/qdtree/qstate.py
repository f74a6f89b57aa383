"""Pure states, density matrices and the two-qubit product-state test.

Index convention: basis index k spells the ket |binary(k)>, with the
first-measured qubit as the most significant bit (|01> is index 1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvariantError, QubitCountError

ATOL = 1e-9


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


def _num_qubits_for(dim: int, what: str) -> int:
    n = dim.bit_length() - 1
    if dim < 2 or (1 << n) != dim:
        raise InvariantError(f"{what} has length {dim}, which is not 2^n for n >= 1")
    return n


@dataclass(frozen=True, eq=False)
class PureState:
    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if self.num_qubits < 1:
            raise InvariantError("num_qubits must be positive")
        if amps.size != 2**self.num_qubits:
            raise InvariantError(
                f"length(amplitudes) == 2^num_qubits violated: "
                f"{amps.size} != {2**self.num_qubits}"
            )
        if not np.all(np.isfinite(amps)):
            raise InvariantError("amplitudes must be finite")
        norm = math.fsum(np.abs(amps) ** 2)
        if abs(norm - 1.0) > ATOL:
            raise InvariantError(f"normalization violated: sum |amplitude|^2 = {norm!r}")
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @classmethod
    def from_amplitudes(cls, amplitudes: Sequence[complex]) -> PureState:
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        return cls(_num_qubits_for(amps.size, "amplitudes"), amps)

    @classmethod
    def from_r(cls, r: float) -> PureState:
        """(r|00> + |11>) / sqrt(1 + r^2); r = 1 is the maximally entangled state."""
        norm = math.sqrt(1.0 + r * r)
        return cls(2, [r / norm, 0.0, 0.0, 1.0 / norm])

    @classmethod
    def basis(cls, bits: str) -> PureState:
        amps = np.zeros(2 ** len(bits), dtype=complex)
        amps[int(bits, 2)] = 1.0
        return cls(len(bits), amps)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    num_qubits: int
    entries: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.entries, dtype=complex)
        dim = 2**self.num_qubits if self.num_qubits >= 1 else 0
        if self.num_qubits < 1:
            raise InvariantError("num_qubits must be positive")
        if rho.shape != (dim, dim):
            raise InvariantError(
                f"matrix shape {rho.shape} does not match 2^num_qubits = {dim}"
            )
        if not np.all(np.isfinite(rho)):
            raise InvariantError("matrix entries must be finite")
        if np.max(np.abs(rho - rho.conj().T)) > ATOL:
            raise InvariantError("Hermiticity violated")
        tr = np.trace(rho)
        if abs(tr - 1.0) > ATOL:
            raise InvariantError(f"trace == 1 violated: trace = {tr.real!r}")
        min_eig = np.linalg.eigvalsh(rho).min()
        if min_eig < -ATOL:
            raise InvariantError(f"positive semidefiniteness violated: min eigenvalue {min_eig!r}")
        object.__setattr__(self, "entries", _frozen(rho))

    @classmethod
    def from_matrix(cls, matrix) -> DensityMatrix:
        rho = np.asarray(matrix, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise InvariantError(f"density matrix must be square, got shape {rho.shape}")
        return cls(_num_qubits_for(rho.shape[0], "matrix dimension"), rho)


class ProbabilityVector:
    """Nonnegative outcome probabilities over 2^n bitstrings.

    Entries within 1e-9 outside [0, 1] are accepted and clipped; anything
    further out, or a total off by more than 1e-9, is rejected.
    """

    __slots__ = ("_probs",)

    def __init__(self, probs: Sequence[float]):
        arr = np.asarray(probs, dtype=float).reshape(-1)
        if arr.size == 0:
            raise InvariantError("probability vector is empty")
        if not np.all(np.isfinite(arr)):
            raise InvariantError("probabilities must be finite")
        if arr.min() < -ATOL or arr.max() > 1.0 + ATOL:
            raise InvariantError("every entry in [0, 1] violated")
        total = math.fsum(arr)
        if abs(total - 1.0) > ATOL:
            raise InvariantError(f"sum(probs) == 1 violated: sum = {total!r}")
        self._probs = _frozen(np.clip(arr, 0.0, 1.0))

    @property
    def probs(self) -> np.ndarray:
        return self._probs

    @property
    def num_qubits(self) -> int:
        return _num_qubits_for(self._probs.size, "probability vector")

    def __len__(self):
        return self._probs.size

    def __iter__(self):
        return iter(self._probs.tolist())

    def __getitem__(self, k):
        return self._probs[k]

    def __repr__(self):
        return f"ProbabilityVector({self._probs.tolist()!r})"


@dataclass(frozen=True, eq=False)
class SeparabilityReport:
    separable: bool
    factor_first: DensityMatrix
    factor_second: DensityMatrix
    max_deviation: float
    tol: float


def outcome_probs(state: PureState) -> ProbabilityVector:
    return ProbabilityVector(np.abs(state.amplitudes) ** 2)


def density_of(state: PureState) -> DensityMatrix:
    amps = state.amplitudes
    return DensityMatrix(state.num_qubits, np.outer(amps, amps.conj()))


def tensor(x: DensityMatrix, y: DensityMatrix) -> DensityMatrix:
    """Joint state of independent systems, x's qubits first."""
    return DensityMatrix(x.num_qubits + y.num_qubits, np.kron(x.entries, y.entries))


def _require_two_qubits(rho: DensityMatrix):
    if rho.num_qubits != 2:
        raise QubitCountError(f"expected a 2-qubit density matrix, got {rho.num_qubits} qubits")


def partial_trace(rho: DensityMatrix, keep: int) -> DensityMatrix:
    """Reduced state of qubit ``keep`` (0 = first, 1 = second)."""
    _require_two_qubits(rho)
    t = rho.entries.reshape(2, 2, 2, 2)  # (row_q0, row_q1, col_q0, col_q1)
    if keep == 0:
        reduced = np.einsum("ijkj->ik", t)
    elif keep == 1:
        reduced = np.einsum("ijil->jl", t)
    else:
        raise ValueError(f"keep must be 0 or 1, got {keep!r}")
    # symmetrize away rounding so the result passes the Hermiticity check
    return DensityMatrix(1, (reduced + reduced.conj().T) / 2)


def factor_test(rho: DensityMatrix, tol: float = 1e-6) -> SeparabilityReport:
    """Check whether a 2-qubit state equals the product of its marginals."""
    _require_two_qubits(rho)
    if not tol > 0:
        raise ValueError("tol must be positive")
    first = partial_trace(rho, 0)
    second = partial_trace(rho, 1)
    dev = float(np.max(np.abs(rho.entries - np.kron(first.entries, second.entries))))
    return SeparabilityReport(dev <= tol, first, second, dev, tol)


def diag_probs(rho: DensityMatrix) -> ProbabilityVector:
    diag = np.diagonal(rho.entries)
    if np.max(np.abs(diag.imag)) > ATOL:
        raise InvariantError("diagonal has non-negligible imaginary parts")
    return ProbabilityVector(diag.real)
