"""Pauli-string readout: probabilities from expectation values only.

Pauli strings on ``n`` qubits are indexed in base 4 with the most
significant digit on qubit 0 and digits 0, 1, 2, 3 meaning I, X, Y, Z.
A projector ``P`` decomposes as ``sum_i c_i B_i`` with
``c_i = tr(P B_i) / 2**n``; given ``b_i = tr(rho B_i)`` the outcome
probability is ``sum_i c_i b_i``.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .golden import ReadoutEntry, readout_entries
from .quantum import I2, PARTY_SITES, X, Y, Z, DensityOperator, ObservableSpec, chsh_angles

LETTERS = "IXYZ"
_MATS = {"I": I2, "X": X, "Y": Y, "Z": Z}
ZERO_TOL = 1e-13
CLIP_TOL = 1e-9


@dataclass(frozen=True, order=True)
class PauliString:
    index: int
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("a Pauli string needs at least one qubit")
        if not 0 <= self.index < 4**self.n:
            raise ValueError(f"index {self.index} outside [0, {4**self.n})")

    @property
    def letters(self) -> str:
        digits = []
        i = self.index
        for _ in range(self.n):
            digits.append(LETTERS[i % 4])
            i //= 4
        return "".join(reversed(digits))

    @classmethod
    def from_letters(cls, letters: str) -> "PauliString":
        idx = 0
        for ch in letters.upper():
            idx = 4 * idx + LETTERS.index(ch)
        return cls(idx, len(letters))

    def matrix(self) -> np.ndarray:
        return _pauli_matrix(self.index, self.n)

    def __str__(self):
        return self.letters


@functools.lru_cache(maxsize=4096)
def _pauli_matrix(index: int, n: int) -> np.ndarray:
    letters = PauliString(index, n).letters
    m = np.array([[1.0 + 0j]])
    for ch in letters:
        m = np.kron(m, _MATS[ch])
    m.setflags(write=False)
    return m


def base4_pauli(index: int, n: int) -> PauliString:
    return PauliString(index, n)


@dataclass(frozen=True)
class PauliDecomposition:
    n: int
    coefficients: Mapping[PauliString, float]

    def __getitem__(self, index: int) -> float:
        return self.coefficients.get(PauliString(index, self.n), 0.0)

    def by_index(self) -> dict[int, float]:
        return {p.index: c for p, c in sorted(self.coefficients.items())}

    def matrix(self) -> np.ndarray:
        d = 2**self.n
        out = np.zeros((d, d), dtype=complex)
        for p, c in self.coefficients.items():
            out += c * p.matrix()
        return out


def decompose(m, n: int) -> PauliDecomposition:
    """Real Pauli coefficients of a Hermitian operator on ``n`` qubits."""
    m = np.asarray(m, dtype=complex)
    d = 2**n
    if m.shape != (d, d):
        raise ValueError(f"operator shape {m.shape} does not match {n} qubits")
    if np.max(np.abs(m - m.conj().T)) > 1e-10:
        raise ValueError("operator is not Hermitian")
    coeffs = {}
    for i in range(4**n):
        b = _pauli_matrix(i, n)
        # tr(M B) without forming the product
        c = np.sum(m * b.T).real / d
        if abs(c) >= ZERO_TOL:
            coeffs[PauliString(i, n)] = float(c)
    return PauliDecomposition(n, coeffs)


def expectations(rho: DensityOperator, strings: Iterable[PauliString]) -> dict[PauliString, float]:
    """b_i = tr(rho B_i) for each requested string."""
    out = {}
    for p in strings:
        if p.n != rho.n_qubits:
            raise ValueError(f"string {p} acts on {p.n} qubits, state has {rho.n_qubits}")
        out[p] = float(np.sum(rho.matrix * p.matrix().T).real)
    return out


def probability_from_expectations(
    dec: PauliDecomposition, b: Mapping[PauliString, float]
) -> float:
    """sum_i c_i b_i, with the identity's expectation taken as 1 if absent."""
    total = 0.0
    for p, c in dec.coefficients.items():
        if p in b:
            total += c * b[p]
        elif p.index == 0:
            total += c
        else:
            raise KeyError(f"no expectation value for {p} (b{p.index})")
    if -CLIP_TOL <= total < 0:
        total = 0.0
    elif 1 < total <= 1 + CLIP_TOL:
        total = 1.0
    return total


def embed(ops: Mapping[int, np.ndarray], n: int) -> np.ndarray:
    """Tensor single-qubit operators into an ``n``-qubit operator."""
    m = np.array([[1.0 + 0j]])
    for k in range(n):
        m = np.kron(m, ops.get(k, I2))
    return m


def outcome_projector(
    settings: Iterable[tuple[ObservableSpec, int]], n: int
) -> np.ndarray:
    """Product projector for the given (observable, outcome) pairs."""
    ops = {}
    for obs, outcome in settings:
        if obs.site in ops:
            raise ValueError(f"two observables on qubit {obs.site}")
        ops[obs.site] = obs.projector(outcome)
    return embed(ops, n)


def readout_distribution(
    rho: DensityOperator, o1: ObservableSpec, o2: ObservableSpec
) -> np.ndarray:
    """2x2 outcome table reconstructed purely from Pauli expectations."""
    n = rho.n_qubits
    decs = {}
    for i, a in enumerate((1, -1)):
        for j, c in enumerate((1, -1)):
            decs[(i, j)] = decompose(outcome_projector([(o1, a), (o2, c)], n), n)
    strings = {p for d in decs.values() for p in d.coefficients}
    b = expectations(rho, strings)
    table = np.empty((2, 2))
    for (i, j), d in decs.items():
        table[i, j] = probability_from_expectations(d, b)
    return table


@dataclass(frozen=True)
class ReadoutRow:
    label: str
    index: int
    reference: float
    regenerated: float

    @property
    def delta(self) -> float:
        return abs(self.reference - self.regenerated)


def _entry_projector(entry: ReadoutEntry, angles: Mapping[str, float], n: int = 3) -> np.ndarray:
    names = [name for name, _ in entry.settings]
    sites = sorted(PARTY_SITES[name[0]] for name in names)
    settings = [
        (ObservableSpec(angles[name], site), outcome)
        for (name, outcome), site in zip(entry.settings, sites)
    ]
    return outcome_projector(settings, n)


def readout_report(theta: float) -> list[ReadoutRow]:
    """Regenerate every reference readout coefficient at opening ``theta``.

    One row per reference coefficient, identity terms included.
    """
    angles = chsh_angles(theta)
    rows = []
    for entry in readout_entries():
        dec = decompose(_entry_projector(entry, angles), 3)
        for index, value in entry.coefficients:
            rows.append(ReadoutRow(entry.label, index, value, dec[index]))
    return rows
