"""Shared builders for the test suite.

Randomized tests draw from seeded generators so every run sees the same
instances. Oracles inside tests are written independently of the package
internals (explicit kron loops, direct matrix exponentials, brute-force
binomial sums) so agreement is evidence, not tautology.
"""

import zlib

import numpy as np
import pytest

from qclock import (
    Circuit, DensityMatrix, Gate, LocalHamiltonian, LocalTerm, PureState,
    RegisterLayout,
)

GATE_POOL = ("I", "X", "Y", "Z", "H", "S", "T")
TWO_QUBIT_POOL = ("CNOT", "CZ")


def rng_for(name: str, seed: int = 20260819) -> np.random.Generator:
    return np.random.default_rng([seed, zlib.crc32(name.encode())])


def random_circuit(rng, n_input=None, n_ancilla=None, length=None,
                   epsilon: float = 0.25) -> Circuit:
    """Random circuit from the named-gate pool with a valid accept qubit."""
    if n_input is None:
        n_input = int(rng.integers(1, 4))
    if n_ancilla is None:
        n_ancilla = int(rng.integers(0, max(1, 5 - n_input)))
    if length is None:
        length = int(rng.integers(1, 6))
    total = n_input + n_ancilla
    gates = []
    for _ in range(length):
        if total >= 2 and rng.random() < 0.4:
            a, b = rng.choice(total, size=2, replace=False)
            gates.append(Gate(str(rng.choice(TWO_QUBIT_POOL)), (int(a), int(b))))
        else:
            gates.append(Gate(str(rng.choice(GATE_POOL)),
                              (int(rng.integers(0, total)),)))
    accept = int(rng.integers(0, total))
    return Circuit(RegisterLayout(n_input, n_ancilla), tuple(gates),
                   accept_qubit=accept, epsilon=epsilon)


def perfect_circuit(rng, n_input: int, length: int) -> Circuit:
    """No-ancilla circuit; its acceptance operator has a +1 eigenvector,
    so the best witness is accepted with probability exactly 1."""
    c = random_circuit(rng, n_input=n_input, n_ancilla=0, length=length)
    return c


def all_reject_circuit(rng, n_input: int, length: int) -> Circuit:
    """Accept qubit is an ancilla no gate touches: acceptance 0 always."""
    gates = []
    for _ in range(length):
        gates.append(Gate(str(rng.choice(GATE_POOL)),
                          (int(rng.integers(0, n_input)),)))
    return Circuit(RegisterLayout(n_input, 1), tuple(gates),
                   accept_qubit=n_input, epsilon=0.25)


def random_pure_state(rng, num_qubits: int) -> PureState:
    v = rng.normal(size=2 ** num_qubits) + 1j * rng.normal(size=2 ** num_qubits)
    return PureState(num_qubits, v / np.linalg.norm(v))


def random_density_matrix(rng, num_qubits: int, rank=None) -> DensityMatrix:
    d = 2 ** num_qubits
    r = rank or d
    a = rng.normal(size=(d, r)) + 1j * rng.normal(size=(d, r))
    m = a @ a.conj().T
    return DensityMatrix(num_qubits, m / np.trace(m).real)


def random_unit_interval_hermitian(rng, k: int) -> np.ndarray:
    """Random Hermitian with spectrum inside [0, 1] (valid POVM element)."""
    d = 2 ** k
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    m = (a + a.conj().T) / 2
    lo, hi = np.linalg.eigvalsh(m)[[0, -1]]
    if hi - lo < 1e-12:
        return np.eye(d) * 0.5
    return (m - lo * np.eye(d)) / (hi - lo)


def random_povm_hamiltonian(rng, num_qubits: int, num_terms: int) -> LocalHamiltonian:
    """3-local terms, each PSD with norm <= 1, positive weights."""
    terms = []
    for _ in range(num_terms):
        k = int(rng.integers(1, min(4, num_qubits + 1)))
        support = tuple(sorted(int(x) for x in
                               rng.choice(num_qubits, size=k, replace=False)))
        mat = random_unit_interval_hermitian(rng, k)
        terms.append(LocalTerm("in", float(rng.uniform(0.2, 2.0)), support, mat))
    return LocalHamiltonian(num_qubits, tuple(terms))


def assemble_oracle(h: LocalHamiltonian) -> np.ndarray:
    """Independent dense assembly: explicit kron against identities plus an
    index-permutation via axis reordering, written from scratch."""
    n = h.num_qubits
    d = 2 ** n
    out = np.zeros((d, d), dtype=complex)
    for t in h.terms:
        # build in support order then permute axes into register order
        rest = [q for q in range(n) if q not in t.support]
        full = np.kron(t.matrix, np.eye(2 ** len(rest)))
        order = list(t.support) + rest
        tensor = full.reshape((2,) * (2 * n))
        inv = np.argsort(order)
        tensor = tensor.transpose(tuple(inv) + tuple(np.array(inv) + n))
        out += t.weight * tensor.reshape(d, d)
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20260819)
