"""Compile verifier circuits into 3-local clock Hamiltonians.

The compiled operator is H = H_in + H_out + H_prop + H_clock on the register
(input, ancilla, clock), with a unary clock: step t is encoded as 1^t 0^(L-t)
on L clock qubits. Low-energy states of H are history states

    |eta> = (L+1)^(-1/2) sum_t (U_t ... U_1 |input, 0...0>) (x) |t>

whose energy reproduces 1 - accept probability, scaled by 1/(L+1).

Parts and weights:
  clock           weight clock_penalty (default L^12), |01><01| on every
                  clock pair i<j; penalizes non-unary bitstrings
  in              weight 1 per ancilla, |1><1| (x) |0><0| on (ancilla, clock 1)
  out             weight 1, |0><0| (x) |1><1| on (accept, clock L)
  prop_projector  weight 1/2, the two clock-pattern projectors of each step
  prop_hopping    weight 1/2, -U_t (x) |1>_t<0| - U_t^dag (x) |0>_t<1| on
                  (gate targets, clock t); Hermitian, norm 1, not PSD

The hopping acts on clock qubit t alone, so it couples legal and illegal
clock sectors; the clock penalty suppresses the coupling to O(1/penalty)
but the assembled matrix is not exactly PSD (ground energies of perfect
instances sit a hair below zero, bounded by -O(L)/penalty).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParseError, ValidationError
from .qcore import (
    DENSE_QUBIT_CAP, QUBIT_CAP, DensityMatrix, Operator, PureState,
    RegisterLayout, _check_qubit_count, _content_lines, _embed_matrix,
    _parse_entry_lines, fmt_float, partial_trace, permute_to_sorted,
)
from .circuit import Circuit, apply_gates

PARTS = ("in", "out", "prop_projector", "prop_hopping", "clock")
_PSD_PARTS = ("in", "out", "prop_projector", "clock")

_P0 = np.diag([1.0, 0.0]).astype(complex)
_P1 = np.diag([0.0, 1.0]).astype(complex)
_LOWER = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)  # |1><0|

__all__ = [
    "PARTS", "LocalTerm", "LocalHamiltonian", "ClockState", "unary_encode",
    "compile_circuit", "history_transform", "history_state",
    "legal_clock_projector", "term_expectation", "parse_hamiltonian",
    "serialize_hamiltonian",
]


def unary_encode(t: int, length: int) -> str:
    """Unary clock bit pattern 1^t 0^(L-t)."""
    if not 0 <= t <= length:
        raise ValidationError(f"clock value {t} outside 0..{length}")
    return "1" * t + "0" * (length - t)


@dataclass(frozen=True)
class ClockState:
    """Clock register value t on length qubits, unary encoded."""

    t: int
    length: int

    def __post_init__(self):
        unary_encode(self.t, self.length)  # range check

    @property
    def bits(self) -> str:
        return unary_encode(self.t, self.length)

    @property
    def basis_index(self) -> int:
        return int(self.bits, 2) if self.length else 0


@dataclass(frozen=True)
class LocalTerm:
    """One weighted k-local term (k <= 3), matrix given on sorted support."""

    part: str
    weight: float
    support: tuple
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.part not in PARTS:
            raise ValidationError(f"unknown part tag {self.part!r}")
        if not self.weight > 0:
            raise ValidationError(f"term weight {self.weight} must be positive")
        support = tuple(int(q) for q in self.support)
        object.__setattr__(self, "support", support)
        if not 1 <= len(support) <= 3:
            raise ValidationError(f"support size {len(support)} outside 1..3")
        if list(support) != sorted(set(support)):
            raise ValidationError(f"support {support} must be strictly increasing")
        m = np.array(self.matrix, dtype=complex)
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        k = len(support)
        if m.shape != (2 ** k, 2 ** k):
            raise ValidationError(f"matrix shape {m.shape} does not match support {support}")
        if np.abs(m - m.conj().T).max() > 1e-12:
            raise ValidationError("term matrix not Hermitian within 1e-12")
        evals = np.linalg.eigvalsh(m)
        if max(abs(evals[0]), abs(evals[-1])) > 1.0 + 1e-12:
            raise ValidationError(f"term norm {max(abs(evals)):.6f} exceeds 1")
        if self.part in _PSD_PARTS and evals[0] < -1e-10:
            raise ValidationError(
                f"{self.part} term has negative eigenvalue {evals[0]:.3e}"
            )


@dataclass(frozen=True)
class LocalHamiltonian:
    """Weighted sum of local terms over an (input, ancilla, clock) register."""

    layout: RegisterLayout
    terms: tuple

    def __post_init__(self):
        if isinstance(self.layout, int):
            # plain register with no clock semantics
            object.__setattr__(self, "layout", RegisterLayout(self.layout, 0))
        object.__setattr__(self, "terms", tuple(self.terms))
        n = self.layout.total
        for term in self.terms:
            if term.support[-1] >= n:
                raise ValidationError(
                    f"term support {term.support} outside register of {n}"
                )

    @property
    def num_qubits(self) -> int:
        return self.layout.total

    @property
    def total_weight(self) -> float:
        return float(sum(t.weight for t in self.terms))

    def part_counts(self) -> dict:
        counts = {p: 0 for p in PARTS}
        for t in self.terms:
            counts[t.part] += 1
        return counts

    def restricted_to(self, parts) -> "LocalHamiltonian":
        parts = set(parts)
        return LocalHamiltonian(
            self.layout, tuple(t for t in self.terms if t.part in parts)
        )


def term_expectation(rho: DensityMatrix, term: LocalTerm) -> float:
    """tr(rho M_hat) for one embedded term matrix (weight not applied)."""
    sigma = partial_trace(rho, term.support)
    val = np.sum(sigma.entries * term.matrix.T)
    return float(val.real)


def _time_projector(layout: RegisterLayout, t: int):
    """Projector picking clock value t out of the legal subspace, as
    (support, matrix). Two clock qubits in the bulk, one at the ends."""
    length = layout.n_clock
    if t == length:
        return (layout.clock_qubit(length),), _P1
    if t == 0:
        return (layout.clock_qubit(1),), _P0
    pair = (layout.clock_qubit(t), layout.clock_qubit(t + 1))
    return pair, np.kron(_P1, _P0)


def compile_circuit(c: Circuit, clock_penalty: float | None = None,
                    accept_qubits=None) -> LocalHamiltonian:
    """Compile a verifier circuit into its clock Hamiltonian.

    Parameters
    ----------
    c : Circuit
    clock_penalty : weight of the clock terms, default L**12. Desk-scale
        analyses may pass something smaller to keep the spectrum
        well-conditioned for iterative solvers.
    accept_qubits : optional list of accept qubits, one out-term each
        (used for replicated meta-circuits; default [c.accept_qubit]).
    """
    length = c.length
    layout = RegisterLayout(c.n_input, c.n_ancilla, length)
    _check_qubit_count(layout.total, QUBIT_CAP, "compile_circuit")
    penalty = float(length ** 12) if clock_penalty is None else float(clock_penalty)
    if not penalty > 0:
        raise ValidationError(f"clock penalty {penalty} must be positive")
    if accept_qubits is None:
        accept_qubits = (c.accept_qubit,)
    terms = []

    zero_one = np.kron(_P0, _P1)  # |01><01|
    for i in range(1, length + 1):
        for j in range(i + 1, length + 1):
            terms.append(LocalTerm(
                "clock", penalty,
                (layout.clock_qubit(i), layout.clock_qubit(j)), zero_one,
            ))

    c1 = layout.clock_qubit(1)
    for a in layout.ancilla_qubits:
        terms.append(LocalTerm("in", 1.0, (a, c1), np.kron(_P1, _P0)))

    cl = layout.clock_qubit(length)
    for acc in accept_qubits:
        if not 0 <= acc < c.n_input + c.n_ancilla:
            raise ValidationError(f"accept qubit {acc} outside register")
        terms.append(LocalTerm("out", 1.0, (acc, cl), np.kron(_P0, _P1)))

    for t in range(1, length + 1):
        for s in (t, t - 1):
            support, mat = _time_projector(layout, s)
            terms.append(LocalTerm("prop_projector", 0.5, support, mat))
        gate = c.gates[t - 1]
        u = gate.matrix
        hop = -(np.kron(u, _LOWER) + np.kron(u.conj().T, _LOWER.T))
        support = list(gate.targets) + [layout.clock_qubit(t)]
        support, hop = permute_to_sorted(hop, support)
        terms.append(LocalTerm("prop_hopping", 0.5, tuple(support), hop))

    return LocalHamiltonian(layout, tuple(terms))


def history_transform(c: Circuit) -> Operator:
    """Unitary applying the first t gates when the clock reads t.

    Built as the ordered product of clock-controlled gates,
    W_t = U_t (x) |1>_t<1| + I (x) |0>_t<0|, with W_1 applied first.
    Diagonal in the clock basis, so legal clock states stay legal.
    """
    layout = RegisterLayout(c.n_input, c.n_ancilla, c.length)
    n = layout.total
    _check_qubit_count(n, DENSE_QUBIT_CAP, "history_transform")
    w = np.eye(2 ** n, dtype=complex)
    for t in range(1, c.length + 1):
        gate = c.gates[t - 1]
        k = len(gate.targets)
        controlled = np.zeros((2 ** (k + 1),) * 2, dtype=complex)
        controlled[: 2 ** k, : 2 ** k] = np.eye(2 ** k)   # clock bit 0 first factor
        controlled[2 ** k:, 2 ** k:] = gate.matrix
        support = [layout.clock_qubit(t)] + list(gate.targets)
        support, mat = permute_to_sorted(controlled, support)
        w = _embed_matrix(mat, support, n) @ w
    return Operator(n, w, "unitary")


def history_state(c: Circuit, input_state: PureState) -> PureState:
    """Uniform superposition of snapshots (U_t...U_1 |input,0..0>) (x) |t>."""
    if input_state.num_qubits != c.n_input:
        raise ValidationError(
            f"input has {input_state.num_qubits} qubits, circuit expects {c.n_input}"
        )
    n, m, length = c.n_input, c.n_ancilla, c.length
    _check_qubit_count(n + m + length, 16, "history_state")
    anc = np.zeros(2 ** m, dtype=complex)
    anc[0] = 1.0
    snap = np.kron(input_state.amplitudes, anc)
    dim_c = 2 ** length
    out = np.zeros((2 ** (n + m), dim_c), dtype=complex)
    out[:, ClockState(0, length).basis_index] = snap
    for t in range(1, length + 1):
        snap = apply_gates(
            Circuit(c.layout, (c.gates[t - 1],), c.accept_qubit, c.epsilon), snap
        )
        out[:, ClockState(t, length).basis_index] += snap
    vec = out.reshape(-1) / np.sqrt(length + 1)
    return PureState(n + m + length, vec)


def legal_clock_projector(length: int) -> Operator:
    """Projector onto the L+1 unary clock strings, dense on L qubits."""
    _check_qubit_count(length, DENSE_QUBIT_CAP, "legal_clock_projector")
    diag = np.zeros(2 ** length)
    for t in range(length + 1):
        diag[ClockState(t, length).basis_index] = 1.0
    return Operator(length, np.diag(diag).astype(complex), "hermitian")


# --- term-list text format ---------------------------------------------------
#
#   qubits 5
#   layout 1 1 3
#   term clock 531441 2 2 3
#   <16 `re im` lines, row-major>
#   ...

def serialize_hamiltonian(h: LocalHamiltonian) -> str:
    lay = h.layout
    out = [f"qubits {h.num_qubits}",
           f"layout {lay.n_input} {lay.n_ancilla} {lay.n_clock}"]
    for t in h.terms:
        out.append(
            f"term {t.part} {fmt_float(t.weight)} {len(t.support)} "
            + " ".join(str(q) for q in t.support)
        )
        for z in t.matrix.reshape(-1):
            out.append(f"{fmt_float(z.real)} {fmt_float(z.imag)}")
    return "\n".join(out) + "\n"


def parse_hamiltonian(text: str) -> LocalHamiltonian:
    lines = _content_lines(text)
    if len(lines) < 2:
        raise ParseError("expected `qubits N` and `layout n m L` headers", line=1)
    lineno, head = lines[0]
    parts = head.split()
    if len(parts) != 2 or parts[0] != "qubits":
        raise ParseError(f"expected `qubits N`, got {head!r}", line=lineno)
    try:
        total = int(parts[1])
    except ValueError:
        raise ParseError(f"bad qubit count {parts[1]!r}", line=lineno) from None
    lineno, lay_line = lines[1]
    parts = lay_line.split()
    if len(parts) != 4 or parts[0] != "layout":
        raise ParseError(f"expected `layout n m L`, got {lay_line!r}", line=lineno)
    try:
        n, m, length = (int(p) for p in parts[1:])
    except ValueError:
        raise ParseError(f"bad layout in {lay_line!r}", line=lineno) from None
    layout = RegisterLayout(n, m, length)
    if layout.total != total:
        raise ParseError(
            f"layout totals {layout.total} but header says {total}", line=lineno
        )
    terms = []
    i = 2
    while i < len(lines):
        lineno, content = lines[i]
        parts = content.split()
        if parts[0] != "term":
            raise ParseError(f"expected `term ...`, got {content!r}", line=lineno)
        if len(parts) < 5:
            raise ParseError("expected `term <part> <weight> <k> <q...>`", line=lineno)
        part = parts[1]
        try:
            weight = float(parts[2])
            k = int(parts[3])
            support = tuple(int(q) for q in parts[4:])
        except ValueError:
            raise ParseError(f"bad term header {content!r}", line=lineno) from None
        if len(support) != k:
            raise ParseError(f"term says {k} qubits but lists {len(support)}", line=lineno)
        i += 1
        vals = _parse_entry_lines(lines[i:], lineno, 4 ** k)
        i += 4 ** k
        try:
            terms.append(LocalTerm(part, weight, support, vals.reshape(2 ** k, 2 ** k)))
        except ValidationError as exc:
            raise ParseError(str(exc), line=lineno) from None
    try:
        return LocalHamiltonian(layout, tuple(terms))
    except ValidationError as exc:
        raise ParseError(str(exc), line=lines[0][0]) from None
