"""Dense state and operator primitives.

Convention used everywhere: qubit 0 is the leftmost tensor factor, i.e. the
most significant bit of a computational basis index. A register of N qubits
is stored as a length 2**N vector (states) or a 2**N x 2**N matrix
(operators, density matrices), complex128, row-major.

Vectors are allowed up to QUBIT_CAP qubits, dense matrices up to
DENSE_QUBIT_CAP; past that the constructors raise ResourceLimitError rather
than letting an allocation swap the machine.
"""

from __future__ import annotations

import hashlib
import zlib
from dataclasses import dataclass, field

import numpy as np

from .errors import ConsistencyError, ParseError, ResourceLimitError, ValidationError

QUBIT_CAP = 16          # state vectors
DENSE_QUBIT_CAP = 12    # dense matrices

ATOL = 1e-12

__all__ = [
    "QUBIT_CAP", "DENSE_QUBIT_CAP", "PureState", "DensityMatrix", "Operator",
    "RegisterLayout", "tensor_product", "partial_trace", "expectation",
    "operator_norm", "embed_operator", "permute_to_sorted", "named_stream",
    "fmt_float", "read_state", "write_state", "read_matrix", "write_matrix",
    "state_digest",
]


def _check_qubit_count(num_qubits: int, cap: int, what: str):
    if num_qubits < 0:
        raise ValidationError(f"{what}: negative qubit count {num_qubits}")
    if num_qubits > cap:
        raise ResourceLimitError(
            f"{what} on {num_qubits} qubits exceeds the cap of {cap}"
        )


def _as_complex(a) -> np.ndarray:
    arr = np.asarray(a, dtype=complex)
    out = np.array(arr, dtype=complex, order="C")
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class PureState:
    """Normalized state vector on num_qubits qubits."""

    num_qubits: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        _check_qubit_count(self.num_qubits, QUBIT_CAP, "PureState")
        amps = _as_complex(self.amplitudes)
        object.__setattr__(self, "amplitudes", amps)
        if amps.shape != (2 ** self.num_qubits,):
            raise ValidationError(
                f"PureState: expected {2 ** self.num_qubits} amplitudes, "
                f"got shape {amps.shape}"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > 1e-12:
            raise ValidationError(f"PureState: norm {norm!r} is not 1 within 1e-12")

    def density(self) -> "DensityMatrix":
        v = self.amplitudes
        return DensityMatrix(self.num_qubits, np.outer(v, v.conj()))

    @staticmethod
    def computational(num_qubits: int, index: int) -> "PureState":
        _check_qubit_count(num_qubits, QUBIT_CAP, "PureState")
        if not 0 <= index < 2 ** num_qubits:
            raise ValidationError(f"basis index {index} out of range")
        v = np.zeros(2 ** num_qubits, dtype=complex)
        v[index] = 1.0
        return PureState(num_qubits, v)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, PSD (within 1e-10) matrix on num_qubits qubits."""

    num_qubits: int
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        _check_qubit_count(self.num_qubits, DENSE_QUBIT_CAP, "DensityMatrix")
        m = _as_complex(self.entries)
        object.__setattr__(self, "entries", m)
        dim = 2 ** self.num_qubits
        if m.shape != (dim, dim):
            raise ValidationError(f"DensityMatrix: expected shape {(dim, dim)}, got {m.shape}")
        if np.abs(m - m.conj().T).max() > ATOL:
            raise ValidationError("DensityMatrix: not Hermitian within 1e-12")
        tr = np.trace(m)
        if abs(tr - 1.0) > 1e-12:
            raise ValidationError(f"DensityMatrix: trace {tr!r} is not 1 within 1e-12")
        evals = np.linalg.eigvalsh(m)
        if evals.min() < -1e-10:
            raise ValidationError(
                f"DensityMatrix: negative eigenvalue {evals.min():.3e} below -1e-10"
            )


@dataclass(frozen=True)
class Operator:
    """Square matrix on num_qubits qubits, tagged hermitian/unitary/general."""

    num_qubits: int
    entries: np.ndarray = field(repr=False)
    kind: str = "general"

    def __post_init__(self):
        _check_qubit_count(self.num_qubits, DENSE_QUBIT_CAP, "Operator")
        m = _as_complex(self.entries)
        object.__setattr__(self, "entries", m)
        dim = 2 ** self.num_qubits
        if m.shape != (dim, dim):
            raise ValidationError(f"Operator: expected shape {(dim, dim)}, got {m.shape}")
        if self.kind not in ("hermitian", "unitary", "general"):
            raise ValidationError(f"Operator: unknown kind {self.kind!r}")
        if self.kind == "hermitian" and np.abs(m - m.conj().T).max() > ATOL:
            raise ValidationError("Operator: not Hermitian within 1e-12")
        if self.kind == "unitary":
            err = np.abs(m.conj().T @ m - np.eye(dim)).max()
            if err > 1e-12:
                raise ValidationError(f"Operator: unitarity defect {err:.3e} above 1e-12")

    def dagger(self) -> "Operator":
        return Operator(self.num_qubits, self.entries.conj().T, self.kind)


@dataclass(frozen=True)
class RegisterLayout:
    """Input, ancilla and clock block sizes; qubits are laid out in that order."""

    n_input: int
    n_ancilla: int
    n_clock: int = 0

    def __post_init__(self):
        if min(self.n_input, self.n_ancilla, self.n_clock) < 0:
            raise ValidationError("RegisterLayout: negative register size")

    @property
    def total(self) -> int:
        return self.n_input + self.n_ancilla + self.n_clock

    @property
    def input_qubits(self) -> range:
        return range(self.n_input)

    @property
    def ancilla_qubits(self) -> range:
        return range(self.n_input, self.n_input + self.n_ancilla)

    @property
    def clock_qubits(self) -> range:
        return range(self.n_input + self.n_ancilla, self.total)

    def clock_qubit(self, t: int) -> int:
        # clock step t in 1..n_clock sits at block offset t-1
        if not 1 <= t <= self.n_clock:
            raise ValidationError(f"clock step {t} outside 1..{self.n_clock}")
        return self.n_input + self.n_ancilla + t - 1


def tensor_product(a, b):
    """Kronecker product of two states / density matrices / operators.

    Operands must be the same type; operator kinds combine to hermitian or
    unitary only when both factors share that kind.
    """
    if isinstance(a, PureState) and isinstance(b, PureState):
        n = a.num_qubits + b.num_qubits
        _check_qubit_count(n, QUBIT_CAP, "tensor_product")
        return PureState(n, np.kron(a.amplitudes, b.amplitudes))
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        n = a.num_qubits + b.num_qubits
        _check_qubit_count(n, DENSE_QUBIT_CAP, "tensor_product")
        return DensityMatrix(n, np.kron(a.entries, b.entries))
    if isinstance(a, Operator) and isinstance(b, Operator):
        n = a.num_qubits + b.num_qubits
        _check_qubit_count(n, DENSE_QUBIT_CAP, "tensor_product")
        kind = a.kind if a.kind == b.kind else "general"
        return Operator(n, np.kron(a.entries, b.entries), kind)
    raise ValidationError(
        f"tensor_product: mismatched operand types "
        f"{type(a).__name__}/{type(b).__name__}"
    )


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Trace out every qubit not listed in keep; kept qubits stay in order."""
    keep = sorted(set(int(q) for q in keep))
    n = rho.num_qubits
    if keep and (keep[0] < 0 or keep[-1] >= n):
        raise ValidationError(f"partial_trace: keep indices {keep} outside 0..{n - 1}")
    drop = [q for q in range(n) if q not in keep]
    t = rho.entries.reshape((2,) * (2 * n))
    for q in reversed(drop):
        t = np.trace(t, axis1=q, axis2=q + t.ndim // 2)
    dim = 2 ** len(keep)
    return DensityMatrix(len(keep), t.reshape(dim, dim))


def expectation(rho: DensityMatrix, op: Operator) -> float:
    """tr(rho A) for Hermitian A; errors if the imaginary residue exceeds 1e-8."""
    if rho.num_qubits != op.num_qubits:
        raise ValidationError("expectation: qubit count mismatch")
    val = np.sum(rho.entries * op.entries.T)
    if abs(val.imag) > 1e-8:
        raise ConsistencyError(f"expectation: imaginary residue {val.imag:.3e} above 1e-8")
    return float(val.real)


def operator_norm(op: Operator) -> float:
    """Largest singular value."""
    return float(np.linalg.svd(op.entries, compute_uv=False)[0])


def _embed_matrix(matrix: np.ndarray, qubits, n: int) -> np.ndarray:
    """Place a k-qubit matrix on the listed qubits of an n-qubit register.

    qubits[i] is the global position of the matrix's i-th tensor factor;
    the rest is identity. Dense, so n is capped by the caller.
    """
    qubits = [int(q) for q in qubits]
    k = len(qubits)
    if len(set(qubits)) != k:
        raise ValidationError(f"embed: duplicate qubits {qubits}")
    if qubits and (min(qubits) < 0 or max(qubits) >= n):
        raise ValidationError(f"embed: qubits {qubits} outside 0..{n - 1}")
    if matrix.shape != (2 ** k, 2 ** k):
        raise ValidationError(f"embed: matrix shape {matrix.shape} does not match {k} qubits")
    rest = [q for q in range(n) if q not in qubits]
    full = np.kron(matrix, np.eye(2 ** (n - k), dtype=complex))
    order = qubits + rest                     # order[axis] = global qubit of that axis
    perm = np.argsort(order)                  # output axis g comes from axis perm[g]
    t = full.reshape((2,) * (2 * n))
    t = t.transpose(tuple(perm) + tuple(p + n for p in perm))
    return np.ascontiguousarray(t.reshape(2 ** n, 2 ** n))


def embed_operator(op: Operator, qubits, n: int) -> Operator:
    _check_qubit_count(n, DENSE_QUBIT_CAP, "embed_operator")
    kind = op.kind if op.kind in ("hermitian", "unitary") else "general"
    return Operator(n, _embed_matrix(op.entries, qubits, n), kind)


def permute_to_sorted(matrix: np.ndarray, qubits):
    """Rewrite a k-qubit matrix given on `qubits` order onto sorted(qubits).

    Returns (sorted_qubits, permuted_matrix).
    """
    qubits = [int(q) for q in qubits]
    k = len(qubits)
    order = sorted(range(k), key=lambda i: qubits[i])
    if order == list(range(k)):
        return qubits, matrix
    perm = np.argsort(order)  # position of factor i in the sorted matrix
    t = matrix.reshape((2,) * (2 * k))
    axes = tuple(order) + tuple(o + k for o in order)
    t = t.transpose(axes)
    return sorted(qubits), np.ascontiguousarray(t.reshape(2 ** k, 2 ** k))


def named_stream(seed: int, name: str) -> np.random.Generator:
    """Deterministic per-stage RNG: one root seed, one named substream per use.

    Philox keeps the draws counter-based so shots can be replayed or split.
    """
    key = zlib.crc32(name.encode("utf-8"))
    ss = np.random.SeedSequence(entropy=int(seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=(key,))
    return np.random.Generator(np.random.Philox(ss))


def state_digest(array) -> str:
    """Short stable checksum of a complex array or state (used in reports)."""
    array = getattr(array, "amplitudes", getattr(array, "entries", array))
    data = np.ascontiguousarray(np.asarray(array, dtype=complex))
    return hashlib.sha256(data.tobytes()).hexdigest()[:16]


# --- text format -----------------------------------------------------------
#
# First line `qubits N`, then one entry per line as `re im`, row-major.
# 2**N lines = state vector, 4**N lines = matrix.

def fmt_float(x: float) -> str:
    # 17 significant digits round-trips any float64
    return format(float(x), ".17g")


def _entry_lines(flat: np.ndarray):
    return [f"{fmt_float(z.real)} {fmt_float(z.imag)}" for z in flat]


def write_state(state: PureState) -> str:
    lines = [f"qubits {state.num_qubits}"] + _entry_lines(state.amplitudes)
    return "\n".join(lines) + "\n"


def write_matrix(num_qubits: int, entries: np.ndarray) -> str:
    lines = [f"qubits {num_qubits}"] + _entry_lines(entries.reshape(-1))
    return "\n".join(lines) + "\n"


def _parse_entry_lines(lines, start_line: int, count: int) -> np.ndarray:
    vals = np.empty(count, dtype=complex)
    if len(lines) < count:
        raise ParseError(f"expected {count} entry lines, found {len(lines)}",
                         line=start_line + len(lines))
    for i, (lineno, text) in enumerate(lines[:count]):
        parts = text.split()
        if len(parts) != 2:
            raise ParseError(f"expected `re im`, got {text!r}", line=lineno)
        try:
            vals[i] = complex(float(parts[0]), float(parts[1]))
        except ValueError:
            raise ParseError(f"bad number in {text!r}", line=lineno) from None
    return vals


def _content_lines(text: str):
    out = []
    for i, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if stripped:
            out.append((i, stripped))
    return out


def _parse_header(lines):
    if not lines:
        raise ParseError("empty input", line=1)
    lineno, head = lines[0]
    parts = head.split()
    if len(parts) != 2 or parts[0] != "qubits":
        raise ParseError(f"expected `qubits N`, got {head!r}", line=lineno)
    try:
        n = int(parts[1])
    except ValueError:
        raise ParseError(f"bad qubit count {parts[1]!r}", line=lineno) from None
    return n


def read_state(text: str) -> PureState:
    lines = _content_lines(text)
    n = _parse_header(lines)
    vals = _parse_entry_lines(lines[1:], lines[0][0], 2 ** n)
    if len(lines) - 1 != 2 ** n:
        raise ParseError(f"expected {2 ** n} amplitudes, found {len(lines) - 1}",
                         line=lines[-1][0])
    return PureState(n, vals)


def read_matrix(text: str):
    """Returns (num_qubits, entries) without imposing density/operator checks."""
    lines = _content_lines(text)
    n = _parse_header(lines)
    dim = 2 ** n
    if len(lines) - 1 != dim * dim:
        raise ParseError(f"expected {dim * dim} matrix entries, found {len(lines) - 1}",
                         line=lines[-1][0] if len(lines) > 1 else lines[0][0])
    vals = _parse_entry_lines(lines[1:], lines[0][0], dim * dim)
    return n, vals.reshape(dim, dim)
