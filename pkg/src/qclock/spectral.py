"""Assembly and diagonalization of local Hamiltonians.

Three independent routes from a term list to numbers: dense assembly
(kron + axis permutation), sparse assembly (bit-scatter of term entries),
and a matrix-free matvec used by the iterative eigensolver. Dense handles
up to 12 qubits, sparse up to 16.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .errors import ConvergenceError, ResourceLimitError, ValidationError
from .qcore import (
    DENSE_QUBIT_CAP, QUBIT_CAP, Operator, PureState, fmt_float, named_stream,
)
from .clockham import LocalHamiltonian

__all__ = [
    "PromiseGap", "SpectralReport", "assemble", "assemble_sparse", "matvec",
    "min_eigenvalue", "propagation_spectrum", "check_promise",
    "serialize_report",
]


@dataclass(frozen=True)
class PromiseGap:
    """Spectral promise: witness side lambda <= a, no-witness side >= b."""

    a: float
    b: float
    d: float | None = None  # optional decision energy between the two

    def __post_init__(self):
        if not self.a < self.b:
            raise ValidationError(f"promise needs a < b, got a={self.a}, b={self.b}")
        if self.d is not None and not self.a < self.d < self.b:
            raise ValidationError(f"decision energy d={self.d} outside ({self.a}, {self.b})")


class SpectralReport(NamedTuple):
    min_eigenvalue: float
    spectrum: tuple          # k lowest eigenvalues, ascending
    ground_state: PureState
    method: str              # dense | iterative
    residual: float
    seed: int


def assemble(h: LocalHamiltonian) -> Operator:
    """Dense Hermitian matrix of the weighted term sum."""
    n = h.num_qubits
    if n > DENSE_QUBIT_CAP:
        raise ResourceLimitError(
            f"dense assembly of {n} qubits exceeds the cap of {DENSE_QUBIT_CAP}"
        )
    from .qcore import _embed_matrix
    total = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for term in h.terms:
        total += term.weight * _embed_matrix(term.matrix, list(term.support), n)
    return Operator(n, total, "hermitian")


def _scatter_table(positions, n: int) -> np.ndarray:
    """Map every k-bit value onto its n-bit index with bits at `positions`."""
    k = len(positions)
    idx = np.arange(2 ** k, dtype=np.int64)
    out = np.zeros(2 ** k, dtype=np.int64)
    for j, q in enumerate(positions):
        out |= ((idx >> (k - 1 - j)) & 1) << (n - 1 - q)
    return out


def assemble_sparse(h: LocalHamiltonian) -> scipy.sparse.csr_matrix:
    """Sparse (CSR) assembly via bit scatter; independent of the dense path."""
    n = h.num_qubits
    if n > QUBIT_CAP:
        raise ResourceLimitError(
            f"sparse assembly of {n} qubits exceeds the cap of {QUBIT_CAP}"
        )
    dim = 2 ** n
    rows, cols, vals = [], [], []
    for term in h.terms:
        support = list(term.support)
        rest = [q for q in range(n) if q not in support]
        scat_sup = _scatter_table(support, n)
        scat_rest = _scatter_table(rest, n)
        r, c = np.nonzero(term.matrix)
        v = term.weight * term.matrix[r, c]
        big_r = (scat_sup[r][:, None] | scat_rest[None, :]).reshape(-1)
        big_c = (scat_sup[c][:, None] | scat_rest[None, :]).reshape(-1)
        rows.append(big_r)
        cols.append(big_c)
        vals.append(np.repeat(v, scat_rest.size))
    if not rows:
        return scipy.sparse.csr_matrix((dim, dim), dtype=complex)
    mat = scipy.sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dim, dim),
    )
    return mat.tocsr()


def _apply_term(term, vec: np.ndarray, n: int) -> np.ndarray:
    k = len(term.support)
    rest = [q for q in range(n) if q not in term.support]
    perm = list(term.support) + rest
    t = vec.reshape((2,) * n).transpose(perm).reshape(2 ** k, -1)
    t = term.matrix @ t
    t = t.reshape((2,) * n).transpose(np.argsort(perm))
    return t.reshape(-1)


def matvec(h: LocalHamiltonian, vec: np.ndarray) -> np.ndarray:
    """H @ vec straight off the term list; no matrix is materialized."""
    n = h.num_qubits
    vec = np.asarray(vec, dtype=complex).reshape(-1)
    if vec.size != 2 ** n:
        raise ValidationError(f"vector length {vec.size} does not match {n} qubits")
    out = np.zeros_like(vec)
    for term in h.terms:
        out += term.weight * _apply_term(term, vec, n)
    return out


def _dense_lowest(h: LocalHamiltonian, k: int):
    mat = assemble(h).entries
    dim = mat.shape[0]
    k = min(k, dim)
    evals, evecs = scipy.linalg.eigh(mat, subset_by_index=(0, k - 1))
    return evals, evecs


def min_eigenvalue(h: LocalHamiltonian, k: int = 6, method: str = "auto",
                   seed: int = 0, maxiter: int | None = None,
                   residual_target: float = 1e-8) -> SpectralReport:
    """Lowest k eigenvalues and the ground eigenvector.

    method: dense (exact, <= 12 qubits), iterative (matrix-free Lanczos,
    <= 16 qubits, deterministic seeded start vector), or auto. The returned
    ground pair is residual-checked against `residual_target` relative to
    the operator scale max(1, total_weight): backward error grows with
    ||H||, and clock penalties push ||H|| to L^12.
    """
    n = h.num_qubits
    dim = 2 ** n
    if k < 1:
        raise ValidationError(f"requested k={k} eigenvalues")
    if method == "auto":
        method = "dense" if n <= DENSE_QUBIT_CAP else "iterative"
    if method == "dense":
        evals, evecs = _dense_lowest(h, k)
    elif method == "iterative":
        if n > QUBIT_CAP:
            raise ResourceLimitError(f"{n} qubits exceeds the sparse cap of {QUBIT_CAP}")
        kk = min(k, dim - 2)
        if kk < 1 or dim < 8:
            # ARPACK needs k < dim-1 and room for the Krylov basis
            evals, evecs = _dense_lowest(h, k)
            method = "dense"
        else:
            # Lanczos on sigma*I - H with which="LA": the ground state of H
            # becomes the dominant end of a PSD operator, which restarted
            # Lanczos tracks far more reliably than "SA" does on spectra
            # with heavy interior clustering. sigma = total weight is a
            # certified bound on ||H|| (every term has norm <= 1).
            sigma = h.total_weight
            op = scipy.sparse.linalg.LinearOperator(
                (dim, dim), matvec=lambda v: sigma * v - matvec(h, v),
                dtype=complex,
            )
            v0 = named_stream(seed, "eigsh-start").standard_normal(dim)
            try:
                evals, evecs = scipy.sparse.linalg.eigsh(
                    op, k=kk, which="LA", v0=v0,
                    maxiter=maxiter if maxiter is not None else 100 * dim,
                    tol=0,
                )
            except scipy.sparse.linalg.ArpackNoConvergence as exc:
                best = None
                if len(exc.eigenvalues):
                    vec = exc.eigenvectors[:, 0]
                    lam = sigma - exc.eigenvalues[0]
                    best = float(np.linalg.norm(matvec(h, vec) - lam * vec))
                raise ConvergenceError("Lanczos did not converge", best_residual=best)
            evals = sigma - evals
            order = np.argsort(evals)
            evals, evecs = evals[order], evecs[:, order]
    else:
        raise ValidationError(f"unknown method {method!r}")

    ground = np.asarray(evecs[:, 0], dtype=complex)
    ground = ground / np.linalg.norm(ground)
    residual = float(np.linalg.norm(matvec(h, ground) - evals[0] * ground))
    scale = max(1.0, h.total_weight)
    if residual > residual_target * scale:
        raise ConvergenceError(
            f"ground pair residual {residual:.3e} above "
            f"{residual_target:.1e} * scale {scale:.3e}",
            best_residual=residual,
        )
    return SpectralReport(
        min_eigenvalue=float(evals[0]),
        spectrum=tuple(float(v) for v in evals),
        ground_state=PureState(n, ground),
        method=method,
        residual=residual,
        seed=int(seed),
    )


def propagation_spectrum(length: int) -> np.ndarray:
    """Eigenvalues 1 - cos(pi k / (L+1)), k = 0..L, of the conjugated walk."""
    if length < 1:
        raise ValidationError(f"circuit length {length} must be >= 1")
    k = np.arange(length + 1)
    return 1.0 - np.cos(np.pi * k / (length + 1))


def check_promise(h: LocalHamiltonian, gap: PromiseGap, **solver_kwargs):
    """Verdict on which side of the promise the ground energy falls.

    Returns (verdict, report) with verdict in {low, high, violated}.
    """
    report = min_eigenvalue(h, **solver_kwargs)
    lam = report.min_eigenvalue
    if lam <= gap.a:
        verdict = "low"
    elif lam >= gap.b:
        verdict = "high"
    else:
        verdict = "violated"
    return verdict, report


def serialize_report(report: SpectralReport) -> str:
    lines = [
        f"lambda_min {fmt_float(report.min_eigenvalue)}",
        "spectrum " + " ".join(fmt_float(v) for v in report.spectrum),
        f"method {report.method}",
        f"residual {fmt_float(report.residual)}",
        f"seed {report.seed}",
    ]
    return "\n".join(lines) + "\n"
