"""Gibbs states and temperature bounds (Boltzmann constant fixed to 1).

Populations follow exp(-E_j / T) / Z, accumulated after subtracting the
ground energy so nothing overflows. The mean-energy bound

    <E>_T <= a + (d-a)/2 + e^(n ln 2) e^(-(d-a)/(2T)) E_max

holds whenever the ground energy is >= a (second term counts every state
above the cutoff at its worst weight), and picking T small enough makes
the Gibbs mean land on the witness side of a promise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ValidationError
from .qcore import DensityMatrix
from .clockham import LocalHamiltonian
from .spectral import assemble

_LN2 = math.log(2.0)

__all__ = [
    "Temperature", "ThermalReport", "EnergyBound", "DecisionTemperature",
    "IsingBound", "gibbs_state", "ground_projector_state", "mean_energy_bound",
    "cooling_temperature", "decision_temperature", "ising_decision_temperature",
    "gibbs_decide",
]


@dataclass(frozen=True)
class Temperature:
    """Strictly positive temperature; the T -> 0 limit has its own path
    (ground_projector_state)."""

    value: float

    def __post_init__(self):
        if not self.value > 0.0:
            raise ValidationError(f"temperature {self.value} must be > 0")


class ThermalReport(NamedTuple):
    mean_energy: float
    partition_function: float
    populations: tuple    # ascending energy order
    e_min: float
    e_max: float
    cutoff: float | None = None
    bound_rhs: float | None = None


class EnergyBound(NamedTuple):
    rhs: float
    cutoff: float


class DecisionTemperature(NamedTuple):
    temperature: Temperature
    cutoff: float
    decision_energy: float


class IsingBound(NamedTuple):
    temperature: Temperature
    cutoff: float
    decision_energy: float


def _as_temperature(t) -> Temperature:
    return t if isinstance(t, Temperature) else Temperature(float(t))


def gibbs_state(h: LocalHamiltonian, t):
    """Gibbs state of the assembled Hamiltonian; returns (state, report)."""
    temp = _as_temperature(t)
    mat = assemble(h).entries
    evals, evecs = np.linalg.eigh(mat)
    e_min = float(evals[0])
    shifted = np.exp(-(evals - e_min) / temp.value)
    z_shifted = shifted.sum()
    pops = shifted / z_shifted
    rho = (evecs * pops) @ evecs.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    state = DensityMatrix(h.num_qubits, rho / np.trace(rho).real)
    # Z in absolute units; may overflow to inf for strongly negative spectra
    z = float(z_shifted * math.exp(-e_min / temp.value)) if abs(e_min / temp.value) < 700 \
        else float("inf") if -e_min / temp.value > 0 else 0.0
    report = ThermalReport(
        mean_energy=float(np.dot(pops, evals)),
        partition_function=z,
        populations=tuple(float(p) for p in pops),
        e_min=e_min,
        e_max=float(evals[-1]),
    )
    return state, report


def ground_projector_state(h: LocalHamiltonian, degeneracy_tol: float = 1e-10):
    """T -> 0 limit: maximally mixed state over the ground space."""
    mat = assemble(h).entries
    evals, evecs = np.linalg.eigh(mat)
    sel = evals - evals[0] <= degeneracy_tol
    vecs = evecs[:, sel]
    rho = (vecs @ vecs.conj().T) / vecs.shape[1]
    return DensityMatrix(h.num_qubits, rho)


def mean_energy_bound(a: float, d: float, n: int, e_max: float, t) -> EnergyBound:
    """Upper bound on the Gibbs mean energy when the ground energy is >= a."""
    temp = _as_temperature(t)
    if not d > a:
        raise ValidationError(f"bound needs d > a, got a={a}, d={d}")
    if n < 1:
        raise ValidationError(f"qubit count n={n} must be >= 1")
    if e_max < a:
        raise ValidationError(f"e_max {e_max} below ground floor a={a}")
    cutoff = a + 0.5 * (d - a)
    exponent = n * _LN2 - 0.5 * (d - a) / temp.value
    rhs = cutoff + math.exp(exponent) * e_max if exponent < 700 else math.inf
    return EnergyBound(float(rhs), float(cutoff))


def cooling_temperature(n: int, q: float) -> Temperature:
    """Temperature with Gibbs mean below 1/q of the promise scale: 1/(2 n q ln 2)."""
    if n < 1:
        raise ValidationError(f"qubit count n={n} must be >= 1")
    if not q > 0:
        raise ValidationError(f"polynomial value q={q} must be > 0")
    return Temperature(1.0 / (2.0 * n * q * _LN2))


def decision_temperature(epsilon: float, length: int, n: int) -> DecisionTemperature:
    """Temperature, cutoff and decision energy for promise classification.

    T = (1-2 eps) / (4 ln2 (L+1) n), cutoff (1+2 eps)/(4(L+1)),
    decision energy d = 1/(2(L+1)). n is the total qubit count of the
    compiled instance including the clock and the meta accept qubit.
    """
    if not 0.0 < epsilon < 0.5:
        raise ValidationError(f"epsilon {epsilon} outside (0, 1/2)")
    if length < 1 or n < 1:
        raise ValidationError("length and n must be >= 1")
    t = (1.0 - 2.0 * epsilon) / (4.0 * _LN2 * (length + 1) * n)
    cutoff = (1.0 + 2.0 * epsilon) / (4.0 * (length + 1))
    d = 1.0 / (2.0 * (length + 1))
    return DecisionTemperature(Temperature(t), cutoff, d)


def ising_decision_temperature(delta_e: float, n: int,
                               ground_energy: float = 0.0) -> IsingBound:
    """Classical spin-glass variant: T = 1/(ln2 dE n), cutoff a + dE/4,
    decision at a + dE/2."""
    if not delta_e > 0:
        raise ValidationError(f"energy quantum {delta_e} must be > 0")
    if n < 1:
        raise ValidationError(f"spin count n={n} must be >= 1")
    t = 1.0 / (_LN2 * delta_e * n)
    return IsingBound(Temperature(t), ground_energy + delta_e / 4.0,
                      ground_energy + delta_e / 2.0)


def gibbs_decide(h: LocalHamiltonian, t, decision_energy: float | None = None):
    """Classify by Gibbs mean energy; returns (verdict, report).

    witness-exists when mean <= decision_energy, no-witness otherwise.
    Passing a DecisionTemperature (or IsingBound) uses its temperature and,
    unless overridden, its cutoff as the decision energy.
    """
    if isinstance(t, (DecisionTemperature, IsingBound)):
        if decision_energy is None:
            decision_energy = t.cutoff
        t = t.temperature
    if decision_energy is None:
        raise ValidationError("gibbs_decide needs a decision energy")
    state, report = gibbs_state(h, t)
    verdict = "witness-exists" if report.mean_energy <= decision_energy else "no-witness"
    report = report._replace(cutoff=float(decision_energy))
    return verdict, report
