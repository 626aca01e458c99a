"""Teleporting a polarization qubit through the heralded pair."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .bell import PAULI_X, PAULI_Z
from .hilbert import DensityOperator, ModeLayout, Qubit, StateVector, apply_povm, apply_unitary, tensor
from .protocol import (
    PHI_MINUS,
    PHI_PLUS,
    PSI_MINUS,
    PSI_PLUS,
    ProtocolParams,
    analytic_shared_state,
    loss_factor,
    run_protocol_oracle,
)

CLASSICAL_FIDELITY = 2.0 / 3.0

ONE_QUBIT = ModeLayout.of(Qubit())


@dataclass(frozen=True)
class InputQubit:
    """sqrt(p)|H> + sqrt(1 - p) e^{i phase}|V>."""

    p: float
    phase: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")

    def vector(self) -> StateVector:
        amps = np.array([math.sqrt(self.p), math.sqrt(1.0 - self.p) * np.exp(1j * self.phase)])
        return StateVector(ONE_QUBIT, amps)


class BellOutcome(enum.Enum):
    PSI_PLUS = "psi+"
    PSI_MINUS = "psi-"
    PHI_PLUS = "phi+"
    PHI_MINUS = "phi-"

    @property
    def vector(self) -> np.ndarray:
        return _BELL_VECTORS[self]

    @property
    def correction(self) -> np.ndarray:
        return _CORRECTIONS[self]


_BELL_VECTORS = {
    BellOutcome.PSI_PLUS: PSI_PLUS,
    BellOutcome.PSI_MINUS: PSI_MINUS,
    BellOutcome.PHI_PLUS: PHI_PLUS,
    BellOutcome.PHI_MINUS: PHI_MINUS,
}

_CORRECTIONS = {
    BellOutcome.PSI_PLUS: PAULI_Z,
    BellOutcome.PSI_MINUS: np.eye(2, dtype=complex),
    BellOutcome.PHI_PLUS: PAULI_Z @ PAULI_X,
    BellOutcome.PHI_MINUS: PAULI_X,
}


def bell_projectors(eta0: float) -> dict[BellOutcome, np.ndarray]:
    """eta0^2-damped Bell-state effects on (input, a1)."""
    if not 0.0 <= eta0 <= 1.0:
        raise ValueError(f"eta0 must lie in [0, 1], got {eta0}")
    return {o: eta0**2 * np.outer(o.vector, o.vector.conj()) for o in BellOutcome}


def teleport_outcome_oracle(
    params: ProtocolParams,
    qubit: InputQubit,
    outcome: BellOutcome,
    cutoff: int | None = None,
    shared: DensityOperator | None = None,
) -> tuple[float, DensityOperator]:
    """Probability of ``outcome`` and Bob's corrected qubit, from a three-qubit simulation.

    The resource is ``shared`` if given, otherwise the Fock-space swap
    simulation at ``params``. Modes are ordered (input, a1, b1).
    """
    if shared is None:
        shared = run_protocol_oracle(params, cutoff).shared_state
    total = tensor(qubit.vector().density(), shared)
    effect = bell_projectors(params.eta0)[outcome]
    prob, bob = apply_povm(total, effect, (0, 1))
    return prob, apply_unitary(bob, outcome.correction, [0])


def fidelity_per_outcome(R: float, qubit: InputQubit) -> float:
    """(1 - R) + R (2p - 1)^2, the corrected-state fidelity for any Bell outcome."""
    if not 0.0 <= R <= 0.5:
        raise ValueError(f"loss factor must lie in [0, 1/2], got {R}")
    return (1.0 - R) + R * (2.0 * qubit.p - 1.0) ** 2


def measured_fidelity(
    params: ProtocolParams, qubit: InputQubit, shared: DensityOperator | None = None
) -> float:
    """Sum over outcomes of P_lambda * F_lambda, evaluated by simulation."""
    if shared is None:
        shared = analytic_shared_state(loss_factor(params))
    psi = qubit.vector()
    total = 0.0
    for outcome in BellOutcome:
        prob, bob = teleport_outcome_oracle(params, qubit, outcome, shared=shared)
        total += prob * float(np.vdot(psi.amplitudes, bob.matrix @ psi.amplitudes).real)
    return total


def average_fidelity(params: ProtocolParams) -> float:
    """eta0^2 (1 - 2R/3), averaged uniformly over p in [0, 1] and the input phase."""
    # (3 - 2R) / 3 rather than 1 - 2R/3: the latter rounds one ulp above 2/3 at R = 1/2
    return params.eta0**2 * (3.0 - 2.0 * loss_factor(params)) / 3.0


def average_fidelity_numeric(
    params: ProtocolParams,
    p_nodes: int = 16,
    phase_nodes: int = 8,
    shared: DensityOperator | None = None,
) -> float:
    """Quadrature of the simulated measured fidelity over input states.

    Gauss-Legendre in p on [0, 1] and an equispaced rule in the phase, which
    is exact for the trigonometric polynomials that appear here.
    """
    if p_nodes < 16:
        raise ValueError("use at least 16 quadrature nodes in p")
    if shared is None:
        shared = analytic_shared_state(loss_factor(params))
    x, w = np.polynomial.legendre.leggauss(p_nodes)
    ps = 0.5 * (x + 1.0)
    ws = 0.5 * w
    phases = np.arange(phase_nodes) * (2.0 * math.pi / phase_nodes)
    acc = 0.0
    for p, wp in zip(ps, ws):
        row = sum(measured_fidelity(params, InputQubit(float(p), float(ph)), shared) for ph in phases)
        acc += wp * row / phase_nodes
    return float(acc)


def beats_classical(fidelity: float) -> bool:
    return fidelity > CLASSICAL_FIDELITY
