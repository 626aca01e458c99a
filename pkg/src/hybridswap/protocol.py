"""Hybrid-state entanglement swapping: closed forms and the Fock-space simulation."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .channels import DetectorModel, DetectorOutcome, beam_splitter, detector_effect, loss_channel
from .hilbert import (
    DensityOperator,
    Fock,
    ModeLayout,
    Qubit,
    StateVector,
    apply_povm,
    choose_cutoff,
    coherent_state,
    tensor,
)

SQRT1_2 = 1.0 / math.sqrt(2.0)

# two-qubit Bell vectors in the |HH>, |HV>, |VH>, |VV> basis
PSI_MINUS = np.array([0, 1, -1, 0], dtype=complex) * SQRT1_2
PSI_PLUS = np.array([0, 1, 1, 0], dtype=complex) * SQRT1_2
PHI_MINUS = np.array([1, 0, 0, -1], dtype=complex) * SQRT1_2
PHI_PLUS = np.array([1, 0, 0, 1], dtype=complex) * SQRT1_2

TWO_QUBITS = ModeLayout.of(Qubit(), Qubit())

# mode indices of the four-mode circuit
A1, A2, B1, B2 = 0, 1, 2, 3


@dataclass(frozen=True)
class ProtocolParams:
    alpha: float
    T: float = 1.0
    eta0: float = 1.0

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError(f"alpha must be real and >= 0, got {self.alpha}")
        if not 0.0 <= self.T <= 1.0:
            raise ValueError(f"T must lie in [0, 1], got {self.T}")
        if not 0.0 <= self.eta0 <= 1.0:
            raise ValueError(f"eta0 must lie in [0, 1], got {self.eta0}")


class HeraldPattern(str, enum.Enum):
    """Which of Charlie's two detectors registers the single photon.

    ``RIGHT_CLICKS`` applies the no-click effect on a2 and the click effect
    on b2 and yields the singlet-type state directly. ``LEFT_CLICKS`` is the
    mirror image; its state equals the singlet-type one after a sigma_x on b1.
    """

    RIGHT_CLICKS = "right_clicks"
    LEFT_CLICKS = "left_clicks"


@dataclass(frozen=True)
class SwapOutcome:
    shared_state: DensityOperator
    probability: float
    pattern: HeraldPattern


def coherence_decay(params: ProtocolParams) -> float:
    """exp(-4 (1 - T eta0) alpha^2), the surviving |HV><VH| coherence (= 1 - 2R)."""
    return math.exp(-4.0 * (1.0 - params.T * params.eta0) * params.alpha**2)


def loss_factor(params: ProtocolParams) -> float:
    """Mixing weight R of |Psi+> in the heralded state, in [0, 1/2]."""
    return 0.5 * (1.0 - coherence_decay(params))


def analytic_shared_state(R: float) -> DensityOperator:
    """(1 - R)|Psi-><Psi-| + R|Psi+><Psi+|."""
    if not 0.0 <= R <= 0.5:
        raise ValueError(f"loss factor must lie in [0, 1/2], got {R}")
    m = (1.0 - R) * np.outer(PSI_MINUS, PSI_MINUS.conj()) + R * np.outer(PSI_PLUS, PSI_PLUS.conj())
    return DensityOperator(TWO_QUBITS, m)


def analytic_probability(params: ProtocolParams) -> float:
    x = params.T * params.eta0 * params.alpha**2
    return x * math.exp(-2.0 * x)


def default_cutoff(params: ProtocolParams) -> int:
    """Cutoff for the largest amplitude in the circuit: alpha at preparation, sqrt(2T) alpha after interference."""
    peak = max(params.alpha, math.sqrt(2.0 * params.T) * params.alpha)
    return choose_cutoff(peak)


def hybrid_state(alpha: float, cutoff: int | None = None) -> StateVector:
    """(|H, alpha> + |V, -alpha>) / sqrt(2) on layout [Qubit, Fock]."""
    if cutoff is None:
        cutoff = choose_cutoff(alpha)
    plus = coherent_state(alpha, cutoff).amplitudes
    minus = coherent_state(-alpha, cutoff).amplitudes
    amps = np.concatenate([plus, minus]) * SQRT1_2
    return StateVector(ModeLayout.of(Qubit(), Fock(cutoff)), amps)


def run_protocol_oracle(
    params: ProtocolParams,
    cutoff: int | None = None,
    pattern: HeraldPattern | str = HeraldPattern.RIGHT_CLICKS,
) -> SwapOutcome:
    """Simulate the swap on four modes (a1, a2, b1, b2) with dense density operators.

    Both hybrid states lose photons on their coherent arm, the arms meet on a
    50:50 beam splitter, and Charlie's detector effects project a2 and b2.

    Raises:
        TruncationError: if ``cutoff`` is too small for alpha.
        NullEventError: if the herald has zero probability (alpha = 0).
    """
    pattern = HeraldPattern(pattern)
    if cutoff is None:
        cutoff = default_cutoff(params)
    arm = hybrid_state(params.alpha, cutoff).density()
    arm = loss_channel(arm, 1, params.T)
    rho = tensor(arm, arm)
    rho = beam_splitter(rho, (A2, B2), 0.5)

    det = DetectorModel(params.eta0, cutoff)
    click = detector_effect(det, DetectorOutcome.CLICK_ONE)
    quiet = detector_effect(det, DetectorOutcome.NOT_ONE)
    if pattern is HeraldPattern.RIGHT_CLICKS:
        effect = np.kron(quiet, click)
    else:
        effect = np.kron(click, quiet)
    prob, shared = apply_povm(rho, effect, (A2, B2))
    return SwapOutcome(shared_state=shared, probability=prob, pattern=pattern)
