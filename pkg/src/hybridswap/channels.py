"""Fiber, beam-splitter, loss and detector primitives."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import expm

from .hilbert import (
    HEADROOM,
    DensityOperator,
    Fock,
    LayoutError,
    ModeLayout,
    apply_unitary,
    partial_trace,
    tensor,
)


class DistanceConvention(str, enum.Enum):
    """How the lab separation maps to the distance each arm travels."""

    TOTAL_SEPARATION = "total"
    PER_ARM_HALF = "per-arm"


@dataclass(frozen=True)
class FiberModel:
    loss_db_per_km: float = 0.2
    distance_convention: DistanceConvention = DistanceConvention.TOTAL_SEPARATION

    def __post_init__(self):
        if self.loss_db_per_km < 0:
            raise ValueError(f"loss_db_per_km must be >= 0, got {self.loss_db_per_km}")
        object.__setattr__(self, "distance_convention", DistanceConvention(self.distance_convention))

    def effective_km(self, lab_separation_km: float) -> float:
        if self.distance_convention is DistanceConvention.PER_ARM_HALF:
            return lab_separation_km / 2.0
        return lab_separation_km


def transmittance(fiber: FiberModel, lab_separation_km: float) -> float:
    """Power transmission 10^(-l L / 10) for the configured distance convention."""
    if lab_separation_km < 0:
        raise ValueError(f"lab separation must be >= 0 km, got {lab_separation_km}")
    return 10.0 ** (-fiber.loss_db_per_km * fiber.effective_km(lab_separation_km) / 10.0)


def lab_separation_for(fiber: FiberModel, T: float) -> float:
    """Inverse of :func:`transmittance`."""
    if not 0 < T <= 1:
        raise ValueError(f"transmittance must lie in (0, 1], got {T}")
    if fiber.loss_db_per_km == 0:
        return 0.0 if T == 1 else float("inf")
    km = -10.0 * np.log10(T) / fiber.loss_db_per_km
    if fiber.distance_convention is DistanceConvention.PER_ARM_HALF:
        km *= 2.0
    return float(km)


# -- beam splitter -----------------------------------------------------------


def annihilation(cutoff: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, cutoff + 1, dtype=float)), k=1)


@lru_cache(maxsize=64)
def beam_splitter_unitary(cutoff: int, tau: float, headroom: int = HEADROOM) -> np.ndarray:
    """Two-mode beam splitter exp[theta (a^dag b - a b^dag)], cos(theta) = sqrt(tau).

    Built on a space with ``headroom`` extra levels per mode, then projected
    back to ``cutoff``. Mode amplitudes map as
    (a, b) -> (sqrt(tau) a + sqrt(1-tau) b, -sqrt(1-tau) a + sqrt(tau) b),
    so |x, x> at tau = 1/2 leaves entirely through the first port.
    The returned array is read-only and shared between callers.
    """
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"beam splitter transmittance must lie in [0, 1], got {tau}")
    big = cutoff + headroom
    a = annihilation(big)
    eye = np.eye(big + 1)
    A = np.kron(a, eye)
    B = np.kron(eye, a)
    theta = np.arccos(np.sqrt(tau))
    # a is real, so a.T is a^dag
    gen = theta * (A.T @ B - A @ B.T)
    U = expm(gen)
    keep = np.ravel_multi_index(np.indices((cutoff + 1, cutoff + 1)).reshape(2, -1), (big + 1, big + 1))
    out = np.ascontiguousarray(U[np.ix_(keep, keep)]).astype(complex)
    out.setflags(write=False)
    return out


def _fock_cutoff(layout: ModeLayout, mode: int) -> int:
    kind = layout[mode]
    if not isinstance(kind, Fock):
        raise LayoutError(f"mode {mode} is {kind!r}, expected a Fock mode")
    return kind.cutoff


def beam_splitter(rho: DensityOperator, modes: tuple[int, int], tau: float) -> DensityOperator:
    i, j = modes
    rho.layout.check_indices([i, j])
    ci, cj = _fock_cutoff(rho.layout, i), _fock_cutoff(rho.layout, j)
    if ci != cj:
        raise LayoutError(f"beam splitter needs equal cutoffs, got {ci} and {cj}")
    return apply_unitary(rho, beam_splitter_unitary(ci, float(tau)), [i, j])


def loss_channel(rho: DensityOperator, mode: int, T: float) -> DensityOperator:
    """Pure-loss channel: mix ``mode`` with a vacuum ancilla at transmittance T, trace the ancilla."""
    cutoff = _fock_cutoff(rho.layout, mode)
    if not 0.0 <= T <= 1.0:
        raise ValueError(f"transmittance must lie in [0, 1], got {T}")
    vac = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
    vac[0, 0] = 1.0
    ancilla = DensityOperator(ModeLayout.of(Fock(cutoff)), vac)
    joined = tensor(rho, ancilla)
    anc = len(rho.layout)
    mixed = beam_splitter(joined, (mode, anc), T)
    return partial_trace(mixed, range(anc))


# -- detectors ---------------------------------------------------------------


class DetectorOutcome(str, enum.Enum):
    CLICK_ONE = "click_one"
    NOT_ONE = "not_one"


@dataclass(frozen=True)
class DetectorModel:
    eta0: float
    cutoff: int

    def __post_init__(self):
        if not 0.0 <= self.eta0 <= 1.0:
            raise ValueError(f"detector efficiency must lie in [0, 1], got {self.eta0}")
        if self.cutoff < 1:
            raise ValueError("detector POVM needs a cutoff of at least 1")


@lru_cache(maxsize=64)
def _single_photon_diagonal(eta0: float, cutoff: int) -> np.ndarray:
    n = np.arange(cutoff + 1, dtype=float)
    d = np.zeros(cutoff + 1)
    # eta0 * n (1 - eta0)^(n-1) for n >= 1; 0.0 ** 0 == 1 keeps eta0 = 1 exact
    d[1:] = eta0 * n[1:] * (1.0 - eta0) ** (n[1:] - 1)
    d.setflags(write=False)
    return d


def detector_effect(det: DetectorModel, which: DetectorOutcome | str) -> np.ndarray:
    """Diagonal effect for detecting exactly one photon with an inefficient detector, or its complement."""
    which = DetectorOutcome(which)
    click = np.diag(_single_photon_diagonal(float(det.eta0), int(det.cutoff))).astype(complex)
    if which is DetectorOutcome.CLICK_ONE:
        return click
    return np.eye(det.cutoff + 1, dtype=complex) - click
