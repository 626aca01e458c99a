"""CHSH machinery for the heralded polarization pair.

Each party measures a rotated, efficiency-damped binary observable
eta0 * U(zeta, theta) sigma_z U(zeta, theta)^dag. Correlators are evaluated
both in closed form and as traces against an arbitrary two-qubit state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize
from scipy.stats import qmc

from .hilbert import DensityOperator, LayoutError, Qubit
from .protocol import ProtocolParams, coherence_decay

TWO_PI = 2.0 * math.pi

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (PAULI_X, PAULI_Y, PAULI_Z)


@dataclass(frozen=True)
class MeasurementSetting:
    zeta: float
    theta: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.zeta <= 1.0:
            raise ValueError(f"zeta must lie in [0, 1], got {self.zeta}")
        object.__setattr__(self, "theta", float(self.theta) % TWO_PI)


@dataclass(frozen=True)
class BellSettings:
    alice: tuple[MeasurementSetting, MeasurementSetting]
    bob: tuple[MeasurementSetting, MeasurementSetting]

    def swapped(self) -> "BellSettings":
        return BellSettings(alice=self.bob, bob=self.alice)


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 32
    fatol: float = 1e-9
    xatol: float = 1e-9
    maxiter: int = 20000
    seed: int = 2024

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("optimizer needs at least one restart")


class BellOptimum(NamedTuple):
    value: float
    settings: BellSettings
    converged: bool


class BellOptimal(NamedTuple):
    state: float
    measurable: float


def rotation(setting: MeasurementSetting) -> np.ndarray:
    """Polarization rotation U(zeta, theta)."""
    c = math.sqrt(setting.zeta)
    s = math.sqrt(1.0 - setting.zeta)
    ph = np.exp(1j * setting.theta)
    return np.array([[c, s * ph], [-s * np.conj(ph), c]], dtype=complex)


def prbo(setting: MeasurementSetting, eta0: float) -> np.ndarray:
    """Rotated binary operator; eigenvalues +/- eta0."""
    z = setting.zeta
    nhh = -eta0 * (1.0 - 2.0 * z)
    nvv = eta0 * (1.0 - 2.0 * z)
    nhv = 2.0 * np.exp(1j * setting.theta) * eta0 * math.sqrt(z * (1.0 - z))
    return np.array([[nhh, -nhv], [-np.conj(nhv), nvv]], dtype=complex)


def _correlator(decay: float, eta0: float, za, ta, zb, tb):
    # works elementwise on arrays as well as on floats
    return -(eta0**2) * (
        (1.0 - 2.0 * za) * (1.0 - 2.0 * zb)
        + 4.0 * decay * np.cos(ta - tb) * np.sqrt(za * (1.0 - za) * zb * (1.0 - zb))
    )


def joint_expectation(params: ProtocolParams, a: MeasurementSetting, b: MeasurementSetting) -> float:
    """Closed-form <O_a (x) O_b> on the heralded state."""
    return float(_correlator(coherence_decay(params), params.eta0, a.zeta, a.theta, b.zeta, b.theta))


def _check_two_qubits(rho: DensityOperator) -> None:
    if len(rho.layout) != 2 or not all(isinstance(m, Qubit) for m in rho.layout.modes):
        raise LayoutError(f"expected a two-qubit state, got layout {rho.layout}")


def joint_expectation_numeric(
    rho: DensityOperator, a: MeasurementSetting, b: MeasurementSetting, eta0: float
) -> float:
    """Tr[rho (O_a (x) O_b)] for any two-qubit state."""
    _check_two_qubits(rho)
    op = np.kron(prbo(a, eta0), prbo(b, eta0))
    return float(np.trace(rho.matrix @ op).real / rho.trace_weight)


def _chsh(e11, e12, e21, e22):
    return e11 + e12 + e22 - e21


def bell_function(params: ProtocolParams, settings: BellSettings) -> float:
    (a1, a2), (b1, b2) = settings.alice, settings.bob
    e = lambda a, b: joint_expectation(params, a, b)  # noqa: E731
    return _chsh(e(a1, b1), e(a1, b2), e(a2, b1), e(a2, b2))


def bell_function_numeric(rho: DensityOperator, settings: BellSettings, eta0: float) -> float:
    (a1, a2), (b1, b2) = settings.alice, settings.bob
    e = lambda a, b: joint_expectation_numeric(rho, a, b, eta0)  # noqa: E731
    return _chsh(e(a1, b1), e(a1, b2), e(a2, b1), e(a2, b2))


# -- optimization -------------------------------------------------------------

# unconstrained x -> (zeta, theta): zeta = sin^2(u) covers [0, 1] smoothly, theta = v mod 2 pi


def _decode(x: np.ndarray):
    u = x[0::2]
    zeta = np.sin(u) ** 2
    theta = np.mod(x[1::2], TWO_PI)
    return zeta, theta


def _settings_from(x: np.ndarray) -> BellSettings:
    zeta, theta = _decode(x)
    ms = [MeasurementSetting(float(min(max(z, 0.0), 1.0)), float(t)) for z, t in zip(zeta, theta)]
    return BellSettings(alice=(ms[0], ms[1]), bob=(ms[2], ms[3]))


def _neg_bell(x: np.ndarray, decay: float, eta0: float) -> float:
    (za1, za2, zb1, zb2), (ta1, ta2, tb1, tb2) = _decode(x)
    c = lambda i, j: _correlator(decay, eta0, (za1, za2)[i], (ta1, ta2)[i], (zb1, zb2)[j], (tb1, tb2)[j])  # noqa: E731
    return -float(_chsh(c(0, 0), c(0, 1), c(1, 0), c(1, 1)))


def optimize_bell(params: ProtocolParams, config: OptimizerConfig | None = None) -> BellOptimum:
    """Maximize the CHSH value over all eight setting parameters.

    Multi-start Nelder-Mead from scrambled Sobol seeds; the best restart is
    polished once more from its own optimum. ``converged`` is False only if
    no restart terminated successfully.
    """
    config = config or OptimizerConfig()
    decay = coherence_decay(params)
    eta0 = params.eta0
    sampler = qmc.Sobol(d=8, scramble=True, seed=config.seed)
    n_pts = 1 << max(0, math.ceil(math.log2(config.restarts)))
    seeds = sampler.random(n_pts)[: config.restarts]
    # u in [0, pi) covers zeta once; theta in [0, 2 pi)
    seeds = seeds * np.tile([math.pi, TWO_PI], 4)
    opts = {"xatol": config.xatol, "fatol": config.fatol, "maxiter": config.maxiter, "maxfev": config.maxiter}

    best = None
    any_ok = False
    for x0 in seeds:
        res = minimize(_neg_bell, x0, args=(decay, eta0), method="Nelder-Mead", options=opts)
        any_ok |= bool(res.success)
        if best is None or res.fun < best.fun:
            best = res
    polish = minimize(_neg_bell, best.x, args=(decay, eta0), method="Nelder-Mead", options=opts)
    if polish.fun < best.fun:
        best = polish
    settings = _settings_from(best.x)
    return BellOptimum(value=bell_function(params, settings), settings=settings, converged=any_ok)


# -- Horodecki ----------------------------------------------------------------


def correlation_matrix(rho: DensityOperator) -> np.ndarray:
    """t_ij = Tr[(sigma_i (x) sigma_j) rho] for i, j in (x, y, z)."""
    _check_two_qubits(rho)
    m = rho.matrix / rho.trace_weight
    t = np.empty((3, 3))
    for i, si in enumerate(PAULIS):
        for j, sj in enumerate(PAULIS):
            t[i, j] = np.trace(m @ np.kron(si, sj)).real
    return t


def horodecki_value(rho: DensityOperator) -> float:
    """Maximal CHSH value of a two-qubit state over projective +/-1 observables."""
    s = np.linalg.svd(correlation_matrix(rho), compute_uv=False)
    s = np.sort(np.abs(s))[::-1]
    return float(2.0 * math.sqrt(s[0] ** 2 + s[1] ** 2))


def bell_optimal(params: ProtocolParams) -> BellOptimal:
    """State-level optimum 2 sqrt(1 + (1 - 2R)^2) and its eta0^2-damped measurable value."""
    d = coherence_decay(params)
    state = 2.0 * math.sqrt(1.0 + d * d)
    return BellOptimal(state=state, measurable=params.eta0**2 * state)
