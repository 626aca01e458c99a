"""Dense state algebra over mixed qubit / truncated-Fock mode layouts.

Modes are ordered left to right and the Kronecker order follows the mode
order, so a layout ``(Qubit(), Fock(10))`` has basis index ``2 * 0 + n`` for
``|H, n>`` and ``11 + n`` for ``|V, n>``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence, Union

import numpy as np
from scipy.special import gammainc, gammaln

TAIL_TOL = 1e-12
PROB_FLOOR = 1e-15
HEADROOM = 4
MAX_DIM = 8192

HERMITIAN_TOL = 1e-12
PSD_FLOOR = -1e-10


class TruncationError(ValueError):
    """The Fock cutoff discards more probability than the tail tolerance allows."""


class NullEventError(ValueError):
    """Post-selection on an outcome whose probability is numerically zero."""


class LayoutError(ValueError):
    """Mode indices or layouts do not fit the operation."""


@dataclass(frozen=True)
class Qubit:
    """Polarization qubit, basis index 0 is H and 1 is V."""

    @property
    def dim(self) -> int:
        return 2


@dataclass(frozen=True)
class Fock:
    """Single bosonic mode truncated at ``cutoff`` photons."""

    cutoff: int

    def __post_init__(self):
        if self.cutoff < 0:
            raise ValueError(f"Fock cutoff must be >= 0, got {self.cutoff}")

    @property
    def dim(self) -> int:
        return self.cutoff + 1


ModeKind = Union[Qubit, Fock]


@dataclass(frozen=True)
class ModeLayout:
    modes: tuple[ModeKind, ...]

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(self.modes))

    @classmethod
    def of(cls, *modes: ModeKind) -> "ModeLayout":
        return cls(tuple(modes))

    def __len__(self) -> int:
        return len(self.modes)

    def __getitem__(self, i: int) -> ModeKind:
        return self.modes[i]

    def __add__(self, other: "ModeLayout") -> "ModeLayout":
        return ModeLayout(self.modes + other.modes)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(m.dim for m in self.modes)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims, dtype=np.int64))

    def subset(self, indices: Iterable[int]) -> "ModeLayout":
        return ModeLayout(tuple(self.modes[i] for i in indices))

    def check_indices(self, indices: Sequence[int]) -> None:
        if len(set(indices)) != len(indices):
            raise LayoutError(f"repeated mode index in {tuple(indices)}")
        for i in indices:
            if not 0 <= i < len(self.modes):
                raise LayoutError(f"mode index {i} out of range for {len(self.modes)} modes")


@dataclass(frozen=True, eq=False)
class StateVector:
    layout: ModeLayout
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape[0] != self.layout.dim:
            raise LayoutError(
                f"amplitude vector of length {amps.shape[0]} does not fit layout dimension {self.layout.dim}"
            )
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def density(self) -> "DensityOperator":
        a = self.amplitudes
        return DensityOperator(self.layout, np.outer(a, a.conj()))


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Hermitian operator on ``layout``; may be subnormalized.

    ``trace_weight`` is the (real) trace. States coming out of a POVM
    projection are renormalized; states built from truncated coherent
    amplitudes keep their slightly-below-one weight.
    """

    layout: ModeLayout
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        d = self.layout.dim
        if m.shape != (d, d):
            raise LayoutError(f"matrix shape {m.shape} does not fit layout dimension {d}")
        object.__setattr__(self, "matrix", m)

    @cached_property
    def trace_weight(self) -> float:
        return float(np.trace(self.matrix).real)

    @property
    def dim(self) -> int:
        return self.layout.dim

    def normalized(self) -> "DensityOperator":
        return DensityOperator(self.layout, self.matrix / self.trace_weight)

    def check(self, hermitian_tol: float = HERMITIAN_TOL, psd_floor: float = PSD_FLOOR) -> None:
        """Raise ``ValueError`` unless the matrix is Hermitian, PSD and has a real trace."""
        m = self.matrix
        asym = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
        if asym > hermitian_tol:
            raise ValueError(f"not Hermitian: max |M - M^dag| = {asym:.3e}")
        lo = float(np.linalg.eigvalsh(m).min())
        if lo < psd_floor:
            raise ValueError(f"not positive semidefinite: min eigenvalue {lo:.3e}")
        if abs(np.trace(m).imag) > hermitian_tol:
            raise ValueError("trace has an imaginary part")


def _hermitize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


# -- coherent states ---------------------------------------------------------


def poisson_tail(alpha: float, cutoff: int) -> float:
    """Probability that |alpha> has more than ``cutoff`` photons."""
    lam = float(alpha) ** 2
    if lam == 0.0:
        return 0.0
    return float(gammainc(cutoff + 1, lam))


def choose_cutoff(amplitude: float, tail_tol: float = TAIL_TOL, headroom: int = HEADROOM) -> int:
    """Smallest cutoff whose Poisson tail for ``amplitude`` is below ``tail_tol``, plus headroom."""
    n = 0
    while poisson_tail(amplitude, n) > tail_tol:
        n += 1
    return n + headroom


def coherent_amplitudes(alpha: float, cutoff: int) -> np.ndarray:
    n = np.arange(cutoff + 1)
    if alpha == 0.0:
        out = np.zeros(cutoff + 1)
        out[0] = 1.0
        return out
    # log-space avoids overflow of alpha**n / sqrt(n!) at large n
    logmag = -0.5 * alpha**2 + n * np.log(abs(alpha)) - 0.5 * gammaln(n + 1)
    return np.exp(logmag) * np.sign(alpha) ** n


def coherent_state(alpha: float, cutoff: int, tail_tol: float = TAIL_TOL) -> StateVector:
    """Truncated coherent state |alpha> for real ``alpha``.

    Raises:
        TruncationError: if the discarded Poisson tail exceeds ``tail_tol``.
    """
    if cutoff < 0:
        raise ValueError(f"cutoff must be >= 0, got {cutoff}")
    tail = poisson_tail(alpha, cutoff)
    if tail > tail_tol:
        raise TruncationError(
            f"cutoff {cutoff} drops Poisson tail {tail:.4g} > {tail_tol:.1e} for alpha={alpha}"
        )
    return StateVector(ModeLayout.of(Fock(cutoff)), coherent_amplitudes(alpha, cutoff))


def basis_state(layout: ModeLayout, indices: Sequence[int]) -> StateVector:
    """Product basis vector, one local index per mode."""
    if len(indices) != len(layout):
        raise LayoutError("one basis index per mode required")
    flat = int(np.ravel_multi_index(tuple(indices), layout.dims))
    amps = np.zeros(layout.dim, dtype=complex)
    amps[flat] = 1.0
    return StateVector(layout, amps)


# -- composition -------------------------------------------------------------


def tensor(a, b, max_dim: int = MAX_DIM):
    """Kronecker product of two states of the same kind (vectors or operators)."""
    layout = a.layout + b.layout
    if layout.dim > max_dim:
        raise LayoutError(f"tensor product dimension {layout.dim} exceeds cap {max_dim}")
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        return StateVector(layout, np.kron(a.amplitudes, b.amplitudes))
    if isinstance(a, DensityOperator) and isinstance(b, DensityOperator):
        return DensityOperator(layout, np.kron(a.matrix, b.matrix))
    raise TypeError("tensor expects two StateVectors or two DensityOperators")


def _as_tensor(rho: DensityOperator) -> np.ndarray:
    dims = rho.layout.dims
    return rho.matrix.reshape(dims + dims)


def partial_trace(rho: DensityOperator, keep: Iterable[int]) -> DensityOperator:
    """Trace out every mode not in ``keep``; kept modes stay in their original order."""
    keep = sorted(set(keep))
    if not keep:
        raise LayoutError("partial_trace needs at least one mode to keep")
    rho.layout.check_indices(keep)
    n = len(rho.layout)
    if len(keep) == n:
        return rho
    traced = [i for i in range(n) if i not in keep]
    dims = rho.layout.dims
    t = _as_tensor(rho)
    # bring traced ket/bra axes together then contract them
    perm = keep + traced + [n + i for i in keep] + [n + i for i in traced]
    dk = int(np.prod([dims[i] for i in keep]))
    dt = int(np.prod([dims[i] for i in traced]))
    t = t.transpose(perm).reshape(dk, dt, dk, dt)
    out = np.einsum("ajbj->ab", t)
    return DensityOperator(rho.layout.subset(keep), out)


def _move_front(rho: DensityOperator, at: Sequence[int]):
    """Return rho reshaped to (d_at, d_rest, d_at, d_rest) plus the axis order used."""
    n = len(rho.layout)
    rest = [i for i in range(n) if i not in at]
    dims = rho.layout.dims
    d_at = int(np.prod([dims[i] for i in at]))
    d_rest = int(np.prod([dims[i] for i in rest])) if rest else 1
    order = list(at) + rest
    perm = order + [n + i for i in order]
    t = _as_tensor(rho).transpose(perm).reshape(d_at, d_rest, d_at, d_rest)
    return t, order, d_at, d_rest


def _restore(t: np.ndarray, rho: DensityOperator, order: Sequence[int]) -> np.ndarray:
    dims = rho.layout.dims
    n = len(dims)
    shaped = t.reshape(tuple(dims[i] for i in order) * 2)
    inv = np.argsort(order)
    perm = list(inv) + [n + i for i in inv]
    return shaped.transpose(perm).reshape(rho.dim, rho.dim)


def apply_unitary(rho: DensityOperator, op: np.ndarray, at: Sequence[int]) -> DensityOperator:
    """Conjugate ``rho`` by ``op`` acting on the modes ``at`` (in that order)."""
    at = list(at)
    rho.layout.check_indices(at)
    t, order, d_at, d_rest = _move_front(rho, at)
    if op.shape != (d_at, d_at):
        raise LayoutError(f"operator shape {op.shape} does not match modes {tuple(at)} (dim {d_at})")
    flat = t.reshape(d_at, d_rest * d_at * d_rest)
    flat = op @ flat
    t = flat.reshape(d_at, d_rest, d_at, d_rest)
    # bra side: right-multiply by op^dag on axis 2
    t = np.einsum("iajb,kj->iakb", t, op.conj(), optimize=True)
    return DensityOperator(rho.layout, _hermitize(_restore(t, rho, order)))


def expand_operator(layout: ModeLayout, op: np.ndarray, at: Sequence[int]) -> np.ndarray:
    """Full-space matrix of ``op`` on modes ``at`` tensored with identity elsewhere."""
    at = list(at)
    layout.check_indices(at)
    n = len(layout)
    rest = [i for i in range(n) if i not in at]
    d_rest = int(np.prod([layout.dims[i] for i in rest])) if rest else 1
    full = np.kron(op, np.eye(d_rest))
    order = at + rest
    dims = layout.dims
    shaped = full.reshape(tuple(dims[i] for i in order) * 2)
    inv = list(np.argsort(order))
    return shaped.transpose(inv + [n + i for i in inv]).reshape(layout.dim, layout.dim)


def apply_povm(
    rho: DensityOperator,
    effect: np.ndarray,
    at: Sequence[int],
    prob_floor: float = PROB_FLOOR,
) -> tuple[float, DensityOperator]:
    """Apply a POVM effect on modes ``at`` and trace them out.

    Returns the outcome probability (relative to ``rho.trace_weight``) and
    the normalized conditional state on the remaining modes.

    Raises:
        NullEventError: if the probability is below ``prob_floor``.
    """
    at = list(at)
    rho.layout.check_indices(at)
    if len(at) == len(rho.layout):
        raise LayoutError("apply_povm must leave at least one mode unmeasured")
    t, order, d_at, d_rest = _move_front(rho, at)
    if effect.shape != (d_at, d_at):
        raise LayoutError(f"effect shape {effect.shape} does not match modes {tuple(at)} (dim {d_at})")
    # Tr_at[(E x I) rho] = sum_ij E_ji rho_(i a),(j b)
    unnorm = np.einsum("ji,iajb->ab", effect, t, optimize=True)
    prob = float(np.trace(unnorm).real) / rho.trace_weight
    if prob < prob_floor:
        raise NullEventError(f"outcome probability {prob:.3e} below floor {prob_floor:.1e}")
    rest_layout = rho.layout.subset(order[len(at):])
    post = DensityOperator(rest_layout, _hermitize(unnorm))
    return prob, post.normalized()


# -- distances ---------------------------------------------------------------


def _check_same_layout(a, b) -> None:
    if a.layout != b.layout:
        raise LayoutError(f"layout mismatch: {a.layout} vs {b.layout}")


def trace_distance(a: DensityOperator, b: DensityOperator) -> float:
    _check_same_layout(a, b)
    ev = np.linalg.eigvalsh(_hermitize(a.matrix - b.matrix))
    return float(0.5 * np.abs(ev).sum())


def fidelity_pure(psi: StateVector, rho: DensityOperator) -> float:
    """<psi|rho|psi> for a pure reference state."""
    _check_same_layout(psi, rho)
    v = psi.amplitudes
    return float(np.vdot(v, rho.matrix @ v).real)
