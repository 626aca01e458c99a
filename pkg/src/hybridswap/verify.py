"""Simulation-versus-closed-form checks over a parameter grid."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

from .bell import MeasurementSetting, joint_expectation, joint_expectation_numeric
from .hilbert import NullEventError, TruncationError, trace_distance
from .protocol import (
    ProtocolParams,
    analytic_probability,
    analytic_shared_state,
    loss_factor,
    run_protocol_oracle,
)
from .teleport import InputQubit, fidelity_per_outcome, measured_fidelity

log = logging.getLogger(__name__)

STATE_TOL = 1e-8
PROB_TOL = 1e-8
CORRELATOR_TOL = 1e-8
FIDELITY_TOL = 1e-8

_SETTINGS = [
    MeasurementSetting(z, t)
    for z, t in [(1.0, 0.0), (0.5, 0.0), (0.5, 1.1), (0.15, 2.7), (0.85, 4.0)]
]
_INPUTS = [InputQubit(p, ph) for p in (0.0, 0.3, 0.5, 1.0) for ph in (0.0, 2.0)]


@dataclass
class Check:
    name: str
    tolerance: float
    worst: float = 0.0
    worst_at: ProtocolParams | None = None
    failures: list[str] = field(default_factory=list)

    def record(self, deviation: float, at: ProtocolParams) -> None:
        if deviation >= self.worst:
            self.worst, self.worst_at = deviation, at

    @property
    def passed(self) -> bool:
        return not self.failures and self.worst <= self.tolerance

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        where = ""
        if self.worst_at is not None:
            p = self.worst_at
            where = f" at alpha={p.alpha:g} T={p.T:g} eta0={p.eta0:g}"
        msg = f"[{status}] {self.name}: max deviation {self.worst:.3e} (tol {self.tolerance:.0e}){where}"
        for f in self.failures:
            msg += f"\n    {f}"
        return msg


@dataclass
class Report:
    checks: list[Check]
    points: int

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def render(self) -> str:
        lines = [f"verify: {self.points} grid points"]
        lines += [c.line() for c in self.checks]
        lines.append("OK" if self.passed else "FAILED")
        return "\n".join(lines)


def run_verification(grid, cutoff: int | None = None) -> Report:
    """Compare the Fock-space simulation with the closed forms at every grid point.

    ``grid`` is an iterable of ProtocolParams. A truncation error at any
    point is reported as a named failure instead of being raised.
    """
    state = Check("shared state trace distance", STATE_TOL)
    prob = Check("herald probability", PROB_TOL)
    corr = Check("joint expectation (trace vs closed form)", CORRELATOR_TOL)
    tele = Check("teleportation fidelity (3-qubit vs closed form)", FIDELITY_TOL)
    checks = [state, prob, corr, tele]
    points = list(grid)
    if not points:
        log.warning("verification grid is empty; nothing checked")
    for params in points:
        try:
            outcome = run_protocol_oracle(params, cutoff)
        except TruncationError as exc:
            state.failures.append(f"truncation error at alpha={params.alpha:g} T={params.T:g}: {exc}")
            continue
        except NullEventError as exc:
            state.failures.append(f"null herald at alpha={params.alpha:g} T={params.T:g}: {exc}")
            continue
        R = loss_factor(params)
        rho = outcome.shared_state
        state.record(trace_distance(rho, analytic_shared_state(R)), params)
        prob.record(abs(outcome.probability - analytic_probability(params)), params)
        for a, b in itertools.product(_SETTINGS, repeat=2):
            dev = abs(joint_expectation_numeric(rho, a, b, params.eta0) - joint_expectation(params, a, b))
            corr.record(dev, params)
        for q in _INPUTS:
            expect = params.eta0**2 * fidelity_per_outcome(R, q)
            tele.record(abs(measured_fidelity(params, q, shared=rho) - expect), params)
    return Report(checks, len(points))


def default_grid() -> list[ProtocolParams]:
    return [
        ProtocolParams(a, T, e)
        for a in (0.3, 0.7)
        for T in (0.25, 1.0)
        for e in (0.9, 1.0)
    ]
