"""Parameter sweeps and maximum-distance curves written as commented CSV."""

from __future__ import annotations

import csv
import enum
import hashlib
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from scipy.optimize import bisect

from .bell import bell_optimal
from .channels import DistanceConvention, FiberModel, lab_separation_for, transmittance
from .protocol import ProtocolParams, analytic_probability
from .teleport import average_fidelity

SWEEP_COLUMNS = ("L_ab_km", "alpha", "T", "Pr", "B_state", "B_meas", "F_av")
MAX_DISTANCE_COLUMNS = ("eta0", "alpha", "L_max_km")
QUANTITIES = ("probability", "bell", "fidelity")
CAP_TOKEN = "cap"
DISTANCE_TOL_KM = 0.01


class ConfigError(ValueError):
    """Invalid sweep or max-distance configuration."""


@dataclass(frozen=True)
class Range:
    min: float
    max: float
    steps: int

    def __post_init__(self):
        if self.steps < 2:
            raise ConfigError(f"range needs at least 2 steps, got {self.steps}")
        if not self.min < self.max:
            raise ConfigError(f"range needs min < max, got {self.min}..{self.max}")

    @classmethod
    def parse(cls, text: str) -> "Range":
        """'min:max:steps'."""
        try:
            lo, hi, n = text.split(":")
            return cls(float(lo), float(hi), int(n))
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"expected min:max:steps, got {text!r}") from None

    def values(self) -> list[float]:
        step = (self.max - self.min) / (self.steps - 1)
        out = [self.min + i * step for i in range(self.steps - 1)]
        return out + [self.max]

    def __str__(self) -> str:
        return f"{self.min!r}:{self.max!r}:{self.steps}"


@dataclass(frozen=True)
class SweepConfig:
    lab_separation_km: Range
    alpha: Range
    eta0: float = 1.0
    loss_db_per_km: float = 0.2
    distance_convention: DistanceConvention = DistanceConvention.TOTAL_SEPARATION
    quantities: tuple[str, ...] = QUANTITIES
    output_path: str | None = None
    workers: int = 1

    def __post_init__(self):
        qs = tuple(self.quantities)
        if not qs:
            raise ConfigError("at least one quantity must be requested")
        bad = [q for q in qs if q not in QUANTITIES]
        if bad:
            raise ConfigError(f"unknown quantities {bad}; choose from {QUANTITIES}")
        if not 0.0 <= self.eta0 <= 1.0:
            raise ConfigError(f"eta0 must lie in [0, 1], got {self.eta0}")
        if self.lab_separation_km.min < 0:
            raise ConfigError("lab separation must be >= 0")
        if self.alpha.min < 0:
            raise ConfigError("alpha must be >= 0")
        if self.loss_db_per_km < 0:
            raise ConfigError("loss_db_per_km must be >= 0")
        object.__setattr__(self, "quantities", tuple(q for q in QUANTITIES if q in qs))
        object.__setattr__(self, "distance_convention", DistanceConvention(self.distance_convention))

    @property
    def fiber(self) -> FiberModel:
        return FiberModel(self.loss_db_per_km, self.distance_convention)

    def describe(self) -> dict[str, str]:
        return {
            "lab_km": str(self.lab_separation_km),
            "alpha": str(self.alpha),
            "eta0": repr(float(self.eta0)),
            "loss_db_per_km": repr(float(self.loss_db_per_km)),
            "convention": self.distance_convention.value,
            "quantities": ",".join(self.quantities),
        }


class Criterion(str, enum.Enum):
    BELL = "bell_gt_2"
    FIDELITY = "fidelity_gt_2_3"


@dataclass(frozen=True)
class MaxDistanceConfig:
    eta0: Range
    alphas: tuple[float, ...]
    cap_km: float = 200.0
    criterion: Criterion = Criterion.BELL
    loss_db_per_km: float = 0.2
    distance_convention: DistanceConvention = DistanceConvention.TOTAL_SEPARATION
    output_path: str | None = None

    def __post_init__(self):
        if not (0.0 <= self.eta0.min and self.eta0.max <= 1.0):
            raise ConfigError("eta0 range must lie inside [0, 1]")
        if not self.alphas:
            raise ConfigError("at least one alpha is required")
        if any(a < 0 for a in self.alphas):
            raise ConfigError("alpha must be >= 0")
        if self.cap_km <= 0:
            raise ConfigError("distance cap must be positive")
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        object.__setattr__(self, "criterion", Criterion(self.criterion))
        object.__setattr__(self, "distance_convention", DistanceConvention(self.distance_convention))

    @property
    def fiber(self) -> FiberModel:
        return FiberModel(self.loss_db_per_km, self.distance_convention)

    def describe(self) -> dict[str, str]:
        return {
            "eta0": str(self.eta0),
            "alphas": ",".join(repr(a) for a in self.alphas),
            "cap_km": repr(float(self.cap_km)),
            "criterion": self.criterion.value,
            "loss_db_per_km": repr(float(self.loss_db_per_km)),
            "convention": self.distance_convention.value,
        }


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _fmt_km(x: float) -> str:
    return f"{x:.2f}"


def _header(kind: str, described: dict[str, str]) -> list[str]:
    body = " ".join(f"{k}={v}" for k, v in described.items())
    digest = hashlib.sha256(f"{kind} {body}".encode()).hexdigest()[:16]
    return [f"# hybridswap {kind} fingerprint={digest}", f"# {body}"]


# -- sweep --------------------------------------------------------------------


@dataclass(frozen=True)
class _Point:
    lab_km: float
    alpha: float
    eta0: float
    fiber: FiberModel
    quantities: tuple[str, ...] = field(default=QUANTITIES)


def evaluate_point(point: _Point) -> list[str]:
    T = transmittance(point.fiber, point.lab_km)
    params = ProtocolParams(point.alpha, T, point.eta0)
    row = [_fmt_km(point.lab_km), _fmt(point.alpha), _fmt(T), "", "", "", ""]
    if "probability" in point.quantities:
        row[3] = _fmt(analytic_probability(params))
    if "bell" in point.quantities:
        b = bell_optimal(params)
        row[4], row[5] = _fmt(b.state), _fmt(b.measurable)
    if "fidelity" in point.quantities:
        row[6] = _fmt(average_fidelity(params))
    return row


def sweep_rows(config: SweepConfig) -> list[list[str]]:
    """Rows in grid order: lab separation outer, alpha inner."""
    points = [
        _Point(L, a, config.eta0, config.fiber, config.quantities)
        for L in config.lab_separation_km.values()
        for a in config.alpha.values()
    ]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            return list(pool.map(evaluate_point, points, chunksize=64))
    return [evaluate_point(p) for p in points]


def _render(header: list[str], columns: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
    buf = io.StringIO()
    for line in header:
        buf.write(line + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(rows)
    return buf.getvalue()


def _emit(text: str, path: str | None) -> None:
    if path is None:
        return
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise ConfigError(f"cannot write output {path!r}: {exc}") from exc


def run_sweep(config: SweepConfig) -> str:
    """Evaluate the closed forms over the grid; returns the CSV text and writes it if configured."""
    text = _render(_header("sweep", config.describe()), SWEEP_COLUMNS, sweep_rows(config))
    _emit(text, config.output_path)
    return text


# -- maximum distance ----------------------------------------------------------


def criterion_holds(criterion: Criterion, alpha: float, T: float, eta0: float) -> bool:
    params = ProtocolParams(alpha, T, eta0)
    if criterion is Criterion.BELL:
        return bell_optimal(params).measurable > 2.0
    return average_fidelity(params) > 2.0 / 3.0


def max_distance_bisect(
    criterion: Criterion,
    alpha: float,
    eta0: float,
    fiber: FiberModel,
    cap_km: float = 200.0,
    tol_km: float = DISTANCE_TOL_KM,
) -> float | None:
    """Largest lab separation where the criterion holds; None when it still holds at the cap."""
    ok = lambda L: criterion_holds(criterion, alpha, transmittance(fiber, L), eta0)  # noqa: E731
    if not ok(0.0):
        return 0.0
    if ok(cap_km):
        return None
    # sign flips from +1 (holds) to -1 (fails); both quantities decrease with distance
    return float(bisect(lambda L: 1.0 if ok(L) else -1.0, 0.0, cap_km, xtol=tol_km / 4))


def max_distance_closed_form(
    criterion: Criterion, alpha: float, eta0: float, fiber: FiberModel
) -> float | None:
    """Invert the closed-form criterion for the boundary distance.

    Returns 0.0 when the criterion fails even at zero distance and ``None``
    when no finite distance breaks it.
    """
    if eta0 <= 0:
        return 0.0
    if criterion is Criterion.BELL:
        # eta0^4 (1 + exp(-8 (1 - T eta0) a^2)) = 1
        need = eta0**-4 - 1.0
        rate = 8.0
    else:
        # eta0^2 (2 + exp(-4 (1 - T eta0) a^2)) / 3 = 2/3
        need = 2.0 * eta0**-2 - 2.0
        rate = 4.0
    if need >= 1.0:
        return 0.0
    if need <= 0.0 or alpha == 0.0:
        return None
    loss_at_boundary = -math.log(need) / (rate * alpha**2)  # = 1 - T eta0
    T = (1.0 - loss_at_boundary) / eta0
    if T > 1.0:
        return 0.0
    if T <= 0.0:
        return None
    return lab_separation_for(fiber, T)


def max_distance_rows(config: MaxDistanceConfig) -> list[list[str]]:
    rows = []
    for eta0 in config.eta0.values():
        for alpha in config.alphas:
            L = max_distance_bisect(config.criterion, alpha, eta0, config.fiber, config.cap_km)
            rows.append([_fmt(eta0), _fmt(alpha), CAP_TOKEN if L is None else _fmt_km(L)])
    return rows


def max_distance(config: MaxDistanceConfig) -> str:
    text = _render(_header("max-distance", config.describe()), MAX_DISTANCE_COLUMNS, max_distance_rows(config))
    _emit(text, config.output_path)
    return text
