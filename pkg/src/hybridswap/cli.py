"""Command-line entry point: ``hybridswap {sweep,max-distance,bell-optimize,teleport,verify}``.

Every option can also come from a ``--config`` file of ``key=value`` lines
(keys are the long option names, with or without leading dashes); explicit
flags override the file.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .bell import OptimizerConfig, bell_optimal, optimize_bell
from .channels import DistanceConvention, FiberModel, transmittance
from .protocol import ProtocolParams
from .sweep import (
    ConfigError,
    Criterion,
    MaxDistanceConfig,
    Range,
    SweepConfig,
    max_distance,
    run_sweep,
)
from .teleport import average_fidelity, average_fidelity_numeric, beats_classical
from .verify import default_grid, run_verification

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2

_CRITERIA = {"bell": Criterion.BELL, "fidelity": Criterion.FIDELITY}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def read_config(path: str) -> dict[str, str]:
    """Parse a ``key=value`` file; blank lines and ``#`` comments are ignored."""
    out: dict[str, str] = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    for n, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key=value, got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.lstrip("-").replace("-", "_")] = value
    return out


def _floats(text: str) -> list[float]:
    text = text.strip()
    if not text:
        return []
    try:
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise ConfigError(f"expected a comma-separated list of numbers, got {text!r}") from None


def _add_physics(p: argparse.ArgumentParser) -> None:
    p.add_argument("--loss-db-per-km", type=float, default=0.2)
    p.add_argument("--convention", choices=[c.value for c in DistanceConvention], default="total")


def _add_point(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--lab-km", type=float, default=0.0)
    p.add_argument("--T", type=float, default=None, help="transmittance; overrides --lab-km")
    p.add_argument("--eta0", type=float, default=1.0)
    _add_physics(p)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hybridswap", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sweep", help="closed-form values on a (lab separation, alpha) grid")
    p.add_argument("--config")
    p.add_argument("--lab-km", default="0:250:26", help="min:max:steps")
    p.add_argument("--alpha", default="0.05:1.0:20", help="min:max:steps")
    p.add_argument("--eta0", type=float, default=1.0)
    p.add_argument("--quantities", default="probability,bell,fidelity")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    _add_physics(p)

    p = sub.add_parser("max-distance", help="largest lab separation keeping a criterion")
    p.add_argument("--config")
    p.add_argument("--eta0", default="0.84:1.0:17", help="min:max:steps")
    p.add_argument("--alpha", default="0.1,0.2,0.3,0.5", help="comma-separated list")
    p.add_argument("--cap-km", type=float, default=200.0)
    p.add_argument("--criterion", choices=sorted(_CRITERIA), default="bell")
    p.add_argument("--out")
    _add_physics(p)

    p = sub.add_parser("bell-optimize", help="numerical CHSH optimum at one parameter point")
    p.add_argument("--config")
    _add_point(p)
    p.add_argument("--restarts", type=int, default=32)
    p.add_argument("--seed", type=int, default=2024)

    p = sub.add_parser("teleport", help="average teleportation fidelity at one parameter point")
    p.add_argument("--config")
    _add_point(p)

    p = sub.add_parser("verify", help="simulation vs closed form over a grid")
    p.add_argument("--config")
    p.add_argument("--alpha", default=None, help="comma-separated list")
    p.add_argument("--lab-km", default=None, help="comma-separated list")
    p.add_argument("--eta0", default=None, help="comma-separated list")
    p.add_argument("--cutoff", type=int, default=None, help="force the Fock cutoff")
    _add_physics(p)
    return parser


def parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(argv)
    if not getattr(args, "config", None):
        return args
    sub = parser._subparsers._group_actions[0].choices[args.command]  # noqa: SLF001
    flags = {a.dest: a.option_strings[-1] for a in sub._actions if a.option_strings}  # noqa: SLF001
    expanded: list[str] = []
    for key, value in read_config(args.config).items():
        if key not in flags or key == "config":
            raise ConfigError(f"unknown config key {key!r} for {args.command}")
        expanded += [flags[key], value]
    # config values go first so explicit flags, parsed later, win
    at = argv.index(args.command) + 1
    return parser.parse_args(argv[:at] + expanded + argv[at:])


def _fiber(args) -> FiberModel:
    return FiberModel(args.loss_db_per_km, DistanceConvention(args.convention))


def _point(args) -> ProtocolParams:
    T = args.T if args.T is not None else transmittance(_fiber(args), args.lab_km)
    return ProtocolParams(args.alpha, T, args.eta0)


def cmd_sweep(args) -> int:
    cfg = SweepConfig(
        lab_separation_km=Range.parse(args.lab_km),
        alpha=Range.parse(args.alpha),
        eta0=args.eta0,
        loss_db_per_km=args.loss_db_per_km,
        distance_convention=DistanceConvention(args.convention),
        quantities=tuple(q.strip() for q in args.quantities.split(",") if q.strip()),
        output_path=args.out,
        workers=args.workers,
    )
    text = run_sweep(cfg)
    if args.out is None:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_max_distance(args) -> int:
    cfg = MaxDistanceConfig(
        eta0=Range.parse(args.eta0),
        alphas=tuple(_floats(args.alpha)),
        cap_km=args.cap_km,
        criterion=_CRITERIA[args.criterion],
        loss_db_per_km=args.loss_db_per_km,
        distance_convention=DistanceConvention(args.convention),
        output_path=args.out,
    )
    text = max_distance(cfg)
    if args.out is None:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_bell_optimize(args) -> int:
    params = _point(args)
    res = optimize_bell(params, OptimizerConfig(restarts=args.restarts, seed=args.seed))
    ref = bell_optimal(params)
    print(f"alpha={params.alpha:.6g} T={params.T:.6g} eta0={params.eta0:.6g}")
    print(f"B_star={res.value:.6g} converged={res.converged}")
    print(f"B_state={ref.state:.6g} B_meas={ref.measurable:.6g}")
    for who, pair in (("alice", res.settings.alice), ("bob", res.settings.bob)):
        for k, s in enumerate(pair, 1):
            print(f"{who}{k}: zeta={s.zeta:.6g} theta={s.theta:.6g}")
    return EXIT_OK


def cmd_teleport(args) -> int:
    params = _point(args)
    f = average_fidelity(params)
    print(f"alpha={params.alpha:.6g} T={params.T:.6g} eta0={params.eta0:.6g}")
    print(f"F_av={f:.6g} F_av_numeric={average_fidelity_numeric(params):.6g}")
    print(f"quantum={'yes' if beats_classical(f) else 'no'} (threshold 2/3)")
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.alpha is None and args.lab_km is None and args.eta0 is None:
        grid = default_grid()
    else:
        fiber = _fiber(args)
        alphas = _floats(args.alpha) if args.alpha is not None else [0.3, 0.7]
        labs = _floats(args.lab_km) if args.lab_km is not None else [0.0]
        etas = _floats(args.eta0) if args.eta0 is not None else [1.0]
        grid = [ProtocolParams(a, transmittance(fiber, L), e) for a in alphas for L in labs for e in etas]
    report = run_verification(grid, cutoff=args.cutoff)
    print(report.render())
    return EXIT_OK if report.passed else EXIT_VERIFY_FAILED


COMMANDS = {
    "sweep": cmd_sweep,
    "max-distance": cmd_max_distance,
    "bell-optimize": cmd_bell_optimize,
    "teleport": cmd_teleport,
    "verify": cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    try:
        try:
            args = parse_args(argv)
        except SystemExit as exc:  # argparse usage errors and --help
            return exc.code if isinstance(exc.code, int) else EXIT_CONFIG
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
        return COMMANDS[args.command](args)
    except (ConfigError, ValueError) as exc:
        print(f"hybridswap: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
