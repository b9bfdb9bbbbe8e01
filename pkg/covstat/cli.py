"""Command-line front end: ``python -m covstat <command> [options]``.

Commands write CSV/JSON files and print one status line per step. Exit codes
are 0 on success, 1 for usage or configuration problems, 2 when a numerical
check fails and 3 when an output file cannot be written.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from .config import (
    BOLTZMANN_MEV_PER_K,
    get_settings,
    kelvin_from_beta_m,
    resolve_mass,
    volume_from_fm3,
)
from .constraints import GasModel, LennardJonesParams, ModelKind
from .dynamics import boost_state, init_state, project, simulate
from .errors import AccuracyError, ConfigError, CovstatError, DomainError, DynamicsError
from .partition import ApproachKind, GasSpec
from .selftest import run_selftest
from .specfun import gauss_laguerre_rule
from .tables import figure1_table, table1_summary, thermo_table, trajectory_table
from .utils import format_file_size, make_grid, provenance, sidecar_path, validate_grid, write_csv, write_json

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_ACCURACY = 2
EXIT_IO = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(parser: argparse.ArgumentParser, default_out: str) -> None:
    parser.add_argument("--out", default=default_out, help="output file (relative paths use COVSTAT_OUTPUT_DIR)")
    parser.add_argument("--order", type=int, default=None, help="Gauss-Laguerre order, 1..128")
    parser.add_argument("--workers", type=int, default=None, help="worker threads for grid sweeps")
    parser.add_argument("--verbose", action="store_true", help="debug logging on stderr")
    parser.add_argument("--quiet", action="store_true", help="suppress status lines")


def _grid_options(parser: argparse.ArgumentParser, minimum: float, maximum: float, points: int) -> None:
    parser.add_argument("--beta-m-min", type=float, default=minimum)
    parser.add_argument("--beta-m-max", type=float, default=maximum)
    parser.add_argument("--beta-m-points", "--points", dest="beta_m_points", type=int, default=points)
    spacing = parser.add_mutually_exclusive_group()
    spacing.add_argument("--log-spaced", dest="log_spaced", action="store_true", default=True)
    spacing.add_argument("--linear", dest="log_spaced", action="store_false")


def _gas_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--gas", default=None, help="species from the species table (H, He, Ne, Ar)")
    parser.add_argument("--mass-mev", type=float, default=None, help="explicit rest mass in MeV")
    parser.add_argument("--n-particles", type=int, default=1000)
    parser.add_argument("--volume-fm3", type=float, default=1e6)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="covstat", description="Covariant statistical mechanics of the relativistic perfect gas.")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    figure1 = commands.add_parser("figure1", help="Y/m^3 of every approach on a beta*m grid")
    _grid_options(figure1, 0.01, 1000.0, 50)
    figure1.add_argument("--approach", action="append", default=None, help="repeatable; default all four")
    figure1.add_argument("--method", choices=["auto", "quadrature"], default="auto")
    _common(figure1, "figure1.csv")

    table1 = commands.add_parser("table1", help="ultra-relativistic closed forms and their numeric check")
    _gas_options(table1)
    table1.add_argument("--temperature-k", type=float, default=1e13)
    _common(table1, "table1.json")

    thermo = commands.add_parser("thermo", help="F, S, P, <E>, c_V over a temperature grid")
    _gas_options(thermo)
    thermo.add_argument("--temperature-k", action="append", type=float, default=None, help="repeatable")
    _grid_options(thermo, 1.0, 100.0, 20)
    thermo.add_argument("--approach", action="append", default=None)
    thermo.add_argument("--subtract-rest-mass", action="store_true")
    _common(thermo, "thermo.csv")

    sim = commands.add_parser("simulate", help="integrate the constrained N-particle dynamics")
    sim.add_argument("--model", choices=[kind.value for kind in ModelKind], default=ModelKind.PERFECT_COVARIANT.value)
    sim.add_argument("--n", type=int, default=5)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--dtau", type=float, default=0.01)
    sim.add_argument("--steps", type=int, default=1000)
    sim.add_argument("--box", type=float, default=10.0)
    sim.add_argument("--momentum-scale", type=float, default=0.1)
    sim.add_argument("--particle-mass", type=float, default=1.0)
    sim.add_argument("--tau0", type=float, default=0.0)
    sim.add_argument("--kappa", type=float, default=0.01)
    sim.add_argument("--sigma", type=float, default=1.0)
    sim.add_argument("--boost-vx", type=float, default=0.0, help="boost the initial state along x first")
    sim.add_argument("--record-every", type=int, default=1)
    sim.add_argument("--progress", action="store_true")
    _common(sim, "trajectory.csv")

    selftest = commands.add_parser("selftest", help="run the invariant suite")
    selftest.add_argument("--verbose", action="store_true")
    selftest.add_argument("--quiet", action="store_true")
    return parser


def _status(args, message: str) -> None:
    if not getattr(args, "quiet", False):
        print(message)


def _written(args, path: Path) -> None:
    _status(args, f"📁 Wrote {path} ({format_file_size(path.stat().st_size)})")


def _rule(args):
    order = args.order if args.order is not None else get_settings().quadrature_order
    if not 1 <= order <= 128:
        raise ConfigError(f"--order must lie in [1, 128], got {order}")
    return gauss_laguerre_rule(order)


def _workers(args) -> int:
    workers = args.workers if args.workers is not None else get_settings().workers
    if workers < 1:
        raise ConfigError(f"--workers must be >= 1, got {workers}")
    return workers


def _grid(args):
    check = validate_grid(args.beta_m_min, args.beta_m_max, args.beta_m_points)
    if not check["is_valid"]:
        raise ConfigError(check["message"])
    return make_grid(args.beta_m_min, args.beta_m_max, args.beta_m_points, args.log_spaced)


def _gas(args) -> GasSpec:
    mass = resolve_mass(args.gas, args.mass_mev)
    if args.volume_fm3 <= 0.0:
        raise ConfigError(f"--volume-fm3 must be positive, got {args.volume_fm3}")
    try:
        return GasSpec(n_particles=args.n_particles, mass=mass, volume=volume_from_fm3(args.volume_fm3))
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc


def _approaches(values: Optional[Sequence[str]]) -> Optional[List[ApproachKind]]:
    if values is None:
        return None
    try:
        return [ApproachKind.parse(value) for value in values]
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc


def cmd_figure1(args) -> int:
    grid = _grid(args)
    rule = _rule(args)
    approaches = _approaches(args.approach)
    _status(args, f"🔍 Evaluating Y/m^3 at {len(grid)} points (order {rule.order})")
    result = figure1_table(grid, approaches, rule, args.method, _workers(args))
    path = write_csv(result.frame, args.out, {"command": "figure1", "quadrature_order": rule.order})
    write_json(provenance(command="figure1", **result.metadata), sidecar_path(path))
    for note in result.metadata["warnings"]:
        _status(args, f"⚠️ {note}")
    _written(args, path)
    return EXIT_OK


def cmd_table1(args) -> int:
    gas = _gas(args)
    rule = _rule(args)
    temperature = BOLTZMANN_MEV_PER_K * args.temperature_k
    _status(args, f"🔍 Ultra-relativistic rows at T = {args.temperature_k:g} K (beta_m = {gas.mass / temperature:.4g})")
    summary = table1_summary(gas, temperature, rule)
    payload = {
        "provenance": provenance(command="table1", quadrature_order=rule.order),
        "gas": {"n_particles": gas.n_particles, "mass_mev": gas.mass, "volume_mev-3": gas.volume},
        "temperature_k": args.temperature_k,
        "beta_m": gas.mass / temperature,
        "approaches": summary,
    }
    path = write_json(payload, args.out)
    worst = max(max(entry["relative_deviation"].values()) for entry in summary.values())
    _status(args, f"✅ Numeric limit agrees with the closed forms to {worst:.2e}")
    _written(args, path)
    return EXIT_OK


def cmd_thermo(args) -> int:
    gas = _gas(args)
    rule = _rule(args)
    if args.temperature_k:
        temperatures = list(args.temperature_k)
        if any(t <= 0.0 for t in temperatures):
            raise ConfigError("temperatures must be positive")
    else:
        temperatures = [kelvin_from_beta_m(b, gas.mass) for b in _grid(args)]
    approaches = _approaches(args.approach)
    _status(args, f"🔍 Thermodynamics at {len(temperatures)} temperatures")
    result = thermo_table(gas, approaches, temperatures, rule, args.subtract_rest_mass, _workers(args))
    path = write_csv(result.frame, args.out, {"command": "thermo", "quadrature_order": rule.order})
    write_json(provenance(command="thermo", **result.metadata), sidecar_path(path))
    for note in result.metadata["warnings"]:
        _status(args, f"⚠️ {note}")
    _written(args, path)
    return EXIT_OK


def _model(args) -> GasModel:
    kind = ModelKind.parse(args.model)
    try:
        lj = LennardJonesParams(kappa=args.kappa, sigma=args.sigma) if kind is ModelKind.REAL_GAS else None
        return GasModel(kind, lj)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc


def cmd_simulate(args) -> int:
    model = _model(args)
    if args.steps < 0 or args.record_every < 1 or not args.dtau > 0.0:
        raise ConfigError("need steps >= 0, record-every >= 1 and dtau > 0")
    try:
        state = init_state(
            model,
            args.n,
            args.seed,
            box=args.box,
            momentum_scale=args.momentum_scale,
            tau0=args.tau0,
            mass=args.particle_mass,
        )
        if args.boost_vx:
            state = boost_state(state, [args.boost_vx, 0.0, 0.0])
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    if args.boost_vx:
        # the simple time fixation q0 = tau is frame dependent
        state = project(model, state)

    _status(args, f"🔍 Simulating {model.kind.value} gas, N={state.n}, {args.steps} steps of {args.dtau:g}")
    trajectory = simulate(model, state, args.dtau, args.steps, args.record_every, progress=args.progress)
    frame = trajectory_table(trajectory)
    metadata = {"command": "simulate", "model": model.kind.value, "seed": args.seed, "n": state.n}
    path = write_csv(frame, args.out, metadata)
    summary = provenance(**trajectory.summary(), seed=args.seed, boost_vx=args.boost_vx)
    if model.lj is not None:
        summary.update(kappa=model.lj.kappa, sigma=model.lj.sigma)
    write_json(summary, sidecar_path(path))
    _status(args, f"✅ Max residual {trajectory.max_residual:.2e}, wall time {trajectory.wall_time:.2f}s")
    _written(args, path)
    return EXIT_OK


def cmd_selftest(args) -> int:
    results = run_selftest()
    for result in results:
        marker = "✅" if result.passed else "❌"
        _status(args, f"{marker} {result.name}: {result.detail} ({result.execution_time:.2f}s)")
    failed = [result for result in results if not result.passed]
    if failed:
        _status(args, f"❌ {len(failed)} of {len(results)} checks failed")
        return EXIT_ACCURACY
    _status(args, f"✅ All {len(results)} checks passed")
    return EXIT_OK


COMMANDS = {
    "figure1": cmd_figure1,
    "table1": cmd_table1,
    "thermo": cmd_thermo,
    "simulate": cmd_simulate,
    "selftest": cmd_selftest,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"❌ {exc}", file=sys.stderr)
        return EXIT_USAGE

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, DomainError) as exc:
        print(f"❌ {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (AccuracyError, DynamicsError) as exc:
        print(f"❌ Numerical failure: {exc}", file=sys.stderr)
        return EXIT_ACCURACY
    except OSError as exc:
        print(f"❌ Cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"❌ Numerical failure: {exc}", file=sys.stderr)
        return EXIT_ACCURACY
    except CovstatError as exc:
        print(f"❌ {exc}", file=sys.stderr)
        return EXIT_ACCURACY
