"""Command-line interface: verify, list, and derive.

Exit codes: 0 when every selected check passes, 1 on an identity failure,
2 on configuration or usage errors.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from . import __version__
from .calculus import iterated, partial_ij
from .errors import ConfigError, GroupCalcError
from .groups import direction_from_coords, element_from_coords
from .scenarios import Scenario, builtin_corpus, load_scenarios, scenario_by_name
from .suites import RunContext, SUITE_NAMES, run_suites


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="groupcalc",
        description="Directional calculus on matrix groups: verify the "
        "identity suites, list scenarios, or take ad-hoc derivatives.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="run identity suites over the registry")
    verify.add_argument(
        "--suite",
        action="append",
        choices=SUITE_NAMES,
        help="suite to run (repeatable; default: all)",
    )
    verify.add_argument(
        "--scenario", action="append", help="scenario name (repeatable; default: all)"
    )
    verify.add_argument("--seed", type=int, default=42, help="sampling seed")
    verify.add_argument(
        "--tol", type=float, default=None, help="override every suite tolerance"
    )
    verify.add_argument(
        "--samples", type=int, default=None, help="override per-check sample counts"
    )
    verify.add_argument(
        "--mode", choices=("float", "exact"), default="float", help="scalar mode"
    )
    verify.add_argument(
        "--fd-step", type=float, default=None, help="difference-oracle step size"
    )
    verify.add_argument("--report", help="write the JSON report to this path")
    verify.add_argument("--config", help="scenario registry (TOML), replaces built-ins")

    lister = sub.add_parser("list", help="print the scenario registry")
    lister.add_argument("--config", help="scenario registry (TOML), replaces built-ins")

    derive = sub.add_parser("derive", help="evaluate one derivative request")
    derive.add_argument("--scenario", required=True, help="scenario name")
    derive.add_argument(
        "--order",
        required=True,
        help="derivative order: 'i' for one argument, 'i,j' for two",
    )
    derive.add_argument(
        "--point",
        required=True,
        help="comma-separated chart coordinates of the base point(s)",
    )
    derive.add_argument("--config", help="scenario registry (TOML), replaces built-ins")
    return parser


def _load_registry(config: Optional[str]) -> tuple[Scenario, ...]:
    if config is None:
        return builtin_corpus()
    return load_scenarios(config)


def _select_scenarios(registry, names: Optional[Sequence[str]]):
    if not names:
        return list(registry)
    return [scenario_by_name(registry, name) for name in names]


def _cmd_verify(args) -> int:
    registry = _load_registry(args.config)
    chosen = _select_scenarios(registry, args.scenario)
    if args.mode == "exact" and args.scenario:
        bad = [sc.name for sc in chosen if not sc.exact_capable]
        if bad:
            raise ConfigError(
                f"scenarios not available in exact mode: {', '.join(bad)}"
            )
    ctx = RunContext(
        seed=args.seed,
        mode=args.mode,
        tolerance_override=args.tol,
        samples_override=args.samples,
        fd_step=args.fd_step,
    )
    report = run_suites(chosen, args.suite, ctx)
    for record in report.records:
        print(record.line())
    for note in report.meta["notes"]:
        print(f"note: {note}")
    failed = [r for r in report.records if not r.passed]
    status = "PASS" if not failed else f"FAIL ({len(failed)} of {len(report.records)})"
    print(
        f"{status}: {len(report.records)} checks, seed={args.seed}, "
        f"mode={args.mode}, {report.meta['wall_time_s']:.2f}s"
    )
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(report.to_json())
    return 0 if report.all_passed else 1


def _cmd_list(args) -> int:
    registry = _load_registry(args.config)
    for sc in registry:
        orders = ",".join(str(o) for o in sc.orders)
        print(f"{sc.describe()}  orders={orders}")
    return 0


def _parse_orders(text: str) -> tuple[int, ...]:
    try:
        parts = tuple(int(p) for p in text.split(","))
    except ValueError:
        raise ConfigError(f"bad order spec {text!r}; use 'i' or 'i,j'")
    if len(parts) not in (1, 2) or any(p < 0 for p in parts):
        raise ConfigError(f"bad order spec {text!r}; use 'i' or 'i,j'")
    return parts


def _cmd_derive(args) -> int:
    registry = _load_registry(args.config)
    sc = scenario_by_name(registry, args.scenario)
    orders = _parse_orders(args.order)
    if len(orders) != sc.arity:
        raise ConfigError(
            f"scenario {sc.name!r} takes {sc.arity} argument(s); "
            f"--order has {len(orders)} part(s)"
        )
    try:
        coords = [float(c) for c in args.point.split(",")]
    except ValueError:
        raise ConfigError(f"bad point {args.point!r}: expected comma-separated numbers")
    dims = [spec.dim for spec in sc.arg_specs]
    if len(coords) != sum(dims):
        raise ConfigError(
            f"scenario {sc.name!r} needs {sum(dims)} coordinates, got {len(coords)}"
        )
    points = []
    offset = 0
    for spec, dim in zip(sc.arg_specs, dims):
        try:
            points.append(element_from_coords(spec, coords[offset : offset + dim]))
        except GroupCalcError as exc:
            raise ConfigError(f"bad base point: {exc}")
        offset += dim

    def basis_dirs(spec, count):
        dirs = []
        for k in range(count):
            unit = [0.0] * spec.dim
            unit[k % spec.dim] = 1.0
            dirs.append(direction_from_coords(spec, unit))
        return tuple(dirs)

    fn = sc.function
    if sc.arity == 1:
        dirs = basis_dirs(sc.arg_specs[0], orders[0])
        value = iterated(fn, points[0], dirs)
        used = [f"e{(k % sc.arg_specs[0].dim) + 1}" for k in range(orders[0])]
        print(f"scenario: {sc.name}")
        print(f"order: {orders[0]}  directions: {', '.join(used) or '(none)'}")
    else:
        gs = basis_dirs(sc.arg_specs[0], orders[0])
        hs = basis_dirs(sc.arg_specs[1], orders[1])
        value = partial_ij(fn, points[0], points[1], gs, hs)
        print(f"scenario: {sc.name}")
        print(f"order: ({orders[0]},{orders[1]}) along cycling basis directions")
    print("value:", " ".join(repr(float(v)) for v in value))
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "list":
            return _cmd_list(args)
        return _cmd_derive(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except GroupCalcError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
